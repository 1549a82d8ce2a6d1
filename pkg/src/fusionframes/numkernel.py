"""Dense linear-algebra kernel.

Everything here is a pure function of its inputs. Matrices are plain
``numpy.ndarray`` objects of dtype float64 or complex128.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import InvalidInputError, SingularOperatorError

EPS = np.finfo(float).eps
MAX_DIM = 4096
HERMITIAN_TOL = 1e-10
# relative floor below which an eigenvalue counts as zero for inverse-type maps
SINGULAR_TOL = 1e-12


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float64/complex128 array and reject NaN/Inf."""
    A = np.asarray(M)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if A.dtype.kind not in "biufc":
        raise InvalidInputError(f"{name} has non-numeric dtype {A.dtype}")
    A = A.astype(np.complex128 if np.iscomplexobj(A) else np.float64, copy=False)
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if max(A.shape, default=0) > MAX_DIM:
        raise InvalidInputError(f"{name} exceeds the dimension cap {MAX_DIM}")
    return A


def as_vector(f, n: int | None = None, name: str = "vector") -> np.ndarray:
    v = np.asarray(f)
    if v.ndim != 1:
        v = v.reshape(-1)
    if v.dtype.kind not in "biufc":
        raise InvalidInputError(f"{name} has non-numeric dtype {v.dtype}")
    v = v.astype(np.complex128 if np.iscomplexobj(v) else np.float64, copy=False)
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if n is not None and v.shape[0] != n:
        raise InvalidInputError(f"{name} has length {v.shape[0]}, expected {n}")
    return v


def adjoint(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def opnorm(M: np.ndarray) -> float:
    """Spectral norm; 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def _fix_column_phases(Q: np.ndarray) -> np.ndarray:
    # make the largest-magnitude entry of every column real and positive
    if Q.shape[1] == 0:
        return Q
    idx = np.argmax(np.abs(Q), axis=0)
    pivots = Q[idx, np.arange(Q.shape[1])]
    phases = pivots / np.abs(pivots)
    if np.iscomplexobj(Q):
        return Q * phases.conj()
    return Q * np.sign(phases)


def rank_threshold(s: np.ndarray, shape: tuple[int, int], tol: float | None) -> float:
    if s.size == 0:
        return 0.0
    smax = float(s[0])
    if tol is None:
        return max(shape) * EPS * smax
    return tol * smax


def numerical_rank(M, tol: float | None = None) -> int:
    """Rank with the relative threshold ``tol * s_max``.

    The default threshold is ``max(rows, cols) * eps * s_max``.
    """
    A = as_matrix(M)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_threshold(s, A.shape, tol)))


def orthonormalize(M, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) for the column space of ``M``.

    Rank-revealing SVD: the number of returned columns is the numerical rank
    of ``M`` at threshold ``tol * s_max`` (default ``max(shape) * eps * s_max``).
    Column phases are normalised so the output is deterministic.
    """
    A = as_matrix(M)
    rows, cols = A.shape
    if cols == 0 or rows == 0:
        return np.zeros((rows, 0), dtype=A.dtype)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((rows, 0), dtype=A.dtype)
    r = int(np.count_nonzero(s > rank_threshold(s, A.shape, tol)))
    return _fix_column_phases(U[:, :r].copy())


def null_space(M, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the kernel of ``M`` (columns)."""
    A = as_matrix(M)
    rows, cols = A.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=A.dtype)
    if rows == 0:
        return np.eye(cols, dtype=A.dtype)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    r = 0 if s[0] == 0.0 else int(np.count_nonzero(s > rank_threshold(s, A.shape, tol)))
    return _fix_column_phases(adjoint(Vh)[:, r:].copy())


@dataclass(frozen=True, eq=False)
class EigResult:
    """Spectrum of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else 0.0

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1]) if self.eigenvalues.size else 0.0


def hermitian_defect(A: np.ndarray) -> float:
    return opnorm(A - adjoint(A))


def check_hermitian(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    scale = opnorm(A)
    if hermitian_defect(A) > tol * max(scale, 1e-300):
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    return A


def herm_eig(A) -> EigResult:
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues are returned ascending. Each eigenvector is rotated so its
    largest-magnitude component is real and positive.
    """
    A = check_hermitian(A)
    H = (A + adjoint(A)) / 2
    w, V = np.linalg.eigh(H)
    return EigResult(eigenvalues=w, eigenvectors=_fix_column_phases(V))


def eigvalsh(A) -> np.ndarray:
    A = check_hermitian(A)
    return np.linalg.eigvalsh((A + adjoint(A)) / 2)


def _inv(w: np.ndarray, floor: float) -> np.ndarray:
    if np.any(w <= floor):
        raise SingularOperatorError("inverse requested of a singular operator")
    return 1.0 / w


def _inv_sqrt(w: np.ndarray, floor: float) -> np.ndarray:
    if np.any(w <= floor):
        raise SingularOperatorError("inverse square root requested of a singular operator")
    return 1.0 / np.sqrt(w)


def _sqrt(w: np.ndarray, floor: float) -> np.ndarray:
    if np.any(w < -floor):
        raise SingularOperatorError("square root requested of an indefinite operator")
    return np.sqrt(np.clip(w, 0.0, None))


def _pinv(w: np.ndarray, floor: float) -> np.ndarray:
    out = np.zeros_like(w)
    keep = w > floor
    out[keep] = 1.0 / w[keep]
    return out


_NAMED = {
    "inv": _inv,
    "inverse": _inv,
    "inv_sqrt": _inv_sqrt,
    "inverse_sqrt": _inv_sqrt,
    "sqrt": _sqrt,
    "pinv": _pinv,
    "identity": lambda w, floor: w,
}

SpectralMap = Union[str, Callable[[np.ndarray], np.ndarray]]


def herm_fn(A, f: SpectralMap, rel_tol: float = SINGULAR_TOL) -> np.ndarray:
    """Apply a real function to the spectrum of a Hermitian matrix.

    ``f`` is either a vectorised callable or one of the names ``"inv"``,
    ``"inv_sqrt"``, ``"sqrt"``, ``"pinv"``, ``"identity"``. Named inverse maps
    raise :class:`SingularOperatorError` when an eigenvalue is at or below
    ``rel_tol * max|lambda|``; ``"pinv"`` inverts only above that floor.
    """
    eig = herm_eig(A)
    w, V = eig.eigenvalues, eig.eigenvectors
    floor = rel_tol * float(np.max(np.abs(w))) if w.size else 0.0
    if isinstance(f, str):
        try:
            fw = _NAMED[f](w, floor)
        except KeyError:
            raise InvalidInputError(f"unknown spectral function {f!r}") from None
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise SingularOperatorError("spectral function undefined on the spectrum")
    return (V * fw) @ adjoint(V)


def is_unitary(U, tol: float = 1e-10) -> bool:
    U = as_matrix(U)
    if U.shape[0] != U.shape[1]:
        return False
    return opnorm(adjoint(U) @ U - np.eye(U.shape[0])) <= tol


def is_hermitian(A, tol: float = HERMITIAN_TOL) -> bool:
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and hermitian_defect(A) <= tol * max(opnorm(A), 1e-300)


def result_dtype(*arrays) -> type:
    return np.complex128 if any(np.iscomplexobj(a) for a in arrays) else np.float64
