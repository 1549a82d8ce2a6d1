"""Subspaces of C^n / R^n stored through orthonormal bases."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .errors import InvalidInputError

INTERSECT_TOL = 1e-8
ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace given by an ``(ambient_dim, dim)`` matrix with orthonormal columns.

    ``dim`` may be zero. ``meta`` carries bookkeeping such as a rank collapse
    detected by :func:`apply_operator`.
    """

    ambient_dim: int
    basis: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        B = np.asarray(self.basis)
        if B.ndim != 2 or B.shape[0] != self.ambient_dim:
            raise InvalidInputError(
                f"basis shape {B.shape} does not match ambient dimension {self.ambient_dim}"
            )
        if B.shape[1] > self.ambient_dim:
            raise InvalidInputError("more basis vectors than the ambient dimension")
        gram = nk.adjoint(B) @ B
        if B.shape[1] and nk.opnorm(gram - np.eye(B.shape[1])) > ORTHONORMAL_TOL:
            raise InvalidInputError("basis columns are not orthonormal")
        B = B.copy()
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.basis)

    def projector(self) -> np.ndarray:
        return projector(self)

    def contains(self, f, tol: float = 1e-9) -> bool:
        f = nk.as_vector(f, self.ambient_dim)
        return np.linalg.norm(f - self.basis @ (nk.adjoint(self.basis) @ f)) <= tol * max(
            np.linalg.norm(f), 1.0
        )

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def from_spanning(vectors, tol: float | None = None, ambient_dim: int | None = None) -> Subspace:
    """Column span of ``vectors`` (an ``n x k`` matrix, ``k`` may be 0)."""
    V = np.asarray(vectors)
    if V.size == 0:
        n = ambient_dim if ambient_dim is not None else (V.shape[0] if V.ndim == 2 else 0)
        if n < 1:
            raise InvalidInputError("cannot infer ambient dimension of an empty spanning set")
        return zero(n, complex_=np.iscomplexobj(V))
    V = nk.as_matrix(V, "vectors")
    if ambient_dim is not None and V.shape[0] != ambient_dim:
        raise InvalidInputError(f"vectors have {V.shape[0]} rows, expected {ambient_dim}")
    return Subspace(V.shape[0], nk.orthonormalize(V, tol))


def zero(n: int, complex_: bool = False) -> Subspace:
    return Subspace(n, np.zeros((n, 0), dtype=np.complex128 if complex_ else np.float64))


def full(n: int, complex_: bool = False) -> Subspace:
    return Subspace(n, np.eye(n, dtype=np.complex128 if complex_ else np.float64))


def coordinate(n: int, indices, complex_: bool = False) -> Subspace:
    """Span of the standard basis vectors ``e_k``, ``k`` in ``indices``."""
    I = np.eye(n, dtype=np.complex128 if complex_ else np.float64)
    return Subspace(n, I[:, list(indices)])


def projector(W: Subspace) -> np.ndarray:
    """Orthogonal projection onto ``W``: ``basis @ basis^H``."""
    B = W.basis
    return B @ nk.adjoint(B)


def complement(W: Subspace) -> Subspace:
    return Subspace(W.ambient_dim, nk.null_space(nk.adjoint(W.basis)) if W.dim else np.eye(W.ambient_dim, dtype=W.basis.dtype))


def span(subspaces, ambient_dim: int | None = None, tol: float | None = None) -> Subspace:
    """Sum ``W_1 + ... + W_k`` of a list of subspaces."""
    subspaces = list(subspaces)
    if not subspaces:
        if ambient_dim is None:
            raise InvalidInputError("ambient dimension needed for an empty span")
        return zero(ambient_dim)
    n = subspaces[0].ambient_dim
    stacked = np.hstack([W.basis for W in subspaces])
    if stacked.shape[1] == 0:
        return zero(n, complex_=np.iscomplexobj(stacked))
    return Subspace(n, nk.orthonormalize(stacked, tol))


def _same_ambient(W: Subspace, V: Subspace) -> None:
    if W.ambient_dim != V.ambient_dim:
        raise InvalidInputError(
            f"ambient dimensions differ: {W.ambient_dim} vs {V.ambient_dim}"
        )


def intersect(W: Subspace, V: Subspace, tol: float = INTERSECT_TOL) -> Subspace:
    """``W ∩ V`` as the eigenvalue-1 eigenspace of ``P_W P_V P_W`` restricted to ``W``.

    Working inside ``W`` (via ``B^H P_V B``, ``B`` the basis of ``W``) gives the
    cosines squared of the principal angles; eigenvalues within ``tol`` of 1
    are accepted. Candidates are then checked for membership in ``V``.
    """
    _same_ambient(W, V)
    dtype = nk.result_dtype(W.basis, V.basis)
    if W.dim == 0 or V.dim == 0:
        return zero(W.ambient_dim, complex_=dtype is np.complex128)
    # symmetric: compute inside the smaller subspace
    if V.dim < W.dim:
        W, V = V, W
    B = W.basis.astype(dtype)
    C = nk.adjoint(B) @ V.basis
    M = C @ nk.adjoint(C)
    eig = nk.herm_eig(M)
    keep = eig.eigenvalues >= 1.0 - tol
    cand = B @ eig.eigenvectors[:, keep]
    if cand.shape[1] == 0:
        return zero(W.ambient_dim, complex_=dtype is np.complex128)
    PV = projector(V)
    resid = np.linalg.norm(PV @ cand - cand, axis=0)
    cand = cand[:, resid <= np.sqrt(2 * tol) + 1e-12]
    return Subspace(W.ambient_dim, nk.orthonormalize(cand) if cand.shape[1] else cand)


def apply_operator(T, W: Subspace, tol: float | None = None) -> Subspace:
    """Image ``T(W)``, re-orthonormalised.

    When ``T`` collapses the dimension of ``W`` the result carries
    ``meta["rank_collapse"] = True``.
    """
    T = nk.as_matrix(T, "operator")
    if T.shape != (W.ambient_dim, W.ambient_dim):
        raise InvalidInputError(f"operator shape {T.shape} does not act on dimension {W.ambient_dim}")
    if W.dim == 0:
        return zero(W.ambient_dim, complex_=np.iscomplexobj(T) or W.is_complex)
    image = T @ W.basis
    # rank decision relative to the operator scale, not the image's own largest singular value
    s = np.linalg.svd(image, compute_uv=False)
    scale = max(nk.opnorm(T), 1e-300)
    thresh = (tol if tol is not None else max(T.shape) * nk.EPS) * scale
    r = int(np.count_nonzero(s > thresh))
    Q = nk.orthonormalize(image)[:, :r] if r else np.zeros((W.ambient_dim, 0), dtype=image.dtype)
    meta = {"rank_collapse": True} if r < W.dim else {}
    return Subspace(W.ambient_dim, Q, meta)


def distance(W: Subspace, V: Subspace) -> float:
    """Operator-norm distance ``||P_W - P_V||_2`` (the sine of the largest principal angle)."""
    _same_ambient(W, V)
    return nk.opnorm(projector(W) - projector(V))


def random_subspace(n: int, k: int, rng: np.random.Generator, complex_: bool = False) -> Subspace:
    """Haar-distributed ``k``-dimensional subspace (testing and demos)."""
    if k == 0:
        return zero(n, complex_)
    G = rng.standard_normal((n, k))
    if complex_:
        G = G + 1j * rng.standard_normal((n, k))
    return Subspace(n, nk.orthonormalize(G))
