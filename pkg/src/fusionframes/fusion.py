"""Weighted families of subspaces and their operators.

The frame inequality uses squared weights::

    C ||f||^2 <= sum_i v_i^2 ||P_i f||^2 <= D ||f||^2

and every report quotes the weights ``v_i`` themselves, never ``v_i^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkernel as nk
from . import subspace as sp
from .errors import InvalidInputError, SingularOperatorError
from .subspace import Subspace

PARSEVAL_TOL = 1e-9
TIGHT_TOL = 1e-9
FRAME_TOL_REL = 1e-10
EQUIVALENCE_TOL = 1e-8
BLOCK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedFamily:
    """Ordered family ``{(W_i, v_i)}`` of subspaces of a common space."""

    ambient_dim: int
    subspaces: tuple[Subspace, ...]
    weights: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise InvalidInputError("ambient dimension must be at least 1")
        if self.ambient_dim > nk.MAX_DIM:
            raise InvalidInputError(f"ambient dimension exceeds the cap {nk.MAX_DIM}")
        subs = tuple(self.subspaces)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(subs) != w.shape[0]:
            raise InvalidInputError(f"{len(subs)} subspaces but {w.shape[0]} weights")
        for i, W in enumerate(subs):
            if not isinstance(W, Subspace):
                raise InvalidInputError(f"item {i} is not a Subspace")
            if W.ambient_dim != self.ambient_dim:
                raise InvalidInputError(
                    f"subspace {i} lives in dimension {W.ambient_dim}, family in {self.ambient_dim}"
                )
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidInputError("weights must be finite and strictly positive")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "weights", w)

    @classmethod
    def build(cls, subspaces: Sequence[Subspace], weights=1.0, ambient_dim: int | None = None):
        """Family from subspaces and either one common weight or a list of weights."""
        subspaces = list(subspaces)
        if ambient_dim is None:
            if not subspaces:
                raise InvalidInputError("ambient dimension needed for an empty family")
            ambient_dim = subspaces[0].ambient_dim
        w = np.broadcast_to(np.asarray(weights, dtype=float), (len(subspaces),))
        return cls(ambient_dim, tuple(subspaces), w)

    def __len__(self) -> int:
        return len(self.subspaces)

    def __iter__(self):
        return iter(zip(self.subspaces, self.weights))

    @property
    def dims(self) -> list[int]:
        return [W.dim for W in self.subspaces]

    @property
    def is_complex(self) -> bool:
        return any(W.is_complex for W in self.subspaces)

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    def subfamily(self, indices) -> "WeightedFamily":
        idx = list(indices)
        return WeightedFamily(
            self.ambient_dim, tuple(self.subspaces[i] for i in idx), self.weights[idx]
        )

    def without(self, i: int) -> "WeightedFamily":
        return self.subfamily(j for j in range(len(self)) if j != i)

    def projectors(self) -> list[np.ndarray]:
        return [sp.projector(W) for W in self.subspaces]

    def stacked_basis(self, weighted: bool = False) -> np.ndarray:
        """All basis vectors side by side (optionally scaled by ``v_i``)."""
        cols = [W.basis * (v if weighted else 1.0) for W, v in self]
        if not cols:
            return np.zeros((self.ambient_dim, 0))
        return np.hstack(cols).astype(self.dtype, copy=False)


@dataclass(frozen=True)
class BoundsReport:
    """Optimal frame bounds ``C = lambda_min(S)``, ``D = lambda_max(S)`` and class flags."""

    C: float
    D: float
    is_frame: bool
    is_tight: bool
    is_parseval: bool
    is_uniform: bool
    is_onb: bool
    eigenvalues: tuple[float, ...]
    frame_tol: float

    def as_dict(self) -> dict:
        return {
            "C": self.C,
            "D": self.D,
            "frame": self.is_frame,
            "tight": self.is_tight,
            "parseval": self.is_parseval,
            "uniform": self.is_uniform,
            "onb": self.is_onb,
            "eigenvalues": list(self.eigenvalues),
            "frame_tol": self.frame_tol,
        }


def frame_operator(F: WeightedFamily) -> np.ndarray:
    """``S = sum_i v_i^2 P_i``, accumulated in index order."""
    S = np.zeros((F.ambient_dim, F.ambient_dim), dtype=F.dtype)
    for W, v in F:
        if W.dim:
            B = W.basis
            S += (v * v) * (B @ nk.adjoint(B))
    return (S + nk.adjoint(S)) / 2


def _check_vector(F: WeightedFamily, f) -> np.ndarray:
    return nk.as_vector(f, F.ambient_dim, "f")


def analysis(F: WeightedFamily, f) -> list[np.ndarray]:
    """Coefficient blocks ``{v_i P_i f}``."""
    f = _check_vector(F, f)
    return [v * (W.basis @ (nk.adjoint(W.basis) @ f)) for W, v in F]


def blocks_inner(c: Sequence[np.ndarray], d: Sequence[np.ndarray]) -> complex:
    """Inner product on the direct sum, linear in the first slot."""
    return complex(sum(np.vdot(y, x) for x, y in zip(c, d)))


def blocks_norm_sq(c: Sequence[np.ndarray]) -> float:
    return float(sum(np.vdot(x, x).real for x in c))


def synthesis(F: WeightedFamily, blocks: Sequence, tol: float = BLOCK_TOL) -> np.ndarray:
    """``sum_i v_i f_i`` for blocks ``f_i`` in ``W_i``.

    Raises :class:`InvalidInputError` if a block leaves its subspace by more
    than ``tol`` (relative to ``max(||f_i||, 1)``).
    """
    blocks = list(blocks)
    if len(blocks) != len(F):
        raise InvalidInputError(f"{len(blocks)} coefficient blocks for a family of size {len(F)}")
    out = np.zeros(F.ambient_dim, dtype=nk.result_dtype(F.stacked_basis(), *blocks))
    for i, ((W, v), b) in enumerate(zip(F, blocks)):
        b = nk.as_vector(b, F.ambient_dim, f"block {i}")
        if not W.contains(b, tol):
            raise InvalidInputError(f"coefficient block {i} does not lie in its subspace")
        out = out + v * b
    return out


def frame_bounds(F: WeightedFamily, frame_tol: float | None = None) -> BoundsReport:
    """Optimal bounds and classification of ``F``.

    ``frame_tol`` defaults to ``1e-10 * lambda_max(S)``. Empty families get
    ``C = D = 0`` and are never frames.
    """
    if len(F) == 0:
        return BoundsReport(0.0, 0.0, False, False, False, False, False, tuple(), 0.0)
    S = frame_operator(F)
    w = nk.eigvalsh(S)
    C, D = float(w[0]), float(w[-1])
    tol = FRAME_TOL_REL * D if frame_tol is None else float(frame_tol)
    is_frame = C > tol
    is_tight = is_frame and (D - C) <= TIGHT_TOL * D
    is_parseval = is_frame and nk.opnorm(S - np.eye(F.ambient_dim)) <= PARSEVAL_TOL
    weights = F.weights
    is_uniform = bool(np.all(np.abs(weights - weights[0]) <= 1e-12 * weights[0]))
    is_onb = (
        is_parseval
        and is_uniform
        and abs(weights[0] - 1.0) <= 1e-12
        and sum(F.dims) == F.ambient_dim
    )
    return BoundsReport(
        C=C,
        D=D,
        is_frame=bool(is_frame),
        is_tight=bool(is_tight),
        is_parseval=bool(is_parseval),
        is_uniform=is_uniform,
        is_onb=bool(is_onb),
        eigenvalues=tuple(float(x) for x in w),
        frame_tol=tol,
    )


def is_bessel(F: WeightedFamily) -> tuple[bool, float]:
    """Finite families are always Bessel; returns ``(True, lambda_max(S))``."""
    if len(F) == 0:
        return True, 0.0
    return True, float(nk.eigvalsh(frame_operator(F))[-1])


def _require_frame(F: WeightedFamily, frame_tol: float | None = None) -> np.ndarray:
    if len(F) == 0:
        raise SingularOperatorError("an empty family is not a frame of subspaces")
    S = frame_operator(F)
    w = nk.eigvalsh(S)
    tol = FRAME_TOL_REL * w[-1] if frame_tol is None else frame_tol
    if not w[0] > tol:
        raise SingularOperatorError(
            f"family is not a frame of subspaces (lambda_min = {w[0]:.3e})"
        )
    return S


def frame_operator_inverse(F: WeightedFamily) -> np.ndarray:
    return nk.herm_fn(_require_frame(F), "inv", rel_tol=FRAME_TOL_REL)


def reconstruct(F: WeightedFamily, f) -> tuple[np.ndarray, float]:
    """Rebuild ``f`` as ``sum_i v_i^2 S^{-1} P_i f``.

    Returns the reconstruction and ``||f_rec - f|| / max(||f||, 1)``.
    """
    f = _check_vector(F, f)
    Sinv = frame_operator_inverse(F)
    f_rec = np.zeros(F.ambient_dim, dtype=nk.result_dtype(Sinv, f))
    for W, v in F:
        f_rec = f_rec + (v * v) * (Sinv @ (W.basis @ (nk.adjoint(W.basis) @ f)))
    residual = float(np.linalg.norm(f_rec - f) / max(np.linalg.norm(f), 1.0))
    return f_rec, residual


def dual(F: WeightedFamily) -> WeightedFamily:
    """Dual family ``{S^{-1} W_i}`` with the same weights."""
    Sinv = frame_operator_inverse(F)
    return WeightedFamily(
        F.ambient_dim, tuple(sp.apply_operator(Sinv, W) for W in F.subspaces), F.weights
    )


def project_onto_span(F: WeightedFamily, f) -> np.ndarray:
    """Orthogonal projection onto the span of the family.

    Uses ``sum_i v_i^2 S^+ P_i f`` where ``S^+`` inverts ``S`` on its range,
    so the family need not span the whole space.
    """
    f = _check_vector(F, f)
    if len(F) == 0:
        return np.zeros_like(f)
    S = frame_operator(F)
    Spinv = nk.herm_fn(S, "pinv", rel_tol=FRAME_TOL_REL)
    out = np.zeros(F.ambient_dim, dtype=nk.result_dtype(S, f))
    for W, v in F:
        out = out + (v * v) * (Spinv @ (W.basis @ (nk.adjoint(W.basis) @ f)))
    return out


def image(T, F: WeightedFamily) -> WeightedFamily:
    """Family ``{T W_i}`` with unchanged weights."""
    return WeightedFamily(
        F.ambient_dim, tuple(sp.apply_operator(T, W) for W in F.subspaces), F.weights
    )


def verify_equivalence(
    U, F: WeightedFamily, G: WeightedFamily, unitary_required: bool = False,
    tol: float = EQUIVALENCE_TOL,
) -> bool:
    """True iff ``F_i = U(G_i)`` for every ``i`` (and ``U`` unitary when required)."""
    U = nk.as_matrix(U, "U")
    n = F.ambient_dim
    if U.shape != (n, n) or G.ambient_dim != n:
        raise InvalidInputError("operator and families must share one ambient dimension")
    if len(F) != len(G):
        raise InvalidInputError(f"family sizes differ: {len(F)} vs {len(G)}")
    if not np.allclose(F.weights, G.weights, rtol=1e-12, atol=0):
        raise InvalidInputError("equivalence is only defined for identical weights")
    if np.linalg.svd(U, compute_uv=False)[-1] <= 1e-12 * max(nk.opnorm(U), 1e-300):
        raise InvalidInputError("U is not invertible")
    if unitary_required and nk.opnorm(nk.adjoint(U) @ U - np.eye(n)) > tol:
        return False
    return all(
        sp.distance(sp.apply_operator(U, Gi), Fi) <= tol
        for Fi, Gi in zip(F.subspaces, G.subspaces)
    )


def random_family(
    n: int, dims: Sequence[int], rng: np.random.Generator, complex_: bool = False,
    weights=None,
) -> WeightedFamily:
    """Family of Haar-random subspaces with the given dimensions (tests, demos)."""
    subs = [sp.random_subspace(n, k, rng, complex_) for k in dims]
    if weights is None:
        weights = rng.uniform(0.5, 2.0, size=len(subs))
    return WeightedFamily.build(subs, weights, ambient_dim=n)
