"""Completeness, minimality, Riesz decompositions and exactness.

The decisions reduce to numerical ranks of the pooled orthonormal bases.
The per-subspace intersection formulation is kept as an independent check
(:func:`is_minimal_by_intersection`).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import numkernel as nk
from . import subspace as sp
from .errors import InvalidInputError, PreconditionError
from .fusion import FRAME_TOL_REL, WeightedFamily, frame_bounds, frame_operator
from .subspace import Subspace

ORTHOGONALITY_TOL = 1e-8


def _pooled_rank(F: WeightedFamily, weighted: bool = False) -> int:
    M = F.stacked_basis(weighted=weighted)
    return nk.numerical_rank(M) if M.shape[1] else 0


def is_complete(F: WeightedFamily) -> bool:
    """The subspaces together span the whole space."""
    return _pooled_rank(F) == F.ambient_dim


def is_minimal(F: WeightedFamily) -> bool:
    """No ``W_i`` meets the span of the others except in 0 (pooled bases independent)."""
    return _pooled_rank(F) == sum(F.dims)


def is_minimal_by_intersection(F: WeightedFamily) -> bool:
    """Minimality straight from the definition: ``W_i ∩ span_{j != i} W_j = {0}`` for all ``i``."""
    for i, W in enumerate(F.subspaces):
        if W.dim == 0:
            continue
        others = sp.span([F.subspaces[j] for j in range(len(F)) if j != i], F.ambient_dim)
        if sp.intersect(W, others).dim:
            return False
    return True


def synthesis_is_injective(F: WeightedFamily) -> bool:
    """``T(f_i) = sum v_i f_i`` is one-to-one iff the weighted pooled bases have full column rank."""
    return _pooled_rank(F, weighted=True) == sum(F.dims)


def is_riesz_decomposition(F: WeightedFamily) -> bool:
    """Every ``f`` splits uniquely as ``sum f_i`` with ``f_i`` in ``W_i``.

    Same as complete and minimal: ``sum dim W_i = rank = ambient_dim``.
    """
    rank = _pooled_rank(F)
    return rank == sum(F.dims) == F.ambient_dim


def is_exact(F: WeightedFamily) -> bool:
    """Removing any single subspace destroys the frame property.

    In finite dimension a family is a frame iff it is complete, so the test
    is that every one-out family is incomplete.
    """
    if not frame_bounds(F).is_frame:
        raise InvalidInputError("exactness is defined for frames of subspaces only")
    return all(not is_complete(F.without(i)) for i in range(len(F)))


def removal_dichotomy(F: WeightedFamily) -> list[str]:
    """Classify each one-out family as ``"frame"`` or ``"incomplete"``.

    A ``"complete-non-frame"`` entry would contradict the dichotomy; it can
    only appear through numerical trouble.
    """
    out = []
    for i in range(len(F)):
        G = F.without(i)
        frame = len(G) > 0 and frame_bounds(G).is_frame
        complete = is_complete(G) if len(G) else False
        if frame:
            out.append("frame")
        elif not complete:
            out.append("incomplete")
        else:
            out.append("complete-non-frame")
    return out


def biorthogonal_family(F: WeightedFamily) -> list[Subspace]:
    """``V_i`` = orthogonal complement of the span of ``{W_j : j != i}``."""
    out = []
    for i in range(len(F)):
        others = sp.span([F.subspaces[j] for j in range(len(F)) if j != i], F.ambient_dim)
        out.append(sp.complement(others))
    return out


def biorthogonality_holds(F: WeightedFamily, V: list[Subspace], tol: float = 1e-9) -> bool:
    """``W_j ⟂ V_i`` for ``j != i`` and no nonzero vector of ``W_i`` is orthogonal to ``V_i``."""
    for i, Vi in enumerate(V):
        for j, Wj in enumerate(F.subspaces):
            if j != i and Wj.dim and Vi.dim and nk.opnorm(nk.adjoint(Vi.basis) @ Wj.basis) > tol:
                return False
        Wi = F.subspaces[i]
        if Wi.dim == 0:
            continue
        if Vi.dim == 0:
            return False
        # P_{V_i} restricted to W_i must be injective
        if nk.numerical_rank(nk.adjoint(Vi.basis) @ Wi.basis, 1e-10) < Wi.dim:
            return False
    return True


def orthogonalize_minimal(F: WeightedFamily) -> list[Subspace]:
    """``{S^{-1/2} W_i}``, an orthogonal family when ``F`` is a minimal frame."""
    if not frame_bounds(F).is_frame:
        raise PreconditionError("orthogonalization needs a frame of subspaces")
    if not is_minimal(F):
        raise PreconditionError("orthogonalization needs a minimal family")
    R = nk.herm_fn(frame_operator(F), "inv_sqrt", rel_tol=FRAME_TOL_REL)
    return [sp.apply_operator(R, W) for W in F.subspaces]


def max_cross_product(subspaces: list[Subspace]) -> float:
    """Largest ``||P_i P_j||`` over ``i != j`` (0 for orthogonal families)."""
    worst = 0.0
    for i in range(len(subspaces)):
        for j in range(i + 1, len(subspaces)):
            a, b = subspaces[i], subspaces[j]
            if a.dim and b.dim:
                worst = max(worst, nk.opnorm(nk.adjoint(a.basis) @ b.basis))
    return worst


@dataclass(frozen=True)
class StructureReport:
    complete: bool
    minimal: bool
    riesz_decomposition: bool
    exact: bool
    onb_of_subspaces: bool
    dims: tuple[int, ...]
    total_dim: int
    ambient_dim: int

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["dims"] = list(self.dims)
        return d


def structure_report(F: WeightedFamily) -> StructureReport:
    fb = frame_bounds(F)
    complete = is_complete(F)
    minimal = is_minimal(F)
    riesz = complete and minimal
    exact = fb.is_frame and all(not is_complete(F.without(i)) for i in range(len(F)))
    # orthogonal direct sum; weights play no role here
    onb = riesz and max_cross_product(list(F.subspaces)) <= ORTHOGONALITY_TOL
    return StructureReport(
        complete=complete,
        minimal=minimal,
        riesz_decomposition=riesz,
        exact=bool(exact),
        onb_of_subspaces=bool(onb),
        dims=tuple(F.dims),
        total_dim=int(sum(F.dims)),
        ambient_dim=F.ambient_dim,
    )


def lattice_violations(r: StructureReport) -> list[str]:
    """Implications every report must satisfy; returns the broken ones."""
    bad = []
    if r.riesz_decomposition != (r.complete and r.minimal):
        bad.append("riesz <=> complete and minimal")
    # a zero member can always be dropped, so the implication needs nonzero members
    if r.riesz_decomposition and not r.exact and all(r.dims):
        bad.append("riesz => exact")
    if r.onb_of_subspaces and not r.riesz_decomposition:
        bad.append("onb => riesz")
    return bad


def pooled_frame_is_exact(F: WeightedFamily) -> bool:
    """Exactness of the pooled vectors ``{v_i e_ij}``: a frame that is a basis.

    Kept apart from :func:`is_exact`; the two differ on families like
    two overlapping halves of a basis.
    """
    M = F.stacked_basis(weighted=True)
    return M.shape[1] == F.ambient_dim and nk.numerical_rank(M) == F.ambient_dim
