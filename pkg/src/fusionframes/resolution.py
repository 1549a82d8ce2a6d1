"""Resolutions of the identity built from frames of subspaces.

Quadratic forms ``sum_i c_i ||T_i f||^2`` are certified through the
Hermitian matrix ``sum_i c_i T_i^H T_i`` and its extreme eigenvalues; random
probes are only used as an independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkernel as nk
from . import subspace as sp
from .assembly import LocalFrame, span_bounds
from .certificate import Inequality, all_pass, leq
from .errors import InvalidInputError, SingularOperatorError
from .fusion import FRAME_TOL_REL, WeightedFamily, frame_bounds, frame_operator
from .subspace import Subspace

RESOLUTION_TOL = 1e-9
SLACK_TOL = 1e-8
COMMUTE_TOL = 1e-8


@dataclass(frozen=True)
class SandwichCertificate:
    """``lower <= lambda_min(M)`` and ``lambda_max(M) <= upper`` for a quadratic-form matrix ``M``."""

    name: str
    lower: float
    upper: float
    lambda_min: float
    lambda_max: float
    tol: float = SLACK_TOL

    @property
    def inequalities(self) -> tuple[Inequality, Inequality]:
        return (
            leq(f"{self.name}: lower <= lambda_min", self.lower, self.lambda_min, self.tol),
            leq(f"{self.name}: lambda_max <= upper", self.lambda_max, self.upper, self.tol),
        )

    @property
    def passed(self) -> bool:
        return all_pass(self.inequalities)


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """Square matrices ``T_i`` with weights ``v_i`` and optional range subspaces.

    The list order is the summation order; finite sums make it immaterial
    but it is recorded.
    """

    ops: tuple[np.ndarray, ...]
    weights: np.ndarray
    range_hints: tuple[Subspace, ...] | None = None
    certificates: tuple[SandwichCertificate, ...] = field(default=())

    def __post_init__(self):
        ops = tuple(nk.as_matrix(T, f"T_{i}") for i, T in enumerate(self.ops))
        if not ops:
            raise InvalidInputError("an operator family needs at least one operator")
        n = ops[0].shape[0]
        if any(T.shape != (n, n) for T in ops):
            raise InvalidInputError("operators must be square and share one dimension")
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != len(ops) or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise InvalidInputError("one positive weight per operator is required")
        if self.range_hints is not None:
            hints = tuple(self.range_hints)
            if len(hints) != len(ops):
                raise InvalidInputError("one range hint per operator is required")
            for i, (T, W) in enumerate(zip(ops, hints)):
                P = sp.projector(W)
                if nk.opnorm(P @ T - T) > COMMUTE_TOL * max(nk.opnorm(T), 1.0):
                    raise InvalidInputError(f"range of T_{i} is not inside its range hint")
            object.__setattr__(self, "range_hints", hints)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def ordering(self) -> list[int]:
        return list(range(len(self.ops)))

    def __len__(self) -> int:
        return len(self.ops)


def weighted_sum(OF: OperatorFamily, power: int = 2, indices=None) -> np.ndarray:
    """``sum_i v_i^power T_i`` over ``indices`` (all by default)."""
    idx = range(len(OF)) if indices is None else indices
    out = np.zeros((OF.dim, OF.dim), dtype=nk.result_dtype(*OF.ops))
    for i in idx:
        out = out + OF.weights[i] ** power * OF.ops[i]
    return out


def quadratic_form(OF: OperatorFamily, power: int = 2, indices=None) -> np.ndarray:
    """Hermitian matrix of ``f -> sum_i v_i^power ||T_i f||^2``."""
    idx = range(len(OF)) if indices is None else indices
    out = np.zeros((OF.dim, OF.dim), dtype=nk.result_dtype(*OF.ops))
    for i in idx:
        T = OF.ops[i]
        out = out + OF.weights[i] ** power * (nk.adjoint(T) @ T)
    return (out + nk.adjoint(out)) / 2


def is_resolution(OF: OperatorFamily, scaled: bool = False, tol: float = RESOLUTION_TOL) -> bool:
    """``sum T_i = I`` (or ``sum v_i^2 T_i = I`` when ``scaled``) within ``tol`` in operator norm."""
    total = weighted_sum(OF, 2 if scaled else 0)
    return nk.opnorm(total - np.eye(OF.dim)) <= tol


def _extremes(M: np.ndarray) -> tuple[float, float]:
    w = nk.eigvalsh(M)
    return float(w[0]), float(w[-1])


def _frame_operator_checked(F: WeightedFamily) -> tuple[np.ndarray, float, float]:
    fb = frame_bounds(F)
    if not fb.is_frame:
        raise SingularOperatorError("family is not a frame of subspaces")
    return frame_operator(F), fb.C, fb.D


def resolution_from_frame_operator(F: WeightedFamily) -> OperatorFamily:
    """``T_i = P_i S^{-1}``; ``{v_i^2 T_i}`` resolves the identity.

    The attached certificate checks ``C/D^2 <= sum v_i^2 ||T_i f||^2 / ||f||^2 <= D/C^2``.
    """
    S, C, D = _frame_operator_checked(F)
    Sinv = nk.herm_fn(S, "inv", rel_tol=FRAME_TOL_REL)
    ops = tuple(sp.projector(W) @ Sinv for W in F.subspaces)
    partial = OperatorFamily(ops, F.weights, F.subspaces)
    lo, hi = _extremes(quadratic_form(partial, 2))
    cert = SandwichCertificate("C/D^2 .. D/C^2", C / D**2, D / C**2, lo, hi)
    return OperatorFamily(ops, F.weights, F.subspaces, (cert,))


def _coerce_local(item, W: Subspace) -> LocalFrame:
    lf = item if isinstance(item, LocalFrame) else LocalFrame(item)
    if lf.ambient_dim != W.ambient_dim:
        raise InvalidInputError("local frame and family live in different dimensions")
    A, _, r = span_bounds(lf.vectors)
    if r == 0:
        raise InvalidInputError("degenerate local frame")
    span = sp.from_spanning(lf.vectors)
    if span.dim != W.dim or sp.distance(span, W) > 1e-8:
        raise InvalidInputError("local frame does not span its subspace")
    return lf


def resolution_from_dual_frame(F: WeightedFamily, locals_: Sequence) -> OperatorFamily:
    """``T_i f = sum_j <f, S_vf^{-1} v_i f_ij> v_i f_ij`` from local frames ``{f_ij}`` of the ``W_i``.

    ``S_vf`` is the frame operator of the pooled ``{v_i f_ij}``; ``{T_i}``
    resolves the identity without scaling. Two certificates are attached:

    * ``stated``: ``AC/(B^2 D^2) .. B^2 D^3/(A^2 C^2)`` with ``A, B`` the
      extreme bounds of the weighted local systems ``{v_i f_ij}``.
    * ``derived``: ``A^2 C / D_vf^2 .. B^2 D / C_vf^2`` with ``C_vf, D_vf`` the
      extreme eigenvalues of ``S_vf``; this pair follows from
      ``A_i ||x|| <= ||S_i x|| <= B_i ||x||`` on ``W_i`` and holds at every scale.
    """
    if len(locals_) != len(F):
        raise InvalidInputError(f"{len(locals_)} local frames for a family of size {len(F)}")
    _, C, D = _frame_operator_checked(F)
    lfs = [_coerce_local(item, W) for item, W in zip(locals_, F.subspaces)]
    weighted = [v * lf.vectors for lf, v in zip(lfs, F.weights)]
    flat = np.hstack(weighted)
    S_vf = flat @ nk.adjoint(flat)
    C_vf, D_vf = _extremes(S_vf)
    if not C_vf > FRAME_TOL_REL * D_vf:
        raise InvalidInputError("pooled local frames do not span the space")
    S_vf_inv = nk.herm_fn(S_vf, "inv", rel_tol=FRAME_TOL_REL)
    ops = tuple((Vi @ nk.adjoint(Vi)) @ S_vf_inv for Vi in weighted)
    bounds = [span_bounds(Vi)[:2] for Vi in weighted]
    A = min(b[0] for b in bounds)
    B = max(b[1] for b in bounds)
    partial = OperatorFamily(ops, F.weights, F.subspaces)
    lo, hi = _extremes(quadratic_form(partial, 2))
    stated = SandwichCertificate(
        "stated AC/(B^2D^2) .. B^2D^3/(A^2C^2)",
        A * C / (B**2 * D**2), B**2 * D**3 / (A**2 * C**2), lo, hi,
    )
    derived = SandwichCertificate(
        "derived A^2C/D_vf^2 .. B^2D/C_vf^2", A**2 * C / D_vf**2, B**2 * D / C_vf**2, lo, hi,
    )
    return OperatorFamily(ops, F.weights, F.subspaces, (stated, derived))


@dataclass(frozen=True)
class SubsetLowerReport:
    """Worst slack of ``(1/D)||sum_J v_j^2 T_j f||^2 <= sum_J v_j^2 ||T_j f||^2``."""

    D: float
    subsets: int
    probes: int
    seed: int
    worst_probe_slack: float
    worst_matrix_eigenvalue: float
    worst_subset: tuple[int, ...]
    tol: float = SLACK_TOL

    @property
    def passed(self) -> bool:
        return self.worst_probe_slack >= -self.tol and self.worst_matrix_eigenvalue >= -self.tol


def _random_unit(n: int, count: int, rng: np.random.Generator, complex_: bool) -> np.ndarray:
    X = rng.standard_normal((n, count))
    if complex_:
        X = X + 1j * rng.standard_normal((n, count))
    return X / np.linalg.norm(X, axis=0)


def subset_lower_certificate(
    F: WeightedFamily, OF: OperatorFamily, subsets=None, probes: int = 100, seed: int = 0,
) -> SubsetLowerReport:
    """Check the subset lower bound on every listed subset (all nonempty ones by default).

    Both a probe version (unit random ``f``) and the matrix version
    ``lambda_min(sum_J v^2 T^H T - (1/D) R_J^H R_J) >= 0`` with
    ``R_J = sum_J v^2 T_j`` are evaluated.
    """
    if len(OF) != len(F):
        raise InvalidInputError("operator family and subspace family differ in size")
    D = frame_bounds(F).D
    if subsets is None:
        import itertools

        subsets = [
            c for r in range(1, len(F) + 1) for c in itertools.combinations(range(len(F)), r)
        ]
    rng = np.random.default_rng(seed)
    complex_ = F.is_complex or any(np.iscomplexobj(T) for T in OF.ops)
    X = _random_unit(F.ambient_dim, probes, rng, complex_)
    worst_probe, worst_eig, worst_J = np.inf, np.inf, ()
    for J in subsets:
        J = tuple(J)
        R = weighted_sum(OF, 2, J)
        Q = quadratic_form(OF, 2, J)
        lhs = np.sum(np.abs(R @ X) ** 2, axis=0) / D
        rhs = np.real(np.einsum("ij,ij->j", X.conj(), Q @ X))
        slack = float(np.min(rhs - lhs))
        M = Q - (nk.adjoint(R) @ R) / D
        e = float(nk.eigvalsh((M + nk.adjoint(M)) / 2)[0])
        if slack < worst_probe:
            worst_probe, worst_J = slack, J
        worst_eig = min(worst_eig, e)
    return SubsetLowerReport(
        D, len(subsets), probes, seed, float(worst_probe), float(worst_eig), tuple(worst_J)
    )


@dataclass(frozen=True)
class RangeResolutionReport:
    """Sandwich ``1/D <= sum v^2 ||T_i f||^2 / ||f||^2`` against ``D*E`` and ``D*E^2``."""

    applicable: bool
    reason: str
    D: float = float("nan")
    E: float = float("nan")
    lambda_min: float = float("nan")
    lambda_max: float = float("nan")
    lower_holds: bool = False
    holds_DE: bool = False
    holds_DE2: bool = False

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def range_resolution_bounds(F: WeightedFamily, OF: OperatorFamily, tol: float = SLACK_TOL) -> RangeResolutionReport:
    """Bounds for resolutions whose operators satisfy ``T_i P_i = T_i`` and map into ``W_i``.

    Violated preconditions give ``applicable=False`` rather than an exception.
    """
    if len(OF) != len(F) or OF.dim != F.ambient_dim:
        return RangeResolutionReport(False, "operator family does not match the subspace family")
    for i, (T, W) in enumerate(zip(OF.ops, F.subspaces)):
        P = sp.projector(W)
        scale = max(nk.opnorm(T), 1.0)
        if nk.opnorm(T @ P - T) > COMMUTE_TOL * scale:
            return RangeResolutionReport(False, f"T_{i} P_{i} != T_{i}")
        if nk.opnorm(P @ T - T) > COMMUTE_TOL * scale:
            return RangeResolutionReport(False, f"range of T_{i} leaves W_{i}")
    if not is_resolution(OF, scaled=True):
        return RangeResolutionReport(False, "sum v_i^2 T_i != I")
    fb = frame_bounds(F)
    if not fb.is_frame:
        return RangeResolutionReport(False, "family is not a frame of subspaces")
    D = fb.D
    E = max(nk.opnorm(T) for T in OF.ops)
    lo, hi = _extremes(quadratic_form(OF, 2))
    return RangeResolutionReport(
        True, "", D, E, lo, hi,
        lower_holds=lo >= 1.0 / D - tol,
        holds_DE=hi <= D * E + tol,
        holds_DE2=hi <= D * E**2 + tol,
    )


@dataclass(frozen=True)
class L2ResolutionReport:
    resolves: bool
    lambda_max: float
    B_req: float
    passed: bool
    implied_lower: float | None
    implied_upper: float | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def l2_resolution_certificate(
    OF: OperatorFamily, weights=None, B_req: float = 1.0, D: float | None = None,
    tol: float = RESOLUTION_TOL,
) -> L2ResolutionReport:
    """``sum_i v_i^{-2} ||T_i f||^2 <= B_req ||f||^2`` for an (unscaled) resolution ``{T_i}``.

    When it passes, the two-sided bound ``1/D <= sum_i v_i^{-2} ||T_i f||^2 / ||f||^2 <= B_req``
    is reported, with ``D`` the upper frame bound of the range family (given,
    or computed from ``range_hints``).
    """
    w = OF.weights if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != len(OF) or np.any(w <= 0):
        raise InvalidInputError("one positive weight per operator is required")
    resolves = is_resolution(OF, scaled=False, tol=tol)
    M = np.zeros((OF.dim, OF.dim), dtype=nk.result_dtype(*OF.ops))
    for T, v in zip(OF.ops, w):
        M = M + (nk.adjoint(T) @ T) / v**2
    lam_max = float(nk.eigvalsh((M + nk.adjoint(M)) / 2)[-1])
    passed = resolves and lam_max <= B_req + tol
    lower = upper = None
    if passed:
        if D is None and OF.range_hints is not None:
            D = frame_bounds(WeightedFamily(OF.dim, OF.range_hints, w)).D
        if D:
            lower, upper = 1.0 / D, lam_max
    return L2ResolutionReport(resolves, lam_max, float(B_req), bool(passed), lower, upper)
