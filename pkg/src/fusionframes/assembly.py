"""Local-to-global constructions.

Frames for the individual subspaces are glued into one frame for the whole
space, frames are cut into families of subspaces, and subfamily bounds are
certified on their own spans.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkernel as nk
from . import subspace as sp
from .certificate import Inequality, all_pass, leq
from .errors import InvalidInputError
from .fusion import FRAME_TOL_REL, WeightedFamily, frame_bounds, frame_operator
from .subspace import Subspace

SUPPLIED_BOUNDS_RTOL = 1e-6
SPAN_MATCH_TOL = 1e-8
EXHAUSTIVE_LIMIT = 16
MIN_SAMPLES = 200


def _slack_tol(*values: float) -> float:
    return 1e-8 * max(1.0, *(abs(v) for v in values))


def span_bounds(vectors) -> tuple[float, float, int]:
    """Frame bounds of a vector system on its own span.

    Returns ``(A, B, rank)``: the smallest and largest nonzero eigenvalues of
    ``V V^H`` (squared singular values above the rank threshold).
    """
    V = nk.as_matrix(vectors, "vectors")
    if V.shape[1] == 0:
        return 0.0, 0.0, 0
    s = np.linalg.svd(V, compute_uv=False)
    if s[0] == 0.0:
        return 0.0, 0.0, 0
    r = int(np.count_nonzero(s > nk.rank_threshold(s, V.shape, None)))
    return float(s[r - 1] ** 2), float(s[0] ** 2), r


def system_bounds(vectors) -> tuple[float, float]:
    """Frame bounds of a vector system for the whole space (``A = 0`` if it does not span)."""
    V = nk.as_matrix(vectors, "vectors")
    if V.shape[1] == 0:
        return 0.0, 0.0
    w = nk.eigvalsh(V @ nk.adjoint(V))
    return float(max(w[0], 0.0)), float(w[-1])


def _is_frame_system(vectors) -> bool:
    A, B = system_bounds(vectors)
    return B > 0 and A > FRAME_TOL_REL * B


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """Vectors ``f_ij`` (columns) forming a frame for their span.

    ``A`` and ``B`` are always recomputed from the data; supplied values are
    only validated against the computed ones.
    """

    vectors: np.ndarray
    subspace_hint: Subspace | None = None
    supplied_bounds: tuple[float, float] | None = None

    def __post_init__(self):
        V = nk.as_matrix(self.vectors, "local frame")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    def bounds(self) -> tuple[float, float]:
        A, B, r = span_bounds(self.vectors)
        if r == 0:
            raise InvalidInputError("local frame spans the zero subspace")
        if self.supplied_bounds is not None:
            sa, sb = self.supplied_bounds
            for name, claimed, actual in (("A", sa, A), ("B", sb, B)):
                if abs(claimed - actual) > SUPPLIED_BOUNDS_RTOL * max(abs(actual), 1e-300):
                    raise InvalidInputError(
                        f"supplied local bound {name}={claimed} disagrees with computed {actual}"
                    )
        return A, B

    def span(self) -> Subspace:
        W = sp.from_spanning(self.vectors)
        if self.subspace_hint is not None:
            hint = self.subspace_hint
            if hint.dim != W.dim or sp.distance(hint, W) > SPAN_MATCH_TOL:
                raise InvalidInputError(
                    f"local vectors span a {W.dim}-dim subspace, not the claimed {hint.dim}-dim one"
                )
        return W


@dataclass(frozen=True)
class TransferReport:
    A: float
    B: float
    local_bounds: tuple[tuple[float, float], ...]
    C: float
    D: float
    C_g: float
    D_g: float
    pooled_is_frame: bool
    onb_is_frame: bool
    family_is_frame: bool
    inequalities: tuple[Inequality, ...]

    @property
    def predicates_agree(self) -> bool:
        return self.pooled_is_frame == self.onb_is_frame == self.family_is_frame

    @property
    def passed(self) -> bool:
        return self.predicates_agree and all_pass(self.inequalities)

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "local_bounds": [list(b) for b in self.local_bounds],
            "C": self.C,
            "D": self.D,
            "C_g": self.C_g,
            "D_g": self.D_g,
            "pooled_is_frame": self.pooled_is_frame,
            "onb_is_frame": self.onb_is_frame,
            "family_is_frame": self.family_is_frame,
            "predicates_agree": self.predicates_agree,
        }


def _coerce_locals(locals_: Sequence) -> list[tuple[LocalFrame, float]]:
    out = []
    for item in locals_:
        lf, v = item
        if not isinstance(lf, LocalFrame):
            lf = LocalFrame(lf)
        v = float(v)
        if not np.isfinite(v) or v <= 0:
            raise InvalidInputError("weights must be finite and strictly positive")
        out.append((lf, v))
    if not out:
        raise InvalidInputError("at least one local frame is required")
    n = out[0][0].ambient_dim
    if any(lf.ambient_dim != n for lf, _ in out):
        raise InvalidInputError("local frames live in different ambient dimensions")
    return out


def assemble_global(locals_: Sequence) -> tuple[np.ndarray, WeightedFamily, TransferReport]:
    """Glue weighted local frames into one frame and check that the frame property transfers.

    ``locals_`` is a list of ``(LocalFrame, v_i)`` pairs. Returns the pooled
    vectors ``{v_i f_ij}`` (columns), the family of spans, and a report that
    checks the three frame predicates agree and that::

        A*C <= C_g,  D_g <= B*D,  C_g/B <= C,  D <= D_g/A
    """
    items = _coerce_locals(locals_)
    bounds = [lf.bounds() for lf, _ in items]
    spans = [lf.span() for lf, _ in items]
    weights = np.array([v for _, v in items])
    family = WeightedFamily(items[0][0].ambient_dim, tuple(spans), weights)

    flat = np.hstack([v * lf.vectors for lf, v in items])
    onb = family.stacked_basis(weighted=True)
    C_g, D_g = system_bounds(flat)
    fb = frame_bounds(family)
    A = min(b[0] for b in bounds)
    B = max(b[1] for b in bounds)
    C, D = max(fb.C, 0.0), fb.D
    ineqs = (
        leq("A*C <= C_g", A * C, C_g, _slack_tol(A * C, C_g)),
        leq("D_g <= B*D", D_g, B * D, _slack_tol(D_g, B * D)),
        leq("C_g/B <= C", C_g / B, C, _slack_tol(C_g / B, C)),
        leq("D <= D_g/A", D, D_g / A, _slack_tol(D, D_g / A)),
    )
    report = TransferReport(
        A=A,
        B=B,
        local_bounds=tuple(bounds),
        C=C,
        D=D,
        C_g=C_g,
        D_g=D_g,
        pooled_is_frame=_is_frame_system(flat),
        onb_is_frame=_is_frame_system(onb),
        family_is_frame=fb.is_frame,
        inequalities=ineqs,
    )
    return flat, family, report


def _check_partition(m: int, partition: Sequence[Sequence[int]]) -> list[list[int]]:
    cells = [sorted(int(j) for j in cell) for cell in partition]
    if any(not cell for cell in cells):
        raise InvalidInputError("partition cells must be nonempty")
    seen = [j for cell in cells for j in cell]
    if len(seen) != len(set(seen)):
        raise InvalidInputError("partition cells overlap")
    if sorted(seen) != list(range(m)):
        raise InvalidInputError(f"partition does not cover the {m} frame vectors exactly")
    return cells


def from_partition(vectors, partition: Sequence[Sequence[int]], weights=1.0) -> WeightedFamily:
    """Family of spans of the partition cells, with the given weights."""
    V = nk.as_matrix(vectors, "frame vectors")
    cells = _check_partition(V.shape[1], partition)
    subs = [sp.from_spanning(V[:, cell]) for cell in cells]
    w = np.broadcast_to(np.asarray(weights, dtype=float), (len(cells),))
    return WeightedFamily(V.shape[0], tuple(subs), w)


@dataclass(frozen=True)
class PartitionReport:
    A: float
    B: float
    lambda_min: float
    lambda_max: float
    cells: int
    inequalities: tuple[Inequality, ...]

    @property
    def passed(self) -> bool:
        return all_pass(self.inequalities)


def partition_certificate(vectors, partition, tol: float = 1e-9) -> PartitionReport:
    """Check ``(A/B) I <= sum_i P_i <= |I| I`` for the cell spans of a frame partition."""
    V = nk.as_matrix(vectors, "frame vectors")
    family = from_partition(V, partition, 1.0)
    A, B = system_bounds(V)
    w = nk.eigvalsh(frame_operator(family))
    ratio = A / B if B > 0 else 0.0
    ineqs = (
        leq("A/B <= lambda_min(sum P_i)", ratio, w[0], tol),
        leq("lambda_max(sum P_i) <= |I|", w[-1], len(family), tol),
    )
    return PartitionReport(A, B, float(w[0]), float(w[-1]), len(family), ineqs)


@dataclass(frozen=True, eq=False)
class EnrichReport:
    per_subspace: tuple[np.ndarray, ...]
    per_bounds: tuple[tuple[float, float], ...]
    flat: np.ndarray
    A: float
    B: float
    C_g: float
    D_g: float
    inequalities: tuple[Inequality, ...]

    @property
    def passed(self) -> bool:
        return self.C_g > 0 and all_pass(self.inequalities)


def enrich(F: WeightedFamily, vectors) -> EnrichReport:
    """Frames ``{P_i S^{-1} f_j}_j`` for each ``W_i`` and their union for the whole space.

    Each per-subspace system is a frame for ``W_i`` with bounds in
    ``[A/D^2, B/C^2]`` where ``A, B`` bound ``{f_j}`` and ``C, D`` bound ``F``.
    """
    V = nk.as_matrix(vectors, "frame vectors")
    if V.shape[0] != F.ambient_dim:
        raise InvalidInputError("frame vectors and family live in different dimensions")
    fb = frame_bounds(F)
    if not fb.is_frame:
        raise InvalidInputError("enrichment needs a frame of subspaces")
    A, B = system_bounds(V)
    if not (B > 0 and A > FRAME_TOL_REL * B):
        raise InvalidInputError("the vectors do not form a frame for the whole space")
    Sinv = nk.herm_fn(frame_operator(F), "inv", rel_tol=FRAME_TOL_REL)
    G = Sinv @ V
    per, per_bounds, ineqs = [], [], []
    for i, W in enumerate(F.subspaces):
        Gi = W.basis @ (nk.adjoint(W.basis) @ G)
        per.append(Gi)
        if W.dim == 0:
            per_bounds.append((0.0, 0.0))
            continue
        # coordinates inside W_i so the lower bound is taken on W_i, not on its span
        s = np.linalg.svd(nk.adjoint(W.basis) @ G, compute_uv=False)
        lo, hi = float(s[W.dim - 1] ** 2) if s.size >= W.dim else 0.0, float(s[0] ** 2)
        per_bounds.append((lo, hi))
        lower, upper = A / fb.D**2, B / fb.C**2
        ineqs.append(leq(f"A/D^2 <= A_{i}", lower, lo, _slack_tol(lower, lo)))
        ineqs.append(leq(f"B_{i} <= B/C^2", hi, upper, _slack_tol(hi, upper)))
    flat = np.hstack(per)
    C_g, D_g = system_bounds(flat)
    return EnrichReport(
        per_subspace=tuple(per),
        per_bounds=tuple(per_bounds),
        flat=flat,
        A=A,
        B=B,
        C_g=C_g,
        D_g=D_g,
        inequalities=tuple(ineqs),
    )


def subfamily_bounds(F: WeightedFamily, indices) -> tuple[float, float]:
    """Bounds of ``{W_j}_{j in J}`` as a frame of subspaces for its own span.

    ``S_J`` is conjugated into an orthonormal basis of the span, so the lower
    bound is not polluted by the orthogonal complement.
    """
    sub = F.subfamily(indices)
    Q = nk.orthonormalize(sub.stacked_basis()) if sum(sub.dims) else None
    if Q is None or Q.shape[1] == 0:
        return 0.0, 0.0
    S = frame_operator(sub)
    w = nk.eigvalsh(nk.adjoint(Q) @ S @ Q)
    return float(w[0]), float(w[-1])


@dataclass(frozen=True)
class RieszCertificate:
    mode: str
    seed: int | None
    subsets_checked: int
    min_lower: float
    max_upper: float
    worst_subset: tuple[int, ...]
    C_req: float | None
    D_req: float | None
    passed: bool

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["worst_subset"] = list(self.worst_subset)
        return d


def _sample_subsets(size: int, count: int, rng: np.random.Generator):
    for _ in range(count):
        mask = rng.random(size) < 0.5
        while not mask.any():
            mask = rng.random(size) < 0.5
        yield tuple(int(i) for i in np.flatnonzero(mask))


def _all_subsets(size: int):
    for r in range(1, size + 1):
        yield from itertools.combinations(range(size), r)


def riesz_family_certificate(
    F: WeightedFamily,
    mode: str = "sampled",
    C_req: float | None = None,
    D_req: float | None = None,
    seed: int = 0,
    samples: int = MIN_SAMPLES,
    tol: float = 1e-10,
) -> RieszCertificate:
    """Bounds of every (or a seeded sample of) nonempty subfamily on its span.

    Passes iff the smallest lower bound is at least ``C_req`` (or merely
    positive when ``C_req`` is None) and the largest upper bound is at most
    ``D_req`` when given.
    """
    if mode not in ("exhaustive", "sampled"):
        raise InvalidInputError(f"unknown certificate mode {mode!r}")
    if len(F) == 0:
        raise InvalidInputError("empty family")
    if mode == "exhaustive":
        if len(F) > EXHAUSTIVE_LIMIT:
            raise InvalidInputError(
                f"exhaustive mode supports at most {EXHAUSTIVE_LIMIT} subspaces, got {len(F)}"
            )
        subsets, used_seed = _all_subsets(len(F)), None
    else:
        rng = np.random.default_rng(seed)
        subsets, used_seed = _sample_subsets(len(F), max(samples, MIN_SAMPLES), rng), seed
    lo_min, hi_max, worst, count = np.inf, 0.0, (), 0
    for J in subsets:
        lo, hi = subfamily_bounds(F, J)
        count += 1
        if lo < lo_min:
            lo_min, worst = lo, J
        hi_max = max(hi_max, hi)
    if C_req is None:
        ok_lo = lo_min > tol * max(hi_max, 1.0)
    else:
        ok_lo = lo_min >= C_req - tol
    ok_hi = D_req is None or hi_max <= D_req + tol
    return RieszCertificate(
        mode, used_seed, count, float(lo_min), float(hi_max), tuple(worst),
        C_req, D_req, bool(ok_lo and ok_hi),
    )


@dataclass(frozen=True)
class RieszAssemblyReport:
    seed: int
    subsets_checked: int
    min_lower: float
    max_upper: float
    lower_req: float
    upper_req: float
    inequalities: tuple[Inequality, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all_pass(self.inequalities)


def riesz_assembly_certificate(
    locals_: Sequence, C: float, D: float, A: float, B: float,
    seed: int = 0, samples: int = MIN_SAMPLES,
) -> RieszAssemblyReport:
    """Sampled check that sub-selections of the pooled ``{v_i f_ij}`` have span bounds in ``[C*A, B*D]``.

    ``C, D`` are Riesz-family bounds of the spans and ``A, B`` Riesz-frame
    bounds of the local systems.
    """
    items = _coerce_locals(locals_)
    sizes = [lf.vectors.shape[1] for lf, _ in items]
    total = sum(sizes)
    flat = np.hstack([v * lf.vectors for lf, v in items])
    rng = np.random.default_rng(seed)
    lo_min, hi_max, count = np.inf, 0.0, 0
    for J in _sample_subsets(total, max(samples, MIN_SAMPLES), rng):
        lo, hi, r = span_bounds(flat[:, list(J)])
        if r == 0:
            continue
        count += 1
        lo_min, hi_max = min(lo_min, lo), max(hi_max, hi)
    ineqs = (
        leq("C*A <= min lower", C * A, lo_min, _slack_tol(C * A, lo_min)),
        leq("max upper <= B*D", hi_max, B * D, _slack_tol(hi_max, B * D)),
    )
    return RieszAssemblyReport(seed, count, float(lo_min), float(hi_max), C * A, B * D, ineqs)
