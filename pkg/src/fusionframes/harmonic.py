"""Harmonic families: orbits of a subspace under a unitary, and finite Gabor partitions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from . import subspace as sp
from .errors import InvalidInputError
from .fusion import WeightedFamily, frame_bounds, verify_equivalence
from .subspace import Subspace

UNITARY_TOL = 1e-10
WRAP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class HarmonicSpec:
    U: np.ndarray
    seed: Subspace
    N: int
    weights: object = 1.0

    def __post_init__(self):
        U = nk.as_matrix(self.U, "U")
        if U.shape != (self.seed.ambient_dim, self.seed.ambient_dim):
            raise InvalidInputError("U must act on the seed's ambient space")
        if not nk.is_unitary(U, UNITARY_TOL):
            raise InvalidInputError("U is not unitary")
        if int(self.N) < 1:
            raise InvalidInputError("N must be at least 1")
        w = np.broadcast_to(np.asarray(self.weights, dtype=float), (int(self.N),)).copy()
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be finite and strictly positive")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "weights", w)


def orbit_family(spec: HarmonicSpec) -> WeightedFamily:
    """``{U^i W_0}_{i=0..N-1}``; ``meta["U"]`` keeps the generator."""
    subs = [spec.seed]
    for _ in range(spec.N - 1):
        subs.append(sp.apply_operator(spec.U, subs[-1]))
    return WeightedFamily(spec.seed.ambient_dim, tuple(subs), spec.weights, {"U": spec.U})


def wraparound_distance(spec: HarmonicSpec, family: WeightedFamily | None = None) -> float:
    """``||P_{U W_{N-1}} - P_{W_0}||``."""
    family = orbit_family(spec) if family is None else family
    return sp.distance(sp.apply_operator(spec.U, family.subspaces[-1]), family.subspaces[0])


def check_wraparound(spec: HarmonicSpec, tol: float = WRAP_TOL) -> bool:
    """Whether ``U W_{N-1} = W_0``.

    For uniform Parseval orbit families this always holds; a ``False``
    there signals a numerical problem and raises ``ArithmeticError``.
    """
    family = orbit_family(spec)
    ok = wraparound_distance(spec, family) <= tol
    fb = frame_bounds(family)
    if fb.is_uniform and fb.is_parseval and not ok:
        raise ArithmeticError("uniform Parseval orbit family failed to wrap around")
    return ok


def block_shift_unitary(
    block: int, count: int, rng: np.random.Generator | None = None, complex_: bool = False,
) -> np.ndarray:
    """Unitary on ``C^(block*count)`` moving block ``k`` to block ``k+1 (mod count)``.

    With ``rng`` each hop applies a random unitary twist, the last one chosen
    so that ``U^count = I``.
    """
    n = block * count
    dtype = np.complex128 if complex_ else np.float64
    U = np.zeros((n, n), dtype=dtype)
    twists = []
    for _ in range(count):
        if rng is None:
            twists.append(np.eye(block, dtype=dtype))
            continue
        G = rng.standard_normal((block, block))
        if complex_:
            G = G + 1j * rng.standard_normal((block, block))
        twists.append(np.linalg.qr(G)[0])
    cycle = np.eye(block, dtype=dtype)
    for Q in twists[:-1]:
        cycle = Q @ cycle
    twists[-1] = nk.adjoint(cycle)
    for k, Q in enumerate(twists):
        k2 = (k + 1) % count
        U[k2 * block:(k2 + 1) * block, k * block:(k + 1) * block] = Q
    return U


def uniform_parseval_orbit(
    block: int, count: int, repeats: int = 1, rng: np.random.Generator | None = None,
    complex_: bool = True,
) -> HarmonicSpec:
    """Uniform Parseval orbit spec with ``N = count * repeats`` steps.

    A twisted block shift is conjugated by a random unitary ``V``; the seed is
    ``V`` applied to the first coordinate block. The orbit passes ``repeats``
    times over the blocks, and the common weight ``1/sqrt(repeats)`` makes
    the family Parseval.
    """
    rng = np.random.default_rng() if rng is None else rng
    n = block * count
    U = block_shift_unitary(block, count, rng, complex_)
    G = rng.standard_normal((n, n))
    if complex_:
        G = G + 1j * rng.standard_normal((n, n))
    V, _ = np.linalg.qr(G)
    U = V @ U @ nk.adjoint(V)
    seed = Subspace(n, V[:, :block])
    return HarmonicSpec(U, seed, count * repeats, 1.0 / np.sqrt(repeats))


@dataclass(frozen=True, eq=False)
class GaborSpec:
    """Window ``g`` on Z_L and a divisor ``q`` of ``L``.

    ``translation_step`` (default 1) keeps the translations ``n`` that are
    multiples of it.
    """

    L: int
    g: np.ndarray
    q: int = 1
    translation_step: int = 1
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        L, q, b = int(self.L), int(self.q), int(self.translation_step)
        if L < 1 or q < 1 or L % q:
            raise InvalidInputError(f"q={q} must divide L={L}")
        if b < 1 or L % b:
            raise InvalidInputError(f"translation step {b} must divide L={L}")
        g = nk.as_vector(self.g, L, "window")
        if not np.any(g):
            raise InvalidInputError("window must be nonzero")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "translation_step", b)
        object.__setattr__(self, "g", g.astype(np.complex128))


def modulation(L: int, m: int) -> np.ndarray:
    """``(M_m x)_t = exp(2 pi i m t / L) x_t``."""
    return np.diag(np.exp(2j * np.pi * m * np.arange(L) / L))


def translation(L: int, n: int) -> np.ndarray:
    """``(T_n x)_t = x_{t-n mod L}``."""
    return np.roll(np.eye(L), n % L, axis=0).astype(np.complex128)


def gabor_atom(g: np.ndarray, m: int, n: int) -> np.ndarray:
    L = g.shape[0]
    return np.exp(2j * np.pi * m * np.arange(L) / L) * np.roll(g, n)


def gabor_cells(spec: GaborSpec) -> list[np.ndarray]:
    """Atoms ``M_{mq+j} T_n g`` of residue class ``j``, as ``L x (L/q * L/b)`` matrices."""
    L, q, b = spec.L, spec.q, spec.translation_step
    cells = []
    for j in range(q):
        cols = [
            gabor_atom(spec.g, m * q + j, n)
            for m in range(L // q)
            for n in range(0, L, b)
        ]
        cells.append(np.column_stack(cols))
    return cells


def gabor_family(spec: GaborSpec) -> tuple[WeightedFamily, np.ndarray]:
    """The ``q`` residue-class spans (unit weights) and the flat Gabor system (columns)."""
    cells = gabor_cells(spec)
    subs = tuple(sp.from_spanning(C) for C in cells)
    family = WeightedFamily(spec.L, subs, np.ones(spec.q), {"gabor": spec})
    return family, np.hstack(cells)


@dataclass(frozen=True)
class HarmonicGaborReport:
    q: int
    step_distances: tuple[float, ...]
    equivalences: tuple[bool, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(d <= self.tol for d in self.step_distances) and all(self.equivalences)

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "step_distances": list(self.step_distances),
            "equivalences": list(self.equivalences),
            "passed": self.passed,
        }


def harmonic_gabor_check(spec: GaborSpec, tol: float = WRAP_TOL) -> HarmonicGaborReport:
    """One modulation step ``M_1`` maps ``W_j`` onto ``W_{j+1 mod q}``.

    Also checks that ``M_1^j`` carries ``W_0`` onto ``W_j`` as a unitary
    equivalence of one-element families.
    """
    family, _ = gabor_family(spec)
    M1 = modulation(spec.L, 1)
    W = family.subspaces
    dists, eqs = [], []
    for j in range(spec.q):
        dists.append(sp.distance(sp.apply_operator(M1, W[j]), W[(j + 1) % spec.q]))
        Uj = np.linalg.matrix_power(M1, j)
        eqs.append(
            verify_equivalence(
                Uj,
                WeightedFamily(spec.L, (W[j],), [1.0]),
                WeightedFamily(spec.L, (W[0],), [1.0]),
                unitary_required=True,
                tol=tol,
            )
        )
    return HarmonicGaborReport(spec.q, tuple(dists), tuple(eqs), tol)
