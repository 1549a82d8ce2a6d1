"""Small named families used in tests, docs and the CLI."""
from __future__ import annotations

import numpy as np

from . import subspace as sp
from .fusion import WeightedFamily


def overlapping_halves(half: int = 2, v: float = 1.0) -> WeightedFamily:
    """Truncation of two half-bases sharing ``e_0``.

    Coordinates are ordered ``e_{-half}, ..., e_0, ..., e_half``;
    ``W_1 = span{e_0..e_half}`` and ``W_2 = span{e_{-half}..e_0}``. With the
    default ``half=2`` this is five-dimensional and the frame operator is
    ``v^2 diag(1, 1, 2, 1, 1)``: exact but not a Riesz decomposition.
    """
    n = 2 * half + 1
    mid = half
    W1 = sp.coordinate(n, range(mid, n))
    W2 = sp.coordinate(n, range(0, mid + 1))
    return WeightedFamily(n, (W1, W2), np.array([v, v]))


def coordinate_lines(n: int, weights=1.0) -> WeightedFamily:
    """``{span e_k}_{k<n}``: an orthonormal basis of subspaces when all weights are 1."""
    return WeightedFamily.build([sp.coordinate(n, [k]) for k in range(n)], weights, n)


def coordinate_blocks(n: int, cells, weights=1.0) -> WeightedFamily:
    """Spans of coordinate index sets."""
    return WeightedFamily.build([sp.coordinate(n, c) for c in cells], weights, n)


def mercedes_benz() -> np.ndarray:
    """Three unit vectors at 120 degrees in R^2, as columns (tight frame with bound 3/2)."""
    angles = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    return np.vstack([np.cos(angles), np.sin(angles)])


def nonriesz_subfamily_example(n: int) -> tuple[WeightedFamily, list[int]]:
    """Truncation at ``n`` of a 1-uniform family whose subfamily degenerates.

    For ``i = 1..n`` with ``a = e_{2i}``, ``b = e_{2i+1}`` (stored at
    coordinates ``2(i-1)`` and ``2(i-1)+1`` of ``R^{2n}``), the family holds
    ``span{a + b/i}``, ``span{a}``, ``span{b}`` in that order. The returned
    index list selects the first two kinds, whose lower bound on their span
    decays like ``1/(n^2+1)``.
    """
    dim = 2 * n
    subs, keep = [], []
    for i in range(1, n + 1):
        a, b = 2 * (i - 1), 2 * (i - 1) + 1
        u = np.zeros(dim)
        u[a], u[b] = 1.0, 1.0 / i
        base = len(subs)
        subs += [sp.from_spanning(u.reshape(-1, 1)), sp.coordinate(dim, [a]), sp.coordinate(dim, [b])]
        keep += [base, base + 1]
    return WeightedFamily.build(subs, 1.0, dim), keep
