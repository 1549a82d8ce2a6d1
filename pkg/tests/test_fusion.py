import numpy as np
import pytest

from fusionframes import catalog, fusion
from fusionframes import subspace as sp
from fusionframes.errors import InvalidInputError, SingularOperatorError
from fusionframes.fusion import WeightedFamily

from conftest import probe_ratio_extremes, ref_frame_operator


def test_frame_operator_matches_reference(rng):
    for complex_ in (False, True):
        F = fusion.random_family(6, [1, 2, 3], rng, complex_=complex_)
        S = fusion.frame_operator(F)
        ref = ref_frame_operator([W.basis for W in F.subspaces], F.weights)
        assert np.allclose(S, ref, atol=1e-12)


def test_trace_identity(rng):
    # tr S = sum v_i^2 dim W_i
    F = fusion.random_family(7, [1, 2, 2, 4], rng, complex_=True)
    S = fusion.frame_operator(F)
    assert np.trace(S).real == pytest.approx(np.sum(F.weights**2 * np.array(F.dims)), rel=1e-12)


def test_bounds_are_optimal_against_probes(rng):
    F = fusion.random_family(5, [2, 2, 1], rng)
    fb = fusion.frame_bounds(F)
    lo, hi = probe_ratio_extremes(fusion.frame_operator(F), rng, probes=4000)
    assert fb.C <= lo + 1e-12 and hi <= fb.D + 1e-12
    # probes get close to the optimum from inside
    assert lo - fb.C < 0.2 * fb.D and fb.D - hi < 0.2 * fb.D


def test_analysis_synthesis_adjoint(rng):
    F = fusion.random_family(5, [2, 3], rng, complex_=True)
    f = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    blocks = [W.basis @ (rng.standard_normal(W.dim) + 1j * rng.standard_normal(W.dim)) for W in F.subspaces]
    lhs = fusion.blocks_inner(fusion.analysis(F, f), blocks)
    # <T^* f, c> = <f, T c>, both linear in the first slot
    rhs = np.vdot(fusion.synthesis(F, blocks), f)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    # T T^* = S
    assert np.allclose(fusion.synthesis(F, fusion.analysis(F, f)), fusion.frame_operator(F) @ f, atol=1e-12)
    assert fusion.blocks_norm_sq(fusion.analysis(F, f)) == pytest.approx(
        np.vdot(f, fusion.frame_operator(F) @ f).real
    )


def test_synthesis_rejects_block_outside_subspace():
    F = catalog.coordinate_lines(2)
    with pytest.raises(InvalidInputError):
        fusion.synthesis(F, [np.array([0.0, 1.0]), np.array([0.0, 1.0])])


def test_reconstruction_random(rng):
    F = fusion.random_family(8, [3, 3, 2, 1], rng, complex_=True)
    f = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    f_rec, res = fusion.reconstruct(F, f)
    assert res <= 1e-12
    assert np.allclose(f_rec, f, atol=1e-12)


def test_reconstruct_non_frame_raises():
    F = WeightedFamily.build([sp.coordinate(3, [0])], 1.0, 3)
    with pytest.raises(SingularOperatorError):
        fusion.reconstruct(F, np.ones(3))
    with pytest.raises(SingularOperatorError):
        fusion.dual(F)


def test_onb_of_subspaces_flags():
    F = catalog.coordinate_blocks(5, [[0, 1], [2], [3, 4]])
    fb = fusion.frame_bounds(F)
    assert fb.is_frame and fb.is_tight and fb.is_parseval and fb.is_uniform and fb.is_onb
    assert fb.C == 1.0 and fb.D == 1.0


def test_tight_non_parseval_and_scaling():
    F = catalog.coordinate_lines(3, 2.0)
    fb = fusion.frame_bounds(F)
    assert fb.is_tight and not fb.is_parseval and not fb.is_onb
    assert fb.C == pytest.approx(4.0)


def test_empty_family_is_not_a_frame():
    F = WeightedFamily(3, (), np.array([]))
    fb = fusion.frame_bounds(F)
    assert not fb.is_frame and fb.C == 0.0 and fb.D == 0.0
    assert fusion.is_bessel(F) == (True, 0.0)


def test_nonpositive_weights_rejected():
    with pytest.raises(InvalidInputError):
        WeightedFamily.build([sp.coordinate(2, [0])], 0.0, 2)
    with pytest.raises(InvalidInputError):
        WeightedFamily.build([sp.coordinate(2, [0])], -1.0, 2)


def test_dual_family_reconstructs(rng):
    F = fusion.random_family(5, [2, 2, 2], rng)
    G = fusion.dual(F)
    Sinv = np.linalg.inv(fusion.frame_operator(F))
    for W, V in zip(F.subspaces, G.subspaces):
        assert sp.distance(V, sp.from_spanning(Sinv @ W.basis)) < 1e-10
    # f = sum v_i^2 P_{S^-1 W_i} S^-1 P_{W_i} f
    f = rng.standard_normal(5)
    total = sum(
        v**2 * sp.projector(V) @ Sinv @ sp.projector(W) @ f
        for (W, v), V in zip(F, G.subspaces)
    )
    assert np.allclose(total, f, atol=1e-10)
    # a Parseval family is its own dual
    P = catalog.coordinate_blocks(4, [[0, 1], [2, 3]])
    for W, V in zip(P.subspaces, fusion.dual(P).subspaces):
        assert sp.distance(W, V) < 1e-12


def test_project_onto_span_for_non_spanning_family(rng):
    F = WeightedFamily.build([sp.coordinate(4, [0]), sp.from_spanning(np.array([[1.0], [1.0], [0.0], [0.0]]))], [1.0, 2.0], 4)
    f = rng.standard_normal(4)
    expected = np.array([f[0], f[1], 0.0, 0.0])
    assert np.allclose(fusion.project_onto_span(F, f), expected, atol=1e-12)


def test_verify_equivalence(rng):
    F = fusion.random_family(4, [1, 2], rng, weights=[1.0, 1.0])
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    G = fusion.image(Q, F)
    assert fusion.verify_equivalence(Q, G, F, unitary_required=True)
    T = Q @ np.diag([1.0, 2.0, 3.0, 4.0])
    H = fusion.image(T, F)
    assert fusion.verify_equivalence(T, H, F)
    assert not fusion.verify_equivalence(T, H, F, unitary_required=True)
    assert not fusion.verify_equivalence(np.eye(4), G, F)
    with pytest.raises(InvalidInputError):
        fusion.verify_equivalence(np.zeros((4, 4)), G, F)
    with pytest.raises(InvalidInputError):
        fusion.verify_equivalence(Q, G.subfamily([0]), F)


def test_subfamily_and_without():
    F = catalog.coordinate_lines(3, [1.0, 2.0, 3.0])
    assert len(F.without(1)) == 2
    assert list(F.subfamily([2, 0]).weights) == [3.0, 1.0]
