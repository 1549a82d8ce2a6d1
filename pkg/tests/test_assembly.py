import numpy as np
import pytest

from fusionframes import assembly, catalog, fusion
from fusionframes import subspace as sp
from fusionframes.assembly import LocalFrame
from fusionframes.errors import InvalidInputError
from fusionframes.fusion import WeightedFamily

from conftest import ref_vector_bounds


def _random_locals(rng, n, dims, complex_=False, extra=2):
    out = []
    for k in dims:
        W = sp.random_subspace(n, k, rng, complex_)
        coeff = rng.standard_normal((k, k + extra))
        if complex_:
            coeff = coeff + 1j * rng.standard_normal((k, k + extra))
        out.append((LocalFrame(W.basis @ coeff), float(rng.uniform(0.5, 2.0))))
    return out


def test_span_bounds_vs_reference(rng):
    V = catalog.mercedes_benz()
    A, B, r = assembly.span_bounds(V)
    assert r == 2 and A == pytest.approx(1.5) and B == pytest.approx(1.5)
    X = rng.standard_normal((4, 7))
    lo, hi = ref_vector_bounds(X)
    assert assembly.system_bounds(X) == pytest.approx((lo, hi), rel=1e-10)


def test_span_bounds_ignore_orthogonal_complement(rng):
    W = sp.random_subspace(6, 2, rng)
    V = W.basis @ rng.standard_normal((2, 5))
    A, B, r = assembly.span_bounds(V)
    assert r == 2 and A > 0
    assert assembly.system_bounds(V)[0] == pytest.approx(0.0, abs=1e-12)


def test_transfer_report_on_random_instances(rng):
    for complex_ in (False, True):
        locs = _random_locals(rng, 6, [2, 3, 2], complex_)
        flat, F, rep = assembly.assemble_global(locs)
        assert rep.predicates_agree and rep.passed
        assert flat.shape == (6, sum(k + 2 for k in (2, 3, 2)))
        # pooled frame operator, reference
        lo, hi = ref_vector_bounds(flat)
        assert rep.C_g == pytest.approx(lo, rel=1e-10) and rep.D_g == pytest.approx(hi, rel=1e-10)


def test_transfer_detects_non_frame(rng):
    locs = _random_locals(rng, 6, [1, 2], extra=1)
    _, F, rep = assembly.assemble_global(locs)
    assert not rep.family_is_frame and not rep.pooled_is_frame and not rep.onb_is_frame
    assert rep.predicates_agree


def test_parseval_locals_give_identical_operators(rng):
    locs = []
    for k in (2, 3, 2):
        W = sp.random_subspace(5, k, rng)
        locs.append((LocalFrame(W.basis), float(rng.uniform(0.5, 2.0))))
    flat, F, _ = assembly.assemble_global(locs)
    assert np.allclose(flat @ flat.T, fusion.frame_operator(F), atol=1e-12)


def test_supplied_bounds_are_validated():
    V = catalog.mercedes_benz()
    assert LocalFrame(V, supplied_bounds=(1.5, 1.5)).bounds() == pytest.approx((1.5, 1.5))
    with pytest.raises(InvalidInputError):
        LocalFrame(V, supplied_bounds=(1.0, 1.5)).bounds()


def test_subspace_hint_mismatch_rejected():
    V = np.array([[1.0], [0.0]])
    assert LocalFrame(V, subspace_hint=sp.coordinate(2, [0])).span().dim == 1
    with pytest.raises(InvalidInputError):
        LocalFrame(V, subspace_hint=sp.coordinate(2, [1])).span()


def test_partition_of_mercedes_benz():
    V = catalog.mercedes_benz()
    F = assembly.from_partition(V, [[0], [1, 2]])
    assert fusion.frame_bounds(F).is_frame
    rep = assembly.partition_certificate(V, [[0], [1, 2]])
    assert rep.passed and rep.A / rep.B == pytest.approx(1.0)
    assert rep.lambda_min >= 1.0 - 1e-12 and rep.lambda_max <= 2 + 1e-12


def test_partition_random_frames(rng):
    for _ in range(20):
        V = rng.standard_normal((4, 9))
        perm = rng.permutation(9)
        cells = [perm[:3].tolist(), perm[3:5].tolist(), perm[5:].tolist()]
        assert fusion.frame_bounds(assembly.from_partition(V, cells)).is_frame
        assert assembly.partition_certificate(V, cells).passed


@pytest.mark.parametrize("cells", [[[0], [1]], [[0, 1], [1, 2]], [[0, 1, 2], []], [[0, 1, 5], [2]]])
def test_partition_validation(cells):
    with pytest.raises(InvalidInputError):
        assembly.from_partition(catalog.mercedes_benz(), cells)


def test_enrich_bounds(rng):
    for _ in range(10):
        F = fusion.random_family(5, [2, 2, 3], rng)
        V = rng.standard_normal((5, 8))
        rep = assembly.enrich(F, V)
        assert rep.passed
        Sinv = np.linalg.inv(fusion.frame_operator(F))
        for W, Gi in zip(F.subspaces, rep.per_subspace):
            assert np.allclose(Gi, sp.projector(W) @ Sinv @ V, atol=1e-12)
        assert rep.C_g > 0


def test_enrich_rejects_non_frames():
    F = WeightedFamily.build([sp.coordinate(3, [0])], 1.0, 3)
    with pytest.raises(InvalidInputError):
        assembly.enrich(F, np.eye(3))
    with pytest.raises(InvalidInputError):
        assembly.enrich(catalog.coordinate_lines(3), np.eye(3)[:, :2])


def test_subfamily_bounds_counterexample_closed_form():
    # each pair {span(a + b/i), span(a)} has S_J = uu^T/|u|^2 + aa^T on span{a, b}
    n = 10
    F, keep = catalog.nonriesz_subfamily_example(n)
    lo, hi = assembly.subfamily_bounds(F, keep)
    t = 1.0 / n
    # 2x2 block [[1/(1+t^2) + 1, t/(1+t^2)], [t/(1+t^2), t^2/(1+t^2)]], smallest eigenvalue
    M = np.array([[1 / (1 + t * t) + 1, t / (1 + t * t)], [t / (1 + t * t), t * t / (1 + t * t)]])
    tr, det = np.trace(M), M[0, 0] * M[1, 1] - M[0, 1] ** 2
    closed = (tr - np.sqrt(tr * tr - 4 * det)) / 2
    assert lo == pytest.approx(closed, rel=1e-10)
    assert lo <= 1.0 / (n * n + 1) + 1e-10
    assert fusion.frame_bounds(F).is_frame


def test_riesz_certificate_modes(rng):
    F = catalog.coordinate_blocks(4, [[0], [1, 2], [3]], [1.0, 2.0, 1.0])
    cert = assembly.riesz_family_certificate(F, "exhaustive", C_req=1.0, D_req=4.0)
    assert cert.passed and cert.subsets_checked == 7 and cert.seed is None
    G, _ = catalog.nonriesz_subfamily_example(4)
    bad = assembly.riesz_family_certificate(G, "exhaustive", C_req=0.1)
    assert not bad.passed
    s = assembly.riesz_family_certificate(G, "sampled", seed=3, samples=10)
    assert s.subsets_checked == assembly.MIN_SAMPLES and s.seed == 3
    with pytest.raises(InvalidInputError):
        assembly.riesz_family_certificate(fusion.random_family(3, [1] * 17, rng), "exhaustive")
    with pytest.raises(InvalidInputError):
        assembly.riesz_family_certificate(F, "bogus")


def test_riesz_assembly_on_orthogonal_locals():
    # orthogonal coordinate blocks with orthonormal local bases: every sub-selection is orthonormal
    locs = [(LocalFrame(np.eye(5)[:, c]), 1.0) for c in ([0, 1], [2], [3, 4])]
    rep = assembly.riesz_assembly_certificate(locs, C=1.0, D=1.0, A=1.0, B=1.0, seed=1)
    assert rep.passed and rep.min_lower == pytest.approx(1.0) and rep.max_upper == pytest.approx(1.0)
