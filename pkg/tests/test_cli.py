import json
import shutil
import subprocess

import numpy as np
import pytest

from fusionframes import catalog, cli, formats, fusion, harmonic
from fusionframes import subspace as sp
from fusionframes.errors import InvalidInputError


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = cli.run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


HALVES = {
    "ambient_dim": 5,
    "field": "real",
    "subspaces": [
        {"weight": 1, "basis": [[0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]},
        {"weight": 1, "basis": [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]]},
    ],
}


def test_analyze_overlapping_halves(tmp_path, capsys):
    code, out, _ = run(["analyze", write(tmp_path, "f.json", HALVES)], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["bounds"] == {"C": 1.0, "D": 2.0}
    flags = doc["flags"]
    assert flags["complete"] and flags["exact"]
    assert not flags["minimal"] and not flags["riesz_decomposition"]
    assert doc["provenance"]["reorthonormalized"] == [False, False]


def test_check_exit_codes(tmp_path, capsys):
    f = write(tmp_path, "f.json", HALVES)
    assert run(["check", f, "--property", "exact"], capsys)[0] == 0
    assert run(["check", f, "--property", "minimal"], capsys)[0] == 1
    assert run(["check", f, "--property", "nonsense"], capsys)[0] == 2


def test_reconstruct_and_non_frame(tmp_path, capsys):
    f = write(tmp_path, "f.json", HALVES)
    v = write(tmp_path, "v.json", [1, -2, 3.5, 0, 1e-3])
    code, out, _ = run(["reconstruct", f, "--vector", v], capsys)
    assert code == 0 and json.loads(out)["result"]["residual"] <= 1e-12
    bad = write(tmp_path, "b.json", {"ambient_dim": 3, "subspaces": [{"weight": 1, "basis": [[1, 0, 0]]}]})
    v3 = write(tmp_path, "v3.json", [1, 2, 3])
    code, _, err = run(["reconstruct", bad, "--vector", v3], capsys)
    assert code == 3 and "numerical failure" in err


@pytest.mark.parametrize(
    "doc",
    [
        '{"ambient_dim": 2, "subspaces": [',
        {"ambient_dim": 2, "subspaces": [{"weight": 0, "basis": [[1, 0]]}]},
        {"ambient_dim": 2, "subspaces": [{"weight": -1, "basis": [[1, 0]]}]},
        {"ambient_dim": 2, "subspaces": [{"weight": 1, "basis": [[1, 0, 0]]}]},
        {"ambient_dim": 2, "subspaces": [{"basis": [[1, 0]]}]},
        {"ambient_dim": 0, "subspaces": []},
        {"ambient_dim": 5000, "subspaces": []},
        {"ambient_dim": 2, "field": "quaternion", "subspaces": []},
        '{"ambient_dim": 2, "subspaces": [{"weight": NaN, "basis": [[1, 0]]}]}',
    ],
)
def test_invalid_documents_exit_2(tmp_path, capsys, doc):
    code, _, err = run(["analyze", write(tmp_path, "x.json", doc)], capsys)
    assert code == 2 and "invalid input" in err


def test_parse_error_reports_line_and_column(tmp_path, capsys):
    code, _, err = run(["analyze", write(tmp_path, "x.json", '{\n  "ambient_dim": 2,\n  oops\n}')], capsys)
    assert code == 2 and "line 3" in err


def test_missing_file_exits_2(tmp_path, capsys):
    assert run(["analyze", tmp_path / "missing.json"], capsys)[0] == 2


def test_dual_round_trip_is_exact(tmp_path, capsys, rng):
    F = fusion.random_family(4, [1, 2, 2], rng, complex_=True)
    path = write(tmp_path, "f.json", formats.serialize_family(F))
    out = tmp_path / "dual.json"
    assert run(["dual", path, "--out", out], capsys)[0] == 0
    G = formats.parse_family(json.loads(out.read_text()))
    expected = fusion.dual(F)
    for W, V in zip(G.subspaces, expected.subspaces):
        assert sp.distance(W, V) <= 1e-12
    assert np.array_equal(G.weights, F.weights)


def test_serialize_parse_round_trip_bitwise(rng):
    F = fusion.random_family(5, [2, 3], rng, complex_=True)
    G = formats.parse_family(formats.dumps(formats.serialize_family(F)))
    for W, V in zip(F.subspaces, G.subspaces):
        assert np.array_equal(W.basis, V.basis)
    assert G.meta["field"] == "complex"


def test_non_orthonormal_basis_is_reorthonormalized():
    doc = {"ambient_dim": 2, "subspaces": [{"weight": 1, "basis": [[2, 0], [1, 1]]}]}
    F = formats.parse_family(doc)
    assert F.meta["reorthonormalized"] == [True]
    assert list(F.dims) == [2]


def test_complex_document(tmp_path, capsys):
    h = 2**-0.5
    doc = {
        "ambient_dim": 2,
        "field": "complex",
        "subspaces": [
            {"weight": 1, "basis": [[[h, 0], [0, h]]]},
            {"weight": 1, "basis": [[[h, 0], [0, -h]]]},
        ],
    }
    code, out, _ = run(["analyze", write(tmp_path, "c.json", doc)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["flags"]["onb"] and rep["flags"]["parseval"]
    with pytest.raises(InvalidInputError):
        formats.parse_family({"ambient_dim": 1, "field": "complex", "subspaces": [{"weight": 1, "basis": [[[1, 2, 3]]]}]})


def test_assemble_and_partition(tmp_path, capsys):
    locs = {
        "ambient_dim": 3,
        "locals": [
            {"weight": 1.0, "vectors": [[1, 0, 0], [0, 1, 0], [1, 1, 0]]},
            {"weight": 2.0, "vectors": [[0, 0, 1]]},
        ],
    }
    code, out, _ = run(["assemble", write(tmp_path, "l.json", locs)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["predicates_agree"]
    assert all(c["passed"] for c in rep["certificates"])
    mb = catalog.mercedes_benz()
    frame = {"ambient_dim": 2, "vectors": mb.T.tolist(), "partition": [[0], [1, 2]]}
    code, out, _ = run(["partition", write(tmp_path, "p.json", frame)], capsys)
    assert code == 0 and json.loads(out)["flags"]["frame"]
    frame["partition"] = [[0], [0, 1, 2]]
    assert run(["partition", write(tmp_path, "p2.json", frame)], capsys)[0] == 2


def test_supplied_local_bounds_mismatch_exits_2(tmp_path, capsys):
    locs = {"ambient_dim": 2, "locals": [{"weight": 1, "vectors": [[1, 0], [0, 1]], "bounds": [0.5, 1]}]}
    assert run(["assemble", write(tmp_path, "l.json", locs)], capsys)[0] == 2


def test_enrich(tmp_path, capsys):
    f = write(tmp_path, "f.json", HALVES)
    frame = write(tmp_path, "v.json", {"ambient_dim": 5, "vectors": np.eye(5).tolist() + [[1, 1, 1, 1, 1]]})
    code, out, _ = run(["enrich", f, "--frame", frame], capsys)
    assert code == 0 and json.loads(out)["result"]["flat_C"] > 0


def test_resolution_commands(tmp_path, capsys):
    f = write(tmp_path, "f.json", HALVES)
    code, out, _ = run(["resolution", f], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["resolves_identity"] and rep["result"]["subset_lower"]["passed"]
    locs = {
        "ambient_dim": 5,
        "locals": [
            {"weight": 1, "vectors": [[0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1], [0, 0, 1, 1, 1]]},
            {"weight": 1, "vectors": [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]]},
        ],
    }
    lp = write(tmp_path, "l.json", locs)
    code, out, _ = run(["resolution", f, "--construction", "dual-frame", "--locals", lp], capsys)
    assert code == 0 and json.loads(out)["result"]["resolves_identity"]
    assert run(["resolution", f, "--construction", "dual-frame"], capsys)[0] == 2


def test_harmonic_command(tmp_path, capsys, rng):
    spec = harmonic.uniform_parseval_orbit(2, 3, rng=rng, complex_=True)
    doc = {
        "ambient_dim": 6,
        "field": "complex",
        "U": formats.encode_matrix_rows(spec.U, True),
        "seed": [formats.encode_vector(c, True) for c in spec.seed.basis.T],
        "N": 3,
    }
    code, out, _ = run(["harmonic", write(tmp_path, "h.json", doc)], capsys)
    assert code == 0 and json.loads(out)["result"]["wraparound_distance"] <= 1e-8
    doc["N"] = 2
    assert run(["harmonic", write(tmp_path, "h2.json", doc)], capsys)[0] == 1
    doc["U"][0][0] = [5.0, 0.0]
    assert run(["harmonic", write(tmp_path, "h3.json", doc)], capsys)[0] == 2


def test_gabor_command(capsys):
    code, out, _ = run(["gabor", "--L", 8, "--q", 4, "--random-window", "--seed", 7], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["flags"]["frame"] and rep["result"]["harmonic"]["passed"]
    assert run(["gabor", "--L", 8, "--q", 3], capsys)[0] == 2
    code, out, _ = run(["gabor", "--L", 4, "--q", 2, "--window", "[1, 2, 0, 0]"], capsys)
    assert code == 0


def test_rieszcert_command(tmp_path, capsys):
    F, _ = catalog.nonriesz_subfamily_example(3)
    path = write(tmp_path, "r.json", formats.serialize_family(F))
    code, out, _ = run(["rieszcert", path, "--mode", "sampled", "--C", "0.5", "--seed", "2"], capsys)
    rep = json.loads(out)
    assert code == 1 and rep["result"]["seed"] == 2 and rep["result"]["subsets_checked"] >= 200
    assert run(["rieszcert", write(tmp_path, "h.json", HALVES), "--mode", "exhaustive"], capsys)[0] == 0


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 2
    assert run(["bogus"], capsys)[0] == 2
    assert run(["--help"], capsys)[0] == 0


@pytest.mark.skipif(shutil.which("fusionframes") is None, reason="entry point not installed")
def test_console_script(tmp_path):
    f = write(tmp_path, "f.json", HALVES)
    proc = subprocess.run(["fusionframes", "check", f, "--property", "riesz_decomposition"], capture_output=True)
    assert proc.returncode == 1
