"""Command-line interface.

Exit codes: 0 success / property holds, 1 checked property is false,
2 invalid input (including usage errors), 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import assembly, formats, fusion, harmonic, resolution, structure
from . import subspace as sp
from .certificate import leq
from .errors import InvalidInputError, SingularOperatorError

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_TOL = 1e-9

PROPERTIES = (
    "frame", "tight", "parseval", "uniform", "onb", "bessel",
    "complete", "minimal", "riesz_decomposition", "exact",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _flags(F: fusion.WeightedFamily, fb: fusion.BoundsReport, tol: float) -> dict:
    st = structure.structure_report(F)
    S = fusion.frame_operator(F)
    parseval = fb.is_frame and float(np.linalg.norm(S - np.eye(F.ambient_dim), 2)) <= tol
    return {
        "frame": fb.is_frame,
        "tight": fb.is_frame and (fb.D - fb.C) <= tol * fb.D,
        "parseval": parseval,
        "uniform": fb.is_uniform,
        "onb": parseval and fb.is_onb,
        "bessel": True,
        "complete": st.complete,
        "minimal": st.minimal,
        "riesz_decomposition": st.riesz_decomposition,
        "exact": st.exact,
    }


def _prov(args, **extra) -> dict:
    return formats.provenance(
        args.seed, {"tol": args.tol, "slack": 1e-8, "frame_tol_rel": fusion.FRAME_TOL_REL}, **extra
    )


def _family_prov(args, F) -> dict:
    return _prov(args, input=str(args.family),
                 reorthonormalized=F.meta.get("reorthonormalized", []))


def _emit(args, doc: dict) -> None:
    text = formats.dumps(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_family(path) -> fusion.WeightedFamily:
    return formats.parse_family(formats.load_json(path))


def cmd_analyze(args) -> int:
    F = _load_family(args.family)
    fb = fusion.frame_bounds(F)
    flags = _flags(F, fb, args.tol)
    st = structure.structure_report(F)
    _emit(args, formats.report(
        command="analyze", bounds=fb, flags=flags, provenance=_family_prov(args, F),
        result={"weights": list(map(float, F.weights)), "dims": list(st.dims),
                "total_dim": st.total_dim, "ambient_dim": st.ambient_dim},
    ))
    return EXIT_OK


def cmd_check(args) -> int:
    F = _load_family(args.family)
    fb = fusion.frame_bounds(F)
    flags = _flags(F, fb, args.tol)
    value = bool(flags[args.property])
    _emit(args, formats.report(
        command="check", bounds=fb, flags=flags, provenance=_family_prov(args, F),
        result={"property": args.property, "value": value},
    ))
    return EXIT_OK if value else EXIT_FALSE


def _load_vector(path, n: int) -> np.ndarray:
    doc = formats.load_json(path)
    field = "real"
    if isinstance(doc, dict):
        field = doc.get("field", "real")
        doc = doc.get("vector")
    if isinstance(doc, list) and any(isinstance(x, list) for x in doc):
        field = "complex"
    return formats.parse_vector(doc, n, field, "vector")


def cmd_reconstruct(args) -> int:
    F = _load_family(args.family)
    f = _load_vector(args.vector, F.ambient_dim)
    f_rec, residual = fusion.reconstruct(F, f)
    cert = leq("residual <= tol", residual, args.tol, 0.0)
    _emit(args, formats.report(
        command="reconstruct", bounds=fusion.frame_bounds(F), certificates=[cert],
        provenance=_family_prov(args, F),
        result={"residual": residual, "reconstruction": formats.encode_vector(f_rec)},
    ))
    return EXIT_OK if cert.passed else EXIT_FALSE


def cmd_dual(args) -> int:
    F = _load_family(args.family)
    G = fusion.dual(F)
    doc = formats.serialize_family(G)
    doc["report"] = formats.report(
        command="dual", bounds=fusion.frame_bounds(G), provenance=_family_prov(args, F)
    )
    _emit(args, doc)
    return EXIT_OK


def _load_locals(path):
    doc = formats.load_json(path)
    if not isinstance(doc, dict):
        raise InvalidInputError("locals document must be a JSON object")
    n = formats._ambient(doc)
    field = formats._field(doc)
    items = doc.get("locals")
    if not isinstance(items, list) or not items:
        raise InvalidInputError("locals: expected a nonempty list")
    out = []
    for i, item in enumerate(items):
        where = f"locals[{i}]"
        if not isinstance(item, dict) or "vectors" not in item:
            raise InvalidInputError(f"{where}: needs 'vectors'")
        w = formats._weight(item.get("weight", 1.0), f"{where}.weight")
        V = formats.parse_vector_list(item["vectors"], n, field, f"{where}.vectors")
        supplied = item.get("bounds")
        out.append((assembly.LocalFrame(V, supplied_bounds=tuple(supplied) if supplied else None), w))
    return n, out


def cmd_assemble(args) -> int:
    _, locals_ = _load_locals(args.locals)
    flat, F, rep = assembly.assemble_global(locals_)
    fb = fusion.frame_bounds(F)
    result = rep.as_dict()
    result["family"] = formats.serialize_family(F)
    _emit(args, formats.report(
        command="assemble", bounds=fb, flags=_flags(F, fb, args.tol),
        certificates=rep.inequalities, provenance=_prov(args, input=str(args.locals)),
        result=result,
    ))
    return EXIT_OK if rep.passed else EXIT_FALSE


def _load_frame(path):
    doc = formats.load_json(path)
    if not isinstance(doc, dict):
        raise InvalidInputError("frame document must be a JSON object")
    n = formats._ambient(doc)
    V = formats.parse_vector_list(doc.get("vectors"), n, formats._field(doc), "vectors")
    return doc, V


def cmd_partition(args) -> int:
    doc, V = _load_frame(args.frame)
    cells = doc.get("partition")
    if not isinstance(cells, list):
        raise InvalidInputError("partition: expected a list of index lists")
    weights = doc.get("weights", 1.0)
    if isinstance(weights, list):
        weights = [formats._weight(w, f"weights[{k}]") for k, w in enumerate(weights)]
        if len(weights) != len(cells):
            raise InvalidInputError("weights: one weight per partition cell is required")
    else:
        weights = formats._weight(weights, "weights")
    F = assembly.from_partition(V, cells, weights)
    pcert = assembly.partition_certificate(V, cells)
    fb = fusion.frame_bounds(F)
    result = {"A": pcert.A, "B": pcert.B, "lambda_min_unit": pcert.lambda_min,
              "lambda_max_unit": pcert.lambda_max, "family": formats.serialize_family(F)}
    _emit(args, formats.report(
        command="partition", bounds=fb, flags=_flags(F, fb, args.tol),
        certificates=pcert.inequalities, provenance=_prov(args, input=str(args.frame)),
        result=result,
    ))
    return EXIT_OK if (fb.is_frame and pcert.passed) else EXIT_FALSE


def cmd_enrich(args) -> int:
    F = _load_family(args.family)
    _, V = _load_frame(args.frame)
    rep = assembly.enrich(F, V)
    result = {
        "per_subspace_bounds": [list(b) for b in rep.per_bounds],
        "frame_A": rep.A, "frame_B": rep.B,
        "flat_C": rep.C_g, "flat_D": rep.D_g,
        "flat_vectors": [formats.encode_vector(c) for c in rep.flat.T],
    }
    _emit(args, formats.report(
        command="enrich", bounds=fusion.frame_bounds(F), certificates=rep.inequalities,
        provenance=_family_prov(args, F), result=result,
    ))
    return EXIT_OK if rep.passed else EXIT_FALSE


def cmd_resolution(args) -> int:
    F = _load_family(args.family)
    fb = fusion.frame_bounds(F)
    if args.construction == "frame-operator":
        OF = resolution.resolution_from_frame_operator(F)
        resolves = resolution.is_resolution(OF, scaled=True, tol=args.tol)
        deciding = OF.certificates
    else:
        if not args.locals:
            raise InvalidInputError("--locals is required for the dual-frame construction")
        _, locals_ = _load_locals(args.locals)
        OF = resolution.resolution_from_dual_frame(F, [lf for lf, _ in locals_])
        resolves = resolution.is_resolution(OF, scaled=False, tol=args.tol)
        deciding = [c for c in OF.certificates if c.name.startswith("derived")]
    certs = [ineq for c in OF.certificates for ineq in c.inequalities]
    subset = None
    if len(F) <= args.max_subset_family:
        if args.construction == "frame-operator":
            subset = resolution.subset_lower_certificate(F, OF, probes=args.probes, seed=args.seed)
        else:
            scaled = resolution.OperatorFamily(
                tuple(T / v**2 for T, v in zip(OF.ops, OF.weights)), OF.weights, OF.range_hints
            )
            subset = resolution.subset_lower_certificate(F, scaled, probes=args.probes, seed=args.seed)
    rres = resolution.range_resolution_bounds(F, OF) if args.construction == "frame-operator" else None
    result = {
        "construction": args.construction,
        "resolves_identity": resolves,
        "ordering": OF.ordering,
        "sandwiches": [
            {"name": c.name, "lower": c.lower, "upper": c.upper,
             "lambda_min": c.lambda_min, "lambda_max": c.lambda_max, "passed": c.passed}
            for c in OF.certificates
        ],
    }
    if subset is not None:
        result["subset_lower"] = {
            "subsets": subset.subsets, "probes": subset.probes,
            "worst_probe_slack": subset.worst_probe_slack,
            "worst_matrix_eigenvalue": subset.worst_matrix_eigenvalue,
            "passed": subset.passed,
        }
    if rres is not None:
        result["range_resolution"] = rres.as_dict()
    _emit(args, formats.report(
        command="resolution", bounds=fb, certificates=certs,
        provenance=_family_prov(args, F), result=result,
    ))
    ok = resolves and all(c.passed for c in deciding) and (subset is None or subset.passed)
    return EXIT_OK if ok else EXIT_FALSE


def _load_harmonic(path) -> harmonic.HarmonicSpec:
    doc = formats.load_json(path)
    if not isinstance(doc, dict):
        raise InvalidInputError("harmonic document must be a JSON object")
    n = formats._ambient(doc)
    field = formats._field(doc)
    U = formats.parse_matrix(doc.get("U"), n, field, "U")
    seed = sp.from_spanning(formats.parse_vector_list(doc.get("seed"), n, field, "seed"),
                            ambient_dim=n)
    N = doc.get("N")
    if not isinstance(N, int) or isinstance(N, bool):
        raise InvalidInputError("N: expected an integer")
    weights = doc.get("weights", 1.0)
    return harmonic.HarmonicSpec(U, seed, N, weights)


def cmd_harmonic(args) -> int:
    spec = _load_harmonic(args.spec)
    F = harmonic.orbit_family(spec)
    fb = fusion.frame_bounds(F)
    dist = harmonic.wraparound_distance(spec, F)
    cert = leq("distance(U W_{N-1}, W_0) <= tol", dist, args.tol, 0.0)
    _emit(args, formats.report(
        command="harmonic", bounds=fb, flags=_flags(F, fb, args.tol), certificates=[cert],
        provenance=_prov(args, input=str(args.spec)),
        result={"N": spec.N, "wraparound_distance": dist, "family": formats.serialize_family(F)},
    ))
    return EXIT_OK if cert.passed else EXIT_FALSE


def cmd_gabor(args) -> int:
    L = args.L
    if args.window is not None:
        doc = formats.loads(args.window, "--window")
        field = "complex" if isinstance(doc, list) and any(isinstance(x, list) for x in doc) else "real"
        g = formats.parse_vector(doc, L, field, "window")
    elif args.window_file is not None:
        g = _load_vector(args.window_file, L)
    elif args.random_window:
        rng = np.random.default_rng(args.seed)
        g = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    else:
        g = np.zeros(L)
        g[0] = 1.0
    spec = harmonic.GaborSpec(L, g, args.q, args.translation_step)
    F, flat = harmonic.gabor_family(spec)
    fb = fusion.frame_bounds(F)
    C_g, D_g = assembly.system_bounds(flat)
    check = harmonic.harmonic_gabor_check(spec, tol=max(args.tol, harmonic.WRAP_TOL))
    _emit(args, formats.report(
        command="gabor", bounds=fb, flags=_flags(F, fb, args.tol),
        provenance=_prov(args),
        result={"L": L, "q": args.q, "translation_step": args.translation_step,
                "window": formats.encode_vector(spec.g), "dims": F.dims,
                "flat_C": C_g, "flat_D": D_g, "harmonic": check.as_dict()},
    ))
    return EXIT_OK if (fb.is_frame and check.passed) else EXIT_FALSE


def cmd_rieszcert(args) -> int:
    F = _load_family(args.family)
    cert = assembly.riesz_family_certificate(
        F, args.mode, args.C, args.D, seed=args.seed, samples=args.samples
    )
    _emit(args, formats.report(
        command="rieszcert", bounds=fusion.frame_bounds(F),
        provenance=_family_prov(args, F), result=cert.as_dict(),
    ))
    return EXIT_OK if cert.passed else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write the document here instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="tolerance for residuals and flag decisions (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized certificates")

    p = _Parser(prog="fusionframes", description="Frames of subspaces: bounds, duals, certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        q = sub.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=func)
        return q

    q = add("analyze", cmd_analyze, "bounds, class flags and structure of a family")
    q.add_argument("family")
    q = add("check", cmd_check, "exit 0 iff a property holds")
    q.add_argument("family")
    q.add_argument("--property", required=True, choices=PROPERTIES)
    q = add("reconstruct", cmd_reconstruct, "reconstruct a vector through the frame operator")
    q.add_argument("family")
    q.add_argument("--vector", required=True, metavar="PATH")
    q = add("dual", cmd_dual, "dual family")
    q.add_argument("family")
    q = add("assemble", cmd_assemble, "glue local frames into a global frame")
    q.add_argument("locals")
    q = add("partition", cmd_partition, "family of spans of a frame partition")
    q.add_argument("frame")
    q = add("enrich", cmd_enrich, "project a frame into each subspace through S^-1")
    q.add_argument("family")
    q.add_argument("--frame", required=True, metavar="PATH")
    q = add("resolution", cmd_resolution, "resolutions of the identity and their certificates")
    q.add_argument("family")
    q.add_argument("--construction", choices=("frame-operator", "dual-frame"),
                   default="frame-operator")
    q.add_argument("--locals", metavar="PATH")
    q.add_argument("--probes", type=int, default=100)
    q.add_argument("--max-subset-family", type=int, default=12,
                   help="skip the all-subsets check above this family size")
    q = add("harmonic", cmd_harmonic, "orbit family of a unitary and its wrap-around")
    q.add_argument("spec")
    q = add("gabor", cmd_gabor, "finite Gabor partition by modulation residue")
    q.add_argument("--L", type=int, required=True)
    q.add_argument("--q", type=int, default=1)
    q.add_argument("--translation-step", type=int, default=1)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--window", help="JSON list of L scalars")
    g.add_argument("--window-file", metavar="PATH")
    g.add_argument("--random-window", action="store_true", help="seeded complex Gaussian window")
    q = add("rieszcert", cmd_rieszcert, "bounds of every subfamily on its own span")
    q.add_argument("family")
    q.add_argument("--mode", choices=("exhaustive", "sampled"), default="sampled")
    q.add_argument("--C", type=float, default=None, help="required lower bound")
    q.add_argument("--D", type=float, default=None, help="required upper bound")
    q.add_argument("--samples", type=int, default=assembly.MIN_SAMPLES)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"fusionframes: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SingularOperatorError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"fusionframes: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"fusionframes: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"fusionframes: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # every path must map to a documented exit code
        print(f"fusionframes: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
