"""Command-line interface: problem-file ingestion, dispatch to the library,
canonical result documents, persistence with content digests, and the seeded
verification harness.

Exit codes: 0 success, 1 mathematical failure, 2 input/schema error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .currents import LoopCurrent, OneForm
from .errors import InputError, MathError, NumericsError
from .liealg import is_generic_tuple, trace_word_invariants
from .orbits import (
    CentExtElement,
    CoadjointPoint,
    classify_orbit,
    cocycle_omega_sigma,
    kks_form,
    kks_loop_form,
    pairing,
    same_orbit,
)
from .problemio import (
    canonical_json,
    content_digest,
    decode_complex,
    encode_complex,
    encode_matrix,
    parse_problem,
    pretty_json,
    problem_to_dict,
    transport_cache_key,
)
from .surface import Annulus, canonical_generators, chart_cover, generator_radius
from .transport import (
    MonodromyTuple,
    frenkel_monodromy,
    integrate_form,
    period_map,
    transition_functions,
)
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_MATH = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def _write_atomic(path: str, data: str):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def persist(result: dict, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    digest = result["input_digest"]
    path = os.path.join(out_dir, f"{digest}.result")
    _write_atomic(path, canonical_json(result) + "\n")
    index_path = os.path.join(out_dir, "index.json")
    index = {}
    if os.path.exists(index_path):
        try:
            with open(index_path) as f:
                index = json.load(f)
        except (json.JSONDecodeError, OSError):
            print("warning: corrupt index.json, rebuilding", file=sys.stderr)
            index = {}
    index[digest] = {"command": result["command"], "file": os.path.basename(path)}
    _write_atomic(index_path, pretty_json(index) + "\n")
    return path


def cached_period_map(form: OneForm, surface, tol: float, out_dir: str | None):
    """period_map with an on-disk cache keyed by the content digest of
    (form, surface, tol); corrupted entries are ignored and recomputed."""
    key = transport_cache_key(form, surface, tol)
    if out_dir is None or key is None:
        return period_map(form, surface, tol), "off"
    cache_dir = os.path.join(out_dir, "cache")
    path = os.path.join(cache_dir, f"{key}.periods.json")
    if os.path.exists(path):
        try:
            with open(path) as f:
                doc = json.load(f)
            entries = tuple(
                np.array([[complex(a, b) for a, b in row] for row in m]) for m in doc["entries"]
            )
            if len(entries) != surface.ell:
                raise ValueError("entry count mismatch")
            return MonodromyTuple(entries=entries, basepoint=surface.basepoint), "hit"
        except (json.JSONDecodeError, OSError, KeyError, ValueError, TypeError) as e:
            print(f"warning: ignoring corrupt cache entry {path}: {e}", file=sys.stderr)
    tup = period_map(form, surface, tol)
    os.makedirs(cache_dir, exist_ok=True)
    _write_atomic(path, canonical_json({"entries": [encode_matrix(m) for m in tup.entries]}) + "\n")
    return tup, "miss"


# ---------------------------------------------------------------------------
# result assembly
# ---------------------------------------------------------------------------


def _invariants_dict(inv) -> dict:
    traces = {}
    for word, val in inv.word_traces.items():
        key = ",".join(str(i) for i in word) if word else "e"
        traces[key] = encode_complex(val)
    return {
        "word_len": inv.word_len,
        "word_traces": traces,
        "char_polys": [[encode_complex(c) for c in cp] for cp in inv.char_polys],
    }


def _result_doc(command: str, problem_dict: dict, outputs: dict, diagnostics: dict) -> dict:
    return {
        "command": command,
        "schema_version": 1,
        "tool": {"name": "holocur", "version": __version__},
        "input_digest": content_digest({"command": command, "problem": problem_dict}),
        "outputs": outputs,
        "diagnostics": diagnostics,
    }


def _load_problem(path: str):
    if path == "-":
        raw = sys.stdin.read()
    else:
        with open(path) as f:
            raw = f.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON in {path}: {e}") from e
    return parse_problem(doc)


def _emit(result: dict, args) -> None:
    text = pretty_json(result) if args.pretty else canonical_json(result)
    print(text)
    if args.out_dir:
        persist(result, args.out_dir)


def _apply_overrides(problem, args):
    if args.tol is not None:
        problem.options["tol"] = args.tol
    if args.seed is not None:
        problem.options["seed"] = args.seed
    if args.max_word_len is not None:
        problem.options["max_word_len"] = args.max_word_len
    if args.quadrature_order is not None:
        problem.options["quadrature_order"] = args.quadrature_order
    return problem


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def cmd_monodromy(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    tol = float(p.options["tol"])
    tup, cache = cached_period_map(p.one_form, p.surface, tol, args.out_dir)
    inv = trace_word_invariants(tup.entries, int(p.options["max_word_len"]))
    outputs = {
        "entries": [encode_matrix(m) for m in tup.entries],
        "invariants": _invariants_dict(inv),
        "distances_from_identity": tup.distance_from_identity(),
    }
    doc = _result_doc("monodromy", problem_to_dict(p), outputs, {"cache": cache, "tol": tol})
    _emit(doc, args)
    return EXIT_OK


def cmd_classify(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    tol = float(p.options["tol"])
    sigma = canonical_generators(p.surface)[p.sigma_index]
    D = CoadjointPoint(level=p.level, xi=p.one_form, sigma=sigma)
    cert = classify_orbit(D, p.surface, tol, int(p.options["max_word_len"]))
    outputs = {
        "level": encode_complex(cert.level),
        "entries": [encode_matrix(m) for m in cert.monodromy.entries],
        "invariants": _invariants_dict(cert.invariants),
        "generic": bool(cert.generic),
    }
    doc = _result_doc("classify", problem_to_dict(p), outputs, {"tol": tol})
    _emit(doc, args)
    return EXIT_OK


def cmd_same_orbit(args) -> int:
    p1 = _apply_overrides(_load_problem(args.problem), args)
    p2 = _apply_overrides(_load_problem(args.problem2), args)
    tol = float(p1.options["tol"])
    sigma1 = canonical_generators(p1.surface)[p1.sigma_index]
    sigma2 = canonical_generators(p2.surface)[p2.sigma_index]
    D1 = CoadjointPoint(level=p1.level, xi=p1.one_form, sigma=sigma1)
    D2 = CoadjointPoint(level=p2.level, xi=p2.one_form, sigma=sigma2)
    verdict = same_orbit(D1, D2, p1.surface, tol=1e-6, transport_tol=tol,
                         word_len=int(p1.options["max_word_len"]))
    doc = _result_doc(
        "same-orbit",
        {"first": problem_to_dict(p1), "second": problem_to_dict(p2)},
        {"verdict": verdict},
        {"tol": tol},
    )
    _emit(doc, args)
    return EXIT_OK


def cmd_cocycle(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    if p.form is None or p.form2 is None:
        raise InputError("cocycle requires 'form' (X) and 'form2' (Y)")
    sigma = canonical_generators(p.surface)[p.sigma_index]
    val = cocycle_omega_sigma(p.form, p.form2, sigma)
    doc = _result_doc("cocycle", problem_to_dict(p), {"value": encode_complex(val)}, {})
    _emit(doc, args)
    return EXIT_OK


def cmd_pairing(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    if p.form is None or p.form2 is None:
        raise InputError("pairing requires 'form' (xi) and 'form2' (X)")
    central = decode_complex(p.raw.get("central", [0.0, 0.0]), "central")
    sigma = canonical_generators(p.surface)[p.sigma_index]
    D = CoadjointPoint(level=p.level, xi=p.one_form, sigma=sigma)
    E = CentExtElement(central=central, X=p.form2)
    val = pairing(D, E)
    doc = _result_doc("pairing", problem_to_dict(p), {"value": encode_complex(val)}, {})
    _emit(doc, args)
    return EXIT_OK


def cmd_kks(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    if p.form is None or p.tangent_x is None or p.tangent_y is None:
        raise InputError("kks requires 'form', 'tangent_x' and 'tangent_y'")
    sigma = canonical_generators(p.surface)[p.sigma_index]
    D = CoadjointPoint(level=p.level, xi=p.one_form, sigma=sigma)
    vh = kks_form(D, p.tangent_x, p.tangent_y, sigma)
    vs = kks_loop_form(D, p.tangent_x, p.tangent_y, sigma)
    outputs = {
        "value": encode_complex(vh),
        "loop_value": encode_complex(vs),
        "restriction_deviation": abs(vh - vs),
    }
    doc = _result_doc("kks", problem_to_dict(p), outputs, {})
    _emit(doc, args)
    return EXIT_OK


def cmd_integrate(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    tol = float(p.options["tol"])
    prim = integrate_form(p.one_form, p.surface, tol)
    pts = p.eval_points
    if not pts:
        r = 0.3 * p.surface.nearest_puncture_distance(p.surface.basepoint)
        pts = [p.surface.basepoint + r * np.exp(2j * math.pi * k / 8) for k in range(8)]
    samples = [
        {"point": encode_complex(z), "value": encode_matrix(prim(z))} for z in pts
    ]
    doc = _result_doc("integrate", problem_to_dict(p), {"samples": samples}, {"tol": tol})
    _emit(doc, args)
    return EXIT_OK


def cmd_frenkel(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    if p.loop_coeffs is None:
        raise InputError("frenkel requires a 'loop' input (Fourier coefficients)")
    tol = float(p.options["tol"])
    X = LoopCurrent(p.loop_coeffs)
    res = frenkel_monodromy(X, p.level, tol)
    outputs = {
        "monodromy": encode_matrix(res.monodromy),
        "quasiperiodicity_error": res.quasiperiodicity_error,
        "path_samples": [encode_matrix(m) for m in res.path],
        "thetas": list(res.thetas),
    }
    doc = _result_doc("frenkel", problem_to_dict(p), outputs,
                      {"steps": res.steps, "estimated_error": res.estimated_error})
    _emit(doc, args)
    return EXIT_OK


def cmd_transitions(args) -> int:
    p = _apply_overrides(_load_problem(args.problem), args)
    tol = float(p.options["tol"])
    if p.region is not None:
        center = decode_complex(p.region["center"], "region.center")
        region = Annulus(center=center, r_inner=float(p.region["r_inner"]),
                         r_outer=float(p.region["r_outer"]))
        n_charts = p.region.get("n_charts")
    else:
        pj = p.surface.punctures[p.sigma_index]
        r = generator_radius(p.surface, p.sigma_index)
        region = Annulus(center=pj, r_inner=0.6 * r, r_outer=1.4 * r)
        n_charts = None
    charts = chart_cover(p.surface, region, n_charts=n_charts)
    rep = transition_functions(p.level, p.one_form, charts, tol)
    outputs = {
        "n_charts": len(charts),
        "charts": [
            {"center": encode_complex(c.center), "radius": c.radius} for c in charts
        ],
        "phi": {
            f"{i},{j}": encode_matrix(m) for (i, j), m in sorted(rep.phi_mean.items())
        },
        "max_constancy_deviation": rep.max_constancy_deviation,
        "max_cech_deviation": rep.max_cech_deviation,
        "ring_monodromy": encode_matrix(rep.ring_monodromy()),
    }
    doc = _result_doc("transitions", problem_to_dict(p), outputs, {"tol": tol})
    _emit(doc, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    seed = args.seed if args.seed is not None else 0
    all_ok = True
    lines = []
    for name in names:
        if name not in SUITES:
            raise InputError(f"unknown suite '{name}'; available: {', '.join(sorted(SUITES))}")
        lines.append(f"suite {name} seed {seed}")
        for res in run_suite(name, seed):
            lines.append(res.line())
            all_ok = all_ok and res.passed
    text = "\n".join(lines)
    print(text)
    if args.out_dir:
        doc = {
            "command": "verify",
            "schema_version": 1,
            "tool": {"name": "holocur", "version": __version__},
            "input_digest": content_digest({"command": "verify", "suites": names, "seed": seed}),
            "outputs": {"verdicts": text.splitlines()},
            "diagnostics": {},
        }
        persist(doc, args.out_dir)
    return EXIT_OK if all_ok else EXIT_MATH


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _add_common(sp):
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--max-word-len", dest="max_word_len", type=int, default=None)
    sp.add_argument("--quadrature-order", dest="quadrature_order", type=int, default=None)
    sp.add_argument("--out-dir", dest="out_dir", default=None)
    sp.add_argument("--pretty", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="holocur",
        description="Monodromy, central extensions and coadjoint orbits of "
        "holomorphic matrix currents on punctured spheres.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, two_inputs in (
        ("monodromy", cmd_monodromy, False),
        ("classify", cmd_classify, False),
        ("same-orbit", cmd_same_orbit, True),
        ("cocycle", cmd_cocycle, False),
        ("pairing", cmd_pairing, False),
        ("kks", cmd_kks, False),
        ("integrate", cmd_integrate, False),
        ("frenkel", cmd_frenkel, False),
        ("transitions", cmd_transitions, False),
    ):
        sp = sub.add_parser(name)
        sp.add_argument("problem", help="problem file path, or - for stdin")
        if two_inputs:
            sp.add_argument("problem2", help="second problem file path")
        _add_common(sp)
        sp.set_defaults(handler=fn)

    sp = sub.add_parser("verify")
    sp.add_argument("--suite", required=True,
                    help="suite name or 'all'; see README for the list")
    _add_common(sp)
    sp.set_defaults(handler=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.handler(args)
    except MathError as e:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
        print(canonical_json({"error": {"type": type(e).__name__, "message": str(e)}}))
        return EXIT_MATH
    except (InputError, OSError) as e:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
        print(canonical_json({"error": {"type": type(e).__name__, "message": str(e)}}))
        return EXIT_INPUT
    except NumericsError as e:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
        print(canonical_json({"error": {"type": type(e).__name__, "message": str(e)}}))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
