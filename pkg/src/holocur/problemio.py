"""Problem-document schema, canonical serialization, and content digests.

Documents are JSON with complex numbers encoded as [re, im] pairs.  The
canonical encoding (sorted keys, compact separators, shortest round-trip
float repr) makes outputs diff-able and digest-stable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .currents import AlgebraCurrent, GroupCurrent, OneForm
from .surface import RationalFunction, SurfaceModel

SCHEMA_VERSION = 1
DEFAULT_OPTIONS = {
    "tol": 1e-9,
    "seed": 0,
    "max_word_len": 4,
    "quadrature_order": 32,
}


# ---------------------------------------------------------------------------
# complex encoding
# ---------------------------------------------------------------------------


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v, path: str) -> complex:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(x, (int, float)) for x in v)):
        raise ValidationError(f"{path}: expected a [re, im] pair, got {v!r}")
    return complex(v[0], v[1])


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(x) for x in row] for row in m]


def decode_matrix(v, n: int, path: str) -> np.ndarray:
    if not isinstance(v, list) or len(v) != n:
        raise ValidationError(f"{path}: expected an {n}x{n} matrix")
    rows = []
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"{path}[{i}]: expected {n} entries")
        rows.append([decode_complex(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows, dtype=complex)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def pretty_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def content_digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:24]


# ---------------------------------------------------------------------------
# problem documents
# ---------------------------------------------------------------------------


@dataclass
class Problem:
    n: int
    surface: SurfaceModel
    level: complex
    sigma_index: int
    form: AlgebraCurrent | None
    form2: AlgebraCurrent | None
    tangent_x: AlgebraCurrent | None
    tangent_y: AlgebraCurrent | None
    current: GroupCurrent | None
    loop_coeffs: dict | None
    region: dict | None
    eval_points: list
    options: dict
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def one_form(self) -> OneForm:
        if self.form is None:
            raise ValidationError("document has no 'form'")
        return OneForm.from_current(self.form)


def _require(doc: dict, key: str, path: str = ""):
    if key not in doc:
        raise ValidationError(f"missing required field '{path}{key}'")
    return doc[key]


def _decode_terms(v, surface: SurfaceModel, n: int, tol: float, path: str) -> AlgebraCurrent:
    if not isinstance(v, list) or not v:
        raise ValidationError(f"{path}: expected a nonempty list of terms")
    terms = []
    for i, term in enumerate(v):
        tpath = f"{path}[{i}]"
        if not isinstance(term, dict):
            raise ValidationError(f"{tpath}: expected an object")
        mat = decode_matrix(_require(term, "matrix", tpath + "."), n, tpath + ".matrix")
        if abs(np.trace(mat)) > max(tol, 1e-9):
            raise ValidationError(f"{tpath}.matrix: not traceless")
        pole = _require(term, "pole", tpath + ".")
        order = int(term.get("order", 1))
        if pole == "polynomial":
            if order < 0:
                raise ValidationError(f"{tpath}.order: degree must be >= 0")
            rat = RationalFunction.monomial(order)
        else:
            if not isinstance(pole, int) or not (0 <= pole < surface.ell):
                raise ValidationError(f"{tpath}.pole: index out of range")
            if order < 1:
                raise ValidationError(f"{tpath}.order: pole order must be >= 1")
            rat = RationalFunction.pole(surface.punctures[pole], order)
        coeff = term.get("coefficient")
        if coeff is not None:
            rat = rat.scale(decode_complex(coeff, tpath + ".coefficient"))
        terms.append((mat, rat))
    return AlgebraCurrent(surface, tuple(terms))


def parse_problem(doc: dict) -> Problem:
    if not isinstance(doc, dict):
        raise ValidationError("problem document must be a JSON object")
    algebra = _require(doc, "algebra")
    if not isinstance(algebra, dict) or algebra.get("family") != "sl":
        raise ValidationError("algebra.family must be 'sl'")
    n = algebra.get("n")
    if not isinstance(n, int) or n < 2:
        raise ValidationError("algebra.n must be an integer >= 2")

    sdoc = _require(doc, "surface")
    punctures = [
        decode_complex(p, f"surface.punctures[{i}]")
        for i, p in enumerate(_require(sdoc, "punctures", "surface."))
    ]
    basepoint = decode_complex(_require(sdoc, "basepoint", "surface."), "surface.basepoint")
    surface = SurfaceModel(punctures=tuple(punctures), basepoint=basepoint)

    options = dict(DEFAULT_OPTIONS)
    for k, v in (doc.get("options") or {}).items():
        if k not in DEFAULT_OPTIONS:
            raise ValidationError(f"unknown option '{k}'")
        options[k] = v
    tol = float(options["tol"])

    level = decode_complex(doc.get("level", [1.0, 0.0]), "level")
    sigma_index = doc.get("sigma_index", 0)
    if not isinstance(sigma_index, int) or not (0 <= sigma_index < surface.ell):
        raise ValidationError("sigma_index out of range")

    def opt_terms(key):
        return _decode_terms(doc[key], surface, n, tol, key) if key in doc else None

    current = None
    if "current" in doc:
        factors = doc["current"]
        if not isinstance(factors, list) or not factors:
            raise ValidationError("current: expected a nonempty list of factors")
        fs = tuple(
            _decode_terms(fac, surface, n, tol, f"current[{i}]")
            for i, fac in enumerate(factors)
        )
        current = GroupCurrent(surface, fs, size_hint=n)

    loop_coeffs = None
    if "loop" in doc:
        ldoc = doc["loop"]
        coeffs = {}
        for i, entry in enumerate(_require(ldoc, "coefficients", "loop.")):
            m = entry.get("m")
            if not isinstance(m, int):
                raise ValidationError(f"loop.coefficients[{i}].m must be an integer")
            coeffs[m] = decode_matrix(entry["matrix"], n, f"loop.coefficients[{i}].matrix")
        loop_coeffs = coeffs

    region = doc.get("region")
    if region is not None:
        if region.get("kind") != "annulus":
            raise ValidationError("region.kind must be 'annulus'")
        decode_complex(_require(region, "center", "region."), "region.center")

    eval_points = [
        decode_complex(p, f"eval_points[{i}]") for i, p in enumerate(doc.get("eval_points", []))
    ]

    return Problem(
        n=n,
        surface=surface,
        level=level,
        sigma_index=sigma_index,
        form=opt_terms("form"),
        form2=opt_terms("form2"),
        tangent_x=opt_terms("tangent_x"),
        tangent_y=opt_terms("tangent_y"),
        current=current,
        loop_coeffs=loop_coeffs,
        region=region,
        eval_points=eval_points,
        options=options,
        raw=doc,
    )


def problem_to_dict(p: Problem) -> dict:
    """Normalized re-encoding of a parsed problem; parse(encode(p)) is the
    identity on valid documents."""

    def terms_out(cur: AlgebraCurrent | None):
        if cur is None:
            return None
        out = []
        for mat, rat in cur.terms:
            if rat.pole_terms:
                for pole, orders in rat.pole_terms.items():
                    idx = min(
                        range(p.surface.ell),
                        key=lambda j: abs(p.surface.punctures[j] - pole),
                    )
                    for m, c in orders.items():
                        out.append({
                            "matrix": encode_matrix(mat),
                            "pole": idx,
                            "order": m,
                            "coefficient": encode_complex(c),
                        })
            if rat.poly.size:
                for d, c in enumerate(rat.poly):
                    if c != 0:
                        out.append({
                            "matrix": encode_matrix(mat),
                            "pole": "polynomial",
                            "order": d,
                            "coefficient": encode_complex(c),
                        })
        return out

    doc = {
        "algebra": {"family": "sl", "n": p.n},
        "surface": {
            "punctures": [encode_complex(q) for q in p.surface.punctures],
            "basepoint": encode_complex(p.surface.basepoint),
        },
        "level": encode_complex(p.level),
        "sigma_index": p.sigma_index,
        "options": dict(p.options),
    }
    for key, cur in (
        ("form", p.form), ("form2", p.form2),
        ("tangent_x", p.tangent_x), ("tangent_y", p.tangent_y),
    ):
        enc = terms_out(cur)
        if enc is not None:
            doc[key] = enc
    if p.current is not None:
        doc["current"] = [terms_out(f) for f in p.current.factors]
    if p.loop_coeffs is not None:
        doc["loop"] = {
            "coefficients": [
                {"m": m, "matrix": encode_matrix(c)}
                for m, c in sorted(p.loop_coeffs.items())
            ]
        }
    if p.region is not None:
        doc["region"] = dict(p.region)
    if p.eval_points:
        doc["eval_points"] = [encode_complex(z) for z in p.eval_points]
    return doc


# ---------------------------------------------------------------------------
# digests of library objects (for the transport cache)
# ---------------------------------------------------------------------------


def form_digest_payload(form: OneForm):
    """Digestable payload of a rational-backed form; None for lazy forms
    (those are not cacheable)."""
    if not form.is_rational:
        return None
    terms = []
    for mat, rat in form.current.terms:
        terms.append({
            "matrix": encode_matrix(mat),
            "poly": [encode_complex(c) for c in rat.poly],
            "poles": sorted(
                (
                    encode_complex(pole) + [m, *encode_complex(c)]
                    for pole, orders in rat.pole_terms.items()
                    for m, c in orders.items()
                ),
            ),
        })
    return terms


def transport_cache_key(form: OneForm, surface: SurfaceModel, tol: float):
    payload = form_digest_payload(form)
    if payload is None:
        return None
    return content_digest({
        "form": payload,
        "surface": {
            "punctures": [encode_complex(q) for q in surface.punctures],
            "basepoint": encode_complex(surface.basepoint),
        },
        "tol": tol,
    })
