"""The genus-0 punctured surface: C minus a finite puncture set (infinity is
always punctured), its fundamental-group generator circles, disc chart
covers, and the rational functions with poles at the punctures that
represent currents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    EvaluationAtPole,
    NonIntegerWinding,
    ValidationError,
)
from .quadrature import contour_integral

MIN_SEPARATION = 1e-6
PATH_CLEARANCE = 1e-8
GENERATOR_RADIUS_FACTOR = 0.45
DETOUR_RADIUS_FACTOR = 0.3

TWO_PI_I = 2j * np.pi


# ---------------------------------------------------------------------------
# surface model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceModel:
    """Punctured sphere with k-1 finite punctures (the k-th is infinity).
    ell = k - 1 finite punctures = first Betti number at genus 0."""

    punctures: tuple
    basepoint: complex

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.punctures)
        object.__setattr__(self, "punctures", pts)
        object.__setattr__(self, "basepoint", complex(self.basepoint))
        if not pts:
            raise ValidationError("at least one finite puncture is required")
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i] - pts[j]) <= MIN_SEPARATION:
                    raise ValidationError(
                        f"punctures {i} and {j} are closer than {MIN_SEPARATION}"
                    )
        for i, p in enumerate(pts):
            if abs(self.basepoint - p) <= MIN_SEPARATION:
                raise ValidationError(f"basepoint is too close to puncture {i}")

    @property
    def ell(self) -> int:
        return len(self.punctures)

    @cached_property
    def min_puncture_distance(self) -> float:
        pts = self.punctures + (self.basepoint,)
        return min(
            abs(pts[i] - pts[j])
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
        )

    def nearest_puncture_distance(self, z: complex) -> float:
        return min(abs(z - p) for p in self.punctures)


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineSeg:
    z0: complex
    z1: complex

    def point(self, t: float) -> complex:
        return self.z0 + t * (self.z1 - self.z0)

    def velocity(self, t: float) -> complex:
        return self.z1 - self.z0

    def reversed(self) -> "LineSeg":
        return LineSeg(self.z1, self.z0)


@dataclass(frozen=True)
class ArcSeg:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, t: float) -> complex:
        ang = self.theta0 + t * (self.theta1 - self.theta0)
        return self.center + self.radius * np.exp(1j * ang)

    def velocity(self, t: float) -> complex:
        ang = self.theta0 + t * (self.theta1 - self.theta0)
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * ang)

    def reversed(self) -> "ArcSeg":
        return ArcSeg(self.center, self.radius, self.theta1, self.theta0)


@dataclass(frozen=True)
class Contour:
    """Piecewise-smooth path; closed contours carry the flag so t=0 and t=1
    are identified (endpoint coordinates agree to machine precision)."""

    segments: tuple
    closed: bool = False

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("empty contour")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.point(1.0) - b.point(0.0)) > 1e-12:
                raise ValidationError("contour segments are not contiguous")
        if self.closed:
            gap = abs(self.segments[-1].point(1.0) - self.segments[0].point(0.0))
            if gap > 1e-12:
                raise ValidationError(f"closed contour has endpoint gap {gap:.2e}")

    @property
    def start(self) -> complex:
        return self.segments[0].point(0.0)

    @property
    def end(self) -> complex:
        if self.closed:
            return self.start
        return self.segments[-1].point(1.0)

    def point(self, t: float) -> complex:
        m = len(self.segments)
        s = min(max(t, 0.0), 1.0) * m
        idx = min(int(s), m - 1)
        return self.segments[idx].point(s - idx)

    def reversed(self) -> "Contour":
        segs = tuple(s.reversed() for s in reversed(self.segments))
        return Contour(segs, closed=self.closed)

    def concatenate(self, other: "Contour") -> "Contour":
        return Contour(self.segments + other.segments, closed=False)

    def sample(self, per_segment: int = 64):
        ts = np.linspace(0.0, 1.0, per_segment)
        return np.array([s.point(t) for s in self.segments for t in ts])


def circle(center: complex, radius: float, theta0: float = 0.0, orientation: int = 1) -> Contour:
    if radius <= 0:
        raise ValidationError("circle radius must be positive")
    dtheta = 2 * math.pi * (1 if orientation >= 0 else -1)
    return Contour((ArcSeg(complex(center), float(radius), theta0, theta0 + dtheta),), closed=True)


def segment(z0: complex, z1: complex) -> Contour:
    return Contour((LineSeg(complex(z0), complex(z1)),))


def check_clearance(contour: Contour, punctures, clearance: float = PATH_CLEARANCE) -> float:
    """Minimum distance from the contour samples to the punctures; raises
    when below the clearance."""
    pts = contour.sample()
    dmin = min(float(np.min(np.abs(pts - p))) for p in punctures)
    if dmin <= clearance:
        raise ValidationError(f"contour passes within {dmin:.2e} of a puncture")
    return dmin


def winding_number(contour: Contour, p: complex, tol: float = 1e-11) -> int:
    """Round of (1/2 pi i) * integral of dz/(z - p); rejects non-integers."""
    if not contour.closed:
        raise ValidationError("winding number requires a closed contour")
    val = contour_integral(lambda z: 1.0 / (z - p), contour, tol) / TWO_PI_I
    nearest = round(val.real)
    if abs(val - nearest) > 1e-6:
        raise NonIntegerWinding(
            f"winding integral {val} deviates from an integer by more than 1e-6"
        )
    return int(nearest)


# ---------------------------------------------------------------------------
# canonical generators and basis one-forms
# ---------------------------------------------------------------------------


def generator_radius(surface: SurfaceModel, j: int) -> float:
    p = surface.punctures[j]
    others = [q for i, q in enumerate(surface.punctures) if i != j]
    d = min(abs(p - q) for q in others + [surface.basepoint])
    return GENERATOR_RADIUS_FACTOR * d


def canonical_generators(surface: SurfaceModel) -> list[Contour]:
    """One positively oriented circle around each finite puncture, starting
    at the point facing the basepoint (so connecting segments approach
    radially)."""
    gens = []
    for j, p in enumerate(surface.punctures):
        r = generator_radius(surface, j)
        theta0 = math.atan2((surface.basepoint - p).imag, (surface.basepoint - p).real)
        gens.append(circle(p, r, theta0=theta0, orientation=1))
    return gens


def detoured_segment(surface: SurfaceModel, a: complex, b: complex,
                     radius_factor: float = DETOUR_RADIUS_FACTOR) -> Contour:
    """Straight segment from a to b with counterclockwise circular detours
    around any puncture the chord approaches too closely."""
    a, b = complex(a), complex(b)
    if abs(b - a) < 1e-15:
        raise ValidationError("degenerate segment")
    u = (b - a) / abs(b - a)
    length = abs(b - a)
    base_rho = radius_factor * surface.min_puncture_distance

    cuts = []
    for q in surface.punctures:
        rho = min(base_rho, 0.9 * abs(a - q), 0.9 * abs(b - q))
        s = ((q - a) / u).real  # chord parameter of the foot point
        d = abs(a + s * u - q)
        if d >= rho or s <= 0.0 or s >= length:
            continue
        half = math.sqrt(rho * rho - d * d)
        cuts.append((max(s - half, 0.0), min(s + half, length), q, rho))
    cuts.sort()

    segs = []
    pos = 0.0
    for s_in, s_out, q, rho in cuts:
        e_in = a + s_in * u
        e_out = a + s_out * u
        if s_in > pos + 1e-14:
            segs.append(LineSeg(a + pos * u, e_in))
        t_in = math.atan2((e_in - q).imag, (e_in - q).real)
        t_out = math.atan2((e_out - q).imag, (e_out - q).real)
        if t_out <= t_in:
            t_out += 2 * math.pi
        arc = ArcSeg(q, rho, t_in, t_out)
        # close the tiny gaps between the chord cut and the circle
        segs.append(LineSeg(e_in, arc.point(0.0)))
        segs.append(arc)
        segs.append(LineSeg(arc.point(1.0), e_out))
        pos = s_out
    if pos < length - 1e-14:
        segs.append(LineSeg(a + pos * u, b))
    if not segs:
        segs.append(LineSeg(a, b))
    segs = [s for s in segs if not (isinstance(s, LineSeg) and abs(s.z1 - s.z0) < 1e-14)]
    return Contour(tuple(segs))


def generator_loop(surface: SurfaceModel, j: int) -> Contour:
    """Basepoint-based generator: connecting segment, circle, reversed
    segment, all sharing the surface basepoint."""
    gen = canonical_generators(surface)[j]
    seg = detoured_segment(surface, surface.basepoint, gen.start)
    return seg.concatenate(gen).concatenate(seg.reversed())


# ---------------------------------------------------------------------------
# rational functions with poles at the punctures
# ---------------------------------------------------------------------------


def _taylor_shift(coeffs: np.ndarray, p: complex) -> np.ndarray:
    """Rewrite sum a_d z^d in powers of w = z - p (ascending coefficients)."""
    out = np.array(coeffs, dtype=complex)
    n = len(out)
    # repeated synthetic division by (z - p)
    res = np.zeros(n, dtype=complex)
    work = out[::-1].copy()  # descending
    for k in range(n):
        # divide work by (z - p): remainder is the coefficient of w^k
        for i in range(1, len(work)):
            work[i] += work[i - 1] * p
        res[k] = work[-1]
        work = work[:-1]
        if len(work) == 0:
            break
    return res


class RationalFunction:
    """Partial-fraction representation: polynomial part plus terms
    c_{p,m} / (z - p)^m with poles restricted to a fixed point set."""

    def __init__(self, poly=(), pole_terms=None):
        arr = np.atleast_1d(np.asarray(poly, dtype=complex))
        self.poly = np.trim_zeros(arr, "b") if arr.size else arr
        terms: dict = {}
        for p, orders in (pole_terms or {}).items():
            clean = {int(m): complex(c) for m, c in orders.items() if c != 0}
            for m in clean:
                if m < 1:
                    raise ValidationError("pole orders must be >= 1")
            if clean:
                terms[complex(p)] = clean
        self.pole_terms = terms

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(poly=[complex(c)])

    @classmethod
    def monomial(cls, degree: int) -> "RationalFunction":
        return cls(poly=[0.0] * degree + [1.0])

    @classmethod
    def pole(cls, p: complex, order: int, coeff=1.0) -> "RationalFunction":
        return cls(pole_terms={complex(p): {order: complex(coeff)}})

    # -- structure ----------------------------------------------------------

    def poles(self) -> set:
        return set(self.pole_terms)

    @property
    def degree(self) -> int:
        return len(self.poly) - 1 if self.poly.size else -1

    def is_zero(self) -> bool:
        return not self.pole_terms and self.poly.size == 0

    def check_poles(self, punctures, label: str = "rational function"):
        for p in self.pole_terms:
            if all(abs(p - q) > 1e-12 for q in punctures):
                raise ValidationError(f"{label} has a pole at {p} off the puncture set")

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z: complex) -> complex:
        val = 0.0 + 0.0j
        for c in self.poly[::-1]:
            val = val * z + c
        for p, orders in self.pole_terms.items():
            w = z - p
            if abs(w) < 1e-13:
                raise EvaluationAtPole(f"evaluation at pole {p}")
            for m, c in orders.items():
                val += c / w**m
        return val

    def derivative(self) -> "RationalFunction":
        dp = (
            self.poly[1:] * np.arange(1, len(self.poly))
            if len(self.poly) > 1
            else np.array([], dtype=complex)
        )
        terms: dict = {}
        for p, orders in self.pole_terms.items():
            terms[p] = {m + 1: -m * c for m, c in orders.items()}
        return RationalFunction(dp, terms)

    def residue(self, p: complex) -> complex:
        for q, orders in self.pole_terms.items():
            if abs(q - p) <= 1e-12:
                return orders.get(1, 0.0 + 0.0j)
        return 0.0 + 0.0j

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        la, lb = len(self.poly), len(other.poly)
        poly = np.zeros(max(la, lb), dtype=complex)
        poly[:la] += self.poly
        poly[:lb] += other.poly
        terms: dict = {p: dict(o) for p, o in self.pole_terms.items()}
        for p, orders in other.pole_terms.items():
            tgt = terms.setdefault(p, {})
            for m, c in orders.items():
                tgt[m] = tgt.get(m, 0.0) + c
        return RationalFunction(poly, terms)

    def __neg__(self) -> "RationalFunction":
        return self.scale(-1.0)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def scale(self, c) -> "RationalFunction":
        return RationalFunction(
            self.poly * c,
            {p: {m: c * v for m, v in o.items()} for p, o in self.pole_terms.items()},
        )

    def __rmul__(self, c):
        if np.isscalar(c):
            return self.scale(c)
        return NotImplemented

    # -- multiplication (re-expanded into partial fractions) ----------------

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        out = RationalFunction(np.convolve(self.poly, other.poly) if self.poly.size and other.poly.size else ())
        for p, orders in self.pole_terms.items():
            for m, c in orders.items():
                if other.poly.size:
                    out = out + _poly_times_pole(other.poly, p, m, c)
                for q, orders2 in other.pole_terms.items():
                    for k, c2 in orders2.items():
                        out = out + _pole_times_pole(p, m, q, k, c * c2)
        for q, orders2 in other.pole_terms.items():
            for k, c2 in orders2.items():
                if self.poly.size:
                    out = out + _poly_times_pole(self.poly, q, k, c2)
        return out


def _poly_times_pole(poly: np.ndarray, p: complex, m: int, c: complex) -> RationalFunction:
    """poly(z) * c/(z-p)^m expanded: shift the polynomial to powers of
    (z-p), split into the pole tail and a polynomial in z."""
    shifted = _taylor_shift(poly, p) * c
    pole_part = {}
    for t in range(min(m, len(shifted))):
        coef = shifted[t]
        if coef != 0:
            pole_part[m - t] = coef
    # remaining powers (z-p)^(t-m) with t >= m form a polynomial; shift back
    tail = shifted[m:]
    poly_part = ()
    if tail.size:
        poly_part = _taylor_shift_back(tail, p)
    return RationalFunction(poly_part, {p: pole_part} if pole_part else {})


def _taylor_shift_back(coeffs_w: np.ndarray, p: complex) -> np.ndarray:
    """Rewrite sum b_t w^t with w = z - p as a polynomial in z."""
    return _taylor_shift(coeffs_w, -p)


def _pole_times_pole(p: complex, m: int, q: complex, k: int, c: complex) -> RationalFunction:
    if abs(p - q) <= 1e-12:
        return RationalFunction(pole_terms={p: {m + k: c}})
    # 1/((z-p)^m (z-q)^k) = sum_i A_i/(z-p)^i + sum_j B_j/(z-q)^j
    terms_p = {}
    for i in range(1, m + 1):
        e = m - i
        A = math.comb(k + e - 1, e) * (-1.0) ** e * (p - q) ** (-(k + e))
        terms_p[i] = c * A
    terms_q = {}
    for j in range(1, k + 1):
        e = k - j
        B = math.comb(m + e - 1, e) * (-1.0) ** e * (q - p) ** (-(m + e))
        terms_q[j] = c * B
    return RationalFunction(pole_terms={p: terms_p, q: terms_q})


def basis_one_forms(surface: SurfaceModel) -> list[RationalFunction]:
    """Coefficients of the forms dz/(z - p_j); the j-th has normalized
    period (1/2 pi i) * loop integral over the i-th generator = delta_ij."""
    return [RationalFunction.pole(p, 1) for p in surface.punctures]


def rational_eval(f: RationalFunction, z: complex) -> complex:
    return f(z)


def rational_derivative(f: RationalFunction) -> RationalFunction:
    return f.derivative()


def rational_residue(f: RationalFunction, p: complex) -> complex:
    return f.residue(p)


# ---------------------------------------------------------------------------
# chart covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return abs(z - self.center) < self.radius - margin


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_inner: float
    r_outer: float


def disc_overlap_chord(a: Disc, b: Disc):
    """Endpoints of the chord joining the two intersection points of the
    boundary circles; the chord lies in the closed lens of both discs.
    Returns None when the discs do not overlap transversally."""
    d = abs(b.center - a.center)
    if d < 1e-15 or d >= a.radius + b.radius or d <= abs(a.radius - b.radius):
        return None
    u = (b.center - a.center) / d
    x = (d * d + a.radius**2 - b.radius**2) / (2 * d)
    h2 = a.radius**2 - x * x
    if h2 <= 0:
        return None
    h = math.sqrt(h2)
    base = a.center + x * u
    return base + 1j * h * u, base - 1j * h * u


def overlap_samples(a: Disc, b: Disc, count: int = 5):
    """Interior sample points of the overlap lens, along the chord pulled
    slightly toward its midpoint."""
    chord = disc_overlap_chord(a, b)
    if chord is None:
        return []
    e1, e2 = chord
    mid = (e1 + e2) / 2.0
    pts = []
    for t in np.linspace(-0.5, 0.5, count):
        pts.append(mid + 0.8 * t * (e2 - e1))
    return pts


def triple_overlap_witness(a: Disc, b: Disc, c: Disc, grid: int = 25):
    """Geometric search for a common point of three discs."""
    for base, other in ((a, b), (b, c), (a, c)):
        for z in overlap_samples(base, other, grid):
            if a.contains(z) and b.contains(z) and c.contains(z):
                return z
    # fall back to a grid over the bounding box of the centers
    lo_x = min(d.center.real - d.radius for d in (a, b, c))
    hi_x = max(d.center.real + d.radius for d in (a, b, c))
    lo_y = min(d.center.imag - d.radius for d in (a, b, c))
    hi_y = max(d.center.imag + d.radius for d in (a, b, c))
    for x in np.linspace(lo_x, hi_x, grid):
        for y in np.linspace(lo_y, hi_y, grid):
            z = complex(x, y)
            if a.contains(z) and b.contains(z) and c.contains(z):
                return z
    return None


def chart_cover(surface: SurfaceModel, region, n_charts: int | None = None,
                clearance: float = 1e-3) -> list[Disc]:
    """Overlapping puncture-free disc charts covering the region.

    For an annulus the discs sit on the middle circle; the count grows until
    the discs cover the band, stay clear of every puncture, and consecutive
    triples share a witness point.
    """
    if isinstance(region, Disc):
        d = surface.nearest_puncture_distance(region.center)
        if d <= region.radius + clearance:
            raise ValidationError("disc region too close to a puncture")
        return [region]
    if not isinstance(region, Annulus):
        raise ValidationError("region must be a Disc or an Annulus")
    r0, r1 = region.r_inner, region.r_outer
    if not (0 < r0 < r1):
        raise ValidationError("annulus radii must satisfy 0 < inner < outer")
    rm = (r0 + r1) / 2.0
    for p in surface.punctures:
        d = abs(p - region.center)
        if r0 - clearance < d < r1 + clearance:
            raise ValidationError("annulus band passes too close to a puncture")

    def build(N: int):
        centers = [region.center + rm * np.exp(2j * math.pi * k / N) for k in range(N)]
        dmin = min(abs(c - p) for c in centers for p in surface.punctures)
        rho = 0.95 * min(dmin - clearance, 2.0 * rm)
        if rho <= 0:
            return None
        # radial coverage at the band edges, at the worst angle
        worst = math.sqrt(r0 * r0 + rm * rm - 2 * r0 * rm * math.cos(math.pi / N))
        worst = max(worst, math.sqrt(r1 * r1 + rm * rm - 2 * r1 * rm * math.cos(math.pi / N)))
        if worst >= rho:
            return None
        # consecutive triple overlap: the (i+1)-th center must lie inside
        # discs i and i+2
        if N >= 3 and 2 * rm * math.sin(math.pi / N) >= 0.95 * rho:
            return None
        return [Disc(c, rho) for c in centers]

    if n_charts is not None:
        charts = build(n_charts)
        if charts is None:
            raise ValidationError(
                f"no valid {n_charts}-chart cover for this annulus (punctures too close "
                "or too few charts for overlaps)"
            )
        return charts
    for N in range(4, 64):
        charts = build(N)
        if charts is not None:
            return charts
    raise ValidationError("could not construct an annulus cover")
