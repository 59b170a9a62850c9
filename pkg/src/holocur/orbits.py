"""The smooth dual of the centrally extended current algebra: the cycle
cocycle, the duality pairing, adjoint and coadjoint actions, orbit
certificates as conjugacy-class tuples, stabilizer checks, and the orbit
symplectic form.

Convention note: the coadjoint action below carries the level as a factor
on delta(f), and the adjoint central shift carries sign +1.  This is the
unique combination under which the invariance identity
pairing(f . D, E) = pairing(D, f . E) closes for every level; the
calibration is pinned in the regression tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroLevel
from .currents import (
    AlgebraCurrent,
    GroupCurrent,
    OneForm,
    pullback_loop,
)
from .liealg import (
    ConjugacyInvariants,
    bracket,
    fast_inv,
    is_generic_tuple,
    killing_form,
    simultaneous_conjugacy_test,
    sl_basis,
    trace_word_invariants,
)
from .quadrature import contour_integral
from .surface import Contour, RationalFunction, SurfaceModel, canonical_generators
from .transport import MonodromyTuple, frenkel_monodromy, period_map

ADJOINT_CENTRAL_SIGN = +1.0  # calibrated; see module docstring
QUAD_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class CoadjointPoint:
    """Point level * d + xi of the smooth dual, tied to the fixed cycle
    sigma (one of the canonical generator circles)."""

    level: complex
    xi: OneForm
    sigma: Contour

    def require_level(self):
        if abs(self.level) < 1e-14:
            raise ZeroLevel("operation requires a nonzero level")


@dataclass(frozen=True, eq=False)
class CentExtElement:
    """central * k + X in the centrally extended current algebra; X needs
    only a pointwise .eval (rational currents and lazy evaluators both
    qualify)."""

    central: complex
    X: object


@dataclass(frozen=True, eq=False)
class LazyCurrent:
    surface: SurfaceModel
    fn: object

    def eval(self, z: complex) -> np.ndarray:
        return self.fn(z)


@dataclass(frozen=True, eq=False)
class OrbitCertificate:
    level: complex
    monodromy: MonodromyTuple
    invariants: ConjugacyInvariants
    generic: bool


# ---------------------------------------------------------------------------
# cocycle and pairing
# ---------------------------------------------------------------------------


def cocycle_omega_sigma(X: AlgebraCurrent, Y: AlgebraCurrent, sigma: Contour,
                        tol: float = QUAD_TOL) -> complex:
    """Central 2-cocycle: integral over sigma of kappa(X(z), Y'(z)) dz with
    the exact coefficient-level derivative of Y."""
    Yp = Y.derivative()
    return contour_integral(lambda z: killing_form(X.eval(z), Yp.eval(z)), sigma, tol)


def pairing(D: CoadjointPoint, E: CentExtElement, tol: float = QUAD_TOL) -> complex:
    """level * central + integral over sigma of kappa(xi(z), X(z)) dz."""
    val = contour_integral(lambda z: killing_form(D.xi.coeff(z), E.X.eval(z)), D.sigma, tol)
    return D.level * E.central + val


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------


def coadjoint_act(f: GroupCurrent, D: CoadjointPoint) -> CoadjointPoint:
    """f . (level d + xi) = level d + level delta(f) + Ad(f)^{-1} xi.

    The level factor on delta(f) deviates from a formula often written
    without it; with the factor the action restricts to the gauge action at
    level 1 and the duality pairing is invariant at every level."""
    lam = D.level

    def fn(z):
        g = f.eval(z)
        return lam * f.log_derivative(z) + fast_inv(g) @ D.xi.coeff(z) @ g

    return CoadjointPoint(level=lam, xi=OneForm.lazy(D.xi.surface, fn), sigma=D.sigma)


def adjoint_act(f: GroupCurrent, E: CentExtElement, sigma: Contour,
                tol: float = QUAD_TOL) -> CentExtElement:
    """f . (central k + X) = (central + s * integral of kappa(delta f, X)) k
    + Ad(f) X with the calibrated sign s."""
    shift = contour_integral(
        lambda z: killing_form(f.log_derivative(z), E.X.eval(z)), sigma, tol
    )

    def fn(z):
        g = f.eval(z)
        return g @ E.X.eval(z) @ fast_inv(g)

    return CentExtElement(
        central=E.central + ADJOINT_CENTRAL_SIGN * shift,
        X=LazyCurrent(f.surface, fn),
    )


def calibrate_action_conventions(f: GroupCurrent, D: CoadjointPoint, E: CentExtElement,
                                 tol: float = QUAD_TOL):
    """Evaluate the invariance defect |pairing(f.D, E) - pairing(D, f.E)|
    for the four candidate conventions (level factor on delta(f) or not,
    central sign +/- 1).  Returns {(with_level, sign): defect}."""
    out = {}
    lam = D.level
    for with_level in (True, False):
        c = lam if with_level else 1.0

        def co_fn(z, c=c):
            g = f.eval(z)
            return c * f.log_derivative(z) + fast_inv(g) @ D.xi.coeff(z) @ g

        acted_D = CoadjointPoint(lam, OneForm.lazy(D.xi.surface, co_fn), D.sigma)
        lhs = pairing(acted_D, E, tol)
        shift = contour_integral(
            lambda z: killing_form(f.log_derivative(z), E.X.eval(z)), D.sigma, tol
        )

        def ad_fn(z):
            g = f.eval(z)
            return g @ E.X.eval(z) @ fast_inv(g)

        for sign in (+1.0, -1.0):
            acted_E = CentExtElement(E.central + sign * shift, LazyCurrent(f.surface, ad_fn))
            rhs = pairing(D, acted_E, tol)
            out[(with_level, sign)] = abs(lhs - rhs)
    return out


# ---------------------------------------------------------------------------
# orbit classification
# ---------------------------------------------------------------------------


def classify_orbit(D: CoadjointPoint, surface: SurfaceModel, tol: float = 1e-9,
                   word_len: int | None = None) -> OrbitCertificate:
    """Desk-scale orbit label: monodromy tuple of xi / level over the fixed
    generators plus its trace-word invariants and a genericity flag."""
    D.require_level()
    tup = period_map(D.xi.scale(1.0 / D.level), surface, tol)
    n = tup.entries[0].shape[0]
    L = word_len if word_len is not None else n * n
    inv = trace_word_invariants(tup.entries, L)
    return OrbitCertificate(
        level=D.level,
        monodromy=tup,
        invariants=inv,
        generic=is_generic_tuple(tup.entries),
    )


def same_orbit(D1: CoadjointPoint, D2: CoadjointPoint, surface: SurfaceModel,
               tol: float = 1e-6, transport_tol: float = 1e-9,
               word_len: int | None = None) -> str:
    """Verdict on whether two points lie on one coadjoint orbit: levels must
    agree (the hyperplanes are preserved), then the monodromy tuples are
    compared up to simultaneous conjugacy."""
    if abs(D1.level - D2.level) > tol:
        return "distinct"
    c1 = classify_orbit(D1, surface, transport_tol, word_len)
    c2 = classify_orbit(D2, surface, transport_tol, word_len)
    return simultaneous_conjugacy_test(c1.monodromy.entries, c2.monodromy.entries, tol, word_len)


# ---------------------------------------------------------------------------
# stabilizers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerReport:
    fixes_point: bool
    point_deviation: float
    loop_fixes: tuple
    loop_deviations: tuple


def check_stabilizer(f: GroupCurrent, D: CoadjointPoint, surface: SurfaceModel,
                     tol: float = 1e-7, transport_tol: float = 1e-9,
                     samples_per_generator: int = 8) -> StabilizerReport:
    """(a) does f fix D under the coadjoint action (sampled on the generator
    circles); (b) does each loop restriction of f fix the circle monodromy
    of the restricted form by conjugation with its value at the loop start."""
    D.require_level()
    acted = coadjoint_act(f, D)
    gens = canonical_generators(surface)
    point_dev = 0.0
    for gen in gens:
        for t in np.linspace(0.0, 1.0, samples_per_generator, endpoint=False):
            z = gen.point(t)
            point_dev = max(
                point_dev, float(np.max(np.abs(acted.xi.coeff(z) - D.xi.coeff(z))))
            )
    loop_fixes = []
    loop_devs = []
    for gen in gens:
        X = pullback_loop(D.xi, gen)
        res = frenkel_monodromy(X, D.level, transport_tol)
        g0 = f.eval(gen.point(0.0))
        dev = float(np.max(np.abs(g0 @ res.monodromy @ fast_inv(g0) - res.monodromy)))
        loop_devs.append(dev)
        loop_fixes.append(dev <= tol)
    return StabilizerReport(
        fixes_point=point_dev <= tol,
        point_deviation=point_dev,
        loop_fixes=tuple(loop_fixes),
        loop_deviations=tuple(loop_devs),
    )


# ---------------------------------------------------------------------------
# the orbit symplectic form
# ---------------------------------------------------------------------------


def kks_form(D: CoadjointPoint, Xt, Yt, C: Contour, tol: float = QUAD_TOL) -> complex:
    """Orbit 2-form on tangent generators: integral over C of
    kappa(xi(z), [Xt(z), Yt(z)]) dz."""
    return contour_integral(
        lambda z: killing_form(D.xi.coeff(z), bracket(Xt.eval(z), Yt.eval(z))), C, tol
    )


def kks_loop_form(D: CoadjointPoint, Xt, Yt, C: Contour, n_samples: int = 256) -> complex:
    """The same quantity computed on the circle side: restrict the form and
    the tangents to the loop and integrate over theta with the equispaced
    (spectrally exact) rule.  Independent of the adaptive contour
    quadrature."""
    pull = pullback_loop(D.xi, C)

    def arc_point(theta):
        return C.segments[0].point(theta / (2 * math.pi))

    thetas = np.arange(n_samples) * (2 * math.pi / n_samples)
    total = 0.0 + 0.0j
    for th in thetas:
        z = arc_point(th)
        total += killing_form(pull(th), bracket(Xt.eval(z), Yt.eval(z)))
    return total * (2 * math.pi / n_samples)


# ---------------------------------------------------------------------------
# non-degeneracy witnesses
# ---------------------------------------------------------------------------


def killing_dual_basis(n: int) -> list[np.ndarray]:
    """Basis of sl(n) dual to the fixed one under the Killing form."""
    B = sl_basis(n)
    dim = B.shape[0]
    G = np.array([[killing_form(B[a], B[b]) for b in range(dim)] for a in range(dim)])
    Gi = np.linalg.inv(G)
    return [np.tensordot(Gi[:, a], B, axes=(0, 0)) for a in range(dim)]


def _shifted_power(p: complex, j: int) -> RationalFunction:
    """(z - p)^j as a RationalFunction (ascending coefficients in z)."""
    coeffs = [math.comb(j, i) * (-p) ** (j - i) for i in range(j + 1)]
    return RationalFunction(poly=coeffs)


def pairing_witness(D: CoadjointPoint, surface: SurfaceModel, max_order: int = 3,
                    threshold: float = 1e-6, tol: float = QUAD_TOL):
    """Search for a probe X with |pairing(D, (0, X))| above the threshold,
    over the Killing-dual basis times powers of (z - p) for the punctures p.
    Realizes the duality proof's probe construction at desk scale."""
    n = D.xi.coeff(surface.basepoint).shape[0]
    duals = killing_dual_basis(n)
    rationals = [RationalFunction.constant(1.0)]
    for p in surface.punctures:
        for j in range(max_order):
            if j > 0:
                rationals.append(_shifted_power(p, j))
            rationals.append(RationalFunction.pole(p, j + 1))
    best = None
    for rat in rationals:
        for y in duals:
            X = AlgebraCurrent(surface, ((y, rat),))
            val = pairing(D, CentExtElement(0.0, X), tol)
            if best is None or abs(val) > abs(best[1]):
                best = (X, val)
            if abs(val) > threshold:
                return X, val
    return None if best is None else (None, best[1])


def kks_injectivity_witness(D: CoadjointPoint, Xt, C: Contour, surface: SurfaceModel,
                            max_order: int = 3, threshold: float = 1e-8,
                            tol: float = QUAD_TOL):
    """Search for a tangent probe Yt with |kks_form(D, Xt, Yt, C)| above the
    threshold; exists whenever [xi, Xt] is not identically zero."""
    n = D.xi.coeff(surface.basepoint).shape[0]
    duals = killing_dual_basis(n)
    rationals = [RationalFunction.constant(1.0)]
    for p in surface.punctures:
        for j in range(1, max_order + 1):
            rationals.append(RationalFunction.pole(p, j))
            rationals.append(RationalFunction(poly=[0.0] * j + [1.0]))
    for rat in rationals:
        for y in duals:
            Yt = AlgebraCurrent(surface, ((y, rat),))
            val = kks_form(D, Xt, Yt, C, tol)
            if abs(val) > threshold:
                return Yt, val
    return None
