"""Algebra- and group-valued currents on the punctured sphere.

Algebra currents are finite sums of (constant matrix) x (rational scalar);
group currents are ordered products of exponentials of algebra currents, so
their values are exactly unimodular and the logarithmic derivative is
computable through the differential-of-exponential series.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import AliasingWarning, EvaluationAtPole, SizeMismatch, ValidationError
from .liealg import algebra_element, bracket, fast_exp, fast_inv
from .surface import ArcSeg, Contour, RationalFunction, SurfaceModel

DEXP_SPLIT_NORM = 2.0
DEXP_REL_CUTOFF = 1e-14


# ---------------------------------------------------------------------------
# algebra currents
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlgebraCurrent:
    """Finite sum of terms A_m * r_m(z) with A_m in sl(n) and r_m rational
    with poles at the punctures."""

    surface: SurfaceModel
    terms: tuple

    def __post_init__(self):
        clean = []
        n = None
        for mat, rat in self.terms:
            X = algebra_element(mat)
            if n is None:
                n = X.shape[0]
            elif X.shape[0] != n:
                raise SizeMismatch("mixed matrix sizes in current")
            rat.check_poles(self.surface.punctures, "current coefficient")
            clean.append((X, rat))
        object.__setattr__(self, "terms", tuple(clean))

    @property
    def size(self) -> int:
        return self.terms[0][0].shape[0] if self.terms else 0

    def eval(self, z: complex) -> np.ndarray:
        if not self.terms:
            raise ValidationError("empty current has no size; use a zero term")
        out = np.zeros_like(self.terms[0][0])
        for mat, rat in self.terms:
            out = out + rat(z) * mat
        return out

    def derivative(self) -> "AlgebraCurrent":
        return AlgebraCurrent(
            self.surface, tuple((mat, rat.derivative()) for mat, rat in self.terms)
        )

    def scale(self, c) -> "AlgebraCurrent":
        return AlgebraCurrent(
            self.surface, tuple((mat, rat.scale(c)) for mat, rat in self.terms)
        )

    def __add__(self, other: "AlgebraCurrent") -> "AlgebraCurrent":
        return AlgebraCurrent(self.surface, self.terms + other.terms)


def constant_current(surface: SurfaceModel, mat) -> AlgebraCurrent:
    return AlgebraCurrent(surface, ((mat, RationalFunction.constant(1.0)),))


def zero_current(surface: SurfaceModel, n: int) -> AlgebraCurrent:
    return AlgebraCurrent(surface, ((np.zeros((n, n)), RationalFunction.constant(0.0)),))


def bracket_current(x: AlgebraCurrent, y: AlgebraCurrent):
    """Pointwise bracket as an evaluator (the product of rationals would be
    rational too, but pointwise suffices for the integrands that use it)."""
    return lambda z: bracket(x.eval(z), y.eval(z))


# ---------------------------------------------------------------------------
# one-forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OneForm:
    """Holomorphic k-valued 1-form, coefficient of dz.  Either backed by a
    rational AlgebraCurrent or by a lazy pointwise evaluator (gauge-acted
    forms are generally not rational in this representation)."""

    surface: SurfaceModel
    current: AlgebraCurrent | None = None
    evaluator: object = None

    def __post_init__(self):
        if (self.current is None) == (self.evaluator is None):
            raise ValidationError("exactly one of current/evaluator must be given")

    @classmethod
    def from_current(cls, current: AlgebraCurrent) -> "OneForm":
        return cls(current.surface, current=current)

    @classmethod
    def lazy(cls, surface: SurfaceModel, fn) -> "OneForm":
        return cls(surface, evaluator=fn)

    @property
    def is_rational(self) -> bool:
        return self.current is not None

    def coeff(self, z: complex) -> np.ndarray:
        if self.current is not None:
            return self.current.eval(z)
        return self.evaluator(z)

    def scale(self, c) -> "OneForm":
        if self.current is not None:
            return OneForm.from_current(self.current.scale(c))
        fn = self.evaluator
        return OneForm.lazy(self.surface, lambda z: c * fn(z))


# ---------------------------------------------------------------------------
# group currents and the logarithmic derivative
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupCurrent:
    """z -> prod_j exp(xi_j(z)), factors applied left to right.  The empty
    product is the constant identity (size must then be supplied)."""

    surface: SurfaceModel
    factors: tuple
    size_hint: int = 0

    @property
    def size(self) -> int:
        return self.factors[0].size if self.factors else self.size_hint

    @cached_property
    def _factor_derivatives(self):
        return tuple(f.derivative() for f in self.factors)

    def eval(self, z: complex) -> np.ndarray:
        g = np.eye(self.size, dtype=complex)
        for f in self.factors:
            g = g @ fast_exp(f.eval(z))
        return g

    def inverse(self) -> "GroupCurrent":
        return GroupCurrent(
            self.surface,
            tuple(f.scale(-1.0) for f in reversed(self.factors)),
            self.size_hint,
        )

    def __mul__(self, other: "GroupCurrent") -> "GroupCurrent":
        return GroupCurrent(self.surface, self.factors + other.factors,
                            self.size_hint or other.size_hint)

    def log_derivative(self, z: complex) -> np.ndarray:
        """delta(f)(z) = f^{-1} df / dz, assembled over the factors with the
        cocycle rule delta(f1 f2) = Ad(f2)^{-1} delta(f1) + delta(f2)."""
        n = self.size
        delta = np.zeros((n, n), dtype=complex)
        suffix = np.eye(n, dtype=complex)
        suffix_inv = np.eye(n, dtype=complex)
        for f, fp in zip(reversed(self.factors), reversed(self._factor_derivatives)):
            X = f.eval(z)
            Xp = fp.eval(z)
            d = _dexp_log_derivative(X, Xp)
            delta = delta + suffix_inv @ d @ suffix
            g = fast_exp(X)
            suffix = g @ suffix
            suffix_inv = suffix_inv @ fast_inv(g)
        return delta


def _dexp_series(X: np.ndarray, Xp: np.ndarray) -> np.ndarray:
    """exp(X)^{-1} d exp(X) = sum_k (-ad X)^k (X') / (k+1)!"""
    term = Xp.copy()
    total = Xp.copy()
    k = 1
    while True:
        term = -(X @ term - term @ X) / (k + 1)
        total = total + term
        k += 1
        if np.max(np.abs(term)) < DEXP_REL_CUTOFF * max(1.0, np.max(np.abs(total))):
            return total
        if k > 120:
            raise ValidationError("dexp series did not converge; split the factor")


def _dexp_log_derivative(X: np.ndarray, Xp: np.ndarray) -> np.ndarray:
    """Series evaluation with norm control: for ||X|| > 2 the factor is
    split as exp(X) = exp(X/2^s)^(2^s) and the cocycle doubling rule is
    applied s times."""
    nrm = np.linalg.norm(X, 2)
    s = 0
    if nrm > DEXP_SPLIT_NORM:
        s = int(math.ceil(math.log2(nrm / DEXP_SPLIT_NORM)))
    Y = X / (2**s)
    Yp = Xp / (2**s)
    d = _dexp_series(Y, Yp)
    g = fast_exp(Y)
    for _ in range(s):
        gi = fast_inv(g)
        d = gi @ d @ g + d
        g = g @ g
    return d


def eval_group(f: GroupCurrent, z: complex) -> np.ndarray:
    return f.eval(z)


def log_derivative(f: GroupCurrent, z: complex) -> np.ndarray:
    return f.log_derivative(z)


def log_derivative_fd(f: GroupCurrent, z: complex, h: float = 1e-5) -> np.ndarray:
    """Independent finite-difference oracle: f(z)^{-1} (f(z+h) - f(z-h)) / 2h
    with a central step; error O(h^2)."""
    return fast_inv(f.eval(z)) @ (f.eval(z + h) - f.eval(z - h)) / (2 * h)


def gauge_act(alpha: OneForm, f: GroupCurrent) -> OneForm:
    """(alpha * f)(z) = delta(f)(z) + Ad(f(z))^{-1} alpha(z), as a lazy form."""

    def fn(z):
        g = f.eval(z)
        gi = fast_inv(g)
        return f.log_derivative(z) + gi @ alpha.coeff(z) @ g

    return OneForm.lazy(alpha.surface, fn)


# ---------------------------------------------------------------------------
# loop restriction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LoopCurrent:
    """Fourier-polynomial loop X(theta) = sum_{|m| <= M} c_m e^{i m theta}
    with traceless matrix coefficients."""

    coeffs: dict

    def __post_init__(self):
        clean = {int(m): algebra_element(c) for m, c in self.coeffs.items()}
        object.__setattr__(self, "coeffs", clean)

    @property
    def bandwidth(self) -> int:
        return max((abs(m) for m in self.coeffs), default=0)

    @property
    def size(self) -> int:
        return next(iter(self.coeffs.values())).shape[0]

    def eval(self, theta: float) -> np.ndarray:
        out = np.zeros((self.size, self.size), dtype=complex)
        for m, c in self.coeffs.items():
            out = out + c * np.exp(1j * m * theta)
        return out

    def __call__(self, theta: float) -> np.ndarray:
        return self.eval(theta)


def _require_circle(contour: Contour) -> ArcSeg:
    if len(contour.segments) != 1 or not isinstance(contour.segments[0], ArcSeg):
        raise ValidationError("loop restriction requires a circle contour")
    arc = contour.segments[0]
    if abs(abs(arc.theta1 - arc.theta0) - 2 * math.pi) > 1e-12:
        raise ValidationError("loop restriction requires a full circle")
    return arc


def _fourier_coeffs(samples: np.ndarray, bandwidth: int) -> dict:
    N = samples.shape[0]
    F = np.fft.fft(samples, axis=0) / N
    out = {}
    for m in range(-bandwidth, bandwidth + 1):
        out[m] = F[m % N]
    top = max(np.max(np.abs(out[bandwidth])), np.max(np.abs(out[-bandwidth])))
    biggest = max(np.max(np.abs(c)) for c in out.values())
    if biggest > 0 and top > 1e-8 * biggest:
        warnings.warn(
            f"top Fourier coefficient is {top / biggest:.2e} of the largest; "
            "increase the bandwidth",
            AliasingWarning,
        )
    return out


@dataclass(frozen=True, eq=False)
class GroupLoopRestriction:
    """Samples of a group current along a circle plus, when the principal
    logarithm is well defined at every sample, the Fourier coefficients of
    the algebra-valued logarithm."""

    samples: np.ndarray
    log_coeffs: dict | None


def restrict_to_loop(x, contour: Contour, bandwidth: int):
    """Restrict a current to a circle: sample at 2M+2 equispaced points and
    apply the discrete Fourier transform.  theta runs along the contour
    parametrization."""
    arc = _require_circle(contour)
    N = 2 * bandwidth + 2
    ts = np.arange(N) / N
    points = np.array([arc.point(t) for t in ts])
    if isinstance(x, AlgebraCurrent):
        samples = np.array([x.eval(z) for z in points])
        coeffs = _fourier_coeffs(samples, bandwidth)
        return LoopCurrent({m: c for m, c in coeffs.items() if np.max(np.abs(c)) > 1e-300})
    if isinstance(x, GroupCurrent):
        samples = np.array([x.eval(z) for z in points])
        logs = []
        ok = True
        for g in samples:
            L = scipy.linalg.logm(g)
            if np.max(np.abs(scipy.linalg.expm(L) - g)) > 1e-8:
                ok = False
                break
            L = L - np.trace(L) / L.shape[0] * np.eye(L.shape[0])
            logs.append(L)
        log_coeffs = _fourier_coeffs(np.array(logs), bandwidth) if ok else None
        return GroupLoopRestriction(samples=samples, log_coeffs=log_coeffs)
    raise ValidationError("restrict_to_loop expects an AlgebraCurrent or GroupCurrent")


def pullback_loop(form: OneForm, contour: Contour):
    """The loop-algebra element theta -> xi(z(theta)) z'(theta) obtained by
    pulling a 1-form back along a circle; callable on theta in [0, 2 pi]."""
    arc = _require_circle(contour)

    def fn(theta):
        t = theta / (2 * math.pi)
        return form.coeff(arc.point(t)) * (arc.velocity(t) / (2 * math.pi))

    return fn


def pullback_loop_current(form: OneForm, contour: Contour, bandwidth: int) -> LoopCurrent:
    arc = _require_circle(contour)
    N = 2 * bandwidth + 2
    ts = np.arange(N) / N
    samples = np.array(
        [form.coeff(arc.point(t)) * (arc.velocity(t) / (2 * math.pi)) for t in ts]
    )
    coeffs = _fourier_coeffs(samples, bandwidth)
    return LoopCurrent({m: c for m, c in coeffs.items() if np.max(np.abs(c)) > 1e-300})


# ---------------------------------------------------------------------------
# Maurer-Cartan residual
# ---------------------------------------------------------------------------


def mc_residual(alpha: OneForm, sample_points) -> float:
    """max |d alpha + (1/2)[alpha, alpha]| over the samples.

    On a complex curve both terms vanish identically: holomorphic 1-forms
    are closed, and the bracket 2-form is alternating on a 1-dimensional
    tangent space.  Kept as a harness sanity check."""
    worst = 0.0
    for z in sample_points:
        a = alpha.coeff(z)
        # [alpha, alpha](v, v) = [a, a] - [a, a]; d(alpha) = 0 for
        # holomorphic coefficients on a 1-dimensional complex manifold
        val = 0.5 * (bracket(a, a) - bracket(a, a))
        worst = max(worst, float(np.max(np.abs(val))))
    return worst
