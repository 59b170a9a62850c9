"""Path-ordered transport g' = g * xi(gamma(t)) gamma'(t) and everything
built on it: monodromy tuples over the canonical generators, primitives of
forms with trivial periods, loop-equation monodromy on the circle, and
transition functions over chart covers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NonTrivialMonodromy,
    PoleOnPath,
    ToleranceNotMet,
    ValidationError,
    ZeroLevel,
)
from .currents import LoopCurrent, OneForm
from .liealg import fast_inv, trace_word_invariants
from .quadrature import contour_integral  # noqa: F401  (public transport op)
from .surface import (
    Contour,
    Disc,
    SurfaceModel,
    canonical_generators,
    check_clearance,
    detoured_segment,
    disc_overlap_chord,
    generator_loop,
    overlap_samples,
    segment,
    triple_overlap_witness,
)

DEFAULT_TOL = 1e-9

# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)

_MAX_STEPS = 200_000
_DET_DRIFT = 1e-12


@dataclass(frozen=True)
class TransportResult:
    endpoint: np.ndarray
    estimated_error: float
    steps: int


def _renormalize_det(g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    d = np.linalg.det(g)
    if abs(d - 1.0) > _DET_DRIFT:
        g = g * np.exp(-np.log(d) / n)
    return g


def _integrate_right(A, t0: float, t1: float, y0: np.ndarray, tol: float):
    """Adaptive RK5(4) for Y' = Y A(t).  Per-step error budget proportional
    to the step fraction of [t0, t1] so the accumulated estimate stays
    under tol; errors are measured relative to max(1, |Y|) so large
    monodromies are controlled in relative terms."""
    span = t1 - t0
    y = y0.copy()
    t = t0
    h = span / 16.0
    acc_err = 0.0
    steps = 0
    k = [None] * 7
    while t < t1 - 1e-15 * span:
        h = min(h, t1 - t)
        if h < 1e-14 * span:
            raise ToleranceNotMet("step size underflow in transport")
        for i in range(7):
            yi = y
            for j, aij in enumerate(_DP_A[i]):
                if aij != 0.0:
                    yi = yi + (h * aij) * k[j]
            k[i] = yi @ A(t + _DP_C[i] * h)
        y5 = y
        y4 = y
        for i in range(7):
            if _DP_B5[i] != 0.0:
                y5 = y5 + (h * _DP_B5[i]) * k[i]
            if _DP_B4[i] != 0.0:
                y4 = y4 + (h * _DP_B4[i]) * k[i]
        scale = max(1.0, float(np.max(np.abs(y5))))
        err = float(np.max(np.abs(y5 - y4))) / scale
        allowed = 0.5 * tol * (h / span)
        if err <= allowed or h < 1e-13 * span:
            t += h
            y = _renormalize_det(y5)
            acc_err += err
            steps += 1
            if steps > _MAX_STEPS:
                raise ToleranceNotMet("transport exceeded the step limit")
        factor = 0.9 * (allowed / err) ** 0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
    if acc_err > tol:
        raise ToleranceNotMet(f"accumulated transport error {acc_err:.2e} exceeds {tol:.1e}")
    return y, acc_err, steps


def evolve(xi: OneForm, path: Contour, tol: float = DEFAULT_TOL, check_path: bool = True) -> TransportResult:
    """Solve g'(t) = g(t) xi(gamma(t)) gamma'(t), g(0) = I, along the path."""
    try:
        if check_path:
            check_clearance(path, xi.surface.punctures)
    except ValidationError as e:
        raise PoleOnPath(str(e)) from e
    n = xi.coeff(path.start).shape[0]
    y = np.eye(n, dtype=complex)
    total_err = 0.0
    total_steps = 0
    per_seg_tol = tol / len(path.segments)
    for seg in path.segments:
        def A(t, seg=seg):
            return xi.coeff(seg.point(t)) * seg.velocity(t)

        y_seg, err, steps = _integrate_right(A, 0.0, 1.0, np.eye(n, dtype=complex), per_seg_tol)
        y = y @ y_seg
        total_err += err
        total_steps += steps
    return TransportResult(endpoint=_renormalize_det(y), estimated_error=total_err, steps=total_steps)


# ---------------------------------------------------------------------------
# monodromy over the canonical generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonodromyTuple:
    entries: tuple
    basepoint: complex

    def __len__(self) -> int:
        return len(self.entries)

    def distance_from_identity(self) -> list[float]:
        n = self.entries[0].shape[0]
        return [float(np.max(np.abs(g - np.eye(n)))) for g in self.entries]

    def invariants(self, word_len: int):
        return trace_word_invariants(self.entries, word_len)


def period_map(xi: OneForm, surface: SurfaceModel, tol: float = DEFAULT_TOL) -> MonodromyTuple:
    """Monodromy of the transport equation over the fixed generators, all
    based at the surface basepoint (segment - circle - reversed segment)."""
    entries = []
    for j in range(surface.ell):
        loop = generator_loop(surface, j)
        entries.append(evolve(xi, loop, tol).endpoint)
    return MonodromyTuple(entries=tuple(entries), basepoint=surface.basepoint)


def word_transport(xi: OneForm, surface: SurfaceModel, word, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Transport along the concatenation of generator loops named by the
    word (independent of the per-generator entries; used as an oracle for
    the homomorphism property)."""
    path = None
    for j in word:
        loop = generator_loop(surface, j)
        path = loop if path is None else path.concatenate(loop)
    if path is None:
        raise ValidationError("empty word")
    return evolve(xi, path, tol).endpoint


# ---------------------------------------------------------------------------
# primitives of integrable forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Primitive:
    """f with delta(f) = xi and f(basepoint) = I, evaluated by transport
    along a standard detoured path from the basepoint."""

    xi: OneForm
    surface: SurfaceModel
    tol: float

    def path_to(self, z: complex) -> Contour:
        return detoured_segment(self.surface, self.surface.basepoint, z)

    def __call__(self, z: complex) -> np.ndarray:
        return evolve(self.xi, self.path_to(z), self.tol).endpoint

    def log_derivative(self, z: complex, h: float = 1e-5) -> np.ndarray:
        """f(z)^{-1} f'(z) by central differences of the local transport:
        f(z +/- h) = f(z) E(z -> z +/- h)."""
        ep = evolve(self.xi, segment(z, z + h), self.tol, check_path=False).endpoint
        em = evolve(self.xi, segment(z, z - h), self.tol, check_path=False).endpoint
        return (ep - em) / (2 * h)


def integrate_form(xi: OneForm, surface: SurfaceModel, tol: float = DEFAULT_TOL,
                   monodromy_tol: float | None = None) -> Primitive:
    """Primitive of a form whose periods are trivial; rejects nontrivial
    monodromy, reporting the worst generator."""
    if monodromy_tol is None:
        monodromy_tol = 1000.0 * tol
    tup = period_map(xi, surface, tol)
    dists = tup.distance_from_identity()
    worst = int(np.argmax(dists))
    if dists[worst] > monodromy_tol:
        raise NonTrivialMonodromy(worst, dists[worst])
    return Primitive(xi=xi, surface=surface, tol=tol)


# ---------------------------------------------------------------------------
# loop monodromy (the circle-side construction)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopMonodromyResult:
    thetas: np.ndarray
    path: tuple
    monodromy: np.ndarray
    quasiperiodicity_error: float
    estimated_error: float
    steps: int


def frenkel_monodromy(X, level: complex, tol: float = DEFAULT_TOL,
                      n_samples: int = 8) -> LoopMonodromyResult:
    """Solve z' = -(1/level) X(theta) z on [0, 2 pi] with z(0) = I, continue
    to 4 pi, and verify z(theta + 2 pi) = z(theta) z(2 pi) at n_samples
    values of theta.  X is a LoopCurrent or a callable theta -> matrix."""
    if abs(level) < 1e-14:
        raise ZeroLevel("loop monodromy requires a nonzero level")
    fn = X.eval if isinstance(X, LoopCurrent) else X
    n = fn(0.0).shape[0]

    # z' = -(1/level) X z  <=>  w' = w A with w = z^T, A = -(1/level) X^T
    def A(t):
        return -(1.0 / level) * fn(t).T

    thetas = np.linspace(0.0, 2 * math.pi, n_samples, endpoint=False)
    grid = sorted(set(np.concatenate([thetas, thetas + 2 * math.pi, [2 * math.pi, 4 * math.pi]])))
    w = np.eye(n, dtype=complex)
    values = {}
    t_prev = 0.0
    values[0.0] = w.copy()
    total_err = 0.0
    total_steps = 0
    per_leg_tol = tol / max(1, len(grid))
    for t in grid:
        if t <= t_prev + 1e-15:
            continue
        w, err, steps = _integrate_right(A, t_prev, t, w, per_leg_tol)
        values[t] = w.copy()
        total_err += err
        total_steps += steps
        t_prev = t
    mono = values[2 * math.pi].T
    qp_err = 0.0
    for th in thetas:
        z_th = values[th].T if th in values else values[min(values, key=lambda s: abs(s - th))].T
        z_shift = values[th + 2 * math.pi].T
        qp_err = max(qp_err, float(np.max(np.abs(z_shift - z_th @ mono))))
    path = tuple(values[th].T for th in thetas)
    return LoopMonodromyResult(
        thetas=thetas,
        path=path,
        monodromy=mono,
        quasiperiodicity_error=qp_err,
        estimated_error=total_err,
        steps=total_steps,
    )


# ---------------------------------------------------------------------------
# transition functions over a chart cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransitionReport:
    charts: tuple
    psi_samples: dict
    phi_mean: dict
    phi_dev: dict
    cech_dev: dict

    @property
    def max_constancy_deviation(self) -> float:
        return max(self.phi_dev.values(), default=0.0)

    @property
    def max_cech_deviation(self) -> float:
        return max(self.cech_dev.values(), default=0.0)

    def ring_monodromy(self) -> np.ndarray:
        """Product of the consecutive transition constants around the chart
        ring; conjugate to the inverse transport monodromy of the ring."""
        N = len(self.charts)
        n = next(iter(self.phi_mean.values())).shape[0]
        out = np.eye(n, dtype=complex)
        for i in range(N):
            out = out @ self.phi_mean[(i, (i + 1) % N)]
        return out


def _solve_h(xi_over_level: OneForm, chart: Disc, z: complex, tol: float) -> np.ndarray:
    """h = psi^{-1} along the in-chart radial path from the chart center;
    h' = h (xi / level)."""
    if abs(z - chart.center) < 1e-15:
        return np.eye(xi_over_level.coeff(chart.center).shape[0], dtype=complex)
    return evolve(xi_over_level, segment(chart.center, z), tol, check_path=False).endpoint


def transition_functions(level: complex, xi: OneForm, charts, tol: float = DEFAULT_TOL,
                         samples_per_overlap: int = 5) -> TransitionReport:
    """Solve level * (d psi_i) psi_i^{-1} + xi = 0 on each chart
    (psi_i(center_i) = I), evaluate phi_ij = psi_i^{-1} psi_j on overlap
    grids, and report the constancy deviation of each phi_ij together with
    the Cech products over consecutive triples."""
    if abs(level) < 1e-14:
        raise ZeroLevel("transition functions require a nonzero level")
    charts = list(charts)
    for ch in charts:
        if not isinstance(ch, Disc):
            raise ValidationError("charts must be discs (simply connected)")
        if xi.surface.nearest_puncture_distance(ch.center) <= ch.radius:
            raise ValidationError("chart contains a puncture")
    xs = xi.scale(1.0 / level)

    pairs = {}
    for i in range(len(charts)):
        for j in range(len(charts)):
            if i == j:
                continue
            pts = overlap_samples(charts[i], charts[j], samples_per_overlap)
            pts = [z for z in pts if charts[i].contains(z) and charts[j].contains(z)]
            if pts:
                pairs[(i, j)] = pts

    h_cache: dict = {}

    def h_at(i, z):
        key = (i, z)
        if key not in h_cache:
            h_cache[key] = _solve_h(xs, charts[i], z, tol)
        return h_cache[key]

    psi_samples: dict = {i: [] for i in range(len(charts))}
    phi_mean: dict = {}
    phi_dev: dict = {}
    for (i, j), pts in pairs.items():
        vals = []
        for z in pts:
            hi = h_at(i, z)
            hj = h_at(j, z)
            # phi_ij = psi_i^{-1} psi_j = h_i h_j^{-1}
            vals.append(hi @ fast_inv(hj))
            psi_samples[i].append((z, fast_inv(hi)))
            psi_samples[j].append((z, fast_inv(hj)))
        mean = sum(vals) / len(vals)
        dev = max(float(np.max(np.abs(v - mean))) for v in vals)
        phi_mean[(i, j)] = mean
        phi_dev[(i, j)] = dev

    cech_dev: dict = {}
    N = len(charts)
    for i in range(N):
        j, k = (i + 1) % N, (i + 2) % N
        if (i, j) in phi_mean and (j, k) in phi_mean and (k, i) in phi_mean:
            if triple_overlap_witness(charts[i], charts[j], charts[k]) is None:
                continue
            prod = phi_mean[(i, j)] @ phi_mean[(j, k)] @ phi_mean[(k, i)]
            n = prod.shape[0]
            cech_dev[(i, j, k)] = float(np.max(np.abs(prod - np.eye(n))))

    return TransitionReport(
        charts=tuple(charts),
        psi_samples=psi_samples,
        phi_mean=phi_mean,
        phi_dev=phi_dev,
        cech_dev=cech_dev,
    )
