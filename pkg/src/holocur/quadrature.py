"""Adaptive composite Gauss-Legendre quadrature along contours.

Panels are refined uniformly (doubling) until two successive refinements
agree; analytic integrands converge spectrally so few panels are needed.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NonConvergence

DEFAULT_TOL = 1e-11
DEFAULT_NODES = 32
_MAX_PANELS = 1024


@lru_cache(maxsize=None)
def _gl_rule(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def _integrate_panels(f, a: float, b: float, panels: int, nodes: int):
    x, w = _gl_rule(nodes)
    total = None
    for k in range(panels):
        lo = a + (b - a) * k / panels
        hi = a + (b - a) * (k + 1) / panels
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        for xi, wi in zip(x, w):
            val = f(mid + half * xi)
            contrib = (wi * half) * np.asarray(val)
            total = contrib if total is None else total + contrib
    return total


def integrate_interval(f, a: float, b: float, tol: float = DEFAULT_TOL, nodes: int = DEFAULT_NODES):
    """Integrate a scalar- or matrix-valued function over [a, b]."""
    panels = 1
    prev = _integrate_panels(f, a, b, panels, nodes)
    while panels <= _MAX_PANELS:
        panels *= 2
        cur = _integrate_panels(f, a, b, panels, nodes)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
    raise NonConvergence(f"quadrature did not converge to {tol:.1e} within {_MAX_PANELS} panels")


def contour_integral(f, contour, tol: float = DEFAULT_TOL, nodes: int = DEFAULT_NODES):
    """Integrate f(z) dz along a contour, one adaptive run per smooth segment."""
    total = None
    for seg in contour.segments:
        val = integrate_interval(lambda t: f(seg.point(t)) * seg.velocity(t), 0.0, 1.0, tol, nodes)
        total = val if total is None else total + val
    if np.ndim(total) == 0:
        return complex(total)
    return total
