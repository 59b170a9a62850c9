"""sl(n, C) / SL(n, C) matrix kernel.

Brackets, the Killing form (ad-trace definition plus the 2n*tr shortcut),
matrix exponentials, adjoint actions, spectral projectors of ad(h) built
from a Bezout identity, and conjugacy invariants of matrix tuples under
simultaneous conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct

import numpy as np
import scipy.linalg

from .errors import (
    ExpOverflow,
    NonSemisimple,
    SingularElement,
    SizeMismatch,
    ValidationError,
)

TOL_TRACE = 1e-9
TOL_DET = 1e-9

# ---------------------------------------------------------------------------
# element constructors (validated plain ndarrays)
# ---------------------------------------------------------------------------


def algebra_element(mat, tol: float = TOL_TRACE) -> np.ndarray:
    """Validate an sl(n) element: square, finite, traceless within tol."""
    X = np.array(mat, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] < 2:
        raise ValidationError(f"expected a square matrix of size >= 2, got shape {X.shape}")
    if not np.all(np.isfinite(X.view(float))):
        raise ValidationError("non-finite entries in algebra element")
    if abs(np.trace(X)) > tol:
        raise ValidationError(f"matrix is not traceless: |trace| = {abs(np.trace(X)):.3e}")
    return X


def group_element(mat, tol: float = TOL_DET) -> np.ndarray:
    """Validate an SL(n) element: square, finite, det within tol of 1."""
    g = np.array(mat, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 2:
        raise ValidationError(f"expected a square matrix of size >= 2, got shape {g.shape}")
    if not np.all(np.isfinite(g.view(float))):
        raise ValidationError("non-finite entries in group element")
    d = np.linalg.det(g)
    if abs(d - 1.0) > tol:
        raise ValidationError(f"determinant is not 1: |det - 1| = {abs(d - 1.0):.3e}")
    return g


def _check_same_size(X, Y):
    if X.shape != Y.shape:
        raise SizeMismatch(f"size mismatch: {X.shape} vs {Y.shape}")


# ---------------------------------------------------------------------------
# bracket and Killing form
# ---------------------------------------------------------------------------


def bracket(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    _check_same_size(X, Y)
    return X @ Y - Y @ X


@lru_cache(maxsize=None)
def sl_basis(n: int) -> np.ndarray:
    """Fixed basis of sl(n): H_i = E_ii - E_{i+1,i+1}, then E_ij (i != j)
    in row-major order.  Shape (n^2 - 1, n, n)."""
    mats = []
    for i in range(n - 1):
        H = np.zeros((n, n), dtype=complex)
        H[i, i] = 1.0
        H[i + 1, i + 1] = -1.0
        mats.append(H)
    for i in range(n):
        for j in range(n):
            if i != j:
                E = np.zeros((n, n), dtype=complex)
                E[i, j] = 1.0
                mats.append(E)
    return np.array(mats)


@lru_cache(maxsize=None)
def _basis_pinv(n: int) -> np.ndarray:
    B = sl_basis(n).reshape(n * n - 1, n * n)
    return np.linalg.pinv(B.T)


def coordinates(X: np.ndarray) -> np.ndarray:
    """Coordinates of a traceless matrix in the fixed sl(n) basis."""
    n = X.shape[0]
    return _basis_pinv(n) @ X.reshape(n * n)


def ad_matrix(h: np.ndarray) -> np.ndarray:
    """ad(h) as a (n^2-1) x (n^2-1) matrix in the fixed basis."""
    n = h.shape[0]
    B = sl_basis(n)
    cols = [coordinates(h @ b - b @ h) for b in B]
    return np.array(cols).T


def killing_form_adtrace(X: np.ndarray, Y: np.ndarray) -> complex:
    """kappa(X, Y) = tr(ad X o ad Y) in the fixed basis.  The canonical
    definition; used as the oracle for the fast path."""
    _check_same_size(X, Y)
    return complex(np.trace(ad_matrix(X) @ ad_matrix(Y)))


def killing_form(X: np.ndarray, Y: np.ndarray) -> complex:
    """kappa(X, Y) for sl(n), evaluated as 2n * tr(XY).

    Agrees with the ad-trace definition; that identity is asserted in the
    test suite rather than here."""
    _check_same_size(X, Y)
    return complex(2 * X.shape[0] * np.trace(X @ Y))


# ---------------------------------------------------------------------------
# exponential and adjoint
# ---------------------------------------------------------------------------

_EXP_NORM_LIMIT = 500.0  # exp of larger norms overflows double precision


def group_exp(X: np.ndarray, tol: float = TOL_DET) -> np.ndarray:
    """Matrix exponential (scipy's scaling-and-squaring Pade kernel) with an
    overflow guard and a det ~ exp(trace) consistency check."""
    nrm = np.linalg.norm(X, 2)
    if not np.isfinite(nrm) or nrm > _EXP_NORM_LIMIT:
        raise ExpOverflow(f"matrix norm {nrm:.3e} too large for exp")
    g = scipy.linalg.expm(X)
    if not np.all(np.isfinite(g.view(float))):
        raise ExpOverflow("overflow in matrix exponential")
    expected = np.exp(np.trace(X))
    if abs(np.linalg.det(g) - expected) > tol * max(1.0, abs(expected)):
        raise ExpOverflow("det(exp X) deviates from exp(trace X)")
    return g


def _sinhc(s: complex) -> complex:
    if abs(s) < 1e-4:
        s2 = s * s
        return 1.0 + s2 / 6.0 + s2 * s2 / 120.0
    return np.sinh(s) / s


def fast_exp(X: np.ndarray) -> np.ndarray:
    """exp for traceless matrices; closed form for 2x2 (X^2 = s^2 I),
    scipy for larger sizes.  Hot path of the transport integrator."""
    if X.shape[0] == 2:
        s2 = X[0, 0] * X[0, 0] + X[0, 1] * X[1, 0]
        s = np.sqrt(s2)
        return np.cosh(s) * np.eye(2) + _sinhc(s) * X
    return scipy.linalg.expm(X)


def fast_inv(g: np.ndarray) -> np.ndarray:
    """Inverse, with the adjugate shortcut for 2x2 unimodular matrices."""
    if g.shape[0] == 2:
        d = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / d
    return np.linalg.inv(g)


def adjoint(g: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Ad(g) X = g X g^{-1}, with a condition-number guard on g."""
    _check_same_size(g, X)
    if np.linalg.cond(g) > 1e12:
        raise SingularElement("group element is numerically singular")
    return g @ X @ np.linalg.inv(g)


# ---------------------------------------------------------------------------
# spectral projectors of ad(h)
# ---------------------------------------------------------------------------


def _cluster_eigenvalues(eigs: np.ndarray, sep: float) -> list[complex]:
    """Merge eigenvalues closer than sep; returns cluster means sorted by
    (re, im)."""
    order = np.lexsort((eigs.imag, eigs.real))
    clusters: list[list[complex]] = []
    for lam in eigs[order]:
        for cl in clusters:
            if abs(lam - np.mean(cl)) < sep:
                cl.append(lam)
                break
        else:
            clusters.append([lam])
    means = [complex(np.mean(cl)) for cl in clusters]
    return sorted(means, key=lambda w: (w.real, w.imag))


def cartan_projectors(h: np.ndarray, sep_factor: float = 1e-6):
    """Spectral projectors of ad(h) acting on sl(n), one per distinct
    eigenvalue.

    Writing the square-free minimal polynomial of ad(h) as the product of
    (X - lambda_i) and Q_i for the product with the i-th factor removed, a
    Bezout identity sum(R_i Q_i) = 1 holds with constant R_i = 1/Q_i(lambda_i),
    and the projector onto ker(ad(h) - lambda_i) is R_i Q_i(ad(h)).

    Returns a list of (eigenvalue, projector) pairs; projectors are
    (n^2-1) x (n^2-1) matrices in the fixed basis.
    """
    A = ad_matrix(algebra_element(h))
    dim = A.shape[0]
    norm = np.linalg.norm(A, 2)
    if norm < 1e-14:
        return [(0.0 + 0.0j, np.eye(dim, dtype=complex))]
    eigs = np.linalg.eigvals(A)
    lams = _cluster_eigenvalues(eigs, sep_factor * norm)

    # square-free minimal polynomial check: prod (A - lam_i) must vanish
    P = np.eye(dim, dtype=complex)
    for lam in lams:
        P = P @ (A - lam * np.eye(dim))
    if np.linalg.norm(P, 2) > 1e-8 * max(1.0, norm) ** len(lams):
        raise NonSemisimple(
            "ad(h) is not diagonalizable within tolerance (clustered or defective spectrum)"
        )

    out = []
    for lam in lams:
        Q = np.eye(dim, dtype=complex)
        denom = 1.0 + 0.0j
        for mu in lams:
            if mu is lam:
                continue
            Q = Q @ (A - mu * np.eye(dim))
            denom *= lam - mu
        out.append((lam, Q / denom))
    return out


def apply_projector(p: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Apply a basis-space projector to a traceless matrix."""
    n = X.shape[0]
    coeffs = p @ coordinates(X)
    return np.tensordot(coeffs, sl_basis(n), axes=(0, 0))


# ---------------------------------------------------------------------------
# conjugacy invariants of tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyInvariants:
    """Trace-word data of a matrix tuple: traces of all products indexed by
    words of length <= word_len (empty word included, trace = n), plus the
    characteristic polynomial coefficients of each member."""

    size: int
    word_len: int
    word_traces: dict
    char_polys: tuple

    def max_difference(self, other: "ConjugacyInvariants") -> float:
        if self.size != other.size or self.word_len != other.word_len:
            raise SizeMismatch("invariants computed at different sizes or word lengths")
        if set(self.word_traces) != set(other.word_traces):
            raise SizeMismatch("invariants computed over different word sets")
        d = max(
            abs(self.word_traces[w] - other.word_traces[w]) for w in self.word_traces
        )
        for ca, cb in zip(self.char_polys, other.char_polys):
            d = max(d, max(abs(x - y) for x, y in zip(ca, cb)))
        return d


def trace_word_invariants(mats, word_len: int) -> ConjugacyInvariants:
    """Traces of all words of length <= word_len in the tuple members."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise ValidationError("empty tuple")
    if word_len < 1:
        raise ValidationError("word length must be >= 1")
    n = mats[0].shape[0]
    for m in mats:
        _check_same_size(mats[0], m)
    traces = {(): complex(n)}
    prev = {(): np.eye(n, dtype=complex)}
    for _ in range(word_len):
        cur = {}
        for w, P in prev.items():
            for i, M in enumerate(mats):
                word = w + (i,)
                prod = P @ M
                cur[word] = prod
                traces[word] = complex(np.trace(prod))
        prev = cur
    char_polys = tuple(tuple(np.poly(m).astype(complex)) for m in mats)
    return ConjugacyInvariants(size=n, word_len=word_len, word_traces=traces, char_polys=char_polys)


def matrix_algebra_dimension(mats, max_word_len: int | None = None) -> int:
    """Dimension of the unital algebra generated by the tuple, grown by
    breadth-first products (Burnside saturation: words up to twice the
    matrix-algebra dimension suffice)."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    n = mats[0].shape[0]
    full = n * n
    limit = max_word_len if max_word_len is not None else 2 * full
    basis: list[np.ndarray] = []

    def try_add(M):
        v = M.reshape(-1).copy()
        for b in basis:
            v -= (np.vdot(b, v)) * b
        nv = np.linalg.norm(v)
        if nv > 1e-10 * max(1.0, np.linalg.norm(M)):
            basis.append(v / nv)
            return True
        return False

    frontier = [np.eye(n, dtype=complex)]
    try_add(frontier[0])
    length = 0
    while frontier and len(basis) < full and length < limit:
        nxt = []
        for F in frontier:
            for M in mats:
                C = F @ M
                if try_add(C):
                    nxt.append(C)
        frontier = nxt
        length += 1
    return len(basis)


def is_generic_tuple(mats) -> bool:
    """True when the word matrices span the full matrix algebra."""
    n = np.asarray(mats[0]).shape[0]
    return matrix_algebra_dimension(mats) == n * n


def simultaneous_conjugacy_test(A, B, tol: float, word_len: int | None = None) -> str:
    """Verdict on simultaneous conjugacy of two matrix tuples.

    'distinct' when some word trace or characteristic-polynomial coefficient
    differs by more than tol; 'equivalent' when all agree and both tuples are
    generic (span the full matrix algebra); 'indeterminate' otherwise.
    Word length defaults to n^2, which covers the trace-ring generating
    bound for n <= 3.
    """
    A = [np.asarray(m, dtype=complex) for m in A]
    B = [np.asarray(m, dtype=complex) for m in B]
    if len(A) != len(B):
        raise SizeMismatch("tuples have different lengths")
    n = A[0].shape[0]
    for m in list(A) + list(B):
        if m.shape != (n, n):
            raise SizeMismatch("tuples contain matrices of different sizes")
    L = word_len if word_len is not None else n * n
    inv_a = trace_word_invariants(A, L)
    inv_b = trace_word_invariants(B, L)
    if inv_a.max_difference(inv_b) > tol:
        return "distinct"
    if is_generic_tuple(A) and is_generic_tuple(B):
        return "equivalent"
    return "indeterminate"


def conjugate_tuple(g: np.ndarray, mats) -> list[np.ndarray]:
    gi = np.linalg.inv(g)
    return [g @ m @ gi for m in mats]
