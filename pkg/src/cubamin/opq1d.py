"""One-dimensional orthogonal polynomials and Gauss quadrature.

Monic three-term recurrences for Jacobi weights, orthonormal evaluation,
classically normalized Jacobi polynomials, Gauss rules via an in-house
Golub-Welsch (implicit-shift QL on the symmetrized tridiagonal matrix),
and the even quasi-orthogonal combinations whose zeros supply the
diagonal / anti-diagonal nodes of the odd-degree minimal square rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RecurrenceCoeffs",
    "QuadratureRule1D",
    "jacobi_recurrence",
    "eval_orthonormal",
    "eval_orthonormal_deriv",
    "eval_jacobi_standard",
    "eval_jacobi_standard_deriv",
    "gauss_rule",
    "quasi_S",
    "diagonal_zero_set",
    "EigensolverError",
    "ZeroCountError",
]


class EigensolverError(RuntimeError):
    """QL iteration failed to converge; no partial rule is returned."""


class ZeroCountError(RuntimeError):
    """A zero set did not have the expected number of elements."""


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Monic three-term recurrence data p_{k+1} = (t - a_k) p_k - b_k p_{k-1}.

    a holds a_0..a_{m-1}; b holds b_1..b_{m-1} (all positive); mu0 is the
    zeroth moment of the weight.
    """

    a: np.ndarray
    b: np.ndarray
    mu0: float

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        if self.mu0 <= 0.0:
            raise ValueError("mu0 must be positive")
        if np.any(self.b <= 0.0):
            raise ValueError("all off-diagonal coefficients b_k must be positive")

    @property
    def size(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class QuadratureRule1D:
    """Gauss rule: strictly increasing nodes in (-1,1), positive weights."""

    nodes: np.ndarray
    weights: np.ndarray
    m: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def jacobi_recurrence(alpha: float, beta: float, m: int) -> RecurrenceCoeffs:
    """Monic recurrence coefficients for the weight (1-t)^alpha (1+t)^beta.

    Returns a_0..a_{m-1} and b_1..b_{m-1}, plus mu0 = 2^{alpha+beta+1}
    B(alpha+1, beta+1).
    """
    if alpha <= -1.0 or beta <= -1.0:
        raise ValueError("Jacobi parameters must exceed -1")
    if m < 1:
        raise ValueError("m must be >= 1")
    s = alpha + beta
    a = np.empty(m)
    a[0] = (beta - alpha) / (s + 2.0)
    for k in range(1, m):
        den = (2.0 * k + s) * (2.0 * k + 2.0 + s)
        a[k] = (beta * beta - alpha * alpha) / den
    b = np.empty(max(m - 1, 0))
    if m > 1:
        b[0] = (
            4.0 * (1.0 + alpha) * (1.0 + beta)
            / ((2.0 + s) ** 2 * (3.0 + s))
        )
    for k in range(2, m):
        b[k - 1] = (
            4.0 * k * (k + alpha) * (k + beta) * (k + s)
            / ((2.0 * k + s) ** 2 * (2.0 * k + 1.0 + s) * (2.0 * k - 1.0 + s))
        )
    lg = (
        (s + 1.0) * math.log(2.0)
        + math.lgamma(alpha + 1.0)
        + math.lgamma(beta + 1.0)
        - math.lgamma(s + 2.0)
    )
    return RecurrenceCoeffs(a=a, b=b, mu0=math.exp(lg))


def eval_orthonormal(rc: RecurrenceCoeffs, n: int, t):
    """Value of the orthonormal polynomial p_n at t (scalar or array)."""
    return _orthonormal_series(rc, n, t)[0]


def eval_orthonormal_deriv(rc: RecurrenceCoeffs, n: int, t):
    """(p_n(t), p_n'(t)) via the differentiated recurrence."""
    return _orthonormal_series(rc, n, t, want_deriv=True)


def _orthonormal_series(rc: RecurrenceCoeffs, n: int, t, want_deriv: bool = False):
    if n < 0:
        raise ValueError("degree must be >= 0")
    # p_n needs a_0..a_{n-1} and b_1..b_n
    if n > rc.size or (n >= 1 and n - 1 > len(rc.b)):
        raise ValueError("insufficient recurrence coefficients for degree %d" % n)
    t = np.asarray(t, dtype=float)
    p_prev = np.zeros_like(t)
    p = np.full_like(t, 1.0 / math.sqrt(rc.mu0))
    d_prev = np.zeros_like(t)
    d = np.zeros_like(t)
    for k in range(n):
        sb_next = math.sqrt(rc.b[k]) if k < len(rc.b) else None
        if sb_next is None:
            raise ValueError("insufficient recurrence coefficients")
        sb = math.sqrt(rc.b[k - 1]) if k >= 1 else 0.0
        p_next = ((t - rc.a[k]) * p - sb * p_prev) / sb_next
        if want_deriv:
            d_next = (p + (t - rc.a[k]) * d - sb * d_prev) / sb_next
            d_prev, d = d, d_next
        p_prev, p = p, p_next
    if want_deriv:
        return p, d
    return p, None


def eval_jacobi_standard(alpha: float, beta: float, n: int, t):
    """Jacobi polynomial with P_n^{(alpha,beta)}(1) = binom(n+alpha, n)."""
    if alpha <= -1.0 or beta <= -1.0:
        raise ValueError("Jacobi parameters must exceed -1")
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.ones_like(t)
    p1 = (alpha + beta + 2.0) * t / 2.0 + (alpha - beta) / 2.0
    if n == 1:
        return p1
    pkm1 = np.ones_like(t)
    pk = p1
    s = alpha + beta
    for k in range(2, n + 1):
        c1 = 2.0 * k * (k + s) * (2.0 * k + s - 2.0)
        c2 = 2.0 * k + s - 1.0
        c3 = (2.0 * k + s) * (2.0 * k + s - 2.0)
        c4 = alpha * alpha - beta * beta
        c5 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + s)
        pnext = (c2 * (c3 * t + c4) * pk - c5 * pkm1) / c1
        pkm1, pk = pk, pnext
    return pk


def eval_jacobi_standard_deriv(alpha: float, beta: float, n: int, t):
    """d/dt P_n^{(alpha,beta)}(t) = (n+alpha+beta+1)/2 * P_{n-1}^{(alpha+1,beta+1)}(t)."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros_like(t)
    return (n + alpha + beta + 1.0) / 2.0 * eval_jacobi_standard(
        alpha + 1.0, beta + 1.0, n - 1, t
    )


def _ql_implicit(d: np.ndarray, e: np.ndarray, max_iter_total: int):
    """Eigenvalues and first-row eigenvector components of a symmetric
    tridiagonal matrix (diagonal d, off-diagonal e), by implicit-shift QL.

    Only the first component of each eigenvector is carried, which is all
    Golub-Welsch needs. Convergence test: |e_l| <= 1e-15 (|d_l| + |d_l+1|).
    """
    n = len(d)
    d = d.copy()
    e = np.append(e.copy(), 0.0)
    q = np.zeros(n)
    q[0] = 1.0
    tol = 1e-15
    iters = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            iters += 1
            if iters > max_iter_total:
                raise EigensolverError(
                    "QL iteration exceeded %d sweeps" % max_iter_total
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            sgn = r if g >= 0.0 else -r
            g = d[m] - d[l] + e[l] / (g + sgn)
            s = 1.0
            c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = q[i + 1]
                q[i + 1] = s * q[i] + c * f
                q[i] = c * q[i] - s * f
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return d, q


def gauss_rule(rc: RecurrenceCoeffs, m: int) -> QuadratureRule1D:
    """m-point Gauss rule for the measure behind rc (Golub-Welsch)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if rc.size < m or len(rc.b) < m - 1:
        raise ValueError("recurrence data does not cover m = %d" % m)
    if m == 1:
        return QuadratureRule1D(
            nodes=np.array([rc.a[0]]), weights=np.array([rc.mu0]), m=1
        )
    d = rc.a[:m].copy()
    e = np.sqrt(rc.b[: m - 1])
    vals, q = _ql_implicit(d, e, max_iter_total=50 * m)
    order = np.argsort(vals)
    nodes = vals[order]
    weights = rc.mu0 * q[order] ** 2
    if np.all(rc.a[:m] == 0.0):
        # even measure: enforce the +-pair symmetry bit for bit, so that
        # structurally zero sums built on these nodes cancel exactly
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    if np.any(weights <= 0.0):
        raise EigensolverError("nonpositive Gauss weight; eigensolve unreliable")
    if np.any(np.diff(nodes) <= 0.0):
        raise EigensolverError("Gauss nodes not strictly increasing")
    return QuadratureRule1D(nodes=nodes, weights=weights, m=m)


def quasi_S(alpha: float, beta: float, m: int, sign: str, t):
    """Even degree-2m combination of shifted Jacobi polynomials in 2t^2-1.

    sign '-' is the difference P_m^{(a,b+1)}(1) P_m^{(a+1,b)}(2t^2-1)
    - P_m^{(a,b+1)}(2t^2-1) P_m^{(a+1,b)}(1), which vanishes at t = +-1;
    sign '+' is the corresponding sum.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    t = np.asarray(t, dtype=float)
    s = 2.0 * t * t - 1.0
    c_b1 = float(eval_jacobi_standard(alpha, beta + 1.0, m, np.array(1.0)))
    c_a1 = float(eval_jacobi_standard(alpha + 1.0, beta, m, np.array(1.0)))
    term1 = c_b1 * eval_jacobi_standard(alpha + 1.0, beta, m, s)
    term2 = eval_jacobi_standard(alpha, beta + 1.0, m, s) * c_a1
    return term1 - term2 if sign == "-" else term1 + term2


def _quasi_S_deriv(alpha: float, beta: float, m: int, sign: str, t):
    t = np.asarray(t, dtype=float)
    s = 2.0 * t * t - 1.0
    c_b1 = float(eval_jacobi_standard(alpha, beta + 1.0, m, np.array(1.0)))
    c_a1 = float(eval_jacobi_standard(alpha + 1.0, beta, m, np.array(1.0)))
    d1 = c_b1 * eval_jacobi_standard_deriv(alpha + 1.0, beta, m, s)
    d2 = eval_jacobi_standard_deriv(alpha, beta + 1.0, m, s) * c_a1
    inner = d1 - d2 if sign == "-" else d1 + d2
    return inner * 4.0 * t


def _refine_zero(f, fprime, lo: float, hi: float) -> float:
    """Bisection to width 1e-14 followed by 3 Newton polish steps."""
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-14:
            break
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (flo < 0.0) == (fm < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):
        fp = fprime(x)
        if fp == 0.0:
            break
        step = f(x) / fp
        if not math.isfinite(step):
            break
        xn = x - step
        if abs(xn - x) > (hi - lo) + 1e-12:
            break
        x = xn
    return x


def _positive_zeros(f, fprime, m_expected: int, grid_n: int) -> np.ndarray:
    """Zeros of an even function on (0,1), by sign bracketing on a grid."""
    ts = np.linspace(0.0, 1.0, grid_n + 1)
    vals = np.asarray(f(ts), dtype=float)
    zeros = []
    for i in range(len(ts) - 1):
        lo, hi = ts[i], ts[i + 1]
        vlo, vhi = vals[i], vals[i + 1]
        if vlo == 0.0 and lo > 0.0:
            zeros.append(lo)
            continue
        if (vlo < 0.0) != (vhi < 0.0):
            z = _refine_zero(lambda x: float(f(x)), lambda x: float(fprime(x)), lo, hi)
            if 0.0 < z < 1.0:
                zeros.append(z)
    zeros = sorted(set(round(z, 15) for z in zeros))
    if len(zeros) != m_expected:
        raise ZeroCountError(
            "expected %d positive zeros, found %d" % (m_expected, len(zeros))
        )
    return np.array(zeros)


def diagonal_zero_set(alpha: float, beta: float, m: int, sign: str) -> np.ndarray:
    """Sorted 2m+1 abscissas feeding the odd-degree minimal square rules.

    sign '-': diagonal abscissas xi (nodes (xi, xi)); the zeros of
    t * [P_m^{(a,b+1)}(1) P_m^{(a+1,b)}(2t^2-1) + P_m^{(a,b+1)}(2t^2-1)
    P_m^{(a+1,b)}(1)], all interior.

    sign '+': anti-diagonal abscissas eta (nodes (eta, -eta)); {0} plus the
    interior zeros of D(t)/(1-t^2) where D is the order-(m+1) difference
    combination with (alpha, beta) swapped; the forced zeros of D at t = +-1
    are excluded.

    Raises ZeroCountError when the count is not exactly 2m+1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if sign == "-":
        f = lambda t: quasi_S(alpha, beta, m, "+", t)
        fp = lambda t: _quasi_S_deriv(alpha, beta, m, "+", t)
        pos = _positive_zeros(f, fp, m, 64 * m)
    elif sign == "+":
        bs, as_ = beta, alpha  # swapped roles

        def d_poly(t):
            return quasi_S(bs, as_, m + 1, "-", t)

        def d_poly_deriv(t):
            return _quasi_S_deriv(bs, as_, m + 1, "-", t)

        def g(t):
            t = np.asarray(t, dtype=float)
            den = 1.0 - t * t
            out = np.empty_like(t)
            near = den < 1e-8
            if np.any(~near):
                out[~near] = np.asarray(d_poly(t[~near])) / den[~near]
            if np.any(near):
                # L'Hopital at t -> 1: D(t)/(1-t^2) -> -D'(1)/2
                out[near] = -np.asarray(d_poly_deriv(t[near])) / (2.0 * t[near])
            return out

        def gprime(t):
            h = 1e-7
            return (g(t + h) - g(t - h)) / (2.0 * h)

        pos = _positive_zeros(g, gprime, m, 64 * (m + 1))
    else:
        raise ValueError("sign must be '+' or '-'")
    if np.any(pos >= 1.0) or np.any(pos <= 0.0):
        raise ZeroCountError("zero escaped the open interval (0, 1)")
    return np.concatenate([-pos[::-1], [0.0], pos])
