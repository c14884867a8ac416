"""Gauss cubature on the parabolic biangle.

The domain is the image of the square [-1,1]^2 under the symmetric map
(x1,x2) -> (x1+x2, x1*x2); it is bounded above by the parabola
u1^2 = 4 u2 and below by the two lines u2 = u1 - 1 and u2 = -u1 - 1.
Integrals against the mapped product weight are normalized with a factor
one half so that the covering is counted once:

    I[f] = (1/2) * integral over the square of
           f(x1+x2, x1*x2) w(x1) w(x2) |x1-x2|^(2*gamma+1) dx1 dx2.

For gamma = -1/2 and gamma = +1/2 the rules below are Gauss rules: they
integrate every polynomial of total degree 2n-1 in (u1,u2) exactly with
n(n+1)/2 positive-weight nodes inside the closed domain.
"""

from __future__ import annotations

import numpy as np

from .opq1d import (
    RecurrenceCoeffs,
    eval_orthonormal,
    eval_orthonormal_deriv,
    gauss_rule,
)
from .rules import CubatureRule2D, WeightSpec

__all__ = [
    "map_x_to_u",
    "split_u_to_x",
    "in_omega",
    "eval_koornwinder",
    "gauss_cubature_biangle",
    "biangle_moment",
]


def map_x_to_u(x1, x2):
    """Symmetric-function coordinates (x1+x2, x1*x2)."""
    return np.asarray(x1) + np.asarray(x2), np.asarray(x1) * np.asarray(x2)


def in_omega(u1, u2, tol: float = 0.0) -> np.ndarray:
    """Membership test for the closed domain, with optional slack tol."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    above = u1 * u1 - 4.0 * u2 >= -tol
    below = 1.0 + u2 - np.abs(u1) >= -tol
    return above & below


def split_u_to_x(u1, u2):
    """Recover the unordered root pair {x1, x2} of z^2 - u1 z + u2.

    The larger-magnitude root is taken from the quadratic formula and the
    other from the product, avoiding cancellation.  Points outside the
    domain (negative discriminant) produce a ValueError.
    """
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    disc = u1 * u1 - 4.0 * u2
    if np.any(disc < -1e-13 * np.maximum(1.0, u1 * u1)):
        raise ValueError("point below the parabolic arc has complex roots")
    s = np.sqrt(np.maximum(disc, 0.0))
    big = np.where(u1 >= 0.0, 0.5 * (u1 + s), 0.5 * (u1 - s))
    with np.errstate(divide="ignore", invalid="ignore"):
        other = np.where(big != 0.0, u2 / np.where(big != 0.0, big, 1.0), 0.0)
    return big, other


def eval_koornwinder(
    rc: RecurrenceCoeffs, n: int, k: int, gamma: float, p
) -> np.ndarray:
    """Orthonormal bivariate basis element of degree n, index 0 <= k <= n,
    at points p with columns (u1, u2).

    gamma = -1/2: symmetrized products of the 1-D orthonormal family.
    gamma = +1/2: divided differences of order-(n+1) products; on the
    parabolic arc (coincident roots) the quotient is replaced by its
    derivative limit.
    """
    if not 0 <= k <= n:
        raise ValueError("index k must satisfy 0 <= k <= n")
    pts = np.atleast_2d(np.asarray(p, dtype=float))
    x1, x2 = split_u_to_x(pts[:, 0], pts[:, 1])
    if gamma == -0.5:
        pn1 = eval_orthonormal(rc, n, x1)
        pk1 = eval_orthonormal(rc, k, x1)
        pn2 = eval_orthonormal(rc, n, x2)
        pk2 = eval_orthonormal(rc, k, x2)
        if k == n:
            return np.sqrt(2.0) * pn1 * pn2
        return pn1 * pk2 + pn2 * pk1
    if gamma == 0.5:
        diff = x1 - x2
        out = np.empty_like(diff)
        near = np.abs(diff) ** 2 < 1e-10
        far = ~near
        if np.any(far):
            a1 = eval_orthonormal(rc, n + 1, x1[far])
            b2 = eval_orthonormal(rc, k, x2[far])
            a2 = eval_orthonormal(rc, n + 1, x2[far])
            b1 = eval_orthonormal(rc, k, x1[far])
            out[far] = (a1 * b2 - a2 * b1) / diff[far]
        if np.any(near):
            xm = 0.5 * (x1[near] + x2[near])
            pn, dn = eval_orthonormal_deriv(rc, n + 1, xm)
            pk, dk = eval_orthonormal_deriv(rc, k, xm)
            out[near] = dn * pk - pn * dk
        return out
    raise ValueError("gamma restricted to -1/2 and +1/2")


def gauss_cubature_biangle(
    rc: RecurrenceCoeffs, n: int, gamma: float
) -> CubatureRule2D:
    """Gauss cubature of degree 2n-1 with n(n+1)/2 nodes.

    gamma = -1/2: nodes are the symmetric images of unordered pairs of the
    n-point Gauss abscissae; a pair taken twice lands on the parabolic arc
    and carries half the product weight.
    gamma = +1/2: strict pairs of the (n+1)-point Gauss abscissae; the
    squared node gap absorbs the |x1-x2|^2 weight factor.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    spec = WeightSpec("biangle-gamma", rc=rc, gamma=gamma)
    if gamma == -0.5:
        q = gauss_rule(rc, n)
        t, lam = q.nodes, q.weights
        nodes = []
        weights = []
        for jj in range(n):
            for kk in range(jj, n):
                u1 = t[jj] + t[kk]
                u2 = t[jj] * t[kk]
                if kk == jj:
                    nodes.append((u1, u2))
                    weights.append(0.5 * lam[jj] * lam[jj])
                else:
                    nodes.append((u1, u2))
                    weights.append(lam[jj] * lam[kk])
    elif gamma == 0.5:
        q = gauss_rule(rc, n + 1)
        t, lam = q.nodes, q.weights
        nodes = []
        weights = []
        for jj in range(n + 1):
            for kk in range(jj + 1, n + 1):
                nodes.append((t[jj] + t[kk], t[jj] * t[kk]))
                weights.append(lam[jj] * lam[kk] * (t[jj] - t[kk]) ** 2)
    else:
        raise ValueError("gamma restricted to -1/2 and +1/2")
    return CubatureRule2D(
        nodes=np.array(nodes, dtype=float),
        weights=np.array(weights, dtype=float),
        degree=2 * n - 1,
        domain="biangle",
        spec=spec,
        param=n,
        family="biangle",
    ).sorted_rule()


def biangle_moment(rc: RecurrenceCoeffs, gamma: float, a: int, b: int) -> float:
    """Reference moment of u1^a u2^b, by exact tensor Gauss quadrature.

    The pulled-back integrand is a polynomial of per-variable degree at
    most a+b (+2 when gamma = +1/2), so a fixed-size Gauss rule computes
    the moment to machine accuracy with no convergence ladder.
    """
    if a < 0 or b < 0:
        raise ValueError("exponents must be nonnegative")
    if gamma not in (-0.5, 0.5):
        raise ValueError("gamma restricted to -1/2 and +1/2")
    # structural zeros for an even 1-D weight: odd a dies by reflecting
    # both coordinates; a = 0 with odd b and no coupling factor leaves
    # the lone separable term mu_b^2 with an odd 1-D moment
    if np.all(rc.a == 0.0) and (
        a % 2 == 1 or (gamma == -0.5 and a == 0 and b % 2 == 1)
    ):
        return 0.0
    npts = (a + b) // 2 + 2
    q = gauss_rule(rc, npts)
    t, lam = q.nodes, q.weights
    X1, X2 = np.meshgrid(t, t, indexing="ij")
    vals = (X1 + X2) ** a * (X1 * X2) ** b
    if gamma == 0.5:
        vals = vals * (X1 - X2) ** 2
    return 0.5 * float(lam @ vals @ lam)
