"""Minimal cubature rules on [-1,1]^2 attaining the lower node bound.

Weight family on the square:

    W(x1, x2) = |x1-x2|^(2a+1) |x1+x2|^(2b+1) (1-x1^2)^g (1-x2^2)^g

with Jacobi parameters a, b > -1 and g = +-1/2.  Even degrees 4m-1 admit
fully explicit rules built from 1-D Gauss nodes in half-angle pairs; odd
degrees 4m+1 add points on the diagonal (g = -1/2) or anti-diagonal
(g = +1/2), with weights recovered from a symmetry-reduced moment system.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np

from . import oracle as _oracle
from .opq1d import (
    RecurrenceCoeffs,
    diagonal_zero_set,
    eval_orthonormal,
    eval_orthonormal_deriv,
    gauss_rule,
    jacobi_recurrence,
)
from .rules import ConstructionError, CubatureRule2D, WeightSpec

__all__ = [
    "moller_bound",
    "weight_W",
    "minimal_rule_even",
    "minimal_rule_odd",
    "eval_Q_basis",
    "fold_to_biangle",
    "half_angle_orbit",
    "merge_close_nodes",
]


def moller_bound(n: int) -> int:
    """Lower bound on the node count of a degree 2n-1 cubature rule for a
    centrally symmetric weight on the square."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * (n + 1) // 2 + n // 2


def _pow_with_sentinel(base: np.ndarray, expo: float) -> np.ndarray:
    """base**expo with the convention 0**0 = 1, 0**negative = +inf."""
    base = np.asarray(base, dtype=float)
    if expo == 0.0:
        return np.ones_like(base)
    with np.errstate(divide="ignore"):
        out = np.where(base > 0.0, base, 1.0) ** expo
        out = np.where(base > 0.0, out, 0.0 if expo > 0.0 else np.inf)
    return out


def weight_W(spec: WeightSpec, x1, x2):
    """Pointwise weight value for a square-family spec.

    Zero-exponent factors are 1 even on their vanishing line; negative
    exponents produce an inf sentinel there instead of raising.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(np.abs(x1) > 1.0) or np.any(np.abs(x2) > 1.0):
        raise ValueError("points must lie in [-1,1]^2")
    a, b, g = spec.alpha, spec.beta, spec.gamma
    if spec.family == "square-W":
        y1, y2 = x1, x2
    elif spec.family == "square-W-ell":
        ell = spec.ell
        y1 = np.cos(ell * np.arccos(x1))
        y2 = np.cos(ell * np.arccos(x2))
    else:
        raise ValueError("weight_W needs a square-family spec")
    out = _pow_with_sentinel(np.abs(y1 - y2), 2.0 * a + 1.0)
    out = out * _pow_with_sentinel(np.abs(y1 + y2), 2.0 * b + 1.0)
    out = out * _pow_with_sentinel(1.0 - x1 * x1, g)
    out = out * _pow_with_sentinel(1.0 - x2 * x2, g)
    return out


def half_angle_orbit(c_j: float, c_k: float) -> List[Tuple[float, float]]:
    """The four sign-and-swap images of the half-angle point.

    Takes the plain cosines c = cos(theta) and forms
    s = cos((theta_j - theta_k)/2), t = cos((theta_j + theta_k)/2)
    through s + t = sqrt((1+c_j)(1+c_k)), s - t = sqrt((1-c_j)(1-c_k)).
    The algebraic route keeps the structural cases exact: c_j == c_k
    gives the boundary orbit (1, c_j), and c_k == -c_j gives t == 0.0
    bit for bit, which downstream zero-sum cancellations rely on.
    """
    if c_j == c_k:
        s, t = 1.0, c_j
    else:
        p = math.sqrt((1.0 + c_j) * (1.0 + c_k))
        q = math.sqrt((1.0 - c_j) * (1.0 - c_k))
        s = 0.5 * (p + q)
        t = 0.5 * (p - q)
    return [(s, t), (t, s), (-s, -t), (-t, -s)]


def merge_close_nodes(
    points: Sequence[Tuple[float, float]],
    weights: Sequence[float],
    tol: float = 1e-12,
) -> Tuple[np.ndarray, np.ndarray]:
    """Sum weights of coordinate-coincident points (within tol per axis)."""
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts, wts = pts[order], wts[order]
    keep_pts: List[np.ndarray] = []
    keep_wts: List[float] = []
    for p, w in zip(pts, wts):
        if keep_pts and abs(p[0] - keep_pts[-1][0]) <= tol and abs(
            p[1] - keep_pts[-1][1]
        ) <= tol:
            keep_wts[-1] += w
        else:
            keep_pts.append(p)
            keep_wts.append(w)
    return np.array(keep_pts), np.array(keep_wts)


def _spec_recurrence(spec: WeightSpec, size: int) -> RecurrenceCoeffs:
    if spec.rc is not None and spec.rc.size >= size:
        return spec.rc
    if spec.alpha is None:
        raise ValueError("spec carries neither Jacobi parameters nor a large enough recurrence")
    return jacobi_recurrence(spec.alpha, spec.beta, size)


def minimal_rule_even(spec: WeightSpec, m: int) -> CubatureRule2D:
    """Minimal rule of degree 4m-1 with 2m(m+1) nodes.

    g = -1/2: half-angle orbits of all unordered pairs of the m-point
    Gauss angles, per-point weight lam_j lam_k / 2, halved again on the
    diagonal j = k (whose orbits land on the square's boundary).
    g = +1/2: strict pairs of the (m+1)-point Gauss angles, per-point
    weight lam_j lam_k (t_j - t_k)^2 / 8.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if spec.family != "square-W":
        raise ValueError("minimal_rule_even needs a square-W spec")
    g = spec.gamma
    pts: List[Tuple[float, float]] = []
    wts: List[float] = []
    if g == -0.5:
        q = gauss_rule(_spec_recurrence(spec, m), m)
        for j in range(m):
            for k in range(j, m):
                w4 = q.weights[j] * q.weights[k] / (2.0 if j != k else 4.0)
                for p in half_angle_orbit(q.nodes[j], q.nodes[k]):
                    pts.append(p)
                    wts.append(w4)
    elif g == 0.5:
        q = gauss_rule(_spec_recurrence(spec, m + 1), m + 1)
        for j in range(m + 1):
            for k in range(j + 1, m + 1):
                gap = q.nodes[j] - q.nodes[k]
                w4 = q.weights[j] * q.weights[k] * gap * gap / 8.0
                for p in half_angle_orbit(q.nodes[j], q.nodes[k]):
                    pts.append(p)
                    wts.append(w4)
    else:
        raise ValueError("gamma restricted to -1/2 and +1/2")
    nodes, weights = merge_close_nodes(pts, wts)
    expected = 2 * m * (m + 1)
    if len(nodes) != expected:
        raise ConstructionError(
            "even rule has %d nodes after merging, expected %d" % (len(nodes), expected)
        )
    return CubatureRule2D(
        nodes=nodes,
        weights=weights,
        degree=4 * m - 1,
        domain="square",
        spec=spec,
        param=m,
        family="square-even",
    ).sorted_rule()


def _symmetrized_cos_rows(
    pairs: Sequence[Tuple[int, int]], classes: Sequence[np.ndarray]
) -> np.ndarray:
    """Matrix of per-class sums of the swap-symmetrized product cosines."""
    A = np.zeros((len(pairs), len(classes)))
    th = [np.arccos(np.clip(c, -1.0, 1.0)) for c in classes]
    for r, (i, j) in enumerate(pairs):
        for c, ang in enumerate(th):
            v1 = np.cos(i * ang[:, 0]) * np.cos(j * ang[:, 1])
            if i == j:
                A[r, c] = float(np.sum(v1))
            else:
                v2 = np.cos(j * ang[:, 0]) * np.cos(i * ang[:, 1])
                A[r, c] = float(np.sum(v1 + v2))
    return A


def minimal_rule_odd(
    alpha: float, beta: float, gamma: float, m: int
) -> CubatureRule2D:
    """Minimal rule of degree 4m+1 with 2(m+1)^2 - 1 nodes.

    The off-diagonal orbits come from the zeros of a parameter-shifted
    1-D orthogonal polynomial; 2m+1 extra points sit on the diagonal
    (g = -1/2) or the anti-diagonal (g = +1/2).  Class weights solve the
    moment system over the swap-and-parity invariant subspace; the solve
    must reach residual 1e-9 relative with all weights positive, else the
    construction fails loudly.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if gamma not in (-0.5, 0.5):
        raise ValueError("gamma restricted to -1/2 and +1/2")
    spec = WeightSpec("square-W", alpha=alpha, beta=beta, gamma=gamma)

    classes: List[np.ndarray] = []
    multip: List[int] = []
    if gamma == -0.5:
        zeros = gauss_rule(jacobi_recurrence(alpha + 1.0, beta, m), m).nodes
        for j in range(m):
            for k in range(j, m):
                classes.append(np.array(half_angle_orbit(zeros[j], zeros[k])))
        xi = diagonal_zero_set(alpha, beta, m, "-")
        pos = xi[xi > 0.0]
        classes.append(np.array([[0.0, 0.0]]))
        for x in pos:
            classes.append(np.array([[x, x], [-x, -x]]))
    else:
        zeros = gauss_rule(jacobi_recurrence(alpha, beta + 1.0, m + 1), m + 1).nodes
        for j in range(m + 1):
            for k in range(j + 1, m + 1):
                classes.append(np.array(half_angle_orbit(zeros[j], zeros[k])))
        eta = diagonal_zero_set(alpha, beta, m, "+")
        pos = eta[eta > 0.0]
        classes.append(np.array([[0.0, 0.0]]))
        for x in pos:
            classes.append(np.array([[x, -x], [-x, x]]))
    multip = [len(c) for c in classes]

    deg = 4 * m + 1
    pairs = [
        (i, j)
        for j in range(deg + 1)
        for i in range(j + 1)
        if (i + j) % 2 == 0 and i + j <= deg
    ]
    A = _symmetrized_cos_rows(pairs, classes)
    raw = _oracle.cos_basis_moments(alpha, beta, gamma, pairs)
    b = np.array([(2.0 if i != j else 1.0) * v for (i, j), v in zip(pairs, raw)])

    sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.linalg.norm(A @ sol - b))
    if resid > 1e-9 * float(np.linalg.norm(b)):
        raise ConstructionError(
            "odd-rule moment system residual %.3e exceeds tolerance "
            "(m=%d, alpha=%g, beta=%g, gamma=%g, rank %d/%d)"
            % (resid, m, alpha, beta, gamma, rank, len(classes))
        )
    if np.any(sol <= 0.0):
        raise ConstructionError(
            "odd-rule weights not positive (min %.3e) for m=%d, alpha=%g, "
            "beta=%g, gamma=%g" % (float(sol.min()), m, alpha, beta, gamma)
        )

    pts = np.vstack(classes)
    wts = np.concatenate([np.full(n, w) for n, w in zip(multip, sol)])
    nodes, weights = merge_close_nodes(pts, wts)
    expected = 2 * (m + 1) ** 2 - 1
    if len(nodes) != expected:
        raise ConstructionError(
            "odd rule has %d nodes after merging, expected %d" % (len(nodes), expected)
        )
    return CubatureRule2D(
        nodes=nodes,
        weights=weights,
        degree=deg,
        domain="square",
        spec=spec,
        param=m,
        family="square-odd",
    ).sorted_rule()


def fold_to_biangle(x1, x2):
    """The degree-2 invariant map (2 x1 x2, x1^2 + x2^2 - 1); it sends the
    square onto the curved domain of module biangle and even-rule nodes
    onto Gauss-cubature nodes there."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return 2.0 * x1 * x2, x1 * x1 + x2 * x2 - 1.0


def _cos_sum_diff(x1: np.ndarray, x2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    root = np.sqrt(np.maximum(1.0 - x1 * x1, 0.0) * np.maximum(1.0 - x2 * x2, 0.0))
    cm = np.clip(x1 * x2 + root, -1.0, 1.0)
    cp = np.clip(x1 * x2 - root, -1.0, 1.0)
    return cm, cp


def _pair_product(
    rc: RecurrenceCoeffs, gamma: float, big: int, k: int, cm: np.ndarray, cp: np.ndarray
) -> np.ndarray:
    """Symmetrized (g = -1/2) or divided-difference (g = +1/2) product of
    the 1-D orthonormal family at the two folded arguments."""
    if gamma == -0.5:
        return eval_orthonormal(rc, big, cm) * eval_orthonormal(rc, k, cp) + eval_orthonormal(
            rc, k, cm
        ) * eval_orthonormal(rc, big, cp)
    diff = cm - cp
    out = np.empty_like(diff)
    near = np.abs(diff) < 1e-5
    far = ~near
    if np.any(far):
        out[far] = (
            eval_orthonormal(rc, big + 1, cm[far]) * eval_orthonormal(rc, k, cp[far])
            - eval_orthonormal(rc, big + 1, cp[far]) * eval_orthonormal(rc, k, cm[far])
        ) / diff[far]
    if np.any(near):
        c = 0.5 * (cm[near] + cp[near])
        out[near] = eval_orthonormal_deriv(rc, big + 1, c) * eval_orthonormal(
            rc, k, c
        ) - eval_orthonormal(rc, big + 1, c) * eval_orthonormal_deriv(rc, k, c)
    return out


def eval_Q_basis(
    alpha: float,
    beta: float,
    gamma: float,
    n: int,
    branch: int,
    k: int,
    x1,
    x2,
) -> np.ndarray:
    """Degree-n orthogonal basis element (two branches) for the square
    weight family, evaluated through the folded arguments
    cos(th1 - th2) = x1 x2 + sqrt((1-x1^2)(1-x2^2)) and
    cos(th1 + th2) = x1 x2 - sqrt((1-x1^2)(1-x2^2)).

    Branch 2 carries the antisymmetric polynomial factor (x1^2 - x2^2)
    for even n; odd degrees split into (x1 + x2) and (x1 - x2) branches
    with correspondingly parameter-shifted 1-D families.
    """
    if gamma not in (-0.5, 0.5):
        raise ValueError("gamma restricted to -1/2 and +1/2")
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(np.abs(x1) > 1.0) or np.any(np.abs(x2) > 1.0):
        raise ValueError("points must lie in [-1,1]^2")
    cm, cp = _cos_sum_diff(x1, x2)
    half, rem = divmod(n, 2)
    if rem == 0:
        if branch == 1:
            big, da, db, factor = half, 0.0, 0.0, 1.0
        else:
            if half < 1:
                raise ValueError("branch 2 needs n >= 2 for even degrees")
            big, da, db = half - 1, 1.0, 1.0
            factor = x1 * x1 - x2 * x2
    else:
        if branch == 1:
            big, da, db = half, 0.0, 1.0
            factor = x1 + x2
        else:
            big, da, db = half, 1.0, 0.0
            factor = x1 - x2
    if not 0 <= k <= big:
        raise ValueError("index k out of range for this degree and branch")
    size = big + 3
    rc = jacobi_recurrence(alpha + da, beta + db, size)
    return factor * _pair_product(rc, gamma, big, k, cm, cp)
