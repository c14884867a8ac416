"""Shared value types for 2D cubature rules and their certification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .opq1d import RecurrenceCoeffs

__all__ = ["WeightSpec", "CubatureRule2D", "ExactnessReport", "ConstructionError"]


class ConstructionError(RuntimeError):
    """A rule could not be built to contract; nothing partial is returned."""


@dataclass(frozen=True)
class WeightSpec:
    """Symbolic description of a 2D weight family.

    family: 'biangle-gamma' (curved domain, parameter gamma), 'square-W'
    (the |x1-x2|^{2a+1} |x1+x2|^{2b+1} ((1-x1^2)(1-x2^2))^g family on the
    square), or 'square-W-ell' (the degree-ell composed variant, g = -1/2).
    alpha/beta are the Jacobi parameters of the base 1D weight when it is
    Jacobi; rc carries a generic base recurrence instead.
    """

    family: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: float = -0.5
    ell: int = 1
    rc: Optional[RecurrenceCoeffs] = None

    def __post_init__(self):
        if self.family not in ("biangle-gamma", "square-W", "square-W-ell"):
            raise ValueError("unknown weight family %r" % (self.family,))
        if self.gamma not in (-0.5, 0.5):
            raise ValueError("gamma restricted to -1/2 and +1/2")
        if self.family == "square-W-ell":
            if self.ell < 1:
                raise ValueError("ell must be >= 1")
            if self.gamma != -0.5:
                raise ValueError("composed family exists only for gamma = -1/2")
        if self.alpha is not None and (self.alpha <= -1 or self.beta <= -1):
            raise ValueError("Jacobi parameters must exceed -1")
        if self.alpha is None and self.rc is None:
            raise ValueError("either Jacobi parameters or a recurrence required")


@dataclass(frozen=True)
class CubatureRule2D:
    """Nodes, positive weights, and declared exactness degree of a 2D rule."""

    nodes: np.ndarray  # (N, 2)
    weights: np.ndarray  # (N,)
    degree: int
    domain: str  # 'biangle' | 'square'
    spec: WeightSpec
    param: int  # n for Gauss-type rules, m for the minimal families
    family: str = "unknown"

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(
            self, "weights", np.asarray(self.weights, dtype=float)
        )
        if self.degree < 1 or self.degree % 2 == 0:
            raise ValueError("declared degree must be odd and positive")
        if len(self.weights) != len(nodes):
            raise ValueError("node/weight length mismatch")
        if np.any(self.weights <= 0.0):
            raise ConstructionError("nonpositive cubature weight")
        if self.domain not in ("biangle", "square"):
            raise ValueError("unknown domain tag")

    @property
    def node_count(self) -> int:
        return len(self.weights)

    def apply_monomial(self, i: int, j: int) -> float:
        x = self.nodes[:, 0]
        y = self.nodes[:, 1]
        return float(np.dot(self.weights, x**i * y**j))

    def apply(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes[:, 0], self.nodes[:, 1])))

    def sorted_rule(self) -> "CubatureRule2D":
        order = np.lexsort((self.nodes[:, 1], self.nodes[:, 0]))
        return CubatureRule2D(
            nodes=self.nodes[order],
            weights=self.weights[order],
            degree=self.degree,
            domain=self.domain,
            spec=self.spec,
            param=self.param,
            family=self.family,
        )


@dataclass(frozen=True)
class ExactnessReport:
    """Outcome of certifying a rule against reference moments."""

    max_degree_tested: int
    certified_degree: int
    worst_rel_error: float
    failures: tuple = field(default_factory=tuple)  # ((i, j, rel_err), ...)

    def __post_init__(self):
        if self.certified_degree > self.max_degree_tested:
            raise ValueError("certified_degree cannot exceed max_degree_tested")
        has_fail = len(self.failures) > 0
        if has_fail != (self.certified_degree < self.max_degree_tested):
            raise ValueError("failures inconsistent with certified_degree")
