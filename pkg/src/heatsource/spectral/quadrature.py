"""Fixed-resolution 1-D quadrature rules.

No adaptivity: every rule has a documented node layout so results are
reproducible and resolution can be reasoned about up front.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from ..errors import ParameterError, QuadratureError
from .summation import kahan_sum

SIMPSON = "simpson"
GAUSS_LEGENDRE = "gauss-legendre"
RULES = (SIMPSON, GAUSS_LEGENDRE)

# Nodes per period 2*pi/omega required for oscillatory integrands.
NODES_PER_PERIOD = 8


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite rule: ``panels`` panels, ``points_per_panel`` nodes each.

    For Simpson the panels share endpoints and ``points_per_panel`` must be odd.
    """

    panels: int = 1
    points_per_panel: int = 32
    rule: str = GAUSS_LEGENDRE

    def __post_init__(self):
        if self.rule not in RULES:
            raise ParameterError(f"unknown quadrature rule {self.rule!r}")
        if self.panels < 1:
            raise ParameterError("panels must be >= 1")
        if self.points_per_panel < 2:
            raise ParameterError("points_per_panel must be >= 2")
        if self.rule == SIMPSON and self.points_per_panel % 2 == 0:
            raise ParameterError("Simpson panels need an odd number of points")

    @property
    def n_nodes(self):
        if self.rule == SIMPSON:
            return self.panels * (self.points_per_panel - 1) + 1
        return self.panels * self.points_per_panel


# Default rule for smooth t-integrals.
T_SPEC = QuadratureSpec(panels=1, points_per_panel=32, rule=GAUSS_LEGENDRE)


def simpson_weights(n_nodes, a, b):
    """Composite Simpson weights on ``n_nodes`` equispaced nodes (odd count)."""
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise ParameterError(f"Simpson needs an odd node count >= 3, got {n_nodes}")
    h = (b - a) / (n_nodes - 1)
    w = np.full(n_nodes, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


@lru_cache(maxsize=64)
def _leggauss(points):
    return np.polynomial.legendre.leggauss(points)


def gauss_legendre_rule(panels, points, a, b):
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    x, w = _leggauss(points)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def rule_nodes(spec, a, b):
    """Nodes and weights of ``spec`` mapped to [a, b]."""
    if spec.rule == SIMPSON:
        n = spec.n_nodes
        return np.linspace(a, b, n), simpson_weights(n, a, b)
    return gauss_legendre_rule(spec.panels, spec.points_per_panel, a, b)


def quad_1d(f, a, b, spec=T_SPEC, context=""):
    """Integrate the vectorised callable ``f`` over [a, b] with ``spec``.

    Raises
    ------
    QuadratureError
        If ``f`` is non-finite at any node; the first offending node is
        reported.
    """
    if a > b:
        raise ParameterError(f"quad_1d needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    nodes, weights = rule_nodes(spec, a, b)
    values = np.broadcast_to(np.asarray(f(nodes), dtype=np.float64), nodes.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        raise QuadratureError(float(nodes[np.argmax(bad)]), context)
    return kahan_sum(weights * values)


def oscillatory_node_count(length, max_freq, minimum=3):
    """Odd node count with at least 8 nodes per period of ``cos(max_freq * t)``."""
    periods = length * max_freq / (2.0 * math.pi)
    n = max(minimum, int(math.ceil(NODES_PER_PERIOD * periods)) + 1)
    return n if n % 2 == 1 else n + 1
