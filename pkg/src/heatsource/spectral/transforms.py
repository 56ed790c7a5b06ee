"""Mixed cosine transform G, divisor kernel D, data functional H and synthesis.

Conventions
-----------
G(w)(alpha, n) = int_Omega w(x, y) cos(alpha x) cos(n pi y) dx dy, alpha real, n integer.
D(phi)(alpha, n) = int_0^1 exp((alpha^2 + n^2 pi^2)(t - 1)) phi(t) dt.
H(g)(alpha, n) = G(g1) - exp(-(alpha^2 + n^2 pi^2)) G(g0).

The inverse map is

    w(x, y) = (1/pi) sum_{n in Z} [int_R G(w)(alpha, n) cos(alpha x) d alpha] cos(n pi y),

with both signs of n counted.  All three functionals depend on alpha and n only
through alpha^2 and n^2.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from ..errors import ParameterError, QuadratureError
from .fields import CosineSeries2D, GridFunction2D, DEFAULT_GRID
from .profiles import TimeProfile
from .quadrature import T_SPEC, NODES_PER_PERIOD, simpson_weights, gauss_legendre_rule
from .summation import cosine_sums, kahan_sum

QUADRATURE = "quadrature"

# Distance from a removable singularity below which a Taylor branch is used.
SERIES_RADIUS = 1e-4

# alpha-node density used by the synthesis integral (nodes per unit alpha).
ALPHA_NODE_DENSITY = 16
MIN_ALPHA_NODES = 2001


class ResolutionWarning(UserWarning):
    """A grid quadrature is asked for frequencies it cannot resolve."""


def default_alpha_nodes(radius):
    """Odd node count ``max(2001, ceil(16 R))`` for the [0, R] synthesis integral."""
    n = max(MIN_ALPHA_NODES, int(math.ceil(ALPHA_NODE_DENSITY * radius)))
    return n if n % 2 == 1 else n + 1


def sinc_series(h):
    """sin(h)/h, with a 3-term Taylor branch for |h| < SERIES_RADIUS."""
    h = np.asarray(h, dtype=np.float64)
    near = np.abs(h) < SERIES_RADIUS
    safe = np.where(near, 1.0, h)
    h2 = h * h
    return np.where(near, 1.0 - h2 / 6.0 + h2 * h2 / 120.0, np.sin(safe) / safe)


def cos_moment(k, alpha):
    """int_0^1 cos(k pi x) cos(alpha x) dx for integer k >= 0.

    Equals sin(alpha)/alpha for k = 0 and (-1)^k alpha sin(alpha)/(alpha^2 - k^2 pi^2)
    otherwise, with the removable values 1 (k = 0, alpha = 0) and 1/2
    (alpha = +-k pi) filled in.
    """
    a = np.abs(np.asarray(alpha, dtype=np.float64))
    k = int(k)
    if k == 0:
        return sinc_series(a)
    kpi = k * math.pi
    h = a - kpi
    near = np.abs(h) < 1.0
    sign = -1.0 if k % 2 else 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = sign * a * np.sin(a) / ((a - kpi) * (a + kpi))
    # near the pole: (-1)^k sin(a) = sin(h) exactly, so the ratio is a sinc
    local = a / (a + kpi) * sinc_series(h)
    return np.where(near, local, direct)


def y_moment(m, n):
    """int_0^1 cos(m pi y) cos(n pi y) dy for m >= 0 and integer n."""
    n = abs(int(n))
    m = int(m)
    if m == n:
        return 1.0 if m == 0 else 0.5
    return 0.0


def mode_transform_closed(k, m, alpha, n):
    """G(cos(k pi x) cos(m pi y))(alpha, n) in closed form."""
    iy = y_moment(m, n)
    if iy == 0.0:
        return np.zeros_like(np.asarray(alpha, dtype=np.float64))
    return iy * cos_moment(k, alpha)


@dataclass(frozen=True, eq=False)
class SpectralEvaluator:
    """A deterministic map (alpha, n) -> real, vectorised over alpha.

    Attributes
    ----------
    func : callable
        ``func(alpha_array, n) -> array``.
    provenance : str
        ``"quadrature"`` or ``"closed-form:<name>"``.
    n_support : tuple of int or None
        If given, the evaluator is exactly zero for every n not listed.
    """

    func: object
    provenance: str
    n_support: tuple | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __call__(self, alpha, n):
        n = int(n)
        a = np.asarray(alpha, dtype=np.float64)
        if self.n_support is not None and n not in self.n_support:
            out = np.zeros(a.shape)
        else:
            out = np.asarray(self.func(a, n), dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def active_n(self, n_max):
        """The |n| <= n_max indices at which the evaluator can be nonzero."""
        if self.n_support is None:
            return list(range(-n_max, n_max + 1))
        return [n for n in sorted(self.n_support) if abs(n) <= n_max]

    @property
    def is_closed_form(self):
        return self.provenance.startswith("closed-form")


def _merge_support(*evaluators):
    if any(e.n_support is None for e in evaluators):
        return None
    return tuple(sorted(set().union(*(e.n_support for e in evaluators))))


# -- G -----------------------------------------------------------------------


def series_transform(w, label=""):
    """Closed-form evaluator of G(w) for a cosine series."""
    by_y = {}
    for (k, m), c in w.terms.items():
        by_y.setdefault(m, []).append((k, c))

    def func(alpha, n):
        m = abs(n)
        out = np.zeros(alpha.shape)
        for k, c in by_y.get(m, ()):
            out = out + c * cos_moment(k, alpha)
        return y_moment(m, n) * out

    support = tuple(sorted({s * m for m in by_y for s in (1, -1)}))
    return SpectralEvaluator(func, "closed-form:cosine-series", support, label)


def grid_transform(w, label=""):
    """Quadrature evaluator of G(w) for a sampled field (2-D composite Simpson).

    Resolution contract: 8 grid nodes per period, i.e. |alpha| and |n| pi up to
    pi (nx - 1) / 4; beyond that a ResolutionWarning is issued.
    """
    x, y = w.x, w.y
    wx = simpson_weights(w.nx, 0.0, 1.0)
    wy = simpson_weights(w.ny, 0.0, 1.0)
    alpha_limit = 2.0 * math.pi * (w.nx - 1) / NODES_PER_PERIOD
    n_limit = 2.0 * (w.ny - 1) / NODES_PER_PERIOD
    y_profiles = {}
    warned = []

    def h_profile(m):
        if m not in y_profiles:
            wy_cos = wy * np.cos(m * math.pi * y)
            # fixed-order compensated reduction over y for each x row
            y_profiles[m] = np.array([kahan_sum(row * wy_cos) for row in w.values])
        return y_profiles[m]

    def func(alpha, n):
        m = abs(n)
        if not warned and (m > n_limit or (alpha.size and np.max(np.abs(alpha)) > alpha_limit)):
            warned.append(True)
            warnings.warn(f"grid {w.shape} under-resolves G at |alpha| <= "
                          f"{np.max(np.abs(alpha)):.4g}, |n| = {m}", ResolutionWarning, stacklevel=3)
        flat = np.abs(alpha).ravel()
        vals = cosine_sums(wx * h_profile(m), x, flat)
        return vals.reshape(alpha.shape)

    return SpectralEvaluator(func, QUADRATURE, None, label)


def transform_evaluator(w, label=""):
    if isinstance(w, CosineSeries2D):
        return series_transform(w, label)
    if isinstance(w, GridFunction2D):
        return grid_transform(w, label)
    raise TypeError(f"cannot transform {type(w).__name__}")


def cosine_transform_G(w, alpha, n, spec=None):
    """G(w)(alpha, n); closed form for series input, grid quadrature otherwise."""
    return transform_evaluator(w)(alpha, n)


# -- D -----------------------------------------------------------------------


def _lam(alpha, n):
    return np.asarray(alpha, dtype=np.float64) ** 2 + (n * math.pi) ** 2


def kernel_D(phi, alpha, n, spec=T_SPEC, method="auto"):
    """D(phi)(alpha, n).  ``method`` is ``"auto"``, ``"closed"`` or ``"quadrature"``."""
    out = phi.kernel(_lam(alpha, n), 1.0, method, spec)
    out = np.asarray(out, dtype=np.float64).reshape(np.shape(alpha))
    return float(out) if out.ndim == 0 else out


def kernel_evaluator(phi, spec=T_SPEC, method="auto"):
    if method == "auto":
        method = "closed" if phi.has_closed_form else "quadrature"
    provenance = f"closed-form:{phi.kind}" if method == "closed" else QUADRATURE

    def func(alpha, n):
        return np.asarray(phi.kernel(_lam(alpha, n), 1.0, method, spec)).reshape(alpha.shape)

    return SpectralEvaluator(func, provenance, None, "D")


# -- H -----------------------------------------------------------------------


def data_functional_H(g0_hat, g1_hat, alpha, n):
    """G(g1) - exp(-(alpha^2 + n^2 pi^2)) G(g0)."""
    return h_evaluator(g0_hat, g1_hat)(alpha, n)


def h_evaluator(g0_hat, g1_hat):
    def func(alpha, n):
        return g1_hat(alpha, n) - np.exp(-_lam(alpha, n)) * g0_hat(alpha, n)

    closed = g0_hat.is_closed_form and g1_hat.is_closed_form
    provenance = "closed-form:data-functional" if closed else QUADRATURE
    return SpectralEvaluator(func, provenance, _merge_support(g0_hat, g1_hat), "H")


# -- synthesis ---------------------------------------------------------------


def n_window(radius):
    """Largest |n| with |n| < radius."""
    return int(math.ceil(radius)) - 1


def _check_even(s, radius, n_max):
    probe = np.array([0.37, 0.61, 0.83]) * radius
    for n in s.active_n(n_max)[:3] + [n_max]:
        a = np.asarray(s(probe, n))
        for b in (np.asarray(s(-probe, n)), np.asarray(s(probe, -n))):
            if not np.allclose(a, b, rtol=1e-10, atol=1e-300):
                raise ParameterError(f"spectral data is not even in alpha and n (n = {n})")


def alpha_profiles(s, radius, x, n_alpha=None):
    """x-profiles A_n(x) = (2/pi) int_0^R s(alpha, n) cos(alpha x) d alpha for |n| < R.

    Returns a dict keyed by nonnegative n; the alpha integral uses composite
    Simpson with compensated fixed-order accumulation.
    """
    n_max = n_window(radius)
    n_alpha = n_alpha or default_alpha_nodes(radius)
    nodes = np.linspace(0.0, radius, n_alpha)
    weights = simpson_weights(n_alpha, 0.0, radius)
    profiles = {}
    for n in sorted({abs(n) for n in s.active_n(n_max)}):
        vals = np.asarray(s(nodes, n))
        bad = ~np.isfinite(vals)
        if bad.any():
            raise QuadratureError(float(nodes[np.argmax(bad)]), f"alpha-integral at n = {n}")
        profiles[n] = (2.0 / math.pi) * cosine_sums(weights * vals, nodes, x)
    return profiles


def synthesize(s, radius, grid=DEFAULT_GRID, n_alpha=None, check_even=True):
    """Inverse transform restricted to the window |alpha| < R, |n| < R.

    ``(1/pi) sum_{|n| < R} [int_{-R}^{R} s(alpha, n) cos(alpha x) d alpha] cos(n pi y)``
    sampled on the grid; the alpha integral is taken as twice the [0, R] one.
    """
    if radius <= 0:
        raise ParameterError("synthesis radius must be positive")
    nx, ny = grid
    out = GridFunction2D.zeros(nx, ny)
    x, y = out.x, out.y
    n_max = n_window(radius)
    if check_even:
        _check_even(s, radius, n_max)
    profiles = alpha_profiles(s, radius, x, n_alpha)
    values = np.zeros((nx, ny))
    for n in range(-n_max, n_max + 1):
        prof = profiles.get(abs(n))
        if prof is not None and (s.n_support is None or n in s.n_support):
            values += np.outer(prof, np.cos(n * math.pi * y))
    return GridFunction2D(values)


# -- alpha integrals of spectral quantities ----------------------------------


def alpha_rule(a, b, panel_width=0.5, points=16):
    """Composite Gauss-Legendre on [a, b] with panels no wider than ``panel_width``."""
    if b <= a:
        return np.empty(0), np.empty(0)
    panels = max(1, int(math.ceil((b - a) / panel_width)))
    return gauss_legendre_rule(panels, points, a, b)


def alpha_integral(func, a, b, panel_width=0.5, points=16):
    """int_a^b func(alpha) d alpha for smooth, mildly oscillatory integrands."""
    nodes, weights = alpha_rule(a, b, panel_width, points)
    if nodes.size == 0:
        return 0.0
    vals = np.asarray(func(nodes), dtype=np.float64)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise QuadratureError(float(nodes[np.argmax(bad)]), "alpha integral")
    return kahan_sum(weights * vals)
