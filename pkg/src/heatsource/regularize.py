"""Tikhonov-filtered, spectrally truncated reconstruction of the source.

The regularized source is

    f_eps(x, y) = (1/pi) sum_{|n| < R} [int_{-R}^{R} H D / (D^2 + delta) cos(alpha x) d alpha] cos(n pi y)

with H = H(g_eps), D = D(phi_eps), delta = eps^{9/10} and R chosen by one of two
schedules: R = (ln 1/eps)^beta (any nonzero phi) or R = eps^{-q1/2} (phi bounded
away from zero near t = 1).
"""

from dataclasses import dataclass, field
import math
import time
import warnings

import numpy as np

from .errors import ParameterError
from .forward import PI2, fixture_perturbed, f_exact
from .spectral import (
    DEFAULT_GRID,
    GridFunction2D,
    SpectralEvaluator,
    T_SPEC,
    alpha_integral,
    default_alpha_nodes,
    h_evaluator,
    kernel_evaluator,
    l2_error,
    l2_norm,
    n_window,
    simpson_weights,
    synthesize,
    transform_evaluator,
)
from .spectral.fields import CosineSeries2D
from .spectral.transforms import ALPHA_NODE_DENSITY

DEFAULT_Q = 0.4
DELTA_EXPONENT = 0.9
DEFAULT_BETA = 0.4
DEFAULT_Q1 = 1.0 / 3.0


class DegenerateWindowWarning(UserWarning):
    """The truncation window holds no resolvable alpha interval."""


@dataclass(frozen=True)
class LogRadius:
    """R = (ln 1/eps)^beta, 0 < beta < 1/2."""

    beta: float = DEFAULT_BETA
    name = "log"

    def __post_init__(self):
        if not 0.0 < self.beta < 0.5:
            raise ParameterError(f"beta must lie in (0, 1/2), got {self.beta}")

    def radius(self, eps):
        return math.log(1.0 / eps) ** self.beta


@dataclass(frozen=True)
class PowerRadius:
    """R = eps^{-q1/2}, 0 < q1 < q."""

    q1: float = DEFAULT_Q1
    name = "power"

    def __post_init__(self):
        if not self.q1 > 0.0:
            raise ParameterError(f"q1 must be positive, got {self.q1}")

    def radius(self, eps):
        return eps ** (-self.q1 / 2.0)


@dataclass(frozen=True)
class RegularizationParams:
    eps: float
    q: float
    delta: float
    radius: float
    strategy: LogRadius | PowerRadius | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if not self.radius > 0:
            raise ParameterError(f"radius must be positive, got {self.radius}")
        if isinstance(self.strategy, PowerRadius) and not self.strategy.q1 < self.q:
            raise ParameterError(f"q1 = {self.strategy.q1} must be below q = {self.q}")

    @property
    def n_max(self):
        """Largest |n| inside the window |n| < R."""
        return n_window(self.radius)

    def to_dict(self):
        d = {"eps": self.eps, "q": self.q, "delta": self.delta, "R": self.radius}
        if self.strategy is not None:
            d["strategy"] = self.strategy.name
            d.update({k: getattr(self.strategy, k) for k in ("beta", "q1") if hasattr(self.strategy, k)})
        return d


def choose_params(eps, strategy, q=DEFAULT_Q, delta_override=None, condition_h=None):
    """Parameter schedule: delta = eps^{9/10} and R from ``strategy``.

    ``condition_h`` is the caller's statement about phi near t = 1; the power
    schedule is only justified when it holds, so ``False`` triggers a warning.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    if isinstance(strategy, PowerRadius) and condition_h is False:
        warnings.warn("power-law radius without the sign condition on phi near t = 1; "
                      "convergence is not guaranteed", stacklevel=2)
    delta = eps ** DELTA_EXPONENT if delta_override is None else float(delta_override)
    return RegularizationParams(eps=eps, q=q, delta=delta, radius=strategy.radius(eps),
                                strategy=strategy)


def tikhonov_multiplier(h, d, delta):
    """h d / (d^2 + delta); bounded by |h| / (2 sqrt(delta))."""
    d = np.asarray(d, dtype=np.float64)
    return np.asarray(h, dtype=np.float64) * d / (d * d + delta)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Regularized source on a grid.

    ``err_sq`` is the squared error measured through the Parseval identity,
    (1/pi) sum_n int |G(f_eps) - G(f_true)|^2 d alpha, with G(f_eps) the
    windowed Tikhonov spectrum; ``err_sq_grid`` is the plain grid L2(Omega) error
    of the synthesized field.
    """

    field: GridFunction2D
    params: RegularizationParams
    spectral: SpectralEvaluator
    err_sq: float | None = None
    err_sq_grid: float | None = None
    meta: dict = field(default_factory=dict)


def _windowed(func, radius, support, provenance, label):
    n_max = n_window(radius)

    def windowed(alpha, n):
        if abs(n) > n_max:
            return np.zeros(alpha.shape)
        return np.where(np.abs(alpha) <= radius, func(alpha, n), 0.0)

    if support is not None:
        support = tuple(n for n in support if abs(n) <= n_max)
    return SpectralEvaluator(windowed, provenance, support, label)


def regularized_spectrum(h_hat, d_hat, params):
    """chi((-R, R)^2) H D / (D^2 + delta) as an evaluator."""
    def func(alpha, n):
        return tikhonov_multiplier(h_hat(alpha, n), d_hat(alpha, n), params.delta)

    closed = h_hat.is_closed_form and d_hat.is_closed_form
    provenance = "closed-form:tikhonov" if closed else "quadrature"
    return _windowed(func, params.radius, h_hat.n_support, provenance, "G(f_eps)")


def spectral_error_sq(s, f_true, radius, panel_width=0.5, points=16):
    """(1/pi) sum_n int_R |s - G(f_true)|^2 d alpha for s supported in the window.

    The out-of-window part is taken from the Parseval identity for f_true, so
    only in-window integrals are evaluated (composite Gauss-Legendre).
    """
    g = transform_evaluator(f_true)
    if isinstance(f_true, CosineSeries2D):
        norm_sq = f_true.l2_norm_sq()
    else:
        norm_sq = l2_norm(f_true) ** 2
    n_max = n_window(radius)
    if s.n_support is None or g.n_support is None:
        ns = list(range(-n_max, n_max + 1))
    else:
        ns = sorted(n for n in set(s.n_support) | set(g.n_support) if abs(n) <= n_max)
    acc = []
    for n in ns:
        def integrand(alpha, n=n):
            sv = np.asarray(s(alpha, n))
            return sv * sv - 2.0 * sv * np.asarray(g(alpha, n))
        acc.append(2.0 * alpha_integral(integrand, 0.0, radius, panel_width, points))
    return norm_sq + math.fsum(acc) / math.pi


def _degenerate(radius):
    return radius < 1.0 / ALPHA_NODE_DENSITY


def _finish(field_, params, spectrum, exp_f_true, grid, t0, meta):
    err_sq = err_grid = None
    if exp_f_true is not None:
        err_sq = max(spectral_error_sq(spectrum, exp_f_true, params.radius), 0.0)
        truth = exp_f_true.rasterize(*grid) if isinstance(exp_f_true, CosineSeries2D) else exp_f_true
        err_grid = l2_error(field_, truth) ** 2
    meta = dict(meta, runtime_s=time.perf_counter() - t0)
    return Reconstruction(field_, params, spectrum, err_sq, err_grid, meta)


def reconstruct(exp, params, grid=DEFAULT_GRID, spec=T_SPEC, n_alpha=None, kernel_method="auto"):
    """Regularized source for the data of ``exp``.

    Data may be cosine series (closed-form transforms) or grid functions
    (Simpson quadrature); phi's kernel uses its closed form when one exists.
    """
    t0 = time.perf_counter()
    g0_hat = transform_evaluator(exp.g0, "G(g0)")
    g1_hat = transform_evaluator(exp.g1, "G(g1)")
    h_hat = h_evaluator(g0_hat, g1_hat)
    d_hat = kernel_evaluator(exp.phi, spec, kernel_method)
    spectrum = regularized_spectrum(h_hat, d_hat, params)
    n_alpha = n_alpha or default_alpha_nodes(params.radius)
    meta = {"alpha_nodes": n_alpha, "provenance": spectrum.provenance,
            "kernel": d_hat.provenance}
    if _degenerate(params.radius):
        warnings.warn(f"truncation radius {params.radius:.3g} is below the alpha-node spacing; "
                      "returning a zero field", DegenerateWindowWarning, stacklevel=2)
        field_ = GridFunction2D.zeros(*grid)
    else:
        field_ = synthesize(spectrum, params.radius, grid, n_alpha)
    return _finish(field_, params, spectrum, exp.f_true, grid, t0, meta)


# -- reduced closed form for the perturbed experiment ---------------------------


def _sinc_taylor(h):
    h2 = h * h
    return 1.0 - h2 / 6.0 + h2 * h2 / 120.0


def _sin_over_poles(alpha, m):
    """sin(alpha) / ((alpha^2 - pi^2)(alpha^2 - m^2 pi^2)) with Taylor branches at the poles."""
    a = np.abs(alpha)
    sgn = np.sign(alpha)
    out = np.empty_like(a)
    h1 = a - math.pi
    hm = a - m * math.pi
    near1 = np.abs(h1) < 1e-4
    nearm = np.abs(hm) < 1e-4
    far = ~(near1 | nearm)
    out[far] = np.sin(a[far]) / ((a[far] ** 2 - PI2) * (a[far] ** 2 - (m * math.pi) ** 2))
    # sin(a) = -sin(h1) near pi, and = (-1)^m sin(hm) = sin(hm) near m pi (m even)
    out[near1] = -_sinc_taylor(h1[near1]) / (2 * math.pi + h1[near1]) / (a[near1] ** 2 - (m * math.pi) ** 2)
    out[nearm] = _sinc_taylor(hm[nearm]) / (2 * m * math.pi + hm[nearm]) / (a[nearm] ** 2 - PI2)
    return sgn * out


def _alpha_sq_over_one_minus_exp(alpha):
    """alpha^2 / (1 - e^{-alpha^2}), Taylor branch near alpha = 0."""
    a2 = np.asarray(alpha, dtype=np.float64) ** 2
    near = np.abs(alpha) < 1e-4
    safe = np.where(near, 1.0, a2)
    return np.where(near, 1.0 + a2 / 2.0 + a2 * a2 / 12.0, safe / -np.expm1(-safe))


def sec4_multiplier(alpha, m, delta):
    """H D / (D^2 + delta) at n = +-1 for the perturbed experiment, reduced form.

    (m-1) pi^4 alpha sin(alpha) (alpha^2 + m pi^2)
    / [2 (alpha^2 - pi^2)(alpha^2 - m^2 pi^2)(pi^4 + delta alpha^4 e^{2 pi^2} (1 - e^{-alpha^2})^{-2})]
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    q = _alpha_sq_over_one_minus_exp(alpha)
    filt = PI2 ** 2 + delta * math.exp(2 * PI2) * q * q
    mf = float(m)
    return ((mf - 1.0) * PI2 ** 2 * alpha * _sin_over_poles(alpha, mf) * (alpha ** 2 + mf * PI2)
            / (2.0 * filt))


def _simpson_cosine_profile(values, nodes, x, chunk=4096):
    # plain numpy accumulation; deliberately independent of the compensated kernel
    w = simpson_weights(nodes.size, nodes[0], nodes[-1]) * values
    out = np.zeros(x.size)
    for start in range(0, nodes.size, chunk):
        sl = slice(start, start + chunk)
        out += np.cos(np.outer(x, nodes[sl])) @ w[sl]
    return out


def reconstruct_closed_form_sec4(m, params, grid=DEFAULT_GRID, n_alpha=None):
    """Perturbed experiment via the reduced single-mode formula.

    f_m(x, y) = (2/pi) [int_{-R}^{R} s(alpha) cos(alpha x) d alpha] cos(pi y),
    s the reduced multiplier; zero when R <= 1 (n = +-1 outside the window).
    """
    t0 = time.perf_counter()
    exp = fixture_perturbed(m)
    R = params.radius

    def func(alpha, n):
        return sec4_multiplier(alpha, exp.m, params.delta)

    spectrum = _windowed(func, R, (-1, 1), "closed-form:sec4", "G(f_m)")
    n_alpha = n_alpha or default_alpha_nodes(R)
    nx, ny = grid
    field_ = GridFunction2D.zeros(nx, ny)
    if n_window(R) >= 1 and not _degenerate(R):
        nodes = np.linspace(0.0, R, n_alpha)
        prof = (4.0 / math.pi) * _simpson_cosine_profile(sec4_multiplier(nodes, exp.m, params.delta),
                                                         nodes, field_.x)
        field_ = GridFunction2D(np.outer(prof, np.cos(math.pi * field_.y)))
    meta = {"alpha_nodes": n_alpha, "provenance": spectrum.provenance}
    return _finish(field_, params, spectrum, f_exact(), grid, t0, meta)
