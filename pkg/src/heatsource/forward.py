"""Spectral forward model and the synthetic experiment fixtures.

Each cosine mode (k, n) evolves independently under Neumann conditions:

    u_hat(t) = exp(-lam t) g0_hat + [int_0^t exp(lam (s - t)) phi(s) ds] f_hat,
    lam = (k^2 + n^2) pi^2,

which is exact for this geometry, so no time stepping is needed.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ParameterError
from .spectral import CosineSeries2D, TimeProfile, T_SPEC
from .spectral.profiles import EXP_DECAY

PI2 = math.pi ** 2


@dataclass(frozen=True, eq=False)
class Experiment:
    """One synthetic inverse problem: data (g0, g1, phi), the source to recover,
    and the noise level.

    ``data_source`` is the source the (possibly perturbed) data are exactly
    consistent with; for unperturbed experiments it equals ``f_true``.
    """

    g0: CosineSeries2D
    g1: CosineSeries2D
    phi: TimeProfile
    f_true: CosineSeries2D | None = None
    m: int | None = None
    eps: float = 0.0
    labels: dict = field(default_factory=dict)
    data_source: CosineSeries2D | None = None

    def __post_init__(self):
        if self.m is not None:
            if self.m < 2 or self.m % 2:
                raise ParameterError(f"perturbation index m must be even and >= 2, got {self.m}")
            if not math.isclose(self.eps, 1 / self.m, rel_tol=1e-12):
                raise ParameterError("eps must equal 1/m for perturbed experiments")
        if self.eps < 0:
            raise ParameterError("eps must be nonnegative")


def _mode_lambda(k, n):
    return float(k * k + n * n) * PI2


def _evolve_coefficients(g0, f, phi, t, spec, method):
    modes = sorted(set(g0.terms) | set(f.terms))
    if not modes:
        return CosineSeries2D()
    lam = np.array([_mode_lambda(k, n) for k, n in modes])
    memory = np.atleast_1d(phi.kernel(lam, t, method, spec))
    decay = np.exp(-lam * t)
    coeffs = {}
    for i, key in enumerate(modes):
        coeffs[key] = decay[i] * g0.coefficient(*key) + memory[i] * f.coefficient(*key)
    return CosineSeries2D(coeffs)


def evolve(g0, f, phi, t, spec=T_SPEC, method="auto"):
    """Temperature at time t in [0, 1] as a cosine series."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return g0
    return _evolve_coefficients(g0, f, phi, float(t), spec, method)


def forward_final(g0, f, phi, spec=T_SPEC, method="auto"):
    """Final temperature g1 = u(., ., 1) produced by initial state g0 and source phi f."""
    return _evolve_coefficients(g0, f, phi, 1.0, spec, method)


# -- fixtures ----------------------------------------------------------------


def phi_exact():
    return TimeProfile.exp_decay(PI2, PI2)


def f_exact():
    return CosineSeries2D({(1, 1): 1.0})


def g0_exact():
    return CosineSeries2D({(1, 1): 1.0, (0, 1): 1.0})


def fixture_exact():
    """phi = pi^2 e^{-pi^2 t}, g0 = (cos pi x + 1) cos pi y, g1 = e^{-pi^2} g0,
    f = cos pi x cos pi y."""
    g0 = g0_exact()
    return Experiment(
        g0=g0,
        g1=math.exp(-PI2) * g0,
        phi=phi_exact(),
        f_true=f_exact(),
        eps=0.0,
        labels={"kind": "sec4-exact"},
        data_source=f_exact(),
    )


def _bump(m):
    """(cos(m pi x) - 1) cos(pi y) / m."""
    return CosineSeries2D({(m, 1): 1 / m, (0, 1): -1 / m})


def disturbed_source(m):
    """f_ex + m cos(m pi x) cos(pi y): the source the disturbed data actually encode."""
    return f_exact() + CosineSeries2D({(m, 1): float(m)})


def _check_m(m):
    if isinstance(m, float):
        if not m.is_integer():
            raise ParameterError(f"m must be an even integer, got {m}")
        m = int(m)
    if not isinstance(m, (int, np.integer)) or m < 2 or m % 2:
        raise ParameterError(f"m must be an even integer >= 2, got {m}")
    return int(m)


def fixture_perturbed(m):
    """Disturbed data at noise level eps = 1/m.

    g0m = g0ex + (cos m pi x - 1) cos pi y / m and g1m is the final state of the
    disturbed solution, g1ex + e^{-pi^2} (cos m pi x - 1) cos pi y / m, so that
    (g0m, g1m, phi) is exactly consistent with the source f_ex + m cos(m pi x) cos(pi y).
    """
    m = _check_m(m)
    ex = fixture_exact()
    bump = _bump(m)
    return Experiment(
        g0=ex.g0 + bump,
        g1=ex.g1 + math.exp(-PI2) * bump,
        phi=ex.phi,
        f_true=ex.f_true,
        m=m,
        eps=1 / m,
        labels={"kind": "sec4-perturbed", "m": str(m),
                "data_source": "f_ex + m cos(m pi x) cos(pi y)"},
        data_source=disturbed_source(m),
    )


def fixture_counterexample():
    """Zero data with phi = pi cos(pi t) + 2 pi^2 sin(pi t) and f = cos pi x cos pi y.

    Without the Cauchy datum at x = 1 these data admit u = sin(pi t) cos(pi x) cos(pi y).
    """
    return Experiment(
        g0=CosineSeries2D(),
        g1=CosineSeries2D(),
        phi=TimeProfile.counterexample(),
        f_true=f_exact(),
        labels={"kind": "counterexample"},
        data_source=f_exact(),
    )


def perturbation_norms(m):
    """Exact (termwise) norms quantifying the ill-posedness at index m.

    Returns the data errors ||g0m - g0ex||, ||g1m - g1ex||, the source error
    ||f~m - f_ex|| and their closed-form values sqrt(3)/(2m), e^{-pi^2} sqrt(3)/(2m), m/2.
    The data differences are taken from the added perturbation itself; subtracting
    the fixtures in floating point loses the (0, 1) mode once 1/m is below rounding.
    """
    m = _check_m(m)
    bump = _bump(m)
    return {
        "g0_err": bump.l2_norm(),
        "g1_err": (math.exp(-PI2) * bump).l2_norm(),
        "f_err": (disturbed_source(m) - f_exact()).l2_norm(),
        "g0_err_expected": math.sqrt(3.0) / (2.0 * m),
        "g1_err_expected": math.exp(-PI2) * math.sqrt(3.0) / (2.0 * m),
        "f_err_expected": m / 2.0,
    }


def custom_experiment(g0, phi, f=None, g1=None, eps=0.0, labels=None):
    """Experiment from user series; g1 is generated by the forward model when omitted."""
    if g1 is None:
        if f is None:
            raise ParameterError("custom experiment needs g1 or a source f")
        g1 = forward_final(g0, f, phi)
    return Experiment(g0=g0, g1=g1, phi=phi, f_true=f, eps=eps,
                      labels=dict(labels or {"kind": "custom-series"}), data_source=f)


def cauchy_compatible_experiment(f, phi=None, tol=1e-12):
    """Exact data for source ``f`` whose solution also satisfies u(1, y, t) = 0.

    For phi = s e^{-a t}, taking g0_k = s f_k / (lam_k - a) gives u = e^{-a t} g0, so
    the datum at x = 1 holds iff sum_k (-1)^k g0_{k,n} = 0 for every n.  A mode with
    lam = a carries no source and absorbs the residual of its row; rows without such
    a mode must already balance.
    """
    phi = phi or phi_exact()
    if phi.kind != EXP_DECAY:
        raise ParameterError("compatible data are built for exponential profiles only")
    a, s = phi.rate, phi.scale
    g0 = {}
    for (k, n), c in f.terms.items():
        gap = _mode_lambda(k, n) - a
        if abs(gap) < 1e-12 * max(a, 1.0):
            raise ParameterError(f"source mode {(k, n)} resonates with the profile rate")
        g0[(k, n)] = s * c / gap
    for n in sorted({n for _, n in g0}):
        residual = math.fsum((-1) ** k * c for (k, m), c in g0.items() if m == n)
        free = [k for k in range(int(math.isqrt(max(int(round(a / PI2)), 0))) + 1)
                if math.isclose(_mode_lambda(k, n), a, rel_tol=1e-12)]
        if free:
            k = free[0]
            g0[(k, n)] = g0.get((k, n), 0.0) - (-1) ** k * residual
        elif abs(residual) > tol:
            raise ParameterError(f"row n = {n} violates the datum at x = 1 (residual {residual:.3g})")
    g0 = CosineSeries2D(g0)
    return custom_experiment(g0, phi, f=f, labels={"kind": "cauchy-compatible"})
