"""Run configuration: a JSON document whose fields the command-line flags override.

Schema (every key optional)::

    {
      "experiment": {"kind": "sec4-perturbed", "m": 1e15,
                     "g0": [[k, n, c], ...], "g1": [...], "f": [...],
                     "phi": {"kind": "constant", "c": 1.0}, "eps": 0.0},
      "params": {"strategy": "power", "beta": 0.4, "q1": 0.3333, "q": 0.4,
                 "eps": 1e-6, "delta_override": null, "radius_override": null},
      "grid": {"nx": 201, "ny": 201},
      "quadrature": {"alpha_nodes": null, "t_rule": "gauss-legendre", "t_points": 32,
                     "t_panels": 1, "kernel_method": "auto"},
      "output": {"dir": "out", "formats": ["csv", "json"], "timing": true},
      "table1": {"rows": [1e-2, 1e-6, 1e-12, 1e-15], "long": false},
      "diagnostics": {"checks": ["parseval", "tail_bound", "small_divisor",
                                 "spectral_identity", "ill_posedness"],
                      "parseval_N": 2, "parseval_A": 2000.0, "tail_r": [2, 5, 10, 50],
                      "r": null, "sigma": null, "alpha_samples": 200001}
    }
"""

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
import json
import math

from .errors import ParameterError
from .forward import custom_experiment, fixture_counterexample, fixture_exact, fixture_perturbed
from .regularize import (
    DEFAULT_BETA,
    DEFAULT_Q,
    DEFAULT_Q1,
    LogRadius,
    PowerRadius,
    RegularizationParams,
    choose_params,
)
from .spectral import CosineSeries2D, QuadratureSpec, TimeProfile
from .spectral.profiles import CONSTANT

KINDS = ("sec4-exact", "sec4-perturbed", "counterexample", "custom-series")
CHECKS = ("parseval", "tail_bound", "small_divisor", "spectral_identity", "ill_posedness")
FAST_ROWS = (1e-2, 1e-6, 1e-12, 1e-15)
LONG_ROWS = (1e-20, 1e-30)
DEFAULT_EPS = 1e-6
DEFAULT_M = 10 ** 12
_SECTIONS = ("experiment", "params", "grid", "quadrature", "output", "table1", "diagnostics")


def exact_int(value, what="m"):
    """Integer from an int, an integral float or a numeric string, exactly (1e30 -> 10**30)."""
    if isinstance(value, bool):
        raise ParameterError(f"{what} must be a number")
    if isinstance(value, int):
        return value
    try:
        d = Decimal(repr(value) if isinstance(value, float) else str(value).strip())
    except InvalidOperation:
        raise ParameterError(f"{what} must be a number, got {value!r}") from None
    if not d.is_finite() or d != d.to_integral_value():
        raise ParameterError(f"{what} must be an integer, got {value!r}")
    return int(d)


def m_for_eps(eps):
    """m = 1/eps for eps = 10^-k, exactly."""
    k = round(-math.log10(eps))
    if k < 1 or not math.isclose(eps, 10.0 ** -k, rel_tol=1e-12):
        raise ParameterError(f"table rows must be 10^-k with k >= 1, got {eps}")
    return 10 ** k


def _section(raw, name):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ParameterError(f"config section {name!r} must be an object")
    return sec


def _number(sec, key, default, kind=float):
    v = sec.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParameterError(f"{key} must be a number, got {v!r}")
    return kind(v)


def _series(payload, what):
    if payload is None:
        return None
    try:
        return CosineSeries2D.from_triples(payload)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"bad series payload for {what}: {exc}") from None


@dataclass
class RunConfig:
    kind: str = "sec4-perturbed"
    m: int | None = None
    series: dict = field(default_factory=dict)
    phi: dict | None = None
    exp_eps: float = 0.0
    strategy: str = "power"
    beta: float = DEFAULT_BETA
    q1: float = DEFAULT_Q1
    q: float = DEFAULT_Q
    eps: float | None = None
    delta_override: float | None = None
    radius_override: float | None = None
    nx: int = 201
    ny: int = 201
    alpha_nodes: int | None = None
    t_rule: str = "gauss-legendre"
    t_points: int = 32
    t_panels: int = 1
    kernel_method: str = "auto"
    out_dir: str = "out"
    formats: tuple = ("csv", "json")
    timing: bool = True
    rows: tuple = FAST_ROWS
    long: bool = False
    checks: tuple = CHECKS
    diag: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ParameterError("config must be a JSON object")
        unknown = set(raw) - set(_SECTIONS)
        if unknown:
            raise ParameterError(f"unknown config sections: {sorted(unknown)}")
        ex, pa, gr = (_section(raw, s) for s in ("experiment", "params", "grid"))
        qu, ou, ta, di = (_section(raw, s) for s in ("quadrature", "output", "table1", "diagnostics"))
        cfg = cls(
            kind=ex.get("kind", cls.kind),
            m=None if ex.get("m") is None else exact_int(ex["m"]),
            series={k: _series(ex.get(k), k) for k in ("g0", "g1", "f")},
            phi=ex.get("phi"),
            exp_eps=_number(ex, "eps", 0.0),
            strategy=pa.get("strategy", cls.strategy),
            beta=_number(pa, "beta", DEFAULT_BETA),
            q1=_number(pa, "q1", DEFAULT_Q1),
            q=_number(pa, "q", DEFAULT_Q),
            eps=_number(pa, "eps", None),
            delta_override=_number(pa, "delta_override", None),
            radius_override=_number(pa, "radius_override", None),
            nx=_number(gr, "nx", 201, int),
            ny=_number(gr, "ny", 201, int),
            alpha_nodes=_number(qu, "alpha_nodes", None, int),
            t_rule=qu.get("t_rule", cls.t_rule),
            t_points=_number(qu, "t_points", 32, int),
            t_panels=_number(qu, "t_panels", 1, int),
            kernel_method=qu.get("kernel_method", cls.kernel_method),
            out_dir=str(ou.get("dir", cls.out_dir)),
            formats=tuple(ou.get("formats", ("csv", "json"))),
            timing=bool(ou.get("timing", True)),
            rows=tuple(float(r) for r in ta.get("rows", FAST_ROWS)),
            long=bool(ta.get("long", False)),
            checks=tuple(di.get("checks", CHECKS)),
            diag={k: v for k, v in di.items() if k != "checks"},
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ParameterError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ParameterError(f"config {path} is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def validate(self):
        if self.kind not in KINDS:
            raise ParameterError(f"experiment kind must be one of {KINDS}, got {self.kind!r}")
        if self.strategy not in ("log", "power"):
            raise ParameterError(f"strategy must be 'log' or 'power', got {self.strategy!r}")
        if self.m is not None and (self.m < 2 or self.m % 2):
            raise ParameterError(f"m must be an even integer >= 2, got {self.m}")
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if n < 3 or n % 2 == 0:
                raise ParameterError(f"grid {name} must be odd and >= 3, got {n}")
        if self.alpha_nodes is not None and (self.alpha_nodes < 3 or self.alpha_nodes % 2 == 0):
            raise ParameterError("quadrature.alpha_nodes must be odd and >= 3")
        if self.kernel_method not in ("auto", "closed", "quadrature"):
            raise ParameterError(f"unknown kernel_method {self.kernel_method!r}")
        bad = set(self.formats) - {"csv", "json"}
        if bad:
            raise ParameterError(f"unknown output formats {sorted(bad)}")
        bad = set(self.checks) - set(CHECKS)
        if bad:
            raise ParameterError(f"unknown diagnostics {sorted(bad)}")
        if self.eps is not None and not 0.0 < self.eps < 1.0:
            raise ParameterError(f"params.eps must lie in (0, 1), got {self.eps}")
        if not self.rows:
            raise ParameterError("table1.rows must not be empty")
        for eps in self.rows:
            m_for_eps(eps)
        self.quad_spec()
        if self.phi is not None:
            try:
                TimeProfile.from_dict(self.phi)
            except (KeyError, TypeError, AttributeError) as exc:
                raise ParameterError(f"bad phi specification: {exc!r}") from None
        LogRadius(self.beta)
        if not 0.0 < self.q1 < self.q:
            raise ParameterError(f"need 0 < q1 < q, got q1 = {self.q1}, q = {self.q}")

    # -- builders ------------------------------------------------------------

    def quad_spec(self):
        return QuadratureSpec(panels=self.t_panels, points_per_panel=self.t_points, rule=self.t_rule)

    def strategy_obj(self, name=None):
        name = name or self.strategy
        return LogRadius(self.beta) if name == "log" else PowerRadius(self.q1)

    def table_rows(self):
        rows = list(self.rows)
        if self.long:
            rows += [r for r in LONG_ROWS if r not in rows]
        return rows

    def experiment(self):
        if self.kind == "sec4-exact":
            return fixture_exact()
        if self.kind == "sec4-perturbed":
            return fixture_perturbed(self.m if self.m is not None else DEFAULT_M)
        if self.kind == "counterexample":
            return fixture_counterexample()
        g0 = self.series.get("g0") or CosineSeries2D()
        phi = TimeProfile.from_dict(self.phi or {"kind": CONSTANT, "c": 1.0})
        return custom_experiment(g0, phi, f=self.series.get("f"), g1=self.series.get("g1"),
                                 eps=self.exp_eps)

    def params_for(self, exp, strategy=None):
        eps = exp.eps if exp.eps > 0 else (self.eps if self.eps is not None else DEFAULT_EPS)
        if self.eps is not None and exp.m is None:
            eps = self.eps
        strat = self.strategy_obj(strategy)
        p = choose_params(eps, strat, self.q, self.delta_override, exp.phi.condition_h())
        if self.radius_override is not None:
            p = RegularizationParams(p.eps, p.q, p.delta, self.radius_override, strat)
        return p
