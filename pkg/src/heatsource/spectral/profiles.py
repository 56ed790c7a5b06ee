"""Temporal source profiles phi(t) on [0, 1] and their exponential moments.

The central quantity is the memory integral

    K(lam, T) = int_0^T exp(lam * (s - T)) * phi(s) ds ,

whose value at T = 1, lam = alpha^2 + n^2 pi^2 is the divisor kernel D(phi).
The exponent lam * (s - T) is never positive, so nothing overflows for large lam.
"""

from dataclasses import dataclass
import math

import numpy as np

from ..errors import ParameterError
from .quadrature import T_SPEC, rule_nodes

SAMPLED = "sampled"
EXP_DECAY = "exp-decay"
CONSTANT = "constant"
COUNTEREXAMPLE = "counterexample"
KINDS = (SAMPLED, EXP_DECAY, CONSTANT, COUNTEREXAMPLE)

# Beyond this many e-foldings from T the kernel weight is below exp(-50).
_KERNEL_WINDOW = 50.0


def _cospi(t):
    if (2.0 * t).is_integer():
        return (1.0, 0.0, -1.0, 0.0)[int(2.0 * t) % 4]
    return math.cos(math.pi * t)


def _sinpi(t):
    if (2.0 * t).is_integer():
        return (0.0, 1.0, 0.0, -1.0)[int(2.0 * t) % 4]
    return math.sin(math.pi * t)


def _one_minus_exp_over(z):
    """(1 - exp(-z)) / z with the removable value 1 at z = 0."""
    z = np.asarray(z, dtype=np.float64)
    safe = np.where(z == 0.0, 1.0, z)
    return np.where(z == 0.0, 1.0, -np.expm1(-safe) / safe)


@dataclass(frozen=True, eq=False)
class TimeProfile:
    """One of the supported temporal factors.

    Use the constructors :meth:`sampled`, :meth:`exp_decay`, :meth:`constant`
    and :meth:`counterexample` rather than the raw fields.
    ``declared_condition_h`` lets the caller assert that phi keeps a fixed
    sign, bounded away from zero, near t = 1.
    """

    kind: str
    rate: float = 0.0
    scale: float = 0.0
    times: tuple = ()
    samples: tuple = ()
    declared_condition_h: bool | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown profile kind {self.kind!r}")
        if self.kind == SAMPLED:
            t = np.asarray(self.times, dtype=np.float64)
            v = np.asarray(self.samples, dtype=np.float64)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2:
                raise ParameterError("sampled profile needs matching 1-D times/values, >= 2 points")
            if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
                raise ParameterError("sample times must increase strictly from 0 to 1")
            if not np.all(np.isfinite(v)):
                raise ParameterError("sampled values must be finite")
        elif not (math.isfinite(self.rate) and math.isfinite(self.scale)):
            raise ParameterError("profile parameters must be finite")

    @classmethod
    def sampled(cls, times, values, condition_h=None):
        return cls(SAMPLED, times=tuple(map(float, times)), samples=tuple(map(float, values)),
                   declared_condition_h=condition_h)

    @classmethod
    def exp_decay(cls, rate, scale):
        """``scale * exp(-rate * t)``."""
        return cls(EXP_DECAY, rate=float(rate), scale=float(scale))

    @classmethod
    def constant(cls, c):
        return cls(CONSTANT, scale=float(c))

    @classmethod
    def counterexample(cls):
        """``pi cos(pi t) + 2 pi^2 sin(pi t)``, whose kernel vanishes at (pi, +-1)."""
        return cls(COUNTEREXAMPLE)

    @property
    def has_closed_form(self):
        return self.kind != SAMPLED

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == SAMPLED:
            return np.interp(t, self.times, self.samples)
        if self.kind == EXP_DECAY:
            return self.scale * np.exp(-self.rate * t)
        if self.kind == CONSTANT:
            return np.full_like(t, self.scale)
        return np.pi * np.cos(np.pi * t) + 2.0 * np.pi ** 2 * np.sin(np.pi * t)

    def condition_h(self):
        """Whether phi is bounded away from zero with fixed sign near t = 1.

        Closed forms are continuous, so it reduces to phi(1) != 0.  For sampled
        profiles the user declaration is returned (possibly None).
        """
        if self.kind == SAMPLED:
            return self.declared_condition_h
        return bool(self(1.0) != 0.0)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == EXP_DECAY:
            d.update(rate=self.rate, scale=self.scale)
        elif self.kind == CONSTANT:
            d.update(c=self.scale)
        elif self.kind == SAMPLED:
            d.update(times=list(self.times), values=list(self.samples))
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        if kind == EXP_DECAY:
            return cls.exp_decay(d["rate"], d["scale"])
        if kind == CONSTANT:
            return cls.constant(d["c"])
        if kind == COUNTEREXAMPLE:
            return cls.counterexample()
        if kind == SAMPLED:
            return cls.sampled(d["times"], d["values"], d.get("condition_h"))
        raise ParameterError(f"unknown profile kind {kind!r}")

    # -- memory integral -------------------------------------------------

    def kernel_closed(self, lam, t_end=1.0):
        """Closed-form K(lam, t_end); only for the named kinds."""
        lam = np.asarray(lam, dtype=np.float64)
        T = float(t_end)
        if self.kind == CONSTANT:
            return self.scale * T * _one_minus_exp_over(lam * T)
        if self.kind == EXP_DECAY:
            return self.scale * math.exp(-self.rate * T) * T * _one_minus_exp_over((lam - self.rate) * T)
        if self.kind == COUNTEREXAMPLE:
            # int_0^T e^{lam(s-T)} e^{i pi s} ds = (e^{i pi T} - e^{-lam T}) / (lam + i pi)
            c, s = _cospi(T), _sinpi(T)
            re_num = c - np.exp(-lam * T)
            den = lam * lam + np.pi ** 2
            re = (lam * re_num + np.pi * s) / den
            im = (lam * s - np.pi * re_num) / den
            return np.pi * re + 2.0 * np.pi ** 2 * im
        raise ParameterError("sampled profiles have no closed-form kernel")

    def kernel_quadrature(self, lam, t_end=1.0, spec=T_SPEC, chunk=32768):
        """K(lam, t_end) by the composite rule ``spec`` (Gauss-Legendre by default).

        The interval is split at ``t_end - min(t_end, 50/lam)`` so the boundary
        layer of width 1/lam at s = t_end always gets a full set of nodes.
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
        T = float(t_end)
        out = np.empty(lam.shape)
        if T == 0.0:
            out[:] = 0.0
            return out
        ref_nodes, ref_weights = rule_nodes(spec, 0.0, 1.0)
        flat = lam.ravel()
        res = out.ravel()
        for start in range(0, flat.size, chunk):
            lm = flat[start:start + chunk]
            width = np.minimum(T, _KERNEL_WINDOW / np.maximum(lm, 1e-300))
            split = T - width
            # layer [split, T] and bulk [0, split]
            s_layer = split[:, None] + width[:, None] * ref_nodes[None, :]
            w_layer = width[:, None] * ref_weights[None, :]
            s_bulk = split[:, None] * ref_nodes[None, :]
            w_bulk = split[:, None] * ref_weights[None, :]
            s_all = np.concatenate([s_bulk, s_layer], axis=1)
            w_all = np.concatenate([w_bulk, w_layer], axis=1)
            vals = np.exp(lm[:, None] * (s_all - T)) * self(s_all)
            res[start:start + chunk] = np.sum(w_all * vals, axis=1)
        return out

    def kernel(self, lam, t_end=1.0, method="auto", spec=T_SPEC):
        if method == "auto":
            method = "closed" if self.has_closed_form else "quadrature"
        if method == "closed":
            return self.kernel_closed(lam, t_end)
        return self.kernel_quadrature(lam, t_end, spec)
