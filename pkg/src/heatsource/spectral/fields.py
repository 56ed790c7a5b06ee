"""Field representations on the unit square: sampled grids and cosine series."""

from dataclasses import dataclass, field
import math

import numpy as np

from ..errors import GridMismatchError, ParameterError
from .quadrature import simpson_weights
from .summation import kahan_sum

DEFAULT_GRID = (201, 201)


def _check_grid_size(nx, ny):
    for name, n in (("nx", nx), ("ny", ny)):
        if n < 3 or n % 2 == 0:
            raise ParameterError(f"{name} must be odd and >= 3, got {n}")


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    """Real field sampled at the nodes of the closed uniform grid on [0, 1]^2.

    ``values[i, j]`` is the value at ``(x_i, y_j)``.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ParameterError("grid values must be a 2-D array")
        _check_grid_size(*v.shape)
        if not np.all(np.isfinite(v)):
            raise ParameterError("grid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, nx, ny):
        return cls(np.zeros((nx, ny)))

    @classmethod
    def from_function(cls, func, nx, ny):
        x = np.linspace(0.0, 1.0, nx)
        y = np.linspace(0.0, 1.0, ny)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return cls(np.broadcast_to(func(X, Y), X.shape))

    @property
    def nx(self):
        return self.values.shape[0]

    @property
    def ny(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    @property
    def x(self):
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def y(self):
        return np.linspace(0.0, 1.0, self.ny)

    def _check_same_grid(self, other):
        if self.shape != other.shape:
            raise GridMismatchError(f"grid {self.shape} does not match {other.shape}")

    def __add__(self, other):
        self._check_same_grid(other)
        return GridFunction2D(self.values + other.values)

    def __sub__(self, other):
        self._check_same_grid(other)
        return GridFunction2D(self.values - other.values)

    def __mul__(self, scalar):
        return GridFunction2D(self.values * float(scalar))

    __rmul__ = __mul__


def _integrate_grid(values):
    nx, ny = values.shape
    w = np.outer(simpson_weights(nx, 0.0, 1.0), simpson_weights(ny, 0.0, 1.0))
    return kahan_sum((w * values).ravel())


def l2_norm(w):
    """L2(Omega) norm by 2-D composite Simpson on the grid nodes."""
    return math.sqrt(max(_integrate_grid(w.values * w.values), 0.0))


def l2_error(a, b):
    """L2(Omega) distance between two fields on the same grid."""
    a._check_same_grid(b)
    return l2_norm(a - b)


def _mode_weight(k):
    # integral of cos^2(k*pi*x) over (0, 1)
    return 1.0 if k == 0 else 0.5


def _cos_on_grid(k, n_points):
    """cos(k*pi*x_i) on the uniform grid, exact for arbitrarily large integer k."""
    period = 2 * (n_points - 1)
    i = np.arange(n_points, dtype=np.int64)
    phase = ((k % period) * i) % period
    return np.cos(np.pi * phase / (n_points - 1))


@dataclass(frozen=True, eq=False)
class CosineSeries2D:
    """Finite sum of ``c[k, n] * cos(k*pi*x) * cos(n*pi*y)`` with k, n >= 0.

    Parameters
    ----------
    terms : mapping
        ``{(k, n): c}``. Indices are arbitrary-size Python ints (the perturbed
        experiments use modes like k = 10**15); exact zeros are dropped.
    """

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (k, n), c in dict(self.terms).items():
            if int(k) != k or int(n) != n or k < 0 or n < 0:
                raise ParameterError(f"mode indices must be nonnegative ints, got {(k, n)}")
            c = float(c)
            if not math.isfinite(c):
                raise ParameterError(f"non-finite coefficient at mode {(k, n)}")
            key = (int(k), int(n))
            clean[key] = clean.get(key, 0.0) + c
        clean = {key: c for key, c in sorted(clean.items()) if c != 0.0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_triples(cls, triples):
        return cls({(k, n): c for k, n, c in triples})

    def to_triples(self):
        return [[k, n, c] for (k, n), c in self.terms.items()]

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, k, n):
        return self.terms.get((k, n), 0.0)

    @property
    def y_modes(self):
        return sorted({n for _, n in self.terms})

    @property
    def x_modes(self):
        return sorted({k for k, _ in self.terms})

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        out = np.zeros(np.broadcast(x, y).shape)
        for (k, n), c in self.terms.items():
            out = out + c * np.cos(k * np.pi * x) * np.cos(n * np.pi * y)
        return out

    def rasterize(self, nx, ny):
        _check_grid_size(nx, ny)
        out = np.zeros((nx, ny))
        for (k, n), c in self.terms.items():
            out += c * np.outer(_cos_on_grid(k, nx), _cos_on_grid(n, ny))
        return GridFunction2D(out)

    def l2_norm_sq(self):
        return math.fsum(c * c * _mode_weight(k) * _mode_weight(n)
                         for (k, n), c in self.terms.items())

    def l2_norm(self):
        return math.sqrt(self.l2_norm_sq())

    def dx_norm_sq(self):
        return math.fsum(c * c * (k * math.pi) ** 2 * _mode_weight(k) * _mode_weight(n)
                         for (k, n), c in self.terms.items())

    def dy_norm_sq(self):
        return math.fsum(c * c * (n * math.pi) ** 2 * _mode_weight(k) * _mode_weight(n)
                         for (k, n), c in self.terms.items())

    def h1_norm_sq(self):
        """||w||^2 + ||dw/dx||^2 + ||dw/dy||^2, termwise."""
        return self.l2_norm_sq() + self.dx_norm_sq() + self.dy_norm_sq()

    def __add__(self, other):
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0.0) + c
        return CosineSeries2D(terms)

    def __neg__(self):
        return CosineSeries2D({key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = float(scalar)
        return CosineSeries2D({key: s * c for key, c in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return f"CosineSeries2D({self.terms!r})"
