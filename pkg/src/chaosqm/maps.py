"""One-dimensional iterated maps: quadratic, logistic and sine."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit


class DomainError(ValueError):
    """An argument lies outside the domain of a map."""


class DivergenceError(ArithmeticError):
    """An orbit left the invariant domain of its map."""

    def __init__(self, message, index, param=None):
        super().__init__(message)
        self.index = index
        self.param = param


class MapKind(enum.IntEnum):
    QUADRATIC = 0
    LOGISTIC = 1
    SINE = 2

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown map kind {name!r}; expected one of "
                             f"{', '.join(k.name.lower() for k in cls)}") from None


@dataclass(frozen=True)
class MapSpec:
    """A map kind and its control parameter.

    ``param`` is ``c`` in ``x -> x**2 + c`` and ``A`` in ``x -> A*x*(1-x)``
    and ``x -> A*sin(x)``.
    """

    kind: MapKind
    param: float

    def __post_init__(self):
        object.__setattr__(self, "kind", MapKind.parse(self.kind))
        object.__setattr__(self, "param", float(self.param))
        if not math.isfinite(self.param):
            raise ValueError(f"map parameter must be finite, got {self.param}")
        if self.kind is MapKind.LOGISTIC and not 0.0 <= self.param <= 4.0:
            raise ValueError(f"logistic map requires 0 <= A <= 4, got A={self.param}")


@dataclass(frozen=True)
class Orbit:
    x0: float
    transient_len: int
    values: np.ndarray


def eval_map(spec, x):
    """Apply the map once."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"map argument must be finite, got {x}")
    a = spec.param
    if spec.kind is MapKind.LOGISTIC:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"logistic map argument must lie in [0, 1], got {x}")
        return a * x * (1.0 - x)
    if spec.kind is MapKind.SINE:
        return a * math.sin(x)
    return x * x + a


# -- kernels -----------------------------------------------------------------
# Every kernel evaluates the map with the operation order used by eval_map.

@njit
def _step_nb(kind, a, x):
    if kind == 1:
        return a * x * (1.0 - x)
    if kind == 2:
        return a * math.sin(x)
    return x * x + a


@njit
def _ok_nb(kind, x):
    if kind == 1:
        return 0.0 <= x <= 1.0
    return math.isfinite(x)


@njit
def _orbit_nb(kind, a, x0, n_transient, n_keep):
    """Return (kept iterates, index of first bad iterate or -1)."""
    out = np.empty(n_keep)
    x = x0
    for i in range(n_transient):
        x = _step_nb(kind, a, x)
        if not _ok_nb(kind, x):
            return out, i + 1
    for i in range(n_keep):
        x = _step_nb(kind, a, x)
        if not _ok_nb(kind, x):
            return out, n_transient + i + 1
        out[i] = x
    return out, -1


def _step_py(kind, a, x):
    if kind == 1:
        return a * x * (1.0 - x)
    if kind == 2:
        return a * math.sin(x)
    return x * x + a


def _ok_py(kind, x):
    if kind == 1:
        return 0.0 <= x <= 1.0
    return math.isfinite(x)


def _orbit_np(kind, a, x0, n_transient, n_keep):
    # a single orbit is inherently sequential; scalar floats beat 0-d arrays here
    out = np.empty(n_keep)
    x = x0
    for i in range(n_transient):
        x = _step_py(kind, a, x)
        if not _ok_py(kind, x):
            return out, i + 1
    for i in range(n_keep):
        x = _step_py(kind, a, x)
        if not _ok_py(kind, x):
            return out, n_transient + i + 1
        out[i] = x
    return out, -1


def _step_np(kind, a, x):
    if kind == 1:
        return a * x * (1.0 - x)
    if kind == 2:
        return a * np.sin(x)
    return x * x + a


def _ok_np(kind, x):
    if kind == 1:
        return (x >= 0.0) & (x <= 1.0)
    return np.isfinite(x)


_orbit = _accel.select(_orbit_nb, _orbit_np)


def iterate_orbit(spec, x0, n_transient, n_keep):
    """Iterate ``spec`` from ``x0``, drop ``n_transient`` iterates, keep the next ``n_keep``.

    Raises DivergenceError (with the 1-based iterate index) if the orbit leaves
    the map's invariant domain: [0, 1] for the logistic map, the finite reals
    otherwise.
    """
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")
    if n_transient < 0:
        raise ValueError("n_transient must be >= 0")
    x0 = float(x0)
    if not math.isfinite(x0):
        raise DomainError(f"seed must be finite, got {x0}")
    if spec.kind is MapKind.LOGISTIC and not 0.0 <= x0 <= 1.0:
        raise DomainError(f"logistic seed must lie in [0, 1], got {x0}")
    values, bad = _orbit(int(spec.kind), spec.param, x0, int(n_transient), int(n_keep))
    if bad >= 0:
        raise DivergenceError(
            f"{spec.kind.name.lower()} orbit with parameter {spec.param} left its domain "
            f"at iteration {bad}", index=int(bad), param=spec.param)
    return Orbit(x0=x0, transient_len=int(n_transient), values=values)
