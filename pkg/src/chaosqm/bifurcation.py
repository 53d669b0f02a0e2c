"""Bifurcation diagrams, period detection and the period-doubling cascade."""

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit
from .maps import DivergenceError, MapKind, MapSpec, _ok_nb, _ok_np, _ok_py, _step_nb, _step_np, _step_py

CHAOTIC = None
"""Returned by :func:`detect_period` when no period up to ``max_period`` is found."""

MAX_LEVELS = 8

# (first parameter with a stable fixed point, search ceiling, critical point)
_CASCADE_SEARCH = {
    MapKind.LOGISTIC: (2.5, 4.0, 0.5),
    MapKind.SINE: (1.5, math.pi, math.pi / 2),
}


class BracketError(RuntimeError):
    """A period transition could not be bracketed."""

    def __init__(self, message, level, found=()):
        super().__init__(message)
        self.level = level
        self.found = tuple(found)


@dataclass(frozen=True)
class BifurcationDiagram:
    spec_kind: MapKind
    params: np.ndarray
    x: np.ndarray  # shape (n_param, n_keep)
    x0: float
    n_transient: int
    n_keep: int
    param_range: tuple

    @property
    def n_param(self):
        return self.params.size

    @property
    def points(self):
        """(param, x) rows ordered by parameter, then iterate index."""
        return np.column_stack((np.repeat(self.params, self.n_keep), self.x.ravel()))


@dataclass(frozen=True)
class BifurcationPoints:
    spec_kind: MapKind
    values: tuple


@dataclass(frozen=True)
class FeigenbaumEstimate:
    spec_kind: MapKind
    points: tuple
    ratios: tuple
    final: float


# -- kernels -----------------------------------------------------------------

@njit
def _diagram_nb(kind, params, x0, n_transient, n_keep):
    n = params.size
    out = np.empty((n, n_keep))
    for j in range(n):
        a = params[j]
        x = x0
        for i in range(n_transient + n_keep):
            x = _step_nb(kind, a, x)
            if not _ok_nb(kind, x):
                return out, j, i + 1
            if i >= n_transient:
                out[j, i - n_transient] = x
    return out, -1, -1


def _diagram_np(kind, params, x0, n_transient, n_keep):
    out = np.empty((params.size, n_keep))
    x = np.full(params.size, x0)
    for i in range(n_transient + n_keep):
        x = _step_np(kind, params, x)
        ok = _ok_np(kind, x)
        if not ok.all():
            return out, int(np.flatnonzero(~ok)[0]), i + 1
        if i >= n_transient:
            out[:, i - n_transient] = x
    return out, -1, -1


@njit
def _detect_nb(kind, a, x0, n_transient, max_period, tol):
    """Return (smallest matching period or 0, index of first bad iterate or -1)."""
    x = x0
    for i in range(n_transient):
        x = _step_nb(kind, a, x)
        if not _ok_nb(kind, x):
            return 0, i + 1
    window = 4 * max_period
    buf = np.empty(window + max_period)
    for i in range(window + max_period):
        buf[i] = x
        x = _step_nb(kind, a, x)
        if not _ok_nb(kind, x):
            return 0, n_transient + i + 1
    for p in range(1, max_period + 1):
        matched = True
        for i in range(window):
            if not abs(buf[i + p] - buf[i]) < tol:
                matched = False
                break
        if matched:
            return p, -1
    return 0, -1


def _detect_np(kind, a, x0, n_transient, max_period, tol):
    x = x0
    for i in range(n_transient):
        x = _step_py(kind, a, x)
        if not _ok_py(kind, x):
            return 0, i + 1
    window = 4 * max_period
    buf = np.empty(window + max_period)
    for i in range(window + max_period):
        buf[i] = x
        x = _step_py(kind, a, x)
        if not _ok_py(kind, x):
            return 0, n_transient + i + 1
    for p in range(1, max_period + 1):
        if np.all(np.abs(buf[p:p + window] - buf[:window]) < tol):
            return p, -1
    return 0, -1


_diagram = _accel.select(_diagram_nb, _diagram_np)
_detect = _accel.select(_detect_nb, _detect_np)


# -- public API --------------------------------------------------------------

def default_seed(kind):
    """The critical point of the map, which every stable cycle attracts."""
    kind = MapKind.parse(kind)
    if kind is MapKind.LOGISTIC:
        return 0.5
    if kind is MapKind.SINE:
        return math.pi / 2
    return 0.0


def bifurcation_diagram(spec_kind, param_lo, param_hi, n_param, x0, n_transient, n_keep, workers=1):
    """Post-transient iterates for ``n_param`` evenly spaced parameters.

    Columns are independent; ``workers`` splits them across threads without
    changing any output value.
    """
    kind = MapKind.parse(spec_kind)
    if not param_lo < param_hi:
        raise ValueError("param_lo must be < param_hi")
    if n_param < 2:
        raise ValueError("n_param must be >= 2")
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")
    # validates the range endpoints (logistic requires 0 <= A <= 4)
    MapSpec(kind, param_lo), MapSpec(kind, param_hi)
    params = np.linspace(param_lo, param_hi, int(n_param))
    x0 = float(x0)

    def run(lo, hi):
        return _diagram(int(kind), params[lo:hi], x0, int(n_transient), int(n_keep))

    bounds = _accel.chunk_bounds(params.size, workers)
    blocks = _accel.map_chunks(run, params.size, workers)
    for (lo, _), (_, bad_col, bad_iter) in zip(bounds, blocks):
        if bad_col >= 0:
            a = float(params[lo + bad_col])
            raise DivergenceError(f"orbit diverged at parameter {a} (iteration {bad_iter})",
                                  index=int(bad_iter), param=a)
    x = np.concatenate([b[0] for b in blocks], axis=0)
    return BifurcationDiagram(kind, params, x, x0, int(n_transient), int(n_keep),
                              (float(param_lo), float(param_hi)))


def detect_period(spec, max_period=64, tol=1e-9, n_transient=10_000, x0=None):
    """Smallest period p <= max_period of the post-transient orbit, or CHAOTIC.

    A period p is accepted when ``|x[n+p] - x[n]| < tol`` over a verification
    window of ``4 * max_period`` consecutive iterates.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if x0 is None:
        x0 = default_seed(spec.kind)
    p, bad = _detect(int(spec.kind), spec.param, float(x0), int(n_transient), int(max_period), float(tol))
    if bad >= 0:
        raise DivergenceError(f"orbit diverged at parameter {spec.param} (iteration {bad})",
                              index=int(bad), param=spec.param)
    return p if p > 0 else CHAOTIC


def cascade_transient(level):
    """Transient used when bracketing the birth of period 2**level.

    Below a period-doubling point the old cycle attracts with multiplier
    close to -1, so an unconverged orbit masquerades as the doubled period and
    biases the located point low by roughly 1/transient (in map iterations).
    That bias shrinks at higher levels, which is why the transient does too.
    """
    return max(4_000_000 // level, 1_000_000)


def _locate(kind, level, start, step, ceiling, x0, xtol):
    old = 2 ** (level - 1)
    max_period = 2 ** (level + 1)
    n_transient = cascade_transient(level)

    def is_old(a):
        p, _ = _detect(int(kind), a, x0, n_transient, max_period, 1e-9)
        return p == old

    lo = hi = None
    for k in range(1, 257):
        a = start + k * step
        if a > ceiling:
            break
        if is_old(a):
            lo = a
        elif lo is not None:
            hi = a
            break
    if lo is None or hi is None:
        return None
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if is_old(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@functools.lru_cache(maxsize=None)
def _cascade(kind, n_levels, x0, xtol):
    if n_levels == 0:
        return ()
    found = _cascade(kind, n_levels - 1, x0, xtol)
    first, ceiling, _ = _CASCADE_SEARCH[kind]
    if len(found) == 0:
        start, step = first, (ceiling - first) / 64
        start -= step
    else:
        prev = found[-2] if len(found) > 1 else first
        step = (found[-1] - prev) / 16
        start = found[-1]
    a_n = _locate(kind, n_levels, start, step, ceiling, x0, xtol)
    if a_n is None:
        raise BracketError(
            f"could not bracket the birth of period {2 ** n_levels} for the "
            f"{kind.name.lower()} map (reached level {n_levels - 1})",
            level=n_levels - 1, found=found)
    return found + (a_n,)


def find_bifurcation_points(spec_kind, n_levels, x0=None, xtol=1e-10):
    """Parameters A_1 < A_2 < ... where periods 2, 4, ..., 2**n_levels are born.

    Each A_n is bisected on the integer output of the period detector to a
    bracket no wider than ``xtol``.
    """
    kind = MapKind.parse(spec_kind)
    if kind not in _CASCADE_SEARCH:
        raise ValueError(f"no period-doubling search range for the {kind.name.lower()} map")
    if not 3 <= n_levels <= MAX_LEVELS:
        raise ValueError(f"n_levels must be in [3, {MAX_LEVELS}], got {n_levels}")
    if x0 is None:
        x0 = _CASCADE_SEARCH[kind][2]
    return BifurcationPoints(kind, _cascade(kind, int(n_levels), float(x0), float(xtol)))


def estimate_feigenbaum(spec_kind, n_levels, x0=None):
    """Successive gap ratios (A[k+1]-A[k]) / (A[k+2]-A[k+1]) of the cascade."""
    if n_levels < 4:
        raise ValueError("n_levels must be >= 4")
    pts = find_bifurcation_points(spec_kind, n_levels, x0=x0).values
    a = np.asarray(pts)
    gaps = np.diff(a)
    ratios = tuple(float(r) for r in gaps[:-1] / gaps[1:])
    return FeigenbaumEstimate(MapKind.parse(spec_kind), pts, ratios, ratios[-1])
