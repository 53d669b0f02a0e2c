"""Prisoner-escapee decay experiment.

An ensemble of seeds drawn from a tiny interval is iterated until each seed
first lands in an escape interval. The number of prisoners left after each
iteration follows an empirical exponential law whose half-life is fitted here.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit
from .maps import MapKind, MapSpec, _step_nb, _step_np

NEVER = -1
"""Escape-time sentinel for seeds still imprisoned after ``max_iterations``."""


class FitError(ValueError):
    pass


class NoDecay(FitError):
    """The fitted decay constant is not positive."""


class InsufficientData(FitError):
    """Too few usable points remain after windowing."""


@dataclass(frozen=True)
class DecayConfig:
    spec: MapSpec
    initial_interval: tuple
    escape_interval: tuple
    n_points: int = 10_000
    seeding: str = "even"  # "even" or "random"
    seed: int = 0
    max_iterations: int = 100_000

    def __post_init__(self):
        lo, hi = map(float, self.initial_interval)
        jlo, jhi = map(float, self.escape_interval)
        object.__setattr__(self, "initial_interval", (lo, hi))
        object.__setattr__(self, "escape_interval", (jlo, jhi))
        if not hi > lo:
            raise ValueError("initial interval must have positive width")
        if not jhi >= jlo:
            raise ValueError("escape interval must satisfy lo <= hi")
        if self.spec.kind is MapKind.LOGISTIC:
            for a, b in (self.initial_interval, self.escape_interval):
                if a < 0.0 or b > 1.0:
                    raise ValueError("logistic intervals must lie inside [0, 1]")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.seeding not in ("even", "random"):
            raise ValueError(f"seeding must be 'even' or 'random', got {self.seeding!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def seeds(self):
        """Initial points. ``random`` draws from a Philox counter-based stream."""
        lo, hi = self.initial_interval
        n = self.n_points
        if self.seeding == "random":
            rng = np.random.Generator(np.random.Philox(self.seed))
            return rng.uniform(lo, hi, n)
        if n == 1:
            return np.array([lo])
        return lo + np.arange(n) * ((hi - lo) / (n - 1))


@dataclass(frozen=True)
class SurvivalCurve:
    survivors: np.ndarray  # survivors[t] after t iterations
    escape_times: np.ndarray  # per seed; NEVER if not escaped
    n_points: int

    @property
    def no_escapes(self):
        return bool(np.all(self.escape_times == NEVER))

    @property
    def iterations(self):
        return np.arange(self.survivors.size)


@dataclass(frozen=True)
class DecayFit:
    lambda_: float
    half_life: float
    n0: float
    r_squared: float
    fit_window: tuple


@dataclass(frozen=True)
class DelaySeries:
    n_lag: int
    pairs: np.ndarray  # rows of (dt_m, dt_{m+n_lag})


# -- kernels -----------------------------------------------------------------

@njit
def _escape_nb(kind, a, seeds, jlo, jhi, max_iterations):
    out = np.empty(seeds.size, np.int64)
    for k in range(seeds.size):
        x = seeds[k]
        t = 0
        while not (jlo <= x <= jhi):
            if t == max_iterations:
                t = -1
                break
            x = _step_nb(kind, a, x)
            t += 1
        out[k] = t
    return out


def _escape_np(kind, a, seeds, jlo, jhi, max_iterations):
    out = np.full(seeds.size, -1, np.int64)
    idx = np.arange(seeds.size)
    x = seeds.copy()
    t = 0
    while idx.size:
        inside = (x >= jlo) & (x <= jhi)
        out[idx[inside]] = t
        idx, x = idx[~inside], x[~inside]
        if t == max_iterations:
            break
        x = _step_np(kind, a, x)
        t += 1
    return out


_escape = _accel.select(_escape_nb, _escape_np)


# -- public API --------------------------------------------------------------

def survival_counts(escape_times, n_points, length):
    """survivors[t] = n_points - #(seeds with escape time <= t), for t < length."""
    esc = np.asarray(escape_times)
    esc = esc[esc != NEVER]
    escaped_by = np.cumsum(np.bincount(esc, minlength=length)[:length])
    return n_points - escaped_by


def run_escape(config, workers=1):
    """Iterate every seed until it first lands in the closed escape interval.

    A seed born inside the escape interval escapes at iteration 0. The
    survivor table runs to the last escape (ending at 0), or through
    ``max_iterations`` if some seed never escaped.
    """
    seeds = config.seeds()
    jlo, jhi = config.escape_interval
    kind, a = int(config.spec.kind), config.spec.param

    def run(lo, hi):
        return _escape(kind, a, seeds[lo:hi], jlo, jhi, int(config.max_iterations))

    esc = np.concatenate(_accel.map_chunks(run, seeds.size, workers))
    if np.any(esc == NEVER):
        length = config.max_iterations + 1
    else:
        length = int(esc.max()) + 1
    survivors = survival_counts(esc, config.n_points, length)
    return SurvivalCurve(survivors=survivors, escape_times=esc, n_points=config.n_points)


def fit_exponential(curve, skip_transient=20, min_survivors=100):
    """Least-squares line through (t, ln survivors[t]) on the settled part of the curve."""
    survivors = np.asarray(curve.survivors if hasattr(curve, "survivors") else curve, dtype=float)
    t = np.arange(survivors.size, dtype=float)
    use = (t >= skip_transient) & (survivors >= min_survivors) & (survivors > 0)
    if np.count_nonzero(use) < 3:
        raise InsufficientData(
            f"only {np.count_nonzero(use)} points with t >= {skip_transient} and "
            f"survivors >= {min_survivors}; need 3")
    t, y = t[use], np.log(survivors[use])
    tm, ym = t.mean(), y.mean()
    sxx = np.sum((t - tm) ** 2)
    sxy = np.sum((t - tm) * (y - ym))
    syy = np.sum((y - ym) ** 2)
    slope = sxy / sxx
    lam = -slope
    if not lam > 0:
        raise NoDecay(f"fitted decay constant {lam} is not positive")
    r_squared = min(1.0, sxy * sxy / (sxx * syy))
    return DecayFit(
        lambda_=float(lam),
        half_life=float(math.log(2) / lam),
        n0=float(math.exp(ym - slope * tm)),
        r_squared=float(r_squared),
        fit_window=(int(t[0]), int(t[-1])),
    )


def delay_series(event_times, n_lag=1):
    """Pairs of inter-event intervals (dt[m], dt[m + n_lag])."""
    times = np.asarray(event_times, dtype=float)
    if n_lag < 1:
        raise ValueError("n_lag must be >= 1")
    if times.ndim != 1 or times.size < n_lag + 2:
        raise ValueError(f"need at least n_lag + 2 = {n_lag + 2} event times")
    dt = np.diff(times)
    if not np.all(dt > 0):
        raise ValueError("event times must be strictly increasing")
    return DelaySeries(int(n_lag), np.column_stack((dt[:-n_lag], dt[n_lag:])))
