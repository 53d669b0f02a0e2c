"""Damped planar pendulum over three magnets, and its basins of attraction.

The bob is a point in the plane with acceleration

    a = -b v - k r + m * sum_i (p_i - r) / (|p_i - r|**2 + d**2)**1.5

where ``p_i`` are the magnet positions and ``d`` is the height of the bob
above the magnet plane. Integration is fixed-step RK4, so a basin image is a
pure function of its inputs no matter how the cells are scheduled.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from ._accel import njit

log = logging.getLogger(__name__)

UNRESOLVED = 0
CAPTURE_STEPS = 100

_S = math.sqrt(3.0) / 2.0
# 90, 210 and 330 degrees on the unit circle, written so x components cancel exactly
DEFAULT_MAGNETS = ((0.0, 1.0), (-_S, -0.5), (_S, -0.5))


class IntegrationError(ArithmeticError):
    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class PendulumParams:
    magnets: tuple = DEFAULT_MAGNETS
    damping: float = 0.2
    restoring: float = 0.5
    strength: float = 1.0
    height: float = 0.25
    step: float = 0.01
    max_steps: int = 100_000
    capture_radius: float = 0.1
    capture_speed: float = 0.05

    def __post_init__(self):
        mags = tuple((float(x), float(y)) for x, y in self.magnets)
        object.__setattr__(self, "magnets", mags)
        if len(mags) != 3:
            raise ValueError("exactly three magnets are required")
        if len(set(mags)) != 3:
            raise ValueError("magnet positions must be distinct")
        nums = (self.damping, self.restoring, self.strength, self.height, self.step,
                self.capture_radius, self.capture_speed) + sum(mags, ())
        if not all(math.isfinite(v) for v in nums):
            raise ValueError("pendulum parameters must be finite")
        if self.damping < 0 or self.restoring < 0:
            raise ValueError("damping and restoring must be >= 0")
        if not (self.strength > 0 and self.height > 0 and self.step > 0):
            raise ValueError("strength, height and step must be > 0")
        if self.max_steps < 1 or self.capture_radius <= 0 or self.capture_speed <= 0:
            raise ValueError("max_steps, capture_radius and capture_speed must be positive")

    def _args(self):
        mx = np.array([p[0] for p in self.magnets])
        my = np.array([p[1] for p in self.magnets])
        return (self.damping, self.restoring, self.strength, self.height * self.height,
                self.step, int(self.max_steps), self.capture_radius, self.capture_speed, mx, my)


@dataclass(frozen=True)
class BasinImage:
    """Attractor index per cell; row 0 is the top (largest y) of the window."""

    cells: np.ndarray
    window: tuple  # (x_lo, x_hi, y_lo, y_hi)
    steps: np.ndarray = field(repr=False, default=None)

    @property
    def width(self):
        return self.cells.shape[1]

    @property
    def height(self):
        return self.cells.shape[0]

    def cell_of(self, x, y):
        """(row, col) of the cell containing (x, y), or None outside the window."""
        x_lo, x_hi, y_lo, y_hi = self.window
        if not (x_lo <= x < x_hi and y_lo < y <= y_hi):
            return None
        col = int((x - x_lo) / (x_hi - x_lo) * self.width)
        row = int((y_hi - y) / (y_hi - y_lo) * self.height)
        return min(row, self.height - 1), min(col, self.width - 1)


def cell_centers(width, height, window):
    x_lo, x_hi, y_lo, y_hi = window
    xs = x_lo + (np.arange(width) + 0.5) * ((x_hi - x_lo) / width)
    ys = y_hi - (np.arange(height) + 0.5) * ((y_hi - y_lo) / height)
    return xs, ys


def energy(params, state):
    """Kinetic + spring + magnet potential energy for state rows (x, y, vx, vy)."""
    s = np.asarray(state, dtype=float)
    x, y, vx, vy = s[..., 0], s[..., 1], s[..., 2], s[..., 3]
    e = 0.5 * (vx * vx + vy * vy) + 0.5 * params.restoring * (x * x + y * y)
    for px, py in params.magnets:
        e = e - params.strength / np.sqrt((px - x) ** 2 + (py - y) ** 2 + params.height ** 2)
    return e


# -- kernels -----------------------------------------------------------------
# RK4 stage arithmetic is spelled out identically in both backends.

@njit
def _accel_nb(x, y, vx, vy, b, k, m, d2, mx, my):
    ax = -b * vx - k * x
    ay = -b * vy - k * y
    for i in range(3):
        dx = mx[i] - x
        dy = my[i] - y
        r2 = dx * dx + dy * dy + d2
        f = m / (r2 * math.sqrt(r2))
        ax += f * dx
        ay += f * dy
    return ax, ay


@njit
def _rk4_nb(x, y, vx, vy, b, k, m, d2, h, mx, my):
    a1x, a1y = _accel_nb(x, y, vx, vy, b, k, m, d2, mx, my)
    x2 = x + 0.5 * h * vx
    y2 = y + 0.5 * h * vy
    vx2 = vx + 0.5 * h * a1x
    vy2 = vy + 0.5 * h * a1y
    a2x, a2y = _accel_nb(x2, y2, vx2, vy2, b, k, m, d2, mx, my)
    x3 = x + 0.5 * h * vx2
    y3 = y + 0.5 * h * vy2
    vx3 = vx + 0.5 * h * a2x
    vy3 = vy + 0.5 * h * a2y
    a3x, a3y = _accel_nb(x3, y3, vx3, vy3, b, k, m, d2, mx, my)
    x4 = x + h * vx3
    y4 = y + h * vy3
    vx4 = vx + h * a3x
    vy4 = vy + h * a3y
    a4x, a4y = _accel_nb(x4, y4, vx4, vy4, b, k, m, d2, mx, my)
    c = h / 6.0
    return (x + c * (vx + 2.0 * vx2 + 2.0 * vx3 + vx4),
            y + c * (vy + 2.0 * vy2 + 2.0 * vy3 + vy4),
            vx + c * (a1x + 2.0 * a2x + 2.0 * a3x + a4x),
            vy + c * (a1y + 2.0 * a2y + 2.0 * a3y + a4y))


@njit
def _settle_nb(x, y, vx, vy, b, k, m, d2, h, max_steps, rc, vc, mx, my):
    """Return (attractor 1..3, 0 unresolved, -1 non-finite state; steps used)."""
    run = 0
    last = -1
    for s in range(max_steps):
        x, y, vx, vy = _rk4_nb(x, y, vx, vy, b, k, m, d2, h, mx, my)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(vx) and math.isfinite(vy)):
            return -1, s + 1
        near = -1
        if vx * vx + vy * vy < vc * vc:
            for i in range(3):
                dx = x - mx[i]
                dy = y - my[i]
                if dx * dx + dy * dy < rc * rc:
                    near = i
        if near < 0:
            run = 0
        elif near == last:
            run += 1
        else:
            run = 1
        last = near
        if run >= CAPTURE_STEPS:
            return near + 1, s + 1
    return 0, max_steps


@njit
def _basins_nb(xs, ys, b, k, m, d2, h, max_steps, rc, vc, mx, my):
    n = xs.size
    idx = np.empty(n, np.int8)
    steps = np.empty(n, np.int64)
    for c in range(n):
        r, s = _settle_nb(xs[c], ys[c], 0.0, 0.0, b, k, m, d2, h, max_steps, rc, vc, mx, my)
        idx[c] = r
        steps[c] = s
    return idx, steps


@njit
def _trajectory_nb(x, y, vx, vy, b, k, m, d2, h, n_steps, mx, my):
    out = np.empty((n_steps + 1, 4))
    out[0, 0], out[0, 1], out[0, 2], out[0, 3] = x, y, vx, vy
    for s in range(n_steps):
        x, y, vx, vy = _rk4_nb(x, y, vx, vy, b, k, m, d2, h, mx, my)
        out[s + 1, 0], out[s + 1, 1], out[s + 1, 2], out[s + 1, 3] = x, y, vx, vy
    return out


def _accel_np(x, y, vx, vy, b, k, m, d2, mx, my):
    ax = -b * vx - k * x
    ay = -b * vy - k * y
    for i in range(3):
        dx = mx[i] - x
        dy = my[i] - y
        r2 = dx * dx + dy * dy + d2
        f = m / (r2 * np.sqrt(r2))
        ax = ax + f * dx
        ay = ay + f * dy
    return ax, ay


def _rk4_np(x, y, vx, vy, b, k, m, d2, h, mx, my):
    a1x, a1y = _accel_np(x, y, vx, vy, b, k, m, d2, mx, my)
    x2 = x + 0.5 * h * vx
    y2 = y + 0.5 * h * vy
    vx2 = vx + 0.5 * h * a1x
    vy2 = vy + 0.5 * h * a1y
    a2x, a2y = _accel_np(x2, y2, vx2, vy2, b, k, m, d2, mx, my)
    x3 = x + 0.5 * h * vx2
    y3 = y + 0.5 * h * vy2
    vx3 = vx + 0.5 * h * a2x
    vy3 = vy + 0.5 * h * a2y
    a3x, a3y = _accel_np(x3, y3, vx3, vy3, b, k, m, d2, mx, my)
    x4 = x + h * vx3
    y4 = y + h * vy3
    vx4 = vx + h * a3x
    vy4 = vy + h * a3y
    a4x, a4y = _accel_np(x4, y4, vx4, vy4, b, k, m, d2, mx, my)
    c = h / 6.0
    return (x + c * (vx + 2.0 * vx2 + 2.0 * vx3 + vx4),
            y + c * (vy + 2.0 * vy2 + 2.0 * vy3 + vy4),
            vx + c * (a1x + 2.0 * a2x + 2.0 * a3x + a4x),
            vy + c * (a1y + 2.0 * a2y + 2.0 * a3y + a4y))


def _basins_np(xs, ys, b, k, m, d2, h, max_steps, rc, vc, mx, my):
    n = xs.size
    idx = np.zeros(n, np.int8)
    steps = np.full(n, max_steps, np.int64)
    live = np.arange(n)
    x, y = xs.copy(), ys.copy()
    vx, vy = np.zeros(n), np.zeros(n)
    run = np.zeros(n, np.int64)
    last = np.full(n, -1, np.int64)
    for s in range(max_steps):
        if live.size == 0:
            break
        x, y, vx, vy = _rk4_np(x, y, vx, vy, b, k, m, d2, h, mx, my)
        near = np.full(live.size, -1, np.int64)
        slow = vx * vx + vy * vy < vc * vc
        for i in range(3):
            dx = x - mx[i]
            dy = y - my[i]
            near[slow & (dx * dx + dy * dy < rc * rc)] = i
        run = np.where(near < 0, 0, np.where(near == last, run + 1, 1))
        last = near
        bad = ~(np.isfinite(x) & np.isfinite(y) & np.isfinite(vx) & np.isfinite(vy))
        done = bad | (run >= CAPTURE_STEPS)
        if done.any():
            idx[live[done]] = np.where(bad[done], -1, near[done] + 1)
            steps[live[done]] = s + 1
            keep = ~done
            live, x, y, vx, vy = live[keep], x[keep], y[keep], vx[keep], vy[keep]
            run, last = run[keep], last[keep]
    return idx, steps


_basins = _accel.select(_basins_nb, _basins_np)


def _trajectory_np(x, y, vx, vy, b, k, m, d2, h, n_steps, mx, my):
    out = np.empty((n_steps + 1, 4))
    out[0] = x, y, vx, vy
    for s in range(n_steps):
        x, y, vx, vy = _rk4_np(x, y, vx, vy, b, k, m, d2, h, mx, my)
        out[s + 1] = x, y, vx, vy
    return out


_trajectory = _accel.select(_trajectory_nb, _trajectory_np)


# -- public API --------------------------------------------------------------

def integrate_trajectory(params, x0, v0=(0.0, 0.0)):
    """Integrate until the bob settles over a magnet.

    Settling means staying within ``capture_radius`` of one magnet at speed
    below ``capture_speed`` for 100 consecutive steps. Returns
    ``(attractor index 1..3 or UNRESOLVED, steps used)``.
    """
    r, s = _settle_one(float(x0[0]), float(x0[1]), float(v0[0]), float(v0[1]), params)
    if r < 0:
        raise IntegrationError(f"non-finite state at step {s}", step=s)
    return r, s


def _settle_one(x, y, vx, vy, params):
    b, k, m, d2, h, max_steps, rc, vc, mx, my = params._args()
    if _accel.USE_NUMBA:
        r, s = _settle_nb(x, y, vx, vy, b, k, m, d2, h, max_steps, rc, vc, mx, my)
        return int(r), int(s)
    run, last = 0, -1
    for s in range(max_steps):
        x, y, vx, vy = _rk4_np(x, y, vx, vy, b, k, m, d2, h, mx, my)
        if not all(math.isfinite(v) for v in (x, y, vx, vy)):
            return -1, s + 1
        near = -1
        if vx * vx + vy * vy < vc * vc:
            for i in range(3):
                if (x - mx[i]) ** 2 + (y - my[i]) ** 2 < rc * rc:
                    near = i
        run = 0 if near < 0 else (run + 1 if near == last else 1)
        last = near
        if run >= CAPTURE_STEPS:
            return near + 1, s + 1
    return 0, max_steps


def trajectory(params, x0, v0=(0.0, 0.0), n_steps=1000):
    """States (x, y, vx, vy) at every step, shape (n_steps + 1, 4)."""
    b, k, m, d2, h, _, _, _, mx, my = params._args()
    return _trajectory(float(x0[0]), float(x0[1]), float(v0[0]), float(v0[1]),
                       b, k, m, d2, h, int(n_steps), mx, my)


def compute_basins(params, width, height, window=(-2.0, 2.0, -2.0, 2.0), workers=1):
    """Attractor index for a bob released at rest from each cell center.

    Cells whose integration produces a non-finite state are reported
    UNRESOLVED and counted in a log warning.
    """
    x_lo, x_hi, y_lo, y_hi = map(float, window)
    if not (x_lo < x_hi and y_lo < y_hi):
        raise ValueError("window must be non-degenerate")
    if width < 2 or height < 2:
        raise ValueError("width and height must be >= 2")
    window = (x_lo, x_hi, y_lo, y_hi)
    xs, ys = cell_centers(int(width), int(height), window)
    gx = np.tile(xs, ys.size)
    gy = np.repeat(ys, xs.size)
    b, k, m, d2, h, max_steps, rc, vc, mx, my = params._args()

    def run(lo, hi):
        return _basins(gx[lo:hi], gy[lo:hi], b, k, m, d2, h, max_steps, rc, vc, mx, my)

    blocks = _accel.map_chunks(run, gx.size, workers)
    idx = np.concatenate([blk[0] for blk in blocks])
    steps = np.concatenate([blk[1] for blk in blocks])
    failed = int(np.count_nonzero(idx < 0))
    if failed:
        log.warning("%d cells hit a non-finite state and are marked unresolved", failed)
        idx[idx < 0] = UNRESOLVED
    shape = (int(height), int(width))
    return BasinImage(cells=idx.reshape(shape), window=window, steps=steps.reshape(shape))
