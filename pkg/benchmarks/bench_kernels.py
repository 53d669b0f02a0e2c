"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row reports the best wall time of N runs per backend and whether the
two backends returned identical arrays. The numba column excludes the
first (compiling) call.
"""

import argparse
import time

import numpy as np

from chaosqm import _accel, bifurcation, decay, pendulum
from chaosqm.maps import MapKind
from chaosqm.pendulum import PendulumParams, cell_centers


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    logistic = int(MapKind.LOGISTIC)
    params = np.linspace(2.9, 4.0, 400)
    seeds = np.linspace(0.2, 0.2 + 1e-11, 10_000)
    args = PendulumParams(max_steps=20_000)._args()
    xs, ys = cell_centers(30, 30, (-2.0, 2.0, -2.0, 2.0))
    gx, gy = np.tile(xs, ys.size), np.repeat(ys, xs.size)
    return [
        ("bifurcation diagram 400x(1000+200)", bifurcation._diagram_nb, bifurcation._diagram_np,
         (logistic, params, 0.3, 1000, 200)),
        ("escape ensemble 10k seeds", decay._escape_nb, decay._escape_np,
         (logistic, 4.0, seeds, 0.53, 0.54, 100_000)),
        ("pendulum basins 30x30", pendulum._basins_nb, pendulum._basins_np, (gx, gy, *args)),
    ]


def same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    opts = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<38}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for name, nb, npy, args in cases():
        nb(*args)  # compile
        t_nb, out_nb = best_of(lambda: nb(*args), opts.repeat)
        t_np, out_np = best_of(lambda: npy(*args), opts.repeat)
        print(f"{name:<38}{t_nb:>10.3f}{t_np:>10.3f}{t_np / t_nb:>8.1f}x  {same(out_nb, out_np)}")


if __name__ == "__main__":
    main()
