"""Command-line front end.

Each subcommand writes its outputs plus ``<name>.manifest.json`` into the
output directory (``--out``, default ``$CHAOSQM_OUTPUT_DIR`` or ``.``).
``chaosqm replay MANIFEST`` re-runs a recorded invocation.
"""

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _accel
from .bifurcation import BracketError, bifurcation_diagram, estimate_feigenbaum
from .decay import NEVER, DecayConfig, FitError, delay_series, fit_exponential, run_escape
from .entropy import additivity_check, tsallis_entropy
from .maps import DivergenceError, MapKind, MapSpec
from .pendulum import PendulumParams, compute_basins
from .pixmap import basin_rgb, write_ppm
from .quantum import (
    STRATEGIES,
    chsh_classical_max,
    chsh_quantum,
    ghz_contradiction,
    ghz_correlations,
    lhv_simulate,
)

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "CHAOSQM_OUTPUT_DIR"

log = logging.getLogger("chaosqm")


class CommandError(Exception):
    """A computation failed; reported as a JSON error object with exit code 1."""

    def __init__(self, kind, message, **extra):
        super().__init__(message)
        self.kind = kind
        self.extra = extra


class Run:
    """Output bookkeeping for one subcommand invocation."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs = []
        self.seed = None

    def path(self, name):
        p = self.out_dir / name
        self.outputs.append(p)
        return p

    def write_json(self, name, payload):
        data = {"schema_version": SCHEMA_VERSION, **payload}
        text = json.dumps(data, indent=2, allow_nan=False) + "\n"
        self.path(name).write_bytes(text.encode("utf-8"))
        return data

    def write_csv(self, name, header, columns, fmts):
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            if len(columns[0]):
                np.savetxt(fh, np.column_stack(columns), fmt=fmts, delimiter=",", newline="\n")


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- subcommands -------------------------------------------------------------

_DEFAULT_X0 = {MapKind.LOGISTIC: 0.3, MapKind.SINE: 1.0, MapKind.QUADRATIC: 0.0}


def cmd_bifurcate(args, run, parser):
    kind = MapKind.parse(args.map)
    try:
        MapSpec(kind, args.a_min), MapSpec(kind, args.a_max)
    except ValueError as exc:
        parser.error(str(exc))
    if not args.a_min < args.a_max:
        parser.error("--a-min must be less than --a-max")
    x0 = _DEFAULT_X0[kind] if args.x0 is None else args.x0
    seeds = [("bifurcation.csv", x0)]
    if args.mirror:
        seeds.append(("bifurcation_mirror.csv", -x0))
    for name, seed in seeds:
        try:
            diagram = bifurcation_diagram(kind, args.a_min, args.a_max, args.n_param, seed,
                                          args.transient, args.keep, workers=args.threads)
        except DivergenceError as exc:
            raise CommandError("Divergence", str(exc), param=exc.param, iteration=exc.index)
        pts = diagram.points
        run.write_csv(name, "param,x", [pts[:, 0], pts[:, 1]], "%.17g")
    return {"x0": x0}


def cmd_decay(args, run, parser):
    try:
        config = DecayConfig(
            spec=MapSpec(MapKind.LOGISTIC, args.a),
            initial_interval=tuple(args.interval), escape_interval=tuple(args.escape),
            n_points=args.points, seeding=args.seeding, seed=args.seed,
            max_iterations=args.max_iterations)
    except ValueError as exc:
        parser.error(str(exc))
    if args.seeding == "random":
        run.seed = args.seed
    curve = run_escape(config, workers=args.threads)
    run.write_csv("survival.csv", "iteration,survivors",
                  [curve.iterations, curve.survivors], "%d")
    escaped = np.sort(curve.escape_times[curve.escape_times != NEVER])
    if args.delay_lag is not None:
        events = np.unique(escaped)
        try:
            series = delay_series(events, args.delay_lag)
        except ValueError as exc:
            raise CommandError("InsufficientData", f"delay series: {exc}")
        run.write_csv("delay.csv", f"dt_m,dt_m_plus_{args.delay_lag}",
                      [series.pairs[:, 0], series.pairs[:, 1]], "%.17g")
    if curve.no_escapes:
        raise CommandError("NoEscapes", f"no seed escaped within {config.max_iterations} iterations")
    try:
        fit = fit_exponential(curve, args.skip_transient, args.min_survivors)
    except FitError as exc:
        raise CommandError(type(exc).__name__, str(exc))
    run.write_json("decay_fit.json", {
        "lambda": fit.lambda_, "half_life": fit.half_life, "n0": fit.n0,
        "r_squared": fit.r_squared, "fit_window": list(fit.fit_window),
        "n_points": config.n_points, "n_escaped": int(escaped.size),
    })


def cmd_basins(args, run, parser):
    try:
        params = PendulumParams(damping=args.damping, restoring=args.restoring,
                                strength=args.strength, height=args.height, step=args.step,
                                max_steps=args.max_steps, capture_radius=args.capture_radius,
                                capture_speed=args.capture_speed)
        img = compute_basins(params, args.width, args.height_px, tuple(args.window),
                             workers=args.threads)
    except ValueError as exc:
        parser.error(str(exc))
    write_ppm(run.path("basins.ppm"), basin_rgb(img.cells))
    counts = np.bincount(img.cells.ravel(), minlength=4)
    log.info("basin cell counts: unresolved=%d, 1=%d, 2=%d, 3=%d", *counts)


def cmd_bell(args, run, parser):
    mode = args.mode
    if mode == "classical":
        best, argmax = chsh_classical_max()
        payload = {"mode": mode, "max": best, "n_maximizers": len(argmax),
                   "maximizers": [list(a) for a in argmax]}
    elif mode == "quantum":
        res = chsh_quantum()
        payload = {"mode": mode, "e_qs": res.e_qs, "e_rs": res.e_rs, "e_rt": res.e_rt,
                   "e_qt": res.e_qt, "s_value": res.s_value}
    elif mode == "lhv":
        if args.trials < 1000:
            parser.error("--trials must be >= 1000")
        run.seed = args.seed
        est = lhv_simulate(args.trials, seed=args.seed, strategy=args.strategy)
        payload = {"mode": mode, "strategy": args.strategy, "n_trials": est.n_trials,
                   "s_value": est.s_value, "std_error": est.std_error,
                   **{f"e_{k.lower()}": v for k, v in est.correlations.items()}}
    elif mode == "ghz":
        res = ghz_correlations(args.phi)
        payload = {"mode": mode, "phi": list(res.phis), "expectation": res.expectation}
        for s, p in res.probabilities.items():
            payload["p_" + "".join("+" if v > 0 else "-" for v in s)] = p
    else:
        rep = ghz_contradiction()
        payload = {"mode": mode, "n_assignments": rep.n_assignments,
                   "satisfying_all_four": rep.satisfying_all_four,
                   "satisfying_first_three": rep.satisfying_first_three,
                   "forced_product": rep.forced_product, "required_product": rep.constraints[3][1]}
        for subset, n in rep.counts.items():
            payload["satisfying_" + "_".join(str(i + 1) for i in subset)] = n
    run.write_json(f"bell_{mode.replace('-', '_')}.json", payload)


def cmd_feigenbaum(args, run, parser):
    try:
        est = estimate_feigenbaum(args.map, args.levels)
    except BracketError as exc:
        raise CommandError("BracketFailure", str(exc), level_reached=exc.level)
    except ValueError as exc:
        parser.error(str(exc))
    run.write_json("feigenbaum.json", {
        "map": args.map, "levels": args.levels, "bifurcation_points": list(est.points),
        "ratios": list(est.ratios), "final": est.final,
    })


def cmd_tsallis(args, run, parser):
    p_b = args.p if args.p_b is None else args.p_b
    try:
        res = tsallis_entropy(args.p, args.q, args.k)
        chk = additivity_check(args.p, p_b, args.q, args.k)
    except ValueError as exc:
        parser.error(str(exc))
    run.write_json("tsallis.json", {
        "q": res.q, "k": res.k, "value": res.value,
        "outside_tested_regime": res.outside_tested_regime,
        "additivity_lhs": chk.lhs, "additivity_rhs": chk.rhs, "additivity_residual": chk.residual,
    })


# -- parser ------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=os.environ.get(OUTPUT_DIR_ENV, "."),
                        help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads; never changes any output byte")

    parser = argparse.ArgumentParser(prog="chaosqm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    maps = [k.name.lower() for k in MapKind]

    p = sub.add_parser("bifurcate", parents=[common], help="bifurcation diagram CSV")
    p.add_argument("--map", choices=maps, default="logistic")
    p.add_argument("--a-min", type=float, default=2.9)
    p.add_argument("--a-max", type=float, default=4.0)
    p.add_argument("--n-param", type=int, default=2000)
    p.add_argument("--transient", type=int, default=1000)
    p.add_argument("--keep", type=_positive_int, default=500)
    p.add_argument("--x0", type=float, default=None)
    p.add_argument("--mirror", action="store_true", help="also iterate from -x0")
    p.set_defaults(func=cmd_bifurcate, parser=p)

    p = sub.add_parser("decay", parents=[common], help="prisoner-escapee decay experiment")
    p.add_argument("--a", type=float, default=4.0)
    p.add_argument("--interval", type=float, nargs=2, default=[0.2, 0.2 + 1e-11])
    p.add_argument("--escape", type=float, nargs=2, default=[0.53, 0.54])
    p.add_argument("--points", type=_positive_int, default=10_000)
    p.add_argument("--seeding", choices=["even", "random"], default="even")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=_positive_int, default=100_000)
    p.add_argument("--skip-transient", type=int, default=20)
    p.add_argument("--min-survivors", type=int, default=100)
    p.add_argument("--delay-lag", type=_positive_int, default=None)
    p.set_defaults(func=cmd_decay, parser=p)

    p = sub.add_parser("basins", parents=[common], help="magnetic pendulum basins pixmap")
    p.add_argument("--width", type=int, default=600)
    p.add_argument("--height-px", "--rows", dest="height_px", type=int, default=600)
    p.add_argument("--window", type=float, nargs=4, default=[-2.0, 2.0, -2.0, 2.0],
                   metavar=("X_LO", "X_HI", "Y_LO", "Y_HI"))
    defaults = PendulumParams()
    p.add_argument("--damping", type=float, default=defaults.damping)
    p.add_argument("--restoring", type=float, default=defaults.restoring)
    p.add_argument("--strength", type=float, default=defaults.strength)
    p.add_argument("--height", type=float, default=defaults.height,
                   help="bob height above the magnet plane")
    p.add_argument("--step", type=float, default=defaults.step)
    p.add_argument("--max-steps", type=int, default=defaults.max_steps)
    p.add_argument("--capture-radius", type=float, default=defaults.capture_radius)
    p.add_argument("--capture-speed", type=float, default=defaults.capture_speed)
    p.set_defaults(func=cmd_basins, parser=p)

    p = sub.add_parser("bell", parents=[common], help="CHSH and GHZ correlations")
    p.add_argument("--mode", choices=["classical", "quantum", "lhv", "ghz", "ghz-contradiction"],
                   default="quantum")
    p.add_argument("--phi", type=float, nargs=3, default=[math.pi / 6] * 3)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="mixed")
    p.set_defaults(func=cmd_bell, parser=p)

    p = sub.add_parser("feigenbaum", parents=[common], help="Feigenbaum delta estimate")
    p.add_argument("--map", choices=["logistic", "sine"], default="logistic")
    p.add_argument("--levels", type=int, default=7)
    p.set_defaults(func=cmd_feigenbaum, parser=p)

    p = sub.add_parser("tsallis", parents=[common], help="Tsallis entropy and pseudo-additivity")
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--p-b", type=float, nargs="+", default=None,
                   help="second system for the additivity check (default: same as --p)")
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--k", type=float, default=1.0)
    p.set_defaults(func=cmd_tsallis, parser=p)

    p = sub.add_parser("replay", help="re-run the invocation recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="output directory (default: the manifest's)")
    p.set_defaults(func=None)
    return parser


_SUMMARY_FILES = {"decay": "decay_fit.json", "feigenbaum": "feigenbaum.json"}


def _replay(args):
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    argv = [manifest["subcommand"], *manifest["argv"]]
    out = args.out if args.out is not None else str(Path(args.manifest).parent)
    return main(argv + ["--out", out])


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "replay":
        return _replay(args)

    run = Run(args.out)
    started = time.perf_counter()
    status, error = 0, None
    extra = {}
    try:
        extra = args.func(args, run, args.parser) or {}
    except CommandError as exc:
        status = 1
        error = {"error": exc.kind, "message": str(exc), **exc.extra}
        summary = _SUMMARY_FILES.get(args.command, f"{args.command}_error.json")
        payload = run.write_json(summary, error)
        print(json.dumps(payload), file=sys.stdout)
    duration = time.perf_counter() - started

    params = {k: v for k, v in vars(args).items() if k not in ("func", "parser", "out", "verbose")}
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": args.command,
        "argv": argv[argv.index(args.command) + 1:],
        "params": {**params, **extra},
        "seed": run.seed,
        "version": __version__,
        "backend": _accel.backend(),
        "outputs": [{"path": p.name, "sha256": _sha256(p)} for p in run.outputs],
        "status": "error" if error else "ok",
        "duration_s": duration,
    }
    (run.out_dir / f"{args.command}.manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    for p in run.outputs:
        log.info("wrote %s", p)
    return status


if __name__ == "__main__":
    sys.exit(main())
