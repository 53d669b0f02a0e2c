"""One test per acceptance criterion; each prints a PASS/FAIL line with the measured values."""

import itertools
import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from conftest import basin_image, record_acceptance

from basin_checks import energy_violations, rotation_agreement
from chaosqm import bifurcation
from chaosqm.bifurcation import CHAOTIC, detect_period, estimate_feigenbaum, find_bifurcation_points
from chaosqm.decay import DecayConfig, fit_exponential, run_escape
from chaosqm.entropy import additivity_check, tsallis_entropy
from chaosqm.maps import MapSpec
from chaosqm.pendulum import DEFAULT_MAGNETS
from chaosqm.pixmap import BASIN_PALETTE, read_ppm
from chaosqm.quantum import chsh_classical_max, chsh_quantum, ghz_contradiction, ghz_correlations

DELTA = 4.66920161


def report(number, title, checks):
    """Record one line per criterion; ``checks`` maps a label to (ok, measured)."""
    ok = all(passed for passed, _ in checks.values())
    detail = "; ".join(f"{k}={v}" for k, (_, v) in checks.items())
    record_acceptance(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    failed = [k for k, (passed, _) in checks.items() if not passed]
    assert not failed, f"criterion {number} failed: {failed}"


def chaosqm(*argv, env=None):
    return subprocess.run([sys.executable, "-m", "chaosqm", *argv], capture_output=True,
                          text=True, env=env)


def test_1_decay_half_life():
    t0 = time.perf_counter()
    cfg = DecayConfig(MapSpec("logistic", 4.0), (0.2, 0.2 + 1e-11), (0.53, 0.54), n_points=10_000)
    fit = fit_exponential(run_escape(cfg))
    elapsed = time.perf_counter() - t0
    report(1, "decay half-life", {
        "half_life": (abs(fit.half_life - 107) <= 10, f"{fit.half_life:.2f}"),
        "r2": (fit.r_squared > 0.99, f"{fit.r_squared:.5f}"),
        "seconds": (elapsed < 10, f"{elapsed:.2f}"),
    })


def test_2_chsh():
    best, _ = chsh_classical_max()
    res = chsh_quantum()
    r2 = 1 / math.sqrt(2)
    comp = max(abs(e - s * r2) for e, s in zip((res.e_qs, res.e_rs, res.e_rt, res.e_qt), (1, 1, 1, -1)))
    report(2, "CHSH pair", {
        "classical_max": (best == 2, best),
        "quantum_S_err": (abs(res.s_value - 2 * math.sqrt(2)) < 1e-12, f"{abs(res.s_value - 2 * math.sqrt(2)):.1e}"),
        "component_err": (comp < 1e-12, f"{comp:.1e}"),
    })


def test_3_ghz():
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 2 * math.pi, 21, endpoint=False)
    worst = max(abs(ghz_correlations(p).expectation - math.sin(sum(p)))
                for p in itertools.product(grid, repeat=3))
    plus = ghz_correlations((math.pi / 2, 0.0, 0.0)).expectation
    minus = ghz_correlations((math.pi / 2,) * 3).expectation
    rep = ghz_contradiction()
    elapsed = time.perf_counter() - t0
    report(3, "GHZ suite", {
        "grid_err": (worst < 1e-12, f"{worst:.1e}"),
        "E(pi/2)": (abs(plus - 1) < 1e-12, plus),
        "E(3pi/2)": (abs(minus + 1) < 1e-12, minus),
        "all_four": (rep.satisfying_all_four == 0, f"{rep.satisfying_all_four}/{rep.n_assignments}"),
        "seconds": (elapsed < 1, f"{elapsed:.2f}"),
    })


def test_4_feigenbaum():
    bifurcation._cascade.cache_clear()
    t0 = time.perf_counter()
    logistic = estimate_feigenbaum("logistic", 7).final  # A_7 opens period 128
    sine = estimate_feigenbaum("sine", 6).final
    elapsed = time.perf_counter() - t0
    report(4, "Feigenbaum delta", {
        "logistic": (abs(logistic - DELTA) / DELTA < 0.01, f"{logistic:.5f}"),
        "sine": (abs(sine - DELTA) / DELTA < 0.02, f"{sine:.5f}"),
        "seconds": (elapsed < 60, f"{elapsed:.1f}"),
    })


def test_5_bifurcation_landmarks():
    bifurcation._cascade.cache_clear()
    t0 = time.perf_counter()
    a1, a2 = find_bifurcation_points("logistic", 3).values[:2]
    p383 = detect_period(MapSpec("logistic", 3.83))
    elapsed = time.perf_counter() - t0
    report(5, "bifurcation landmarks", {
        "A1": (abs(a1 - 3.0) <= 1e-5, f"{a1:.7f}"),
        "A2": (abs(a2 - 3.449490) <= 1e-5, f"{a2:.7f}"),
        "period(3.83)": (p383 == 3, "chaotic" if p383 is CHAOTIC else p383),
        "seconds": (elapsed < 30, f"{elapsed:.1f}"),
    })


def test_6_tsallis():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        a = rng.dirichlet(np.ones(rng.integers(2, 9)))
        b = rng.dirichlet(np.ones(rng.integers(2, 9)))
        q = rng.uniform(0.2, 3.0)
        worst = max(worst, additivity_check(a / a.sum(), b / b.sum(), q).residual)
    cont = 0.0
    for _ in range(100):
        p = rng.dirichlet(np.ones(rng.integers(2, 9)))
        p = p / p.sum()
        s1 = tsallis_entropy(p, 1.0).value
        cont = max(cont, *(abs(tsallis_entropy(p, q).value - s1) for q in (1 - 1e-6, 1 + 1e-6)))
    s2 = tsallis_entropy([0.5, 0.5], 2).value
    comp = additivity_check([0.5, 0.5], [0.5, 0.5], 2)
    report(6, "Tsallis identities", {
        "additivity_residual": (worst < 1e-12, f"{worst:.1e}"),
        "q->1": (cont < 1e-4, f"{cont:.1e}"),
        "S2(uniform2)": (s2 == 0.5, s2),
        "composite": (abs(comp.lhs - 0.75) < 1e-12 and abs(comp.rhs - 0.75) < 1e-12, f"{comp.lhs:.15g}"),
    })


def test_7_basins(tmp_path):
    t0 = time.perf_counter()
    proc = chaosqm("basins", "--out", str(tmp_path))
    elapsed = time.perf_counter() - t0
    assert proc.returncode == 0, proc.stderr
    rgb = read_ppm(tmp_path / "basins.ppm")
    self_coloured = 0
    for i, (x, y) in enumerate(DEFAULT_MAGNETS):
        row, col = int((2 - y) / 4 * 600), int((x + 2) / 4 * 600)
        self_coloured += rgb[row, col].tolist() == BASIN_PALETTE[i + 1].tolist()
    frac, n = rotation_agreement(basin_image(300, 300))
    rise = energy_violations(n_trajectories=100)
    ref = basin_image(300, 300).cells.tobytes()
    same = all(basin_image(300, 300, workers=w).cells.tobytes() == ref for w in (4, 8))
    report(7, "basin properties", {
        "magnets_self_coloured": (self_coloured == 3, f"{self_coloured}/3"),
        "rotation_agreement": (frac >= 0.99, f"{frac:.4f} of {n}"),
        "max_energy_rise": (rise <= 1e-6, f"{rise:.1e}"),
        "workers_1_4_8_identical": (same, same),
        "cli_600x600_seconds": (elapsed < 300, f"{elapsed:.1f}"),
    })


REPLAY_CASES = [
    ["bifurcate", "--n-param", "300", "--keep", "100"],
    ["bifurcate", "--map", "sine", "--a-min", "-3", "--a-max", "3", "--n-param", "200", "--mirror"],
    ["decay", "--delay-lag", "1"],
    ["decay", "--seeding", "random", "--seed", "11", "--interval", "0.2", "0.3", "--points", "5000"],
    ["basins", "--width", "80", "--height-px", "80", "--window", "-0.5", "0.5", "0.5", "1.5"],
    ["bell", "--mode", "classical"],
    ["bell", "--mode", "quantum"],
    ["bell", "--mode", "lhv", "--trials", "100000", "--seed", "5"],
    ["bell", "--mode", "ghz", "--phi", "0.1", "0.2", "0.3"],
    ["bell", "--mode", "ghz-contradiction"],
    ["feigenbaum", "--map", "logistic", "--levels", "7"],
    ["tsallis", "--p", "0.2", "0.3", "0.5", "--p-b", "0.6", "0.4", "--q", "1.7"],
]


def test_8_cli_reproducibility(tmp_path):
    mismatched = []
    for n, argv in enumerate(REPLAY_CASES):
        first, second = tmp_path / f"{n}a", tmp_path / f"{n}b"
        proc = chaosqm(*argv, "--out", str(first))
        assert proc.returncode == 0, (argv, proc.stderr)
        manifest = first / f"{argv[0]}.manifest.json"
        proc = chaosqm("replay", str(manifest), "--out", str(second))
        assert proc.returncode == 0, (argv, proc.stderr)
        outputs = json.loads(manifest.read_text())["outputs"]
        for o in outputs:
            if (first / o["path"]).read_bytes() != (second / o["path"]).read_bytes():
                mismatched.append(" ".join(argv) + " -> " + o["path"])
    commands = sorted({argv[0] for argv in REPLAY_CASES})
    report(8, "CLI reproducibility", {
        "subcommands": (len(commands) == 6, ",".join(commands)),
        "runs": (True, len(REPLAY_CASES)),
        "byte_mismatches": (not mismatched, mismatched or 0),
    })
