"""Chaotic-map analogues of quantum puzzles: period doubling, escape-time
decay, fractal basins, Bell/CHSH/GHZ correlations and Tsallis entropy."""

__version__ = "0.1.0"

from ._accel import backend
from .bifurcation import (
    CHAOTIC,
    BracketError,
    bifurcation_diagram,
    detect_period,
    estimate_feigenbaum,
    find_bifurcation_points,
)
from .decay import (
    DecayConfig,
    InsufficientData,
    NoDecay,
    delay_series,
    fit_exponential,
    run_escape,
)
from .entropy import additivity_check, tsallis_entropy
from .maps import DivergenceError, DomainError, MapKind, MapSpec, eval_map, iterate_orbit
from .pendulum import PendulumParams, compute_basins, integrate_trajectory
from .quantum import (
    bell_singlet,
    chsh_classical_max,
    chsh_observables,
    chsh_quantum,
    expectation,
    ghz_contradiction,
    ghz_correlations,
    lhv_simulate,
)
