"""Exact CHSH and GHZ correlation arithmetic.

Two-qubit kets are ordered |00>, |01>, |10>, |11> with qubit 1 as the most
significant position.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

TSIRELSON = 2.0 * math.sqrt(2.0)
CHSH_SIGNS = (1, 1, 1, -1)  # QS + RS + RT - QT


class NumericalInconsistency(ArithmeticError):
    pass


@dataclass(frozen=True)
class CHSHResult:
    e_qs: float
    e_rs: float
    e_rt: float
    e_qt: float

    @property
    def s_value(self):
        return self.e_qs + self.e_rs + self.e_rt - self.e_qt


@dataclass(frozen=True)
class LHVEstimate:
    s_value: float
    std_error: float
    correlations: dict  # "QS", "RS", "RT", "QT" -> empirical mean
    counts: dict
    n_trials: int


@dataclass(frozen=True)
class GHZResult:
    phis: tuple
    probabilities: dict  # (s1, s2, s3) -> probability
    expectation: float


@dataclass(frozen=True)
class GHZReport:
    n_assignments: int
    constraints: tuple  # (settings, required product)
    counts: dict  # tuple of constraint indices -> satisfying assignments
    satisfying_all_four: int
    satisfying_first_three: int
    forced_product: int  # product implied for the last constraint by the first three


def bell_singlet():
    """(|01> - |10>) / sqrt(2)."""
    s = 1.0 / math.sqrt(2.0)
    return np.array([0.0, s, -s, 0.0], dtype=complex)


def check_state(state, atol=1e-12):
    state = np.asarray(state, dtype=complex)
    n = state.size
    if n < 2 or n & (n - 1):
        raise ValueError("state length must be a power of two")
    norm = float(np.vdot(state, state).real)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state is not normalized (|psi|^2 = {norm})")
    return state


def on_qubit(op, qubit, n_qubits=2):
    """Embed a single-qubit operator acting on ``qubit`` (1-based)."""
    out = np.ones((1, 1), dtype=complex)
    for q in range(1, n_qubits + 1):
        out = np.kron(out, op if q == qubit else I2)
    return out


def chsh_observables():
    """Q = Z1, R = X1, S = (-Z2 - X2)/sqrt2, T = (Z2 - X2)/sqrt2 as 4x4 matrices."""
    r = 1.0 / math.sqrt(2.0)
    q = on_qubit(Z, 1)
    rr = on_qubit(X, 1)
    s = on_qubit((-Z - X) * r, 2)
    t = on_qubit((Z - X) * r, 2)
    return q, rr, s, t


def expectation(state, a, b, atol=1e-9):
    """<psi| A B |psi> for commuting observables on different qubits.

    ``a`` and ``b`` are either already embedded (same dimension as the
    state) or single-qubit operators, in which case ``a (x) b`` is used.
    """
    state = check_state(state)
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape == b.shape == (state.size, state.size):
        op = a @ b
    else:
        op = np.kron(a, b)
    if op.shape != (state.size, state.size):
        raise ValueError(f"operator shape {op.shape} does not match state of size {state.size}")
    val = np.vdot(state, op @ state)
    if abs(val.imag) > atol:
        raise NumericalInconsistency(f"expectation has imaginary part {val.imag}")
    return float(val.real)


def chsh_quantum(state=None, observables=None):
    """The four singlet correlations and their CHSH combination."""
    state = bell_singlet() if state is None else state
    q, r, s, t = chsh_observables() if observables is None else observables
    return CHSHResult(e_qs=expectation(state, q, s), e_rs=expectation(state, r, s),
                      e_rt=expectation(state, r, t), e_qt=expectation(state, q, t))


def chsh_classical_max(signs=CHSH_SIGNS):
    """Exhaustive maximum of s1 QS + s2 RS + s3 RT + s4 QT over Q, R, S, T in {+1, -1}.

    Returns ``(max, maximizing (Q, R, S, T) tuples)``; arithmetic is integer.
    """
    s1, s2, s3, s4 = (int(v) for v in signs)
    values = {}
    for q, r, s, t in itertools.product((1, -1), repeat=4):
        values[(q, r, s, t)] = s1 * q * s + s2 * r * s + s3 * r * t + s4 * q * t
    best = max(values.values())
    return best, [k for k, v in values.items() if v == best]


# -- local hidden-variable Monte Carlo ---------------------------------------
# A strategy maps (rng, n) to an (n, 4) int array of predetermined +/-1
# answers for the settings (Q, R, S, T). Answers are fixed before the settings
# are drawn, which is what makes the model local.

def _constant(rng, n):
    return np.ones((n, 4), dtype=np.int64)


def _deterministic_mix(rng, n):
    """Hidden variable picks one of the 16 deterministic answer sheets uniformly."""
    bits = rng.integers(0, 16, size=n)
    return np.stack([1 - 2 * ((bits >> j) & 1) for j in range(4)], axis=1)


def _hidden_angle(rng, n):
    """Shared random polarization angle; each side answers sign(cos(2(angle - axis)))."""
    lam = rng.uniform(0.0, math.pi, size=n)
    # measurement axes matching the quantum settings (Q, R) and (S, T)
    axes = np.array([0.0, math.pi / 4, math.pi / 8 + math.pi / 2, -math.pi / 8 + math.pi / 2])
    c = np.cos(2.0 * (lam[:, None] - axes[None, :]))
    out = np.where(c >= 0, 1, -1)
    out[:, 2:] *= -1  # anticorrelated partner
    return out.astype(np.int64)


STRATEGIES = {"constant": _constant, "mixed": _deterministic_mix, "angle": _hidden_angle}


def lhv_simulate(n_trials, seed=0, strategy="mixed"):
    """Monte Carlo CHSH combination for a local hidden-variable model.

    Each trial draws a hidden variable (through ``strategy``) and independent
    uniform setting choices for both sides. Returns the empirical
    E(QS) + E(RS) + E(RT) - E(QT) and its standard error.
    """
    if n_trials < 1000:
        raise ValueError("n_trials must be >= 1000")
    fn = STRATEGIES[strategy] if isinstance(strategy, str) else strategy
    rng = np.random.Generator(np.random.Philox(seed))
    answers = np.asarray(fn(rng, int(n_trials)))
    if answers.shape != (n_trials, 4) or not np.all(np.abs(answers) == 1):
        raise ValueError("strategy must return an (n, 4) array of +/-1 answers")
    alice = rng.integers(0, 2, size=n_trials)  # 0 -> Q, 1 -> R
    bob = rng.integers(0, 2, size=n_trials)  # 0 -> S, 1 -> T
    rows = np.arange(n_trials)
    prod = answers[rows, alice] * answers[rows, 2 + bob]
    corr, counts, var = {}, {}, 0.0
    s_value = 0.0
    for name, a, b, sign in (("QS", 0, 0, 1), ("RS", 1, 0, 1), ("RT", 1, 1, 1), ("QT", 0, 1, -1)):
        sel = prod[(alice == a) & (bob == b)]
        n = sel.size
        mean = float(sel.mean()) if n else 0.0
        corr[name], counts[name] = mean, int(n)
        s_value += sign * mean
        if n > 1:
            var += float(sel.var(ddof=1)) / n
    return LHVEstimate(s_value=s_value, std_error=math.sqrt(var), correlations=corr,
                       counts=counts, n_trials=int(n_trials))


# -- GHZ ---------------------------------------------------------------------

def ghz_correlations(phis):
    """Three-particle detection probabilities for phase shifts (phi1, phi2, phi3).

    Outcome s_i = +1 for the unprimed detector, -1 for the primed one:
    P(s1, s2, s3) = (1 + s1 s2 s3 sin(phi1 + phi2 + phi3)) / 8.
    """
    phis = tuple(float(p) for p in phis)
    if len(phis) != 3:
        raise ValueError("need exactly three phases")
    sin_sum = math.sin(phis[0] + phis[1] + phis[2])
    probs = {}
    expect = 0.0
    for s in itertools.product((1, -1), repeat=3):
        parity = s[0] * s[1] * s[2]
        p = (1.0 + parity * sin_sum) / 8.0
        probs[s] = p
        expect += parity * p
    return GHZResult(phis=phis, probabilities=probs, expectation=expect)


GHZ_CONSTRAINTS = (
    ((1, 0, 0), 1),  # phases (pi/2, 0, 0)
    ((0, 1, 0), 1),
    ((0, 0, 1), 1),
    ((1, 1, 1), -1),  # phases (pi/2, pi/2, pi/2)
)


def ghz_contradiction():
    """Enumerate predetermined +/-1 values v_i(phi), phi in {0, pi/2}, for three particles.

    Counts how many of the 64 assignments satisfy each subset of the four
    perfect-correlation constraints.
    """
    assignments = list(itertools.product((1, -1), repeat=6))  # v1(0), v1(pi/2), v2(0), ...

    def product(v, settings):
        return v[settings[0]] * v[2 + settings[1]] * v[4 + settings[2]]

    sat = [[product(v, st) == want for st, want in GHZ_CONSTRAINTS] for v in assignments]
    counts = {}
    for r in range(1, 5):
        for subset in itertools.combinations(range(4), r):
            counts[subset] = sum(all(row[i] for i in subset) for row in sat)
    # multiplying the first three constraints squares every v_i(0) away
    forced = GHZ_CONSTRAINTS[0][1] * GHZ_CONSTRAINTS[1][1] * GHZ_CONSTRAINTS[2][1]
    return GHZReport(n_assignments=len(assignments), constraints=GHZ_CONSTRAINTS, counts=counts,
                     satisfying_all_four=counts[(0, 1, 2, 3)],
                     satisfying_first_three=counts[(0, 1, 2)], forced_product=forced)
