"""Amplitude amplification: ideal rotation analytics, noisy-check error
propagation, and exact circuit runs.

The amplified iteration is Q = -A S_0 A^(-1) S_chi with A = H on the index
register. Checking oracles come in two forms: a bit-flip form that XORs the
predicate into an ancilla, and the phase-flip form obtained by sandwiching
the ancilla in |->; the derivation doubles the per-call error, and both
forms are kept so that factor of two stays visible.

Fixed register names: "idx" (search space), "b" (check output), "noise"
(deliberate-error qubit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .gf2 import BitWord

_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class QaaSpec:
    a: float
    theta: float
    r: int


def spec_for(a: float, r: int | None = None) -> QaaSpec:
    """Iteration schedule for initial success probability a.

    r defaults to floor(pi / (4 theta)); the tiny guard keeps exact integer
    ratios (a = 1/2 gives pi/(4 theta) = 1 exactly) from rounding down.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError("a must be in (0, 1]")
    theta = math.asin(math.sqrt(a))
    if r is None:
        r = int(math.floor(math.pi / (4.0 * theta) + _FLOOR_GUARD))
    return QaaSpec(a, theta, r)


def ideal_success(a: float, j: int) -> float:
    """sin^2((2j+1) theta) after j noiseless iterations."""
    return math.sin((2 * j + 1) * spec_for(a, r=0).theta) ** 2


@dataclass(frozen=True)
class NoisyQaaPrediction:
    a: float
    r: int
    ideal: float
    epsilon: float
    lower: float

    def deviation_bound(self, j: int) -> float:
        return 4.0 * j * self.epsilon


def noisy_prediction(a: float, eps: float) -> NoisyQaaPrediction:
    """Prediction interval when each check call errs by at most eps."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    spec = spec_for(a)
    lower = max(0.0, max(1.0 - a, a) - 4.0 * spec.r * eps)
    return NoisyQaaPrediction(
        a=a,
        r=spec.r,
        ideal=ideal_success(a, spec.r),
        epsilon=eps,
        lower=lower,
    )


# ---------------------------------------------------------------------------
# Exact circuit runs
# ---------------------------------------------------------------------------


def _marked_set(m: int, marked) -> set[int]:
    if isinstance(marked, (int, np.integer)):
        return {int(marked)}
    if callable(marked):
        return {v for v in range(1 << m) if marked(v)}
    return {int(v) for v in marked}


def diffusion(state: qsim.QState, register: str = "idx") -> qsim.QState:
    """-A S_0 A^(-1) on the register, A = full Hadamard."""
    qsim.apply_h(state, register)
    qsim.apply_reflection_about_zero(state, register)
    qsim.apply_h(state, register)
    return state.scale(-1.0)


def grover_state(m: int, marked, j: int) -> qsim.QState:
    """Exact state after j iterations on the index register alone."""
    targets = _marked_set(m, marked)
    state = qsim.init_zero(qsim.RegisterLayout(("idx", m)))
    qsim.apply_h(state, "idx")
    for _ in range(j):
        qsim.apply_phase_if(state, "idx", targets)
        diffusion(state)
    return state


@dataclass(frozen=True)
class GroverRun:
    outcome: BitWord
    success: float
    spec: QaaSpec
    unknown_count_heuristic: bool


def build_and_run_grover(m: int, check, rng: np.random.Generator, r: int | None = None) -> GroverRun:
    """Amplify, measure the index register once, report the exact success.

    check is a marked value, a collection, or a predicate callable. When the
    marked count cannot be taken from the check (a predicate with no
    enumerable set would hide it, and an empty set gives a = 0), r falls
    back to the single-target default and the run is flagged.
    """
    targets = _marked_set(m, check)
    heuristic = False
    if targets:
        spec = spec_for(len(targets) / float(1 << m), r)
    else:
        heuristic = True
        single = spec_for(2.0**-m, r)
        spec = QaaSpec(0.0, 0.0, single.r)
    state = grover_state(m, targets, spec.r)
    success = float(sum(qsim.prob_of(state, "idx", t) for t in targets))
    outcome, _ = qsim.measure(state, "idx", rng)
    return GroverRun(outcome, success, spec, heuristic)


# ---------------------------------------------------------------------------
# Noisy checking oracles
# ---------------------------------------------------------------------------


def bit_flip_error(beta: float) -> float:
    """Per-call deviation of the deliberately noisy check: ||Ry(2b)-I|| =
    2 sin(b/2) on the marked subspace."""
    return 2.0 * abs(math.sin(beta / 2.0))


def noisy_check_bit(state: qsim.QState, marked, beta: float) -> qsim.QState:
    """Bit-flip check with injected error: XOR the predicate into "b", then
    rotate the "noise" qubit by Ry(2 beta) on marked components.

    The per-call deviation is bounded by bit_flip_error(beta); the derived
    phase-flip form carries the doubled budget 2 * bit_flip_error(beta).
    (The sandwich error is (delta_0 - delta_1)/sqrt(2) over orthogonal
    ancilla branches, so the doubled budget is a bound the tests verify,
    not a value they can saturate.)"""
    m = state.layout.width("idx")
    targets = _marked_set(m, marked)
    indicator = np.array([1 if v in targets else 0 for v in range(1 << m)])
    qsim.apply_oracle_xor(state, indicator, "idx", "b")
    if beta != 0.0:
        qsim.apply_controlled_ry(state, "noise", 2.0 * beta, control="idx", control_predicate=targets)
    return state


def phase_flip_check(state: qsim.QState, marked, beta: float) -> qsim.QState:
    """Phase-flip form of the same check: |-> sandwich on "b"."""
    qsim.apply_x(state, "b")
    qsim.apply_h(state, "b")
    noisy_check_bit(state, marked, beta)
    qsim.apply_h(state, "b")
    qsim.apply_x(state, "b")
    return state


def run_grover_noisy(m: int, marked, beta: float, j: int) -> float:
    """Success probability after j iterations with the noisy check inside
    the phase-flip sandwich; compare against ideal_success +- 4 j eps."""
    targets = _marked_set(m, marked)
    layout = qsim.RegisterLayout(("idx", m), ("b", 1), ("noise", 1))
    state = qsim.init_zero(layout)
    qsim.apply_h(state, "idx")
    for _ in range(j):
        phase_flip_check(state, targets, beta)
        diffusion(state)
    return float(sum(qsim.prob_of(state, "idx", t) for t in targets))
