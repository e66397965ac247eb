"""Heralding by sequential far-field photodetection.

Each detection removes one excitation: every still-excited emitter ``j`` is a
possible source and contributes with weight ``exp(i phi[n, j])``, so which
emitter actually decayed is never learned. Three independent evaluators of
the final register are provided:

* :func:`run_protocol` applies the detection operators one after another
  (the default ``sequential`` engine) or evaluates permanents per basis
  string (``permanent`` engine);
* :func:`amplitude_oracle_bruteforce` sums all N! detector-to-emitter
  assignments explicitly;
* :func:`amplitude_via_permanents` factorizes that sum into two permanents.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .errors import (
    DestructiveInterferenceError,
    InvalidSizeError,
    ProtocolOverrunError,
    ZeroNormError,
)
from .state import (
    EmissionModel,
    EmitterState,
    Level,
    Polarizer,
    as_level,
    make_initial_state,
    normalize,
)

PRUNE_TOL = 1e-15
ORACLE_MAX_N = 8


class Interpretation(str, enum.Enum):
    ATOMIC_QUBITS = "atomic_qubits"
    PHOTONIC_POLARIZATION_QUBITS = "photonic_polarization_qubits"


class Engine(str, enum.Enum):
    SEQUENTIAL = "sequential"
    PERMANENT = "permanent"


@dataclass(frozen=True)
class DetectionEvent:
    detector_index: int  # 1-based
    phase_row: tuple[float, ...]
    outcome_level: Level

    def __post_init__(self):
        object.__setattr__(self, "phase_row", tuple(float(p) for p in self.phase_row))
        object.__setattr__(self, "outcome_level", as_level(self.outcome_level))


@dataclass(frozen=True)
class ProtocolResult:
    final_state: EmitterState
    relative_rate: float
    interpretation: Interpretation = Interpretation.ATOMIC_QUBITS
    squared_norm: float = 0.0

    def label(self, key: str) -> str:
        """Human-readable reading of a basis string under the interpretation."""
        if self.interpretation is Interpretation.ATOMIC_QUBITS:
            return "|" + ",".join(key) + ">"
        photon = {"0": "s+", "1": "s-"}
        return " ".join(f"k{i + 1}:{photon[c]}" for i, c in enumerate(key))


def apply_detection(state: EmitterState, event: DetectionEvent) -> EmitterState:
    """Apply one (unnormalized) detection operator to ``state``."""
    if len(event.phase_row) != state.num_emitters:
        raise InvalidSizeError("phase row length does not match the register size")
    if state.excitations == 0:
        raise ProtocolOverrunError("no excitation left to detect")
    factors = [cmath.exp(1j * p) for p in event.phase_row]
    level = event.outcome_level.value
    out: dict[str, complex] = {}
    for key, amp in state.amplitudes.items():
        for j, c in enumerate(key):
            if c == "e":
                new = key[:j] + level + key[j + 1:]
                out[new] = out.get(new, 0j) + amp * factors[j]
    return EmitterState(state.num_emitters, {k: a for k, a in out.items() if abs(a) > PRUNE_TOL})


def _check_inputs(phases, outcomes):
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 2 or phases.shape[0] != phases.shape[1]:
        raise InvalidSizeError(f"phase matrix must be square N x N, got shape {phases.shape}")
    if len(outcomes) != phases.shape[0]:
        raise InvalidSizeError("need exactly one outcome per detector")
    return phases, [as_level(o) for o in outcomes]


def ryser_permanent(matrix) -> complex:
    """Permanent by Ryser's formula with Gray-code column updates, O(2^k k)."""
    a = np.asarray(matrix, dtype=complex)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ValueError("permanent needs a square matrix")
    if k == 0:
        return 1 + 0j
    cols = [list(a[:, j]) for j in range(k)]
    row_sums = [0j] * k
    total = 0j
    gray_prev = 0
    for step in range(1, 1 << k):
        gray = step ^ (step >> 1)
        j = (gray ^ gray_prev).bit_length() - 1
        col = cols[j]
        if gray & (1 << j):
            row_sums = [r + c for r, c in zip(row_sums, col)]
        else:
            row_sums = [r - c for r, c in zip(row_sums, col)]
        gray_prev = gray
        prod = 1 + 0j
        for r in row_sums:
            prod *= r
        total += -prod if bin(gray).count("1") & 1 else prod
    return -total if k & 1 else total


def amplitude_via_permanents(phases, outcomes, basis_string: str) -> complex:
    """Amplitude of ``basis_string`` as ``perm(A0) * perm(A1)``.

    ``A0`` collects the phase factors of sigma+ detectors against emitters
    in ``0``; ``A1`` likewise for sigma- and ``1``. A string whose 0/1 counts
    do not match the outcome counts cannot be heralded and returns 0.
    """
    phases, levels = _check_inputs(phases, outcomes)
    if len(basis_string) != len(levels):
        return 0j
    factors = np.exp(1j * phases)
    amp = 1 + 0j
    for level in (Level.LEVEL0, Level.LEVEL1):
        rows = [n for n, lv in enumerate(levels) if lv is level]
        cols = [j for j, c in enumerate(basis_string) if c == level.value]
        if len(rows) != len(cols):
            return 0j
        amp *= ryser_permanent(factors[np.ix_(rows, cols)])
    return amp


def permanent_state(phases, outcomes) -> EmitterState:
    """Unnormalized final register, every consistent string via permanents."""
    phases, levels = _check_inputs(phases, outcomes)
    n = len(levels)
    n1 = sum(lv is Level.LEVEL1 for lv in levels)
    amps = {}
    for ones in combinations(range(n), n1):
        chars = ["0"] * n
        for i in ones:
            chars[i] = "1"
        key = "".join(chars)
        amp = amplitude_via_permanents(phases, levels, key)
        if abs(amp) > PRUNE_TOL:
            amps[key] = amp
    return EmitterState(n, amps)


def amplitude_oracle_bruteforce(phases, outcomes) -> EmitterState:
    """Sum over all N! ways to assign the N detected photons to emitters."""
    phases, levels = _check_inputs(phases, outcomes)
    n = len(levels)
    if n > ORACLE_MAX_N:
        raise InvalidSizeError(f"brute-force oracle limited to N <= {ORACLE_MAX_N}")
    amps: dict[str, complex] = {}
    for sigma in permutations(range(n)):
        chars = [""] * n
        phase = 0.0
        for det, emitter in enumerate(sigma):
            chars[emitter] = levels[det].value
            phase += phases[det, emitter]
        key = "".join(chars)
        amps[key] = amps.get(key, 0j) + cmath.exp(1j * phase)
    return EmitterState(n, amps)


def detection_events(phases, outcomes) -> list[DetectionEvent]:
    phases, levels = _check_inputs(phases, outcomes)
    return [DetectionEvent(n + 1, tuple(phases[n]), lv) for n, lv in enumerate(levels)]


def unnormalized_final_state(phases, outcomes, engine=Engine.SEQUENTIAL, order=None) -> EmitterState:
    """Register after all detections, before normalization.

    ``order`` optionally permutes the sequence in which detector operators
    are applied; they commute, so the result does not depend on it.
    """
    if Engine(engine) is Engine.PERMANENT:
        return permanent_state(phases, outcomes)
    events = detection_events(phases, outcomes)
    state = make_initial_state(len(events))
    for idx in (range(len(events)) if order is None else order):
        state = apply_detection(state, events[idx])
    return state


def run_protocol(
    n: int,
    phases,
    outcomes: Sequence[Level | Polarizer | str],
    emission: EmissionModel | None = None,
    interpretation: Interpretation | str = Interpretation.ATOMIC_QUBITS,
    engine: Engine | str = Engine.SEQUENTIAL,
    order: Sequence[int] | None = None,
) -> ProtocolResult:
    """Herald the register of ``n`` emitters with one photon per detector.

    ``relative_rate`` is the squared norm of the unnormalized final state
    times the branching weights ``prod |c_{x_n}|^2``, divided by ``n!`` so
    the ideal symmetric case is comparable across ``n``.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.shape[0] != n or len(outcomes) != n:
        raise InvalidSizeError(f"expected {n} detectors and {n} outcomes")
    emission = emission or EmissionModel()
    raw = unnormalized_final_state(phases, outcomes, engine=engine, order=order)
    try:
        final, norm2 = normalize(raw)
    except ZeroNormError as exc:
        raise DestructiveInterferenceError(
            "detection pattern interferes destructively at this geometry"
        ) from exc
    weight = math.prod(emission.weight(as_level(o)) for o in outcomes)
    return ProtocolResult(
        final_state=final,
        relative_rate=norm2 * weight / math.factorial(n),
        interpretation=Interpretation(interpretation),
        squared_norm=norm2,
    )
