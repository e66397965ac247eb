"""Sparse register of N three-level emitters and symmetric Dicke states.

Basis strings are words over ``{e, 0, 1}``; emitter ``j`` (1-based, as in the
chain geometry) sits at string index ``j - 1``. ``'1'`` is spin up (+1/2),
``'0'`` spin down (-1/2) and ``'e'`` the shared excited level.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Mapping

from .errors import (
    InvalidSizeError,
    InvalidStateError,
    InvalidTargetError,
    PreconditionError,
    ZeroNormError,
)

MAX_EMITTERS = 12
NORM_TOL = 1e-12
_ALPHABET = frozenset("e01")


class Level(str, enum.Enum):
    """Ground level an emitter lands in after a heralded decay."""

    LEVEL0 = "0"
    LEVEL1 = "1"


class Polarizer(str, enum.Enum):
    """Polarizer setting in front of a detector.

    Following the atom-photon state, a sigma+ photon accompanies the decay
    to ``|0>`` and a sigma- photon the decay to ``|1>``.
    """

    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"

    @property
    def level(self) -> Level:
        return Level.LEVEL0 if self is Polarizer.SIGMA_PLUS else Level.LEVEL1


def as_level(outcome: Level | Polarizer | str) -> Level:
    """Coerce a polarizer, level or their string values to a :class:`Level`."""
    if isinstance(outcome, Polarizer):
        return outcome.level
    if isinstance(outcome, Level):
        return outcome
    try:
        return Polarizer(outcome).level
    except ValueError:
        return Level(str(outcome))


@dataclass(frozen=True)
class EmitterState:
    """Immutable sparse amplitude map over basis strings of length N."""

    num_emitters: int
    amplitudes: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_emitters < 1:
            raise InvalidSizeError(f"num_emitters must be positive, got {self.num_emitters}")
        amps = {}
        excitations = None
        for key, amp in self.amplitudes.items():
            if len(key) != self.num_emitters or not set(key) <= _ALPHABET:
                raise InvalidStateError(f"bad basis string {key!r} for N={self.num_emitters}")
            n_e = key.count("e")
            if excitations is None:
                excitations = n_e
            elif n_e != excitations:
                raise InvalidStateError("basis strings carry different excitation counts")
            amps[key] = complex(amp)
        object.__setattr__(self, "amplitudes", MappingProxyType(amps))

    def __len__(self):
        return len(self.amplitudes)

    def __getitem__(self, key: str) -> complex:
        return self.amplitudes.get(key, 0j)

    @property
    def squared_norm(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    @property
    def normalized(self) -> bool:
        return abs(self.squared_norm - 1.0) <= NORM_TOL

    @property
    def excitations(self) -> int:
        """Number of ``'e'`` characters shared by every support string."""
        for key in self.amplitudes:
            return key.count("e")
        return 0

    def scaled(self, factor: complex) -> "EmitterState":
        return EmitterState(self.num_emitters, {k: factor * a for k, a in self.amplitudes.items()})

    def permuted(self, perm) -> "EmitterState":
        """Relabel emitters: new position ``i`` holds old emitter ``perm[i]``."""
        return EmitterState(
            self.num_emitters,
            {"".join(k[p] for p in perm): a for k, a in self.amplitudes.items()},
        )


@dataclass(frozen=True)
class DickeTarget:
    """Symmetric Dicke state ``|N/2, m>`` stored as ``(N, 2m)``."""

    num_qubits: int
    spin_projection_times_two: int

    def __post_init__(self):
        n, two_m = self.num_qubits, self.spin_projection_times_two
        if n < 1:
            raise InvalidTargetError(f"num_qubits must be positive, got {n}")
        if abs(two_m) > n or (n - two_m) % 2:
            raise InvalidTargetError(f"2m={two_m} is not a valid projection for N={n}")

    @classmethod
    def from_ones(cls, num_qubits: int, num_ones: int) -> "DickeTarget":
        return cls(num_qubits, 2 * num_ones - num_qubits)

    @property
    def m(self) -> float:
        return self.spin_projection_times_two / 2

    @property
    def num_ones(self) -> int:
        return (self.num_qubits + self.spin_projection_times_two) // 2

    @property
    def num_terms(self) -> int:
        return math.comb(self.num_qubits, self.num_ones)


@dataclass(frozen=True)
class EmissionModel:
    """Branching amplitudes ``c0`` (decay to |0>, sigma+) and ``c1`` (to |1>, sigma-)."""

    c0: complex = 1 / math.sqrt(2)
    c1: complex = 1 / math.sqrt(2)

    def __post_init__(self):
        if abs(abs(self.c0) ** 2 + abs(self.c1) ** 2 - 1.0) > NORM_TOL:
            raise InvalidStateError("|c0|^2 + |c1|^2 must equal 1")

    def weight(self, level: Level) -> float:
        """Branching probability of the decay heralded by ``level``."""
        return abs(self.c0 if level is Level.LEVEL0 else self.c1) ** 2


def make_initial_state(n: int) -> EmitterState:
    """Fully excited register ``|e, e, ..., e>`` of ``n`` emitters."""
    if not 1 <= n <= MAX_EMITTERS:
        raise InvalidSizeError(f"n must lie in [1, {MAX_EMITTERS}], got {n}")
    return EmitterState(n, {"e" * n: 1 + 0j})


def make_dicke_state(target: DickeTarget) -> EmitterState:
    n, k = target.num_qubits, target.num_ones
    if n > MAX_EMITTERS:
        raise InvalidSizeError(f"N must not exceed {MAX_EMITTERS}, got {n}")
    amp = complex(1 / math.sqrt(target.num_terms))
    amps = {}
    for ones in combinations(range(n), k):
        chars = ["0"] * n
        for i in ones:
            chars[i] = "1"
        amps["".join(chars)] = amp
    return EmitterState(n, amps)


def normalize(state: EmitterState) -> tuple[EmitterState, float]:
    """Return the normalized state together with its original squared norm."""
    norm2 = state.squared_norm
    if not norm2 > 0.0:
        raise ZeroNormError("cannot normalize a zero state")
    return state.scaled(1 / math.sqrt(norm2)), norm2


def _require_qubit_state(state: EmitterState):
    if not state.normalized:
        raise PreconditionError("state must be normalized")
    if state.excitations:
        raise PreconditionError("state still carries excitations")


def _spin_z(key: str) -> float:
    return key.count("1") - len(key) / 2


def total_spin_z(state: EmitterState) -> float:
    """Expectation of the collective S_z, in units of hbar."""
    _require_qubit_state(state)
    return math.fsum(abs(a) ** 2 * _spin_z(k) for k, a in state.amplitudes.items())


def _ladder(state: EmitterState, src: str, dst: str) -> dict[str, complex]:
    out: dict[str, complex] = {}
    for key, amp in state.amplitudes.items():
        for i, c in enumerate(key):
            if c == src:
                new = key[:i] + dst + key[i + 1:]
                out[new] = out.get(new, 0j) + amp
    return out


def total_spin_squared(state: EmitterState) -> float:
    """Expectation of the collective S^2, in units of hbar^2.

    Uses ``S^2 = S_z^2 + (S+ S- + S- S+) / 2`` with
    ``<S+ S-> = ||S- psi||^2`` and ``<S- S+> = ||S+ psi||^2``.
    """
    _require_qubit_state(state)
    sz2 = math.fsum(abs(a) ** 2 * _spin_z(k) ** 2 for k, a in state.amplitudes.items())
    raised = _ladder(state, "0", "1")
    lowered = _ladder(state, "1", "0")
    flips = math.fsum(abs(a) ** 2 for a in raised.values())
    flips += math.fsum(abs(a) ** 2 for a in lowered.values())
    return sz2 + flips / 2


def inner_product(a: EmitterState, b: EmitterState) -> complex:
    """``<a|b>`` without any normalization checks."""
    if a.num_emitters != b.num_emitters:
        raise InvalidSizeError("states act on different numbers of emitters")
    keys = a.amplitudes if len(a) <= len(b) else b.amplitudes
    return complex(sum(a[key].conjugate() * b[key] for key in keys))


def fidelity(a: EmitterState, b: EmitterState) -> float:
    """Pure-state fidelity ``|<a|b>|^2`` of two normalized registers."""
    if a.num_emitters != b.num_emitters:
        raise InvalidSizeError("states act on different numbers of emitters")
    if not (a.normalized and b.normalized):
        raise PreconditionError("fidelity needs normalized states")
    return min(1.0, abs(inner_product(a, b)) ** 2)


def global_phase(state: EmitterState, phi: float) -> EmitterState:
    return state.scaled(cmath.exp(1j * phi))
