"""Round mechanics for GHZ-carried (n,n)-threshold secret sharing.

Party numbering: party 1 is the sender, parties 2..n are receivers who must
all cooperate to recover a bit.  Before encoding, a round's register holds
the carrier particles a1..an with party i at qubit i-1.  Encoding
front-appends the sender's work particle a at qubit 0, shifting party i to
qubit i.

A carrier variant is the n-qubit state

    (|0...> + |1...>) / sqrt2

where each receiver position listed in ``hadamard_positions`` holds |+> on
the 0 branch and |-> on the 1 branch instead of |0>/|1>.  The sender draws
the variant per round; receivers undo it with local Hadamards once the
variant is announced, recovering the canonical GHZ carrier.  Encoding a
payload bit b prepends |+> (b=0) or |-> (b=1), entangles it with a1 via
CNOT, and rotates it back with a Hadamard.  Everyone then measures: the
sender reads a and a1 in Z, each receiver reads its particle in X, and the
payload is the sender's a bit XORed with the parity of the receivers' X
signs (sign + is bit 0, - is bit 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np

from .statevec import (
    StateVector,
    append_ancilla,
    apply_cnot,
    apply_hadamard,
    measure_x,
    measure_z,
    state_from_amplitudes,
)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_KET0 = np.array([1.0, 0.0], dtype=np.complex128)
_KET1 = np.array([0.0, 1.0], dtype=np.complex128)
_PLUS = np.array([_INV_SQRT2, _INV_SQRT2], dtype=np.complex128)
_MINUS = np.array([_INV_SQRT2, -_INV_SQRT2], dtype=np.complex128)


@dataclass(frozen=True)
class StateVariant:
    """Carrier choice for one round: which receivers get X-basis arms.

    The protocol proper uses n+1 variants: no Hadamard positions, exactly
    one receiver position, or all receiver positions.  Arbitrary subsets are
    structurally valid (an opt-in planning mode uses them) but are not part
    of the standard variant set.
    """

    n: int
    hadamard_positions: frozenset[int]

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError("protocol needs at least three parties")
        positions = frozenset(int(p) for p in self.hadamard_positions)
        object.__setattr__(self, "hadamard_positions", positions)
        bad = [p for p in positions if not 2 <= p <= self.n]
        if bad:
            raise ValueError(
                f"hadamard positions {sorted(bad)} outside receiver range [2, {self.n}]"
            )

    @property
    def is_standard(self) -> bool:
        k = len(self.hadamard_positions)
        return k == 0 or k == 1 or k == self.n - 1

    @property
    def index(self) -> int | None:
        """1-based label: 1 = no positions, i = {i}, n+1 = all positions."""
        if not self.hadamard_positions:
            return 1
        if len(self.hadamard_positions) == 1:
            return next(iter(self.hadamard_positions))
        if len(self.hadamard_positions) == self.n - 1:
            return self.n + 1
        return None

    @property
    def name(self) -> str:
        idx = self.index
        if idx is None:
            return "h" + ",".join(str(p) for p in sorted(self.hadamard_positions))
        return f"psi{idx}" if self.n == 3 else f"Psi{idx}"

    @classmethod
    def from_index(cls, n: int, index: int) -> "StateVariant":
        if index == 1:
            return cls(n, frozenset())
        if 2 <= index <= n:
            return cls(n, frozenset({index}))
        if index == n + 1:
            return cls(n, frozenset(range(2, n + 1)))
        raise ValueError(f"variant index {index} out of range 1..{n + 1}")

    @classmethod
    def from_positions(cls, n: int, positions) -> "StateVariant":
        return cls(n, frozenset(int(p) for p in positions))


def standard_variants(n: int) -> tuple[StateVariant, ...]:
    """The n+1 variants of the protocol, in index order."""
    return tuple(StateVariant.from_index(n, k) for k in range(1, n + 2))


def random_variant(n: int, rng: np.random.Generator, all_subsets: bool = False) -> StateVariant:
    if all_subsets:
        mask = int(rng.integers(0, 1 << (n - 1)))
        positions = {p for p in range(2, n + 1) if (mask >> (p - 2)) & 1}
        return StateVariant.from_positions(n, positions)
    return StateVariant.from_index(n, int(rng.integers(1, n + 2)))


def prepare_variant(variant: StateVariant) -> StateVector:
    """Build the n-qubit carrier for ``variant`` (party i at qubit i-1)."""
    branch0 = [_KET0]
    branch1 = [_KET1]
    for party in range(2, variant.n + 1):
        if party in variant.hadamard_positions:
            branch0.append(_PLUS)
            branch1.append(_MINUS)
        else:
            branch0.append(_KET0)
            branch1.append(_KET1)
    amps = (reduce(np.kron, branch0) + reduce(np.kron, branch1)) * _INV_SQRT2
    return StateVector(variant.n, amps)


def receiver_correction(state: StateVector, variant: StateVariant) -> StateVector:
    """Local Hadamards undoing the variant's X-basis arms.

    Expects the pre-encoding layout (party i at qubit i-1); the result is
    the canonical GHZ carrier whichever variant was prepared.
    """
    if state.num_qubits < variant.n:
        raise ValueError("state has fewer qubits than the variant's party count")
    for party in sorted(variant.hadamard_positions):
        state = apply_hadamard(state, party - 1)
    return state


def encode_round(state: StateVector, payload_bit: int) -> StateVector:
    """Entangle one payload bit into the carrier.

    Front-appends the sender's work qubit as |+> (payload 0) or |-> (payload
    1), applies CNOT from it onto a1, then a Hadamard on it.  After this the
    sender's two qubits are 0 and 1 and party i sits at qubit i.
    """
    if payload_bit not in (0, 1):
        raise ValueError(f"payload bit must be 0 or 1, got {payload_bit!r}")
    work = state_from_amplitudes(_MINUS if payload_bit else _PLUS)
    state = append_ancilla(state, work, "front")
    state = apply_cnot(state, 0, 1)
    return apply_hadamard(state, 0)


class RoundMeasurement(NamedTuple):
    alice_a: int
    alice_A: int
    receiver_signs: tuple[int, ...]


def measure_round(state: StateVector, num_parties: int, rng: np.random.Generator) -> RoundMeasurement:
    """Fixed-basis readout of an encoded round.

    Z on qubits 0 and 1 (the sender), X on qubits 2..n (the receivers); any
    qubits beyond position ``num_parties`` are left untouched.  One uniform
    draw is consumed per measurement, in that order.
    """
    outcome_a, state = measure_z(state, 0, rng.random())
    outcome_big_a, state = measure_z(state, 1, rng.random())
    signs = []
    for q in range(2, num_parties + 1):
        outcome, state = measure_x(state, q, rng.random())
        signs.append(outcome.value)
    return RoundMeasurement(outcome_a.value, outcome_big_a.value, tuple(signs))


def recover_secret(alice_a: int, receiver_signs) -> int:
    """Payload bit from the sender's a bit and all receivers' X signs."""
    bit = alice_a
    for s in receiver_signs:
        bit ^= s
    return bit & 1


@dataclass(frozen=True)
class RoundPlan:
    round_index: int
    variant: StateVariant
    role: str  # "check" or "message"
    payload_bit: int


@dataclass
class RoundOutcome:
    plan: RoundPlan
    alice_a: int
    alice_A: int
    receiver_signs: tuple[int, ...]
    eve_record: object | None = None


@dataclass
class Transcript:
    """Everything a session produced: per-round data plus the public log."""

    rounds: list[RoundOutcome]
    announcement_log: list[dict]


def check_round_count(num_rounds: int, check_fraction: float) -> int:
    """How many of ``num_rounds`` rounds are spent on eavesdropping checks."""
    if num_rounds < 1:
        raise ValueError("need at least one round")
    if not 0.0 < check_fraction < 1.0:
        raise ValueError("check fraction must be strictly between 0 and 1")
    # the epsilon guards against float noise like 10 * 0.2 = 2.0000000000000004
    return max(1, math.ceil(num_rounds * check_fraction - 1e-9))


def plan_sequences(
    num_rounds: int,
    check_fraction: float,
    message: str,
    n: int,
    rng: np.random.Generator,
    all_subsets: bool = False,
) -> list[RoundPlan]:
    """Assign roles, payloads and variants to ``num_rounds`` rounds.

    ceil(num_rounds * check_fraction) rounds become a uniformly random check
    subset carrying fresh random bits; message bits fill the remaining
    rounds in round order.  Message rounds beyond the message length carry
    random filler bits.
    """
    if any(c not in "01" for c in message):
        raise ValueError("message must be a string of 0s and 1s")
    num_check = check_round_count(num_rounds, check_fraction)
    if len(message) > num_rounds - num_check:
        raise ValueError(
            f"message of {len(message)} bits does not fit in "
            f"{num_rounds - num_check} message rounds"
        )
    check_rounds = set(int(i) for i in rng.permutation(num_rounds)[:num_check])
    plans = []
    cursor = 0
    for i in range(num_rounds):
        variant = random_variant(n, rng, all_subsets)
        if i in check_rounds:
            role, payload = "check", int(rng.integers(2))
        else:
            role = "message"
            if cursor < len(message):
                payload = int(message[cursor])
                cursor += 1
            else:
                payload = int(rng.integers(2))
        plans.append(RoundPlan(i, variant, role, payload))
    return plans


def announcement_schedule(check_indices, n: int, rng: np.random.Generator) -> dict[int, tuple[int, ...]]:
    """Receiver announcement order for each check round.

    Three parties: a random half of the check rounds (floor of the count)
    hears party 2 first, the rest party 3 first.  More parties: an
    independent uniform permutation of the receivers per check round.
    """
    indices = sorted(int(i) for i in check_indices)
    schedule: dict[int, tuple[int, ...]] = {}
    if n == 3:
        shuffled = rng.permutation(len(indices))
        bob_first = {indices[j] for j in shuffled[: len(indices) // 2]}
        for i in indices:
            schedule[i] = (2, 3) if i in bob_first else (3, 2)
    else:
        for i in indices:
            order = rng.permutation(n - 1) + 2
            schedule[i] = tuple(int(r) for r in order)
    return schedule


def receiver_parity_state(num_receivers: int, parity_bit: int) -> StateVector:
    """Joint receiver state carrying one parity bit in the X basis.

    (|0...0> + (-1)^parity_bit |1...1>) / sqrt2 over all receivers: its
    X-basis expansion has 2^(num_receivers - 1) equal-magnitude terms whose
    sign parities all equal ``parity_bit``.
    """
    if num_receivers < 1:
        raise ValueError("need at least one receiver")
    if parity_bit not in (0, 1):
        raise ValueError("parity bit must be 0 or 1")
    amps = np.zeros(1 << num_receivers, dtype=np.complex128)
    amps[0] = _INV_SQRT2
    amps[-1] = -_INV_SQRT2 if parity_bit else _INV_SQRT2
    return StateVector(num_receivers, amps)
