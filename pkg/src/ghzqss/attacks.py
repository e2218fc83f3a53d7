"""Eavesdropping models against the GHZ secret-sharing rounds.

The dishonest party is always receiver 2 (the first receiver), acting alone.
Two families are modeled, both tapping a particle while it is in flight to
another receiver, i.e. strictly before the round's variant is announced:

- intercept_resend_bell: receiver 2 pulls the targeted particle out of the
  channel, measures it together with his own particle in the Bell basis,
  and forwards the collapsed particle.  His record is the Bell index.
- collective_cnot / collective_h_cnot: receiver 2 entangles a fresh probe
  qubit with the in-flight particle via CNOT (optionally conjugated by
  Hadamards on the flying particle) and forwards it undisturbed in the
  computational basis.  He holds the probe until the round is encoded, then
  measures his own particle together with the probe in the Bell basis.
  That deferred measurement happens before his X-basis readout, so the
  sign he later announces comes from a particle already collapsed into a
  Bell pair with the probe.

``exact_round_analysis`` enumerates the exact joint distribution of one
round under any of these models and backs every security number in this
package; ``sample_round_records`` draws from the identical stochastic
process in bulk so sampling can be checked against the enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .protocol import (
    RoundOutcome,
    RoundPlan,
    StateVariant,
    encode_round,
    measure_round,
    prepare_variant,
    receiver_correction,
    recover_secret,
    standard_variants,
)
from .statevec import (
    MAX_QUBITS,
    RegisterCapacityError,
    StateVector,
    bell_projections,
    measure_bell,
    outcome_distribution,
    x_projections,
    z_projections,
)

ATTACK_KINDS = ("none", "intercept_resend_bell", "collective_cnot", "collective_h_cnot")

_BRANCH_EPS = 1e-15


@dataclass(frozen=True)
class AttackModel:
    """Which eavesdropping strategy runs, and whose particle is tapped.

    ``target_receiver`` defaults to the last receiver (party n).  The
    intercept-resend tap cannot target party 2's own particle.
    """

    kind: str = "none"
    target_receiver: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")

    @property
    def active(self) -> bool:
        return self.kind != "none"

    @property
    def collective(self) -> bool:
        return self.kind in ("collective_cnot", "collective_h_cnot")

    def resolve_target(self, n: int) -> int:
        target = self.target_receiver if self.target_receiver is not None else n
        if not 2 <= target <= n:
            raise ValueError(f"target receiver {target} outside [2, {n}]")
        if self.kind == "intercept_resend_bell" and target == 2:
            raise ValueError("intercept-resend cannot target the attacker's own particle")
        return target


@dataclass(frozen=True)
class EveRecord:
    """What the attacker wrote down for one round."""

    kind: str
    round_index: int
    bell_outcome: int


def tap_intercept_resend(
    state: StateVector,
    bob_qubit: int,
    target_qubit: int,
    randomness: float,
    round_index: int = 0,
) -> tuple[StateVector, EveRecord]:
    """Bell-measure (attacker's qubit, in-flight qubit) and resend.

    The post-state carries the measured Bell pair on those two qubits, so
    the forwarded particle is exactly what the legitimate receiver gets.
    """
    outcome, state = measure_bell(state, bob_qubit, target_qubit, randomness)
    return state, EveRecord("intercept_resend_bell", round_index, outcome.value)


def tap_collective(state: StateVector, target_qubit: int, with_hadamard: bool) -> StateVector:
    """Entangle a fresh probe (appended at the back) with the flying qubit.

    Plain mode copies the computational value onto the probe via CNOT;
    ``with_hadamard`` conjugates the CNOT with Hadamards on the flying
    qubit, copying its X-basis value instead and leaving the resent
    particle's basis unchanged.
    """
    from .statevec import append_ancilla, apply_cnot, apply_hadamard, basis_state

    state = append_ancilla(state, basis_state(1, 0), "back")
    probe = state.num_qubits - 1
    if with_hadamard:
        state = apply_hadamard(state, target_qubit)
    state = apply_cnot(state, target_qubit, probe)
    if with_hadamard:
        state = apply_hadamard(state, target_qubit)
    return state


def draws_per_round(attack: AttackModel, n: int) -> int:
    """Uniform samples one round consumes, in the canonical draw order."""
    draws = 2 + (n - 1)  # sender's two Z readouts plus receiver X readouts
    if attack.kind == "intercept_resend_bell":
        draws += 1
    elif attack.collective:
        draws += 1
    return draws


def run_round(plan: RoundPlan, attack: AttackModel, rng: np.random.Generator) -> RoundOutcome:
    """Sample one full round: prepare, tap, correct, encode, measure.

    Draw order: the intercept tap (if any) while the particles fly, then
    after encoding the attacker's deferred Bell measurement (if any), then
    the sender's two Z readouts, then each receiver's X readout.
    """
    variant = plan.variant
    n = variant.n
    state = prepare_variant(variant)
    eve_record: EveRecord | None = None
    if attack.kind == "intercept_resend_bell":
        target = attack.resolve_target(n)
        state, eve_record = tap_intercept_resend(
            state, 1, target - 1, rng.random(), plan.round_index
        )
    elif attack.collective:
        target = attack.resolve_target(n)
        state = tap_collective(state, target - 1, attack.kind == "collective_h_cnot")
    state = receiver_correction(state, variant)
    state = encode_round(state, plan.payload_bit)
    if attack.collective:
        outcome, state = measure_bell(state, 2, state.num_qubits - 1, rng.random())
        eve_record = EveRecord(attack.kind, plan.round_index, outcome.value)
    measured = measure_round(state, n, rng)
    return RoundOutcome(
        plan=plan,
        alice_a=measured.alice_a,
        alice_A=measured.alice_A,
        receiver_signs=measured.receiver_signs,
        eve_record=eve_record,
    )


def _encoded_branches(
    variant: StateVariant, payload_bit: int, attack: AttackModel
) -> list[tuple[int | None, float, StateVector]]:
    """Post-encoding states of one round, branched over any tap measurement.

    Each entry is (intercept Bell record or None, branch probability,
    encoded state).  Collective probes are entangled but unmeasured here.
    """
    n = variant.n
    state = prepare_variant(variant)
    if attack.kind == "intercept_resend_bell":
        target = attack.resolve_target(n)
        raw = bell_projections(state, 1, target - 1)
        branches = [(idx, p, post) for idx, p, post in raw if post is not None]
    elif attack.collective:
        target = attack.resolve_target(n)
        branches = [(None, 1.0, tap_collective(state, target - 1, attack.kind == "collective_h_cnot"))]
    else:
        branches = [(None, 1.0, state)]
    out = []
    for record, prob, branch_state in branches:
        branch_state = receiver_correction(branch_state, variant)
        out.append((record, prob, encode_round(branch_state, payload_bit)))
    return out


RecordKey = tuple[int, int, tuple[int, ...], int | None]


def exact_round_analysis(
    n: int, variant: StateVariant, payload_bit: int, attack: AttackModel
) -> dict[RecordKey, float]:
    """Exact joint distribution of one round's classical record.

    Keys are (alice_a, alice_A, receiver_signs, eve_record); eve_record is
    None without an attack, else the Bell outcome index.  Only outcomes with
    nonzero probability appear, and the kept probabilities sum to 1.  This
    enumeration is the oracle the sampled path is checked against, so it
    never draws randomness.
    """
    if n != variant.n:
        raise ValueError(f"n = {n} does not match the variant's n = {variant.n}")
    if payload_bit not in (0, 1):
        raise ValueError("payload bit must be 0 or 1")
    needed = n + 1 + (1 if attack.collective else 0)
    if needed > MAX_QUBITS:
        raise RegisterCapacityError(
            f"round needs {needed} qubits, above the {MAX_QUBITS}-qubit cap"
        )
    plan = [(0, "Z"), (1, "Z")] + [(q, "X") for q in range(2, n + 1)]
    table: dict[RecordKey, float] = {}
    for record, branch_p, encoded in _encoded_branches(variant, payload_bit, attack):
        if attack.collective:
            sub = []
            for idx, p, post in bell_projections(encoded, 2, encoded.num_qubits - 1):
                if post is not None:
                    sub.append((idx, p, post))
        else:
            sub = [(record, 1.0, encoded)]
        for eve, eve_p, state in sub:
            dist = outcome_distribution(state, plan)
            weight = branch_p * eve_p
            for bits, p in dist.items():
                if p <= _BRANCH_EPS:
                    continue
                key = (bits[0], bits[1], bits[2:], eve)
                table[key] = table.get(key, 0.0) + weight * p
    return table


def conditional_detection_rate(
    attack: AttackModel, variant: StateVariant, condition: int | None = None
) -> float:
    """Probability a single check round flags an error under ``attack``.

    The payload bit is uniform.  ``condition`` restricts to rounds where the
    attacker's Bell record equals that outcome index; conditioning on an
    impossible outcome is an error.
    """
    wrong = 0.0
    total = 0.0
    for payload in (0, 1):
        table = exact_round_analysis(variant.n, variant, payload, attack)
        for (alice_a, _alice_A, signs, eve), p in table.items():
            if condition is not None and eve != condition:
                continue
            total += 0.5 * p
            if recover_secret(alice_a, signs) != payload:
                wrong += 0.5 * p
    if total <= 1e-12:
        raise ValueError("conditioning event has zero probability")
    return wrong / total


def eve_record_distribution(
    attack: AttackModel, variant: StateVariant, payload_bit: int
) -> dict[int | None, float]:
    """Marginal distribution of the attacker's Bell record for one payload."""
    table = exact_round_analysis(variant.n, variant, payload_bit, attack)
    out: dict[int | None, float] = {}
    for (_a, _big_a, _signs, eve), p in table.items():
        out[eve] = out.get(eve, 0.0) + p
    return out


def eve_mutual_information(attack: AttackModel, variant: StateVariant) -> float:
    """Bits the attacker's view carries about a uniform payload bit.

    The view is the Bell record together with the attacker's own announced
    X sign (receiver 2's readout), i.e. everything he holds before any
    sender announcement.  Without an attack there is no record and the
    information is exactly zero.
    """
    if not attack.active:
        return 0.0
    joint: dict[tuple, float] = {}
    for payload in (0, 1):
        table = exact_round_analysis(variant.n, variant, payload, attack)
        for (_a, _big_a, signs, eve), p in table.items():
            key = ((eve, signs[0]), payload)
            joint[key] = joint.get(key, 0.0) + 0.5 * p
    obs_marginal: dict[tuple, float] = {}
    for (obs, _payload), p in joint.items():
        obs_marginal[obs] = obs_marginal.get(obs, 0.0) + p
    info = 0.0
    for (obs, _payload), p in joint.items():
        if p > 0.0:
            info += p * math.log2(p / (obs_marginal[obs] * 0.5))
    return max(info, 0.0)


def averaged_detection_rate(attack: AttackModel, n: int) -> float:
    """Check-round error rate averaged over the uniform variant draw."""
    rates = [conditional_detection_rate(attack, v) for v in standard_variants(n)]
    return sum(rates) / len(rates)


def _branch_arrays(branches):
    values = [v for v, p, post in branches if post is not None]
    probs = [p for _v, p, post in branches if post is not None]
    states = [post for _v, p, post in branches if post is not None]
    return values, np.cumsum(probs), states


def _assign(cum: np.ndarray, us: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum, us, side="right")
    return np.minimum(idx, len(cum) - 1)


def sample_round_records(
    variant: StateVariant,
    payload_bit: int,
    attack: AttackModel,
    uniforms: np.ndarray,
) -> dict[RecordKey, int]:
    """Sample many rounds at once from the per-round stochastic process.

    ``uniforms`` has one row per round and one column per draw, in the same
    canonical order ``run_round`` consumes them.  Rounds sharing a branch
    share collapsed states, so this walks the (at most a few hundred node)
    outcome tree once instead of re-simulating per round; the outcome of
    each row is identical to feeding that row's draws to ``run_round``.
    """
    n = variant.n
    uniforms = np.asarray(uniforms, dtype=np.float64)
    if uniforms.ndim != 2 or uniforms.shape[1] != draws_per_round(attack, n):
        raise ValueError(
            f"uniforms must have shape (rounds, {draws_per_round(attack, n)})"
        )
    num_rounds = uniforms.shape[0]
    counts: dict[RecordKey, int] = {}

    state0 = prepare_variant(variant)
    col = 0
    if attack.kind == "intercept_resend_bell":
        target = attack.resolve_target(n)
        values, cum, states = _branch_arrays(bell_projections(state0, 1, target - 1))
        assign = _assign(cum, uniforms[:, col])
        col += 1
        groups = []
        for j, (eve, tapped) in enumerate(zip(values, states)):
            rows = np.nonzero(assign == j)[0]
            if rows.size:
                encoded = encode_round(receiver_correction(tapped, variant), payload_bit)
                groups.append((eve, encoded, rows))
    else:
        if attack.collective:
            target = attack.resolve_target(n)
            state0 = tap_collective(state0, target - 1, attack.kind == "collective_h_cnot")
        encoded = encode_round(receiver_correction(state0, variant), payload_bit)
        groups = [(None, encoded, np.arange(num_rounds))]

    if attack.collective:
        bell_groups = []
        for _none, encoded, rows in groups:
            values, cum, states = _branch_arrays(
                bell_projections(encoded, 2, encoded.num_qubits - 1)
            )
            assign = _assign(cum, uniforms[rows, col])
            for j, (eve, post) in enumerate(zip(values, states)):
                sub = rows[assign == j]
                if sub.size:
                    bell_groups.append((eve, post, sub))
        groups = bell_groups
        col += 1

    stages = [(0, "Z"), (1, "Z")] + [(q, "X") for q in range(2, n + 1)]

    def walk(state, rows, stage_idx, column, bits):
        if stage_idx == len(stages):
            key = (bits[0], bits[1], tuple(bits[2:]), eve_value)
            counts[key] = counts.get(key, 0) + int(rows.size)
            return
        qubit, basis = stages[stage_idx]
        raw = z_projections(state, qubit) if basis == "Z" else x_projections(state, qubit)
        values, cum, states = _branch_arrays(raw)
        assign = _assign(cum, uniforms[rows, column])
        for j, (value, post) in enumerate(zip(values, states)):
            sub = rows[assign == j]
            if sub.size:
                walk(post, sub, stage_idx + 1, column + 1, bits + [value])

    for eve_value, encoded, rows in groups:
        walk(encoded, rows, 0, col, [])
    return counts
