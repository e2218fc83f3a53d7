"""Engine-level tests: gates, collapse rules, enumeration."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzqss.statevec import (
    MAX_QUBITS,
    MeasOutcome,
    NormalizationError,
    RegisterCapacityError,
    StateVector,
    append_ancilla,
    apply_cnot,
    apply_hadamard,
    basis_state,
    bell_projections,
    measure_bell,
    measure_x,
    measure_z,
    outcome_distribution,
    state_from_amplitudes,
    x_projections,
    z_projections,
)

RT2 = math.sqrt(2.0)

# the four Bell states in index order, built directly from amplitudes so the
# measurement convention is checked against an independent construction
BELL_STATES = (
    np.array([1, 0, 0, 1]) / RT2,
    np.array([1, 0, 0, -1]) / RT2,
    np.array([0, 1, 1, 0]) / RT2,
    np.array([0, 1, -1, 0]) / RT2,
)


@st.composite
def states(draw, max_qubits=5):
    n = draw(st.integers(1, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    v /= np.linalg.norm(v)
    return StateVector(n, v)


def assert_amps(state, expected, atol=1e-12):
    np.testing.assert_allclose(state.amps, np.asarray(expected, dtype=complex), atol=atol)


# ---------------------------------------------------------------- construction


def test_qubit0_is_most_significant():
    st2 = basis_state(2, 2)  # |10>
    assert st2.amps[2] == 1.0
    dist = outcome_distribution(st2, [(0, "Z"), (1, "Z")])
    assert dist[(1, 0)] == pytest.approx(1.0)


def test_basis_state_validation():
    with pytest.raises(ValueError):
        basis_state(0, 0)
    with pytest.raises(ValueError):
        basis_state(2, 4)
    with pytest.raises(RegisterCapacityError):
        basis_state(MAX_QUBITS + 1, 0)


def test_state_from_amplitudes_validation():
    with pytest.raises(ValueError):
        state_from_amplitudes([1.0, 0.0, 0.0])  # not a power of two
    with pytest.raises(ValueError):
        state_from_amplitudes([1.0, 1.0])  # norm 2
    with pytest.raises(ValueError):
        StateVector(2, np.array([1.0, 0.0]))  # wrong shape
    with pytest.raises(ValueError):
        StateVector(1, np.array([np.nan, 0.0]))


def test_append_ancilla_positions():
    plus = state_from_amplitudes([1 / RT2, 1 / RT2])
    one = basis_state(1, 1)
    front = append_ancilla(one, plus, "front")  # |+>|1>
    assert_amps(front, [0, 1 / RT2, 0, 1 / RT2])
    back = append_ancilla(one, plus, "back")  # |1>|+>
    assert_amps(back, [0, 0, 1 / RT2, 1 / RT2])
    with pytest.raises(ValueError):
        append_ancilla(one, plus, "middle")


def test_append_ancilla_capacity():
    big = basis_state(MAX_QUBITS - 1, 0)
    with pytest.raises(RegisterCapacityError):
        append_ancilla(big, basis_state(2, 0), "back")


# ---------------------------------------------------------------------- gates


def test_hadamard_on_each_basis_ket():
    assert_amps(apply_hadamard(basis_state(1, 0), 0), [1 / RT2, 1 / RT2])
    assert_amps(apply_hadamard(basis_state(1, 1), 0), [1 / RT2, -1 / RT2])
    # qubit 1 of |10> -> |1+>
    assert_amps(apply_hadamard(basis_state(2, 2), 1), [0, 0, 1 / RT2, 1 / RT2])


def test_cnot_permutes_basis():
    assert_amps(apply_cnot(basis_state(2, 2), 0, 1), [0, 0, 0, 1])  # |10> -> |11>
    assert_amps(apply_cnot(basis_state(2, 1), 0, 1), [0, 1, 0, 0])  # |01> fixed
    assert_amps(apply_cnot(basis_state(2, 1), 1, 0), [0, 0, 0, 1])  # reversed roles
    with pytest.raises(ValueError):
        apply_cnot(basis_state(2, 0), 1, 1)


def test_hadamard_truncates_cancelled_amplitudes():
    # |+> -> |0> must leave amplitude exactly 0 on |1>, not 1e-17 residue
    plus = apply_hadamard(basis_state(1, 0), 0)
    back = apply_hadamard(plus, 0)
    assert back.amps[1] == 0.0


@given(states())
@settings(deadline=None)
def test_hadamard_is_an_involution(state):
    q = state.num_qubits - 1
    twice = apply_hadamard(apply_hadamard(state, q), q)
    np.testing.assert_allclose(twice.amps, state.amps, atol=1e-9)


@given(states(max_qubits=4), st.integers(0, 3), st.integers(0, 3))
@settings(deadline=None)
def test_cnot_is_self_inverse(state, control, target):
    control %= state.num_qubits
    target %= state.num_qubits
    if control == target:
        return
    twice = apply_cnot(apply_cnot(state, control, target), control, target)
    np.testing.assert_allclose(twice.amps, state.amps, atol=1e-12)


@given(states())
@settings(deadline=None)
def test_gates_preserve_norm(state):
    q = state.num_qubits - 1
    for out in (apply_hadamard(state, q), apply_cnot(state, 0, q) if q else state):
        assert abs(np.linalg.norm(out.amps) - 1.0) < 1e-9


# --------------------------------------------------------------- measurements


def test_threshold_rule_on_plus_state():
    plus = apply_hadamard(basis_state(1, 0), 0)
    outcome, post = measure_z(plus, 0, 0.3)
    assert (outcome.value, outcome.probability) == (0, pytest.approx(0.5))
    assert_amps(post, [1, 0])
    outcome, post = measure_z(plus, 0, 0.5)  # not strictly below p0
    assert outcome.value == 1
    assert_amps(post, [0, 1])
    assert measure_z(plus, 0, 0.49999)[0].value == 0


def test_measure_z_on_deterministic_state():
    outcome, post = measure_z(basis_state(2, 3), 1, 0.999999)
    assert outcome == MeasOutcome("Z", 1, pytest.approx(1.0))
    assert_amps(post, [0, 0, 0, 1])


def test_z_projections_mark_impossible_branches():
    branches = z_projections(basis_state(1, 0), 0)
    assert branches[0][1] == pytest.approx(1.0)
    assert branches[1][1] == pytest.approx(0.0)
    assert branches[1][2] is None


def test_measure_x_values():
    minus = state_from_amplitudes([1 / RT2, -1 / RT2])
    outcome, post = measure_x(minus, 0, 0.999999)
    assert (outcome.basis, outcome.value) == ("X", 1)
    assert_amps(post, [1 / RT2, -1 / RT2])


@given(states(), st.floats(0.0, 1.0, exclude_max=True))
@settings(deadline=None)
def test_measure_x_equals_rotated_measure_z(state, u):
    q = 0
    direct, post = measure_x(state, q, u)
    rotated = apply_hadamard(state, q)
    via_z, collapsed = measure_z(rotated, q, u)
    assert direct.value == via_z.value
    assert direct.probability == pytest.approx(via_z.probability)
    np.testing.assert_allclose(post.amps, apply_hadamard(collapsed, q).amps, atol=1e-9)


@given(states())
@settings(deadline=None)
def test_born_completeness(state):
    for q in range(state.num_qubits):
        assert sum(p for _v, p, _s in z_projections(state, q)) == pytest.approx(1.0)
        assert sum(p for _v, p, _s in x_projections(state, q)) == pytest.approx(1.0)
    if state.num_qubits >= 2:
        assert sum(p for _i, p, _s in bell_projections(state, 0, 1)) == pytest.approx(1.0)


# ------------------------------------------------------------- Bell machinery


@pytest.mark.parametrize("index", range(4))
def test_bell_states_measure_to_their_index(index):
    state = state_from_amplitudes(BELL_STATES[index])
    outcome, post = measure_bell(state, 0, 1, 0.7)
    assert outcome == MeasOutcome("Bell", index, pytest.approx(1.0))
    assert_amps(post, BELL_STATES[index])


def test_bell_projection_of_01():
    # |01> = (psi+ + psi-)/sqrt2: outcomes 2 and 3, half each
    probs = {i: p for i, p, _s in bell_projections(basis_state(2, 1), 0, 1)}
    assert probs == pytest.approx({0: 0.0, 1: 0.0, 2: 0.5, 3: 0.5})


def test_bell_index_packs_phase_plus_twice_parity():
    # outcome index must equal phase + 2*parity for every Bell state
    for index, amps in enumerate(BELL_STATES):
        parity = int(np.flatnonzero(np.abs(amps) > 0.5)[0] in (1, 2))
        phase = int(amps[np.flatnonzero(np.abs(amps) > 0.5)[1]].real < 0)
        assert index == phase + 2 * parity


def test_bell_collapse_resynthesizes_the_pair():
    ghz = state_from_amplitudes(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / RT2)
    outcome, post = measure_bell(ghz, 1, 2, 0.25)  # first half -> phi+
    assert outcome.value == 0
    # qubit 0 decouples as |+>, qubits (1,2) hold phi+
    expected = np.kron(np.array([1, 1]) / RT2, BELL_STATES[0])
    assert_amps(post, expected)
    outcome, post = measure_bell(ghz, 1, 2, 0.75)
    assert outcome.value == 1
    assert_amps(post, np.kron(np.array([1, -1]) / RT2, BELL_STATES[1]))


def test_bell_cumulative_walk_skips_impossible_outcomes():
    # |01> has zero weight on outcomes 0/1; u=0.2 must land on outcome 2
    outcome, _post = measure_bell(basis_state(2, 1), 0, 1, 0.2)
    assert outcome.value == 2
    outcome, _post = measure_bell(basis_state(2, 1), 0, 1, 0.999999)
    assert outcome.value == 3


def test_bell_measure_validation():
    with pytest.raises(ValueError):
        measure_bell(basis_state(2, 0), 1, 1, 0.5)
    with pytest.raises(ValueError):
        bell_projections(basis_state(2, 0), 0, 2)


def test_bell_reversed_qubit_order():
    # swapping q1/q2 swaps which qubit supplies the phase bit; psi- flips sign
    state = state_from_amplitudes(BELL_STATES[3])
    outcome, _post = measure_bell(state, 1, 0, 0.9)
    assert outcome.value == 3
    outcome, _post = measure_bell(state_from_amplitudes(BELL_STATES[2]), 1, 0, 0.9)
    assert outcome.value == 2


# ----------------------------------------------------------------- enumeration


def test_outcome_distribution_ghz_z_plan():
    ghz = state_from_amplitudes(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / RT2)
    dist = outcome_distribution(ghz, [(0, "Z"), (1, "Z"), (2, "Z")])
    assert len(dist) == 8
    assert dist[(0, 0, 0)] == pytest.approx(0.5)
    assert dist[(1, 1, 1)] == pytest.approx(0.5)
    assert dist[(0, 1, 0)] == pytest.approx(0.0)


def test_outcome_distribution_x_entries_and_plan_order():
    # |+->: X-plan is deterministic, and keys follow plan order not qubit order
    state = state_from_amplitudes(np.array([1, -1, 1, -1]) / 2.0)
    dist = outcome_distribution(state, [(1, "X"), (0, "X")])
    assert dist[(1, 0)] == pytest.approx(1.0)


def test_outcome_distribution_ghz_x_parity():
    # X x X x X stabilizes the GHZ state: only even-parity sign patterns
    ghz = state_from_amplitudes(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / RT2)
    dist = outcome_distribution(ghz, [(0, "X"), (1, "X"), (2, "X")])
    for bits, p in dist.items():
        expected = 0.25 if sum(bits) % 2 == 0 else 0.0
        assert p == pytest.approx(expected, abs=1e-12)


def test_outcome_distribution_validation():
    with pytest.raises(ValueError):
        outcome_distribution(basis_state(2, 0), [(0, "Z"), (0, "X")])
    with pytest.raises(ValueError):
        outcome_distribution(basis_state(2, 0), [(0, "Y")])


@given(states(max_qubits=4))
@settings(deadline=None)
def test_outcome_distribution_sums_to_one(state):
    plan = [(q, "X" if q % 2 else "Z") for q in range(state.num_qubits)]
    dist = outcome_distribution(state, plan)
    assert sum(dist.values()) == pytest.approx(1.0)


def test_projection_guard_raises_on_dead_branch():
    with pytest.raises(NormalizationError):
        from ghzqss.statevec import _project_z

        _project_z(basis_state(1, 0), 0, 1)


def test_sampled_frequencies_track_probabilities():
    # one frozen seed, 1e5 draws on a fixed 3-qubit state, 3 standard errors
    rng = np.random.default_rng(20260817)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    state = StateVector(3, v / np.linalg.norm(v))
    p0 = z_projections(state, 1)[0][1]
    n = 100_000
    us = np.random.default_rng(42).random(n)
    hits = sum(1 for u in us if measure_z(state, 1, u)[0].value == 0)
    se = math.sqrt(p0 * (1 - p0) / n)
    assert abs(hits / n - p0) < 3 * se
