import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfraud.qsim import (
    Circuit, CircuitError, Gate, GATE_KINDS, Statevector, apply_gate, bitstring, parity_signs,
    pauli_expectation, probabilities, run_circuit, sample,
)

from oracles import circuit_unitary, full_matrix, random_gates, random_state

SQ = 1 / math.sqrt(2)


def build(n, descr):
    c = Circuit(n)
    for kind, targets, angle in descr:
        c.append(kind, *targets, angle=angle)
    return c


def test_hadamard_on_zero():
    out = apply_gate(Statevector.zero(1), Gate("H", (0,)))
    np.testing.assert_allclose(out.amplitudes, [SQ, SQ], atol=1e-15)


def test_cnot_makes_bell_state():
    # (|00> + |10>)/sqrt2 in qubit-0-first notation: qubit 0 in superposition
    psi = Statevector(2, np.array([SQ, SQ, 0, 0]))
    out = apply_gate(psi, Gate("CNOT", (0, 1)))
    np.testing.assert_allclose(out.amplitudes, [SQ, 0, 0, SQ], atol=1e-15)


@given(st.floats(-10, 10))
def test_rz_on_zero_is_a_global_phase(theta):
    out = apply_gate(Statevector.zero(1), Gate("RZ", (0,), theta))
    np.testing.assert_allclose(probabilities(out), [1.0, 0.0], atol=1e-15)


def test_bit_order_qubit0_is_lsb():
    out = run_circuit(Circuit(3).append("X", 0))
    assert np.argmax(np.abs(out.amplitudes)) == 1
    assert bitstring(1, 3) == "100"
    np.testing.assert_allclose(Statevector.basis("001").amplitudes, np.eye(8)[4])


def test_rotation_conventions():
    np.testing.assert_allclose(Gate("RZ", (0,), 0.3).matrix, np.diag([np.exp(-0.15j), np.exp(0.15j)]))
    np.testing.assert_allclose(Gate("P", (0,), 0.3).matrix, np.diag([1, np.exp(0.3j)]))


@pytest.mark.parametrize("kind", GATE_KINDS)
def test_every_gate_is_unitary(kind):
    targets = (0, 1) if kind in ("CNOT", "CZ", "SWAP") else (0,)
    angle = 0.77 if kind in ("RX", "RY", "RZ", "P") else None
    U = Gate(kind, targets, angle).matrix
    np.testing.assert_allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-12)


def test_invalid_indices_raise():
    with pytest.raises(CircuitError):
        Circuit(2).append("H", 2)
    with pytest.raises(CircuitError):
        Circuit(2).append("CNOT", 1, 1)
    with pytest.raises(CircuitError):
        apply_gate(Statevector.zero(1), Gate("H", (3,)))
    with pytest.raises(CircuitError):
        Circuit(13)


def test_run_circuit_rejects_mismatched_state():
    with pytest.raises(CircuitError):
        run_circuit(Circuit(2), Statevector.zero(3))


def test_empty_circuit_is_identity():
    psi = Statevector(3, random_state(np.random.default_rng(1), 3))
    np.testing.assert_array_equal(run_circuit(Circuit(3), psi).amplitudes, psi.amplitudes)


def test_double_hadamard_restores_state():
    psi = Statevector(2, random_state(np.random.default_rng(2), 2))
    out = run_circuit(Circuit(2).h(0).h(0), psi)
    np.testing.assert_allclose(out.amplitudes, psi.amplitudes, atol=1e-12)


def test_random_three_qubit_circuit_matches_dense_oracle():
    rng = np.random.default_rng(3)
    descr = random_gates(rng, 3, 20)
    psi = random_state(rng, 3)
    circ = build(3, descr)
    out = run_circuit(circ, Statevector(3, psi)).amplitudes
    np.testing.assert_allclose(out, circuit_unitary(circ.gates, 3) @ psi, atol=1e-10)


def test_oracle_two_qubit_matrices_agree_with_gate_definitions():
    # control on qubit 1, target qubit 0: |q0 q1> = |0 1> (index 2) -> |1 1> (index 3)
    M = full_matrix("CNOT", (1, 0), 2)
    assert M[3, 2] == 1 and M[2, 3] == 1


@given(st.integers(1, 4), st.integers(0, 30), st.integers(0, 2**32 - 1))
def test_norm_preserved_and_inverse_roundtrip(n, length, seed):
    rng = np.random.default_rng(seed)
    circ = build(n, random_gates(rng, n, length))
    psi = Statevector(n, random_state(rng, n))
    out = run_circuit(circ, psi)
    assert abs(out.norm() - 1) < 1e-9
    back = run_circuit(circ.inverse(), out)
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-9)


def test_statevector_is_immutable_and_validated():
    s = Statevector.zero(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0
    with pytest.raises(ValueError):
        Statevector(2, np.ones(3))


def test_probabilities_examples():
    np.testing.assert_allclose(probabilities(Statevector(1, np.array([SQ, SQ]))), [0.5, 0.5])
    np.testing.assert_allclose(probabilities(Statevector.basis("11")), [0, 0, 0, 1])
    psi = random_state(np.random.default_rng(4), 3)
    p = probabilities(Statevector(3, psi))
    np.testing.assert_allclose(p, psi.real**2 + psi.imag**2, atol=1e-15)
    assert abs(p.sum() - 1) < 1e-9


def test_sample_point_mass_and_errors():
    res = sample(Statevector.zero(3), 100, seed=0)
    assert res.counts == {"000": 100}
    with pytest.raises(ValueError):
        sample(Statevector.zero(1), 0, seed=0)


def test_sample_frequencies_binomial_bound():
    res = sample(Statevector(1, np.array([SQ, SQ])), 100_000, seed=11)
    assert sum(res.counts.values()) == 100_000
    for b in "01":
        assert abs(res.frequency(b) - 0.5) <= 0.01


def test_sample_is_deterministic():
    psi = Statevector(2, random_state(np.random.default_rng(5), 2))
    assert sample(psi, 500, seed=9).counts == sample(psi, 500, seed=9).counts


@given(st.integers(0, 2**32 - 1))
def test_sample_total_variation_two_qubits(seed):
    psi = Statevector(2, random_state(np.random.default_rng(seed), 2))
    res = sample(psi, 100_000, seed=seed)
    p = probabilities(psi)
    freq = np.array([res.frequency(bitstring(k, 2)) for k in range(4)])
    assert 0.5 * np.abs(freq - p).sum() <= 0.02


def test_pauli_expectation_examples():
    assert pauli_expectation(Statevector.zero(1), "Z") == pytest.approx(1.0)
    bell = Statevector(2, np.array([SQ, 0, 0, SQ]))
    assert pauli_expectation(bell, "ZZ") == pytest.approx(1.0)
    plus0 = Statevector(2, np.array([SQ, SQ, 0, 0]))
    assert pauli_expectation(plus0, "XI") == pytest.approx(1.0)


def test_pauli_expectation_rejects_bad_strings():
    with pytest.raises(ValueError):
        pauli_expectation(Statevector.zero(2), "Z")
    with pytest.raises(ValueError):
        pauli_expectation(Statevector.zero(2), "ZQ")


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_zz_expectation_is_parity_weighted_sum(n, seed):
    psi = Statevector(n, random_state(np.random.default_rng(seed), n))
    p = probabilities(psi)
    manual = sum((-1) ** bin(k).count("1") * p[k] for k in range(2**n))
    assert pauli_expectation(psi, "Z" * n) == pytest.approx(manual, abs=1e-12)
    assert float(p @ parity_signs(n)) == pytest.approx(manual, abs=1e-12)


@given(st.integers(1, 3), st.text("IXYZ", min_size=3, max_size=3), st.integers(0, 2**32 - 1))
def test_pauli_expectation_matches_dense_operator(n, word, seed):
    word = word[:n]
    psi = random_state(np.random.default_rng(seed), n)
    P = np.eye(2**n, dtype=complex)
    for q, ch in enumerate(word):
        if ch != "I":
            P = full_matrix(ch, (q,), n) @ P
    expected = np.vdot(psi, P @ psi).real
    value = pauli_expectation(Statevector(n, psi), word)
    assert -1 - 1e-12 <= value <= 1 + 1e-12
    assert value == pytest.approx(expected, abs=1e-12)
