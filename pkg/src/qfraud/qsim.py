"""Dense statevector simulator for few-qubit circuits.

Conventions
-----------
* Qubit ``q`` is bit ``q`` (least significant first) of the basis index.
* Kets, bitstrings and Pauli strings are written qubit 0 first, so
  ``"01"`` means qubit 0 in ``|0>`` and qubit 1 in ``|1>`` (basis index 2).
* ``RZ(t) = diag(exp(-i t/2), exp(+i t/2))`` and ``P(t) = diag(1, exp(i t))``.

Gates are applied by reshaping the amplitude array so that the target
qubits become their own axes; no ``2^n x 2^n`` matrix is ever built here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import make_rng

MAX_QUBITS = 12

_SQ2 = 1.0 / np.sqrt(2.0)
_FIXED = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    # two-qubit matrices are indexed |first second>, first qubit most significant
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
ROTATIONS = ("RX", "RY", "RZ", "P")
TWO_QUBIT = ("CNOT", "CZ", "SWAP")
SELF_INVERSE = ("H", "X", "Y", "Z", "CNOT", "CZ", "SWAP")
GATE_KINDS = tuple(_FIXED) + ROTATIONS


class CircuitError(ValueError):
    """Invalid qubit index, gate, or register size."""


def _rotation(kind: str, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    return np.diag([1.0, np.exp(1j * theta)]).astype(complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.targets) != arity:
            raise CircuitError(f"{self.kind} acts on {arity} qubit(s), got {self.targets}")
        if len(set(self.targets)) != arity:
            raise CircuitError(f"{self.kind} control and target must differ")
        if (self.kind in ROTATIONS) != (self.angle is not None):
            raise CircuitError(f"{self.kind}: angle {'required' if self.kind in ROTATIONS else 'not allowed'}")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def matrix(self) -> np.ndarray:
        if self.kind in ROTATIONS:
            return _rotation(self.kind, self.angle)
        return _FIXED[self.kind]

    def inverse(self) -> "Gate":
        if self.kind in SELF_INVERSE:
            return self
        if self.kind in ROTATIONS:
            return Gate(self.kind, self.targets, -self.angle)
        # S and T have no parameter of their own
        return Gate("P", self.targets, -np.pi / 2 if self.kind == "S" else -np.pi / 4)


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        _check_size(self.n_qubits)

    def append(self, kind: str, *targets: int, angle: float | None = None) -> "Circuit":
        gate = Gate(kind, targets, angle)
        _check_targets(gate, self.n_qubits)
        self.gates.append(gate)
        return self

    def h(self, q):
        return self.append("H", q)

    def ry(self, q, theta):
        return self.append("RY", q, angle=theta)

    def rx(self, q, theta):
        return self.append("RX", q, angle=theta)

    def p(self, q, theta):
        return self.append("P", q, angle=theta)

    def cnot(self, control, target):
        return self.append("CNOT", control, target)

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise CircuitError("qubit counts differ")
        self.gates.extend(other.gates)
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, [g.inverse() for g in reversed(self.gates)])

    def count(self, kind: str | None = None) -> int:
        return sum(1 for g in self.gates if kind is None or g.kind == kind)

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.kind in TWO_QUBIT)

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_size(self.n_qubits)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise CircuitError(f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, bits: str) -> "Statevector":
        """``basis("01")`` is qubit 0 in |0>, qubit 1 in |1>."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits[::-1], 2)] = 1.0
        return cls(len(bits), amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class ShotResult:
    counts: dict[str, int]
    shots: int

    def frequency(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots


def _check_size(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise CircuitError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n}")


def _check_targets(gate: Gate, n: int) -> None:
    for t in gate.targets:
        if not 0 <= t < n:
            raise CircuitError(f"qubit index {t} out of range for {n} qubits")


def apply_matrix(amps: np.ndarray, matrix: np.ndarray, targets, n_qubits: int) -> np.ndarray:
    """Apply a k-qubit ``matrix`` to ``targets`` of a (possibly batched) amplitude array.

    ``amps`` has shape ``(..., 2**n_qubits)``; leading axes are batch axes.
    """
    k = len(targets)
    batch = amps.shape[:-1]
    nb = len(batch)
    psi = amps.reshape(batch + (2,) * n_qubits)
    # qubit q lives on tensor axis nb + (n-1-q) in C order
    axes = [nb + n_qubits - 1 - q for q in targets]
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(psi, u, axes=(axes, list(range(k, 2 * k))))
    # tensordot appends the gate's output axes last; move them back into place
    out = np.moveaxis(out, list(range(out.ndim - k, out.ndim)), axes)
    return out.reshape(amps.shape)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    _check_targets(gate, state.n_qubits)
    return Statevector(state.n_qubits, apply_matrix(state.amplitudes, gate.matrix, gate.targets, state.n_qubits))


def run_gates(amps: np.ndarray, gates, n_qubits: int) -> np.ndarray:
    """Batched version of :func:`run_circuit` on raw amplitude arrays."""
    for g in gates:
        amps = apply_matrix(amps, g.matrix, g.targets, n_qubits)
    return amps


def run_circuit(circuit: Circuit, initial: Statevector | None = None) -> Statevector:
    if initial is None:
        initial = Statevector.zero(circuit.n_qubits)
    if initial.n_qubits != circuit.n_qubits:
        raise CircuitError(f"circuit has {circuit.n_qubits} qubits, state has {initial.n_qubits}")
    for g in circuit.gates:
        _check_targets(g, circuit.n_qubits)
    amps = run_gates(initial.amplitudes, circuit.gates, circuit.n_qubits)
    return Statevector(circuit.n_qubits, amps)


def probabilities(state: Statevector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def bitstring(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")[::-1]


def sample(state: Statevector, shots: int, seed: int) -> ShotResult:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = probabilities(state)
    p = p / p.sum()
    draws = make_rng(seed, "sample").multinomial(shots, p)
    counts = {bitstring(k, state.n_qubits): int(c) for k, c in enumerate(draws) if c}
    return ShotResult(counts, int(shots))


def parity_signs(n_qubits: int, qubits=None) -> np.ndarray:
    """(-1)^(parity of the selected bits) for every basis index."""
    idx = np.arange(2**n_qubits)
    mask = sum(1 << q for q in (range(n_qubits) if qubits is None else qubits))
    bits = np.array([bin(v).count("1") for v in (idx & mask)])
    return 1 - 2 * (bits & 1)


_PAULI = {"X": _FIXED["X"], "Y": _FIXED["Y"], "Z": _FIXED["Z"]}


def pauli_expectation(state: Statevector, pauli: str) -> float:
    """<psi|P|psi> for a Pauli string whose character ``i`` acts on qubit ``i``."""
    if len(pauli) != state.n_qubits:
        raise ValueError(f"Pauli string {pauli!r} has length {len(pauli)}, state has {state.n_qubits} qubits")
    bad = set(pauli) - set("IXYZ")
    if bad:
        raise ValueError(f"invalid Pauli characters {sorted(bad)}")
    amps = state.amplitudes
    out = amps
    for q, ch in enumerate(pauli):
        if ch != "I":
            out = apply_matrix(out, _PAULI[ch], (q,), state.n_qubits)
    value = np.vdot(amps, out)
    if abs(value.imag) > 1e-9:
        raise ArithmeticError(f"expectation has imaginary part {value.imag}")
    return float(value.real)
