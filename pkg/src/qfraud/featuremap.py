"""Data-encoding circuits: first-order Z, second-order ZZ and general Pauli expansions.

Every repetition applies a Hadamard layer and then, for each Pauli string
and each index set ``S`` it is placed on, the evolution
``exp(-i phi_S(x) P_S)`` (up to global phase) built from a CNOT parity
chain and a ``P(2 phi_S)`` gate on the last qubit of ``S``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .qsim import Circuit, Statevector, run_circuit

FAMILIES = ("z", "zz", "pauli")
ENTANGLEMENTS = ("full", "linear")


@dataclass(frozen=True)
class FeatureMapSpec:
    family: str = "zz"
    n_features: int = 4
    reps: int = 2
    entanglement: str = "full"
    pauli_strings: tuple[str, ...] = ("Z", "ZZ")

    def __post_init__(self):
        family = self.family.lower()
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "entanglement", self.entanglement.lower())
        object.__setattr__(self, "pauli_strings", tuple(s.upper() for s in self.pauli_strings))
        if family not in FAMILIES:
            raise ValueError(f"unknown feature map family {self.family!r}; expected one of {FAMILIES}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ValueError(f"unknown entanglement {self.entanglement!r}; expected one of {ENTANGLEMENTS}")
        if self.n_features < 1 or self.reps < 1:
            raise ValueError("n_features and reps must be >= 1")
        for s in self.strings:
            if not s or set(s) - set("IXYZ"):
                raise ValueError(f"invalid Pauli string {s!r}")
            # the fixed zz strings simply have no pair placements on one qubit
            if family == "pauli" and len(s) > self.n_features:
                raise ValueError(f"Pauli string {s!r} longer than {self.n_features} features")

    @property
    def strings(self) -> tuple[str, ...]:
        if self.family == "z":
            return ("Z",)
        if self.family == "zz":
            return ("Z", "ZZ")
        return self.pauli_strings

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pauli_strings"] = list(self.pauli_strings)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMapSpec":
        d = dict(d)
        if "pauli_strings" in d:
            d["pauli_strings"] = tuple(d["pauli_strings"])
        return cls(**d)


def phi(S, x) -> float:
    """x_i for a singleton, otherwise the product of (pi - x_j) over S."""
    S = tuple(S)
    if not S:
        raise ValueError("index set must be non-empty")
    if len(S) == 1:
        return float(x[S[0]])
    return float(np.prod([math.pi - x[j] for j in S]))


def index_sets(size: int, n: int, entanglement: str = "full") -> list[tuple[int, ...]]:
    if size == 1:
        return [(i,) for i in range(n)]
    if entanglement == "full":
        return list(itertools.combinations(range(n), size))
    return [tuple(range(i, i + size)) for i in range(n - size + 1)]


def _evolution(circ: Circuit, pauli: str, S, x) -> None:
    active = [(q, p) for q, p in zip(S, pauli) if p != "I"]
    if not active:
        return
    qubits = [q for q, _ in active]
    angle = 2.0 * phi(qubits, x)
    # rotate X / Y eigenbases onto Z
    for q, p in active:
        if p == "X":
            circ.h(q)
        elif p == "Y":
            circ.rx(q, math.pi / 2)
    for a, b in zip(qubits, qubits[1:]):
        circ.cnot(a, b)
    circ.p(qubits[-1], angle)
    for a, b in reversed(list(zip(qubits, qubits[1:]))):
        circ.cnot(a, b)
    for q, p in active:
        if p == "X":
            circ.h(q)
        elif p == "Y":
            circ.rx(q, -math.pi / 2)


def build_feature_map(spec: FeatureMapSpec, x) -> Circuit:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n_features,):
        raise ValueError(f"expected {spec.n_features} features, got shape {x.shape}")
    n = spec.n_features
    circ = Circuit(n)
    for _ in range(spec.reps):
        for q in range(n):
            circ.h(q)
        for pauli in spec.strings:
            for S in index_sets(len(pauli), n, spec.entanglement):
                _evolution(circ, pauli, S, x)
    return circ


def encode_to_state(spec: FeatureMapSpec, x) -> Statevector:
    return run_circuit(build_feature_map(spec, x))


def encode_batch(spec: FeatureMapSpec, X) -> np.ndarray:
    """Encoded amplitudes for every row of ``X``, shape ``(m, 2**n)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.stack([encode_to_state(spec, x).amplitudes for x in X])
