"""Trainable circuit classifiers: VQC, Estimator-QNN and Sampler-QNN.

All three share the same pipeline: feature-map encoding, then a
hardware-efficient ansatz (RY layers separated by linear CNOT chains).
They differ in how the output state becomes a class-probability pair:

* VQC        -- p1 is the probability of an odd-parity bitstring.
* SamplerQNN -- same, estimated from shots (exact when ``shots == 0``).
* EstimatorQNN -- e = <Z...Z> feeds a 2x1 affine head and a softmax.

Parameters are fitted with the derivative-free optimizers in
:mod:`qfraud.optimize`; EstimatorQNN's head is fitted jointly with the
circuit angles as one flat vector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .featuremap import FeatureMapSpec, encode_batch
from .optimize import OptimizerConfig, minimize
from .qsim import Circuit, parity_signs, run_gates
from .rng import make_rng

KINDS = ("vqc", "eqnn", "sqnn")
LOSSES = ("cross_entropy", "squared_error")
MODEL_VERSION = 1
P_FLOOR = 1e-12


@dataclass(frozen=True)
class Ansatz:
    n_qubits: int
    reps: int = 3
    theta: np.ndarray | None = None

    def __post_init__(self):
        if self.n_qubits < 1 or self.reps < 1:
            raise ValueError("n_qubits and reps must be >= 1")
        theta = np.zeros(self.n_params) if self.theta is None else np.asarray(self.theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"ansatz needs {self.n_params} parameters, got {theta.shape}")
        object.__setattr__(self, "theta", theta)

    @property
    def n_params(self) -> int:
        return self.n_qubits * (self.reps + 1)

    def circuit(self, theta=None) -> Circuit:
        theta = self.theta if theta is None else np.asarray(theta, dtype=float)
        n = self.n_qubits
        circ = Circuit(n)
        for layer in range(self.reps + 1):
            if layer:
                for q in range(n - 1):
                    circ.cnot(q, q + 1)
            for q in range(n):
                circ.ry(q, theta[layer * n + q])
        return circ


@dataclass(frozen=True)
class LinearHead:
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float).reshape(2, 1)
        b = np.asarray(self.b, dtype=float).reshape(2)
        if not (np.isfinite(W).all() and np.isfinite(b).all()):
            raise ValueError("head weights must be finite")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    @classmethod
    def zeros(cls) -> "LinearHead":
        return cls(np.zeros((2, 1)), np.zeros(2))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.W.ravel(), self.b])


@dataclass(frozen=True)
class TrainRecord:
    iteration: int
    loss: float
    theta_snapshot: np.ndarray


@dataclass(frozen=True)
class VariationalModel:
    kind: str
    spec: FeatureMapSpec
    ansatz: Ansatz
    head: LinearHead | None = None
    loss_kind: str = "cross_entropy"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if self.loss_kind not in LOSSES:
            raise ValueError(f"unknown loss {self.loss_kind!r}")
        if (self.head is not None) != (self.kind == "eqnn"):
            raise ValueError("a classical head is required for eqnn and forbidden otherwise")
        if self.loss_kind == "squared_error" and self.kind != "eqnn":
            raise ValueError("squared_error is only defined for eqnn")
        if self.ansatz.n_qubits != self.spec.n_features:
            raise ValueError("ansatz and feature map disagree on qubit count")

    @property
    def n_qubits(self) -> int:
        return self.spec.n_features

    def params(self) -> np.ndarray:
        theta = self.ansatz.theta
        return np.concatenate([theta, self.head.flat()]) if self.head is not None else theta.copy()

    def with_params(self, params) -> "VariationalModel":
        params = np.asarray(params, dtype=float)
        k = self.ansatz.n_params
        ansatz = replace(self.ansatz, theta=params[:k])
        head = LinearHead(params[k:k + 2], params[k + 2:k + 4]) if self.head is not None else None
        return replace(self, ansatz=ansatz, head=head)

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "kind": self.kind,
            "spec": self.spec.to_dict(),
            "ansatz": {"reps": self.ansatz.reps, "theta": self.ansatz.theta.tolist()},
            "head": None if self.head is None else {"W": self.head.W.tolist(), "b": self.head.b.tolist()},
            "loss_kind": self.loss_kind,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VariationalModel":
        if d.get("version") != MODEL_VERSION or d.get("kind") not in KINDS:
            raise ValueError("not a version-1 variational model document")
        spec = FeatureMapSpec.from_dict(d["spec"])
        head = None if d["head"] is None else LinearHead(d["head"]["W"], d["head"]["b"])
        return cls(d["kind"], spec, Ansatz(spec.n_features, d["ansatz"]["reps"], d["ansatz"]["theta"]), head,
                   d["loss_kind"])

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "VariationalModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def init_theta(length: int, seed: int) -> np.ndarray:
    if length < 1:
        raise ValueError("length must be >= 1")
    return make_rng(seed, "init_theta").uniform(0.0, 1.0, length)


def make_model(kind: str, spec: FeatureMapSpec, reps: int = 3, seed: int = 0,
               loss_kind: str = "cross_entropy") -> VariationalModel:
    """A fresh model with angles drawn uniformly from [0, 1]."""
    ansatz = Ansatz(spec.n_features, reps, init_theta(spec.n_features * (reps + 1), seed))
    head = None
    if kind == "eqnn":
        w = make_rng(seed, "head").uniform(0.0, 1.0, 4)
        head = LinearHead(w[:2], w[2:])
    return VariationalModel(kind, spec, ansatz, head, loss_kind)


# -- forward passes ---------------------------------------------------------

def _output_states(model: VariationalModel, encoded: np.ndarray) -> np.ndarray:
    return run_gates(encoded, model.ansatz.circuit().gates, model.n_qubits)


def _odd_parity_prob(probs: np.ndarray, n: int) -> np.ndarray:
    odd = parity_signs(n) < 0
    return probs[..., odd].sum(axis=-1)


def _pairs(p1: np.ndarray) -> np.ndarray:
    p1 = np.clip(p1, 0.0, 1.0)
    return np.stack([1.0 - p1, p1], axis=-1)


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def parity_probabilities(model: VariationalModel, encoded: np.ndarray) -> np.ndarray:
    probs = np.abs(_output_states(model, encoded)) ** 2
    return _pairs(_odd_parity_prob(probs, model.n_qubits))


def sampled_probabilities(model: VariationalModel, encoded: np.ndarray, shots: int, seed: int) -> np.ndarray:
    if shots == 0:
        return parity_probabilities(model, encoded)
    probs = np.abs(_output_states(model, encoded)) ** 2
    probs = probs / probs.sum(axis=-1, keepdims=True)
    rng = make_rng(seed, "sqnn")
    counts = np.stack([rng.multinomial(shots, p) for p in probs])
    return _pairs(_odd_parity_prob(counts, model.n_qubits) / shots)


def zz_expectations(model: VariationalModel, encoded: np.ndarray) -> np.ndarray:
    probs = np.abs(_output_states(model, encoded)) ** 2
    return np.clip(probs @ parity_signs(model.n_qubits), -1.0, 1.0)


def head_probabilities(head: LinearHead, e: np.ndarray) -> np.ndarray:
    logits = np.asarray(e, dtype=float)[..., None] * head.W[:, 0] + head.b
    return _softmax(logits)


def class_probabilities(model: VariationalModel, X=None, *, encoded=None, shots: int = 0, seed: int = 0):
    """(m, 2) class-probability pairs for a batch of feature vectors."""
    if encoded is None:
        encoded = encode_batch(model.spec, X)
    if model.kind == "eqnn":
        return head_probabilities(model.head, zz_expectations(model, encoded))
    if model.kind == "sqnn":
        return sampled_probabilities(model, encoded, shots, seed)
    return parity_probabilities(model, encoded)


def _require(model, kind):
    if model.kind != kind:
        raise ValueError(f"expected a {kind} model, got {model.kind}")


def forward_vqc(model: VariationalModel, x) -> tuple[float, float]:
    _require(model, "vqc")
    p = parity_probabilities(model, encode_batch(model.spec, x))[0]
    return float(p[0]), float(p[1])


def forward_eqnn(model: VariationalModel, x) -> tuple[float, float]:
    _require(model, "eqnn")
    p = head_probabilities(model.head, zz_expectations(model, encode_batch(model.spec, x)))[0]
    return float(p[0]), float(p[1])


def forward_sqnn(model: VariationalModel, x, shots: int = 0, seed: int = 0) -> tuple[float, float]:
    _require(model, "sqnn")
    p = sampled_probabilities(model, encode_batch(model.spec, x), shots, seed)[0]
    return float(p[0]), float(p[1])


def predict_pair(pair) -> int:
    """argmax with ties going to class 0."""
    return int(pair[1] > pair[0])


def predict(model: VariationalModel, X, shots: int = 0, seed: int = 0) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if model.loss_kind == "squared_error":
        e = zz_expectations(model, encode_batch(model.spec, X))
        return (e > 0).astype(int)
    p = class_probabilities(model, X, shots=shots, seed=seed)
    return (p[:, 1] > p[:, 0]).astype(int)


# -- losses -----------------------------------------------------------------

def cross_entropy(pairs, y) -> float:
    pairs = np.asarray(pairs, dtype=float)
    y = np.asarray(y, dtype=int)
    if y.size == 0:
        raise ValueError("empty batch")
    p = pairs[np.arange(y.size), y]
    return float(np.mean(-np.log(np.maximum(p, P_FLOOR))))


def squared_error(e, y) -> float:
    """Mean (e_i - t_i)^2 with targets t = +1 for class 1 and -1 for class 0."""
    e = np.asarray(e, dtype=float)
    y = np.asarray(y, dtype=int)
    if y.size == 0:
        raise ValueError("empty batch")
    t = np.where(y == 1, 1.0, -1.0)
    return float(np.mean((e - t) ** 2))


def loss(model: VariationalModel, X, y, *, encoded=None, shots: int = 0, seed: int = 0) -> float:
    y = np.asarray(y, dtype=int)
    if y.size == 0:
        raise ValueError("empty batch")
    if encoded is None:
        encoded = encode_batch(model.spec, X)
    if model.loss_kind == "squared_error":
        return squared_error(zz_expectations(model, encoded), y)
    return cross_entropy(class_probabilities(model, encoded=encoded, shots=shots, seed=seed), y)


# -- training ---------------------------------------------------------------

def train(
    model: VariationalModel,
    X,
    y,
    config: OptimizerConfig | None = None,
    *,
    maxiter: int | None = None,
    shots: int = 0,
    seed: int = 0,
) -> tuple[VariationalModel, list[TrainRecord]]:
    """Minimize the training loss over all model parameters.

    Every objective evaluation is recorded. The returned model carries the
    best parameters seen. ``maxiter=0`` evaluates the starting point only.
    """
    y = np.asarray(y, dtype=int)
    if set(np.unique(y).tolist()) != {0, 1}:
        raise ValueError("training labels must contain both classes")
    config = config or OptimizerConfig()
    budget = config.maxiter if maxiter is None else maxiter
    encoded = encode_batch(model.spec, X)
    records: list[TrainRecord] = []

    def objective(params):
        m = model.with_params(params)
        # fresh shot stream per evaluation, reproducible from the seed
        value = loss(m, None, y, encoded=encoded, shots=shots, seed=seed * 1_000_003 + len(records))
        records.append(TrainRecord(len(records), value, np.array(params, dtype=float)))
        return value

    x0 = model.params()
    if budget == 0:
        objective(x0)
        return model, records
    result = minimize(objective, x0, replace(config, maxiter=budget))
    if not records:
        raise RuntimeError("optimizer produced no evaluations")
    return model.with_params(result.best_x), records

