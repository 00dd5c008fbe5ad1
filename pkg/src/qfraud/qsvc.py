"""Support-vector classifier on a precomputed quantum kernel.

The soft-margin dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

is solved by sequential minimal optimization, picking the maximal
KKT-violating pair at every step. Labels are {0, 1} on the outside and
{-1, +1} inside.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .featuremap import FeatureMapSpec
from .kernel import KernelMatrix, cross_kernel, gram_matrix

MODEL_VERSION = 1
SV_THRESHOLD = 1e-8


class TrainingError(RuntimeError):
    pass


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    gap: float


def dual_objective(alpha, y, K) -> float:
    ay = np.asarray(alpha) * np.asarray(y)
    return float(np.sum(alpha) - 0.5 * ay @ np.asarray(K) @ ay)


def smo(K, y, C: float = 1.0, tol: float = 1e-3, max_iter: int = 100_000) -> SmoResult:
    """Solve the dual for labels ``y`` in {-1, +1}."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    Q = K * np.outer(y, y)
    QD = np.diag(Q).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 1/2 a'Qa - e'a
    tau = 1e-12

    it = 0
    gap = np.inf
    while it < max_iter:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        score = -y * G
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        gap = score[i] - score[j]
        if gap < tol:
            break
        it += 1

        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(QD[i] + QD[j] + 2 * Q[i, j], tau)
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, C - diff
            elif alpha[j] > C:
                alpha[j], alpha[i] = C, C + diff
        else:
            quad = max(QD[i] + QD[j] - 2 * Q[i, j], tau)
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, total - C
            elif alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, total
            if total > C:
                if alpha[j] > C:
                    alpha[j], alpha[i] = C, total - C
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, total

        G += Q[:, i] * (alpha[i] - ai) + Q[:, j] * (alpha[j] - aj)

    return SmoResult(alpha, _bias(alpha, y, G, C), it, float(gap))


def _bias(alpha, y, G, C) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(-yG[free].mean())
    at_upper = alpha >= C
    # bounds on r = -b from the two bound-constrained index sets
    ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (~at_upper & (y < 0))
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    return float(-(ub + lb) / 2)


@dataclass
class QsvcModel:
    alphas: np.ndarray  # alpha_i * y_i for each support vector
    bias: float
    support_vectors: np.ndarray
    support_index: np.ndarray
    spec: FeatureMapSpec | None
    C: float
    dual_objective: float = float("nan")

    def decision_from_kernel(self, k_rows) -> np.ndarray:
        """f for each row of kernel values against the support vectors."""
        return np.asarray(k_rows, dtype=float) @ self.alphas + self.bias

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "kind": "qsvc",
            "C": self.C,
            "bias": self.bias,
            "alphas": self.alphas.tolist(),
            "support_index": self.support_index.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "spec": self.spec.to_dict() if self.spec else None,
            "dual_objective": self.dual_objective,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QsvcModel":
        if d.get("version") != MODEL_VERSION or d.get("kind") != "qsvc":
            raise ValueError("not a version-1 QSVC model document")
        return cls(
            alphas=np.array(d["alphas"], dtype=float),
            bias=float(d["bias"]),
            support_vectors=np.array(d["support_vectors"], dtype=float),
            support_index=np.array(d["support_index"], dtype=int),
            spec=FeatureMapSpec.from_dict(d["spec"]) if d["spec"] else None,
            C=float(d["C"]),
            dual_objective=float(d["dual_objective"]),
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "QsvcModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def train_qsvc(
    gram: KernelMatrix | np.ndarray,
    y,
    C: float = 1.0,
    *,
    X=None,
    spec: FeatureMapSpec | None = None,
    tol: float = 1e-3,
    max_iter: int = 100_000,
) -> QsvcModel:
    """Fit the dual on a Gram matrix; keep only samples with |alpha| > 1e-8."""
    K = gram.values if isinstance(gram, KernelMatrix) else np.asarray(gram, dtype=float)
    y = np.asarray(y)
    if C <= 0:
        raise ValueError("C must be positive")
    if K.shape != (y.size, y.size):
        raise ValueError("Gram matrix and labels disagree in size")
    if set(np.unique(y).tolist()) != {0, 1}:
        raise TrainingError("training labels must contain both classes 0 and 1")
    ypm = np.where(y == 1, 1.0, -1.0)
    res = smo(K, ypm, C, tol, max_iter)
    keep = np.flatnonzero(res.alpha > SV_THRESHOLD)
    sv = np.asarray(X, dtype=float)[keep] if X is not None else np.empty((keep.size, 0))
    return QsvcModel(
        alphas=res.alpha[keep] * ypm[keep],
        bias=res.bias,
        support_vectors=sv,
        support_index=keep,
        spec=spec,
        C=float(C),
        dual_objective=dual_objective(res.alpha, ypm, K),
    )


def fit_qsvc(spec: FeatureMapSpec, X, y, C: float = 1.0, mode: str = "exact", shots: int = 1024, seed: int = 0):
    gram = gram_matrix(spec, X, mode=mode, shots=shots, seed=seed)
    if mode == "shots":
        gram = gram.clip_psd()
    return train_qsvc(gram, y, C, X=X, spec=spec)


def decision_function(model: QsvcModel, X, mode: str = "exact", shots: int = 1024, seed: int = 0) -> np.ndarray:
    if model.spec is None:
        raise ValueError("model has no feature map; use decision_from_kernel")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    k = cross_kernel(model.spec, X, model.support_vectors, mode=mode, shots=shots, seed=seed)
    return model.decision_from_kernel(k)


def predict_qsvc(model: QsvcModel, x, mode: str = "exact", shots: int = 1024, seed: int = 0) -> tuple[int, float]:
    f = float(decision_function(model, x, mode, shots, seed)[0])
    return int(f > 0), f


def kkt_residuals(alpha, y, K, bias, C) -> np.ndarray:
    """Per-sample violation of the soft-margin KKT conditions (0 when satisfied)."""
    alpha = np.asarray(alpha, dtype=float)
    y = np.asarray(y, dtype=float)
    m = y * (np.asarray(K) @ (alpha * y) + bias)
    eps = 1e-8
    res = np.zeros_like(m)
    lower = alpha <= eps
    upper = alpha >= C - eps
    free = ~lower & ~upper
    res[lower] = np.maximum(0.0, 1.0 - m[lower])
    res[upper] = np.maximum(0.0, m[upper] - 1.0)
    res[free] = np.abs(m[free] - 1.0)
    return res
