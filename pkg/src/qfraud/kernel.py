"""Fidelity quantum kernel and Gram matrices.

``K(x, x') = |<psi(x')|psi(x)>|^2`` is computed either from statevectors
(exact) or by the compute-uncompute estimator: run ``U(x)`` followed by
``U(x')^dagger`` and count how often the all-zeros bitstring comes up.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .featuremap import FeatureMapSpec, build_feature_map, encode_batch, encode_to_state
from .qsim import run_circuit, sample


@dataclass(frozen=True)
class KernelMatrix:
    values: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"kernel matrix must be square, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        ids = tuple(str(i) for i in (self.ids if self.ids is not None else range(v.shape[0])))
        if len(ids) != v.shape[0]:
            raise ValueError("one id per sample required")
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.values).min())

    def clip_psd(self) -> "KernelMatrix":
        """Zero out negative eigenvalues (shot-noise Gram matrices)."""
        w, v = np.linalg.eigh(self.values)
        if w.min() >= 0:
            return self
        clipped = (v * np.clip(w, 0, None)) @ v.T
        return KernelMatrix(0.5 * (clipped + clipped.T), self.ids)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.ids)
            for row in self.values:
                w.writerow([repr(float(v)) for v in row])
        return path

    @classmethod
    def from_csv(cls, path) -> "KernelMatrix":
        with Path(path).open(newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValueError(f"{path}: empty kernel file")
        return cls(np.array([[float(v) for v in r] for r in rows[1:]]).reshape(len(rows) - 1, -1), tuple(rows[0]))


def _check_pair(spec, x, x2):
    x, x2 = np.asarray(x, dtype=float), np.asarray(x2, dtype=float)
    if x.shape != x2.shape:
        raise ValueError(f"feature length mismatch: {x.shape} vs {x2.shape}")
    return x, x2


def kernel_exact(spec: FeatureMapSpec, x, x2) -> float:
    x, x2 = _check_pair(spec, x, x2)
    a = encode_to_state(spec, x).amplitudes
    b = encode_to_state(spec, x2).amplitudes
    return float(abs(np.vdot(b, a)) ** 2)


def kernel_shots(spec: FeatureMapSpec, x, x2, shots: int, seed: int) -> float:
    x, x2 = _check_pair(spec, x, x2)
    circ = build_feature_map(spec, x).extend(build_feature_map(spec, x2).inverse())
    result = sample(run_circuit(circ), shots, seed)
    return result.frequency("0" * spec.n_features)


def _pair_seed(seed: int, i: int, j: int) -> int:
    return int(np.random.SeedSequence([seed % 2**32, i, j]).generate_state(1)[0])


def gram_matrix(
    spec: FeatureMapSpec,
    X,
    mode: str = "exact",
    shots: int = 1024,
    seed: int = 0,
    ids=None,
) -> KernelMatrix:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m = X.shape[0]
    if m == 0:
        raise ValueError("need at least one sample")
    if mode == "exact":
        states = encode_batch(spec, X)
        overlaps = np.abs(states.conj() @ states.T) ** 2
        vals = np.triu(overlaps)
        vals = vals + np.triu(vals, 1).T
        # self-fidelity is 1 up to rounding; pin it
        np.fill_diagonal(vals, 1.0)
        return KernelMatrix(vals, ids)
    if mode != "shots":
        raise ValueError(f"unknown kernel mode {mode!r}")
    vals = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            vals[i, j] = vals[j, i] = kernel_shots(spec, X[i], X[j], shots, _pair_seed(seed, i, j))
    return KernelMatrix(vals, ids)


def cross_kernel(spec: FeatureMapSpec, A, B, mode: str = "exact", shots: int = 1024, seed: int = 0) -> np.ndarray:
    """Kernel values between every row of ``A`` and every row of ``B``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if mode == "exact":
        sa = encode_batch(spec, A)
        sb = encode_batch(spec, B)
        return np.abs(sa @ sb.conj().T) ** 2
    if mode != "shots":
        raise ValueError(f"unknown kernel mode {mode!r}")
    out = np.empty((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            out[i, j] = kernel_shots(spec, A[i], B[j], shots, _pair_seed(seed + 1, i, j))
    return out
