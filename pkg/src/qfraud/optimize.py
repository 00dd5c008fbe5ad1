"""Derivative-free minimizers used to fit circuit parameters.

Two methods are provided behind one ``minimize`` entry point:

* ``cobyla`` -- unconstrained COBYLA. A linear model of the objective is
  interpolated on an (n+1)-point simplex, the model is minimized inside a
  trust region, and the resolution ``rho`` is lowered toward ``rho_end``
  once the simplex can no longer make progress.
* ``nelder-mead`` -- the classic reflect/expand/contract/shrink simplex.

The budget unit is the objective evaluation.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

METHODS = ("cobyla", "nelder-mead")


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "cobyla"
    maxiter: int = 200
    rho_begin: float = 0.5
    rho_end: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown optimizer method {self.method!r}; expected one of {METHODS}")
        if self.maxiter < 1:
            raise ValueError("maxiter must be >= 1")
        if not (0 < self.rho_end < self.rho_begin):
            raise ValueError("need 0 < rho_end < rho_begin")


@dataclass
class OptimizeResult:
    best_x: np.ndarray
    best_f: float
    evaluations: int
    trajectory: list[tuple[int, float]] = field(default_factory=list)
    message: str = ""


class _BudgetExhausted(Exception):
    pass


class _Objective:
    """Counts evaluations, records the trajectory and keeps the best point."""

    def __init__(self, fun: Callable[[np.ndarray], float], maxfev: int):
        self.fun = fun
        self.maxfev = maxfev
        self.trajectory: list[tuple[int, float]] = []
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf

    @property
    def nfev(self) -> int:
        return len(self.trajectory)

    def __call__(self, x: np.ndarray) -> float:
        if self.nfev >= self.maxfev:
            raise _BudgetExhausted
        x = np.array(x, dtype=float)
        f = float(self.fun(x.copy()))
        if not math.isfinite(f):
            f = math.inf
        self.trajectory.append((self.nfev, f))
        if f < self.best_f:
            self.best_f = f
            self.best_x = x
        return f


def minimize(
    fun: Callable[[np.ndarray], float],
    x0,
    config: OptimizerConfig | None = None,
) -> OptimizeResult:
    """Minimize ``fun`` starting from ``x0`` within ``config.maxiter`` evaluations.

    The returned point is the best one evaluated, not the last. A non-finite
    value at ``x0`` raises ``ValueError``; later non-finite values are
    treated as ``+inf``.
    """
    config = config or OptimizerConfig()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.ndim != 1 or x0.size < 1:
        raise ValueError("x0 must be a non-empty vector")

    obj = _Objective(fun, config.maxiter)
    if not math.isfinite(obj(x0)):
        raise ValueError("objective is not finite at x0")

    message = "rho reached rho_end"
    try:
        if config.method == "cobyla":
            _cobyla(obj, x0, config.rho_begin, config.rho_end)
        else:
            _nelder_mead(obj, x0, config.rho_begin, config.rho_end)
    except _BudgetExhausted:
        message = "evaluation budget exhausted"
    except np.linalg.LinAlgError:
        message = "degenerate simplex"

    return OptimizeResult(
        best_x=obj.best_x.copy(),
        best_f=obj.best_f,
        evaluations=obj.nfev,
        trajectory=list(obj.trajectory),
        message=message,
    )


def _next_rho(rho: float, rho_end: float) -> float:
    # Powell's resolution schedule
    if rho <= 16 * rho_end:
        return rho_end
    if rho <= 250 * rho_end:
        return math.sqrt(rho * rho_end)
    return 0.1 * rho


def _cobyla(obj: _Objective, x0: np.ndarray, rho_begin: float, rho_end: float) -> None:
    n = x0.size
    rho = rho_begin
    delta = rho_begin

    sim = np.tile(x0, (n + 1, 1))
    fsim = np.empty(n + 1)
    fsim[0] = obj.best_f
    for j in range(n):
        sim[j + 1, j] += rho
        fsim[j + 1] = obj(sim[j + 1])

    while True:
        b = int(np.argmin(fsim))
        idx = np.array([j for j in range(n + 1) if j != b])
        xb, fb = sim[b], fsim[b]
        disp = sim[idx] - xb
        dinv = np.linalg.inv(disp)
        with np.errstate(invalid="ignore"):
            grad = dinv @ (fsim[idx] - fb)
        gnorm = np.linalg.norm(grad)

        ratio = -1.0
        if gnorm > 0 and math.isfinite(gnorm):
            step = -delta * grad / gnorm
            fnew = obj(xb + step)
            ratio = (fb - fnew) / (delta * gnorm)
            if ratio <= 0.1:
                delta *= 0.5
            elif ratio <= 0.7:
                delta = max(0.5 * delta, np.linalg.norm(step))
            else:
                delta = max(0.5 * delta, 2.0 * np.linalg.norm(step))
            if delta <= 1.5 * rho:
                delta = rho
            _insert_trial(sim, fsim, b, idx, dinv, step, fnew, delta)
            if ratio > 0.1:
                continue
        else:
            delta = rho if 0.5 * delta <= 1.5 * rho else 0.5 * delta

        # unsuccessful step: repair geometry first, then lower the resolution
        b = int(np.argmin(fsim))
        idx = np.array([j for j in range(n + 1) if j != b])
        xb = sim[b]
        disp = sim[idx] - xb
        dinv = np.linalg.inv(disp)
        bad = np.flatnonzero(~np.isfinite(fsim[idx]))
        if bad.size:
            # pull a rejected vertex halfway back toward the best point
            j = idx[bad[0]]
            sim[j] = xb + 0.5 * disp[bad[0]]
            fsim[j] = obj(sim[j])
            continue
        dist = np.linalg.norm(disp, axis=1)
        face = 1.0 / np.linalg.norm(dinv, axis=0)
        if dist.max() > 2.1 * delta or face.min() < 0.25 * delta:
            k = int(np.argmax(dist)) if dist.max() > 2.1 * delta else int(np.argmin(face))
            normal = dinv[:, k] / np.linalg.norm(dinv[:, k])
            grad = dinv @ (fsim[idx] - fsim[b])
            sign = -1.0 if grad @ normal > 0 else 1.0
            j = idx[k]
            sim[j] = xb + sign * delta * normal
            fsim[j] = obj(sim[j])
            continue
        if delta > rho:
            continue
        if rho <= rho_end:
            return
        new_rho = _next_rho(rho, rho_end)
        delta = max(0.5 * rho, new_rho)
        rho = new_rho


def _insert_trial(sim, fsim, b, idx, dinv, step, fnew, delta):
    """Swap the trial point into the simplex where it keeps the volume largest."""
    xnew = sim[b] + step
    lam = step @ dinv  # step == lam @ disp
    if fnew < fsim[b]:
        cand = np.append(idx, b)
        vol = np.append(np.abs(lam), abs(1.0 - lam.sum()))
    else:
        cand = idx
        vol = np.abs(lam)
    dist = np.linalg.norm(sim[cand] - xnew, axis=1)
    score = vol * np.maximum(1.0, (dist / delta) ** 2)
    k = int(np.argmax(score))
    if fnew < fsim[b] or score[k] > 1.0:
        sim[cand[k]] = xnew
        fsim[cand[k]] = fnew


def _nelder_mead(obj: _Objective, x0: np.ndarray, rho_begin: float, rho_end: float) -> None:
    n = x0.size
    sim = np.tile(x0, (n + 1, 1))
    fsim = np.empty(n + 1)
    fsim[0] = obj.best_f
    for j in range(n):
        sim[j + 1, j] += rho_begin
        fsim[j + 1] = obj(sim[j + 1])

    while True:
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        if np.max(np.abs(sim[1:] - sim[0])) <= rho_end:
            return
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + (centroid - sim[-1])
        fr = obj(xr)
        if fsim[0] <= fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
            continue
        if fr < fsim[0]:
            xe = centroid + 2.0 * (centroid - sim[-1])
            fe = obj(xe)
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
            continue
        if fr < fsim[-1]:
            xc = centroid + 0.5 * (xr - centroid)
        else:
            xc = centroid + 0.5 * (sim[-1] - centroid)
        fc = obj(xc)
        if fc < min(fr, fsim[-1]):
            sim[-1], fsim[-1] = xc, fc
            continue
        for j in range(1, n + 1):
            sim[j] = sim[0] + 0.5 * (sim[j] - sim[0])
            fsim[j] = obj(sim[j])


def write_trajectory_csv(trajectory, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["evaluation", "f"])
        for i, f in trajectory:
            writer.writerow([i, repr(float(f))])
    return path
