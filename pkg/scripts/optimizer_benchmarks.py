"""COBYLA and Nelder-Mead on the sphere and Rosenbrock test functions.

    python scripts/optimizer_benchmarks.py --starts 20
"""
from __future__ import annotations

import argparse

import numpy as np

from qfraud.optimize import OptimizerConfig, minimize


def sphere(x):
    return float(np.sum(np.asarray(x) ** 2))


def rosenbrock(x):
    x = np.asarray(x)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=20, help="random starting points per problem")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    problems = [
        ("sphere-4d", sphere, [np.full(4, 1.0)] + [rng.uniform(-2, 2, 4) for _ in range(args.starts)], 200),
        ("rosenbrock-2d", rosenbrock, [np.array([-1.2, 1.0])] + [rng.uniform(-2, 2, 2) for _ in range(args.starts)], 500),
    ]
    for method in ("cobyla", "nelder-mead"):
        for name, fun, starts, budget in problems:
            cfg = OptimizerConfig(method=method, maxiter=budget, rho_begin=0.5, rho_end=1e-8)
            finals = np.array([minimize(fun, x0, cfg).best_f for x0 in starts])
            evals = minimize(fun, starts[0], cfg).evaluations
            print(f"{method:12} {name:14} budget {budget:4}  canonical start f={finals[0]:.3e} ({evals} evals)  "
                  f"median {np.median(finals):.3e}  worst {finals.max():.3e}")


if __name__ == "__main__":
    main()
