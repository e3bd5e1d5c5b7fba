"""Compact deterministic Nelder-Mead.

No randomness: given the same start, step and budget the trajectory is
identical, which the search harness relies on for seed reproducibility.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def nelder_mead(fn: Callable[[np.ndarray], float], x0: np.ndarray,
                step: float = 0.25, budget: int = 200,
                xtol: float = 1e-9) -> tuple[np.ndarray, float]:
    """Minimize fn from x0; returns (best point, best value).

    Standard reflection/expansion/contraction/shrink coefficients; stops when
    the evaluation budget is exhausted or the simplex collapses.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    alpha, gamma, beta, sigma = 1.0, 2.0, 0.5, 0.5

    simplex = [x0.copy()]
    for i in range(n):
        pt = x0.copy()
        pt[i] += step
        simplex.append(pt)
    values = [fn(pt) for pt in simplex]
    evals = len(simplex)

    while evals < budget:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = max(np.max(np.abs(pt - simplex[0])) for pt in simplex[1:])
        if spread < xtol:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + alpha * (centroid - simplex[-1])
        f_r = fn(reflected)
        evals += 1
        if f_r < values[0]:
            expanded = centroid + gamma * (reflected - centroid)
            f_e = fn(expanded)
            evals += 1
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + beta * (simplex[-1] - centroid)
            f_c = fn(contracted)
            evals += 1
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
            else:
                for i in range(1, len(simplex)):
                    simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                    values[i] = fn(simplex[i])
                evals += n

    best = int(np.argmin(values))
    return simplex[best].copy(), float(values[best])
