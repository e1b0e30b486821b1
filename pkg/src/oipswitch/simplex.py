"""Nelder-Mead simplex minimiser with restarts.

Small and dependency-free so that the fitting code can report its own
convergence history. Standard coefficients: reflect 1, expand 2,
contract 1/2, shrink 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


def _spread(simplex: np.ndarray) -> float:
    best = simplex[0]
    scale = np.maximum(1.0, np.abs(best))
    return float(np.max(np.abs(simplex[1:] - best) / scale))


def nelder_mead(
    func: Callable[[np.ndarray], float],
    x0: Sequence[float],
    steps: Sequence[float],
    *,
    xtol: float = 1e-10,
    ftol: float = 1e-14,
    max_iterations: int = 5000,
    max_restarts: int = 6,
) -> SimplexResult:
    """Minimise ``func`` starting from ``x0``.

    Converged when the simplex spread (relative to ``max(1, |x|)``) drops
    below ``xtol`` or when the spread of objective values drops below
    ``ftol`` times the best value. After convergence the search restarts
    from the best vertex with the original step sizes; it stops once a
    restart fails to improve the objective. ``history`` holds the best
    objective after every iteration and never increases.
    """
    x0 = np.asarray(x0, dtype=float)
    steps = np.asarray(steps, dtype=float)
    n = x0.size

    best_x = x0.copy()
    best_f = float(func(best_x))
    history: list[float] = []
    iterations = 0
    converged = False

    for _restart in range(max_restarts + 1):
        simplex = np.empty((n + 1, n))
        simplex[0] = best_x
        for i in range(n):
            simplex[i + 1] = best_x
            simplex[i + 1, i] += steps[i]
        fvals = np.array([best_f] + [float(func(v)) for v in simplex[1:]])
        start_f = best_f
        converged = False

        while iterations < max_iterations:
            order = np.argsort(fvals, kind="stable")
            simplex, fvals = simplex[order], fvals[order]
            if _spread(simplex) < xtol or (fvals[-1] - fvals[0]) <= ftol * abs(fvals[0]):
                converged = True
                break
            iterations += 1

            centroid = simplex[:-1].mean(axis=0)
            worst = simplex[-1]
            xr = centroid + (centroid - worst)
            fr = float(func(xr))
            if fr < fvals[0]:
                xe = centroid + 2.0 * (centroid - worst)
                fe = float(func(xe))
                if fe < fr:
                    simplex[-1], fvals[-1] = xe, fe
                else:
                    simplex[-1], fvals[-1] = xr, fr
            elif fr < fvals[-2]:
                simplex[-1], fvals[-1] = xr, fr
            else:
                if fr < fvals[-1]:
                    xc = centroid + 0.5 * (xr - centroid)
                else:
                    xc = centroid + 0.5 * (worst - centroid)
                fc = float(func(xc))
                if fc < min(fr, fvals[-1]):
                    simplex[-1], fvals[-1] = xc, fc
                else:
                    simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                    fvals[1:] = [float(func(v)) for v in simplex[1:]]
            history.append(float(min(fvals.min(), best_f)))

        i_best = int(np.argmin(fvals))
        improved = fvals[i_best] < start_f
        if fvals[i_best] <= best_f:
            best_x, best_f = simplex[i_best].copy(), float(fvals[i_best])
        if not converged or not improved:
            break

    return SimplexResult(best_x, best_f, iterations, converged, history)
