"""Self-contained phase-1 simplex for equality-constrained feasibility.

Decides whether {x >= 0 : A x = b} is nonempty by minimizing the sum of
artificial variables with a dense-tableau simplex.  Bland's rule (always
the lowest-index eligible column and, on ratio ties, the lowest-index
basic variable) guarantees termination without anti-cycling perturbation.
Redundant rows are harmless: their artificials simply stay basic at zero.

When the optimum exceeds the feasibility threshold, the phase-1 dual
vector is returned as a Farkas certificate y with y^T A <= 0 (up to
roundoff) and y^T b equal to the positive optimum, which no nonnegative
x can satisfy.

Problem sizes here are desk-scale, so there is no sparsity handling and
no revised simplex; the single hot operation is the dense pivot, which is
delegated to the kernel backends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import tableau_pivot
from .errors import WorkLimitExceeded

#: Phase-1 objective at or below this counts as feasible.
FEASIBILITY_TOL = 1e-9

#: Reduced-cost and pivot-eligibility threshold.
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class SimplexResult:
    """Feasibility outcome of the phase-1 solve.

    ``x`` is a nonnegative solution when feasible; ``certificate`` is the
    Farkas dual vector when infeasible; ``objective`` is the final sum of
    artificials in both cases.
    """

    feasible: bool
    x: np.ndarray | None
    certificate: np.ndarray | None
    objective: float
    iterations: int


def solve_equality_feasibility(A: np.ndarray, b: np.ndarray,
                               tol: float = FEASIBILITY_TOL) -> SimplexResult:
    """Find x >= 0 with A x = b, or a certificate that none exists."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError(f"b has shape {b.shape}, expected ({m},)")

    # orient rows so the artificial start basis is feasible (b >= 0)
    flips = np.where(b < 0.0, -1.0, 1.0)
    A = A * flips[:, None]
    b = b * flips

    # tableau rows 0..m-1: [A | I | b]; row m: phase-1 reduced costs.
    # With the artificial basis, the reduced cost of original column j is
    # -sum_i A[i, j] and the objective cell holds -sum(b).
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n, n + m)

    iterations = 0
    safety_cap = 1000 * (m + n) + 10_000  # Bland terminates well below this
    while True:
        entering = -1
        for j in range(n + m):
            if T[m, j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best_ratio = np.inf
        for i in range(m):
            coeff = T[i, entering]
            if coeff > PIVOT_TOL:
                ratio = T[i, -1] / coeff
                if ratio < best_ratio - PIVOT_TOL or (
                        abs(ratio - best_ratio) <= PIVOT_TOL
                        and (leaving < 0 or basis[i] < basis[leaving])):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            # phase-1 objective is bounded below by 0, so an unbounded
            # direction cannot occur with exact arithmetic; treat as stall
            break
        tableau_pivot(T, leaving, entering)
        basis[leaving] = entering
        iterations += 1
        if iterations > safety_cap:
            raise WorkLimitExceeded(iterations, safety_cap)

    objective = -T[m, -1]
    if objective <= tol:
        x = np.zeros(n)
        for i in range(m):
            if basis[i] < n:
                x[basis[i]] = T[i, -1]
        np.maximum(x, 0.0, out=x)
        return SimplexResult(feasible=True, x=x, certificate=None,
                             objective=float(objective), iterations=iterations)

    # y_i = 1 - (reduced cost of artificial i); undo the row orientation
    y = (1.0 - T[m, n:n + m]) * flips
    return SimplexResult(feasible=False, x=None, certificate=y,
                         objective=float(objective), iterations=iterations)
