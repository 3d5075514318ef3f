"""Quantum singlet-state reference predictions.

This module is the oracle the hidden-variable machinery is tested
against, so it is deliberately self-contained: outcome probabilities are
computed by explicit amplitude construction, never from a correlation
formula.

Construction.  A spin measurement along planar angle t has eigenstates
|+, t> = cos(t/2)|0> + sin(t/2)|1> and |-, t> = -sin(t/2)|0> + cos(t/2)|1>,
collected in the basis-change matrix U(t) with U[m, s] the coefficient of
|s> in eigenstate m.  The two-particle singlet state is
psi = (|01> - |10>)/sqrt(2).  The outcome amplitude is

    A[m, n] = sum_{s,t} U(a)[m, s] U(b)[n, t] psi[s, t]

and p_mn = |A[m, n]|^2.  Expanding the sum gives
A[m, n] = (U(a)[m, 0] U(b)[n, 1] - U(a)[m, 1] U(b)[n, 0]) / sqrt(2), hence
p_++ = p_-- = sin^2((a - b)/2) / 2 and p_+- = p_-+ = cos^2((a - b)/2) / 2,
so the correlation is p_++ + p_-- - p_+- - p_-+ = -cos(a - b).  That
closed form is used only as a cross-check; all returned numbers come from
the amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStep, SideMismatch
from .models import Setting, standard_settings

MAX_GRID_STEP = math.pi / 4


@dataclass(frozen=True)
class SingletPrediction:
    """Outcome probabilities and correlation for one setting pair.

    ``probabilities`` is (p_++, p_+-, p_-+, p_--); ``relative_angle`` is
    the analyzer angle difference reduced to [0, pi].
    """

    pair: tuple[Setting, Setting]
    relative_angle: float
    probabilities: tuple[float, float, float, float]
    correlation: float


def _basis_change(theta: float) -> np.ndarray:
    h = theta / 2.0
    return np.array([[math.cos(h), math.sin(h)],
                     [-math.sin(h), math.cos(h)]])


_SINGLET = np.array([[0.0, 1.0], [-1.0, 0.0]]) / math.sqrt(2.0)


def _reduced_relative_angle(a: float, b: float) -> float:
    theta = math.fmod(abs(a - b), 2.0 * math.pi)
    return 2.0 * math.pi - theta if theta > math.pi else theta


def singlet_probabilities(a: Setting, b: Setting) -> SingletPrediction:
    """Outcome probabilities for measuring the singlet at settings (a, b)."""
    if not a.is_side_a:
        raise SideMismatch(f"first setting must be on side A, got {a.name!r}")
    if b.is_side_a:
        raise SideMismatch(f"second setting must be on side B, got {b.name!r}")
    amplitudes = _basis_change(a.angle) @ _SINGLET @ _basis_change(b.angle).T
    p = amplitudes * amplitudes
    probabilities = (float(p[0, 0]), float(p[0, 1]), float(p[1, 0]), float(p[1, 1]))
    correlation = p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0]
    return SingletPrediction(
        pair=(a, b),
        relative_angle=_reduced_relative_angle(a.angle, b.angle),
        probabilities=probabilities,
        correlation=float(correlation),
    )


def singlet_correlation(a: Setting, b: Setting) -> float:
    return singlet_probabilities(a, b).correlation


def singlet_chsh(a: Setting, a_prime: Setting, b: Setting, b_prime: Setting) -> float:
    """S = E(a,b) + E(a,b') + E(a',b) - E(a',b') for the singlet."""
    for s in (a, a_prime):
        if not s.is_side_a:
            raise SideMismatch(f"{s.name!r} must be on side A")
    for s in (b, b_prime):
        if s.is_side_a:
            raise SideMismatch(f"{s.name!r} must be on side B")
    return (singlet_correlation(a, b)
            + singlet_correlation(a, b_prime)
            + singlet_correlation(a_prime, b)
            - singlet_correlation(a_prime, b_prime))


def _chsh_at(angles: tuple[float, float, float, float]) -> float:
    return singlet_chsh(*standard_settings(*angles))


def max_violation_search(grid_step: float, refine_rounds: int
                         ) -> tuple[tuple[float, float, float, float], float]:
    """Locate a maximal |S| configuration by grid search plus refinement.

    The correlation depends only on relative angles, so the first analyzer
    is fixed at 0 and the remaining three are scanned over [0, 2*pi) at
    ``grid_step``.  Each refinement round halves the step and rescans a
    one-old-step box around the incumbent, which is kept as a candidate,
    so the reported |S| never decreases.  Ties go to the lexicographically
    smallest angle tuple.  Returns (angles, |S|).
    """
    if not (0.0 < grid_step <= MAX_GRID_STEP):
        raise InvalidStep(grid_step)
    if refine_rounds < 0:
        raise InvalidStep(refine_rounds)

    two_pi = 2.0 * math.pi
    n = int(math.ceil(two_pi / grid_step - 1e-12))
    axis = [k * grid_step for k in range(n)]

    best_angles = (0.0, 0.0, 0.0, 0.0)
    best = abs(_chsh_at(best_angles))
    for a2 in axis:
        for b in axis:
            for b2 in axis:
                s = abs(_chsh_at((0.0, a2, b, b2)))
                if s > best:
                    best = s
                    best_angles = (0.0, a2, b, b2)

    step = grid_step
    for _ in range(refine_rounds):
        half = step / 2.0
        offsets = [j * half for j in (-2, -1, 0, 1, 2)]
        base = best_angles
        for da2 in offsets:
            for db in offsets:
                for db2 in offsets:
                    cand = (0.0, base[1] + da2, base[2] + db, base[3] + db2)
                    s = abs(_chsh_at(cand))
                    if s > best:
                        best = s
                        best_angles = cand
        step = half
    return best_angles, best
