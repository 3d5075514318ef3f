"""Joint-distribution existence for setting-pair marginal families.

A family of four distributions rho_pq(lambda, lambda_p, lambda_q) has
*local correlations* when a single joint distribution over the composite
variable (lambda, lambda_a, lambda_a', lambda_b, lambda_b') returns every
rho_pq as a marginal, and *nonlocal correlations* otherwise.  Existence
is decided exactly (up to the stated tolerances) as a linear feasibility
problem: one nonnegative weight per composite point, one equality per
marginal cell.  Total mass 1 is implied by any marginal's normalization,
and the redundancy among the four shared lambda-marginals is left to the
solver; inconsistent marginals simply come back Infeasible.

Feasible verdicts carry an explicit joint (renormalized, then checked
against the marginals); Infeasible verdicts carry the phase-1 Farkas
certificate, one coefficient per marginal constraint, reported raw.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .correlation import BELL_BOUND_TOL, SettingDependent
from .errors import NonViolatingAngles, WorkLimitExceeded
from .models import SETTING_NAMES, ApparatusDeterministic, Setting
from .qm import singlet_chsh, singlet_probabilities
from .simplex import FEASIBILITY_TOL, solve_equality_feasibility
from .spaces import (
    APPARATUS_LABELS,
    SETTING_PAIRS,
    Distribution,
    FiveSpaces,
    HiddenSpace,
    SettingPairMarginalFamily,
    marginalize,
    product_distribution,
    renormalize,
)

#: Marginal-reproduction tolerance for returned joints.
MARGINAL_TOL = 1e-9

#: Verification slack on the certificate's y^T A <= 0 side.
CERTIFICATE_SLACK = 1e-7

DEFAULT_WORK_LIMIT = 65536

_PAIR_AXES = {"a": 1, "a_prime": 2, "b": 3, "b_prime": 4}


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of the joint-existence decision.

    ``joint`` and ``residual`` are set when Feasible: the explicit joint
    over the five spaces and its worst marginal-cell error.  ``certificate``
    and ``violation`` are set when Infeasible: the separating functional
    (ordered like the constraint rows, see ``constraint_matrix``) and the
    amount y^T b by which the marginals break the certified bound.
    """

    status: Literal["Feasible", "Infeasible"]
    joint: Distribution | None = None
    residual: float | None = None
    certificate: np.ndarray | None = None
    violation: float | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "Feasible"


def constraint_matrix(family: SettingPairMarginalFamily
                      ) -> tuple[np.ndarray, np.ndarray]:
    """The equality system A x = b of the marginal problem.

    Variables are composite points in row-major order over the five
    spaces.  Rows are grouped by setting pair in canonical order; inside a
    group they run row-major over (lambda, lambda_p, lambda_q).
    """
    spaces = family.spaces
    shape = tuple(s.cardinality for s in spaces)
    n = int(np.prod(shape))
    grids = np.indices(shape).reshape(5, n)
    blocks = []
    rhs = []
    for p, q in SETTING_PAIRS:
        ax_p, ax_q = _PAIR_AXES[p], _PAIR_AXES[q]
        dims = (shape[0], shape[ax_p], shape[ax_q])
        rows = np.ravel_multi_index(
            (grids[0], grids[ax_p], grids[ax_q]), dims)
        block = np.zeros((int(np.prod(dims)), n))
        block[rows, np.arange(n)] = 1.0
        blocks.append(block)
        rhs.append(family.marginal(p, q).flat)
    return np.vstack(blocks), np.concatenate(rhs)


def check_joint_existence(family: SettingPairMarginalFamily,
                          work_limit: int = DEFAULT_WORK_LIMIT
                          ) -> FeasibilityVerdict:
    """Decide whether a joint over the composite variable returns every
    family marginal, and produce the witness either way."""
    family.validate()
    spaces = family.spaces
    n = int(np.prod([s.cardinality for s in spaces]))
    if n > work_limit:
        raise WorkLimitExceeded(n, work_limit)
    A, b = constraint_matrix(family)
    result = solve_equality_feasibility(A, b)
    if result.feasible:
        # tiny negatives were already clipped; rescaling to exact total
        # mass 1 is the one explicit renormalization in the pipeline
        joint = renormalize(Distribution(tuple(spaces), result.x))
        residual = float(np.max(np.abs(A @ joint.flat - b)))
        return FeasibilityVerdict(status="Feasible", joint=joint,
                                  residual=residual)
    y = result.certificate
    return FeasibilityVerdict(status="Infeasible", certificate=y,
                              violation=float(y @ b))


def verify_certificate(family: SettingPairMarginalFamily,
                       certificate: np.ndarray) -> tuple[float, float]:
    """Evaluate a separating functional against the family.

    Returns (max over variables of y^T A, y^T b).  A valid certificate has
    the first at most ~0 (no nonnegative x can beat it) and the second
    strictly positive, together proving A x = b, x >= 0 unsolvable.
    """
    A, b = constraint_matrix(family)
    y = np.asarray(certificate, dtype=np.float64)
    return float(np.max(y @ A)), float(y @ b)


def classify(family: SettingPairMarginalFamily,
             work_limit: int = DEFAULT_WORK_LIMIT) -> Literal["Local", "Nonlocal"]:
    """Local iff a joint distribution exists."""
    verdict = check_joint_existence(family, work_limit)
    return "Local" if verdict.feasible else "Nonlocal"


def construct_factorized_family(rho: Distribution,
                                apparatus: Mapping[str, Distribution]
                                ) -> SettingPairMarginalFamily:
    """Family whose every marginal is the three-factor product
    rho(lambda) rho_p(lambda_p) rho_q(lambda_q); always Local."""
    spaces = FiveSpaces(rho.domain[0],
                        *(apparatus[name].domain[0] for name in SETTING_NAMES))
    marginals = {}
    for p, q in SETTING_PAIRS:
        marginals[(p, q)] = product_distribution(
            [rho, apparatus[p], apparatus[q]])
    family = SettingPairMarginalFamily(spaces, marginals)
    family.validate()
    return family


def factorized_joint(rho: Distribution, apparatus: Mapping[str, Distribution]
                     ) -> Distribution:
    """The five-factor product joint witnessing construct_factorized_family."""
    return product_distribution([rho] + [apparatus[name] for name in SETTING_NAMES])


def construct_nonlocal_witness(angles: tuple[Setting, Setting, Setting, Setting]
                               ) -> tuple[SettingPairMarginalFamily,
                                          ApparatusDeterministic]:
    """A marginal family with no joint distribution, plus the response
    model that reads its correlations out.

    The source space is a singleton and each apparatus space is binary,
    carrying the local outcome; responses pass the apparatus value
    through; each rho_pq places the four (lambda_p, lambda_q) cells at the
    singlet outcome probabilities for that setting pair.  Requires angles
    where the singlet CHSH value exceeds the bound, otherwise the family
    would be Local and NonViolatingAngles is raised instead.
    """
    a, a_prime, b, b_prime = angles
    s = singlet_chsh(a, a_prime, b, b_prime)
    if abs(s) <= 2.0 + BELL_BOUND_TOL:
        raise NonViolatingAngles(s)
    lam = HiddenSpace("lambda", ("0",))
    spaces = FiveSpaces(lam, *(HiddenSpace.binary(APPARATUS_LABELS[name])
                               for name in SETTING_NAMES))
    tables = {name: np.array([[1.0, -1.0]]) for name in SETTING_NAMES}
    model = ApparatusDeterministic(spaces, tables)
    by_name = {s_.name: s_ for s_ in angles}
    marginals = {}
    for p, q in SETTING_PAIRS:
        probs = singlet_probabilities(by_name[p], by_name[q]).probabilities
        dom = (lam, spaces.for_setting(p), spaces.for_setting(q))
        marginals[(p, q)] = Distribution(dom, np.array(probs))
    family = SettingPairMarginalFamily(spaces, marginals)
    family.validate()
    return family, model


def family_distributions(family: SettingPairMarginalFamily) -> SettingDependent:
    """View a marginal family as engine inputs (one marginal per pair)."""
    return SettingDependent(dict(family.marginals))


def family_from_joint(joint: Distribution) -> SettingPairMarginalFamily:
    """The four setting-pair marginals of an explicit five-space joint."""
    spaces = FiveSpaces(*joint.domain)
    marginals = {}
    for p, q in SETTING_PAIRS:
        keep = (spaces.lam.label, spaces.for_setting(p).label,
                spaces.for_setting(q).label)
        marginals[(p, q)] = marginalize(joint, keep)
    family = SettingPairMarginalFamily(spaces, marginals)
    family.validate()
    return family
