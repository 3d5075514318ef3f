"""Shared builders for randomized models and distributions."""

from __future__ import annotations

import numpy as np

from bellsim.models import (
    SETTING_NAMES,
    ApparatusDeterministic,
    Contextual,
    DeterministicSource,
    StochasticSource,
    standard_settings,
)
from bellsim.spaces import (
    SIDE_A_NAMES,
    SIDE_B_NAMES,
    Distribution,
    FiveSpaces,
    HiddenSpace,
)

FOUR_SETTINGS = standard_settings(0.0, np.pi / 2, np.pi / 4, -np.pi / 4)


def random_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n)) if n > 1 else np.ones(1)


def random_distribution(rng, domain) -> Distribution:
    domain = tuple(domain)
    n = int(np.prod([s.cardinality for s in domain]))
    return Distribution(domain, random_weights(rng, n))


def random_signs(rng, shape) -> np.ndarray:
    return rng.choice([-1.0, 1.0], size=shape)


def random_deterministic(rng, lam_card: int) -> DeterministicSource:
    lam = HiddenSpace.of_size("lambda", lam_card)
    tables = {name: random_signs(rng, lam_card) for name in SETTING_NAMES}
    return DeterministicSource(lam, tables)


def random_stochastic(rng, lam_card: int) -> StochasticSource:
    lam = HiddenSpace.of_size("lambda", lam_card)
    tables = {name: rng.random(lam_card) for name in SETTING_NAMES}
    return StochasticSource(lam, tables)


def random_contextual(rng, lam_card: int) -> Contextual:
    lam = HiddenSpace.of_size("lambda", lam_card)
    tables = {}
    for own in SETTING_NAMES:
        remotes = SIDE_B_NAMES if own in SIDE_A_NAMES else SIDE_A_NAMES
        for remote in remotes:
            tables[(own, remote)] = random_signs(rng, lam_card)
    return Contextual(lam, tables)


def five_spaces(cards: tuple[int, int, int, int, int]) -> FiveSpaces:
    labels = ("lambda", "lambda_a", "lambda_a_prime", "lambda_b", "lambda_b_prime")
    return FiveSpaces(*(HiddenSpace.of_size(lab, c) for lab, c in zip(labels, cards)))


def random_apparatus(rng, cards) -> ApparatusDeterministic:
    spaces = five_spaces(tuple(cards))
    tables = {
        name: random_signs(
            rng, (spaces.lam.cardinality, spaces.for_setting(name).cardinality))
        for name in SETTING_NAMES
    }
    return ApparatusDeterministic(spaces, tables)


def random_apparatus_dists(rng, spaces: FiveSpaces) -> dict[str, Distribution]:
    return {
        name: random_distribution(rng, (spaces.for_setting(name),))
        for name in SETTING_NAMES
    }


def uniform_marginal_family(e_by_pair):
    """Witness-shaped family

    Singleton source, binary apparatus spaces, and per-pair outcome tables
    ((1+E)/4, (1-E)/4, (1-E)/4, (1+E)/4), so every single-side marginal is
    uniform and the pair correlation is exactly E.  Returns the family and
    the passthrough response model that realizes those correlations.
    """
    from bellsim.models import ApparatusDeterministic
    from bellsim.spaces import SETTING_PAIRS, SettingPairMarginalFamily

    lam = HiddenSpace("lambda", ("0",))
    spaces = FiveSpaces.binary_apparatus(lam)
    tables = {name: np.array([[1.0, -1.0]]) for name in SETTING_NAMES}
    model = ApparatusDeterministic(spaces, tables)
    marginals = {}
    for p, q in SETTING_PAIRS:
        e = float(e_by_pair[(p, q)])
        probs = np.array([(1 + e) / 4, (1 - e) / 4, (1 - e) / 4, (1 + e) / 4])
        dom = (lam, spaces.for_setting(p), spaces.for_setting(q))
        marginals[(p, q)] = Distribution(dom, probs)
    return SettingPairMarginalFamily(spaces, marginals), model


def chsh_symmetrization_max(e_by_pair) -> float:
    """Max |S| over the eight one-sign-flip CHSH combinations."""
    e = np.array([e_by_pair[p] for p in
                  (("a", "b"), ("a", "b_prime"), ("a_prime", "b"),
                   ("a_prime", "b_prime"))])
    best = 0.0
    for flip in range(4):
        signs = np.ones(4)
        signs[flip] = -1.0
        best = max(best, abs(float(signs @ e)))
    return best
