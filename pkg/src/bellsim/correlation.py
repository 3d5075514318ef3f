"""Correlation functions, the CHSH combination, and both evaluation paths.

Every (model, distribution-mode, setting-pair) combination reduces to an
outcome decomposition: a flat list of cells, each carrying a nonnegative
weight and a joint-outcome code in {0,1,2,3} for (++, +-, -+, --).  Exact
probabilities are the per-code weight sums; Monte Carlo estimation draws
cells by inverse-CDF lookup on the same weights.  The cell order is the
row-major order of the underlying grid, which makes reports reproducible
bit for bit.

Supported combinations:

  SourceOnly           DeterministicSource, StochasticSource, Contextual
  SettingDependent     the source kinds (marginals over lambda) and
                       ApparatusDeterministic (marginals over
                       (lambda, lambda_p, lambda_q))
  FactorizedApparatus  ApparatusDeterministic
  JointComposite       ApparatusDeterministic

Randomness contract: Monte Carlo uses numpy's PCG64.  The generator for
setting pair k (in canonical pair order) is seeded with
SeedSequence(entropy=seed, spawn_key=(k,)), so per-pair streams are
independent of each other and of any future sharding, and identical
inputs give bit-identical reports on every platform and backend.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ._kernels import (
    chsh_strategy_max,
    mc_outcome_counts,
    outcome_cell_sums,
    response_product_sum,
)
from .errors import (
    DomainMismatch,
    IncompatibleModeModel,
    NotAProbabilityVector,
    OutOfRangeCorrelation,
    SideMismatch,
    WorkLimitExceeded,
    ZeroSamples,
)
from .models import (
    COMPOSITE_AXIS,
    ApparatusDeterministic,
    Contextual,
    DeterministicSource,
    ResponseModel,
    Setting,
    StochasticSource,
)
from .spaces import (
    SETTING_PAIRS,
    Distribution,
    FiveSpaces,
    pair_key,
    validate_distribution,
)

#: |S| may exceed 2 by at most this before counting as a violation.
BELL_BOUND_TOL = 1e-9

#: Slack for probability-vector and correlation range checks.
PROB_TOL = 1e-9
CORRELATION_RANGE_TOL = 1e-12

#: Exhaustive enumeration refuses above this many strategy combinations
#: (2^(4n) at source cardinality n, so n <= 6 by default).
DEFAULT_ENUM_WORK_LIMIT = 2**24


# ---------------------------------------------------------------------------
# Scenario distribution modes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SourceOnly:
    """A single setting-independent source distribution over lambda."""

    rho: Distribution

    mode = "SourceOnly"

    def __post_init__(self) -> None:
        validate_distribution(self.rho)


@dataclass(frozen=True)
class SettingDependent:
    """One distribution per setting pair.

    For source-only model kinds the marginals live on (lambda,); for the
    apparatus kind they live on (lambda, lambda_p, lambda_q).  This is the
    escape hatch that a setting-independent source distribution closes:
    nothing here forces the four marginals to be consistent.
    """

    marginals: Mapping[tuple[str, str], Distribution]

    mode = "SettingDependent"

    def __post_init__(self) -> None:
        marginals = {pair_key(*k): v for k, v in self.marginals.items()}
        if set(marginals) != set(SETTING_PAIRS):
            raise DomainMismatch(
                f"need one marginal per setting pair {SETTING_PAIRS}, "
                f"got {sorted(marginals)}")
        for dist in marginals.values():
            validate_distribution(dist)
        object.__setattr__(self, "marginals", marginals)


@dataclass(frozen=True)
class FactorizedApparatus:
    """Source distribution plus one independent apparatus distribution per
    setting: the factorized case."""

    rho: Distribution
    apparatus: Mapping[str, Distribution]

    mode = "FactorizedApparatus"

    def __post_init__(self) -> None:
        validate_distribution(self.rho)
        apparatus = dict(self.apparatus)
        for name in ("a", "a_prime", "b", "b_prime"):
            if name not in apparatus:
                raise DomainMismatch(f"missing apparatus distribution for {name!r}")
            validate_distribution(apparatus[name])
        object.__setattr__(self, "apparatus", apparatus)


@dataclass(frozen=True)
class JointComposite:
    """One joint distribution over all five spaces (the composite variable)."""

    joint: Distribution

    mode = "JointComposite"

    def __post_init__(self) -> None:
        validate_distribution(self.joint)
        if len(self.joint.domain) != 5:
            raise DomainMismatch(
                f"composite joint needs a five-space domain, got {self.joint.labels}")


ScenarioDistributions = SourceOnly | SettingDependent | FactorizedApparatus | JointComposite


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BellVerdict:
    """Outcome of the bound check on a CHSH value."""

    s: float
    satisfied: bool
    excess: float

    @property
    def label(self) -> str:
        return "Satisfied" if self.satisfied else "Violated"


@dataclass(frozen=True)
class PairCorrelation:
    """Probabilities and correlation for one setting pair."""

    pair: tuple[str, str]
    probabilities: tuple[float, float, float, float]
    correlation: float
    standard_error: float | None = None


@dataclass(frozen=True)
class EstimatorInfo:
    method: str
    samples: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class CorrelationReport:
    """Per-pair outcome probabilities, correlations, S, and the verdict."""

    pairs: tuple[PairCorrelation, ...]
    s: float
    bound: BellVerdict
    estimator: EstimatorInfo

    def pair(self, p: str, q: str) -> PairCorrelation:
        key = pair_key(p, q)
        for pc in self.pairs:
            if pc.pair == key:
                return pc
        raise DomainMismatch(f"no pair ({p!r}, {q!r}) in report")


@dataclass(frozen=True)
class BoundEnumeration:
    """Result of the exhaustive deterministic-strategy search."""

    lambda_cardinality: int
    strategies: int
    max_abs_s: float
    reduction_note: str


# ---------------------------------------------------------------------------
# Elementary operations
# ---------------------------------------------------------------------------


def correlation_from_probabilities(p_pp: float, p_pm: float, p_mp: float,
                                   p_mm: float) -> float:
    """E = p_++ + p_-- - p_+- - p_-+ for one setting pair."""
    probs = (p_pp, p_pm, p_mp, p_mm)
    for value in probs:
        if value < -PROB_TOL:
            raise NotAProbabilityVector(f"negative probability {value!r}")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_TOL:
        raise NotAProbabilityVector(f"probabilities sum to {total!r}, expected 1")
    return p_pp + p_mm - p_pm - p_mp


def chsh(e_ab: float, e_ab_prime: float, e_a_prime_b: float,
         e_a_prime_b_prime: float) -> float:
    """S = E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    for value in (e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime):
        if abs(value) > 1.0 + CORRELATION_RANGE_TOL:
            raise OutOfRangeCorrelation(value)
    return e_ab + e_ab_prime + e_a_prime_b - e_a_prime_b_prime


def bell_check(s: float) -> BellVerdict:
    """Satisfied iff |s| <= 2 + 1e-9; excess is the overshoot when violated."""
    excess = abs(s) - 2.0
    if excess <= BELL_BOUND_TOL:
        return BellVerdict(s=s, satisfied=True, excess=0.0)
    return BellVerdict(s=s, satisfied=False, excess=excess)


# ---------------------------------------------------------------------------
# Outcome decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomeDecomposition:
    """Flat cells with probability weights and joint-outcome codes."""

    weights: np.ndarray
    codes: np.ndarray


def _codes_from_signs(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    return ((f < 0.0).astype(np.uint8) << 1 | (g < 0.0).astype(np.uint8)).reshape(-1)


def _check_pair(pair: tuple[Setting, Setting]) -> tuple[Setting, Setting]:
    p, q = pair
    if not p.is_side_a:
        raise SideMismatch(f"first setting of a pair must be side A, got {p.name!r}")
    if q.is_side_a:
        raise SideMismatch(f"second setting of a pair must be side B, got {q.name!r}")
    return p, q


def _source_weights(model, dists, pair_names) -> np.ndarray:
    """The lambda distribution driving a source-only model."""
    if isinstance(dists, SourceOnly):
        rho = dists.rho
    elif isinstance(dists, SettingDependent):
        rho = dists.marginals[pair_names]
    else:
        raise IncompatibleModeModel(dists.mode, model.kind)
    if rho.domain != (model.lam,):
        raise DomainMismatch(
            f"distribution domain {rho.labels} does not match the model's "
            f"source space {model.lam.label!r}")
    return rho.flat


def _apparatus_triple(model: ApparatusDeterministic, dists,
                      p: Setting, q: Setting) -> np.ndarray:
    """Grid weights over (lambda, lambda_p, lambda_q) for an apparatus model."""
    spaces = model.spaces
    expected = (spaces.lam, spaces.for_setting(p.name), spaces.for_setting(q.name))
    if isinstance(dists, FactorizedApparatus):
        if dists.rho.domain != (spaces.lam,):
            raise DomainMismatch(
                f"source distribution domain {dists.rho.labels} does not match "
                f"{spaces.lam.label!r}")
        for name in (p.name, q.name):
            if dists.apparatus[name].domain != (spaces.for_setting(name),):
                raise DomainMismatch(
                    f"apparatus distribution for {name!r} does not live on "
                    f"{spaces.for_setting(name).label!r}")
        w = dists.rho.flat[:, None, None] * dists.apparatus[p.name].flat[None, :, None]
        return w * dists.apparatus[q.name].flat[None, None, :]
    if isinstance(dists, SettingDependent):
        marginal = dists.marginals[(p.name, q.name)]
        if marginal.domain != expected:
            raise DomainMismatch(
                f"marginal for ({p.name!r}, {q.name!r}) has domain "
                f"{marginal.labels}, expected {tuple(s.label for s in expected)}")
        return marginal.weights
    raise IncompatibleModeModel(dists.mode, model.kind)


def outcome_decomposition(model: ResponseModel, dists: ScenarioDistributions,
                          pair: tuple[Setting, Setting]) -> OutcomeDecomposition:
    """Reduce (model, distributions, pair) to weighted outcome cells."""
    p, q = _check_pair(pair)
    pair_names = (p.name, q.name)

    if isinstance(model, DeterministicSource):
        w = _source_weights(model, dists, pair_names)
        f = model.tables[p.name]
        g = model.tables[q.name]
        return OutcomeDecomposition(w, _codes_from_signs(f, g))

    if isinstance(model, Contextual):
        w = _source_weights(model, dists, pair_names)
        f = model.response_vector(p, q)
        g = model.response_vector(q, p)
        return OutcomeDecomposition(w, _codes_from_signs(f, g))

    if isinstance(model, StochasticSource):
        rho = _source_weights(model, dists, pair_names)
        pf = model.tables[p.name]
        pg = model.tables[q.name]
        cells = np.stack([pf * pg, pf * (1.0 - pg), (1.0 - pf) * pg,
                          (1.0 - pf) * (1.0 - pg)], axis=1)
        weights = (rho[:, None] * cells).reshape(-1)
        codes = np.tile(np.arange(4, dtype=np.uint8), rho.shape[0])
        return OutcomeDecomposition(weights, codes)

    if isinstance(model, ApparatusDeterministic):
        if isinstance(dists, JointComposite):
            return _composite_decomposition(model, dists, p, q)
        w = _apparatus_triple(model, dists, p, q)
        f = model.tables[p.name][:, :, None]
        g = model.tables[q.name][:, None, :]
        f_grid, g_grid = np.broadcast_arrays(f, g)
        return OutcomeDecomposition(np.ascontiguousarray(w).reshape(-1),
                                    _codes_from_signs(f_grid, g_grid))

    raise IncompatibleModeModel(dists.mode, getattr(model, "kind", type(model).__name__))


def _composite_decomposition(model: ApparatusDeterministic, dists: JointComposite,
                             p: Setting, q: Setting) -> OutcomeDecomposition:
    spaces = model.spaces
    if dists.joint.domain != tuple(spaces):
        raise DomainMismatch(
            f"composite joint domain {dists.joint.labels} does not match the "
            f"model's five spaces {tuple(s.label for s in spaces)}")
    shape = dists.joint.shape
    f_grid = np.broadcast_to(_embed_axis(model.tables[p.name], p.name), shape)
    g_grid = np.broadcast_to(_embed_axis(model.tables[q.name], q.name), shape)
    return OutcomeDecomposition(dists.joint.flat, _codes_from_signs(f_grid, g_grid))


def _embed_axis(table: np.ndarray, name: str) -> np.ndarray:
    """View a (lambda, lambda_setting) table inside the five-axis grid."""
    index: list = [None] * 5
    index[0] = slice(None)
    index[COMPOSITE_AXIS[name]] = slice(None)
    return table[tuple(index)]


# ---------------------------------------------------------------------------
# Exact evaluation
# ---------------------------------------------------------------------------


def _effective_vectors(model, dists, p: Setting, q: Setting):
    """Response vectors and weights for the direct summation formulas."""
    pair_names = (p.name, q.name)
    if isinstance(model, DeterministicSource):
        w = _source_weights(model, dists, pair_names)
        return model.tables[p.name], model.tables[q.name], w
    if isinstance(model, Contextual):
        w = _source_weights(model, dists, pair_names)
        return model.response_vector(p, q), model.response_vector(q, p), w
    if isinstance(model, StochasticSource):
        w = _source_weights(model, dists, pair_names)
        f_bar = 2.0 * model.tables[p.name] - 1.0
        g_bar = 2.0 * model.tables[q.name] - 1.0
        return f_bar, g_bar, w
    if isinstance(model, ApparatusDeterministic):
        if isinstance(dists, FactorizedApparatus):
            f_bar = _averaged_response(model, p.name, dists.apparatus[p.name])
            g_bar = _averaged_response(model, q.name, dists.apparatus[q.name])
            if dists.rho.domain != (model.spaces.lam,):
                raise DomainMismatch(
                    f"source distribution domain {dists.rho.labels} does not "
                    f"match {model.spaces.lam.label!r}")
            return f_bar, g_bar, dists.rho.flat
        if isinstance(dists, (JointComposite, SettingDependent)):
            dec = outcome_decomposition(model, dists, (p, q))
            signs = np.array([1.0, -1.0, -1.0, 1.0])
            return signs[dec.codes], np.ones_like(dec.weights), dec.weights
        raise IncompatibleModeModel(dists.mode, model.kind)
    raise IncompatibleModeModel(dists.mode, getattr(model, "kind", type(model).__name__))


def _averaged_response(model: ApparatusDeterministic, name: str,
                       apparatus_dist: Distribution) -> np.ndarray:
    """Per-lambda apparatus average: one row dot per source point."""
    expected = model.spaces.for_setting(name)
    if apparatus_dist.domain != (expected,):
        raise DomainMismatch(
            f"apparatus distribution for {name!r} does not live on {expected.label!r}")
    table = model.tables[name]
    ones = np.ones(table.shape[1])
    out = np.empty(table.shape[0])
    for i in range(table.shape[0]):
        out[i] = response_product_sum(np.ascontiguousarray(table[i]), ones,
                                      apparatus_dist.flat)
    return out


def exact_correlation(model: ResponseModel, dists: ScenarioDistributions,
                      pair: tuple[Setting, Setting]) -> float:
    """E(p, q) by exact summation over the hidden-variable grid."""
    p, q = _check_pair(pair)
    f, g, w = _effective_vectors(model, dists, p, q)
    value = response_product_sum(np.ascontiguousarray(f, dtype=np.float64),
                                 np.ascontiguousarray(g, dtype=np.float64),
                                 np.ascontiguousarray(w, dtype=np.float64))
    if abs(value) > 1.0 + CORRELATION_RANGE_TOL:
        raise OutOfRangeCorrelation(value)
    return value


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _ordered_pairs(settings) -> tuple[tuple[Setting, Setting], ...]:
    a, a_prime, b, b_prime = settings
    by_name = {}
    for s in (a, a_prime, b, b_prime):
        by_name[s.name] = s
    if set(by_name) != {"a", "a_prime", "b", "b_prime"}:
        raise SideMismatch(
            f"need the four canonical settings, got {sorted(by_name)}")
    return tuple((by_name[p], by_name[q]) for p, q in SETTING_PAIRS)


def _report_from_pair_probs(per_pair, estimator: EstimatorInfo) -> CorrelationReport:
    pairs = []
    correlations = []
    for (p, q), probs, se in per_pair:
        e = correlation_from_probabilities(*probs)
        pairs.append(PairCorrelation(pair=(p.name, q.name), probabilities=probs,
                                     correlation=e, standard_error=se))
        correlations.append(e)
    s = chsh(*correlations)
    return CorrelationReport(pairs=tuple(pairs), s=s, bound=bell_check(s),
                             estimator=estimator)


def exact_report(model: ResponseModel, dists: ScenarioDistributions,
                 settings) -> CorrelationReport:
    """Exact probabilities and correlations for all four setting pairs."""
    per_pair = []
    for p, q in _ordered_pairs(settings):
        dec = outcome_decomposition(model, dists, (p, q))
        sums = outcome_cell_sums(np.ascontiguousarray(dec.weights),
                                 np.ascontiguousarray(dec.codes))
        probs = (float(sums[0]), float(sums[1]), float(sums[2]), float(sums[3]))
        per_pair.append(((p, q), probs, None))
    return _report_from_pair_probs(per_pair, EstimatorInfo(method="exact"))


def monte_carlo_report(model: ResponseModel, dists: ScenarioDistributions,
                       settings, samples: int, seed: int) -> CorrelationReport:
    """Estimate the report by sampling outcome cells.

    Per pair k the stream is PCG64 seeded with SeedSequence(seed,
    spawn_key=(k,)); the per-pair standard error is the plug-in binomial
    formula sqrt((1 - E^2)/samples).
    """
    if samples < 1:
        raise ZeroSamples()
    per_pair = []
    for k, (p, q) in enumerate(_ordered_pairs(settings)):
        dec = outcome_decomposition(model, dists, (p, q))
        cum = np.cumsum(dec.weights)
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=seed, spawn_key=(k,))))
        uniforms = rng.random(samples)
        counts = mc_outcome_counts(np.ascontiguousarray(cum),
                                   np.ascontiguousarray(dec.codes), uniforms)
        probs = tuple(float(c) / samples for c in counts)
        e_hat = probs[0] + probs[3] - probs[1] - probs[2]
        se = math.sqrt(max(0.0, 1.0 - e_hat * e_hat) / samples)
        per_pair.append(((p, q), probs, se))
    return _report_from_pair_probs(
        per_pair, EstimatorInfo(method="monte-carlo", samples=samples, seed=seed))


# ---------------------------------------------------------------------------
# Exhaustive bound enumeration
# ---------------------------------------------------------------------------

_REDUCTION_NOTE = (
    "S is affine in the source distribution, so its maximum over the "
    "probability simplex is attained at a vertex; enumerating point-mass "
    "distributions is therefore exhaustive over all distributions."
)


def enumerate_bound(lambda_cardinality: int,
                    work_limit: int = DEFAULT_ENUM_WORK_LIMIT) -> BoundEnumeration:
    """Maximum |S| over every deterministic source-only strategy.

    Enumerates all 2^(4n) response-table assignments (two settings per
    side) on an n-point source space together with every point-mass
    source distribution.
    """
    if lambda_cardinality < 1:
        raise DomainMismatch("source cardinality must be at least 1")
    strategies = 2 ** (4 * lambda_cardinality)
    if strategies > work_limit:
        raise WorkLimitExceeded(strategies, work_limit)
    max_abs_s = float(chsh_strategy_max(lambda_cardinality))
    return BoundEnumeration(
        lambda_cardinality=lambda_cardinality,
        strategies=strategies,
        max_abs_s=max_abs_s,
        reduction_note=_REDUCTION_NOTE,
    )
