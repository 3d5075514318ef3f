"""Report building: executes a scenario's analyses and renders documents.

Reports are JSON with a fixed key layout and no volatile fields (no
timestamps, hostnames, or backend tags), so a given scenario plus CLI
flags always produces byte-identical text.  Analyses always execute and
appear in the canonical order correlations, chsh, bell-check,
feasibility, emulation, whatever order the scenario requested them in.
"""

from __future__ import annotations

from typing import Any, Mapping

from .correlation import (BellVerdict, CorrelationReport, EstimatorInfo,
                          FactorizedApparatus, JointComposite,
                          SettingDependent, SourceOnly, bell_check,
                          enumerate_bound, exact_report, monte_carlo_report)
from .errors import (BellsimError, ParseError, ValidationError,
                     WorkLimitExceeded)
from .feasibility import (DEFAULT_WORK_LIMIT, check_joint_existence,
                          construct_factorized_family, family_from_joint,
                          verify_certificate)
from .models import (SETTING_NAMES, ApparatusDeterministic, Setting,
                     StochasticSource, effective_response_apparatus,
                     effective_response_stochastic)
from .qm import max_violation_search, singlet_chsh, singlet_probabilities
from .scenario import (ANALYSES, SCHEMA_VERSION, Scenario, module_for_error,
                       render_document)
from .spaces import (SETTING_PAIRS, Distribution, FiveSpaces,
                     SettingPairMarginalFamily)

_CELL_LABELS = ("++", "+-", "-+", "--")


def _estimator_doc(info: EstimatorInfo) -> dict[str, Any]:
    if info.method == "exact":
        return {"method": "exact"}
    return {"method": info.method, "samples": info.samples, "seed": info.seed}


def _probabilities_doc(probs) -> dict[str, float]:
    return {label: float(p) for label, p in zip(_CELL_LABELS, probs)}


def _pairs_doc(report: CorrelationReport) -> list[dict[str, Any]]:
    out = []
    for pc in report.pairs:
        entry: dict[str, Any] = {
            "pair": list(pc.pair),
            "probabilities": _probabilities_doc(pc.probabilities),
            "correlation": pc.correlation,
        }
        if pc.standard_error is not None:
            entry["standard_error"] = pc.standard_error
        out.append(entry)
    return out


def _bell_doc(verdict: BellVerdict) -> dict[str, Any]:
    return {"s": verdict.s, "verdict": verdict.label, "excess": verdict.excess}


def _dist_doc(dist: Distribution) -> dict[str, Any]:
    return {"domain": list(dist.labels),
            "weights": [float(w) for w in dist.flat]}


def _family_from_mode(dists) -> SettingPairMarginalFamily:
    """The setting-pair marginal family a distribution mode induces."""
    if isinstance(dists, FactorizedApparatus):
        return construct_factorized_family(dists.rho, dists.apparatus)
    if isinstance(dists, JointComposite):
        return family_from_joint(dists.joint)
    if isinstance(dists, SettingDependent):
        m = dists.marginals
        spaces = FiveSpaces(m[("a", "b")].domain[0],
                            m[("a", "b")].domain[1],
                            m[("a_prime", "b")].domain[1],
                            m[("a", "b")].domain[2],
                            m[("a", "b_prime")].domain[2])
        return SettingPairMarginalFamily(spaces, m)
    raise ValidationError("cli-harness",
                          f"no marginal family for mode {dists.mode}")


def _feasibility_doc(dists, work_limit: int) -> dict[str, Any]:
    family = _family_from_mode(dists)
    verdict = check_joint_existence(family, work_limit)
    if verdict.feasible:
        return {"status": verdict.status,
                "classification": "Local",
                "residual": verdict.residual,
                "joint": _dist_doc(verdict.joint)}
    max_yta, ytb = verify_certificate(family, verdict.certificate)
    return {"status": verdict.status,
            "classification": "Nonlocal",
            "violation": verdict.violation,
            "certificate": [float(y) for y in verdict.certificate],
            "certificate_check": {"max_y_transpose_A": max_yta,
                                  "y_transpose_b": ytb}}


def _emulation_doc(scenario: Scenario, primary: CorrelationReport,
                   comparison_report: CorrelationReport) -> dict[str, Any]:
    model = scenario.model
    comparison = scenario.comparison_model
    dists = scenario.distributions
    gap = 0.0
    for setting in scenario.settings:
        apparatus = dists.apparatus[setting.name]
        for i in range(model.spaces.lam.cardinality):
            averaged = effective_response_apparatus(model, setting, i, apparatus)
            collapsed = effective_response_stochastic(comparison, setting, i)
            gap = max(gap, abs(averaged - collapsed))
    pairs = []
    for pc, cc in zip(primary.pairs, comparison_report.pairs):
        pairs.append({"pair": list(pc.pair),
                      "correlation": pc.correlation,
                      "comparison_correlation": cc.correlation,
                      "gap": abs(pc.correlation - cc.correlation)})
    return {"comparison_kind": comparison.kind,
            "max_effective_response_gap": gap,
            "pairs": pairs,
            "s": primary.s,
            "comparison_s": comparison_report.s}


def _correlation_report(model, dists, settings, estimator: EstimatorInfo,
                        seed_override: int | None) -> CorrelationReport:
    if estimator.method == "exact":
        return exact_report(model, dists, settings)
    seed = estimator.seed if seed_override is None else seed_override
    return monte_carlo_report(model, dists, settings, estimator.samples, seed)


def run_scenario(scenario: Scenario, seed_override: int | None = None,
                 work_limit: int = DEFAULT_WORK_LIMIT) -> dict[str, Any]:
    """Execute the scenario's analyses and assemble the report document.

    ``seed_override`` replaces the scenario's monte-carlo seed (ignored for
    the exact estimator); ``work_limit`` caps the feasibility LP size.
    Verdicts are report content, never errors; errors mean the scenario
    could not be executed at all.
    """
    requested = tuple(a for a in ANALYSES if a in scenario.run.analyses)
    doc: dict[str, Any] = {
        "report_version": SCHEMA_VERSION,
        "scenario_digest": scenario.digest or None,
        "description": scenario.description,
        "settings": {s.name: s.angle for s in scenario.settings},
        "model_kind": scenario.model.kind,
        "distribution_mode": scenario.distributions.mode,
        "analyses": {},
    }
    try:
        primary = _correlation_report(scenario.model, scenario.distributions,
                                      scenario.settings, scenario.run.estimator,
                                      seed_override)
        for name in requested:
            if name == "correlations":
                doc["analyses"][name] = {
                    "estimator": _estimator_doc(primary.estimator),
                    "pairs": _pairs_doc(primary),
                }
            elif name == "chsh":
                doc["analyses"][name] = {
                    "s": primary.s,
                    "terms": [{"pair": list(pc.pair), "sign": sign,
                               "correlation": pc.correlation}
                              for pc, sign in zip(primary.pairs,
                                                  (1.0, 1.0, 1.0, -1.0))],
                }
            elif name == "bell-check":
                doc["analyses"][name] = _bell_doc(primary.bound)
            elif name == "feasibility":
                doc["analyses"][name] = _feasibility_doc(scenario.distributions,
                                                         work_limit)
            else:
                comparison_report = _correlation_report(
                    scenario.comparison_model, SourceOnly(scenario.distributions.rho),
                    scenario.settings, scenario.run.estimator, seed_override)
                doc["analyses"][name] = _emulation_doc(scenario, primary,
                                                       comparison_report)
    except (ParseError, ValidationError, WorkLimitExceeded):
        raise
    except BellsimError as exc:
        raise ValidationError(module_for_error(exc),
                              f"{type(exc).__name__}: {exc}") from exc
    return doc


# ---------------------------------------------------------------------------
# Documents for the non-scenario subcommands
# ---------------------------------------------------------------------------


def enumerate_bound_doc(lambda_cardinality: int,
                        work_limit: int | None = None) -> dict[str, Any]:
    kwargs = {} if work_limit is None else {"work_limit": work_limit}
    result = enumerate_bound(lambda_cardinality, **kwargs)
    return {
        "report_version": SCHEMA_VERSION,
        "command": "enumerate-bound",
        "lambda_cardinality": result.lambda_cardinality,
        "strategies": result.strategies,
        "max_abs_s": result.max_abs_s,
        "reduction_note": result.reduction_note,
    }


def _qm_pair_doc(a: Setting, b: Setting) -> dict[str, Any]:
    pred = singlet_probabilities(a, b)
    return {"pair": [a.name, b.name],
            "relative_angle": pred.relative_angle,
            "probabilities": _probabilities_doc(pred.probabilities),
            "correlation": pred.correlation}


def qm_table_doc(angle_a: float, angle_b: float) -> dict[str, Any]:
    a = Setting("A", "a", angle_a)
    b = Setting("B", "b", angle_b)
    doc = {"report_version": SCHEMA_VERSION, "command": "qm-table",
           "angles": {"a": angle_a, "b": angle_b}}
    doc.update(_qm_pair_doc(a, b))
    del doc["pair"]
    return doc


def qm_chsh_doc(angles: tuple[float, float, float, float]) -> dict[str, Any]:
    names = dict(zip(SETTING_NAMES, angles))
    a = Setting("A", "a", names["a"])
    a_prime = Setting("A", "a_prime", names["a_prime"])
    b = Setting("B", "b", names["b"])
    b_prime = Setting("B", "b_prime", names["b_prime"])
    by_name = {s.name: s for s in (a, a_prime, b, b_prime)}
    s = singlet_chsh(a, a_prime, b, b_prime)
    return {
        "report_version": SCHEMA_VERSION,
        "command": "qm-chsh",
        "angles": {name: float(x) for name, x in names.items()},
        "pairs": [_qm_pair_doc(by_name[p], by_name[q]) for p, q in SETTING_PAIRS],
        "s": s,
        "bell_check": _bell_doc(bell_check(s)),
    }


def qm_search_doc(grid_step: float, refine_rounds: int) -> dict[str, Any]:
    angles, best = max_violation_search(grid_step, refine_rounds)
    return {
        "report_version": SCHEMA_VERSION,
        "command": "qm-search",
        "grid_step": grid_step,
        "refine_rounds": refine_rounds,
        "angles": {name: angle for name, angle in zip(SETTING_NAMES, angles)},
        "abs_s": best,
    }


def render_report(doc: Mapping[str, Any]) -> str:
    return render_document(doc)
