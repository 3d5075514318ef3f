"""Scenario files: the version-1 schema, parsing, and template generation.

A scenario is a JSON document describing one complete experiment:

    {
      "schema_version": 1,
      "description": "free text, optional",
      "spaces": [{"label": "lambda", "values": ["0", "1"]}, ...],
      "settings": {"a": 0.0, "a_prime": 1.5708, "b": 0.7854, "b_prime": -0.7854},
      "model": {...},
      "distributions": {...},
      "comparison_model": {...},        # optional, for the emulation analysis
      "run": {
        "estimator": {"method": "exact"}
                   | {"method": "monte-carlo", "samples": 1000000, "seed": 7},
        "analyses": ["correlations", "chsh", "bell-check", "feasibility"]
      }
    }

Spaces are declared once and referenced elsewhere by label.  Every weight
array is flat in row-major order over its domain.  Model payloads carry a
``kind`` tag:

    {"kind": "DeterministicSource", "space": "lambda",
     "tables": {"a": [1.0, -1.0], "a_prime": ..., "b": ..., "b_prime": ...}}

    {"kind": "StochasticSource", "space": "lambda",
     "tables": {"a": [0.3, 0.9], ...}}           # p(+1), in [0, 1]

    {"kind": "Contextual", "space": "lambda", "separated": false,
     "tables": {"a|b": [...], "a|b_prime": [...], ..., "b_prime|a_prime": [...]}}

    {"kind": "ApparatusDeterministic",
     "spaces": {"source": "lambda", "a": "lambda_a", "a_prime": ...,
                "b": ..., "b_prime": ...},
     "tables": {"a": [[1.0, -1.0], [-1.0, 1.0]], ...}}   # shape |lambda| x |lambda_a|

Distribution payloads carry a ``mode`` tag:

    {"mode": "SourceOnly", "rho": DIST}
    {"mode": "SettingDependent", "marginals": {"a|b": DIST, ...}}   # all four pairs
    {"mode": "FactorizedApparatus", "rho": DIST,
     "apparatus": {"a": DIST, "a_prime": DIST, "b": DIST, "b_prime": DIST}}
    {"mode": "JointComposite", "joint": DIST}

where DIST is {"domain": ["lambda", ...], "weights": [flat row-major floats]}.

Parsing is strict: structural problems raise ParseError naming the field,
while payloads that fail a module validation raise ValidationError naming
the module.  ``generate_scenario`` emits ready-to-run documents for the
four bundled templates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from hashlib import sha256
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .correlation import (EstimatorInfo, FactorizedApparatus, JointComposite,
                          ScenarioDistributions, SettingDependent, SourceOnly)
from .errors import (BellsimError, ParameterOutOfRange, ParseError,
                     UnknownTemplate, ValidationError, WorkLimitExceeded)
from .feasibility import construct_nonlocal_witness
from .models import (SETTING_NAMES, ApparatusDeterministic, Contextual,
                     DeterministicSource, ResponseModel, Setting,
                     StochasticSource, standard_settings,
                     stochastic_from_apparatus)
from .spaces import (SETTING_PAIRS, Distribution, FiveSpaces, HiddenSpace,
                     pair_key, validate_distribution)

SCHEMA_VERSION = 1

ANALYSES = ("correlations", "chsh", "bell-check", "feasibility", "emulation")

TEMPLATES = ("factorized", "joint-composite", "setting-dependent-witness",
             "stochastic-equivalent")

_MODEL_KINDS = ("DeterministicSource", "StochasticSource", "Contextual",
                "ApparatusDeterministic")
_MODE_TAGS = ("SourceOnly", "SettingDependent", "FactorizedApparatus",
              "JointComposite")

_SPACE_KEYS = ("source", "a", "a_prime", "b", "b_prime")

TSIRELSON_ANGLES = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)

# module attribution for errors raised while a payload is being built;
# used when no more specific parse-site context is available
_ERROR_MODULE = {
    "NegativeWeight": "hv-core",
    "NotNormalized": "hv-core",
    "ShapeMismatch": "hv-core",
    "OverlappingDomains": "hv-core",
    "InvalidPart": "hv-core",
    "EmptyKeepSet": "hv-core",
    "UnknownSpace": "hv-core",
    "InvalidFamily": "hv-core",
    "KindMismatch": "response-models",
    "MissingRemoteSetting": "response-models",
    "PointDimensionMismatch": "response-models",
    "DomainMismatch": "response-models",
    "SideMismatch": "response-models",
    "RemoteDependenceForbidden": "response-models",
    "NotAProbabilityVector": "correlation-engine",
    "IncompatibleModeModel": "correlation-engine",
    "OutOfRangeCorrelation": "correlation-engine",
    "ZeroSamples": "correlation-engine",
    "NonViolatingAngles": "qm-reference",
    "InvalidStep": "qm-reference",
}


def module_for_error(exc: BellsimError) -> str:
    return _ERROR_MODULE.get(type(exc).__name__, "cli-harness")


def _validated(module: str, fn, *args, **kwargs):
    """Run a module constructor, converting its errors to ValidationError."""
    try:
        return fn(*args, **kwargs)
    except (ParseError, ValidationError, WorkLimitExceeded):
        raise
    except BellsimError as exc:
        raise ValidationError(module, f"{type(exc).__name__}: {exc}") from exc


@dataclass(frozen=True)
class RunBlock:
    """Estimator choice plus the ordered list of requested analyses."""

    estimator: EstimatorInfo
    analyses: tuple[str, ...]


@dataclass(frozen=True)
class Scenario:
    """A fully validated in-memory scenario.

    ``digest`` is sha256 over the source bytes when loaded from disk and
    empty for documents parsed from memory; it is excluded from equality
    so that a generate/parse round trip compares structurally.
    """

    schema_version: int
    description: str
    settings: tuple[Setting, Setting, Setting, Setting]
    model: ResponseModel
    distributions: ScenarioDistributions
    run: RunBlock
    comparison_model: ResponseModel | None = None
    digest: str = field(default="", compare=False)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise ParseError(f"{where}: missing required field {key!r}")
    return doc[key]


def _mapping(value: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise ParseError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {type(value).__name__}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {type(value).__name__}")
    return value


def _array(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array, got {type(value).__name__}")
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: not a numeric array ({exc})") from exc
    return arr


def _parse_spaces(value: Any) -> dict[str, HiddenSpace]:
    if not isinstance(value, list):
        raise ParseError("spaces: expected an array of declarations")
    registry: dict[str, HiddenSpace] = {}
    for i, item in enumerate(value):
        where = f"spaces[{i}]"
        item = _mapping(item, where)
        label = _require(item, "label", where)
        values = _require(item, "values", where)
        if not isinstance(label, str):
            raise ParseError(f"{where}: label must be a string")
        if label in registry:
            raise ParseError(f"{where}: duplicate space label {label!r}")
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise ParseError(f"{where}: values must be an array of strings")
        registry[label] = _validated("hv-core", HiddenSpace, label, tuple(values))
    return registry


def _lookup_space(registry: Mapping[str, HiddenSpace], label: Any,
                  where: str) -> HiddenSpace:
    if not isinstance(label, str):
        raise ParseError(f"{where}: space reference must be a string label")
    if label not in registry:
        raise ParseError(f"{where}: unknown space label {label!r}")
    return registry[label]


def _parse_settings(value: Any) -> tuple[Setting, Setting, Setting, Setting]:
    value = _mapping(value, "settings")
    extra = set(value) - set(SETTING_NAMES)
    if extra:
        raise ParseError(f"settings: unknown setting name(s) {sorted(extra)}")
    out = []
    for name in SETTING_NAMES:
        angle = _number(_require(value, name, "settings"), f"settings.{name}")
        side = "A" if name in ("a", "a_prime") else "B"
        out.append(Setting(side, name, angle))
    return tuple(out)


def _parse_distribution(value: Any, registry: Mapping[str, HiddenSpace],
                        where: str) -> Distribution:
    value = _mapping(value, where)
    domain = _require(value, "domain", where)
    if not isinstance(domain, list) or not domain:
        raise ParseError(f"{where}: domain must be a nonempty array of labels")
    spaces = tuple(_lookup_space(registry, lbl, f"{where}.domain") for lbl in domain)
    weights = _array(_require(value, "weights", where), f"{where}.weights")
    dist = _validated("hv-core", Distribution, spaces, weights)
    _validated("hv-core", validate_distribution, dist)
    return dist


def _split_pair(key: str, where: str) -> tuple[str, str]:
    parts = key.split("|")
    if len(parts) != 2:
        raise ParseError(f"{where}: key {key!r} must look like 'own|remote'")
    return parts[0], parts[1]


def _parse_model(value: Any, registry: Mapping[str, HiddenSpace],
                 where: str) -> ResponseModel:
    value = _mapping(value, where)
    kind = _require(value, "kind", where)
    if kind not in _MODEL_KINDS:
        raise ParseError(f"{where}: unknown model kind {kind!r}; "
                         f"expected one of {_MODEL_KINDS}")
    tables_doc = _mapping(_require(value, "tables", where), f"{where}.tables")

    if kind in ("DeterministicSource", "StochasticSource"):
        lam = _lookup_space(registry, _require(value, "space", where),
                            f"{where}.space")
        tables = {name: _array(tbl, f"{where}.tables.{name}")
                  for name, tbl in tables_doc.items()}
        cls = DeterministicSource if kind == "DeterministicSource" else StochasticSource
        return _validated("response-models", cls, lam, tables)

    if kind == "Contextual":
        lam = _lookup_space(registry, _require(value, "space", where),
                            f"{where}.space")
        separated = value.get("separated", False)
        if not isinstance(separated, bool):
            raise ParseError(f"{where}.separated: expected true or false")
        tables = {}
        for key, tbl in tables_doc.items():
            own, remote = _split_pair(key, f"{where}.tables")
            tables[(own, remote)] = _array(tbl, f"{where}.tables.{key}")
        return _validated("response-models", Contextual, lam, tables, separated)

    spaces_doc = _mapping(_require(value, "spaces", where), f"{where}.spaces")
    missing = [k for k in _SPACE_KEYS if k not in spaces_doc]
    if missing:
        raise ParseError(f"{where}.spaces: missing key(s) {missing}")
    five = FiveSpaces(*(_lookup_space(registry, spaces_doc[k], f"{where}.spaces.{k}")
                        for k in _SPACE_KEYS))
    tables = {name: _array(tbl, f"{where}.tables.{name}")
              for name, tbl in tables_doc.items()}
    return _validated("response-models", ApparatusDeterministic, five, tables)


def _parse_distributions(value: Any, registry: Mapping[str, HiddenSpace]
                         ) -> ScenarioDistributions:
    where = "distributions"
    value = _mapping(value, where)
    mode = _require(value, "mode", where)
    if mode not in _MODE_TAGS:
        raise ParseError(f"{where}: unknown mode {mode!r}; expected one of {_MODE_TAGS}")

    if mode == "SourceOnly":
        rho = _parse_distribution(_require(value, "rho", where), registry,
                                  f"{where}.rho")
        return _validated("correlation-engine", SourceOnly, rho)

    if mode == "SettingDependent":
        marginals_doc = _mapping(_require(value, "marginals", where),
                                 f"{where}.marginals")
        marginals = {}
        for key, payload in marginals_doc.items():
            p, q = _split_pair(key, f"{where}.marginals")
            pair = _validated("hv-core", pair_key, p, q)
            marginals[pair] = _parse_distribution(payload, registry,
                                                  f"{where}.marginals.{key}")
        return _validated("correlation-engine", SettingDependent, marginals)

    if mode == "FactorizedApparatus":
        rho = _parse_distribution(_require(value, "rho", where), registry,
                                  f"{where}.rho")
        apparatus_doc = _mapping(_require(value, "apparatus", where),
                                 f"{where}.apparatus")
        apparatus = {name: _parse_distribution(payload, registry,
                                               f"{where}.apparatus.{name}")
                     for name, payload in apparatus_doc.items()}
        return _validated("correlation-engine", FactorizedApparatus, rho, apparatus)

    joint = _parse_distribution(_require(value, "joint", where), registry,
                                f"{where}.joint")
    return _validated("correlation-engine", JointComposite, joint)


def _parse_run(value: Any) -> RunBlock:
    where = "run"
    value = _mapping(value, where)
    est_doc = _mapping(_require(value, "estimator", where), f"{where}.estimator")
    method = _require(est_doc, "method", f"{where}.estimator")
    if method == "exact":
        estimator = EstimatorInfo(method="exact")
    elif method == "monte-carlo":
        samples = _integer(_require(est_doc, "samples", f"{where}.estimator"),
                           f"{where}.estimator.samples")
        seed = _integer(_require(est_doc, "seed", f"{where}.estimator"),
                        f"{where}.estimator.seed")
        if samples < 1:
            raise ParseError(f"{where}.estimator.samples: must be at least 1")
        if seed < 0:
            raise ParseError(f"{where}.estimator.seed: must be nonnegative")
        estimator = EstimatorInfo(method="monte-carlo", samples=samples, seed=seed)
    else:
        raise ParseError(f"{where}.estimator.method: unknown method {method!r}; "
                         "expected 'exact' or 'monte-carlo'")

    analyses = _require(value, "analyses", where)
    if not isinstance(analyses, list) or not analyses:
        raise ParseError(f"{where}.analyses: expected a nonempty array")
    seen = []
    for name in analyses:
        if name not in ANALYSES:
            raise ParseError(f"{where}.analyses: unknown analysis {name!r}; "
                             f"expected one of {ANALYSES}")
        if name in seen:
            raise ParseError(f"{where}.analyses: duplicate analysis {name!r}")
        seen.append(name)
    return RunBlock(estimator=estimator, analyses=tuple(seen))


_SOURCE_KINDS = (DeterministicSource, StochasticSource, Contextual)


def _check_cross_constraints(scenario: Scenario) -> None:
    model, dists = scenario.model, scenario.distributions
    if isinstance(model, _SOURCE_KINDS) and not isinstance(
            dists, (SourceOnly, SettingDependent)):
        raise ValidationError("cli-harness",
                              f"model kind {model.kind} requires mode SourceOnly "
                              f"or SettingDependent, got {dists.mode}")
    if isinstance(model, ApparatusDeterministic) and isinstance(dists, SourceOnly):
        raise ValidationError("cli-harness",
                              "model kind ApparatusDeterministic cannot run "
                              "under mode SourceOnly")

    if "feasibility" in scenario.run.analyses:
        if isinstance(dists, SourceOnly):
            raise ValidationError("cli-harness",
                                  "feasibility analysis is undefined for mode "
                                  "SourceOnly; it needs a setting-pair marginal family")
        if isinstance(dists, SettingDependent):
            any_dist = next(iter(dists.marginals.values()))
            if len(any_dist.domain) != 3:
                raise ValidationError(
                    "cli-harness",
                    "feasibility analysis needs (lambda, lambda_p, lambda_q) "
                    "marginals, not source-only ones")

    if "emulation" in scenario.run.analyses:
        if scenario.comparison_model is None:
            raise ValidationError("cli-harness",
                                  "emulation analysis requires comparison_model")
        if not isinstance(model, ApparatusDeterministic):
            raise ValidationError("cli-harness",
                                  "emulation analysis requires an "
                                  "ApparatusDeterministic primary model")
        if not isinstance(scenario.comparison_model, StochasticSource):
            raise ValidationError("cli-harness",
                                  "emulation analysis requires a StochasticSource "
                                  "comparison model")
        if not isinstance(dists, FactorizedApparatus):
            raise ValidationError("cli-harness",
                                  "emulation analysis requires mode "
                                  "FactorizedApparatus")


def parse_scenario(doc: Any, digest: str = "") -> Scenario:
    """Build a validated Scenario from a decoded JSON document."""
    doc = _mapping(doc, "scenario")
    version = _integer(_require(doc, "schema_version", "scenario"), "schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"schema_version: unsupported version {version}; "
                         f"this build reads version {SCHEMA_VERSION}")
    description = doc.get("description", "")
    if not isinstance(description, str):
        raise ParseError("description: expected a string")

    registry = _parse_spaces(_require(doc, "spaces", "scenario"))
    settings = _parse_settings(_require(doc, "settings", "scenario"))
    model = _parse_model(_require(doc, "model", "scenario"), registry, "model")
    dists = _parse_distributions(_require(doc, "distributions", "scenario"), registry)
    run = _parse_run(_require(doc, "run", "scenario"))
    comparison = None
    if "comparison_model" in doc:
        comparison = _parse_model(doc["comparison_model"], registry,
                                  "comparison_model")

    scenario = Scenario(schema_version=version, description=description,
                        settings=settings, model=model, distributions=dists,
                        run=run, comparison_model=comparison, digest=digest)
    _check_cross_constraints(scenario)
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    """Read, parse, and validate a scenario file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path.name}: invalid JSON ({exc})") from exc
    return parse_scenario(doc, digest="sha256:" + sha256(raw).hexdigest())


# ---------------------------------------------------------------------------
# Serialization and generation
# ---------------------------------------------------------------------------


def render_document(doc: Mapping[str, Any]) -> str:
    """Deterministic JSON text: two-space indent, insertion order, one
    trailing newline, and a hard failure on non-finite numbers."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_scenario(path: str | Path, doc: Mapping[str, Any]) -> None:
    Path(path).write_text(render_document(doc), encoding="utf-8")


def _dist_doc(dist: Distribution) -> dict[str, Any]:
    return {"domain": list(dist.labels),
            "weights": [float(w) for w in dist.flat]}


def _space_doc(space: HiddenSpace) -> dict[str, Any]:
    return {"label": space.label, "values": list(space.values)}


def _source_model_doc(model: DeterministicSource | StochasticSource) -> dict[str, Any]:
    return {"kind": model.kind, "space": model.lam.label,
            "tables": {name: [float(v) for v in model.tables[name]]
                       for name in SETTING_NAMES}}


def _apparatus_model_doc(model: ApparatusDeterministic) -> dict[str, Any]:
    spaces = model.spaces
    return {"kind": model.kind,
            "spaces": {"source": spaces.lam.label,
                       "a": spaces.for_setting("a").label,
                       "a_prime": spaces.for_setting("a_prime").label,
                       "b": spaces.for_setting("b").label,
                       "b_prime": spaces.for_setting("b_prime").label},
            "tables": {name: [[float(v) for v in row] for row in model.tables[name]]
                       for name in SETTING_NAMES}}


def _settings_doc(angles: tuple[float, float, float, float]) -> dict[str, float]:
    return {"a": float(angles[0]), "a_prime": float(angles[1]),
            "b": float(angles[2]), "b_prime": float(angles[3])}


def _check_cards(cards: tuple[int, ...]) -> tuple[int, ...]:
    cards = tuple(int(c) for c in cards)
    if len(cards) != 5:
        raise ParameterOutOfRange(
            "cards", f"need five cardinalities (source plus four apparatus), "
            f"got {len(cards)}")
    for c in cards:
        if not 1 <= c <= 8:
            raise ParameterOutOfRange("cards", f"each cardinality must be in "
                                      f"[1, 8], got {c}")
    return cards


def _check_angles(angles) -> tuple[float, float, float, float]:
    angles = tuple(float(x) for x in angles)
    if len(angles) != 4:
        raise ParameterOutOfRange("angles",
                                  f"need four angles (a, a_prime, b, b_prime), "
                                  f"got {len(angles)}")
    for x in angles:
        if not math.isfinite(x):
            raise ParameterOutOfRange("angles", "angles must be finite")
    return angles


def _random_five(rng: np.random.Generator, cards: tuple[int, ...]
                 ) -> tuple[FiveSpaces, ApparatusDeterministic, Distribution,
                            dict[str, Distribution]]:
    """Random apparatus model and factorized distributions on fresh spaces."""
    labels = ("lambda", "lambda_a", "lambda_a_prime", "lambda_b", "lambda_b_prime")
    five = FiveSpaces(*(HiddenSpace.of_size(lbl, c)
                        for lbl, c in zip(labels, cards)))
    tables = {name: rng.choice([-1.0, 1.0],
                               size=(five.lam.cardinality,
                                     five.for_setting(name).cardinality))
              for name in SETTING_NAMES}
    model = ApparatusDeterministic(five, tables)
    rho = Distribution((five.lam,), rng.dirichlet(np.ones(five.lam.cardinality)))
    apparatus = {name: Distribution(
        (five.for_setting(name),),
        rng.dirichlet(np.ones(five.for_setting(name).cardinality)))
        for name in SETTING_NAMES}
    return five, model, rho, apparatus


def _estimator_doc(parameters: Mapping[str, Any]) -> dict[str, Any]:
    method = parameters.get("estimator", "exact")
    if method == "exact":
        return {"method": "exact"}
    if method == "monte-carlo":
        samples = int(parameters.get("samples", 100_000))
        seed = int(parameters.get("mc_seed", 0))
        if samples < 1:
            raise ParameterOutOfRange("samples", "must be at least 1")
        if seed < 0:
            raise ParameterOutOfRange("mc_seed", "must be nonnegative")
        return {"method": "monte-carlo", "samples": samples, "seed": seed}
    raise ParameterOutOfRange("estimator",
                              f"unknown method {method!r}; expected 'exact' "
                              "or 'monte-carlo'")


def generate_scenario(template: str, parameters: Mapping[str, Any] | None = None
                      ) -> dict[str, Any]:
    """Emit a ready-to-run scenario document for a named template.

    Recognized parameters (all optional): ``seed`` (table randomization),
    ``cards`` (five space cardinalities), ``angles`` (four analyzer angles,
    default Tsirelson configuration), ``estimator`` ('exact' or
    'monte-carlo'), ``samples`` and ``mc_seed`` (monte-carlo only), and
    ``description``.
    """
    if template not in TEMPLATES:
        raise UnknownTemplate(template, TEMPLATES)
    parameters = dict(parameters or {})
    seed = int(parameters.get("seed", 0))
    if seed < 0:
        raise ParameterOutOfRange("seed", "must be nonnegative")
    cards = _check_cards(parameters.get("cards", (2, 2, 2, 2, 2)))
    angles = _check_angles(parameters.get("angles", TSIRELSON_ANGLES))
    estimator = _estimator_doc(parameters)
    rng = np.random.default_rng(seed)

    if template == "factorized":
        five, model, rho, apparatus = _random_five(rng, cards)
        description = parameters.get(
            "description", "factorized apparatus correlations; the bound-"
            "respecting construction with independent per-setting noise")
        return {
            "schema_version": SCHEMA_VERSION,
            "description": description,
            "spaces": [_space_doc(s) for s in five],
            "settings": _settings_doc(angles),
            "model": _apparatus_model_doc(model),
            "distributions": {
                "mode": "FactorizedApparatus",
                "rho": _dist_doc(rho),
                "apparatus": {name: _dist_doc(apparatus[name])
                              for name in SETTING_NAMES},
            },
            "run": {"estimator": estimator,
                    "analyses": ["correlations", "chsh", "bell-check",
                                 "feasibility"]},
        }

    if template == "joint-composite":
        five, model, _, _ = _random_five(rng, cards)
        size = int(np.prod([s.cardinality for s in five]))
        joint = Distribution(tuple(five), rng.dirichlet(np.ones(size)))
        description = parameters.get(
            "description", "one joint distribution over the composite hidden "
            "variable; every setting-pair marginal comes from it")
        return {
            "schema_version": SCHEMA_VERSION,
            "description": description,
            "spaces": [_space_doc(s) for s in five],
            "settings": _settings_doc(angles),
            "model": _apparatus_model_doc(model),
            "distributions": {"mode": "JointComposite", "joint": _dist_doc(joint)},
            "run": {"estimator": estimator,
                    "analyses": ["correlations", "chsh", "bell-check",
                                 "feasibility"]},
        }

    if template == "setting-dependent-witness":
        settings = standard_settings(*angles)
        try:
            family, model = construct_nonlocal_witness(tuple(settings))
        except BellsimError as exc:
            raise ParameterOutOfRange("angles", str(exc)) from exc
        description = parameters.get(
            "description", "setting-dependent apparatus marginals tuned to the "
            "singlet; violates the bound and admits no joint distribution")
        marginals = {f"{p}|{q}": _dist_doc(family.marginals[(p, q)])
                     for p, q in SETTING_PAIRS}
        return {
            "schema_version": SCHEMA_VERSION,
            "description": description,
            "spaces": [_space_doc(s) for s in family.spaces],
            "settings": _settings_doc(angles),
            "model": _apparatus_model_doc(model),
            "distributions": {"mode": "SettingDependent", "marginals": marginals},
            "run": {"estimator": estimator,
                    "analyses": ["correlations", "chsh", "bell-check",
                                 "feasibility"]},
        }

    # stochastic-equivalent
    five, model, rho, apparatus = _random_five(rng, cards)
    comparison = stochastic_from_apparatus(model, apparatus)
    description = parameters.get(
        "description", "apparatus model plus its collapsed stochastic "
        "equivalent; both report the same correlations")
    return {
        "schema_version": SCHEMA_VERSION,
        "description": description,
        "spaces": [_space_doc(s) for s in five],
        "settings": _settings_doc(angles),
        "model": _apparatus_model_doc(model),
        "distributions": {
            "mode": "FactorizedApparatus",
            "rho": _dist_doc(rho),
            "apparatus": {name: _dist_doc(apparatus[name])
                          for name in SETTING_NAMES},
        },
        "comparison_model": _source_model_doc(comparison),
        "run": {"estimator": estimator,
                "analyses": ["correlations", "chsh", "bell-check", "emulation"]},
    }
