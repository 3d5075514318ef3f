"""Response-model families and the reductions between them.

Four families of outcome rules, all with outcomes in {+1, -1}:

DeterministicSource     f(setting, lambda)
StochasticSource        p(+1 | setting, lambda)
Contextual              f(own setting, remote setting, lambda)
ApparatusDeterministic  f(setting, lambda, lambda_setting)

Tables are explicit finite arrays indexed by value position in the
declared spaces; closed-form rules are entered by tabulating them.
Hidden points are given as value indices: a bare int or 1-tuple for the
source-only kinds, a (lambda, lambda_setting) index pair for the
apparatus kind.

Settings carry a planar analyzer angle; the singlet correlation depends
only on the relative angle, so full 3-D unit vectors are not needed.

All models are immutable after construction and every operation is pure.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from ._kernels import response_product_sum
from .errors import (
    DomainMismatch,
    KindMismatch,
    MissingRemoteSetting,
    PointDimensionMismatch,
    RemoteDependenceForbidden,
    SideMismatch,
)
from .spaces import (
    APPARATUS_LABELS,
    SIDE_A_NAMES,
    SIDE_B_NAMES,
    Distribution,
    FiveSpaces,
    HiddenSpace,
)

SETTING_NAMES = SIDE_A_NAMES + SIDE_B_NAMES

#: Composite flat-index order is row-major over (lambda, lambda_a,
#: lambda_a_prime, lambda_b, lambda_b_prime); the axis of each setting's
#: apparatus space in that order.
COMPOSITE_AXIS = {"a": 1, "a_prime": 2, "b": 3, "b_prime": 4}


@dataclass(frozen=True)
class Setting:
    """One analyzer configuration: side, canonical name, planar angle."""

    side: str
    name: str
    angle: float

    def __post_init__(self) -> None:
        if self.side not in ("A", "B"):
            raise SideMismatch(f"side must be 'A' or 'B', got {self.side!r}")
        expected = SIDE_A_NAMES if self.side == "A" else SIDE_B_NAMES
        if self.name not in expected:
            raise SideMismatch(
                f"setting {self.name!r} is not valid on side {self.side}")

    @property
    def is_side_a(self) -> bool:
        return self.side == "A"


def standard_settings(theta_a: float, theta_a_prime: float, theta_b: float,
                      theta_b_prime: float) -> tuple[Setting, Setting, Setting, Setting]:
    """The four canonical settings (a, a_prime, b, b_prime) at given angles."""
    return (
        Setting("A", "a", theta_a),
        Setting("A", "a_prime", theta_a_prime),
        Setting("B", "b", theta_b),
        Setting("B", "b_prime", theta_b_prime),
    )


def _freeze_table(values, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.shape != shape:
        raise DomainMismatch(f"{what} has shape {arr.shape}, expected {shape}")
    arr.setflags(write=False)
    return arr


def _check_signs(arr: np.ndarray, what: str) -> None:
    if not np.all(np.abs(arr) == 1.0):
        raise DomainMismatch(f"{what} must contain only +1/-1 entries")


def _tables_equal(left, right) -> bool:
    if type(left) is not type(right):
        return False
    spaces_l = getattr(left, "spaces", None) or left.lam
    spaces_r = getattr(right, "spaces", None) or right.lam
    if spaces_l != spaces_r or set(left.tables) != set(right.tables):
        return False
    return all(np.array_equal(left.tables[k], right.tables[k]) for k in left.tables)


def _point_indices(point, expected: int) -> tuple[int, ...]:
    if isinstance(point, (int, np.integer)):
        point = (int(point),)
    else:
        point = tuple(int(c) for c in point)
    if len(point) != expected:
        raise PointDimensionMismatch(expected, len(point))
    return point


@dataclass(frozen=True)
class DeterministicSource:
    """f(setting, lambda) with outcomes in {+1, -1} (the local case)."""

    lam: HiddenSpace
    tables: Mapping[str, np.ndarray] = field(compare=False)

    kind = "DeterministicSource"

    def __post_init__(self) -> None:
        shape = (self.lam.cardinality,)
        frozen = {}
        for name in SETTING_NAMES:
            if name not in self.tables:
                raise DomainMismatch(f"missing response table for setting {name!r}")
            arr = _freeze_table(self.tables[name], shape, f"table for {name!r}")
            _check_signs(arr, f"table for {name!r}")
            frozen[name] = arr
        object.__setattr__(self, "tables", frozen)

    def response_vector(self, setting: Setting) -> np.ndarray:
        return self.tables[setting.name]

    def __eq__(self, other: object) -> bool:
        return _tables_equal(self, other)


@dataclass(frozen=True)
class StochasticSource:
    """p(+1 | setting, lambda): local outcome probabilities in [0, 1]."""

    lam: HiddenSpace
    tables: Mapping[str, np.ndarray] = field(compare=False)

    kind = "StochasticSource"

    def __post_init__(self) -> None:
        shape = (self.lam.cardinality,)
        frozen = {}
        for name in SETTING_NAMES:
            if name not in self.tables:
                raise DomainMismatch(f"missing probability table for setting {name!r}")
            arr = _freeze_table(self.tables[name], shape, f"table for {name!r}")
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise DomainMismatch(f"table for {name!r} must lie in [0, 1]")
            frozen[name] = arr
        object.__setattr__(self, "tables", frozen)

    def probability_vector(self, setting: Setting) -> np.ndarray:
        return self.tables[setting.name]

    def __eq__(self, other: object) -> bool:
        return _tables_equal(self, other)


@dataclass(frozen=True)
class Contextual:
    """f(own setting, remote setting, lambda): remote-setting dependence.

    ``separated`` models space-like separation of the measurement events:
    when True, construction rejects any table that actually depends on the
    remote setting, enforcing the reduction to the local case.  No
    spacetime geometry is computed.
    """

    lam: HiddenSpace
    tables: Mapping[tuple[str, str], np.ndarray] = field(compare=False)
    separated: bool = False

    kind = "Contextual"

    def __post_init__(self) -> None:
        shape = (self.lam.cardinality,)
        frozen = {}
        for own in SETTING_NAMES:
            remotes = SIDE_B_NAMES if own in SIDE_A_NAMES else SIDE_A_NAMES
            for remote in remotes:
                key = (own, remote)
                if key not in self.tables:
                    raise DomainMismatch(f"missing table for (own, remote) = {key}")
                arr = _freeze_table(self.tables[key], shape, f"table for {key}")
                _check_signs(arr, f"table for {key}")
                frozen[key] = arr
            if self.separated:
                first, second = remotes
                if not np.array_equal(frozen[(own, first)], frozen[(own, second)]):
                    raise RemoteDependenceForbidden(own)
        object.__setattr__(self, "tables", frozen)

    def __eq__(self, other: object) -> bool:
        return _tables_equal(self, other) and self.separated == other.separated

    def response_vector(self, setting: Setting, remote: Setting) -> np.ndarray:
        if setting.side == remote.side:
            raise SideMismatch(
                f"remote setting {remote.name!r} is on the same side as {setting.name!r}")
        return self.tables[(setting.name, remote.name)]

    @classmethod
    def from_deterministic(cls, model: "DeterministicSource",
                           separated: bool = True) -> "Contextual":
        """Embed a local model as a (remote-independent) contextual one."""
        tables = {}
        for own in SETTING_NAMES:
            remotes = SIDE_B_NAMES if own in SIDE_A_NAMES else SIDE_A_NAMES
            for remote in remotes:
                tables[(own, remote)] = model.tables[own]
        return cls(model.lam, tables, separated=separated)

    def to_deterministic(self) -> "DeterministicSource":
        """Strip the remote index; requires remote-independent tables."""
        tables = {}
        for own in SETTING_NAMES:
            remotes = SIDE_B_NAMES if own in SIDE_A_NAMES else SIDE_A_NAMES
            first, second = remotes
            if not np.array_equal(self.tables[(own, first)], self.tables[(own, second)]):
                raise RemoteDependenceForbidden(own)
            tables[own] = self.tables[(own, first)]
        return DeterministicSource(self.lam, tables)


@dataclass(frozen=True)
class ApparatusDeterministic:
    """f(setting, lambda, lambda_setting): deterministic given the source
    variable and the apparatus variable of the queried analyzer."""

    spaces: FiveSpaces
    tables: Mapping[str, np.ndarray] = field(compare=False)

    kind = "ApparatusDeterministic"

    def __post_init__(self) -> None:
        frozen = {}
        for name in SETTING_NAMES:
            if name not in self.tables:
                raise DomainMismatch(f"missing response table for setting {name!r}")
            shape = (self.spaces.lam.cardinality,
                     self.spaces.for_setting(name).cardinality)
            arr = _freeze_table(self.tables[name], shape, f"table for {name!r}")
            _check_signs(arr, f"table for {name!r}")
            frozen[name] = arr
        object.__setattr__(self, "tables", frozen)

    def response_table(self, setting: Setting) -> np.ndarray:
        return self.tables[setting.name]

    def __eq__(self, other: object) -> bool:
        return _tables_equal(self, other)


ResponseModel = DeterministicSource | StochasticSource | Contextual | ApparatusDeterministic


def outcome(model: ResponseModel, setting: Setting, point,
            remote: Setting | None = None) -> int:
    """Evaluate a deterministic model at one hidden point; returns +1 or -1."""
    if isinstance(model, StochasticSource):
        raise KindMismatch("deterministic", model.kind)
    if isinstance(model, Contextual):
        if remote is None:
            raise MissingRemoteSetting()
        (i,) = _point_indices(point, 1)
        return int(model.response_vector(setting, remote)[i])
    if remote is not None:
        raise KindMismatch("Contextual", model.kind)
    if isinstance(model, DeterministicSource):
        (i,) = _point_indices(point, 1)
        return int(model.tables[setting.name][i])
    if isinstance(model, ApparatusDeterministic):
        i, j = _point_indices(point, 2)
        return int(model.tables[setting.name][i, j])
    raise KindMismatch("deterministic", type(model).__name__)


def effective_response_stochastic(model: StochasticSource, setting: Setting,
                                  lam_index: int) -> float:
    """Outcome expectation 2*p(+1) - 1 at one (setting, lambda)."""
    if not isinstance(model, StochasticSource):
        raise KindMismatch("StochasticSource", getattr(model, "kind", type(model).__name__))
    (i,) = _point_indices(lam_index, 1)
    return 2.0 * float(model.tables[setting.name][i]) - 1.0


def effective_response_apparatus(model: ApparatusDeterministic, setting: Setting,
                                 lam_index: int, apparatus_dist: Distribution) -> float:
    """Outcome expectation averaged over the apparatus variable:
    sum over lambda_s of f(setting, lambda, lambda_s) * rho_setting(lambda_s)."""
    if not isinstance(model, ApparatusDeterministic):
        raise KindMismatch("ApparatusDeterministic",
                           getattr(model, "kind", type(model).__name__))
    expected = model.spaces.for_setting(setting.name)
    if apparatus_dist.domain != (expected,):
        raise DomainMismatch(
            f"apparatus distribution domain {apparatus_dist.labels} does not match "
            f"space {expected.label!r} of setting {setting.name!r}")
    (i,) = _point_indices(lam_index, 1)
    row = np.ascontiguousarray(model.tables[setting.name][i])
    ones = np.ones_like(row)
    return response_product_sum(row, ones, apparatus_dist.flat)


def composite_space(spaces: FiveSpaces, label: str = "lambda_tilde") -> HiddenSpace:
    """The product space of all five factors, in row-major point order."""
    values = []
    for idx in np.ndindex(*(s.cardinality for s in spaces)):
        values.append("|".join(spaces[k].values[i] for k, i in enumerate(idx)))
    return HiddenSpace(label, tuple(values))


def flatten_joint(joint: Distribution, label: str = "lambda_tilde") -> Distribution:
    """Re-index a five-space joint as a distribution over the composite space.

    The composite space enumerates points in row-major order over the five
    factors, so the weights transfer unchanged.
    """
    if len(joint.domain) != 5:
        raise DomainMismatch(
            f"composite joint needs a five-space domain, got {joint.labels}")
    tilde = composite_space(FiveSpaces(*joint.domain), label)
    return Distribution((tilde,), joint.flat)


def lift_to_composite(model: ApparatusDeterministic,
                      spaces: FiveSpaces | None = None) -> DeterministicSource:
    """Re-express an apparatus model as a source-only model on the composite
    variable: the response at a composite point reads off the source and
    own-apparatus components and ignores everything else."""
    if spaces is None:
        spaces = model.spaces
    if spaces != model.spaces:
        raise DomainMismatch("supplied spaces do not match the model's spaces")
    shape = tuple(s.cardinality for s in spaces)
    tilde = composite_space(spaces)
    tables = {}
    for name in SETTING_NAMES:
        axes = [None] * 5
        axes[0] = slice(None)
        axes[COMPOSITE_AXIS[name]] = slice(None)
        grid = np.broadcast_to(model.tables[name][tuple(axes)], shape)
        tables[name] = grid.reshape(-1)
    return DeterministicSource(tilde, tables)


def stochastic_from_apparatus(model: ApparatusDeterministic,
                              apparatus_dists: Mapping[str, Distribution]
                              ) -> StochasticSource:
    """Collapse apparatus randomness into outcome probabilities:
    p(+1 | setting, lambda) = total apparatus weight where f = +1."""
    if not isinstance(model, ApparatusDeterministic):
        raise KindMismatch("ApparatusDeterministic",
                           getattr(model, "kind", type(model).__name__))
    tables = {}
    for name in SETTING_NAMES:
        if name not in apparatus_dists:
            raise DomainMismatch(f"missing apparatus distribution for setting {name!r}")
        dist = apparatus_dists[name]
        expected = model.spaces.for_setting(name)
        if dist.domain != (expected,):
            raise DomainMismatch(
                f"apparatus distribution for {name!r} has domain {dist.labels}, "
                f"expected ({expected.label!r},)")
        indicator = (model.tables[name] > 0.0).astype(np.float64)
        p_plus = indicator @ dist.flat
        # guard against 1 + epsilon from the dot product
        tables[name] = np.clip(p_plus, 0.0, 1.0)
    return StochasticSource(model.spaces.lam, tables)
