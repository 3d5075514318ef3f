"""Finite hidden-variable spaces and probability distributions over them.

Conventions
-----------
A hidden-variable space is a finite, ordered list of distinct value labels.
A distribution assigns one nonnegative weight to every point of the product
of its domain spaces; weights are stored row-major over the ordered domain
list (the first domain space varies slowest).  Row-major order is part of
the external file-format contract, so it must never change.

All values are immutable after construction and all operations are pure,
so everything here is safe to share across parallel workers.

The canonical experiment uses five spaces: one for the particle source
(``lambda``) and one per analyzer setting (``lambda_a``, ``lambda_a_prime``,
``lambda_b``, ``lambda_b_prime``).  Setting names and pair order are fixed
module-wide by the constants below.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    EmptyKeepSet,
    InvalidFamily,
    InvalidPart,
    NegativeWeight,
    NotNormalized,
    OverlappingDomains,
    ShapeMismatch,
    UnknownSpace,
)

#: Normalization tolerance for exact-arithmetic paths.
NORMALIZATION_TOL = 1e-12

#: Analyzer setting names, by side, in canonical order.
SIDE_A_NAMES = ("a", "a_prime")
SIDE_B_NAMES = ("b", "b_prime")

#: The four setting pairs in the order they enter the CHSH combination
#: S = E(a,b) + E(a,b') + E(a',b) - E(a',b').
SETTING_PAIRS = (
    ("a", "b"),
    ("a", "b_prime"),
    ("a_prime", "b"),
    ("a_prime", "b_prime"),
)

#: Conventional space label for the apparatus variable of each setting.
APPARATUS_LABELS = {
    "a": "lambda_a",
    "a_prime": "lambda_a_prime",
    "b": "lambda_b",
    "b_prime": "lambda_b_prime",
}

#: Conventional label for the source space.
SOURCE_LABEL = "lambda"


def pair_key(p: str, q: str) -> tuple[str, str]:
    """Normalize a setting pair to (side-A name, side-B name)."""
    if p in SIDE_A_NAMES and q in SIDE_B_NAMES:
        return (p, q)
    if p in SIDE_B_NAMES and q in SIDE_A_NAMES:
        return (q, p)
    raise InvalidFamily(f"({p!r}, {q!r}) is not a valid setting pair")


@dataclass(frozen=True)
class HiddenSpace:
    """A finite labeled set of hidden-variable values."""

    label: str
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        if len(self.values) < 1:
            raise InvalidFamily(f"space {self.label!r} must have at least one value")
        if len(set(self.values)) != len(self.values):
            raise InvalidFamily(f"space {self.label!r} has duplicate value labels")

    @property
    def cardinality(self) -> int:
        return len(self.values)

    @classmethod
    def binary(cls, label: str) -> "HiddenSpace":
        """Two-point space with values '+1' and '-1' (index 0 maps to +1)."""
        return cls(label, ("+1", "-1"))

    @classmethod
    def of_size(cls, label: str, n: int) -> "HiddenSpace":
        return cls(label, tuple(str(i) for i in range(n)))


class FiveSpaces(NamedTuple):
    """The source space plus the four per-setting apparatus spaces."""

    lam: HiddenSpace
    lam_a: HiddenSpace
    lam_a_prime: HiddenSpace
    lam_b: HiddenSpace
    lam_b_prime: HiddenSpace

    def for_setting(self, name: str) -> HiddenSpace:
        index = {"a": 1, "a_prime": 2, "b": 3, "b_prime": 4}[name]
        return self[index]

    @classmethod
    def binary_apparatus(cls, lam: HiddenSpace) -> "FiveSpaces":
        return cls(lam, *(HiddenSpace.binary(APPARATUS_LABELS[s])
                          for s in SIDE_A_NAMES + SIDE_B_NAMES))


@dataclass(frozen=True)
class Distribution:
    """Nonnegative weights over the product of an ordered list of spaces.

    ``weights`` is stored as a read-only float64 array.  The constructor
    accepts flat (row-major) or already-shaped arrays and does not validate
    beyond dtype coercion; call :func:`validate_distribution` to enforce the
    probability invariants.
    """

    domain: tuple[HiddenSpace, ...]
    weights: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        w = np.array(self.weights, dtype=np.float64)
        if w.size == self.size:
            w = w.reshape(self.shape)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.cardinality for s in self.domain)

    @property
    def size(self) -> int:
        return int(math.prod(self.shape))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.domain)

    @property
    def flat(self) -> np.ndarray:
        """Row-major 1-D view of the weights."""
        return self.weights.reshape(-1)

    def space(self, label: str) -> HiddenSpace:
        for s in self.domain:
            if s.label == label:
                return s
        raise UnknownSpace(label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:  # frozen dataclass with array payload
        return hash((self.domain, self.weights.tobytes()))

    @classmethod
    def uniform(cls, domain: Sequence[HiddenSpace]) -> "Distribution":
        domain = tuple(domain)
        n = math.prod(s.cardinality for s in domain)
        return cls(domain, np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, domain: Sequence[HiddenSpace], flat_index: int) -> "Distribution":
        domain = tuple(domain)
        n = math.prod(s.cardinality for s in domain)
        w = np.zeros(n)
        w[flat_index] = 1.0
        return cls(domain, w)


def validate_distribution(d: Distribution) -> None:
    """Enforce the probability invariants; raises on the first violation.

    Checks, in order: weight count matches the domain (ShapeMismatch), all
    weights nonnegative (NegativeWeight, reported with the row-major flat
    index), and total weight 1 within NORMALIZATION_TOL (NotNormalized).
    """
    expected = d.size
    if d.weights.size != expected:
        raise ShapeMismatch(expected, d.weights.size)
    flat = d.flat
    negative = np.flatnonzero(flat < 0.0)
    if negative.size:
        i = int(negative[0])
        raise NegativeWeight(i, flat[i])
    total = float(np.sum(flat))
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(total)


def renormalize(d: Distribution) -> Distribution:
    """Explicitly rescale weights to total 1; never applied silently."""
    total = float(np.sum(d.flat))
    if total <= 0.0:
        raise NotNormalized(total)
    return Distribution(d.domain, d.weights / total)


def product_distribution(parts: Sequence[Distribution]) -> Distribution:
    """Product distribution on the concatenation of the parts' domains.

    The weight at a composite point is the product of the parts' weights at
    the projected points.  Parts must be valid and must not share spaces.
    """
    parts = list(parts)
    if not parts:
        raise InvalidPart(0, EmptyKeepSet())
    for i, part in enumerate(parts):
        try:
            validate_distribution(part)
        except (NegativeWeight, NotNormalized, ShapeMismatch) as exc:
            raise InvalidPart(i, exc) from exc
    seen: set[str] = set()
    for part in parts:
        for s in part.domain:
            if s.label in seen:
                raise OverlappingDomains(s.label)
            seen.add(s.label)
    domain = tuple(s for part in parts for s in part.domain)
    weights = parts[0].weights
    for part in parts[1:]:
        weights = np.multiply.outer(weights, part.weights)
    return Distribution(domain, weights)


def marginalize(d: Distribution, keep: Iterable[HiddenSpace | str]) -> Distribution:
    """Sum out every domain space not named in ``keep``.

    The kept spaces retain their original relative order regardless of the
    order in which they are listed.  ``marginalize(d, d.domain)`` returns an
    equal distribution.
    """
    validate_distribution(d)
    keep_labels: set[str] = set()
    for item in keep:
        label = item.label if isinstance(item, HiddenSpace) else str(item)
        if label not in d.labels:
            raise UnknownSpace(label)
        keep_labels.add(label)
    if not keep_labels:
        raise EmptyKeepSet()
    drop_axes = tuple(i for i, s in enumerate(d.domain) if s.label not in keep_labels)
    new_domain = tuple(s for s in d.domain if s.label in keep_labels)
    if not drop_axes:
        return Distribution(new_domain, d.weights)
    return Distribution(new_domain, d.weights.sum(axis=drop_axes))


@dataclass(frozen=True)
class SettingPairMarginalFamily:
    """Four setting-indexed distributions over (source, apparatus-p, apparatus-q).

    One marginal per setting pair (p, q); each lives on the domain
    (lam, space-of-p, space-of-q) and all four share the same source space.
    """

    spaces: FiveSpaces
    marginals: Mapping[tuple[str, str], Distribution]

    def __post_init__(self) -> None:
        object.__setattr__(self, "marginals", dict(self.marginals))

    def marginal(self, p: str, q: str) -> Distribution:
        return self.marginals[pair_key(p, q)]

    def validate(self) -> None:
        if set(self.marginals) != set(SETTING_PAIRS):
            raise InvalidFamily(
                f"expected marginals for pairs {SETTING_PAIRS}, got {sorted(self.marginals)}"
            )
        for pair in SETTING_PAIRS:
            dist = self.marginals[pair]
            expected = (self.spaces.lam, self.spaces.for_setting(pair[0]),
                        self.spaces.for_setting(pair[1]))
            if dist.domain != expected:
                raise InvalidFamily(
                    f"marginal for {pair} has domain {dist.labels}, expected "
                    f"{tuple(s.label for s in expected)}"
                )
            try:
                validate_distribution(dist)
            except (NegativeWeight, NotNormalized, ShapeMismatch) as exc:
                raise InvalidFamily(f"marginal for {pair} is invalid: {exc}") from exc
