import logging
from enum import Enum
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from config.messages import ERROR_MESSAGES
from utils.errors import InvalidLabelError, SpaceMismatchError

logger = logging.getLogger(__name__)


class Tower(Enum):
    HALF_INTEGER = "half-integer"
    INTEGER = "integer"

    @property
    def step(self) -> int:
        return 1 if self is Tower.HALF_INTEGER else 2


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Canonical label |j, k, m> stored as (2j, 2k, 2m) so half-integers stay exact."""

    two_j: int
    two_k: int
    two_m: int

    def __post_init__(self):
        if (self.two_j < 0 or abs(self.two_k) > self.two_j or abs(self.two_m) > self.two_j
                or (self.two_j - self.two_k) % 2 or (self.two_j - self.two_m) % 2):
            raise InvalidLabelError(ERROR_MESSAGES["invalid_label"].format(
                two_j=self.two_j, two_k=self.two_k, two_m=self.two_m))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def k(self) -> float:
        return self.two_k / 2

    @property
    def m(self) -> float:
        return self.two_m / 2

    def __str__(self) -> str:
        return f"|{_half(self.two_j)}, {_half(self.two_k)}, {_half(self.two_m)}>"


def _half(two_x: int) -> str:
    return str(two_x // 2) if two_x % 2 == 0 else f"{two_x}/2"


@dataclass(frozen=True)
class SpaceSpec:
    two_j_max: int
    tower: Tower = Tower.HALF_INTEGER

    def __post_init__(self):
        if self.two_j_max < 0:
            raise InvalidLabelError(f"two_j_max must be nonnegative, got {self.two_j_max}")
        if self.tower is Tower.INTEGER and self.two_j_max % 2:
            raise InvalidLabelError(ERROR_MESSAGES["integer_tower_odd"].format(two_j=self.two_j_max))

    def two_j_values(self) -> List[int]:
        return list(range(0, self.two_j_max + 1, self.tower.step))

    def contains(self, label: BasisLabel) -> bool:
        return label.two_j <= self.two_j_max and label.two_j % self.tower.step == 0

    def extended(self, extra_two_j: int) -> "SpaceSpec":
        if self.tower is Tower.INTEGER and extra_two_j % 2:
            extra_two_j += 1
        return SpaceSpec(self.two_j_max + extra_two_j, self.tower)

    @property
    def dim(self) -> int:
        return sum((n + 1) ** 2 for n in self.two_j_values())


def block_labels(two_j: int) -> List[BasisLabel]:
    return [BasisLabel(two_j, two_k, two_m)
            for two_k in range(-two_j, two_j + 1, 2)
            for two_m in range(-two_j, two_j + 1, 2)]


def enumerate_basis(space: SpaceSpec) -> List[BasisLabel]:
    labels = []
    for two_j in space.two_j_values():
        labels.extend(block_labels(two_j))
    return labels


@lru_cache(maxsize=None)
def block_offsets(space: SpaceSpec) -> Dict[int, int]:
    offsets = {}
    position = 0
    for two_j in space.two_j_values():
        offsets[two_j] = position
        position += (two_j + 1) ** 2
    return offsets


def local_index(label: BasisLabel) -> int:
    return ((label.two_k + label.two_j) // 2) * (label.two_j + 1) + (label.two_m + label.two_j) // 2


def label_index(space: SpaceSpec, label: BasisLabel) -> int:
    if not space.contains(label):
        raise InvalidLabelError(ERROR_MESSAGES["label_outside_space"].format(label=label, space=space))
    return block_offsets(space)[label.two_j] + local_index(label)


@dataclass(frozen=True)
class TruncatedState:
    space: SpaceSpec
    coeffs: Mapping[BasisLabel, complex] = field(default_factory=dict)
    dropped_weight: float = 0.0

    def __post_init__(self):
        for label in self.coeffs:
            if not self.space.contains(label):
                raise InvalidLabelError(
                    ERROR_MESSAGES["label_outside_space"].format(label=label, space=self.space))

    def norm_squared(self) -> float:
        return float(sum(abs(value) ** 2 for value in self.coeffs.values()))

    def amplitude(self, label: BasisLabel) -> complex:
        return complex(self.coeffs.get(label, 0.0))

    def to_vector(self) -> np.ndarray:
        vector = np.zeros(self.space.dim, dtype=complex)
        for label, value in self.coeffs.items():
            vector[label_index(self.space, label)] = value
        return vector

    @classmethod
    def from_vector(cls, space: SpaceSpec, vector: np.ndarray, dropped_weight: float = 0.0) -> "TruncatedState":
        labels = enumerate_basis(space)
        if len(vector) != len(labels):
            raise SpaceMismatchError(f"Vector of length {len(vector)} does not match dimension {len(labels)}")
        coeffs = {label: complex(value) for label, value in zip(labels, vector) if value != 0}
        return cls(space, coeffs, dropped_weight)

    @classmethod
    def basis_state(cls, space: SpaceSpec, label: BasisLabel, amplitude: complex = 1.0) -> "TruncatedState":
        return cls(space, {label: complex(amplitude)})

    def scaled(self, factor: complex) -> "TruncatedState":
        return TruncatedState(self.space, {label: factor * value for label, value in self.coeffs.items()},
                              self.dropped_weight * abs(factor) ** 2)

    def __add__(self, other: "TruncatedState") -> "TruncatedState":
        _check_same_space(self, other)
        coeffs = dict(self.coeffs)
        for label, value in other.coeffs.items():
            coeffs[label] = coeffs.get(label, 0.0) + value
        return TruncatedState(self.space, coeffs, self.dropped_weight + other.dropped_weight)

    def __sub__(self, other: "TruncatedState") -> "TruncatedState":
        return self + other.scaled(-1.0)

    def __mul__(self, factor: complex) -> "TruncatedState":
        return self.scaled(factor)

    __rmul__ = __mul__


def _check_same_space(a: TruncatedState, b: TruncatedState) -> None:
    if a.space != b.space:
        raise SpaceMismatchError(ERROR_MESSAGES["space_mismatch"].format(left=a.space, right=b.space))


def inner_product(a: TruncatedState, b: TruncatedState) -> complex:
    _check_same_space(a, b)
    smaller, larger = (a, b) if len(a.coeffs) <= len(b.coeffs) else (b, a)
    total = 0j
    for label in smaller.coeffs:
        if label in larger.coeffs:
            total += np.conj(a.coeffs[label]) * b.coeffs[label]
    return complex(total)


def random_state(space: SpaceSpec, rng: np.random.Generator, support: Optional[List[BasisLabel]] = None) -> TruncatedState:
    labels = support if support is not None else enumerate_basis(space)
    values = rng.normal(size=len(labels)) + 1j * rng.normal(size=len(labels))
    return TruncatedState(space, dict(zip(labels, values.astype(complex))))
