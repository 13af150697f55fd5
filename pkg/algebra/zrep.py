"""States as polynomials in (zeta, zeta_L, zeta_M) and the angular momentum as exponent arithmetic.

A monomial is keyed by (two_j, p, r) with p = j + m the power of zeta_L and r = j + k the power of
zeta_M; the zeta power j is carried as rho_half^(two_j), rho_half = z_half / sqrt((1+|zeta_L|^2)(1+|zeta_M|^2)).
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np
from scipy.special import comb

from algebra.angular_ops import OperatorKind, OperatorTag, RotorConstants
from config.messages import ERROR_MESSAGES
from states.coherent import CoherentParams
from states.families import SequenceFamily
from utils.errors import DomainError, InvalidLabelError, NegativeExponentError
from utils.hilbert import BasisLabel, SpaceSpec, TruncatedState

logger = logging.getLogger(__name__)

Key = Tuple[int, int, int]

DIFFERENTIAL_TAGS = (OperatorTag.JL_PLUS, OperatorTag.JL_MINUS, OperatorTag.JL_0,
                     OperatorTag.JM_PLUS, OperatorTag.JM_MINUS, OperatorTag.JM_0)


@dataclass(frozen=True)
class MonomialFunction:
    coefficients: Mapping[Key, complex] = field(default_factory=dict)

    def cleaned(self, tol: float = 0.0) -> "MonomialFunction":
        return MonomialFunction({key: value for key, value in self.coefficients.items() if abs(value) > tol})

    def scaled(self, factor: complex) -> "MonomialFunction":
        return MonomialFunction({key: factor * value for key, value in self.coefficients.items()})

    def __add__(self, other: "MonomialFunction") -> "MonomialFunction":
        merged = dict(self.coefficients)
        for key, value in other.coefficients.items():
            merged[key] = merged.get(key, 0j) + value
        return MonomialFunction(merged)

    def __sub__(self, other: "MonomialFunction") -> "MonomialFunction":
        return self + other.scaled(-1.0)

    def max_abs(self) -> float:
        return max((abs(value) for value in self.coefficients.values()), default=0.0)

    def evaluate(self, rho_half: complex, zeta_L: complex, zeta_M: complex) -> complex:
        total = 0j
        for (two_j, p, r), value in self.coefficients.items():
            total += value * rho_half ** two_j * zeta_L ** p * zeta_M ** r
        return complex(total)


def _sigma(two_j: int, power: int) -> float:
    return math.sqrt(comb(two_j, power, exact=True))


def to_zrep(state: TruncatedState, family: SequenceFamily) -> MonomialFunction:
    coefficients: Dict[Key, complex] = {}
    for label, amplitude in state.coeffs.items():
        if amplitude == 0:
            continue
        c_bar = np.conj(family.c(label.two_j))
        if c_bar == 0:
            raise DomainError(ERROR_MESSAGES["vanishing_coefficient"].format(family=family.name, two_j=label.two_j))
        p = (label.two_j + label.two_m) // 2
        r = (label.two_j + label.two_k) // 2
        coefficients[(label.two_j, p, r)] = complex(
            amplitude * c_bar * _sigma(label.two_j, p) * _sigma(label.two_j, r))
    return MonomialFunction(coefficients)


def from_zrep(g: MonomialFunction, family: SequenceFamily, space: SpaceSpec) -> TruncatedState:
    coeffs: Dict[BasisLabel, complex] = {}
    for (two_j, p, r), value in g.coefficients.items():
        if value == 0:
            continue
        try:
            label = BasisLabel(two_j, 2 * r - two_j, 2 * p - two_j)
        except InvalidLabelError as e:
            raise DomainError(f"Monomial {(two_j, p, r)} lies outside the physical subspace") from e
        coeffs[label] = complex(value / (np.conj(family.c(two_j)) * _sigma(two_j, p) * _sigma(two_j, r)))
    return TruncatedState(space, coeffs)


def rho_half(params: CoherentParams) -> complex:
    scale = math.sqrt((1.0 + abs(params.zeta_L) ** 2) * (1.0 + abs(params.zeta_M) ** 2))
    return complex(params.z_half / scale)


def evaluate(g: MonomialFunction, params: CoherentParams) -> complex:
    return g.evaluate(rho_half(params), params.zeta_L, params.zeta_M)


def _image(tag: OperatorTag, key: Key) -> Tuple[Key, float]:
    two_j, p, r = key
    if tag is OperatorTag.JL_0:
        return key, p - two_j / 2
    if tag is OperatorTag.JL_PLUS:
        return (two_j, p + 1, r), float(two_j - p)
    if tag is OperatorTag.JL_MINUS:
        return (two_j, p - 1, r), float(p)
    if tag is OperatorTag.JM_0:
        return key, r - two_j / 2
    if tag is OperatorTag.JM_MINUS:
        return (two_j, p, r + 1), float(two_j - r)
    if tag is OperatorTag.JM_PLUS:
        return (two_j, p, r - 1), float(r)
    raise InvalidLabelError(f"{tag.value} has no differential form")


def apply_diff(op: OperatorKind, g: MonomialFunction) -> MonomialFunction:
    """First-order differential action as exponent arithmetic; independent of the family."""
    if op.tag not in DIFFERENTIAL_TAGS:
        raise InvalidLabelError(f"{op} has no differential form")
    result: Dict[Key, complex] = {}
    for key, value in g.coefficients.items():
        if value == 0:
            continue
        if min(key) < 0:
            raise NegativeExponentError(ERROR_MESSAGES["negative_exponent"].format(op=op, key=key))
        image, factor = _image(op.tag, key)
        if factor == 0.0:
            continue
        if min(image) < 0:
            raise NegativeExponentError(ERROR_MESSAGES["negative_exponent"].format(op=op, key=image))
        result[image] = result.get(image, 0j) + factor * value
    return MonomialFunction(result)


def _molecular_cartesian(g: MonomialFunction) -> Tuple[MonomialFunction, MonomialFunction, MonomialFunction]:
    plus = apply_diff(OperatorKind(OperatorTag.JM_PLUS), g)
    minus = apply_diff(OperatorKind(OperatorTag.JM_MINUS), g)
    return (plus + minus).scaled(0.5), (plus - minus).scaled(-0.5j), apply_diff(OperatorKind(OperatorTag.JM_0), g)


def apply_rotor_diff(constants: RotorConstants, g: MonomialFunction) -> MonomialFunction:
    """A1 (J^M_1)^2 + A2 (J^M_2)^2 + A0 (J^M_0)^2 composed from the molecular differential operators."""
    first, second, third = _molecular_cartesian(g)
    result = _molecular_cartesian(first)[0].scaled(constants.A1)
    result = result + _molecular_cartesian(second)[1].scaled(constants.A2)
    return result + _molecular_cartesian(third)[2].scaled(constants.A0)
