import math
import logging
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, NamedTuple, Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from config.constants import QUADRATURE, TRUNCATION, UNBOUNDED
from config.messages import ERROR_MESSAGES
from utils.errors import ConvergenceError, DomainError, InvalidLabelError, MissingMeasureError
from utils.hilbert import Tower
from utils.series import SeriesResult, sum_power_series

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Measure:
    """Radial weight in x = |z|^2 whose Mellin moments should be (2j+1)^2/|c_j|^2."""

    f: Callable[[float], float]
    moment_target: Callable[[int], float]
    support: float = UNBOUNDED

    def moment(self, two_j: int) -> float:
        # x = t^2 keeps the sqrt(x) kinks of the tabulated measures smooth
        exponent = two_j + 1

        def integrand(t: float) -> float:
            return 2.0 * t ** exponent * self.f(t * t)

        upper = math.sqrt(self.support) if math.isfinite(self.support) else np.inf
        result = quad(integrand, 0.0, upper, limit=QUADRATURE["quad_limit"],
                      epsabs=QUADRATURE["quad_epsabs"], epsrel=QUADRATURE["quad_epsrel"], full_output=1)
        value = float(result[0])
        if len(result) > 3:
            message = str(result[3])
            if not math.isfinite(value) or "diverg" in message.lower():
                raise ConvergenceError(f"Mellin moment at two_j={two_j} diverges: {message}")
            logger.debug(f"quad reported '{message}' at two_j={two_j}")
        return value


@dataclass(frozen=True)
class SequenceFamily:
    name: str
    tower: Tower
    log_magnitude: ArrayFn
    domain_radius: float = UNBOUNDED
    closed_N: Optional[Callable[[float], float]] = None
    closed_f: Optional[Callable[[float], float]] = None
    measure_support: float = UNBOUNDED
    phase: Optional[ArrayFn] = None
    max_two_j: Optional[int] = None
    family_id: Optional[int] = None
    check_ground: bool = True

    def __post_init__(self):
        if self.check_ground and self.c(0) == 0:
            raise InvalidLabelError(f"Family '{self.name}' must have c_0 != 0")

    @property
    def step(self) -> int:
        return self.tower.step

    def _log_weights(self, two_j: np.ndarray) -> np.ndarray:
        two_j = np.asarray(two_j)
        with np.errstate(divide="ignore"):
            logs = 2.0 * np.asarray(self.log_magnitude(two_j), dtype=float)
        logs = np.where(two_j % self.step == 0, logs, -np.inf)
        if self.max_two_j is not None:
            logs = np.where(two_j <= self.max_two_j, logs, -np.inf)
        return logs

    def c(self, two_j):
        two_j_array = np.asarray(two_j)
        magnitude = np.exp(0.5 * self._log_weights(two_j_array))
        values = magnitude.astype(complex)
        if self.phase is not None:
            values = values * np.exp(1j * np.asarray(self.phase(two_j_array), dtype=float))
        return complex(values) if np.ndim(values) == 0 else values

    def weights(self, two_j: np.ndarray) -> np.ndarray:
        return np.exp(self._log_weights(two_j))

    def admits(self, x: float) -> bool:
        return 0.0 <= x < self.domain_radius ** 2

    def check_domain(self, x: float) -> None:
        if not self.admits(x):
            raise DomainError(ERROR_MESSAGES["outside_domain"].format(
                x=x, family=self.name, radius=self.domain_radius))

    def measure(self) -> Optional[Measure]:
        if self.closed_f is None:
            return None
        return Measure(self.closed_f, self.moment_target, self.measure_support)

    def moment_target(self, two_j: int) -> float:
        weight = float(self.weights(np.array([two_j]))[0])
        if weight == 0.0:
            return math.inf
        return (two_j + 1) ** 2 / weight

    def with_phase(self, phase: ArrayFn, name: Optional[str] = None) -> "SequenceFamily":
        previous = self.phase

        def combined(two_j: np.ndarray) -> np.ndarray:
            base = previous(two_j) if previous is not None else 0.0
            return base + phase(two_j)

        return replace(self, name=name or f"{self.name}*phase", phase=combined)

    def __str__(self) -> str:
        return self.name


def _power_terms(family: SequenceFamily, x: float, factor: Optional[ArrayFn] = None) -> ArrayFn:
    log_x = math.log(x) if x > 0 else -math.inf

    def terms(two_j: np.ndarray) -> np.ndarray:
        logs = family._log_weights(two_j)
        with np.errstate(invalid="ignore"):
            powers = np.where(two_j == 0, 0.0, 0.5 * two_j * log_x)
        values = np.exp(logs + powers)
        if factor is not None:
            values = values * factor(two_j)
        return values

    return terms


def _series(family: SequenceFamily, x: float, tol: float, factor: Optional[ArrayFn] = None) -> SeriesResult:
    family.check_domain(x)
    return sum_power_series(_power_terms(family, x, factor), family.step, tol,
                            max_two_j=family.max_two_j, label=family.name, x=x)


def norm_series(family: SequenceFamily, x: float, tol: float = TRUNCATION["tail_tolerance"]) -> SeriesResult:
    result = _series(family, x, tol)
    return replace(result, value=result.value.real)


class EulerMoments(NamedTuple):
    N: float
    x_dN: float
    x2_d2N: float


class NormDerivatives(NamedTuple):
    N: float
    dN: float
    d2N: float


def euler_moments(family: SequenceFamily, x: float, tol: float = TRUNCATION["tail_tolerance"]) -> EulerMoments:
    """N, x N'(x) and x^2 N''(x); finite at x = 0 for every tower."""
    value = _series(family, x, tol).value.real
    first = _series(family, x, tol, factor=lambda two_j: two_j / 2).value.real
    second = _series(family, x, tol, factor=lambda two_j: (two_j / 2) * (two_j / 2 - 1)).value.real
    return EulerMoments(value, first, second)


def _derivative_at_origin(family: SequenceFamily, order: int) -> float:
    if family.tower is Tower.INTEGER:
        weight = float(family.weights(np.array([2 * order]))[0])
        return math.factorial(order) * weight
    low = [two_j for two_j in (1, 3) if two_j < 2 * order and family.weights(np.array([two_j]))[0] > 0]
    if not low:
        weight = float(family.weights(np.array([2 * order]))[0])
        return math.factorial(order) * weight
    two_j = low[0]
    j = two_j / 2
    sign = math.copysign(1.0, j if order == 1 else j * (j - 1))
    warnings.warn(f"Derivative of order {order} of N for '{family.name}' diverges at x = 0", RuntimeWarning)
    logger.warning(f"N^({order})(0) diverges for family '{family.name}' (c at two_j={two_j} nonzero)")
    return sign * math.inf


def norm_derivatives(family: SequenceFamily, x: float, tol: float = TRUNCATION["tail_tolerance"]) -> NormDerivatives:
    if x == 0.0:
        family.check_domain(x)
        return NormDerivatives(float(family.weights(np.array([0]))[0]),
                               _derivative_at_origin(family, 1), _derivative_at_origin(family, 2))
    moments = euler_moments(family, x, tol)
    return NormDerivatives(moments.N, moments.x_dN / x, moments.x2_d2N / x ** 2)


def mellin_moment_check(family: SequenceFamily, measure: Optional[Measure] = None,
                        two_j_list: Optional[Iterable[int]] = None) -> float:
    measure = measure or family.measure()
    if measure is None:
        raise MissingMeasureError(ERROR_MESSAGES["missing_measure"].format(family=family.name))
    two_j_list = list(two_j_list) if two_j_list is not None else list(range(0, 9, family.step))
    worst = 0.0
    for two_j in two_j_list:
        target = measure.moment_target(two_j)
        value = measure.moment(two_j)
        defect = abs(value - target) / abs(target)
        logger.debug(f"Mellin moment {family.name} two_j={two_j}: {value:.12g} vs {target:.12g}")
        worst = max(worst, defect)
    return worst


def _theta(x: float) -> float:
    return 1.0 if x < 1.0 else 0.0


def _half_log_factorial(two_j: np.ndarray) -> np.ndarray:
    return 0.5 * gammaln(np.asarray(two_j, dtype=float) + 1.0)


def _integer_half_log_factorial(two_j: np.ndarray) -> np.ndarray:
    return 0.5 * gammaln(np.asarray(two_j, dtype=float) / 2 + 1.0)


def _family_3_magnitude(two_j: np.ndarray) -> np.ndarray:
    two_j = np.asarray(two_j, dtype=float)
    return np.log(two_j + 1.0) + 0.5 * np.log(two_j / 2 + 1.0)


def _family_4_magnitude(two_j: np.ndarray) -> np.ndarray:
    return 1.5 * np.log(np.asarray(two_j, dtype=float) + 1.0)


def _build_family(family_id: int) -> SequenceFamily:
    if family_id == 1:
        return SequenceFamily(
            "family-1", Tower.HALF_INTEGER, lambda n: -_half_log_factorial(n),
            closed_N=lambda x: math.exp(math.sqrt(x)),
            closed_f=lambda x: 0.5 * (math.sqrt(x) - 1.0) * math.exp(-math.sqrt(x)),
            family_id=1)
    if family_id == 2:
        return SequenceFamily(
            "family-2", Tower.HALF_INTEGER,
            lambda n: 0.5 * np.log((np.asarray(n, dtype=float) + 1.0) / 2) - _half_log_factorial(n),
            closed_N=lambda x: 0.5 * (1.0 + math.sqrt(x)) * math.exp(math.sqrt(x)),
            closed_f=lambda x: math.exp(-math.sqrt(x)),
            family_id=2)
    if family_id == 3:
        return SequenceFamily(
            "family-3", Tower.HALF_INTEGER, _family_3_magnitude, domain_radius=1.0,
            closed_N=lambda x: (1.0 + 2.0 * math.sqrt(x)) / (1.0 - math.sqrt(x)) ** 4,
            closed_f=_theta, measure_support=1.0, family_id=3)
    if family_id == 4:
        return SequenceFamily(
            "family-4", Tower.HALF_INTEGER, _family_4_magnitude, domain_radius=1.0,
            closed_N=lambda x: (x + 4.0 * math.sqrt(x) + 1.0) / (1.0 - math.sqrt(x)) ** 4,
            closed_f=lambda x: _theta(x) / (2.0 * math.sqrt(x)), measure_support=1.0, family_id=4)
    if family_id == 5:
        return SequenceFamily(
            "family-5", Tower.INTEGER, lambda n: -_integer_half_log_factorial(n),
            closed_N=math.exp,
            closed_f=lambda x: (4.0 * x * x - 8.0 * x + 1.0) * math.exp(-x),
            family_id=5)
    if family_id == 6:
        return SequenceFamily(
            "family-6", Tower.INTEGER,
            lambda n: np.log(np.asarray(n, dtype=float) + 1.0) - _integer_half_log_factorial(n),
            closed_N=lambda x: (4.0 * x * x + 8.0 * x + 1.0) * math.exp(x),
            closed_f=lambda x: math.exp(-x),
            family_id=6)
    if family_id == 7:
        return SequenceFamily(
            "family-7", Tower.INTEGER, _family_3_magnitude, domain_radius=1.0,
            closed_N=lambda x: (9.0 * x * x + 14.0 * x + 1.0) / (1.0 - x) ** 4,
            closed_f=_theta, measure_support=1.0, family_id=7)
    if family_id == 8:
        return SequenceFamily(
            "family-8", Tower.INTEGER, _family_4_magnitude, domain_radius=1.0,
            closed_N=lambda x: (1.0 + x) * (x * x + 22.0 * x + 1.0) / (1.0 - x) ** 4,
            closed_f=lambda x: _theta(x) / (2.0 * math.sqrt(x)), measure_support=1.0, family_id=8)
    raise InvalidLabelError(ERROR_MESSAGES["unknown_family"].format(family_id=family_id))


_BUILTIN_CACHE: Dict[int, SequenceFamily] = {}


def builtin_family(family_id: int) -> SequenceFamily:
    if family_id not in _BUILTIN_CACHE:
        _BUILTIN_CACHE[family_id] = _build_family(family_id)
    return _BUILTIN_CACHE[family_id]


def tabulated_family(name: str, tower: Tower, rows: Dict[int, complex],
                     domain_radius: float = UNBOUNDED, check_ground: bool = True) -> SequenceFamily:
    """Finite family read from (two_j, c_j) rows; missing rows are zero."""
    magnitudes = {two_j: abs(value) for two_j, value in rows.items()}
    phases = {two_j: float(np.angle(value)) for two_j, value in rows.items()}

    def log_magnitude(two_j: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(two_j)
        with np.errstate(divide="ignore"):
            values = np.log(np.array([magnitudes.get(int(n), 0.0) for n in flat], dtype=float))
        return values.reshape(np.shape(two_j))

    def phase(two_j: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(two_j)
        return np.array([phases.get(int(n), 0.0) for n in flat]).reshape(np.shape(two_j))

    return SequenceFamily(name, tower, log_magnitude, domain_radius=domain_radius, phase=phase,
                          max_two_j=max(rows) if rows else 0, check_ground=check_ground)


def monomial_family(two_l: int) -> SequenceFamily:
    """c_j = delta_{j,l}: minimizes every uncertainty pair but admits no measure."""
    tower = Tower.HALF_INTEGER if two_l % 2 else Tower.INTEGER
    return tabulated_family(f"monomial-{two_l}/2", tower, {two_l: 1.0}, check_ground=False)


def circle_family(radius: float, two_j_max: Optional[int] = None) -> SequenceFamily:
    """Sequence forced by a measure concentrated on |z| = radius: |c_j|^2 = (2j+1)^2 radius^(-2j)."""
    log_radius = math.log(radius)
    return SequenceFamily(
        f"circle-{radius}", Tower.HALF_INTEGER,
        lambda n: np.log(np.asarray(n, dtype=float) + 1.0) - 0.5 * np.asarray(n, dtype=float) * log_radius,
        domain_radius=UNBOUNDED, max_two_j=two_j_max)
