import cmath
import math
import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
from scipy.special import gammaln, roots_legendre

from config.messages import ERROR_MESSAGES
from utils.errors import DomainError
from utils.hilbert import BasisLabel

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EulerAngles:
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha < TWO_PI:
            raise DomainError(ERROR_MESSAGES["angle_out_of_range"].format(name="alpha", value=self.alpha))
        if not 0.0 <= self.beta <= math.pi:
            raise DomainError(ERROR_MESSAGES["beta_out_of_range"].format(beta=self.beta))
        if not -math.pi <= self.gamma < math.pi:
            raise DomainError(ERROR_MESSAGES["angle_out_of_range"].format(name="gamma", value=self.gamma))

    def cayley_klein(self) -> Tuple[complex, complex]:
        half = self.beta / 2
        u = cmath.exp(-0.5j * (self.alpha + self.gamma)) * math.cos(half)
        v = cmath.exp(0.5j * (self.alpha - self.gamma)) * math.sin(half)
        return u, v

    @classmethod
    def from_cayley_klein(cls, u: complex, v: complex) -> Tuple["EulerAngles", int]:
        """Euler angles of the SU(2) element (u, v) plus the sign s with su2(angles) = s * (u, v)."""
        beta = 2.0 * math.atan2(abs(v), abs(u))
        total = -2.0 * cmath.phase(u) if abs(u) > 1e-14 else 0.0
        difference = 2.0 * cmath.phase(v) if abs(v) > 1e-14 else 0.0
        alpha = ((total + difference) / 2) % TWO_PI
        gamma = ((total - difference) / 2 + math.pi) % TWO_PI - math.pi
        angles = cls(alpha, min(max(beta, 0.0), math.pi), gamma)
        u_back, v_back = angles.cayley_klein()
        sign = 1 if abs(u_back - u) + abs(v_back - v) < 1e-8 else -1
        return angles, sign


def compose(first: EulerAngles, second: EulerAngles) -> EulerAngles:
    """Euler angles of R(first) R(second); the SU(2) sign is dropped."""
    u1, v1 = first.cayley_klein()
    u2, v2 = second.cayley_klein()
    u = u1 * u2 - np.conj(v1) * v2
    v = np.conj(u1) * v2 + v1 * u2
    angles, _ = EulerAngles.from_cayley_klein(complex(u), complex(v))
    return angles


@dataclass(frozen=True)
class WignerBlock:
    two_j: int
    entries: np.ndarray

    def unitarity_defect(self) -> float:
        size = self.two_j + 1
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - np.eye(size))))

    def __matmul__(self, other: "WignerBlock") -> "WignerBlock":
        return WignerBlock(self.two_j, self.entries @ other.entries)


def _log_factorial(n) -> np.ndarray:
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def little_d(two_j: int, beta: float) -> WignerBlock:
    """Real d^j(beta), rows indexed by m and columns by m', both ascending.

    Evaluated in half-angle cos/sin monomials so beta = pi needs no limit.
    """
    if not 0.0 <= beta <= math.pi:
        raise DomainError(ERROR_MESSAGES["beta_out_of_range"].format(beta=beta))
    cos_half, sin_half = math.cos(beta / 2), math.sin(beta / 2)
    size = two_j + 1
    entries = np.zeros((size, size))
    for row in range(size):
        jpm = row
        jmm = two_j - row
        for col in range(size):
            jpmp = col
            jmmp = two_j - col
            prefactor = 0.5 * (_log_factorial(jpm) + _log_factorial(jmm)
                               + _log_factorial(jpmp) + _log_factorial(jmmp))
            diff = jpm - jpmp
            total = 0.0
            for s in range(max(0, -diff), min(jpmp, jmm) + 1):
                log_den = (_log_factorial(jpmp - s) + _log_factorial(s)
                           + _log_factorial(diff + s) + _log_factorial(jmm - s))
                sign = -1.0 if (diff + s) % 2 else 1.0
                total += (sign * math.exp(prefactor - log_den)
                          * cos_half ** (two_j - diff - 2 * s) * sin_half ** (diff + 2 * s))
            entries[row, col] = total
    return WignerBlock(two_j, entries)


def _phases(two_j: int, angle: float) -> np.ndarray:
    two_m = np.arange(-two_j, two_j + 1, 2)
    return np.exp(-0.5j * angle * two_m)


def big_R(two_j: int, angles: EulerAngles) -> WignerBlock:
    d = little_d(two_j, angles.beta).entries
    entries = _phases(two_j, angles.alpha)[:, None] * d * _phases(two_j, angles.gamma)[None, :]
    return WignerBlock(two_j, entries)


def su2_block(two_j: int, u: complex, v: complex) -> np.ndarray:
    """Spin-j block of the SU(2) element whose spin-1/2 block is [[conj(u), v], [-conj(v), u]]."""
    size = two_j + 1
    entries = np.zeros((size, size), dtype=complex)
    u_bar, minus_v_bar = np.conj(u), -np.conj(v)
    for row in range(size):
        jpm, jmm = row, two_j - row
        for col in range(size):
            jpmp, jmmp = col, two_j - col
            log_norm = 0.5 * (_log_factorial(jpm) + _log_factorial(jmm)
                              + _log_factorial(jpmp) + _log_factorial(jmmp))
            total = 0j
            for p in range(max(0, jpm - jmmp), min(jpmp, jpm) + 1):
                q = jpm - p
                weight = math.exp(log_norm - _log_factorial(p) - _log_factorial(jpmp - p)
                                  - _log_factorial(q) - _log_factorial(jmmp - q))
                total += weight * u ** p * v ** (jpmp - p) * minus_v_bar ** q * u_bar ** (jmmp - q)
            entries[row, col] = total
    return entries


def displacement_block(two_j: int, zeta: complex) -> np.ndarray:
    """Block of D(zeta) = R(alpha, beta, -alpha) with zeta = -tan(beta/2) exp(-i alpha).

    Column 0 carries the normalized coherent column sigma_m zeta^(j+m) (1+|zeta|^2)^(-j).
    """
    scale = 1.0 / math.sqrt(1.0 + abs(zeta) ** 2)
    return su2_block(two_j, scale, -np.conj(zeta) * scale)


def zeta_to_angles(zeta: complex) -> EulerAngles:
    beta = 2.0 * math.atan(abs(zeta))
    alpha = cmath.phase(-np.conj(zeta)) % TWO_PI if zeta != 0 else 0.0
    gamma = (-alpha + math.pi) % TWO_PI - math.pi
    return EulerAngles(alpha, beta, gamma)


def direction(zeta: complex) -> np.ndarray:
    """Unit vector rotated onto by D(zeta), as (x, y, z) components."""
    denominator = 1.0 + abs(zeta) ** 2
    transverse = -2.0 * np.conj(zeta) / denominator
    return np.array([transverse.real, transverse.imag, (1.0 - abs(zeta) ** 2) / denominator])


class Wavefunction(NamedTuple):
    value: complex
    single_valued: bool


def wavefunction(label: BasisLabel, angles: EulerAngles) -> Wavefunction:
    d = little_d(label.two_j, angles.beta).entries
    row = (label.two_m + label.two_j) // 2
    col = (label.two_k + label.two_j) // 2
    value = (math.sqrt(label.two_j + 1) * cmath.exp(0.5j * label.two_m * angles.alpha)
             * cmath.exp(0.5j * label.two_k * angles.gamma) * d[row, col])
    single_valued = label.two_j % 2 == 0
    if not single_valued:
        logger.debug(f"Wavefunction of {label} is double-valued under 2*pi shifts")
    return Wavefunction(complex(value), single_valued)


def wavefunction_overlap(bra: BasisLabel, ket: BasisLabel, nodes: int) -> complex:
    """Quadrature of conj(psi_bra) psi_ket over the rotation group, normalized by 8 pi^2."""
    cos_nodes, cos_weights = roots_legendre(nodes)
    phase_nodes = 2 * nodes + 2
    angles = TWO_PI * np.arange(phase_nodes) / phase_nodes
    total = 0j
    for cos_beta, weight in zip(cos_nodes, cos_weights):
        beta = math.acos(cos_beta)
        d_bra = little_d(bra.two_j, beta).entries[(bra.two_m + bra.two_j) // 2, (bra.two_k + bra.two_j) // 2]
        d_ket = little_d(ket.two_j, beta).entries[(ket.two_m + ket.two_j) // 2, (ket.two_k + ket.two_j) // 2]
        total += weight * d_bra * d_ket
    alpha_average = np.mean(np.exp(0.5j * (ket.two_m - bra.two_m) * angles))
    gamma_average = np.mean(np.exp(0.5j * (ket.two_k - bra.two_k) * angles))
    return complex(math.sqrt((bra.two_j + 1) * (ket.two_j + 1)) * total / 2 * alpha_average * gamma_average)
