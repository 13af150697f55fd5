import cmath
import math
import logging
from enum import Enum
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sparse
from scipy.special import comb

from algebra.angular_ops import (CASIMIR, JL_0, JL_MINUS, JL_PLUS, JM_0, JM_MINUS, JM_PLUS, LAMBDA,
                                 truncated_matrix)
from config.constants import TOLERANCES, TRUNCATION
from config.messages import ERROR_MESSAGES
from states.families import SequenceFamily, norm_series
from utils.errors import DomainError, MobiusPoleError, TowerMismatchError
from utils.hilbert import BasisLabel, SpaceSpec, Tower, TruncatedState, block_labels
from utils.series import sum_power_series
from utils.wigner import EulerAngles, direction, displacement_block, su2_block

logger = logging.getLogger(__name__)


class Frame(Enum):
    LAB = "lab"
    MOL = "mol"


@dataclass(frozen=True)
class CoherentParams:
    """Z = (z, zeta_L, zeta_M) for one family.

    z_half fixes the branch of z^j on half-integer blocks; it defaults to the principal root.
    """

    family: SequenceFamily
    z: complex
    zeta_L: complex = 0j
    zeta_M: complex = 0j
    z_half: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "zeta_L", complex(self.zeta_L))
        object.__setattr__(self, "zeta_M", complex(self.zeta_M))
        if self.z_half is None:
            object.__setattr__(self, "z_half", cmath.sqrt(self.z))
        else:
            object.__setattr__(self, "z_half", complex(self.z_half))
            if abs(self.z_half ** 2 - self.z) > 1e-12 * max(1.0, abs(self.z)):
                raise DomainError(f"z_half^2 = {self.z_half ** 2} does not match z = {self.z}")
        self.family.check_domain(abs(self.z) ** 2)

    @property
    def x(self) -> float:
        return abs(self.z) ** 2

    def zeta(self, frame: Frame) -> complex:
        return self.zeta_L if frame is Frame.LAB else self.zeta_M

    def evolved(self, zeta_L: complex, zeta_M: complex, sigma: float) -> "CoherentParams":
        z_half = self.z_half * cmath.exp(-0.5j * sigma)
        return replace(self, z=z_half ** 2, zeta_L=zeta_L, zeta_M=zeta_M, z_half=z_half)


@dataclass(frozen=True)
class RotationParams:
    u: complex
    v: complex

    def __post_init__(self):
        if abs(abs(self.u) ** 2 + abs(self.v) ** 2 - 1.0) > 1e-12:
            raise DomainError(f"Cayley-Klein pair ({self.u}, {self.v}) is not unimodular")

    @classmethod
    def from_euler(cls, angles: EulerAngles) -> "RotationParams":
        return cls(*angles.cayley_klein())

    @classmethod
    def identity(cls) -> "RotationParams":
        return cls(1.0 + 0j, 0j)

    def compose(self, other: "RotationParams") -> "RotationParams":
        """Rotation acting as self after other."""
        return RotationParams(self.u * other.u - np.conj(self.v) * other.v,
                              np.conj(self.u) * other.v + self.v * other.u)

    def block(self, two_j: int) -> np.ndarray:
        return su2_block(two_j, self.u, self.v)

    def mobius(self, zeta: complex) -> Tuple[complex, complex]:
        """Image of zeta and the multiplier mu = conj(u) + v zeta."""
        mu = np.conj(self.u) + self.v * zeta
        if abs(mu) < 1e-14:
            raise MobiusPoleError(ERROR_MESSAGES["mobius_pole"].format(zeta=zeta))
        return complex((self.u * zeta - np.conj(self.v)) / mu), complex(mu)


def default_space(family: SequenceFamily, x: float, tol: float = TRUNCATION["state_tail_tolerance"]) -> SpaceSpec:
    """Smallest tower truncation whose dropped weight is below tol relative to N, within the caps."""
    cap = TRUNCATION["two_j_cap_unbounded"] if math.isinf(family.domain_radius) else TRUNCATION["two_j_cap_disc"]
    result = norm_series(family, x)
    grid = np.arange(0, result.last_two_j + 1, family.step)
    log_x = math.log(x) if x > 0 else -math.inf
    with np.errstate(invalid="ignore"):
        terms = np.exp(family._log_weights(grid) + np.where(grid == 0, 0.0, 0.5 * grid * log_x))
    tails = np.cumsum(terms[::-1])[::-1] - terms + result.tail_bound
    inside = np.nonzero(tails <= tol * result.value)[0]
    two_j_max = int(grid[inside[0]]) if inside.size else result.last_two_j
    if two_j_max > cap:
        logger.warning(f"Family '{family.name}' at x={x} needs two_j_max={two_j_max}; capped at {cap}")
        two_j_max = cap
    if family.tower is Tower.INTEGER and two_j_max % 2:
        two_j_max += 1
    return SpaceSpec(two_j_max, family.tower)


def _check_tower(family: SequenceFamily, space: SpaceSpec) -> None:
    if family.tower is Tower.HALF_INTEGER and space.tower is Tower.INTEGER:
        raise TowerMismatchError(f"Family '{family.name}' needs the half-integer tower")


def _report_truncation(family: SequenceFamily, x: float, kept: float, space: SpaceSpec) -> float:
    total = norm_series(family, x).value
    dropped = max(total - kept, 0.0)
    if dropped > TRUNCATION["dropped_weight_warning"] * total:
        logger.warning(f"Truncation at two_j_max={space.two_j_max} drops weight {dropped:.3e} "
                       f"of {total:.6g} for family '{family.name}'")
    return dropped


def mfs(family: SequenceFamily, z: complex, space: SpaceSpec, z_half: Optional[complex] = None) -> TruncatedState:
    params = CoherentParams(family, z, z_half=z_half)
    _check_tower(family, space)
    coeffs = {}
    for two_j in space.two_j_values():
        amplitude = family.c(two_j) * params.z_half ** two_j
        if amplitude != 0:
            coeffs[BasisLabel(two_j, -two_j, -two_j)] = complex(amplitude)
    kept = sum(abs(value) ** 2 for value in coeffs.values())
    return TruncatedState(space, coeffs, _report_truncation(family, params.x, kept, space))


def coherent_column(two_j: int, zeta: complex) -> np.ndarray:
    """sigma_m zeta^(j+m) (1+|zeta|^2)^(-j) over ascending m."""
    powers = np.arange(two_j + 1)
    sigma = np.sqrt(comb(two_j, powers))
    return sigma * np.power(complex(zeta), powers) * (1.0 + abs(zeta) ** 2) ** (-two_j / 2)


def mcs(params: CoherentParams, space: SpaceSpec) -> TruncatedState:
    family = params.family
    _check_tower(family, space)
    coeffs = {}
    kept = 0.0
    for two_j in space.two_j_values():
        amplitude = family.c(two_j) * params.z_half ** two_j
        if amplitude == 0:
            continue
        kept += abs(amplitude) ** 2
        block = amplitude * np.kron(coherent_column(two_j, params.zeta_M), coherent_column(two_j, params.zeta_L))
        for label, value in zip(block_labels(two_j), block):
            if value != 0:
                coeffs[label] = complex(value)
    return TruncatedState(space, coeffs, _report_truncation(family, params.x, kept, space))


def analytic_norm(family: SequenceFamily, w_half: complex, tol: float = TRUNCATION["tail_tolerance"]) -> complex:
    """Sum of |c_j|^2 w^j with w^j = w_half^(2j)."""
    family.check_domain(abs(w_half) ** 2)
    log_modulus = math.log(abs(w_half)) if w_half != 0 else -math.inf
    angle = cmath.phase(w_half) if w_half != 0 else 0.0

    def terms(two_j: np.ndarray) -> np.ndarray:
        logs = family._log_weights(two_j)
        with np.errstate(invalid="ignore"):
            powers = np.where(two_j == 0, 0.0, two_j * log_modulus)
        return np.exp(logs + powers) * np.exp(1j * angle * two_j)

    return sum_power_series(terms, family.step, tol, max_two_j=family.max_two_j,
                            label=family.name, x=abs(w_half) ** 2).value


def overlap_argument(p: CoherentParams, p2: CoherentParams) -> complex:
    """Half-power argument w_half of N in <Z'|Z> = N(w_half^2), with p2 the bra."""
    geometry = (1.0 + np.conj(p2.zeta_L) * p.zeta_L) * (1.0 + np.conj(p2.zeta_M) * p.zeta_M)
    scale = math.sqrt((1.0 + abs(p.zeta_L) ** 2) * (1.0 + abs(p2.zeta_L) ** 2)
                      * (1.0 + abs(p.zeta_M) ** 2) * (1.0 + abs(p2.zeta_M) ** 2))
    return complex(np.conj(p2.z_half) * p.z_half * geometry / scale)


def overlap_closed(p: CoherentParams, p2: CoherentParams) -> complex:
    if p.family.name != p2.family.name:
        raise DomainError(f"Overlap needs one family, got '{p.family.name}' and '{p2.family.name}'")
    return analytic_norm(p.family, overlap_argument(p, p2))


def rotate_params(p: CoherentParams, which: Frame, r: RotationParams) -> Tuple[CoherentParams, complex]:
    """Rotated parameters plus the unit multiplier already absorbed into z."""
    zeta, mu = r.mobius(p.zeta(which))
    phase = mu / abs(mu)
    z_half = p.z_half * phase
    if which is Frame.LAB:
        rotated = replace(p, z=z_half ** 2, zeta_L=zeta, z_half=z_half)
    else:
        rotated = replace(p, z=z_half ** 2, zeta_M=zeta, z_half=z_half)
    return rotated, phase


def rotate_state(state: TruncatedState, which: Frame, r: RotationParams) -> TruncatedState:
    blocks = []
    for two_j in state.space.two_j_values():
        identity = np.eye(two_j + 1)
        rotation = r.block(two_j)
        blocks.append(np.kron(identity, rotation) if which is Frame.LAB else np.kron(rotation, identity))
    matrix = sparse.block_diag(blocks, format="csr")
    return TruncatedState.from_vector(state.space, matrix @ state.to_vector(), state.dropped_weight)


def displacement_unitary(space: SpaceSpec, zeta_L: complex, zeta_M: complex) -> sparse.csr_matrix:
    blocks = [np.kron(displacement_block(two_j, zeta_M), displacement_block(two_j, zeta_L))
              for two_j in space.two_j_values()]
    return sparse.block_diag(blocks, format="csr")


def direction_vectors(params: CoherentParams) -> Tuple[np.ndarray, np.ndarray]:
    """Unit vectors n^L(zeta_L) and n^M(zeta_M) along which <J^L> and <J^M> point."""
    lab = direction(params.zeta_L)
    molecular = direction(params.zeta_M) * np.array([1.0, -1.0, 1.0])
    return lab, molecular


def cartesian(plus: sparse.spmatrix, minus: sparse.spmatrix, zero: sparse.spmatrix):
    return (plus + minus) / 2, (plus - minus) / 2j, zero


def identity_residuals(params: CoherentParams, space: SpaceSpec) -> Dict[str, float]:
    """Relative residuals of the operator identities that annihilate |Z> and |z>."""
    vector = mcs(params, space).to_vector()
    ground = mfs(params.family, params.z, space, z_half=params.z_half).to_vector()
    norm = np.linalg.norm(vector)
    ops = {kind.tag.value: truncated_matrix(kind, space)
           for kind in (JL_PLUS, JL_MINUS, JL_0, JM_PLUS, JM_MINUS, JM_0, LAMBDA, CASIMIR)}
    zl, zm = params.zeta_L, params.zeta_M
    n_lab, n_mol = direction_vectors(params)
    lab_xyz = cartesian(ops["JL+"], ops["JL-"], ops["JL0"])
    mol_xyz = cartesian(ops["JM+"], ops["JM-"], ops["JM0"])
    lab_direction = ops["Lambda"] + sum(n * op for n, op in zip(n_lab, lab_xyz))
    mol_direction = ops["Lambda"] + sum(n * op for n, op in zip(n_mol, mol_xyz))
    operators = {
        "lab_annihilation": (zl ** 2 * ops["JL+"] - 2 * zl * ops["JL0"] - ops["JL-"], vector),
        "molecular_annihilation": (zm ** 2 * ops["JM-"] - 2 * zm * ops["JM0"] - ops["JM+"], vector),
        "lab_direction": (lab_direction, vector),
        "molecular_direction": (mol_direction, vector),
        "ground_lab_lowering": (ops["JL-"], ground),
        "ground_molecular_raising": (ops["JM+"], ground),
        "ground_projection": (ops["JL0"] + ops["Lambda"], ground),
        "ground_casimir": (ops["J2"] + ops["JL0"] - ops["JL0"] @ ops["JL0"], ground),
    }
    residuals = {name: float(np.linalg.norm(op @ target) / norm) for name, (op, target) in operators.items()}
    logger.debug(f"Identity residuals for z={params.z}: {residuals}")
    return residuals


def identities_hold(residuals: Dict[str, float]) -> bool:
    return max(residuals.values()) <= TOLERANCES["identity_residual"]
