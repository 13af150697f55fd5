import math
import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sparse
from scipy.linalg import eigh

from algebra.angular_ops import (JL_0, JL_MINUS, JL_PLUS, JM_0, JM_MINUS, JM_PLUS, RotorConstants,
                                 molecular_components, rotor_block, truncated_matrix)
from config.constants import EVOLUTION, TOLERANCES, TRUNCATION
from config.messages import ERROR_MESSAGES
from states.coherent import CoherentParams, default_space, direction_vectors, mcs
from states.families import euler_moments
from utils.errors import ConvergenceError, DomainError, EvolutionPoleError
from utils.hilbert import SpaceSpec, TruncatedState, block_offsets, inner_product

logger = logging.getLogger(__name__)

Coefficient = Union[complex, float, Callable[[float], complex]]


class DriveValues(NamedTuple):
    aL: complex
    aL0: float
    aM: complex
    aM0: float


def _evaluate(value: Coefficient, t: float) -> complex:
    return complex(value(t) if callable(value) else value)


def _real(name: str, value: complex) -> float:
    if abs(value.imag) > TOLERANCES["sigma_imaginary"]:
        raise DomainError(f"Drive coefficient {name} must be real, got {value}")
    return value.real


@dataclass(frozen=True)
class DriveCoefficients:
    """Coefficients of i(aL JL+ - conj(aL) JL-) + aL0 JL0 + i(aM JM+ - conj(aM) JM-) + aM0 JM0."""

    aL: Coefficient = 0j
    aL0: Coefficient = 0.0
    aM: Coefficient = 0j
    aM0: Coefficient = 0.0

    def __post_init__(self):
        for name in ("aL0", "aM0"):
            value = getattr(self, name)
            if not callable(value):
                _real(name, complex(value))

    def at(self, t: float) -> DriveValues:
        return DriveValues(_evaluate(self.aL, t), _real("aL0", _evaluate(self.aL0, t)),
                           _evaluate(self.aM, t), _real("aM0", _evaluate(self.aM0, t)))

    @property
    def is_constant(self) -> bool:
        return not any(callable(value) for value in (self.aL, self.aL0, self.aM, self.aM0))


@dataclass(frozen=True)
class EvolutionState:
    t: float
    zeta_L: complex
    zeta_M: complex
    sigma: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.zeta_L, self.zeta_M, self.sigma], dtype=complex)

    @classmethod
    def from_vector(cls, t: float, vector: np.ndarray) -> "EvolutionState":
        return cls(t, complex(vector[0]), complex(vector[1]), float(vector[2].real))


def parameter_rates(values: DriveValues, vector: np.ndarray) -> np.ndarray:
    """Right side of the (zeta_L, zeta_M, sigma) flow."""
    aL, aL0, aM, aM0 = values
    zeta_L, zeta_M = vector[0], vector[1]
    d_zeta_L = aL + np.conj(aL) * zeta_L ** 2 - 1j * aL0 * zeta_L
    d_zeta_M = -np.conj(aM) - aM * zeta_M ** 2 - 1j * aM0 * zeta_M
    d_sigma = (1j * (aL * np.conj(zeta_L) - np.conj(aL) * zeta_L) - aL0
               + 1j * (aM * zeta_M - np.conj(aM) * np.conj(zeta_M)) - aM0)
    if abs(d_sigma.imag) > TOLERANCES["sigma_imaginary"] * max(1.0, abs(d_sigma.real)):
        raise ConvergenceError(f"Phase rate left the real axis: {d_sigma}")
    return np.array([d_zeta_L, d_zeta_M, d_sigma.real], dtype=complex)


def rk4(rhs: Callable[[float, np.ndarray], np.ndarray], t: float, h: float, y: np.ndarray) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def precession_fields(values: DriveValues) -> Tuple[np.ndarray, np.ndarray]:
    """h^L and h^M with d nu^L/dt = h^L x nu^L and d nu^M/dt = -h^M x nu^M."""
    lab = np.array([-2 * values.aL.imag, -2 * values.aL.real, values.aL0])
    molecular = np.array([-2 * values.aM.imag, -2 * values.aM.real, values.aM0])
    return lab, molecular


class EvolutionService:
    def __init__(self, overflow_guard: float = EVOLUTION["overflow_guard"],
                 step_tolerance: float = EVOLUTION["step_tolerance"], max_halvings: int = EVOLUTION["max_halvings"]):
        self.overflow_guard = overflow_guard
        self.step_tolerance = step_tolerance
        self.max_halvings = max_halvings
        logger.info("EvolutionService initialized")

    def _check_pole(self, t: float, vector: np.ndarray) -> None:
        modulus = max(abs(vector[0]), abs(vector[1]))
        if not math.isfinite(modulus) or modulus > self.overflow_guard:
            raise EvolutionPoleError(ERROR_MESSAGES["evolution_pole"].format(t=t, modulus=modulus))

    def _advance(self, drive: DriveCoefficients, t: float, vector: np.ndarray, dt: float, depth: int) -> np.ndarray:
        def rhs(time: float, y: np.ndarray) -> np.ndarray:
            return parameter_rates(drive.at(time), y)

        full = rk4(rhs, t, dt, vector)
        midway = rk4(rhs, t, dt / 2, vector)
        halves = rk4(rhs, t + dt / 2, dt / 2, midway)
        self._check_pole(t + dt, halves)
        error = float(np.max(np.abs(full - halves)))
        scale = max(1.0, float(np.max(np.abs(vector))))
        if error <= self.step_tolerance * scale or depth >= self.max_halvings:
            if depth >= self.max_halvings:
                logger.warning(f"Step at t={t} kept error {error:.2e} after {depth} halvings")
            return halves
        logger.debug(f"Halving step at t={t}: error {error:.2e} with dt={dt:.2e}")
        midway = self._advance(drive, t, vector, dt / 2, depth + 1)
        return self._advance(drive, t + dt / 2, midway, dt / 2, depth + 1)

    def step(self, drive: DriveCoefficients, state: EvolutionState, dt: float) -> EvolutionState:
        if dt <= 0:
            raise DomainError(f"Time step must be positive, got {dt}")
        vector = self._advance(drive, state.t, state.as_vector(), dt, 0)
        return EvolutionState.from_vector(state.t + dt, vector)

    def integrate(self, drive: DriveCoefficients, state: EvolutionState, t_end: float,
                  dt: float = EVOLUTION["default_dt"]) -> List[EvolutionState]:
        trajectory = [state]
        n_steps = max(int(math.ceil((t_end - state.t) / dt - 1e-9)), 0)
        for index in range(n_steps):
            h = min(dt, t_end - trajectory[-1].t)
            trajectory.append(self.step(drive, trajectory[-1], h))
        logger.info(f"Integrated {n_steps} steps to t={trajectory[-1].t:.6g}")
        return trajectory

    def evolved_params(self, params: CoherentParams, state: EvolutionState) -> CoherentParams:
        return params.evolved(state.zeta_L, state.zeta_M, state.sigma)

    def initial_state(self, params: CoherentParams, t: float = 0.0) -> EvolutionState:
        return EvolutionState(t, params.zeta_L, params.zeta_M, 0.0)

    def field_vectors(self, drive: DriveCoefficients, t: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        return precession_fields(drive.at(t))

    def drive_hamiltonian(self, drive: DriveCoefficients, t: float, space: SpaceSpec) -> sparse.csr_matrix:
        aL, aL0, aM, aM0 = drive.at(t)
        return sparse.csr_matrix(
            1j * (aL * truncated_matrix(JL_PLUS, space) - np.conj(aL) * truncated_matrix(JL_MINUS, space))
            + aL0 * truncated_matrix(JL_0, space)
            + 1j * (aM * truncated_matrix(JM_PLUS, space) - np.conj(aM) * truncated_matrix(JM_MINUS, space))
            + aM0 * truncated_matrix(JM_0, space))

    def schrodinger_reference(self, drive: DriveCoefficients, params: CoherentParams, t: float,
                              dt: float = EVOLUTION["default_dt"], space: Optional[SpaceSpec] = None) -> TruncatedState:
        space = space or default_space(params.family, params.x)
        initial = mcs(params, space)
        vector = initial.to_vector()
        constant = self.drive_hamiltonian(drive, 0.0, space) if drive.is_constant else None

        def rhs(time: float, y: np.ndarray) -> np.ndarray:
            hamiltonian = constant if constant is not None else self.drive_hamiltonian(drive, time, space)
            return -1j * (hamiltonian @ y)

        n_steps = max(int(math.ceil(t / dt - 1e-9)), 0)
        time = 0.0
        for index in range(n_steps):
            h = min(dt, t - time)
            vector = rk4(rhs, time, h, vector)
            time += h
        self._report_top_shell(space, vector)
        return TruncatedState.from_vector(space, vector, initial.dropped_weight)

    def _report_top_shell(self, space: SpaceSpec, vector: np.ndarray) -> None:
        top = space.two_j_max
        offset = block_offsets(space)[top]
        weight = float(np.vdot(vector[offset:], vector[offset:]).real) / float(np.vdot(vector, vector).real)
        if weight > TRUNCATION["dropped_weight_warning"]:
            logger.warning(f"Top shell two_j={top} carries relative weight {weight:.2e}")

    def fidelity(self, a: TruncatedState, b: TruncatedState) -> float:
        return abs(inner_product(a, b)) ** 2 / (a.norm_squared() * b.norm_squared())

    def temporal_stability(self, drive: DriveCoefficients, params: CoherentParams, t: float,
                           dt: float = EVOLUTION["default_dt"], space: Optional[SpaceSpec] = None) -> Dict[str, Any]:
        space = space or default_space(params.family, params.x)
        trajectory = self.integrate(drive, self.initial_state(params), t, dt)
        evolved = mcs(self.evolved_params(params, trajectory[-1]), space)
        reference = self.schrodinger_reference(drive, params, t, dt, space)
        initial_norm = mcs(params, space).norm_squared()
        return {
            "fidelity": self.fidelity(evolved, reference),
            "norm_drift": abs(reference.norm_squared() - initial_norm) / initial_norm,
            "final": trajectory[-1],
        }

    def precession_residual(self, drive: DriveCoefficients, params: CoherentParams,
                            trajectory: Sequence[EvolutionState]) -> float:
        """Largest mismatch between the finite-difference rate of nu and the rigid-rotation field."""
        worst = 0.0
        for previous, current, following in zip(trajectory[:-2], trajectory[1:-1], trajectory[2:]):
            before = direction_vectors(replace(params, zeta_L=previous.zeta_L, zeta_M=previous.zeta_M))
            now = direction_vectors(replace(params, zeta_L=current.zeta_L, zeta_M=current.zeta_M))
            after = direction_vectors(replace(params, zeta_L=following.zeta_L, zeta_M=following.zeta_M))
            span = following.t - previous.t
            h_lab, h_mol = self.field_vectors(drive, current.t)
            lab_rate = (after[0] - before[0]) / span
            mol_rate = (after[1] - before[1]) / span
            worst = max(worst, float(np.max(np.abs(lab_rate - np.cross(h_lab, now[0])))),
                        float(np.max(np.abs(mol_rate + np.cross(h_mol, now[1])))))
        return worst

    def trajectory_rows(self, params: CoherentParams, trajectory: Sequence[EvolutionState]) -> List[Dict[str, Any]]:
        moments = euler_moments(params.family, params.x)
        j0 = -moments.x_dN / moments.N
        rows = []
        for state in trajectory:
            n_lab, n_mol = direction_vectors(replace(params, zeta_L=state.zeta_L, zeta_M=state.zeta_M))
            row = {"t": state.t, "zeta_L_re": state.zeta_L.real, "zeta_L_im": state.zeta_L.imag,
                   "zeta_M_re": state.zeta_M.real, "zeta_M_im": state.zeta_M.imag, "sigma": state.sigma}
            for axis, lab, molecular in zip("xyz", j0 * n_lab, j0 * n_mol):
                row[f"JL_{axis}"] = float(lab)
                row[f"JM_{axis}"] = float(molecular)
            rows.append(row)
        return rows

    def rotor_decoherence_demo(self, params: CoherentParams, constants: RotorConstants,
                               times: Optional[Sequence[float]] = None,
                               space: Optional[SpaceSpec] = None) -> Dict[str, Any]:
        """Exact per-block propagation under the rigid-rotor Hamiltonian.

        Reports how far the molecular covariance <J_iJ_k + J_kJ_i> - 2<J_i><J_k> moves from its t=0
        value; for the spherical rotor it also reports the fidelity with the phase-shifted M.C.S.
        """
        space = space or default_space(params.family, params.x)
        times = list(times) if times is not None else list(EVOLUTION["rotor_sample_times"])
        initial = mcs(params, space)
        vector = initial.to_vector()
        offsets = block_offsets(space)
        blocks = {}
        for two_j in space.two_j_values():
            size = two_j + 1
            energies, modes = eigh(rotor_block(constants, two_j))
            amplitudes = vector[offsets[two_j]:offsets[two_j] + size * size].reshape(size, size)
            blocks[two_j] = (energies, modes, modes.conj().T @ amplitudes)

        def evolved(t: float) -> Dict[int, np.ndarray]:
            return {two_j: modes @ (np.exp(-1j * energies * t)[:, None] * projected)
                    for two_j, (energies, modes, projected) in blocks.items()}

        baseline = self._molecular_covariance(evolved(0.0), initial.norm_squared())
        samples = []
        for t in times:
            state_blocks = evolved(t)
            stats = self._molecular_covariance(state_blocks, initial.norm_squared())
            sample = {
                "t": t,
                "departure": float(np.max(np.abs(stats["covariance"] - baseline["covariance"]))),
                "molecular_vector": stats["means"].tolist(),
                "mean_drift": float(np.max(np.abs(stats["means"] - baseline["means"]))),
            }
            if constants.is_spherical:
                sample["spherical_fidelity"] = self._spherical_fidelity(params, constants, t, space, state_blocks)
            samples.append(sample)
        max_departure = max((sample["departure"] for sample in samples), default=0.0)
        logger.info(f"Rotor demo with {constants}: max departure {max_departure:.3e}")
        return {
            "constants": {"A0": constants.A0, "A1": constants.A1, "A2": constants.A2},
            "samples": samples,
            "max_departure": max_departure,
            "decoheres": max_departure > TOLERANCES["rotor_departure"],
        }

    def _molecular_covariance(self, state_blocks: Dict[int, np.ndarray], norm2: float) -> Dict[str, np.ndarray]:
        means = np.zeros(3)
        second = np.zeros((3, 3))
        for two_j, amplitudes in state_blocks.items():
            components = molecular_components(two_j)
            images = [component @ amplitudes for component in components]
            for i, image in enumerate(images):
                means[i] += np.vdot(amplitudes, image).real
                for k, other in enumerate(images):
                    # <{J_i, J_k}> = 2 Re <J_i psi | J_k psi> for Hermitian components
                    second[i, k] += 2 * np.vdot(image, other).real
        means /= norm2
        second /= norm2
        return {"means": means, "covariance": second - 2 * np.outer(means, means)}

    def _spherical_fidelity(self, params: CoherentParams, constants: RotorConstants, t: float,
                            space: SpaceSpec, state_blocks: Dict[int, np.ndarray]) -> float:
        strength = constants.A0
        family = params.family.with_phase(lambda n: -strength * t * (n / 2) * (n / 2 + 1))
        target = mcs(replace(params, family=family), space).to_vector()
        vector = np.concatenate([state_blocks[two_j].reshape(-1) for two_j in space.two_j_values()])
        overlap = np.vdot(target, vector)
        return float(abs(overlap) ** 2 / (np.vdot(target, target).real * np.vdot(vector, vector).real))
