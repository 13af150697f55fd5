import cmath
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np

from algebra.angular_ops import (CASIMIR, JL_0, JL_MINUS, JL_PLUS, JM_0, JM_MINUS, JM_PLUS, OperatorKind,
                                 OperatorTag, act, direct_expectation)
from config.constants import TOLERANCES, TRUNCATION
from states.coherent import CoherentParams, default_space, direction_vectors, displacement_unitary, mcs, mfs
from states.families import SequenceFamily, euler_moments
from utils.errors import ConvergenceError, DomainError
from utils.hilbert import SpaceSpec, Tower, TruncatedState, inner_product
from utils.series import sum_power_series
from utils.wigner import displacement_block

logger = logging.getLogger(__name__)


def _zeros(size: int) -> np.ndarray:
    return np.zeros((size, size), dtype=complex)


@dataclass(frozen=True, eq=False)
class ExpectationReport:
    """Normalized expectations <T> = <psi|T|psi>/<psi|psi>.

    J0 and Jplus are lab components; uncertainty_products are the lab (xy, xz, yz) variance products.
    Tensor matrices are indexed by ascending (q, q').
    """

    J0: float
    Jsq: float
    Jplus: complex
    uncertainty_products: Tuple[float, float, float]
    S_matrix: np.ndarray = field(default_factory=lambda: _zeros(2))
    V_matrix: np.ndarray = field(default_factory=lambda: _zeros(3))
    lab_vector: np.ndarray = field(default_factory=lambda: np.zeros(3))
    molecular_vector: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        values = [self.J0, self.Jsq, self.Jplus, *self.uncertainty_products]
        arrays = (self.S_matrix, self.V_matrix, self.lab_vector, self.molecular_vector)
        if not all(np.isfinite(values)) or not all(np.all(np.isfinite(array)) for array in arrays):
            raise ConvergenceError(f"Non-finite expectation values: J0={self.J0}, Jsq={self.Jsq}")

    def to_dict(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "J0": self.J0,
            "Jsq": self.Jsq,
            "Jplus_re": self.Jplus.real,
            "Jplus_im": self.Jplus.imag,
            "product_xy": self.uncertainty_products[0],
            "product_xz": self.uncertainty_products[1],
            "product_yz": self.uncertainty_products[2],
        }
        for axis, lab, molecular in zip("xyz", self.lab_vector, self.molecular_vector):
            row[f"JL_{axis}"] = float(lab)
            row[f"JM_{axis}"] = float(molecular)
        for name, matrix in (("S", self.S_matrix), ("V", self.V_matrix)):
            size = matrix.shape[0]
            labels = [_index_label(two_q) for two_q in range(1 - size, size, 2)]
            for row_label, row_values in zip(labels, matrix):
                for col_label, value in zip(labels, row_values):
                    row[f"{name}_{row_label}{col_label}_re"] = float(value.real)
                    row[f"{name}_{row_label}{col_label}_im"] = float(value.imag)
        return row


def _index_label(two_q: int) -> str:
    return {-2: "-", -1: "-", 0: "0", 1: "+", 2: "+"}[two_q]


class MFSMoments(NamedTuple):
    N: float
    J0: float
    Jsq: float
    var_transverse: float
    var_axial: float


class UncertaintyCheck(NamedTuple):
    product_xy: float
    quarter_Jz_sq: float
    product_xz: float
    product_yz: float
    bound_xz: float = 0.0
    bound_yz: float = 0.0

    @property
    def xy_defect(self) -> float:
        scale = self.quarter_Jz_sq if self.quarter_Jz_sq > 0 else 1.0
        return abs(self.product_xy - self.quarter_Jz_sq) / scale

    def minimizes_all(self, tol: float = TOLERANCES["uncertainty"]) -> bool:
        return (self.xy_defect <= tol and abs(self.product_xz - self.bound_xz) <= tol
                and abs(self.product_yz - self.bound_yz) <= tol)


class TensorDecomposition(NamedTuple):
    S_direct: np.ndarray
    V_direct: np.ndarray
    S_reconstructed: np.ndarray
    V_reconstructed: np.ndarray

    @property
    def S_defect(self) -> float:
        return float(np.max(np.abs(self.S_direct - self.S_reconstructed)))

    @property
    def V_defect(self) -> float:
        return float(np.max(np.abs(self.V_direct - self.V_reconstructed)))


class TransformedUncertainty(NamedTuple):
    lab_defect: float
    molecular_defect: float
    total_variance_mfs: float
    total_variance_transformed: float


class CartesianStats(NamedTuple):
    means: np.ndarray
    variances: np.ndarray


def _log_amplitudes(family: SequenceFamily, z_half: complex, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    log_z = math.log(abs(z_half)) if z_half != 0 else -math.inf
    with np.errstate(invalid="ignore"):
        log_modulus = 0.5 * family._log_weights(grid) + np.where(grid == 0, 0.0, grid * log_z)
    phase = grid * (cmath.phase(z_half) if z_half != 0 else 0.0)
    if family.phase is not None:
        phase = phase + np.asarray(family.phase(grid), dtype=float)
    return log_modulus, phase


def bilinear_series(family: SequenceFamily, z_half: complex, shift: int,
                    weight: Callable[[np.ndarray], np.ndarray]) -> complex:
    """Sum over the tower of conj(a_(n+shift)) a_n weight(n), with a_n = c_n z_half^n and n = two_j."""

    def terms(grid: np.ndarray) -> np.ndarray:
        low_modulus, low_phase = _log_amplitudes(family, z_half, grid)
        high_modulus, high_phase = _log_amplitudes(family, z_half, grid + shift)
        return np.exp(low_modulus + high_modulus) * weight(grid) * np.exp(1j * (low_phase - high_phase))

    return sum_power_series(terms, family.step, TRUNCATION["tail_tolerance"], max_two_j=family.max_two_j,
                            label=f"{family.name} shift {shift}", x=abs(z_half) ** 4).value


def cartesian_stats(state: TruncatedState, plus: OperatorKind, minus: OperatorKind,
                    zero: OperatorKind) -> CartesianStats:
    """Means and variances of ((J+ + J-)/2, (J+ - J-)/2i, J0) by direct action on the state."""
    norm2 = state.norm_squared()
    up, down, diagonal = act(plus, state), act(minus, state), act(zero, state)
    images = ((up + down).scaled(0.5), (up - down).scaled(-0.5j), diagonal)
    means = np.array([inner_product(state, image).real / norm2 for image in images])
    second = np.array([image.norm_squared() / norm2 for image in images])
    return CartesianStats(means, second - means ** 2)


class ExpectationService:
    def __init__(self):
        logger.info("ExpectationService initialized")

    def _moments(self, params: CoherentParams) -> MFSMoments:
        moments = euler_moments(params.family, params.x)
        if moments.N == 0.0:
            raise DomainError(f"Family '{params.family.name}' has a vanishing norm at x = {params.x}")
        j0 = -moments.x_dN / moments.N
        jsq = (moments.x2_d2N + 2 * moments.x_dN) / moments.N
        j0_sq = (moments.x2_d2N + moments.x_dN) / moments.N
        return MFSMoments(moments.N, j0, jsq, -j0 / 2, max(j0_sq - j0 ** 2, 0.0))

    def _mfs_tensors(self, params: CoherentParams, norm: float) -> Tuple[np.ndarray, np.ndarray]:
        family, z_half = params.family, params.z_half
        spinor = _zeros(2)
        if family.tower is Tower.HALF_INTEGER:
            s_minus = bilinear_series(family, z_half, 1, lambda n: np.sqrt((n + 1) / (n + 2))) / norm
            spinor[0, 0], spinor[1, 1] = s_minus, np.conj(s_minus)
        vector = _zeros(3)
        v_minus = bilinear_series(family, z_half, 2, lambda n: np.sqrt((n + 1) / (n + 3))) / norm
        v_zero = bilinear_series(family, z_half, 0, lambda n: n / (n + 2)).real / norm
        vector[0, 0], vector[1, 1], vector[2, 2] = v_minus, v_zero, np.conj(v_minus)
        return spinor, vector

    def mfs_expectations(self, family: SequenceFamily, z: complex, z_half: Optional[complex] = None) -> ExpectationReport:
        params = CoherentParams(family, z, z_half=z_half)
        moments = self._moments(params)
        spinor, vector = self._mfs_tensors(params, moments.N)
        products = (moments.var_transverse ** 2, moments.var_transverse * moments.var_axial,
                    moments.var_transverse * moments.var_axial)
        axis = np.array([0.0, 0.0, moments.J0])
        logger.debug(f"M.F.S. expectations for {family.name} at z={z}: J0={moments.J0:.12g}, Jsq={moments.Jsq:.12g}")
        return ExpectationReport(moments.J0, moments.Jsq, 0j, products, spinor, vector, axis, axis.copy())

    def uncertainty_check(self, family: SequenceFamily, z: complex) -> UncertaintyCheck:
        moments = self._moments(CoherentParams(family, z))
        transverse, axial = moments.var_transverse, moments.var_axial
        return UncertaintyCheck(transverse ** 2, moments.J0 ** 2 / 4, transverse * axial, transverse * axial)

    def mcs_expectations(self, params: CoherentParams) -> Tuple[ExpectationReport, np.ndarray, np.ndarray]:
        moments = self._moments(params)
        n_lab, n_mol = direction_vectors(params)
        variances = moments.var_transverse + (moments.var_axial - moments.var_transverse) * n_lab ** 2
        products = (variances[0] * variances[1], variances[0] * variances[2], variances[1] * variances[2])
        spinor, vector = self._transformed_tensors(params, moments.N)
        lab_vector = moments.J0 * n_lab
        report = ExpectationReport(float(lab_vector[2]), moments.Jsq, complex(lab_vector[0], lab_vector[1]),
                                   products, spinor, vector, lab_vector, moments.J0 * n_mol)
        return report, n_lab, n_mol

    def _transformed_tensors(self, params: CoherentParams, norm: float) -> Tuple[np.ndarray, np.ndarray]:
        spinor, vector = self._mfs_tensors(params, norm)
        transformed = []
        for two_rank, matrix in ((1, spinor), (2, vector)):
            molecular = displacement_block(two_rank, params.zeta_M)
            lab = displacement_block(two_rank, params.zeta_L)
            transformed.append(np.conj(molecular) @ matrix @ lab.conj().T)
        return transformed[0], transformed[1]

    def direct_report(self, state: TruncatedState) -> ExpectationReport:
        """Every report field evaluated by acting on the truncated state."""
        lab = cartesian_stats(state, JL_PLUS, JL_MINUS, JL_0)
        molecular = cartesian_stats(state, JM_PLUS, JM_MINUS, JM_0)
        variances = lab.variances
        products = (variances[0] * variances[1], variances[0] * variances[2], variances[1] * variances[2])
        spinor = self._tensor_matrix(state, OperatorTag.S) if state.space.tower is Tower.HALF_INTEGER else _zeros(2)
        vector = self._tensor_matrix(state, OperatorTag.V)
        return ExpectationReport(float(lab.means[2]), direct_expectation(CASIMIR, state).real,
                                 direct_expectation(JL_PLUS, state), products, spinor, vector,
                                 lab.means, molecular.means)

    def _tensor_matrix(self, state: TruncatedState, tag: OperatorTag) -> np.ndarray:
        two_rank = 1 if tag is OperatorTag.S else 2
        indices = list(range(-two_rank, two_rank + 1, 2))
        matrix = _zeros(len(indices))
        for row, two_q in enumerate(indices):
            for col, two_q_prime in enumerate(indices):
                matrix[row, col] = direct_expectation(OperatorKind(tag, two_q, two_q_prime), state)
        return matrix

    def mfs_direct_report(self, family: SequenceFamily, z: complex, space: Optional[SpaceSpec] = None) -> ExpectationReport:
        space = space or default_space(family, abs(z) ** 2)
        return self.direct_report(mfs(family, z, space))

    def mcs_direct_report(self, params: CoherentParams, space: Optional[SpaceSpec] = None) -> ExpectationReport:
        space = space or default_space(params.family, params.x)
        return self.direct_report(mcs(params, space))

    def mcs_tensor_decomposition(self, params: CoherentParams, space: Optional[SpaceSpec] = None) -> TensorDecomposition:
        space = space or default_space(params.family, params.x)
        state = mcs(params, space)
        moments = self._moments(params)
        spinor, vector = self._transformed_tensors(params, moments.N)
        if space.tower is Tower.HALF_INTEGER:
            direct_spinor = self._tensor_matrix(state, OperatorTag.S)
        else:
            # the integer tower carries no half-integer shells, so every bi-spinor element vanishes
            direct_spinor = _zeros(2)
        direct_vector = self._tensor_matrix(state, OperatorTag.V)
        return TensorDecomposition(direct_spinor, direct_vector, spinor, vector)

    def mcs_transformed_uncertainty(self, params: CoherentParams,
                                    space: Optional[SpaceSpec] = None) -> TransformedUncertainty:
        space = space or default_space(params.family, params.x)
        state = mcs(params, space)
        unitary = displacement_unitary(space, params.zeta_L, params.zeta_M)
        pulled = TruncatedState.from_vector(space, unitary.conj().T @ state.to_vector())
        defects = []
        total_transformed = 0.0
        for plus, minus, zero in ((JL_PLUS, JL_MINUS, JL_0), (JM_PLUS, JM_MINUS, JM_0)):
            stats = cartesian_stats(pulled, plus, minus, zero)
            bound = stats.means[2] ** 2 / 4
            product = stats.variances[0] * stats.variances[1]
            defects.append(abs(product - bound) / (bound if bound > 0 else 1.0))
            if plus is JL_PLUS:
                total_transformed = float(np.sum(stats.variances))
        moments = self._moments(params)
        total_mfs = 2 * moments.var_transverse + moments.var_axial
        return TransformedUncertainty(defects[0], defects[1], total_mfs, total_transformed)

    def compare_reports(self, closed: ExpectationReport, direct: ExpectationReport) -> Dict[str, float]:
        """Largest scaled difference per report field."""

        def defect(a, b) -> float:
            a, b = np.asarray(a), np.asarray(b)
            return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)), initial=0.0))

        return {
            "J0": defect(closed.J0, direct.J0),
            "Jsq": defect(closed.Jsq, direct.Jsq),
            "Jplus": defect(closed.Jplus, direct.Jplus),
            "uncertainty_products": defect(closed.uncertainty_products, direct.uncertainty_products),
            "S_matrix": defect(closed.S_matrix, direct.S_matrix),
            "V_matrix": defect(closed.V_matrix, direct.V_matrix),
            "lab_vector": defect(closed.lab_vector, direct.lab_vector),
            "molecular_vector": defect(closed.molecular_vector, direct.molecular_vector),
        }
