import math
import time
import logging
from functools import lru_cache
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import beta as beta_function, comb, roots_legendre

from config.constants import CLI_DEFAULTS, QUADRATURE, TOLERANCES
from config.messages import ERROR_MESSAGES
from states.families import Measure, SequenceFamily, circle_family, norm_series
from utils.errors import ConvergenceError, MissingMeasureError
from utils.hilbert import BasisLabel, SpaceSpec, Tower, enumerate_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    radial_nodes: int = QUADRATURE["radial_nodes"]
    angular_nodes: int = QUADRATURE["angular_nodes"]


@lru_cache(maxsize=16)
def _unit_interval_rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    points, weights = roots_legendre(nodes)
    return 0.5 * (points + 1.0), 0.5 * weights


def _angles(nodes: int, period: float) -> np.ndarray:
    return period * np.arange(nodes) / nodes


def sphere_profile(two_j: int, two_m: int, nodes: int = QUADRATURE["radial_nodes"]) -> float:
    """sigma^2 times the radial zeta integral of r^(2(j+m)) (1+r^2)^(-2j-2) 2r dr, by quadrature in u = r^2/(1+r^2)."""
    u, weights = _unit_interval_rule(nodes)
    p = (two_j + two_m) // 2
    q = (two_j - two_m) // 2
    return float(comb(two_j, p) * np.sum(weights * u ** p * (1.0 - u) ** q))


def sphere_profile_closed(two_j: int, two_m: int) -> float:
    p = (two_j + two_m) // 2
    return float(comb(two_j, p) * beta_function(p + 1, two_j - p + 1))


class ResolutionService:
    def __init__(self, quad: Optional[QuadratureSpec] = None):
        self.quad = quad or QuadratureSpec()
        logger.info(f"ResolutionService initialized with {self.quad}")

    def _require_measure(self, family: SequenceFamily, meas: Optional[Measure]) -> Measure:
        meas = meas or family.measure()
        if meas is None:
            raise MissingMeasureError(ERROR_MESSAGES["missing_measure"].format(family=family.name))
        return meas

    def _z_plane(self, family: SequenceFamily, meas: Measure, bra: BasisLabel, ket: BasisLabel,
                 quad: QuadratureSpec) -> complex:
        # z = t e^(i phi) with t = |z|; the half-integer tower needs phi over the double cover
        period = 4.0 * math.pi if family.tower is Tower.HALF_INTEGER else 2.0 * math.pi
        phi = _angles(quad.angular_nodes, period)
        s, weights = _unit_interval_rule(quad.radial_nodes)
        if math.isfinite(meas.support):
            t = math.sqrt(meas.support) * s
            jacobian = np.full_like(s, math.sqrt(meas.support))
        else:
            t = s / (1.0 - s)
            jacobian = 1.0 / (1.0 - s) ** 2
        f_values = np.array([meas.f(value * value) for value in t])
        bra_c, ket_c = family.c(bra.two_j), family.c(ket.two_j)
        radial = weights * jacobian * t * f_values * t ** (bra.two_j / 2) * t ** (ket.two_j / 2)
        angular = np.mean(np.exp(0.5j * (bra.two_j - ket.two_j) * phi))
        return complex(2.0 * bra_c * np.conj(ket_c) * np.sum(radial) * angular)

    def _zeta_plane(self, two_j: int, two_x: int, two_j_other: int, two_x_other: int,
                    quad: QuadratureSpec) -> complex:
        # zeta = r e^(i phi), u = r^2/(1+r^2); d^2 zeta/(pi (1+r^2)^2) becomes du dphi/(2 pi)
        phi = _angles(quad.angular_nodes, 2.0 * math.pi)
        u, weights = _unit_interval_rule(quad.radial_nodes)
        r = np.sqrt(u / (1.0 - u))
        p, p_other = (two_j + two_x) // 2, (two_j_other + two_x_other) // 2
        sigma = math.sqrt(comb(two_j, p)) * math.sqrt(comb(two_j_other, p_other))
        radial = weights * r ** (p + p_other) * (1.0 - u) ** ((two_j + two_j_other) / 2)
        angular = np.mean(np.exp(1j * (p - p_other) * phi))
        return complex(sigma * np.sum(radial) * angular)

    def unity_matrix_element(self, family: SequenceFamily, meas: Optional[Measure], bra: BasisLabel,
                             ket: BasisLabel, quad: Optional[QuadratureSpec] = None) -> complex:
        """<bra| (integral of f(|z|^2) |Z><Z|) |ket> by tensor quadrature in each of the three planes."""
        meas = self._require_measure(family, meas)
        quad = quad or self.quad
        z_part = self._z_plane(family, meas, bra, ket, quad)
        lab_part = self._zeta_plane(bra.two_j, bra.two_m, ket.two_j, ket.two_m, quad)
        molecular_part = self._zeta_plane(bra.two_j, bra.two_k, ket.two_j, ket.two_k, quad)
        return z_part * lab_part * molecular_part

    def factorized_diagonal(self, family: SequenceFamily, meas: Optional[Measure], label: BasisLabel) -> float:
        """Diagonal element from the Mellin moment times the two sphere profiles."""
        meas = self._require_measure(family, meas)
        weight = float(family.weights(np.array([label.two_j]))[0])
        moment = meas.moment(label.two_j)
        return (weight * moment * sphere_profile(label.two_j, label.two_m, self.quad.radial_nodes)
                * sphere_profile(label.two_j, label.two_k, self.quad.radial_nodes))

    def beta_profile_defect(self, two_j_max: int) -> float:
        worst = 0.0
        for two_j in range(two_j_max + 1):
            for two_m in range(-two_j, two_j + 1, 2):
                numeric = sphere_profile(two_j, two_m, self.quad.radial_nodes)
                worst = max(worst, abs(numeric - sphere_profile_closed(two_j, two_m)))
        return worst

    def unity_suite(self, family: SequenceFamily, meas: Optional[Measure] = None,
                    two_j_max_check: int = CLI_DEFAULTS["two_j_max_unity"],
                    two_j_max_brute: int = CLI_DEFAULTS["two_j_max_brute"]) -> Dict[str, Any]:
        start = time.time()
        try:
            meas = self._require_measure(family, meas)
        except MissingMeasureError as e:
            logger.warning(f"Resolution of unity unavailable: {e}")
            return {"family": family.name, "success": False, "status": "no_measure", "error": str(e)}

        space = SpaceSpec(two_j_max_check - (two_j_max_check % 2 if family.tower is Tower.INTEGER else 0),
                          family.tower)
        labels = [label for label in enumerate_basis(space) if family.weights(np.array([label.two_j]))[0] > 0]
        try:
            diagonal = {str(label): self.factorized_diagonal(family, meas, label) for label in labels}
        except ConvergenceError as e:
            logger.error(f"Mellin moment failed for {family.name}: {e}", exc_info=True)
            return {"family": family.name, "success": False, "status": "divergent", "error": str(e)}
        diagonal_defect = max(abs(value - 1.0) for value in diagonal.values())

        brute_labels = [label for label in labels if label.two_j <= two_j_max_brute]
        off_diagonal = 0.0
        cross_check = 0.0
        for bra in brute_labels:
            for ket in brute_labels:
                value = self.unity_matrix_element(family, meas, bra, ket)
                if bra == ket:
                    cross_check = max(cross_check, abs(value - diagonal[str(bra)]))
                else:
                    off_diagonal = max(off_diagonal, abs(value))
        beta_defect = self.beta_profile_defect(two_j_max_check)
        passed = (diagonal_defect <= TOLERANCES["unity_diagonal"]
                  and off_diagonal <= TOLERANCES["unity_off_diagonal"]
                  and cross_check <= TOLERANCES["unity_cross_check"]
                  and beta_defect <= TOLERANCES["beta_profile"])
        elapsed = time.time() - start
        logger.info(f"Unity suite for {family.name}: diagonal {diagonal_defect:.2e}, off-diagonal "
                    f"{off_diagonal:.2e}, cross-check {cross_check:.2e} in {elapsed:.2f}s")
        return {
            "family": family.name,
            "success": passed,
            "status": "passed" if passed else "failed",
            "diagonal": diagonal,
            "max_diagonal_defect": diagonal_defect,
            "max_off_diagonal": off_diagonal,
            "cross_check_defect": cross_check,
            "beta_profile_defect": beta_defect,
            "elapsed": elapsed,
        }

    def circle_divergence(self, radius: float) -> Dict[str, Any]:
        """Norm series of the sequence forced by a measure on |z| = radius, evaluated on that circle."""
        family = circle_family(radius)
        try:
            result = norm_series(family, radius ** 2)
        except ConvergenceError as e:
            logger.info(f"Circle measure at radius {radius} gives a divergent norm: {e}")
            return {"radius": radius, "diverges": True, "error": str(e)}
        return {"radius": radius, "diverges": False, "value": result.value}

    def convergence_table(self, family: SequenceFamily, label: BasisLabel, node_counts: List[int]) -> List[Dict[str, Any]]:
        rows = []
        for nodes in node_counts:
            quad = QuadratureSpec(radial_nodes=nodes, angular_nodes=self.quad.angular_nodes)
            value = self.unity_matrix_element(family, None, label, label, quad)
            rows.append({"radial_nodes": nodes, "value": value.real, "defect": abs(value - 1.0)})
        return rows
