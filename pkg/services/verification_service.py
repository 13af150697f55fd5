import cmath
import math
import time
import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from algebra.angular_ops import (JL_0, JL_MINUS, JL_PLUS, JM_0, JM_MINUS, JM_PLUS, LAB_OPERATORS,
                                 MOLECULAR_OPERATORS, RotorConstants, act, adjoint_check, commutator_defect,
                                 rotor_hamiltonian, selection_rule_violations, spinor_components,
                                 vector_components)
from algebra.zrep import (MonomialFunction, apply_diff, apply_rotor_diff, evaluate, to_zrep)
from config.constants import CLI_DEFAULTS, EVOLUTION, TABLE_SAMPLES, TOLERANCES
from config.messages import ERROR_MESSAGES, STATUS_MESSAGES
from services.evolution_service import DriveCoefficients, EvolutionService, EvolutionState
from services.expectation_service import ExpectationService
from services.resolution_service import ResolutionService
from states.coherent import (CoherentParams, Frame, RotationParams, default_space, identity_residuals, mcs,
                             overlap_closed, rotate_params, rotate_state)
from states.families import SequenceFamily, builtin_family, mellin_moment_check, monomial_family
from utils.errors import RotorError
from utils.hilbert import SpaceSpec, Tower, TruncatedState, inner_product, random_state

logger = logging.getLogger(__name__)

FAMILY_IDS = range(1, 9)
OVERLAP_DRAWS = 10


def space_for(family: SequenceFamily, two_j_max: int) -> SpaceSpec:
    if family.tower is Tower.INTEGER:
        two_j_max -= two_j_max % 2
    return SpaceSpec(two_j_max, family.tower)


def draw_params(rng: np.random.Generator, family: SequenceFamily, disc_modulus: float = 0.3,
                unbounded_modulus: float = 0.8) -> CoherentParams:
    top = disc_modulus if math.isfinite(family.domain_radius) else unbounded_modulus
    modulus = rng.uniform(0.05, top)
    z = modulus * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
    zeta_L = complex(rng.normal(), rng.normal())
    zeta_M = complex(rng.normal(), rng.normal())
    return CoherentParams(family, z, zeta_L, zeta_M)


def draw_rotation(rng: np.random.Generator) -> RotationParams:
    pair = rng.normal(size=4)
    pair /= np.linalg.norm(pair)
    return RotationParams(complex(pair[0], pair[1]), complex(pair[2], pair[3]))


def conjugate_params(params: CoherentParams) -> CoherentParams:
    return CoherentParams(params.family, np.conj(params.z), np.conj(params.zeta_L), np.conj(params.zeta_M),
                          z_half=np.conj(params.z_half))


def _state_difference(a: TruncatedState, b: TruncatedState) -> float:
    scale = math.sqrt(max(a.norm_squared(), b.norm_squared(), 1e-300))
    return math.sqrt((a - b).norm_squared()) / scale


def _monomial_difference(a: MonomialFunction, b: MonomialFunction) -> float:
    return (a - b).max_abs() / max(a.max_abs(), b.max_abs(), 1.0)


class VerificationService:
    """Runs named suites of numerical checks and summarizes their largest defects."""

    def __init__(self, expectation_service: Optional[ExpectationService] = None,
                 resolution_service: Optional[ResolutionService] = None,
                 evolution_service: Optional[EvolutionService] = None,
                 seed: int = CLI_DEFAULTS["seed"]):
        self.expectation_service = expectation_service or ExpectationService()
        self.resolution_service = resolution_service or ResolutionService()
        self.evolution_service = evolution_service or EvolutionService()
        self.seed = seed
        self.suites: Dict[str, Callable[..., Dict[str, Any]]] = {
            "algebra": self.algebra_suite,
            "identities": self.identities_suite,
            "coherent": self.coherent_suite,
            "expectations": self.expectations_suite,
            "uncertainty": self.uncertainty_suite,
            "zrep": self.zrep_suite,
            "mellin": self.mellin_suite,
            "unity": self.unity_suite,
            "evolution": self.evolution_suite,
        }
        logger.info(f"VerificationService initialized with seed {seed}")

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def _summarize(self, suite: str, defects: Dict[str, float], tolerances: Dict[str, float],
                   start: float, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        failures = [name for name, value in defects.items() if not value <= tolerances[name]]
        elapsed = time.time() - start
        if failures:
            logger.warning(STATUS_MESSAGES["suite_failed"].format(suite=suite, count=len(failures)))
        else:
            logger.info(STATUS_MESSAGES["suite_passed"].format(suite=suite, elapsed=elapsed))
        result = {
            "suite": suite,
            "success": not failures,
            "status": "passed" if not failures else "failed",
            "defects": defects,
            "tolerances": tolerances,
            "failures": failures,
            "elapsed": elapsed,
        }
        if extra:
            result.update(extra)
        return result

    def run(self, suite: str, **options: Any) -> Dict[str, Any]:
        if suite == "all":
            results = {name: self.run(name, **options) for name in self.suites}
            failures = [f"{name}.{failure}" for name, result in results.items()
                        for failure in result.get("failures", [name] if not result["success"] else [])]
            return {
                "suite": "all",
                "success": all(result["success"] for result in results.values()),
                "status": "passed" if not failures else "failed",
                "failures": failures,
                "suites": results,
            }
        if suite not in self.suites:
            return {"suite": suite, "success": False, "status": "unknown_suite",
                    "error": ERROR_MESSAGES["unknown_suite"].format(suite=suite)}
        logger.info(f"Running suite '{suite}' with options {options}")
        try:
            return self.suites[suite](**options)
        except RotorError as e:
            logger.error(f"Suite '{suite}' aborted: {e}", exc_info=True)
            return {"suite": suite, "success": False, "status": "error", "error": str(e)}

    def algebra_suite(self, two_j_max: int = CLI_DEFAULTS["two_j_max_algebra"], **_: Any) -> Dict[str, Any]:
        start = time.time()
        defects: Dict[str, float] = {}
        tolerances: Dict[str, float] = {}
        for tower in (Tower.HALF_INTEGER, Tower.INTEGER):
            space = SpaceSpec(two_j_max - (two_j_max % 2 if tower is Tower.INTEGER else 0), tower)
            commutators = commutator_defect(space)
            defects[f"{tower.value}.commutators"] = commutators["max_defect"]
            kinds = list(LAB_OPERATORS + MOLECULAR_OPERATORS) + vector_components()
            if tower is Tower.HALF_INTEGER:
                kinds += spinor_components()
            defects[f"{tower.value}.hermiticity"] = max(adjoint_check(kind, space) for kind in kinds)
            tensors = vector_components() + (spinor_components() if tower is Tower.HALF_INTEGER else [])
            defects[f"{tower.value}.selection_rules"] = float(
                sum(selection_rule_violations(kind, space) for kind in tensors))
        for name in defects:
            tolerances[name] = 0.0 if name.endswith("selection_rules") else TOLERANCES["algebra"]
        return self._summarize("algebra", defects, tolerances, start)

    def identities_suite(self, draws: int = CLI_DEFAULTS["random_draws"],
                         two_j_max: int = CLI_DEFAULTS["two_j_max_algebra"], **_: Any) -> Dict[str, Any]:
        """Annihilation and direction identities of |Z> and the ground-state identities of |z>."""
        start = time.time()
        rng = self._rng()
        worst: Dict[str, float] = {}
        for _draw in range(draws):
            family = builtin_family(int(rng.integers(1, 9)))
            params = draw_params(rng, family)
            for name, value in identity_residuals(params, space_for(family, two_j_max)).items():
                worst[name] = max(worst.get(name, 0.0), value)
        tolerances = {name: TOLERANCES["identity_residual"] for name in worst}
        return self._summarize("identities", worst, tolerances, start, {"draws": draws})

    def coherent_suite(self, draws: int = OVERLAP_DRAWS,
                       two_j_max: int = CLI_DEFAULTS["two_j_max_algebra"], **_: Any) -> Dict[str, Any]:
        """Closed overlap against the direct inner product, and rotation covariance statewise."""
        start = time.time()
        rng = self._rng()
        overlap_defect = 0.0
        lab_defect = 0.0
        molecular_defect = 0.0
        for _draw in range(draws):
            family = builtin_family(int(rng.integers(1, 9)))
            ket = draw_params(rng, family)
            bra = draw_params(rng, family)
            space = default_space(family, max(ket.x, bra.x))
            direct = inner_product(mcs(bra, space), mcs(ket, space))
            closed = overlap_closed(ket, bra)
            overlap_defect = max(overlap_defect, abs(closed - direct) / max(abs(direct), 1.0))

            small = space_for(family, two_j_max)
            rotation = draw_rotation(rng)
            state = mcs(ket, small)
            for frame in (Frame.LAB, Frame.MOL):
                rotated, _phase = rotate_params(ket, frame, rotation)
                defect = _state_difference(rotate_state(state, frame, rotation), mcs(rotated, small))
                if frame is Frame.LAB:
                    lab_defect = max(lab_defect, defect)
                else:
                    molecular_defect = max(molecular_defect, defect)
        defects = {"overlap": overlap_defect, "lab_rotation": lab_defect, "molecular_rotation": molecular_defect}
        tolerances = {"overlap": TOLERANCES["overlap"], "lab_rotation": TOLERANCES["rotation"],
                      "molecular_rotation": TOLERANCES["rotation"]}
        return self._summarize("coherent", defects, tolerances, start, {"draws": draws})

    def expectations_suite(self, **_: Any) -> Dict[str, Any]:
        """Closed-form M.C.S. reports and transformed tensors against the truncated-state oracle."""
        start = time.time()
        rng = self._rng()
        worst: Dict[str, float] = {}
        for family_id in FAMILY_IDS:
            family = builtin_family(family_id)
            params = draw_params(rng, family)
            space = default_space(family, params.x)
            closed, _n_lab, _n_mol = self.expectation_service.mcs_expectations(params)
            direct = self.expectation_service.mcs_direct_report(params, space)
            for name, value in self.expectation_service.compare_reports(closed, direct).items():
                worst[name] = max(worst.get(name, 0.0), value)
            tensors = self.expectation_service.mcs_tensor_decomposition(params, space)
            worst["S_decomposition"] = max(worst.get("S_decomposition", 0.0), tensors.S_defect)
            worst["V_decomposition"] = max(worst.get("V_decomposition", 0.0), tensors.V_defect)
        tolerances = {name: TOLERANCES["expectation"] for name in worst}
        return self._summarize("expectations", worst, tolerances, start)

    def uncertainty_suite(self, two_j_max: int = CLI_DEFAULTS["two_j_max_algebra"], **_: Any) -> Dict[str, Any]:
        start = time.time()
        rng = self._rng()
        xy_defect = 0.0
        transformed_lab = 0.0
        transformed_molecular = 0.0
        for family_id in FAMILY_IDS:
            family = builtin_family(family_id)
            params = draw_params(rng, family)
            xy_defect = max(xy_defect, self.expectation_service.uncertainty_check(family, params.z).xy_defect)
            transformed = self.expectation_service.mcs_transformed_uncertainty(params, space_for(family, two_j_max))
            transformed_lab = max(transformed_lab, transformed.lab_defect)
            transformed_molecular = max(transformed_molecular, transformed.molecular_defect)
        monomial_defect = 0.0
        for two_l in range(1, 5):
            check = self.expectation_service.uncertainty_check(monomial_family(two_l), 0.5)
            monomial_defect = max(monomial_defect, check.xy_defect, abs(check.product_xz - check.bound_xz),
                                  abs(check.product_yz - check.bound_yz))
        defects = {"xy_equality": xy_defect, "monomial_minimization": monomial_defect,
                   "transformed_lab": transformed_lab, "transformed_molecular": transformed_molecular}
        tolerances = {name: TOLERANCES["uncertainty"] for name in defects}
        return self._summarize("uncertainty", defects, tolerances, start)

    def zrep_suite(self, two_j_max: int = 4, draws: int = 5, **_: Any) -> Dict[str, Any]:
        """Matrix action against exponent arithmetic, evaluation against <conj(Z)|psi>, and commutators."""
        start = time.time()
        rng = self._rng()
        equivalence = 0.0
        evaluation = 0.0
        commutators = 0.0
        rotor = 0.0
        constants = RotorConstants(A0=3.0, A1=1.0, A2=2.0)
        for family_id in (1, 5):
            family = builtin_family(family_id)
            space = space_for(family, two_j_max)
            hamiltonian = rotor_hamiltonian(constants, space)
            for _draw in range(draws):
                state = random_state(space, rng)
                g = to_zrep(state, family)
                for op in LAB_OPERATORS + MOLECULAR_OPERATORS:
                    equivalence = max(equivalence, _monomial_difference(to_zrep(act(op, state), family),
                                                                        apply_diff(op, g)))
                params = draw_params(rng, family)
                direct = inner_product(mcs(conjugate_params(params), space), state)
                evaluation = max(evaluation, abs(evaluate(g, params) - direct) / max(abs(direct), 1.0))
                commutators = max(commutators, self._differential_commutators(g))
                vector = state.to_vector()
                blocks = []
                offset = 0
                for two_j in space.two_j_values():
                    size = (two_j + 1) ** 2
                    blocks.append(hamiltonian[two_j] @ vector[offset:offset + size])
                    offset += size
                matrix_image = TruncatedState.from_vector(space, np.concatenate(blocks))
                rotor = max(rotor, _monomial_difference(to_zrep(matrix_image, family), apply_rotor_diff(constants, g)))
        defects = {"matrix_equivalence": equivalence, "evaluation": evaluation,
                   "commutators": commutators, "rotor": rotor}
        tolerances = {name: TOLERANCES["zrep"] for name in defects}
        return self._summarize("zrep", defects, tolerances, start)

    def _differential_commutators(self, g: MonomialFunction) -> float:
        def residual(a, b, expected: MonomialFunction) -> float:
            value = apply_diff(a, apply_diff(b, g)) - apply_diff(b, apply_diff(a, g))
            return _monomial_difference(value, expected)

        worst = max(
            residual(JL_0, JL_PLUS, apply_diff(JL_PLUS, g)),
            residual(JL_0, JL_MINUS, apply_diff(JL_MINUS, g).scaled(-1.0)),
            residual(JL_PLUS, JL_MINUS, apply_diff(JL_0, g).scaled(2.0)),
            residual(JM_0, JM_PLUS, apply_diff(JM_PLUS, g).scaled(-1.0)),
            residual(JM_0, JM_MINUS, apply_diff(JM_MINUS, g)),
            residual(JM_PLUS, JM_MINUS, apply_diff(JM_0, g).scaled(-2.0)),
        )
        for lab in LAB_OPERATORS:
            for molecular in MOLECULAR_OPERATORS:
                worst = max(worst, residual(lab, molecular, MonomialFunction()))
        return worst

    def mellin_suite(self, **_: Any) -> Dict[str, Any]:
        start = time.time()
        defects = {}
        for family_id in FAMILY_IDS:
            family = builtin_family(family_id)
            two_j_list = range(0, TABLE_SAMPLES["mellin_two_j_max"] + 1, family.step)
            defects[f"family-{family_id}"] = mellin_moment_check(family, two_j_list=two_j_list)
        tolerances = {name: TOLERANCES["mellin"] for name in defects}
        return self._summarize("mellin", defects, tolerances, start)

    def unity_suite(self, family_ids: Optional[List[int]] = None,
                    two_j_max: int = CLI_DEFAULTS["two_j_max_unity"], **_: Any) -> Dict[str, Any]:
        start = time.time()
        defects: Dict[str, float] = {}
        tolerances: Dict[str, float] = {}
        reports = {}
        for family_id in family_ids or list(FAMILY_IDS):
            family = builtin_family(family_id)
            report = self.resolution_service.unity_suite(family, two_j_max_check=two_j_max,
                                                         two_j_max_brute=min(two_j_max, CLI_DEFAULTS["two_j_max_brute"]))
            reports[family.name] = report
            if report["status"] in ("no_measure", "divergent"):
                defects[f"{family.name}.available"] = math.inf
                tolerances[f"{family.name}.available"] = 0.0
                continue
            for key, tolerance in (("max_diagonal_defect", "unity_diagonal"),
                                   ("max_off_diagonal", "unity_off_diagonal"),
                                   ("cross_check_defect", "unity_cross_check"),
                                   ("beta_profile_defect", "beta_profile")):
                defects[f"{family.name}.{key}"] = report[key]
                tolerances[f"{family.name}.{key}"] = TOLERANCES[tolerance]
        return self._summarize("unity", defects, tolerances, start, {"reports": reports})

    def evolution_suite(self, t_end: float = EVOLUTION["default_t_end"], dt: float = EVOLUTION["default_dt"],
                        two_j_max: int = CLI_DEFAULTS["two_j_max_algebra"], **_: Any) -> Dict[str, Any]:
        start = time.time()
        service = self.evolution_service
        family = builtin_family(1)
        params = CoherentParams(family, 0.5 + 0.2j, 0.3 - 0.1j, -0.2 + 0.4j)
        drive = DriveCoefficients(aL=0.3 + 0.2j, aL0=0.7, aM=-0.1 + 0.25j, aM0=0.4)
        stability = service.temporal_stability(drive, params, t_end, dt, space_for(family, two_j_max))
        trajectory = service.integrate(drive, service.initial_state(params), t_end, dt)

        omega = 1.3
        rotating = service.integrate(DriveCoefficients(aL0=omega), EvolutionState(0.0, 0.4 + 0.3j, 0j, 0.0), t_end, dt)
        phase_defect = abs(rotating[-1].zeta_L - (0.4 + 0.3j) * cmath.exp(-1j * omega * rotating[-1].t))
        riccati = service.integrate(DriveCoefficients(aL=0.8), EvolutionState(0.0, 0j, 0j, 0.0), t_end, dt)
        tangent_defect = abs(riccati[-1].zeta_L - math.tan(0.8 * riccati[-1].t))

        rotor_params = CoherentParams(builtin_family(5), 1.0, 0.2 + 0.1j, -0.3 + 0.2j)
        rotor_space = space_for(rotor_params.family, two_j_max)
        spherical = service.rotor_decoherence_demo(rotor_params, RotorConstants(1.0, 1.0, 1.0), space=rotor_space)
        asymmetric = service.rotor_decoherence_demo(rotor_params, RotorConstants(A0=1.0, A1=2.0, A2=3.0))
        spherical_fidelity = min(sample["spherical_fidelity"] for sample in spherical["samples"])
        spherical_drift = max(sample["mean_drift"] for sample in spherical["samples"])
        defects = {
            "fidelity": 1.0 - stability["fidelity"],
            "norm_drift": stability["norm_drift"],
            "precession": service.precession_residual(drive, params, trajectory),
            "analytic_rotation": phase_defect,
            "analytic_tangent": tangent_defect,
            "spherical_phase_map": 1.0 - spherical_fidelity,
            "spherical_mean_drift": spherical_drift,
            "asymmetric_departure": 0.0 if asymmetric["decoheres"] else 1.0,
        }
        tolerances = {
            "fidelity": TOLERANCES["fidelity"],
            "norm_drift": 1e-10,
            "precession": TOLERANCES["precession"],
            "analytic_rotation": 1e-10,
            "analytic_tangent": 1e-8,
            "spherical_phase_map": TOLERANCES["rotor_phase"],
            "spherical_mean_drift": TOLERANCES["rotor_phase"],
            "asymmetric_departure": 0.0,
        }
        return self._summarize("evolution", defects, tolerances, start,
                               {"asymmetric_max_departure": asymmetric["max_departure"]})
