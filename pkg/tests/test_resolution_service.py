import math

import numpy as np
import pytest

from services.resolution_service import (QuadratureSpec, ResolutionService, sphere_profile,
                                         sphere_profile_closed)
from states.families import builtin_family, monomial_family
from utils.errors import MissingMeasureError
from utils.hilbert import BasisLabel


@pytest.fixture(scope="module")
def service() -> ResolutionService:
    return ResolutionService()


def test_sphere_profiles_are_uniform() -> None:
    for two_j in range(6):
        for two_m in range(-two_j, two_j + 1, 2):
            assert math.isclose(sphere_profile(two_j, two_m), 1 / (two_j + 1), rel_tol=1e-12)
            assert math.isclose(sphere_profile_closed(two_j, two_m), 1 / (two_j + 1), rel_tol=1e-12)


def test_family_two_diagonal(service) -> None:
    family = builtin_family(2)
    for label in (BasisLabel(0, 0, 0), BasisLabel(1, -1, 1), BasisLabel(3, 1, -3)):
        assert abs(service.factorized_diagonal(family, None, label) - 1.0) <= 1e-4


def test_family_seven_diagonal(service) -> None:
    value = service.factorized_diagonal(builtin_family(7), None, BasisLabel(2, 2, -2))
    assert abs(value - 1.0) <= 1e-4


def test_brute_force_matrix_elements(service) -> None:
    family = builtin_family(6)
    label = BasisLabel(2, 0, 2)
    diagonal = service.unity_matrix_element(family, None, label, label)
    assert abs(diagonal - 1.0) <= 1e-3
    assert abs(service.unity_matrix_element(family, None, label, BasisLabel(2, 2, 2))) <= 1e-10
    assert abs(service.unity_matrix_element(family, None, label, BasisLabel(0, 0, 0))) <= 1e-10


def test_unity_suite_passes(service) -> None:
    report = service.unity_suite(builtin_family(5), two_j_max_check=2, two_j_max_brute=2)
    assert report["success"], report
    assert report["max_off_diagonal"] <= 1e-10


def test_missing_measure(service) -> None:
    family = monomial_family(2)
    report = service.unity_suite(family)
    assert report["status"] == "no_measure"
    with pytest.raises(MissingMeasureError):
        service.factorized_diagonal(family, None, BasisLabel(2, 0, 0))


def test_circle_measure_diverges(service) -> None:
    assert service.circle_divergence(1.5)["diverges"]


def test_convergence_table(service) -> None:
    rows = service.convergence_table(builtin_family(5), BasisLabel(0, 0, 0), [20, 80])
    assert [row["radial_nodes"] for row in rows] == [20, 80]
    assert rows[-1]["defect"] <= rows[0]["defect"] + 1e-12
    assert np.isfinite(rows[-1]["value"])


def test_quadrature_spec_defaults() -> None:
    spec = QuadratureSpec()
    assert spec.radial_nodes > spec.angular_nodes
