import math
from dataclasses import replace

import numpy as np
import pytest

from services.expectation_service import ExpectationService, bilinear_series
from states.coherent import CoherentParams, default_space
from states.families import builtin_family, monomial_family
from utils.errors import ConvergenceError
from utils.hilbert import SpaceSpec


@pytest.fixture(scope="module")
def service() -> ExpectationService:
    return ExpectationService()


def test_family_one_at_unit_modulus(service) -> None:
    report = service.mfs_expectations(builtin_family(1), 1.0)
    assert math.isclose(report.J0, -0.5, rel_tol=1e-12)
    assert math.isclose(report.Jsq, 1.0, rel_tol=1e-12)
    assert math.isclose(report.uncertainty_products[0], 1 / 16, rel_tol=1e-12)


def test_family_five(service) -> None:
    report = service.mfs_expectations(builtin_family(5), math.sqrt(2.0))
    assert math.isclose(report.J0, -2.0, rel_tol=1e-12)
    assert math.isclose(report.Jsq, 8.0, rel_tol=1e-12)
    assert not report.S_matrix.any()


def test_family_three_closed_forms(service) -> None:
    # J0 and <J^2> of family 3 in t = |z|
    t = 0.4
    report = service.mfs_expectations(builtin_family(3), t)
    expected_j0 = -3 * t * (1 + t) / ((1 + 2 * t) * (1 - t))
    expected_jsq = 3 * t * (t * t + 6 * t + 3) / (2 * (1 - t) ** 2 * (1 + 2 * t))
    assert math.isclose(report.J0, expected_j0, rel_tol=1e-10)
    assert math.isclose(report.Jsq, expected_jsq, rel_tol=1e-10)


def test_family_six_squared_momentum(service) -> None:
    y = 0.7
    report = service.mfs_expectations(builtin_family(6), math.sqrt(y))
    expected = y * (y + 2) * (4 * y * y + 24 * y + 9) / (4 * y * y + 8 * y + 1)
    assert math.isclose(report.Jsq, expected, rel_tol=1e-10)


def test_diagonal_vector_element_series(service) -> None:
    # <V(0,0)> = sum |a_n|^2 n/(n+2) / N over the ground-state tower
    family = builtin_family(2)
    z = 0.6
    report = service.mfs_expectations(family, z)
    n = np.arange(0, 60)
    weights = family.weights(n) * z ** n
    expected = np.sum(weights * n / (n + 2)) / np.sum(weights)
    assert math.isclose(report.V_matrix[1, 1].real, expected, rel_tol=1e-12)


@pytest.mark.parametrize("family_id", [1, 4, 5, 8])
def test_mfs_closed_matches_direct(service, family_id) -> None:
    family = builtin_family(family_id)
    z = 0.3 + 0.1j if math.isfinite(family.domain_radius) else 0.7 - 0.4j
    closed = service.mfs_expectations(family, z)
    direct = service.mfs_direct_report(family, z)
    defects = service.compare_reports(closed, direct)
    assert max(defects.values()) <= 1e-9, defects


@pytest.mark.parametrize("family_id", [2, 3, 6, 7])
def test_mcs_closed_matches_direct(service, family_id) -> None:
    family = builtin_family(family_id)
    z = 0.25 - 0.1j if math.isfinite(family.domain_radius) else 0.6 + 0.2j
    params = CoherentParams(family, z, 0.5 - 0.8j, -0.3 + 1.2j)
    closed, n_lab, n_mol = service.mcs_expectations(params)
    direct = service.mcs_direct_report(params, default_space(family, params.x))
    defects = service.compare_reports(closed, direct)
    assert max(defects.values()) <= 1e-9, defects
    assert math.isclose(np.linalg.norm(n_lab), 1.0)
    assert math.isclose(np.linalg.norm(n_mol), 1.0)


def test_tensor_decomposition(service) -> None:
    params = CoherentParams(builtin_family(4), 0.3 * np.exp(0.7j), 0.4 + 0.3j, -0.2 + 0.5j)
    decomposition = service.mcs_tensor_decomposition(params)
    assert decomposition.S_defect <= 1e-9
    assert decomposition.V_defect <= 1e-9


def test_xy_product_saturates_bound(service) -> None:
    for family_id in range(1, 9):
        family = builtin_family(family_id)
        z = 0.3 if math.isfinite(family.domain_radius) else 1.1
        assert service.uncertainty_check(family, z).xy_defect <= 1e-10


def test_monomials_minimize_every_pair(service) -> None:
    for two_l in range(1, 5):
        check = service.uncertainty_check(monomial_family(two_l), 0.5)
        assert check.minimizes_all()


def test_transformed_uncertainty(service) -> None:
    family = builtin_family(1)
    params = CoherentParams(family, 0.8 + 0.1j, 0.9 - 0.4j, -1.3 + 0.2j)
    transformed = service.mcs_transformed_uncertainty(params, SpaceSpec(6))
    assert transformed.lab_defect <= 1e-10
    assert transformed.molecular_defect <= 1e-10


def test_bilinear_series_diverges_outside_disc() -> None:
    family = replace(builtin_family(4), domain_radius=math.inf)
    with pytest.raises(ConvergenceError):
        bilinear_series(family, 1.05, 0, lambda n: np.ones(n.shape))


def test_report_rows(service) -> None:
    row = service.mfs_expectations(builtin_family(1), 0.5).to_dict()
    assert {"J0", "Jsq", "product_xy", "JL_z", "JM_z", "V_00_re", "S_++_im"} <= set(row)
