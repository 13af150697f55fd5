import math

import numpy as np
import pytest

from services.verification_service import (VerificationService, conjugate_params, draw_params, draw_rotation,
                                           space_for)
from states.families import builtin_family
from utils.hilbert import Tower


@pytest.fixture(scope="module")
def service() -> VerificationService:
    return VerificationService(seed=7)


def test_space_for_rounds_integer_tower() -> None:
    assert space_for(builtin_family(5), 5).two_j_max == 4
    assert space_for(builtin_family(1), 5).two_j_max == 5
    assert space_for(builtin_family(5), 5).tower is Tower.INTEGER


def test_draws_respect_domains(rng) -> None:
    for family_id in range(1, 9):
        family = builtin_family(family_id)
        params = draw_params(rng, family)
        assert params.family.admits(params.x)
        if math.isfinite(family.domain_radius):
            assert abs(params.z) <= 0.3
    rotation = draw_rotation(rng)
    assert math.isclose(abs(rotation.u) ** 2 + abs(rotation.v) ** 2, 1.0)


def test_conjugate_params(rng) -> None:
    params = draw_params(rng, builtin_family(2))
    conjugate = conjugate_params(params)
    assert conjugate.z == np.conj(params.z)
    assert conjugate.z_half == np.conj(params.z_half)
    assert conjugate.zeta_M == np.conj(params.zeta_M)


def test_algebra_suite(service) -> None:
    result = service.run("algebra", two_j_max=3)
    assert result["success"], result["failures"]
    assert result["defects"]["half-integer.selection_rules"] == 0.0


def test_identities_suite(service) -> None:
    result = service.run("identities", draws=4, two_j_max=4)
    assert result["success"], result["failures"]
    assert result["draws"] == 4


def test_coherent_suite(service) -> None:
    result = service.run("coherent", draws=2, two_j_max=4)
    assert result["success"], result["defects"]


def test_uncertainty_suite(service) -> None:
    result = service.run("uncertainty", two_j_max=4)
    assert result["success"], result["defects"]


def test_zrep_suite(service) -> None:
    result = service.run("zrep", two_j_max=3, draws=2)
    assert result["success"], result["defects"]


def test_mellin_suite(service) -> None:
    result = service.run("mellin")
    assert result["success"], result["defects"]
    assert len(result["defects"]) == 8


def test_unity_suite_reports_per_family(service) -> None:
    result = service.run("unity", family_ids=[6], two_j_max=2)
    assert result["success"], result["defects"]
    assert "family-6" in result["reports"]


def test_unknown_suite(service) -> None:
    result = service.run("everything")
    assert result["status"] == "unknown_suite"
    assert not result["success"]


def test_suite_errors_are_reported(service) -> None:
    # unknown family ids surface as a suite error rather than an exception
    result = service.run("unity", family_ids=[9])
    assert result["status"] == "error"
    assert "9" in result["error"]
