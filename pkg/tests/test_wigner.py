import math

import numpy as np
import pytest

from states.coherent import coherent_column
from utils.errors import DomainError
from utils.hilbert import BasisLabel
from utils.wigner import (EulerAngles, big_R, compose, direction, displacement_block, little_d, su2_block,
                          wavefunction, wavefunction_overlap, zeta_to_angles)


def _angles(rng) -> EulerAngles:
    return EulerAngles(rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi))


def test_spin_half_small_d() -> None:
    beta = 0.9
    expected = np.array([[math.cos(beta / 2), math.sin(beta / 2)],
                         [-math.sin(beta / 2), math.cos(beta / 2)]])
    assert np.allclose(little_d(1, beta).entries, expected)


def test_small_d_at_pi_is_antidiagonal() -> None:
    d = little_d(4, math.pi).entries
    assert np.all(np.isfinite(d))
    assert np.allclose(np.abs(d), np.fliplr(np.eye(5)))


def test_beta_range() -> None:
    with pytest.raises(DomainError):
        little_d(2, -0.1)
    with pytest.raises(DomainError):
        EulerAngles(0.0, 4.0, 0.0)
    with pytest.raises(DomainError):
        EulerAngles(7.0, 0.5, 0.0)


def test_blocks_are_unitary(rng) -> None:
    for two_j in range(7):
        assert big_R(two_j, _angles(rng)).unitarity_defect() < 1e-12


def test_su2_block_matches_euler_form(rng) -> None:
    for two_j in (1, 2, 3):
        angles = _angles(rng)
        u, v = angles.cayley_klein()
        assert np.allclose(su2_block(two_j, u, v), big_R(two_j, angles).entries)


def test_composition_on_integer_blocks(rng) -> None:
    first, second = _angles(rng), _angles(rng)
    product = big_R(2, first) @ big_R(2, second)
    assert np.allclose(big_R(2, compose(first, second)).entries, product.entries)


def test_cayley_klein_round_trip(rng) -> None:
    angles = _angles(rng)
    u, v = angles.cayley_klein()
    back, sign = EulerAngles.from_cayley_klein(u, v)
    assert sign == 1
    assert np.allclose(back.cayley_klein(), (u, v))


def test_displacement_first_column_is_coherent_column() -> None:
    zeta = 0.4 - 0.7j
    for two_j in range(5):
        assert np.allclose(displacement_block(two_j, zeta)[:, 0], coherent_column(two_j, zeta))


def test_displacement_matches_angles() -> None:
    zeta = -0.3 + 1.2j
    assert np.allclose(displacement_block(3, zeta), big_R(3, zeta_to_angles(zeta)).entries)


def test_direction_is_unit() -> None:
    assert np.allclose(direction(0j), [0.0, 0.0, 1.0])
    assert np.isclose(np.linalg.norm(direction(2.0 - 0.5j)), 1.0)


def test_wavefunctions_orthonormal() -> None:
    a = BasisLabel(2, 0, 2)
    b = BasisLabel(2, 2, 2)
    c = BasisLabel(4, 0, 2)
    assert np.isclose(wavefunction_overlap(a, a, 12), 1.0)
    assert abs(wavefunction_overlap(a, b, 12)) < 1e-12
    assert abs(wavefunction_overlap(a, c, 12)) < 1e-12


def test_half_integer_wavefunction_is_double_valued() -> None:
    angles = EulerAngles(0.3, 0.2, 0.1)
    assert not wavefunction(BasisLabel(1, 1, -1), angles).single_valued
    assert wavefunction(BasisLabel(2, 0, 0), angles).single_valued
