import math

import numpy as np
import pytest

from states.coherent import (CoherentParams, Frame, RotationParams, analytic_norm, coherent_column,
                             default_space, direction_vectors, identities_hold, identity_residuals, mcs, mfs,
                             overlap_closed, rotate_params, rotate_state)
from states.families import builtin_family
from utils.errors import DomainError, MobiusPoleError, TowerMismatchError
from utils.hilbert import BasisLabel, SpaceSpec, Tower, inner_product


def _rotation(rng) -> RotationParams:
    pair = rng.normal(size=4)
    pair /= np.linalg.norm(pair)
    return RotationParams(complex(pair[0], pair[1]), complex(pair[2], pair[3]))


def test_params_validate_domain() -> None:
    with pytest.raises(DomainError):
        CoherentParams(builtin_family(3), 1.0)
    with pytest.raises(DomainError):
        CoherentParams(builtin_family(1), 0.25, z_half=0.4)
    params = CoherentParams(builtin_family(1), -0.25)
    assert np.isclose(params.z_half, 0.5j)


def test_mfs_sits_on_lowest_weights() -> None:
    state = mfs(builtin_family(1), 0.36, SpaceSpec(3))
    assert set(state.coeffs) == {BasisLabel(n, -n, -n) for n in range(4)}
    assert np.isclose(state.amplitude(BasisLabel(2, -2, -2)), 0.36 / math.sqrt(2))


def test_mcs_at_origin_equals_mfs() -> None:
    family = builtin_family(2)
    space = SpaceSpec(4)
    params = CoherentParams(family, 0.3 + 0.4j)
    assert np.allclose(mcs(params, space).to_vector(), mfs(family, params.z, space).to_vector())


def test_half_integer_family_needs_half_integer_tower() -> None:
    with pytest.raises(TowerMismatchError):
        mcs(CoherentParams(builtin_family(1), 0.5), SpaceSpec(4, Tower.INTEGER))


def test_coherent_column_is_normalized() -> None:
    for two_j in range(6):
        assert math.isclose(np.linalg.norm(coherent_column(two_j, 1.3 - 0.2j)), 1.0)


@pytest.mark.parametrize("family_id", [1, 4, 5, 8])
def test_norm_independent_of_zeta(family_id) -> None:
    family = builtin_family(family_id)
    z = 0.3 - 0.2j if math.isfinite(family.domain_radius) else 0.8 + 0.3j
    params = CoherentParams(family, z, 0.7 - 1.1j, -0.4 + 0.2j)
    state = mcs(params, default_space(family, params.x))
    assert math.isclose(state.norm_squared(), family.closed_N(params.x), rel_tol=1e-12)


@pytest.mark.parametrize("family_id", range(1, 9))
def test_overlap_closed_form(family_id) -> None:
    family = builtin_family(family_id)
    scale = 0.3 if math.isfinite(family.domain_radius) else 0.8
    ket = CoherentParams(family, scale * (0.6 + 0.5j), 0.2 - 0.9j, 1.1 + 0.3j)
    bra = CoherentParams(family, scale * (-0.4 + 0.7j), -0.5 + 0.1j, 0.3 - 0.6j)
    space = default_space(family, max(ket.x, bra.x))
    direct = inner_product(mcs(bra, space), mcs(ket, space))
    assert abs(overlap_closed(ket, bra) - direct) <= 1e-9 * max(abs(direct), 1.0)


def test_analytic_norm_on_real_axis() -> None:
    family = builtin_family(5)
    assert np.isclose(analytic_norm(family, math.sqrt(1.5)), math.exp(1.5))


@pytest.mark.parametrize("family_id", [2, 6])
def test_identities(family_id) -> None:
    family = builtin_family(family_id)
    space = SpaceSpec(6, family.tower)
    residuals = identity_residuals(CoherentParams(family, 0.7 + 0.2j, -0.6 + 0.9j, 0.4 - 0.3j), space)
    assert identities_hold(residuals), residuals


@pytest.mark.parametrize("frame", [Frame.LAB, Frame.MOL])
def test_rotation_covariance(rng, frame) -> None:
    family = builtin_family(1)
    space = SpaceSpec(5)
    params = CoherentParams(family, 0.5 - 0.3j, 0.4 + 0.1j, -0.8 + 0.6j)
    rotation = _rotation(rng)
    rotated, phase = rotate_params(params, frame, rotation)
    assert math.isclose(abs(phase), 1.0)
    expected = mcs(rotated, space).to_vector()
    assert np.allclose(rotate_state(mcs(params, space), frame, rotation).to_vector(), expected, atol=1e-10)


def test_rotation_composition(rng) -> None:
    first, second = _rotation(rng), _rotation(rng)
    combined = first.compose(second)
    assert np.allclose(combined.block(3), first.block(3) @ second.block(3))


@pytest.mark.parametrize("frame", [Frame.LAB, Frame.MOL])
def test_rotate_params_composes(rng, frame) -> None:
    space = SpaceSpec(4)
    for _draw in range(10):
        params = CoherentParams(builtin_family(1), complex(*rng.normal(size=2)) * 0.5,
                                complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        first, second = _rotation(rng), _rotation(rng)
        stepwise, _phase = rotate_params(rotate_params(params, frame, first)[0], frame, second)
        direct, _phase = rotate_params(params, frame, second.compose(first))
        assert abs(stepwise.zeta(frame) - direct.zeta(frame)) <= 1e-10 * max(1.0, abs(direct.zeta(frame)))
        a = mcs(stepwise, space).to_vector()
        b = mcs(direct, space).to_vector()
        fidelity = abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real)
        assert fidelity >= 1.0 - 1e-10


def test_mobius_pole() -> None:
    rotation = RotationParams(0j, 1.0 + 0j)
    with pytest.raises(MobiusPoleError):
        rotation.mobius(0j)


def test_direction_vectors_at_origin() -> None:
    lab, molecular = direction_vectors(CoherentParams(builtin_family(5), 1.0))
    assert np.allclose(lab, [0.0, 0.0, 1.0])
    assert np.allclose(molecular, [0.0, 0.0, 1.0])


def test_default_space_respects_tower() -> None:
    space = default_space(builtin_family(5), 2.0)
    assert space.tower is Tower.INTEGER
    assert space.two_j_max % 2 == 0
    assert space.two_j_max <= 30
