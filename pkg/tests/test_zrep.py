import math

import numpy as np
import pytest

from algebra.angular_ops import (CASIMIR, JL_0, JL_MINUS, JL_PLUS, JM_0, JM_MINUS, JM_PLUS, LAB_OPERATORS,
                                 MOLECULAR_OPERATORS, RotorConstants, act, rotor_hamiltonian)
from algebra.zrep import (MonomialFunction, apply_diff, apply_rotor_diff, evaluate, from_zrep, rho_half,
                          to_zrep)
from services.verification_service import conjugate_params
from states.coherent import CoherentParams, mcs
from states.families import builtin_family, monomial_family
from utils.errors import DomainError, InvalidLabelError, NegativeExponentError
from utils.hilbert import BasisLabel, SpaceSpec, Tower, TruncatedState, random_state


def _close(a: MonomialFunction, b: MonomialFunction, tol: float = 1e-10) -> bool:
    return (a - b).max_abs() <= tol * max(a.max_abs(), b.max_abs(), 1.0)


def test_ground_state_is_constant() -> None:
    family = builtin_family(1)
    g = to_zrep(TruncatedState.basis_state(SpaceSpec(2), BasisLabel(0, 0, 0)), family)
    assert g.coefficients == {(0, 0, 0): np.conj(family.c(0))}


def test_middle_label_of_unit_shell() -> None:
    family = builtin_family(5)
    g = to_zrep(TruncatedState.basis_state(SpaceSpec(2, Tower.INTEGER), BasisLabel(2, 0, 0)), family)
    assert set(g.coefficients) == {(2, 1, 1)}
    assert np.isclose(g.coefficients[(2, 1, 1)], 2.0)
    assert apply_diff(JL_0, g).coefficients == {}
    assert apply_diff(JM_0, g).coefficients == {}


def test_projection_operators_count_exponents() -> None:
    g = MonomialFunction({(2, 2, 0): 1.0, (3, 0, 3): 2.0})
    lab = apply_diff(JL_0, g)
    molecular = apply_diff(JM_0, g)
    assert lab.coefficients == {(2, 2, 0): 1.0, (3, 0, 3): -3.0}
    assert molecular.coefficients == {(2, 2, 0): -1.0, (3, 0, 3): 3.0}


def test_ladders_shift_exponents() -> None:
    g = MonomialFunction({(2, 1, 1): 1.0})
    assert apply_diff(JL_PLUS, g).coefficients == {(2, 2, 1): 1.0}
    assert apply_diff(JL_MINUS, g).coefficients == {(2, 0, 1): 1.0}
    assert apply_diff(JM_MINUS, g).coefficients == {(2, 1, 2): 1.0}
    assert apply_diff(JM_PLUS, g).coefficients == {(2, 1, 0): 1.0}


def test_edges_are_annihilated() -> None:
    g = MonomialFunction({(2, 2, 0): 1.0})
    assert apply_diff(JL_PLUS, g).coefficients == {}
    assert apply_diff(JM_PLUS, g).coefficients == {}


def test_negative_exponent_is_rejected() -> None:
    with pytest.raises(NegativeExponentError):
        apply_diff(JL_MINUS, MonomialFunction({(2, -1, 0): 1.0}))


def test_non_differential_operator() -> None:
    with pytest.raises(InvalidLabelError):
        apply_diff(CASIMIR, MonomialFunction({(0, 0, 0): 1.0}))


def test_vanishing_coefficient() -> None:
    family = monomial_family(2)
    with pytest.raises(DomainError):
        to_zrep(TruncatedState.basis_state(SpaceSpec(2, Tower.INTEGER), BasisLabel(0, 0, 0)), family)


@pytest.mark.parametrize("family_id", [1, 5])
def test_matrix_and_differential_actions_agree(rng, family_id) -> None:
    family = builtin_family(family_id)
    space = SpaceSpec(4, family.tower)
    state = random_state(space, rng)
    g = to_zrep(state, family)
    for op in LAB_OPERATORS + MOLECULAR_OPERATORS:
        assert _close(to_zrep(act(op, state), family), apply_diff(op, g)), op


def test_round_trip(rng) -> None:
    family = builtin_family(2)
    space = SpaceSpec(3)
    state = random_state(space, rng)
    back = from_zrep(to_zrep(state, family), family, space)
    assert np.allclose(back.to_vector(), state.to_vector())


def test_evaluation_is_overlap_with_conjugate_state(rng) -> None:
    family = builtin_family(1)
    space = SpaceSpec(4)
    state = random_state(space, rng)
    params = CoherentParams(family, 0.6 - 0.2j, 0.3 + 0.7j, -0.5 - 0.4j)
    direct = complex(np.vdot(mcs(conjugate_params(params), space).to_vector(), state.to_vector()))
    assert np.isclose(evaluate(to_zrep(state, family), params), direct, rtol=1e-10, atol=1e-12)


def test_rho_half() -> None:
    params = CoherentParams(builtin_family(5), 4.0, 1.0, 1.0j)
    assert np.isclose(rho_half(params), 1.0)


def test_molecular_commutators_are_reversed(rng) -> None:
    g = to_zrep(random_state(SpaceSpec(3), rng), builtin_family(1))

    def bracket(a, b):
        return apply_diff(a, apply_diff(b, g)) - apply_diff(b, apply_diff(a, g))

    assert _close(bracket(JL_0, JL_PLUS), apply_diff(JL_PLUS, g))
    assert _close(bracket(JL_PLUS, JL_MINUS), apply_diff(JL_0, g).scaled(2.0))
    assert _close(bracket(JM_0, JM_PLUS), apply_diff(JM_PLUS, g).scaled(-1.0))
    assert _close(bracket(JM_PLUS, JM_MINUS), apply_diff(JM_0, g).scaled(-2.0))
    for lab in LAB_OPERATORS:
        for molecular in MOLECULAR_OPERATORS:
            assert _close(bracket(lab, molecular), MonomialFunction())


def test_rotor_differential_form(rng) -> None:
    family = builtin_family(5)
    space = SpaceSpec(4, Tower.INTEGER)
    constants = RotorConstants(A0=3.0, A1=1.0, A2=2.0)
    state = random_state(space, rng)
    blocks = rotor_hamiltonian(constants, space)
    vector = state.to_vector()
    images, offset = [], 0
    for two_j in space.two_j_values():
        size = (two_j + 1) ** 2
        images.append(blocks[two_j] @ vector[offset:offset + size])
        offset += size
    image = TruncatedState.from_vector(space, np.concatenate(images))
    assert _close(to_zrep(image, family), apply_rotor_diff(constants, to_zrep(state, family)))


def test_spherical_rotor_is_casimir() -> None:
    g = MonomialFunction({(4, 1, 3): 1.0})
    image = apply_rotor_diff(RotorConstants(1.0, 1.0, 1.0), g)
    assert _close(image, g.scaled(2 * 3))
    assert math.isclose(abs(image.coefficients[(4, 1, 3)]), 6.0)
