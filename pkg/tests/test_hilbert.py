import numpy as np
import pytest

from utils.errors import InvalidLabelError, SpaceMismatchError
from utils.hilbert import (BasisLabel, SpaceSpec, Tower, TruncatedState, enumerate_basis, inner_product,
                           label_index, random_state)


def test_label_rejects_mixed_parity() -> None:
    with pytest.raises(InvalidLabelError):
        BasisLabel(1, 0, 1)
    with pytest.raises(InvalidLabelError):
        BasisLabel(2, 4, 0)


def test_label_halves() -> None:
    label = BasisLabel(3, -1, 3)
    assert (label.j, label.k, label.m) == (1.5, -0.5, 1.5)
    assert str(label) == "|3/2, -1/2, 3/2>"


def test_integer_tower_needs_even_cap() -> None:
    with pytest.raises(InvalidLabelError):
        SpaceSpec(3, Tower.INTEGER)


def test_dimensions() -> None:
    assert SpaceSpec(2).dim == 1 + 4 + 9
    assert SpaceSpec(4, Tower.INTEGER).dim == 1 + 9 + 25
    assert SpaceSpec(4, Tower.INTEGER).two_j_values() == [0, 2, 4]


def test_enumeration_matches_index() -> None:
    for space in (SpaceSpec(4), SpaceSpec(6, Tower.INTEGER)):
        labels = enumerate_basis(space)
        assert len(labels) == space.dim
        for position, label in enumerate(labels):
            assert label_index(space, label) == position


def test_index_orders_m_fastest() -> None:
    space = SpaceSpec(1)
    assert label_index(space, BasisLabel(1, -1, -1)) == 1
    assert label_index(space, BasisLabel(1, -1, 1)) == 2
    assert label_index(space, BasisLabel(1, 1, -1)) == 3


def test_integer_tower_excludes_half_integer_labels() -> None:
    space = SpaceSpec(4, Tower.INTEGER)
    assert not space.contains(BasisLabel(1, 1, 1))
    with pytest.raises(InvalidLabelError):
        TruncatedState(space, {BasisLabel(1, 1, 1): 1.0})


def test_vector_round_trip(rng) -> None:
    space = SpaceSpec(3)
    state = random_state(space, rng)
    again = TruncatedState.from_vector(space, state.to_vector())
    assert np.allclose(again.to_vector(), state.to_vector())
    assert np.isclose(inner_product(state, state), state.norm_squared())


def test_inner_product_is_conjugate_linear_in_bra(rng) -> None:
    space = SpaceSpec(2)
    a, b = random_state(space, rng), random_state(space, rng)
    assert np.isclose(inner_product(a.scaled(2j), b), -2j * inner_product(a, b))
    assert np.isclose(inner_product(a, b), np.vdot(a.to_vector(), b.to_vector()))


def test_space_mismatch() -> None:
    a = TruncatedState.basis_state(SpaceSpec(2), BasisLabel(0, 0, 0))
    b = TruncatedState.basis_state(SpaceSpec(4, Tower.INTEGER), BasisLabel(0, 0, 0))
    with pytest.raises(SpaceMismatchError):
        inner_product(a, b)
    with pytest.raises(SpaceMismatchError):
        a + b
