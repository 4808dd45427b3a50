from fractions import Fraction

import pytest

from app.services import catalog
from app.services.gvs import (
    GradedSpace,
    LinearMap,
    NotAntisymmetric,
    TensorElem,
    act_on_word,
    contract,
    exact_nullspace,
    exact_rank,
    exact_solve,
    first_jacobi_failure,
    identity_map,
    jacobi_witness,
    jacobiator,
    koszul_act,
    koszul_sign,
    psi_map,
    sort_with_sign,
    split_power,
    symmetrizer_map,
)
from app.services.symgroup import GroupAlgElem, Permutation

MIXED = GradedSpace.from_pairs([("x", 0), ("t", 1)])
ODD_PAIR = GradedSpace.from_pairs([("p", 1), ("q", 1)])


def test_koszul_sign_counts_odd_crossings():
    assert koszul_sign([1, 1], [1, 0]) == -1
    assert koszul_sign([0, 1], [1, 0]) == 1
    assert koszul_sign([1, 1, 1], [2, 1, 0]) == -1


def test_sort_with_sign_kills_repeated_odd_letters():
    parity = MIXED.parities
    assert sort_with_sign((1, 0), parity) == (1, (0, 1))
    assert sort_with_sign((1, 1), parity)[0] == 0
    assert sort_with_sign((1, 0), ODD_PAIR.parities) == (-1, (0, 1))


def test_format_monomial():
    space = GradedSpace.from_pairs([("x", 0), ("y", 0)])
    assert space.format_monomial((0, 0, 1)) == "x^2*y"
    assert space.format_monomial(()) == "1"
    assert space.format_word((1, 0)) == "y⊗x"
    with pytest.raises(KeyError):
        space.index("w")


def test_letter_in_slot_i_moves_to_slot_g_of_i():
    sign, word = act_on_word(Permutation((2, 3, 1)), (0, 1, 2), (0, 0, 0))
    assert (sign, word) == (1, (2, 0, 1))


def test_odd_swap_picks_up_a_sign():
    t = TensorElem.word(ODD_PAIR, "p", "q")
    moved = koszul_act(GroupAlgElem.tau(2, 1), t)
    assert moved.terms == {(1, 0): -1}


def test_symmetrizer_map_is_idempotent():
    pi = symmetrizer_map(MIXED, 3)
    assert pi.compose(pi) == pi


@pytest.mark.parametrize("n", [2, 3])
def test_split_power_is_a_direct_sum(n):
    split = split_power(MIXED, n)
    words = MIXED.words(n)
    assert len(split.sym_basis) + len(split.alt_basis) == len(words)
    assert split.proj_sym.compose(split.incl_sym) == identity_map(split.sym_basis)
    assert split.proj_alt.compose(split.incl_alt) == identity_map(split.alt_basis)
    total = split.incl_sym.compose(split.proj_sym) + split.incl_alt.compose(split.proj_alt)
    assert total == identity_map(words)


def test_split_power_dimensions_with_an_odd_letter():
    split = split_power(MIXED, 2)
    assert split.sym_basis == [(0, 0), (0, 1)]
    assert sorted(split.alt_basis) == [(1, 0), (1, 1)]


@pytest.mark.parametrize("space", [MIXED, ODD_PAIR])
@pytest.mark.parametrize("n", [2, 3])
def test_psi_phi_splits_off_the_symmetric_part(space, n):
    psi, phi = psi_map(space, n)
    words = space.words(n)
    assert psi.compose(phi) == identity_map(words) - symmetrizer_map(space, n)


def test_jacobiator_vanishes_on_valid_algebras():
    for build in (catalog.sl2, catalog.h3, catalog.super_heisenberg):
        g = build()
        assert jacobiator(g.bracket_map(), g.space).is_zero()
        assert first_jacobi_failure(g.bracket_map(), g.space) is None
        assert jacobi_witness(g.alpha_map(), g.space) is not None


def test_jacobi_failure_is_located():
    g = catalog.invalid_jacobi()
    failure = first_jacobi_failure(g.bracket_map(), g.space)
    assert failure is not None and set(failure) <= {"x", "y", "z"}
    assert jacobi_witness(g.alpha_map(), g.space) is None

    odd = catalog.invalid_super()
    assert first_jacobi_failure(odd.bracket_map(), odd.space) == ("t", "t", "t")
    assert jacobi_witness(odd.alpha_map(), odd.space) is None


def test_symmetric_map_is_rejected():
    space = GradedSpace.from_pairs([("a", 0), ("b", 0)])
    symmetric = LinearMap(
        tuple(space.words(2)),
        {(0, 1): {0: 1}, (1, 0): {0: 1}},
    )
    with pytest.raises(NotAntisymmetric):
        jacobi_witness(symmetric, space)


def test_contract_takes_right_derivatives():
    space = GradedSpace.from_pairs([("v", 0)])
    assert contract({(0, 0): 1}, {(0,): 1}, space.parities) == {(0,): 2}
    assert contract({(0, 0): 1}, {(0, 0): 1}, space.parities) == {(): 2}


def test_exact_linear_algebra():
    columns = [{"a": 1, "b": 1}, {"a": 2, "b": 2}, {"b": 1}]
    assert exact_rank(columns) == 2
    assert len(exact_nullspace(columns)) == 1
    assert exact_solve(columns[::2], {"a": 3, "b": 5}) == [Fraction(3), Fraction(2)]
    assert exact_solve([{"a": 1}], {"b": 1}) is None
