from fractions import Fraction

import pytest

from app.services.symgroup import (
    ArityMismatch,
    GroupAlgElem,
    Permutation,
    all_permutations,
    check_decomposition,
    ideal_decomposition,
    reference_decomposition,
    symmetrizer,
)


def test_product_is_composition():
    g = Permutation((2, 3, 1))
    h = Permutation.transposition(3, 1)
    assert (g * h)(1) == g(h(1)) == 3
    assert g * g.inverse() == Permutation.identity(3)


def test_reduced_word_reassembles_the_permutation():
    for perm in all_permutations(4):
        word = perm.reduced_word()
        product = Permutation.identity(4)
        for k in word:
            product = Permutation.transposition(4, k) * product
        assert product == perm
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm.images[i] > perm.images[j])
        assert len(word) == inversions


def test_symmetrizer_is_idempotent():
    pi = symmetrizer(3)
    assert pi * pi == pi
    assert sum(pi.terms.values()) == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_ideal_decomposition(n):
    assert check_decomposition(n, ideal_decomposition(n))


def test_reference_decomposition_for_three_letters():
    a1, a2 = reference_decomposition(3)
    tau1, tau2 = GroupAlgElem.tau(3, 1), GroupAlgElem.tau(3, 2)
    assert a2 == (GroupAlgElem.one(3) + tau1).scaled(Fraction(1, 3))
    assert a1.scaled(6) == GroupAlgElem.one(3).scaled(3) + tau2 + tau2 * tau1
    assert check_decomposition(3, [a1, a2])


def test_wrong_decomposition_is_rejected():
    a1, a2 = reference_decomposition(3)
    assert not check_decomposition(3, [a1, a2.scaled(2)])


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        GroupAlgElem.one(2) + GroupAlgElem.one(3)
    with pytest.raises(ArityMismatch):
        check_decomposition(3, ideal_decomposition(4))
