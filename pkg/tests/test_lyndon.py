from itertools import product

import pytest

from baerkit.lyndon import (
    bracket_shape,
    bracketing,
    get_basis,
    is_lyndon,
    lie_coordinates,
    lyndon_words,
    standard_factorization,
    witt_dimension,
)
from baerkit.subgroups import AmbientContext


def brute_force_lyndon(n, m):
    """Independent oracle: a word is Lyndon iff it is strictly smaller than
    every proper rotation (hence aperiodic)."""
    out = []
    for word in product(range(n), repeat=m):
        rotations = [word[i:] + word[:i] for i in range(1, m)]
        if all(word < r for r in rotations):
            out.append(word)
    return out


class TestLyndonWords:
    def test_hand_examples(self):
        assert lyndon_words(2, 2) == [(0, 1)]
        assert lyndon_words(2, 3) == [(0, 0, 1), (0, 1, 1)]
        assert lyndon_words(1, 2) == []

    @pytest.mark.parametrize("n,m", [(n, m) for n in (1, 2, 3) for m in (1, 2, 3, 4, 5)])
    def test_against_rotation_oracle(self, n, m):
        assert lyndon_words(n, m) == brute_force_lyndon(n, m)

    def test_sorted_output(self):
        words = lyndon_words(3, 4)
        assert words == sorted(words)


class TestWitt:
    def test_hand_values(self):
        assert witt_dimension(2, 1) == 2
        assert witt_dimension(2, 4) == 3  # (16 - 4) / 4
        assert witt_dimension(3, 3) == 8  # (27 - 3) / 3

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
    def test_matches_enumeration(self, n, m):
        assert witt_dimension(n, m) == len(lyndon_words(n, m))


class TestBracketing:
    def test_single_letter(self):
        b = bracketing((0,))
        assert b.letters == ((0, 1),)
        assert b.expansion == {(0,): 1}

    def test_ab(self):
        b = bracketing((0, 1))
        assert b.expansion == {(0, 1): 1, (1, 0): -1}

    def test_aab_factorization(self):
        assert standard_factorization((0, 0, 1)) == ((0,), (0, 1))
        assert bracket_shape((0, 0, 1)) == (0, (0, 1))
        assert bracketing((0, 0, 1)).expansion == {
            (0, 0, 1): 1, (0, 1, 0): -2, (1, 0, 0): 1,
        }

    def test_longest_proper_lyndon_suffix(self):
        # aabab = aab * ab: ab is the longest Lyndon proper suffix.
        assert standard_factorization((0, 0, 1, 0, 1)) == ((0, 0, 1), (0, 1))

    def test_rejects_non_lyndon(self):
        with pytest.raises(ValueError):
            bracketing((1, 0))
        assert not is_lyndon((0, 1, 0, 1))


class TestLieCoordinates:
    def test_basis_vector(self):
        assert lie_coordinates({(0, 1): 1, (1, 0): -1}, 2) == [1]

    def test_symmetric_tensor_rejected(self):
        assert lie_coordinates({(0, 1): 1, (1, 0): 1}, 2) is None

    def test_linearity(self):
        assert lie_coordinates({(0, 1): 2, (1, 0): -2}, 2) == [2]

    def test_inhomogeneous_rejected(self):
        with pytest.raises(ValueError):
            lie_coordinates({(0,): 1, (0, 1): 1}, 2)

    def test_degree_three(self):
        # [x,[x,y]] expansion is a basis row.
        exp = bracketing((0, 0, 1)).expansion
        assert lie_coordinates(exp, 2) == [1, 0]
        # Sum of both basis rows.
        both = dict(exp)
        for mono, c in bracketing((0, 1, 1)).expansion.items():
            both[mono] = both.get(mono, 0) + c
        assert lie_coordinates(both, 2) == [1, 1]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_triangularity(n):
    """The group-word bracketing of each Lyndon word has weight equal to its
    length and unit leading coordinates at its own basis position."""
    amb = AmbientContext(n, 5)
    for m in range(1, 6):
        basis = amb.basis(m)
        for j, word in enumerate(basis.words):
            el = amb.bracket_element(word)
            assert el.weight() == m
            coords = basis.coordinates(el.leading())
            assert coords == [int(i == j) for i in range(len(basis))]


def test_expansion_support_is_upward_closed():
    # Triangularity in the raw expansion: support only on monomials >= word.
    for n, m in [(2, 3), (2, 4), (3, 3)]:
        for word in lyndon_words(n, m):
            exp = bracketing(word).expansion
            assert exp[word] == 1
            assert all(mono >= word for mono in exp)


def test_basis_cached():
    assert get_basis(2, 3) is get_basis(2, 3)
