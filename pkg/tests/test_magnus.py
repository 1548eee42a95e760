import pytest
from hypothesis import given, settings, strategies as st

from baerkit.magnus import (
    GroupElement,
    TruncatedSeries,
    generator_element,
    identity_element,
    leading_part,
    reindex_element,
    series_of_letters,
    series_of_word,
    weight_of,
)
from baerkit.presentations import Alphabet, parse_word

AB = Alphabet(["x", "y"])


def elem(text, n=2, cap=4):
    return series_of_word(parse_word(text, AB), n, cap)


class TestSeriesOfWord:
    def test_generator_image(self):
        assert elem("x", cap=3).series.terms == {(): 1, (0,): 1}

    def test_identity(self):
        assert elem("x x^-1", cap=3).is_identity

    def test_commutator_hand_value(self):
        # (1-X+X^2)(1-Y+Y^2)(1+X)(1+Y) truncated at degree 2.
        assert elem("[x,y]", cap=2).series.terms == {
            (): 1, (0, 1): 1, (1, 0): -1,
        }

    def test_generator_inverse_is_alternating(self):
        inv = generator_element(0, 2, 4).inverse()
        assert inv.series.terms == {
            (): 1, (0,): -1, (0, 0): 1, (0, 0, 0): -1, (0, 0, 0, 0): 1,
        }

    def test_alphabet_too_large(self):
        with pytest.raises(ValueError):
            series_of_word(parse_word("x", AB), 1, 3)


class TestGroupOps:
    def test_identity_neutral(self):
        g = elem("x y^2")
        assert g * identity_element(4) == g

    def test_invert_matches_word_inverse(self):
        assert elem("x").inverse() == elem("x^-1")

    def test_commutator_convention(self):
        g = generator_element(0, 2, 2)
        h = generator_element(1, 2, 2)
        assert g.commutator(h).series.terms == {(): 1, (0, 1): 1, (1, 0): -1}

    def test_cap_mismatch(self):
        with pytest.raises(ValueError):
            elem("x", cap=3) * elem("x", cap=4)

    def test_pow(self):
        assert elem("x") ** 3 == elem("x^3")
        assert elem("x y") ** -2 == elem("(x y)^-2")

    def test_constant_term_enforced(self):
        with pytest.raises(ValueError):
            GroupElement(TruncatedSeries(2, {(): 2}))


class TestWeight:
    def test_identity_infinite(self):
        assert weight_of(elem("1")) is None

    def test_commutator_weight(self):
        assert weight_of(elem("[x,y]")) == 2

    def test_nested_commutator_weight(self):
        assert weight_of(elem("[[x,y],y]")) == 3

    def test_leading_parts(self):
        assert leading_part(elem("[x,y]")) == {(0, 1): 1, (1, 0): -1}
        assert leading_part(elem("x")) == {(0,): 1}
        assert leading_part(elem("x^2")) == {(0,): 2}
        with pytest.raises(ValueError):
            leading_part(elem("1"))


letters = st.lists(
    st.tuples(st.integers(0, 1), st.sampled_from((1, -1))), max_size=8
)


@given(letters, letters, st.integers(2, 4))
@settings(max_examples=80)
def test_homomorphism(a, b, cap):
    ga = series_of_letters(a, 2, cap)
    gb = series_of_letters(b, 2, cap)
    assert ga * gb == series_of_letters(list(a) + list(b), 2, cap)


@given(letters, st.integers(2, 5))
@settings(max_examples=80)
def test_inverse_exact(a, cap):
    g = series_of_letters(a, 2, cap)
    assert (g * g.inverse()).is_identity


@given(letters, letters)
@settings(max_examples=60)
def test_commutator_filtration(a, b):
    cap = 5
    g = series_of_letters(a, 2, cap)
    h = series_of_letters(b, 2, cap)
    wg, wh = g.weight(), h.weight()
    if wg is None or wh is None:
        assert g.commutator(h).weight() is None or True
        return
    wc = g.commutator(h).weight()
    assert wc is None or wc >= wg + wh


def test_reindex_is_homomorphic():
    g = elem("[x,y] x^2", cap=3)
    shifted = reindex_element(g, 1, 3)
    assert shifted.series.terms == {
        tuple(i + 1 for i in mono): c for mono, c in g.series.terms.items()
    }
    with pytest.raises(ValueError):
        reindex_element(g, 2, 3)


def test_sorted_terms_length_lex():
    g = elem("y x [x,y]")
    monos = [m for m, _ in g.series.sorted_terms()]
    assert monos == sorted(monos, key=lambda m: (len(m), m))
