import random

import pytest

from baerkit.errors import CapacityError
from baerkit.intlinalg import AbelianInvariants, abelian_invariants
from baerkit.presentations import Alphabet, parse_word
from baerkit.subgroups import (
    AmbientContext,
    commutator_with,
    embedded_copy,
    insert_and_close,
    intersect_with_gamma,
    is_full,
    join,
    lattices_intersect_trivially,
    quotient_invariants,
    quotient_order,
    trivial_subgroup,
)

ABX = Alphabet(["x"])
ABXY = Alphabet(["x", "y"])


def closure(amb, alphabet, words, normal=True):
    els = [amb.element_of_word(parse_word(t, alphabet)) for t in words]
    return insert_and_close(None, amb, els, normal)


@pytest.fixture
def amb1():
    return AmbientContext(1, 1)


@pytest.fixture
def amb22():
    return AmbientContext(2, 2)


class TestAmbient:
    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            AmbientContext(2, 3, monomial_budget=5)
        AmbientContext(2, 3, monomial_budget=None)

    def test_full_group_is_saturated_and_full(self, amb22):
        full = amb22.full_group()
        assert is_full(full)
        assert quotient_order(full) == 1

    def test_leading_coordinates(self, amb22):
        g = amb22.element_of_word(parse_word("[x,y]", ABXY))
        assert amb22.leading_coordinates(g) == (2, [1])


class TestClosure:
    def test_cyclic_square(self, amb1):
        u = closure(amb1, ABX, ["x^2"])
        assert u.lattice_rows(1) == [[2]]

    def test_klein_relators(self, amb22):
        u = closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])
        assert u.levels[0].index() == 4
        assert u.levels[1].is_full

    def test_commutator_closure(self, amb22):
        u = closure(amb22, ABXY, ["[x,y]"])
        assert u.lattice_rows(1) == []
        assert u.levels[1].is_full

    def test_conjugates_feed_higher_levels(self):
        # In the class-3 quotient the commutator relator's conjugates
        # populate degree 3 entirely.
        amb = AmbientContext(2, 3)
        u = closure(amb, ABXY, ["[x,y]"])
        assert u.levels[2].is_full

    def test_plain_closure_is_not_normal(self):
        amb = AmbientContext(2, 2)
        plain = closure(amb, ABXY, ["x^2"], normal=False)
        g = amb.element_of_word(parse_word("y^-1 x^2 y", ABXY))
        assert not plain.contains(g)
        norm = closure(amb, ABXY, ["x^2"], normal=True)
        assert norm.contains(g)


class TestSieve:
    def test_member_with_recipe(self, amb1):
        u = closure(amb1, ABX, ["x^2"])
        res = u.sieve(amb1.element_of_word(parse_word("x^4", ABX)))
        assert res.member
        assert res.recipe == [((1, 0), 2)]

    def test_residue(self, amb1):
        u = closure(amb1, ABX, ["x^2"])
        res = u.sieve(amb1.element_of_word(parse_word("x", ABX)))
        assert not res.member
        assert res.residue.weight() == 1

    def test_identity_member_empty_recipe(self, amb1):
        u = closure(amb1, ABX, ["x^2"])
        res = u.sieve(amb1.identity())
        assert res.member and res.recipe == []

    def test_recipe_multiplies_out(self, amb22):
        u = closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])
        g = amb22.element_of_word(parse_word("x^2 y^2 [x,y]", ABXY))
        res = u.sieve(g)
        assert res.member
        out = amb22.identity()
        for ref, e in res.recipe:
            out = out * u.resolve(ref) ** e
        assert out == g

    def test_ambient_mismatch(self, amb22):
        u = closure(amb22, ABXY, ["x^2"])
        other = AmbientContext(2, 3)
        with pytest.raises(ValueError):
            u.sieve(other.element_of_word(parse_word("x", ABXY)))


class TestJoin:
    def test_identity_laws(self, amb1):
        u = closure(amb1, ABX, ["x^2"])
        assert join(u, trivial_subgroup(amb1)).equal_as_subgroup(u)
        assert join(u, u).equal_as_subgroup(u)

    def test_gcd(self, amb1):
        u = closure(amb1, ABX, ["x^2"])
        v = closure(amb1, ABX, ["x^3"])
        assert join(u, v).levels[0].is_full

    def test_contains_both(self, amb22):
        u = closure(amb22, ABXY, ["x^2"])
        v = closure(amb22, ABXY, ["y^2"])
        j = join(u, v)
        assert j.contains_all(u) and j.contains_all(v)


class TestCommutator:
    def test_trivial_left(self, amb22):
        t = commutator_with(trivial_subgroup(amb22), amb22.full_group())
        assert not any(level.rows for level in t.levels)

    def test_rank_one_abelian(self):
        amb = AmbientContext(1, 2)
        t = commutator_with(amb.full_group(), amb.full_group())
        assert not any(level.rows for level in t.levels)

    def test_klein_denominator(self, amb22):
        r = closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])
        d = commutator_with(r, amb22.full_group())
        assert d.lattice_rows(2) == [[2]]


class TestGammaSlice:
    def test_full_slice(self, amb22):
        full = amb22.full_group()
        assert intersect_with_gamma(full, 1).equal_as_subgroup(full)

    def test_klein_slice(self, amb22):
        r = closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])
        s = intersect_with_gamma(r, 2)
        assert s.lattice_rows(1) == []
        assert s.levels[1].is_full
        # Every stored element of weight >= 2 stays a member.
        for m, _, el in r.stored():
            if m >= 2:
                assert s.contains(el)

    def test_trivial_slice(self, amb22):
        s = intersect_with_gamma(trivial_subgroup(amb22), 2)
        assert not any(level.rows for level in s.levels)

    def test_degree_beyond_cap(self, amb22):
        with pytest.raises(ValueError):
            intersect_with_gamma(amb22.full_group(), 3)


class TestQuotients:
    def test_equal_groups_trivial(self, amb22):
        r = closure(amb22, ABXY, ["[x,y]"])
        n = intersect_with_gamma(r, 2)
        assert quotient_invariants(n, n) == AbelianInvariants(0)

    def test_free_rank(self, amb22):
        r = closure(amb22, ABXY, ["[x,y]"])
        n = intersect_with_gamma(r, 2)
        assert quotient_invariants(n, trivial_subgroup(amb22)) == AbelianInvariants(1)

    def test_klein_multiplier(self, amb22):
        r = closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])
        n = intersect_with_gamma(r, 2)
        d = commutator_with(r, amb22.full_group())
        assert quotient_invariants(n, d) == AbelianInvariants(0, (2,))

    def test_containment_checked(self, amb22):
        small = closure(amb22, ABXY, ["x^4"])
        big = closure(amb22, ABXY, ["x^2"])
        with pytest.raises(ValueError, match="not contained"):
            quotient_invariants(small, big)

    def test_abelianness_checked(self):
        amb = AmbientContext(2, 3)
        full = insert_and_close(
            None, amb, amb.generators, normal=True
        )
        with pytest.raises(ValueError, match="not abelian"):
            quotient_invariants(full, trivial_subgroup(amb))


class TestOrder:
    def test_cyclic(self, amb1):
        assert quotient_order(closure(amb1, ABX, ["x^4"])) == 4

    def test_klein(self, amb22):
        assert quotient_order(closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])) == 4

    def test_infinite(self, amb22):
        assert quotient_order(closure(amb22, ABXY, ["[x,y]"])) is None

    def test_cross_check_with_abelian_invariants(self, amb22):
        rng = random.Random(7)
        for _ in range(25):
            rows = [
                [rng.randrange(-4, 5) for _ in range(2)]
                for _ in range(rng.randrange(0, 4))
            ]
            words = ["[x,y]"]
            for ex, ey in rows:
                text = " ".join(
                    p for p in (f"x^{ex}" if ex else "", f"y^{ey}" if ey else "")
                    if p
                )
                if text:
                    words.append(text)
            u = closure(amb22, ABXY, words)
            assert quotient_order(u) == abelian_invariants(2, rows).order()


class TestSaturation:
    def test_stability(self, amb22):
        u = closure(amb22, ABXY, ["x^2", "y^2", "[x,y]"])
        v = insert_and_close(u, amb22, [], u.normal)
        assert all(a.rows == b.rows for a, b in zip(u.levels, v.levels))

    def test_products_and_inverses_members(self, amb22):
        u = closure(amb22, ABXY, ["x^2", "y^3 x^2"])
        stored = [el for _, _, el in u.stored()]
        for a in stored:
            assert u.contains(a.inverse())
            for b in stored:
                assert u.contains(a * b)

    def test_generator_conjugates_members(self, amb22):
        u = closure(amb22, ABXY, ["x^2 y^2"])
        for _, _, el in u.stored():
            for t in amb22.generators + amb22.generator_inverses:
                assert u.contains(el.conjugate(t))


class TestEmbedding:
    def test_embedded_subgroup(self):
        target = AmbientContext(3, 2)
        sub = AmbientContext(1, 2)
        u = closure(sub, ABX, ["x^2"])
        e = embedded_copy(u, target, 2, normal=False)
        abz = Alphabet(["a", "b", "z"])
        assert e.contains(target.element_of_word(parse_word("z^2", abz)))
        assert not e.contains(target.element_of_word(parse_word("a", abz)))

    def test_free_factors_meet_trivially(self):
        target = AmbientContext(2, 3)
        sub = AmbientContext(1, 3)
        left = embedded_copy(sub.full_group(), target, 0, normal=False)
        right = embedded_copy(sub.full_group(), target, 1, normal=False)
        assert lattices_intersect_trivially(left, right)
        assert not lattices_intersect_trivially(left, left)
