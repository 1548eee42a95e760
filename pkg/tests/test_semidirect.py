import pytest
from hypothesis import given, settings, strategies as st

from baerkit.baer import detect_class, relator_closure
from baerkit.intlinalg import AbelianInvariants
from baerkit.presentations import parse_input_file
from baerkit.selftest import SEMIDIRECT_SUITE
from baerkit.semidirect import (
    build_semidirect,
    materialize_subgroups,
    merge_invariants,
    validate_action,
    verify_direct_factor,
    verify_subgroup_decomposition,
)
from baerkit.subgroups import AmbientContext, quotient_order

T = AbelianInvariants


def suite_action(name):
    text, k_fixed = SEMIDIRECT_SUITE[name]
    return parse_input_file(text).action, k_fixed


def suite_report(name, c):
    spec, k_fixed = suite_action(name)
    sp = build_semidirect(spec)
    k = k_fixed if k_fixed is not None else detect_class(sp.combined, 6)
    assert k is not None
    return verify_direct_factor(sp, c, k)


class TestValidateAction:
    def test_inversion_on_z4(self):
        spec, _ = suite_action("d8")
        assert validate_action(spec, 1) == []

    def test_squaring_is_not_surjective(self):
        text, _ = SEMIDIRECT_SUITE["d8"]
        bad = parse_input_file(text.replace("a -> a^-1", "a -> a^2")).action
        problems = validate_action(bad, 1)
        assert any("surjectivity" in p for p in problems)

    def test_trivial_action(self):
        spec, _ = suite_action("klein_trivial")
        assert validate_action(spec, 1) == []

    def test_inverse_table_must_undo(self):
        text, _ = SEMIDIRECT_SUITE["z4_by_z4"]
        bad = parse_input_file(
            text.replace("inverse b : a -> a^-1", "inverse b : a -> a")
        ).action
        problems = validate_action(bad, 1)
        assert any("does not undo" in p for p in problems)

    def test_infinite_acted_needs_inverses(self):
        text, _ = SEMIDIRECT_SUITE["zz_trivial"]
        spec = parse_input_file(
            text.replace("  inverse b : a -> a\n", "")
        ).action
        problems = validate_action(spec, 1)
        assert any("inverse images required" in p for p in problems)

    def test_acting_relator_must_act_trivially(self):
        # Inversion under Z3 fails: b^3 would act as inversion, not identity.
        text = SEMIDIRECT_SUITE["d8"][0].replace("rel b^2", "rel b^3")
        spec = parse_input_file(text).action
        problems = validate_action(spec, 1)
        assert any("moves" in p for p in problems)


class TestBuild:
    def test_d8_combined(self):
        spec, _ = suite_action("d8")
        sp = build_semidirect(spec)
        assert [w.render() for w in sp.combined.relators] == [
            "a^4", "b^2", "a^-2 b^-1 a^-1 b a",
        ]
        assert sp.combined.alphabet.names() == ["a", "b"]
        closure = relator_closure(sp.combined, AmbientContext(2, 3))
        assert quotient_order(closure) == 8

    def test_trivial_action_reduces_to_commutator(self):
        spec, _ = suite_action("klein_trivial")
        sp = build_semidirect(spec)
        assert sp.rel_twist[0].render() == "b^-1 a^-1 b a"

    def test_z4_by_z4_order_sixteen(self):
        spec, _ = suite_action("z4_by_z4")
        sp = build_semidirect(spec)
        closure = relator_closure(sp.combined, AmbientContext(2, 3))
        assert quotient_order(closure) == 16

    def test_twist_relator_count(self):
        spec, _ = suite_action("z2_on_z2sq")
        sp = build_semidirect(spec)
        assert len(sp.rel_twist) == 2  # one per (acted gen, acting gen) pair


class TestDecomposition:
    @pytest.mark.parametrize("name", list(SEMIDIRECT_SUITE))
    @pytest.mark.parametrize("c", [1, 2])
    def test_all_checks_pass(self, name, c):
        report = suite_report(name, c)
        failed = [n for n, ok in report.checks.items() if not ok]
        assert not failed, failed

    def test_d8_values(self):
        report = suite_report("d8", 1)
        assert report.invariants_group == T(0, (2,))
        assert report.invariants_acting == T(0)
        assert report.invariants_complement == T(0, (2,))

    def test_klein_trivial_c2_values(self):
        report = suite_report("klein_trivial", 2)
        assert report.invariants_group == T(0, (2, 2))
        assert report.merged == T(0, (2, 2))

    def test_rank_three_elementary_abelian(self):
        report = suite_report("z2_on_z2sq", 1)
        assert report.invariants_group == T(0, (2, 2, 2))
        assert report.invariants_complement == T(0, (2, 2, 2))

    def test_infinite_example(self):
        report = suite_report("zz_trivial", 1)
        assert report.invariants_group == T(1)
        assert report.invariants_complement == T(1)

    def test_classic_denominator_check_only_at_c1(self):
        assert "classic_denominator_agrees" in suite_report("d8", 1).checks
        assert "classic_denominator_agrees" not in suite_report("d8", 2).checks

    def test_subgroup_checks_standalone(self):
        spec, _ = suite_action("klein_trivial")
        sp = build_semidirect(spec)
        table = materialize_subgroups(sp, 1, 1)
        checks = verify_subgroup_decomposition(table)
        assert all(checks.values()), checks
        assert table.twist.contains_all(table.rel_acted)


invariants_strategy = st.builds(
    T,
    st.integers(0, 2),
    st.sampled_from([(), (2,), (4,), (6,), (2, 4), (3,), (2, 2)]),
)


class TestMerge:
    def test_hand_examples(self):
        assert merge_invariants(T(0, (2,)), T(0, (2,))) == T(0, (2, 2))
        assert merge_invariants(T(0, (2,)), T(0, (4,))) == T(0, (2, 4))
        assert merge_invariants(T(0, (6,)), T(0, (4,))) == T(0, (2, 12))

    def test_free_ranks_add(self):
        assert merge_invariants(T(1), T(2, (3,))) == T(3, (3,))

    @given(invariants_strategy, invariants_strategy)
    @settings(max_examples=60)
    def test_commutative(self, a, b):
        assert merge_invariants(a, b) == merge_invariants(b, a)

    @given(invariants_strategy, invariants_strategy, invariants_strategy)
    @settings(max_examples=60)
    def test_associative(self, a, b, c):
        assert merge_invariants(merge_invariants(a, b), c) == merge_invariants(
            a, merge_invariants(b, c)
        )

    @given(invariants_strategy)
    @settings(max_examples=30)
    def test_unit(self, a):
        assert merge_invariants(a, T.trivial()) == a

    @given(invariants_strategy, invariants_strategy)
    @settings(max_examples=60)
    def test_order_multiplies(self, a, b):
        merged = merge_invariants(a, b)
        if a.order() is None or b.order() is None:
            assert merged.order() is None
        else:
            assert merged.order() == a.order() * b.order()
