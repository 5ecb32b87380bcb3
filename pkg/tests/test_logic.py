import pytest

from src.backend.config_loader import CONFIG
from src.backend.errors import BudgetExceeded, FormulaError
from src.backend.logic import (
    And,
    Count,
    Exists,
    Hyp,
    Not,
    Subset,
    lambda_bound,
    lint_formula,
    parse_formula,
    satisfies,
)
from src.backend.matroids.matroid import Hypergraph


class TestConstruction:
    def test_sentence_metadata(self):
        f = parse_formula("exists Z1 hyp(Z1)")
        assert f == Exists(1, Hyp(1))
        assert f.is_sentence
        assert f.var == frozenset({1})
        assert f.bound == frozenset({1})
        assert f.min_delta == 1

    def test_conjunction_clash(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("exists Z1 (hyp(Z1) & exists Z1 hyp(Z1))")
        assert exc.value.rule == "and-disjointness"
        assert exc.value.position is not None

    def test_quantified_variable_must_be_free(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("exists Z1 hyp(Z2)")
        assert exc.value.rule == "exists-free"

    def test_counting_atom_range(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("|Z1| = 2 mod 2")
        assert exc.value.rule == "count"
        with pytest.raises(FormulaError):
            Count(1, 0, 1)

    def test_variable_range(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("hyp(Z0)")
        assert exc.value.rule == "variable-range"

    def test_min_delta_is_largest_modulus(self):
        f = parse_formula("|Z1| = 1 mod 3 & |Z2| = 0 mod 5")
        assert f.min_delta == 5
        assert f.confined(5)
        assert not f.confined(4)

    def test_and_built_directly(self):
        with pytest.raises(FormulaError):
            And(Hyp(1), Exists(1, Hyp(1)))


class TestSyntax:
    def test_exists_scopes_right(self):
        f = parse_formula("exists Z1 hyp(Z1) & Z1 <= Z1")
        assert f == Exists(1, And(Hyp(1), Subset(1, 1)))

    def test_render_round_trip(self):
        text = "~(exists Z1 hyp(Z1)) & Z2 <= Z3"
        f = parse_formula(text)
        assert f == And(Not(Exists(1, Hyp(1))), Subset(2, 3))
        assert f.render() == text
        assert parse_formula(f.render()) == f

    def test_unicode_spelling(self):
        assert parse_formula("∃Z1 ¬hyp(Z1)") == Exists(1, Not(Hyp(1)))

    def test_comments(self):
        assert parse_formula("hyp(Z1)  # independent") == Hyp(1)

    def test_lexical_error_position(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("hyp(Z1) $")
        assert exc.value.position == 8
        assert exc.value.rule == "token"

    def test_unclosed_atom(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("hyp(Z1")
        assert exc.value.rule == "hyp"

    def test_trailing_input(self):
        with pytest.raises(FormulaError) as exc:
            parse_formula("hyp(Z1) hyp(Z2)")
        assert exc.value.rule == "trailing-input"

    def test_node_budget(self):
        with pytest.raises(BudgetExceeded):
            parse_formula("~" * CONFIG["formula_max_nodes"] + "hyp(Z1)")


class TestLint:
    def test_renames_the_bound_side(self):
        suggestion, messages = lint_formula("exists Z1 (hyp(Z1) & exists Z1 hyp(Z1))")
        assert suggestion == "exists Z1 hyp(Z1) & (exists Z2 hyp(Z2))"
        assert len(messages) == 1
        assert "renamed the bound Z1 to Z2" in messages[0]
        parse_formula(suggestion)

    def test_clean_formula(self):
        assert lint_formula("exists Z1 hyp(Z1)") == ("exists Z1 hyp(Z1)", [])


class TestSatisfaction:
    def test_odd_independent_set(self, u12):
        f = parse_formula("exists Z1 (hyp(Z1) & |Z1| = 1 mod 2)")
        assert satisfies(u12, f)

    def test_empty_set_is_independent(self, fano, u23):
        f = parse_formula("exists Z1 hyp(Z1)")
        assert satisfies(fano, f)
        assert satisfies(u23, f)

    def test_no_hyperedges(self):
        empty = Hypergraph(["a"], [False, False])
        assert not satisfies(empty, parse_formula("exists Z1 hyp(Z1)"))

    def test_free_variables_by_label(self, u23):
        assert satisfies(u23, Hyp(1), {1: ["a", "b"]})
        assert not satisfies(u23, Hyp(1), {1: ["a", "b", "c"]})
        assert satisfies(u23, Subset(1, 2), {1: ["a"], 2: ["a", "b"]})

    def test_negation(self, u23):
        for X in range(8):
            assert satisfies(u23, Not(Hyp(1)), {1: X}) != satisfies(u23, Hyp(1), {1: X})

    def test_interpretation_domain(self, u23):
        with pytest.raises(FormulaError) as exc:
            satisfies(u23, Hyp(1))
        assert exc.value.rule == "interpretation"

    def test_empty_ground(self):
        h = Hypergraph([], [True])
        assert satisfies(h, parse_formula("exists Z1 |Z1| = 0 mod 2"))
        assert not satisfies(h, parse_formula("exists Z1 |Z1| = 1 mod 2"))

    def test_three_point_line_in_fano(self, fano):
        # some 3-set is dependent
        f = parse_formula("exists Z1 (~hyp(Z1) & |Z1| = 0 mod 3)")
        assert satisfies(fano, f)


class TestLambdaBound:
    def test_hyp(self):
        assert lambda_bound(Hyp(1), 1, 2, 1) == 2

    def test_subset(self):
        assert lambda_bound(Subset(1, 2), 2, 1, 1) == 16

    def test_exists(self):
        assert lambda_bound(Exists(1, Hyp(1)), 1, 2, 1) == 4

    def test_count_and_conjunction(self):
        assert lambda_bound(Count(1, 0, 3), 1, 1, 3) == 6
        assert lambda_bound(And(Hyp(1), Subset(1, 1)), 1, 2, 1) == 4

    def test_negation_preserves(self):
        assert lambda_bound(Not(Hyp(1)), 2, 3, 1) == lambda_bound(Hyp(1), 2, 3, 1)

    def test_not_confined(self):
        with pytest.raises(FormulaError) as exc:
            lambda_bound(Count(1, 0, 3), 1, 1, 2)
        assert exc.value.rule == "delta-confined"

    def test_too_few_variables(self):
        with pytest.raises(FormulaError):
            lambda_bound(Subset(1, 2), 1, 1, 1)

    def test_monotone_in_colours(self):
        f = parse_formula("exists Z1 (hyp(Z1) & Z1 <= Z2)")
        values = [lambda_bound(f, 2, t, 1) for t in range(1, 4)]
        assert values == sorted(values)

    def test_bit_cap(self, monkeypatch):
        monkeypatch.setitem(CONFIG, "lambda_max_bits", 10)
        with pytest.raises(BudgetExceeded):
            lambda_bound(parse_formula("exists Z1 exists Z2 Z1 <= Z2"), 2, 1, 1)
