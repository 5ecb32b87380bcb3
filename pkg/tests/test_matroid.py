import itertools
import random

import pytest

from src.backend.errors import MatroidError
from src.backend.matroids.matroid import (
    AxiomViolation,
    Hypergraph,
    Matroid,
    circuits_lines,
    combine,
    dependence_cases,
    direct_sum,
    linear_matroid,
    projective_plane,
    proper_amalgam,
    rank_closure,
    two_sum,
    uniform,
    validate_matroid,
)
from src.backend.utils.sampling import random_amalgam_pair


class TestValidation:
    def test_uniform_is_valid(self, u23):
        assert isinstance(validate_matroid(Hypergraph(u23.ground, u23.table)), Matroid)

    def test_missing_empty_set(self):
        h = Hypergraph.from_sets(["a", "b"], [["a"], ["b"]])
        violation = validate_matroid(h)
        assert isinstance(violation, AxiomViolation)
        assert violation.axiom == "empty-set"
        assert violation.second == ("a",)

    def test_downward_closure(self):
        h = Hypergraph.from_sets(["a", "b"], [[], ["a", "b"]])
        violation = validate_matroid(h)
        assert violation.axiom == "downward-closure"
        assert violation.describe() == "downward-closure violated: {a} / {a,b}"

    def test_augmentation(self):
        h = Hypergraph.from_sets(["a", "b", "c"], [[], ["a"], ["b"], ["c"], ["a", "b"]])
        violation = validate_matroid(h)
        assert violation.axiom == "augmentation"

    def test_constructor_raises(self):
        with pytest.raises(MatroidError, match="augmentation"):
            Matroid(["a", "b", "c"], Hypergraph.from_sets(["a", "b", "c"], [[], ["a"], ["b"], ["c"], ["a", "b"]]).table)

    def test_unknown_element(self):
        with pytest.raises(MatroidError):
            Hypergraph.from_sets(["a"], [["z"]])

    def test_wrong_table_length(self):
        with pytest.raises(MatroidError):
            Hypergraph(["a", "b"], [True, False])


class TestRankAndClosure:
    def test_rank_closure(self, u23):
        assert rank_closure(u23, ["a"]) == (1, ("a",))
        assert rank_closure(u23, ["a", "b"]) == (2, ("a", "b", "c"))

    def test_flats_of_triangle(self, u23):
        assert len(u23.flats()) == 5
        assert len(u23.flats(1)) == 3

    def test_loops_and_coloops(self):
        m = linear_matroid([("a", (1, 0)), ("b", (0, 1)), ("z", (0, 0))], 2)
        assert m.loops() == ("z",)
        assert m.coloops() == ("a", "b")

    def test_greedy_basis(self, fano):
        assert fano.basis() == ("001", "010", "100")

    def test_skew_by_rank_and_by_circuits_agree(self, fano):
        for assignment in itertools.product(range(3), repeat=fano.size):
            x = sum(1 << i for i, side in enumerate(assignment) if side == 1)
            y = sum(1 << i for i, side in enumerate(assignment) if side == 2)
            assert fano.is_skew(x, y) == fano.skew_by_circuits(x, y)

    def test_skew_needs_disjoint_sets(self, u23):
        with pytest.raises(MatroidError):
            u23.is_skew(["a"], ["a", "b"])


class TestCircuitsAndLines:
    def test_circuits_lines_of_u24(self):
        circuits, lines = circuits_lines(uniform(2, ["a", "b", "c", "d"]))
        assert circuits == [("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")]
        assert lines == [("a", "b", "c", "d")]

    def test_triangle_has_no_long_line(self, u23):
        assert u23.circuits() == [0b111]
        assert u23.long_lines() == []

    def test_fano(self, fano):
        assert fano.size == 7
        assert fano.rank() == 3
        assert sum(1 for c in fano.circuits() if bin(c).count("1") == 3) == 7
        assert fano.long_lines() == []
        assert fano.is_modular()

    def test_pg23_lines(self):
        plane = projective_plane(3)
        assert plane.size == 13
        assert len(plane.long_lines()) == 13

    def test_composite_order_rejected(self):
        with pytest.raises(MatroidError):
            projective_plane(4)
        with pytest.raises(MatroidError):
            linear_matroid([("a", (1,))], 4)


class TestCombinations:
    def test_linear_triangle(self, u23):
        m = linear_matroid([("a", (1, 0)), ("b", (0, 1)), ("c", (1, 1))], 2)
        assert m == u23

    def test_restriction_to_a_line(self, fano):
        assert fano.restriction(["001", "010", "011"]) == uniform(2, ["001", "010", "011"])

    def test_direct_sum(self, u12):
        m = direct_sum(u12, uniform(1, ["c", "d"]))
        assert m.ground == ("a", "b", "c", "d")
        assert m.rank() == 2
        assert circuits_lines(m)[0] == [("a", "b"), ("c", "d")]

    def test_direct_sum_overlap(self, u12):
        with pytest.raises(MatroidError, match="disjoint"):
            direct_sum(u12, u12)

    def test_two_sum_of_triangles_is_a_square(self):
        m = two_sum(uniform(2, ["a", "b", "e"]), uniform(2, ["e", "c", "d"]), "e")
        assert m == uniform(3, ["a", "b", "c", "d"])

    def test_two_sum_needs_single_basepoint(self, u23):
        with pytest.raises(MatroidError):
            two_sum(u23, u23, "a")

    def test_combine_dispatch(self, u23):
        assert combine("restriction", u23, ["a", "b"]) == uniform(2, ["a", "b"])
        with pytest.raises(MatroidError):
            combine("tensor", u23, u23)


class TestAmalgams:
    def test_two_triangles_give_u24(self):
        amalgam = proper_amalgam(uniform(2, ["p", "q", "a"]), uniform(2, ["p", "q", "b"]))
        assert amalgam == uniform(2, ["p", "q", "a", "b"])

    def test_different_restrictions(self):
        with pytest.raises(MatroidError, match="restrict differently"):
            proper_amalgam(uniform(1, ["p", "q", "a"]), uniform(2, ["p", "q", "b"]))

    def test_non_modular_base(self):
        with pytest.raises(MatroidError, match="not modular"):
            proper_amalgam(uniform(3, ["a", "b", "c", "d", "e", "x"]), uniform(3, ["a", "b", "c", "d", "e", "y"]))

    def test_cases(self):
        m1, m2 = uniform(2, ["p", "q", "a"]), uniform(2, ["p", "q", "b"])
        assert dependence_cases(m1, m2, ["a", "b", "p"]).case == "i"
        assert dependence_cases(m1, m2, ["a", "p", "q"]).case == "side-dependence"
        verdict = dependence_cases(m1, m2, ["a", "b"])
        assert not verdict.dependent
        assert verdict.case == "none"

    def test_cases_need_a_rank_two_base(self):
        with pytest.raises(MatroidError, match="rank 2"):
            dependence_cases(uniform(1, ["p", "a"]), uniform(1, ["p", "b"]), ["a"])

    @pytest.mark.parametrize("seed", range(8))
    def test_cases_match_the_amalgam(self, seed):
        m1, m2 = random_amalgam_pair(random.Random(seed))
        amalgam = proper_amalgam(m1, m2)
        for X in range(amalgam.full_mask + 1):
            verdict = dependence_cases(m1, m2, amalgam.labels(X))
            assert verdict.dependent == (not amalgam.table[X])
