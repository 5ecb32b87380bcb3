import random

import numpy as np
import pytest

from src.backend.coloured import encoders
from src.backend.coloured.analysis import (
    EquivalenceReport,
    all_systems,
    classify_systems,
    cleft_search,
    equivalence_report,
)
from src.backend.coloured.registry import registry, sympathetic
from src.backend.coloured.systems import ColouredComplement, ColouredSystem, coloured_sum
from src.backend.errors import BudgetExceeded, ColouredError, FormulaError
from src.backend.logic import Count, Exists, Hyp, Subset, lambda_bound, parse_formula, satisfies
from src.backend.matroids import matroid
from src.backend.utils.sampling import random_assignment, random_complement, random_formula, random_system

COLOURS = ("c1", "c2")
SOME_INDEPENDENT = Exists(1, Hyp(1))


def constant(colour, ground=("u1",)):
    return ColouredSystem(ground, COLOURS, [COLOURS.index(colour)] * (1 << len(ground)))


class TestSystems:
    def test_colour_lookup(self):
        m = ColouredSystem(["u1", "u2"], COLOURS, [0, 1, 1, 0])
        assert m.colour(["u2"]) == "c2"
        assert m.colour(["u1", "u2"]) == "c1"

    def test_from_function(self):
        m = ColouredSystem.from_function(["u1", "u2"], COLOURS, lambda X: "c2" if X == 3 else 0)
        assert list(m.table) == [0, 0, 0, 1]

    def test_colour_out_of_range(self):
        with pytest.raises(ColouredError):
            ColouredSystem(["u1"], COLOURS, [0, 2])

    def test_needs_colours(self):
        with pytest.raises(ColouredError):
            ColouredSystem(["u1"], [], [0, 0])

    def test_complement_round_trip(self):
        pi = ColouredComplement.from_accepted(["v1"], COLOURS, [([], "c2"), (["v1"], "c1")])
        assert pi.accepts([], "c2")
        assert not pi.accepts(["v1"], "c2")
        assert pi.accepted() == [((), "c2"), (("v1",), "c1")]

    def test_coloured_sum(self):
        m = ColouredSystem(["u1"], COLOURS, [0, 1])
        pi = ColouredComplement.from_accepted(["v1"], COLOURS, [([], "c2"), (["v1"], "c1")])
        h = coloured_sum(m, pi)
        assert h.ground == ("u1", "v1")
        assert h.hyperedges() == [0b01, 0b10]

    def test_sum_needs_disjoint_grounds(self):
        m = constant("c1")
        pi = ColouredComplement.from_accepted(["u1"], COLOURS, [])
        with pytest.raises(ColouredError, match="share"):
            coloured_sum(m, pi)

    def test_sum_needs_equal_colours(self):
        pi = ColouredComplement.from_accepted(["v1"], ("c1", "c2", "c3"), [])
        with pytest.raises(ColouredError, match="colour sets differ"):
            coloured_sum(constant("c1"), pi)


class TestRegistry:
    def test_render(self):
        r = registry(constant("c1"), SOME_INDEPENDENT, {}, None, 1)
        assert r.render(COLOURS) == "{T2[Z1:c1]}"
        assert r.node_count == 2

    def test_equal_systems_equal_registries(self):
        assert registry(constant("c2"), SOME_INDEPENDENT) == registry(constant("c2"), SOME_INDEPENDENT)

    def test_wider_variable_set(self):
        m = ColouredSystem(["u1"], COLOURS, [0, 1])
        r = registry(m, Hyp(1), {1: ["u1"], 2: []}, {1, 2}, 1)
        assert r.lookup(1) == 1
        assert r.lookup(2) == 0

    def test_sigma_domain(self):
        with pytest.raises(ColouredError, match="sigma"):
            registry(constant("c1"), Hyp(1), {}, None, 1)

    def test_variable_set_too_small(self):
        with pytest.raises(ColouredError, match="missing"):
            registry(constant("c1"), Subset(1, 2), {1: []}, {1}, 1)

    def test_delta_confinement(self):
        with pytest.raises(FormulaError):
            registry(constant("c1"), Exists(1, Count(1, 0, 3)), {}, None, 2)

    def test_delta_cap(self):
        with pytest.raises(ColouredError, match="delta"):
            registry(constant("c1"), SOME_INDEPENDENT, {}, None, 99)

    def test_tau_domain(self):
        r = registry(constant("c1"), SOME_INDEPENDENT)
        pi = ColouredComplement.from_accepted(["v1"], COLOURS, [])
        with pytest.raises(ColouredError, match="tau"):
            sympathetic(r, SOME_INDEPENDENT, pi, {1: []})

    def test_sympathy_decides_the_sum(self):
        rng = random.Random(7)
        for _ in range(40):
            colours = tuple(f"c{i}" for i in range(1, rng.randint(1, 3) + 1))
            m = random_system(rng, [f"u{i}" for i in range(1, rng.randint(0, 2) + 1)], colours)
            pi = random_complement(rng, [f"w{i}" for i in range(1, rng.randint(0, 2) + 1)], colours)
            f = random_formula(rng, max_nodes=5, variables=2, delta=2)
            sigma = random_assignment(rng, sorted(f.free), m.size)
            tau = random_assignment(rng, sorted(f.free), pi.size)
            r = registry(m, f, sigma, f.var, 2)
            theta = {i: sigma[i] | (tau[i] << m.size) for i in f.free}
            assert sympathetic(r, f, pi, tau) == satisfies(coloured_sum(m, pi), f, theta), f.render()

    @pytest.mark.parametrize("f", [Exists(1, Hyp(1)), Exists(1, Count(1, 1, 2)), Exists(1, Subset(1, 1))])
    def test_registry_count_bound(self, f):
        delta = f.min_delta
        values = set()
        for size in range(3):
            for m in all_systems([f"u{i}" for i in range(1, size + 1)], COLOURS):
                values.add(registry(m, f, {}, f.var, delta))
        assert len(values) <= lambda_bound(f, len(f.var), len(COLOURS), delta)


class TestClassification:
    def test_sixteen_systems(self):
        systems = list(all_systems(["u1", "u2"], COLOURS))
        assert len(systems) == 16
        result = classify_systems(systems, SOME_INDEPENDENT, 1)
        assert result.count == 3
        assert result.bound == 4
        assert result.within_bound
        frame = result.to_frame()
        assert len(frame) == 16
        assert list(frame.columns) == ["system", "class", "registry_nodes"]

    def test_threads_do_not_change_the_classes(self):
        systems = list(all_systems(["u1"], COLOURS))
        one = classify_systems(systems, SOME_INDEPENDENT, 1, threads=1)
        two = classify_systems(systems, SOME_INDEPENDENT, 1, threads=2)
        assert one.classes == two.classes

    def test_needs_a_sentence(self):
        with pytest.raises(FormulaError):
            classify_systems([constant("c1")], Hyp(1), 1)

    def test_needs_shared_colours(self):
        other = ColouredSystem(["u1"], ("c1", "c2", "c3"), [0, 2])
        with pytest.raises(ColouredError):
            classify_systems([constant("c1"), other], SOME_INDEPENDENT, 1)


class TestEquivalence:
    def test_equal(self):
        report = equivalence_report(constant("c1"), constant("c1"), SOME_INDEPENDENT, 1)
        assert report.summary() == "EQUAL (registry match)"

    def test_cleft_on_empty_complement(self):
        report = equivalence_report(constant("c1"), constant("c2"), SOME_INDEPENDENT, 1)
        assert report.summary() == "DIFFERENT (cleft at |V|=0)"
        cleft = report.cleft
        assert cleft.satisfied_side == 2
        assert cleft.tau == ()
        assert cleft.complement.accepted() == [((), "c2")]

    def test_cleft_search_directly(self):
        cleft = cleft_search(constant("c2"), constant("c1"), SOME_INDEPENDENT, max_ground=1)
        assert cleft.satisfied_side == 1

    def test_no_cleft_between_equal_systems(self):
        assert cleft_search(constant("c1"), constant("c1"), SOME_INDEPENDENT, max_ground=1) is None

    def test_equal_registries_leave_no_cleft(self):
        rng = random.Random(11)
        sentences = [Exists(1, Hyp(1)), Exists(1, Count(1, 1, 2)), Exists(1, Subset(1, 1))]
        pairs = 0
        for _ in range(2000):
            f = rng.choice(sentences)
            ground = [f"u{i}" for i in range(1, rng.randint(0, 2) + 1)]
            m1, m2 = random_system(rng, ground, COLOURS), random_system(rng, ground, COLOURS)
            if registry(m1, f, {}, f.var, f.min_delta) != registry(m2, f, {}, f.var, f.min_delta):
                continue
            assert cleft_search(m1, m2, f, max_ground=2) is None, f.render()
            pairs += 1
            if pairs == 50:
                break
        assert pairs == 50

    def test_undecided_summary(self):
        assert EquivalenceReport(False, None, 2).summary() == "UNDECIDED (registries differ, no cleft up to |V|=2)"

    def test_cleft_ground_cap(self):
        with pytest.raises(BudgetExceeded):
            cleft_search(constant("c1"), constant("c2"), SOME_INDEPENDENT, max_ground=99)


class TestEncoders:
    def test_direct_sum_of_fano(self, fano):
        n = matroid.uniform(1, ["x", "y"])
        h = coloured_sum(encoders.basic(fano), encoders.direct_sum_complement(n))
        assert h == matroid.direct_sum(fano, n)

    def test_two_sum(self):
        m = matroid.uniform(2, ["a", "b", "p"])
        n = matroid.uniform(2, ["p", "c", "d"])
        system, complement = encoders.two_sum(m, n, "p")
        assert system.colours == ("1", "2", "3")
        assert coloured_sum(system, complement) == matroid.two_sum(m, n, "p")

    def test_two_sum_rejects_coloop_basepoint(self):
        m = matroid.uniform(3, ["a", "b", "p"])
        with pytest.raises(ColouredError, match="coloop"):
            encoders.two_sum(m, matroid.uniform(2, ["p", "c", "d"]), "p")

    def test_amalgam_of_triangles(self):
        m1, m2 = matroid.uniform(2, ["p", "q", "a"]), matroid.uniform(2, ["p", "q", "b"])
        system, complement = encoders.amalgam_pair(m1, m2)
        assert coloured_sum(system, complement) == matroid.proper_amalgam(m1, m2)

    @pytest.mark.parametrize("seed", range(4))
    def test_amalgam_of_random_sides(self, seed):
        from src.backend.utils.sampling import random_amalgam_pair

        m1, m2 = random_amalgam_pair(random.Random(seed), max_side=5)
        system, complement = encoders.amalgam_pair(m1, m2)
        amalgam = matroid.proper_amalgam(m1, m2)
        assert np.array_equal(coloured_sum(system, complement).table, amalgam.table)

    def test_amalgam_base_rank(self):
        with pytest.raises(ColouredError, match="rank 2"):
            encoders.amalgam_side(matroid.uniform(1, ["p", "a"]), ["p"])

    def test_dispatch(self, u23):
        assert encoders.encode("basic", u23) == encoders.basic(u23)
        with pytest.raises(ColouredError):
            encoders.encode("three_sum", u23)


def test_parsed_sentence_classifies_like_the_built_one():
    systems = list(all_systems(["u1"], COLOURS))
    parsed = classify_systems(systems, parse_formula("exists Z1 hyp(Z1)"), 1)
    built = classify_systems(systems, SOME_INDEPENDENT, 1)
    assert parsed.classes == built.classes
