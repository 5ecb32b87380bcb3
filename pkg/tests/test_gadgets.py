import random

import pytest

from src.backend.algebra.groups import cyclic, trivial
from src.backend.errors import GadgetError
from src.backend.gadgets import (
    build_h_gadget,
    build_lambda_gadget,
    closing_cycle_lengths,
    designated_cycles,
    diagonal_pair,
    find_dagger_params,
    minimal_balanced_letters,
)
from src.backend.gadgets.base import dagger_violation
from src.backend.gadgets.diagonal import AmalgamRank
from src.backend.graphs.gain import gain_frame_matroid, graph_amalgam_conditions
from src.backend.matroids.matroid import proper_amalgam
from src.backend.utils.sampling import random_gain_amalgam_pair


@pytest.fixture(scope="module")
def z20():
    return cyclic(20)


@pytest.fixture(scope="module")
def z1024():
    return cyclic(1024)


class TestHStar:
    def test_shape_for_one_row(self, z20):
        h = build_h_gadget(z20, [1, 19], s=1, M=3, N=1, star_only=True)
        assert len(h.graph.vertices) == 8
        assert h.collection("A") == ("A_Id", "A_1", "A_2", "A_s")
        assert len(h.collection("C")) == 4
        assert len(h.collection("B1")) == 3
        assert h.base_vertices == ("delta1", "delta2")
        assert not any(e.is_loop for e in h.graph.edges)

    def test_s_with_wrong_word_length(self, z20):
        with pytest.raises(GadgetError, match="word length of s"):
            build_h_gadget(z20, [1, 19], s=2, M=5, N=1, star_only=True)

    def test_short_M(self, z20):
        with pytest.raises(GadgetError, match="word length of M"):
            build_h_gadget(z20, [1, 19], s=1, M=2, N=1, star_only=True)

    def test_generators_must_be_inverse_closed(self, z20):
        with pytest.raises(GadgetError):
            build_h_gadget(z20, [1], s=1, M=3, N=1, star_only=True)

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_closing_cycle_witness(self, z20, N):
        params = find_dagger_params(z20, [1, 19], N, star_only=True)
        assert params.s == N
        h = build_h_gadget(z20, [1, 19], params.s, params.M, N=N, star_only=True)
        cycles = closing_cycle_lengths(h)
        assert len(cycles) == 3 ** N
        assert minimal_balanced_letters(h) == N

    def test_designated_cycles_are_balanced(self, z20):
        h = build_h_gadget(z20, [1, 19], s=2, M=5, N=2, star_only=True)
        cycles = designated_cycles(h)
        assert cycles[0].name == "matching"
        assert len(cycles) == 1 + 4
        assert all(c.balanced for c in cycles)

    def test_manifest(self, z20):
        h = build_h_gadget(z20, [1, 19], s=1, M=3, N=1, star_only=True)
        lines = h.manifest_lines()
        assert "collection A: A_Id A_1 A_2 A_s" in lines
        assert "collection K: K1 K2" in lines
        assert lines[-1] == "base-vertices: delta1 delta2"


class TestDaggerSearch:
    def test_least_index_parameters(self, z20):
        params = find_dagger_params(z20, [1, 19], 2, star_only=True)
        assert params.s == 2
        assert params.M == 5

    def test_group_too_small(self):
        assert find_dagger_params(cyclic(3), [1, 2], 2) is None

    def test_no_M_outside_gamma2(self):
        z4 = cyclic(4)
        assert find_dagger_params(z4, gammas=([0], [0, 1, 2, 3])) is None

    def test_needs_a_family(self, z20):
        with pytest.raises(GadgetError):
            find_dagger_params(z20)


class TestHFull:
    @pytest.fixture(scope="class")
    def gadget(self, z1024):
        return build_h_gadget(z1024, [1, 1023], s=1, M=3, N=1)

    def test_one_loop_per_vertex(self, gadget):
        loops = [e for e in gadget.graph.edges if e.is_loop]
        assert len(loops) == 8
        assert {e.u for e in loops} == set(gadget.graph.vertices)
        assert gadget.collection("Q") == tuple(f"Q{i}" for i in range(1, 9))

    def test_layer_is_unbalanced(self, gadget):
        assert dagger_violation(gadget.gaining, gadget.layer_edges) is None
        assert len(gadget.elements["d"]) == 12

    def test_base_has_unbalanced_loops_at_both_ends(self, gadget):
        assert gadget.base_edges[-2:] == ("Q7", "Q8")
        for label in ("Q7", "Q8"):
            assert gadget.gaining.gain(label) != 0
        assert {gadget.graph.edge(x).u for x in ("Q7", "Q8")} == {"delta1", "delta2"}

    def test_star_part_agrees(self, gadget, z1024):
        star = build_h_gadget(z1024, [1, 1023], s=1, M=3, N=1, star_only=True)
        for label, g in star.gaining.gains.items():
            assert gadget.gaining.gain(label) == g

    def test_given_values_are_checked(self, z1024):
        with pytest.raises(GadgetError, match="balanced cycle"):
            build_h_gadget(z1024, [1, 1023], s=1, M=3, N=1, d_values=[0] * 12)

    def test_value_count_is_checked(self, z1024):
        with pytest.raises(GadgetError, match="q-values"):
            build_h_gadget(z1024, [1, 1023], s=1, M=3, N=1, q_values=[1, 2])


class TestLambda:
    def test_star_shape(self, z4):
        params = find_dagger_params(z4, gammas=([0], [0, 2]), star_only=True)
        assert params.M == 1
        g = build_lambda_gadget(z4, [0], [0, 2], params.M, star_only=True)
        assert len(g.graph.vertices) == 9
        for row in ("B1", "B2", "B3"):
            assert len(g.collection(row)) == 2
        assert g.collection("A") == ("A_0",)
        assert all(c.balanced for c in designated_cycles(g))

    def test_M_inside_gamma2(self, z4):
        with pytest.raises(GadgetError, match="lies in Gamma2"):
            build_lambda_gadget(z4, [0], [0, 2], 2, star_only=True)

    def test_containment(self, z4):
        with pytest.raises(GadgetError, match="contained"):
            build_lambda_gadget(z4, [0, 2], [0], 1, star_only=True)

    def test_not_a_subgroup(self, z4):
        with pytest.raises(GadgetError, match="not a subgroup"):
            build_lambda_gadget(z4, [0], [0, 1], 2, star_only=True)

    def test_full_build(self):
        group = cyclic(1400)
        g = build_lambda_gadget(group, [0], [0], 1)
        loops = [e for e in g.graph.edges if e.is_loop]
        assert len(loops) == 9
        assert set(g.base_edges) == {"C_0", "Q8", "Q9", "D10_1", "D10_2"}
        assert dagger_violation(g.gaining, g.layer_edges) is None
        assert all(c.balanced for c in designated_cycles(g))


class TestDiagonal:
    def test_base_glued_pair(self):
        pair = diagonal_pair(trivial(), [0], [0], [0], k=4)
        assert pair.failed_condition is None
        assert pair.comparison == "equal"
        assert pair.left.base_edges == pair.right.base_edges
        assert pair.amalgam.gain("D10_1") == 2
        assert pair.amalgam.gain("D10_2") == 3
        for gadget in (pair.left, pair.right):
            assert all(c.balanced for c in designated_cycles(gadget))

    def test_right_copy_is_ticked(self):
        pair = diagonal_pair(trivial(), [0], [0], [0], k=4)
        assert "alpha1'" in pair.right.graph.vertices
        assert "K1'" in pair.right.collection("K")
        assert "C_0" in pair.right.collection("C")

    def test_gamma0_must_sit_in_both(self, z4):
        with pytest.raises(GadgetError, match="both"):
            diagonal_pair(z4, [0, 2], [0, 2], [0], k=3)

    def test_amalgam_rank_matches_the_table(self):
        rng = random.Random(5)
        checked = 0
        while checked < 10:
            a, b = random_gain_amalgam_pair(rng, cyclic(3))
            if graph_amalgam_conditions(a, b, ("u", "v")) is not None:
                continue
            table = proper_amalgam(gain_frame_matroid(a), gain_frame_matroid(b))
            eta = AmalgamRank(a, b)
            for _ in range(30):
                X = [x for x in table.ground if rng.random() < 0.5]
                assert eta(X) == table.rank(X), X
            checked += 1
