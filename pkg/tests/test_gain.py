import random

import pytest

from src.backend.algebra.groups import builtin, cyclic
from src.backend.errors import GainError
from src.backend.graphs.gain import (
    BiasedGraph,
    Gaining,
    amalgam_recovery_hypotheses,
    balanced_cycles,
    frame_matroid,
    gain_frame_matroid,
    gain_graph_amalgam,
    graph_amalgam_conditions,
    switch_normalize,
    walk_gain,
)
from src.backend.graphs.multigraph import Multigraph
from src.backend.matroids.matroid import Matroid, proper_amalgam, uniform, validate_matroid
from src.backend.utils.sampling import random_gain_amalgam_pair, random_gaining, random_switching

Z3 = cyclic(3)


def triangle(gains):
    graph = Multigraph(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c"), ("e3", "c", "a")])
    return Gaining(graph, Z3, dict(zip(("e1", "e2", "e3"), gains)))


def theta(gains, group=Z3):
    graph = Multigraph(["a", "b"], [("e1", "a", "b"), ("e2", "a", "b"), ("e3", "a", "b")])
    return Gaining(graph, group, dict(zip(("e1", "e2", "e3"), gains)))


class TestGaining:
    def test_missing_gain(self):
        graph = Multigraph(["a", "b"], [("e1", "a", "b")])
        with pytest.raises(GainError, match="without a gain"):
            Gaining(graph, Z3, {})

    def test_gain_outside_group(self):
        graph = Multigraph(["a", "b"], [("e1", "a", "b")])
        with pytest.raises(GainError):
            Gaining(graph, Z3, {"e1": 3})

    def test_reverse_orientation_inverts(self):
        g = triangle((1, 1, 0))
        assert g.oriented("e1", "a") == 1
        assert g.oriented("e1", "b") == 2

    def test_walk_gain(self):
        g = triangle((1, 1, 0))
        assert walk_gain(g, ["a", "e1", "b", "e2", "c", "e3", "a"]) == 2
        assert walk_gain(g, ["a", "e3", "c", "e2", "b", "e1", "a"]) == 1

    def test_invalid_walk(self):
        g = triangle((1, 1, 0))
        with pytest.raises(GainError, match="does not join"):
            walk_gain(g, ["a", "e2", "c"])

    def test_balance(self):
        assert triangle((1, 1, 1)).is_balanced_subgraph()
        assert not triangle((1, 1, 0)).is_balanced_subgraph()
        assert triangle((1, 1, 0)).frame_rank() == 3
        assert triangle((1, 1, 1)).frame_rank() == 2

    def test_unbalanced_loops(self):
        graph = Multigraph(["a"], [("l1", "a", "a"), ("l2", "a", "a")])
        g = Gaining(graph, Z3, {"l1": 0, "l2": 2})
        assert g.unbalanced_loops() == ("l2",)


class TestFrameMatroid:
    def test_balanced_triangle_is_graphic(self):
        assert gain_frame_matroid(triangle((1, 1, 1))) == uniform(2, ["e1", "e2", "e3"])

    def test_unbalanced_triangle_is_free(self):
        assert gain_frame_matroid(triangle((1, 1, 0))) == uniform(3, ["e1", "e2", "e3"])

    def test_theta_with_one_balanced_digon(self):
        g = theta((0, 0, 1), group=cyclic(2))
        biased = balanced_cycles(g)
        assert biased.balanced == frozenset({0b011})
        m = frame_matroid(biased)
        assert m.rank() == 2
        assert not m.is_independent(["e1", "e2"])
        assert m.is_independent(["e1", "e3"])

    def test_not_a_linear_class(self):
        graph = theta((0, 0, 0)).graph
        with pytest.raises(GainError, match="linear class"):
            frame_matroid(BiasedGraph(graph, frozenset({0b011, 0b101})))

    @pytest.mark.parametrize("seed", range(6))
    def test_rank_counts_vertices_and_balanced_components(self, seed):
        g = random_gaining(random.Random(seed))
        m = gain_frame_matroid(g)
        assert isinstance(validate_matroid(m), Matroid)
        assert m.rank() == g.frame_rank()

    @pytest.mark.parametrize("seed", range(6))
    def test_switching_keeps_the_matroid(self, seed):
        rng = random.Random(seed)
        g = random_gaining(rng)
        switched = switch_normalize(g, random_switching(rng, g))
        assert gain_frame_matroid(switched) == gain_frame_matroid(g)


class TestSwitching:
    def test_forest_becomes_identity(self):
        g = switch_normalize(triangle((1, 2, 0)), "forest")
        assert g.gain("e1") == 0
        assert g.gain("e2") == 0
        assert g.gain("e3") == 0

    def test_unknown_request(self):
        with pytest.raises(GainError):
            switch_normalize(triangle((1, 2, 0)), "tree")

    def test_partial_switching(self):
        with pytest.raises(GainError, match="undefined"):
            switch_normalize(triangle((1, 2, 0)), {"a": 1})


def left_side(lu=1):
    graph = Multigraph(
        ["u", "v", "a"],
        [("lu", "u", "u"), ("lv", "v", "v"), ("p1", "u", "a"), ("p2", "a", "v")],
    )
    return Gaining(graph, Z3, {"lu": lu, "lv": 1, "p1": 0, "p2": 0})


def right_side(q2=1, with_lv=True):
    edges = [("lu", "u", "u"), ("q1", "u", "b"), ("q2", "b", "v")]
    gains = {"lu": 1, "q1": 0, "q2": q2}
    if with_lv:
        edges.append(("lv", "v", "v"))
        gains["lv"] = 1
    return Gaining(Multigraph(["u", "v", "b"], edges), Z3, gains)


class TestGraphAmalgam:
    def test_conditions_hold(self):
        assert graph_amalgam_conditions(left_side(), right_side(), ("u", "v")) is None

    def test_shared_gains_disagree(self):
        assert graph_amalgam_conditions(left_side(lu=2), right_side(), ("u", "v")) == "ii"

    def test_missing_loop(self):
        assert graph_amalgam_conditions(left_side(), right_side(with_lv=False), ("u", "v")) == "iii"

    def test_equal_path_gains(self):
        assert graph_amalgam_conditions(left_side(), right_side(q2=0), ("u", "v")) == "iv"

    def test_wrong_base(self):
        assert graph_amalgam_conditions(left_side(), right_side(), ("u", "a")) == "vertices"

    def test_union(self):
        g = gain_graph_amalgam(left_side(), right_side(), ("u", "v"))
        assert g.graph.vertices == ("u", "v", "a", "b")
        assert [e.label for e in g.graph.edges] == ["lu", "lv", "p1", "p2", "q1", "q2"]
        assert g.gain("q2") == 1

    def test_union_rejects_conflicting_gains(self):
        with pytest.raises(GainError, match="different gains"):
            gain_graph_amalgam(left_side(lu=2), right_side(), ("u", "v"))

    @pytest.mark.parametrize("group", ["cyclic2", "cyclic3", "cyclic4", "symmetric3"])
    def test_frame_matroid_of_the_union_is_the_proper_amalgam(self, group):
        rng = random.Random(group)
        checked = 0
        for _ in range(200):
            a, b = random_gain_amalgam_pair(rng, builtin(group))
            if graph_amalgam_conditions(a, b, ("u", "v")) is not None:
                continue
            union = gain_frame_matroid(gain_graph_amalgam(a, b, ("u", "v")))
            assert union == proper_amalgam(gain_frame_matroid(a), gain_frame_matroid(b))
            checked += 1
            if checked == 20:
                break
        assert checked == 20


def recovery_graph(loop_gain=1, drop_loop=False):
    vertices = ["x", "y", "z"]
    edges, gains = [], {}
    for v in vertices:
        if drop_loop and v == "x":
            continue
        edges.append((f"l{v}", v, v))
        gains[f"l{v}"] = loop_gain
    for u, v in (("x", "y"), ("y", "z"), ("x", "z")):
        edges += [(f"{u}{v}0", u, v), (f"{u}{v}1", u, v)]
        gains.update({f"{u}{v}0": 0, f"{u}{v}1": 1})
    return Gaining(Multigraph(vertices, edges), Z3, gains)


class TestRecoveryHypotheses:
    def test_hold(self):
        assert amalgam_recovery_hypotheses(recovery_graph()) is None

    def test_balanced_loop(self):
        assert amalgam_recovery_hypotheses(recovery_graph(loop_gain=0)) == "balanced loop lx"

    def test_missing_loop(self):
        assert amalgam_recovery_hypotheses(recovery_graph(drop_loop=True)) == "vertex x has no unbalanced loop"
