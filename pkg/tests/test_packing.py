from __future__ import annotations

import random

import pytest

from arbopack import (
    Arborescence,
    DigraphPacking,
    DirectedView,
    Orientation,
    ViewArc,
    apply_orientation,
    arcs_view,
    pack_atom_branchings,
    pack_reachability,
    reachable_in_view,
    validate_digraph_packing,
    verify_cut_condition,
)
from instance_gen import random_digraph_instance


def canonical_view(two_root) -> tuple[DirectedView, list[str]]:
    g, roots = two_root
    o = Orientation(
        {
            "e1": ("r1", "v1"),
            "e2": ("r1", "v2"),
            "e3": ("r1", "v5"),
            "e4": ("r2", "v6"),
            "e5": ("r2", "v7"),
            "e6": ("v2", "v5"),
        }
    )
    return apply_orientation(g, o), roots


class TestVerifyCutCondition:
    def test_canonical_orientation_ok(self, two_root):
        d, roots = canonical_view(two_root)
        assert verify_cut_condition(d, roots) is None

    def test_single_arc_two_roots_ok(self):
        d = DirectedView(("r1", "r2", "v"), (ViewArc("a1", "r1", "v", "arc"),))
        assert verify_cut_condition(d, ["r1", "r2"]) is None

    def test_shared_vertex_short_one_arc(self):
        # both roots reach v but only one arc enters it
        d = DirectedView(
            ("r1", "r2", "v"),
            (ViewArc("a1", "r1", "r2", "arc"), ViewArc("a2", "r2", "v", "arc")),
        )
        assert verify_cut_condition(d, ["r1", "r2"]) == frozenset(["v"])

    def test_first_violator_in_mask_order(self):
        # both tree indices need x and y, but each has only one entering arc
        d = DirectedView(
            ("r", "x", "y"),
            (ViewArc("a1", "r", "x", "arc"), ViewArc("a2", "x", "y", "arc")),
        )
        viol = verify_cut_condition(d, ["r", "r"])
        assert viol == frozenset(["x"])

    def test_capacity(self):
        from arbopack import Bounds, CapacityError

        d = DirectedView(tuple(f"n{i}" for i in range(5)), ())
        with pytest.raises(CapacityError, match="max_enum_vertices"):
            verify_cut_condition(d, ["n0"], Bounds(max_enum_vertices=4))


class TestPackReachability:
    def test_canonical_packing(self, two_root):
        d, roots = canonical_view(two_root)
        packing = pack_reachability(d, roots)
        assert isinstance(packing, DigraphPacking)
        assert validate_digraph_packing(d, roots, packing)
        keys = [sorted(a.key for a in t.arcs) for t in packing.trees]
        assert keys[0] == [
            ("arc", "a1"),
            ("arc", "a2"),
            ("edge", "e1"),
            ("edge", "e2"),
            ("edge", "e3"),
        ]
        assert keys[1] == [
            ("arc", "a3"),
            ("arc", "a4"),
            ("edge", "e4"),
            ("edge", "e5"),
        ]

    def test_single_root_arborescence_returned(self):
        d = DirectedView(
            ("r", "x", "y"),
            (ViewArc("a1", "r", "x", "arc"), ViewArc("a2", "x", "y", "arc")),
        )
        packing = pack_reachability(d, ["r"])
        assert isinstance(packing, DigraphPacking)
        assert {a.key for a in packing.trees[0].arcs} == {("arc", "a1"), ("arc", "a2")}

    def test_infeasible_returns_violated_set(self):
        d = DirectedView(
            ("r1", "r2", "v"),
            (ViewArc("a1", "r1", "r2", "arc"), ViewArc("a2", "r2", "v", "arc")),
        )
        assert pack_reachability(d, ["r1", "r2"]) == frozenset(["v"])

    def test_arcs_stay_inside_reach_sets(self):
        rng = random.Random(31415)
        for _ in range(60):
            g, roots = random_digraph_instance(rng, max_v=6, max_a=10)
            d = arcs_view(g)
            packing = pack_reachability(d, roots)
            if not isinstance(packing, DigraphPacking):
                continue
            for tree in packing.trees:
                span = reachable_in_view(d, roots[tree.root_index])
                for a in tree.arcs:
                    assert a.tail in span and a.head in span

    def test_packing_iff_cut_condition_random(self):
        rng = random.Random(2718)
        feasible = infeasible = 0
        for _ in range(150):
            g, roots = random_digraph_instance(rng, max_v=7, max_a=14)
            d = arcs_view(g)
            packing = pack_reachability(d, roots)
            ok = verify_cut_condition(d, roots) is None
            if isinstance(packing, DigraphPacking):
                assert ok
                assert validate_digraph_packing(d, roots, packing)
                feasible += 1
            else:
                assert not ok
                infeasible += 1
        assert feasible and infeasible


class TestPackAtomBranchings:
    def shared_atom_view(self):
        verts = ("v3", "v4", "t:a:a1", "t:a:a2", "t:a:a3", "t:a:a5")
        arcs = (
            ViewArc("a4", "v4", "v3", "arc"),
            ViewArc("a1", "t:a:a1", "v3", "arc"),
            ViewArc("a2", "t:a:a2", "v4", "arc"),
            ViewArc("a3", "t:a:a3", "v4", "arc"),
            ViewArc("a5", "t:a:a5", "v3", "arc"),
        )
        return DirectedView(verts, arcs)

    def test_canonical_shared_atom(self):
        view = self.shared_atom_view()
        demands = {
            0: frozenset({"t:a:a1", "t:a:a2", "t:a:a5"}),
            1: frozenset({"t:a:a3"}),
        }
        result = pack_atom_branchings(view, frozenset({"v3", "v4"}), demands)
        assert result is not None
        assert {a.id for a in result[0]} == {"a1", "a2"}
        assert {a.id for a in result[1]} == {"a3", "a4"}

    def test_single_vertex_atom(self):
        view = DirectedView(("v",), ())
        result = pack_atom_branchings(view, frozenset({"v"}), {0: frozenset({"v"})})
        assert result == {0: ()}

    def test_two_trees_one_terminal_fails(self):
        view = DirectedView(("v", "t:a:a1"), (ViewArc("a1", "t:a:a1", "v", "arc"),))
        demands = {0: frozenset({"t:a:a1"}), 1: frozenset({"t:a:a1"})}
        assert pack_atom_branchings(view, frozenset({"v"}), demands) is None

    def test_disallowed_terminal_never_used(self):
        view = DirectedView(
            ("v", "t:a:a1", "t:a:a2"),
            (ViewArc("a1", "t:a:a1", "v", "arc"), ViewArc("a2", "t:a:a2", "v", "arc")),
        )
        result = pack_atom_branchings(
            view, frozenset({"v"}), {0: frozenset({"t:a:a2"})}
        )
        assert result is not None
        assert [a.id for a in result[0]] == ["a2"]


class TestValidateDigraphPacking:
    def test_canonical_ok(self, two_root):
        d, roots = canonical_view(two_root)
        packing = pack_reachability(d, roots)
        assert validate_digraph_packing(d, roots, packing)

    def test_moved_arc_breaks_span(self, two_root):
        d, roots = canonical_view(two_root)
        packing = pack_reachability(d, roots)
        t0, t1 = packing.trees
        moved = next(a for a in t1.arcs if a.id == "a4")
        bad = DigraphPacking(
            (
                Arborescence(0, t0.arcs + (moved,)),
                Arborescence(1, tuple(a for a in t1.arcs if a.id != "a4")),
            )
        )
        verdict = validate_digraph_packing(d, roots, bad)
        assert not verdict
        assert "tree" in verdict.reason

    def test_shared_arc_detected(self, two_root):
        d, roots = canonical_view(two_root)
        packing = pack_reachability(d, roots)
        t0, t1 = packing.trees
        shared = t0.arcs[0]
        bad = DigraphPacking((t0, Arborescence(1, t1.arcs + (shared,))))
        verdict = validate_digraph_packing(d, roots, bad)
        assert not verdict
        assert "used twice" in verdict.reason

    def test_wrong_tree_count(self, two_root):
        d, roots = canonical_view(two_root)
        packing = pack_reachability(d, roots)
        verdict = validate_digraph_packing(d, roots, DigraphPacking(packing.trees[:1]))
        assert not verdict and "expected 2 trees" in verdict.reason

    def test_root_with_incoming_arc(self):
        d = DirectedView(
            ("r", "x"),
            (ViewArc("a1", "r", "x", "arc"), ViewArc("a2", "x", "r", "arc")),
        )
        bad = DigraphPacking(
            (Arborescence(0, (d.arcs[0], d.arcs[1])),)
        )
        verdict = validate_digraph_packing(d, ["r"], bad)
        assert not verdict and "incoming" in verdict.reason
