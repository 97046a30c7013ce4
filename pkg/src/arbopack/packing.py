"""Pack reachability arborescences in a directed graph.

Feasibility is the cut condition: every vertex set must admit at least as
many entering arcs as there are roots outside it whose reachability set
meets it.  Construction decomposes the digraph into atoms (classes of
equal reaching-root sets), then packs branchings atom by atom: a tree
rooted inside an atom grows from its root, any other tree enters through
the arcs crossing into the atom, and each crossing arc serves at most one
tree.  Atom subproblems share no arcs, so they are independent; within an
atom a backtracking search with an exact necessary-condition prune does
the work.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bounds import DEFAULT_BOUNDS, Bounds
from .decomposition import membership_atoms
from .errors import CapacityError, InvariantError
from .graph_core import CheckResult, DirectedView, OK_RESULT, ViewArc

logger = logging.getLogger(__name__)

_TERMINAL_FMT = {"arc": "t:a:{}", "edge": "t:e:{}"}


@dataclass(frozen=True)
class Arborescence:
    """One tree of a packing: a root index and the arcs it uses."""

    root_index: int
    arcs: tuple[ViewArc, ...]


@dataclass(frozen=True)
class DigraphPacking:
    """Arc-disjoint trees, one per root index, spanning their reach sets."""

    trees: tuple[Arborescence, ...]


def reachable_in_view(d: DirectedView, s: str) -> frozenset[str]:
    """Vertices reachable from ``s`` along the view's arcs."""
    if s not in d.vertex_set:
        raise ValueError(f"unknown vertex {s!r}")
    succ: dict[str, list[str]] = {v: [] for v in d.vertices}
    for a in d.arcs:
        succ[a.tail].append(a.head)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def verify_cut_condition(
    d: DirectedView, roots: Sequence[str], bounds: Bounds = DEFAULT_BOUNDS
) -> frozenset[str] | None:
    """First vertex set violating the cut condition, or ``None``.

    Checks, for every subset X, that the arcs entering X are at least as
    many as the roots outside X whose reach set meets X.  Subsets are
    scanned in ascending mask order over the vertex list.
    """
    n = len(d.vertices)
    if n > bounds.max_enum_vertices:
        raise CapacityError(
            f"|V| = {n} exceeds max_enum_vertices = {bounds.max_enum_vertices}"
        )
    for r in roots:
        if r not in d.vertex_set:
            raise ValueError(f"unknown root {r!r}")
    bit = {v: i for i, v in enumerate(d.vertices)}
    reach_masks = []
    root_bits = []
    for r in roots:
        u = reachable_in_view(d, r)
        reach_masks.append(sum(1 << bit[v] for v in u))
        root_bits.append(1 << bit[r])
    arcs = [
        (1 << bit[a.tail], 1 << bit[a.head]) for a in d.arcs if not a.is_loop()
    ]
    for mask in range(1, 1 << n):
        need = 0
        for rb, um in zip(root_bits, reach_masks):
            if not rb & mask and um & mask:
                need += 1
        if need == 0:
            continue
        rho = sum(1 for t, h in arcs if h & mask and not t & mask)
        if rho < need:
            return frozenset(v for v in d.vertices if 1 << bit[v] & mask)
    return None


def pack_reachability(
    d: DirectedView, roots: Sequence[str], bounds: Bounds = DEFAULT_BOUNDS
):
    """A packing of reachability arborescences, or a violated vertex set.

    Atoms are processed in topological order of their root-set lattice;
    within each atom the entry points of tree i are its root (when the
    root lies inside) or the crossing arcs coming from vertices tree i
    already spans.
    """
    for r in roots:
        if r not in d.vertex_set:
            raise ValueError(f"unknown root {r!r}")
    reach = tuple(reachable_in_view(d, r) for r in roots)
    atoms, atom_roots = membership_atoms(d.vertices, reach)
    atom_of: dict[str, int] = {}
    for j, members in enumerate(atoms):
        for v in members:
            atom_of[v] = j
    for a in d.arcs:
        ju = atom_of.get(a.tail)
        jv = atom_of.get(a.head)
        if ju is not None and (jv is None or not atom_roots[ju] <= atom_roots[jv]):
            raise InvariantError(
                f"arc {a.id!r} violates root-set monotonicity between atoms"
            )

    order = sorted(range(len(atoms)), key=lambda j: (len(atom_roots[j]), j))
    tree_arcs: dict[int, list[tuple[int, ViewArc]]] = {i: [] for i in range(len(roots))}
    arc_pos = {a.key: pos for pos, a in enumerate(d.arcs)}

    for j in order:
        gamma = atoms[j]
        entering = [a for a in d.arcs if a.head in gamma and a.tail not in gamma]
        term_id = {}
        back: dict[tuple[str, str], ViewArc] = {}
        # keep declaration order: internal arcs as-is, entering arcs re-rooted
        # at their terminals
        aux_arcs: list[ViewArc] = []
        for a in d.arcs:
            if a.head not in gamma:
                continue
            if a.tail in gamma:
                aux_arcs.append(a)
            else:
                t = _TERMINAL_FMT[a.origin].format(a.id)
                term_id[a.key] = t
                back[a.key] = a
                aux_arcs.append(ViewArc(a.id, t, a.head, a.origin))
        vertices = tuple(v for v in d.vertices if v in gamma) + tuple(
            term_id[a.key] for a in entering
        )
        view_j = DirectedView(vertices, tuple(aux_arcs))
        demands: dict[int, frozenset[str]] = {}
        for i in sorted(atom_roots[j]):
            if roots[i] in gamma:
                demands[i] = frozenset((roots[i],))
            else:
                allowed = []
                for a in entering:
                    ju = atom_of.get(a.tail)
                    if ju is not None and i in atom_roots[ju]:
                        allowed.append(term_id[a.key])
                demands[i] = frozenset(allowed)
        result = pack_atom_branchings(view_j, gamma, demands, bounds)
        if result is None:
            violated = verify_cut_condition(d, roots, bounds)
            if violated is None:
                raise InvariantError(
                    f"atom {j} packing failed although the cut condition holds"
                )
            return violated
        for i, arcs in result.items():
            for a in arcs:
                orig = back.get(a.key, a)
                tree_arcs[i].append((arc_pos[orig.key], orig))

    trees = tuple(
        Arborescence(i, tuple(a for _pos, a in sorted(tree_arcs[i], key=lambda x: x[0])))
        for i in range(len(roots))
    )
    return DigraphPacking(trees)


def pack_atom_branchings(
    view: DirectedView,
    gamma: frozenset[str],
    demands: Mapping[int, frozenset[str]],
    bounds: Bounds = DEFAULT_BOUNDS,
) -> dict[int, tuple[ViewArc, ...]] | None:
    """Arc-disjoint branchings covering ``gamma``, one per demanded tree.

    ``demands[i]`` lists tree i's entry points: either its root vertex
    inside ``gamma`` or the terminal vertices it may consume.  Each
    terminal's unique arc is used by at most one tree.  Returns ``None``
    exactly when no such packing exists.
    """
    n = len(view.vertices)
    if n > bounds.max_enum_vertices:
        raise CapacityError(
            f"|V_j| = {n} exceeds max_enum_vertices = {bounds.max_enum_vertices}"
        )
    bit = {v: i for i, v in enumerate(view.vertices)}
    gmask = 0
    for v in gamma:
        gmask |= 1 << bit[v]
    terminal_set = frozenset(view.vertices) - gamma

    trees = sorted(demands)
    covered = {}
    allowed_term = {}
    for i in trees:
        entry = view.require_vertices(demands[i])
        covered[i] = sum(1 << bit[v] for v in entry & gamma)
        allowed_term[i] = sum(1 << bit[v] for v in entry & terminal_set)

    arcs = []
    for pos, a in enumerate(view.arcs):
        if a.is_loop():
            continue
        arcs.append(
            (
                pos,
                1 << bit[a.tail],
                1 << bit[a.head],
                a.tail in terminal_set,
                a,
            )
        )
    assigned = [False] * len(arcs)

    def residual_ok() -> bool:
        # Exact necessary condition: for every atom subset Y and every
        # consistent terminal completion, the trees that have no foothold
        # in the set each need a distinct unassigned arc entering it.
        s = gmask
        while s:
            y = s
            s = (s - 1) & gmask
            q = [
                i
                for i in trees
                if not covered[i] & y and (gmask & ~covered[i]) & y
            ]
            if not q:
                continue
            rho = 0
            rt_hits = []
            for k, (pos, tb, hb, is_term, _a) in enumerate(arcs):
                if assigned[k] or not hb & y:
                    continue
                if is_term:
                    hq = 0
                    for p, i in enumerate(q):
                        if tb & allowed_term[i]:
                            hq |= 1 << p
                    rt_hits.append(hq)
                elif not tb & y:
                    rho += 1
            need = 0
            for dsub in range(1 << len(q)):
                union_hit = 0
                chosen = 0
                for hq in rt_hits:
                    if hq & ~dsub == 0:
                        union_hit |= hq
                        chosen += 1
                val = (len(q) - union_hit.bit_count()) - (len(rt_hits) - chosen)
                if val > need:
                    need = val
            if need > rho:
                return False
        return True

    if not residual_ok():
        return None

    steps = 0
    backtracks = 0

    def grow() -> bool:
        nonlocal steps, backtracks
        steps += 1
        if steps > bounds.max_pack_steps:
            raise CapacityError(
                f"branching search exceeded max_pack_steps = {bounds.max_pack_steps}"
            )
        tree = None
        for i in trees:
            if gmask & ~covered[i]:
                tree = i
                break
        if tree is None:
            return True
        uncovered = gmask & ~covered[tree]
        for k, (pos, tb, hb, is_term, _a) in enumerate(arcs):
            if assigned[k] or not hb & uncovered:
                continue
            if is_term:
                if not tb & allowed_term[tree]:
                    continue
            elif not tb & covered[tree]:
                continue
            assigned[k] = True
            covered[tree] |= hb
            picks[tree].append(k)
            if residual_ok() and grow():
                return True
            assigned[k] = False
            covered[tree] &= ~hb
            picks[tree].pop()
            backtracks += 1
        return False

    picks: dict[int, list[int]] = {i: [] for i in trees}
    if not grow():
        logger.debug("atom packing infeasible after %d backtracks", backtracks)
        return None
    if backtracks:
        logger.debug("atom packing needed %d backtracks", backtracks)
    return {i: tuple(arcs[k][4] for k in sorted(picks[i])) for i in trees}


def validate_digraph_packing(
    d: DirectedView, roots: Sequence[str], packing: DigraphPacking
) -> CheckResult:
    """Check shape, spanning sets, and arc-disjointness of a packing."""
    if len(packing.trees) != len(roots):
        return CheckResult(
            False, f"expected {len(roots)} trees, got {len(packing.trees)}"
        )
    used: dict[tuple[str, str], int] = {}
    for tree in packing.trees:
        for a in tree.arcs:
            if a.key not in d.arc_by_key:
                return CheckResult(
                    False,
                    f"tree {tree.root_index + 1} uses unknown arc {a.id!r}",
                )
            if a.key in used:
                kind = "edge" if a.origin == "edge" else "arc"
                return CheckResult(False, f"{kind} {a.id} used twice")
            used[a.key] = tree.root_index
    for i, tree in enumerate(packing.trees):
        if tree.root_index != i:
            return CheckResult(False, f"tree {i + 1} carries root index {tree.root_index + 1}")
        r = roots[i]
        verdict = _check_arborescence(tree.arcs, r, reachable_in_view(d, r), i)
        if not verdict:
            return verdict
    return OK_RESULT


def _check_arborescence(
    arcs: Sequence[ViewArc], root: str, span: frozenset[str], i: int
) -> CheckResult:
    """Arcs must form an arborescence rooted at ``root`` spanning ``span``."""
    indeg: dict[str, int] = {}
    succ: dict[str, list[str]] = {}
    verts = {root}
    for a in arcs:
        verts.add(a.tail)
        verts.add(a.head)
        indeg[a.head] = indeg.get(a.head, 0) + 1
        succ.setdefault(a.tail, []).append(a.head)
    if indeg.get(root, 0) != 0:
        return CheckResult(False, f"tree {i + 1}: root {root} has an incoming arc")
    for v in verts:
        if v != root and indeg.get(v, 0) != 1:
            return CheckResult(
                False, f"tree {i + 1}: vertex {v} has in-degree {indeg.get(v, 0)}"
            )
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in succ.get(u, ()):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if seen != verts:
        return CheckResult(
            False, f"tree {i + 1} is not an arborescence rooted at {root}"
        )
    if verts != span:
        return CheckResult(False, f"tree {i + 1} does not span U_{i + 1}")
    return OK_RESULT
