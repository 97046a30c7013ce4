"""End-to-end solver, validators, certificates, and brute-force oracles.

``solve`` runs the full algorithm: build atoms, orient each atom's edges
to cover its demands, then pack arborescences in the oriented digraph and
map oriented edges back to edge usages.  When some atom cannot be
oriented, the atom-level subpartition certificate is lifted to a bi-set
family over the original graph, which any third party can re-check
against the input alone.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .bounds import DEFAULT_BOUNDS, Bounds
from .decomposition import (
    AtomDecomposition,
    AuxiliaryGraph,
    BiSet,
    build_auxiliary,
    biset_in_degree,
    compute_atoms,
    lift_biset,
    p_value,
)
from .errors import CapacityError, InvariantError
from .graph_core import (
    CheckResult,
    MixedGraph,
    OK_RESULT,
    Orientation,
    Subpartition,
    apply_orientation,
    arcs_view,
    crossing_edge_count,
    lexicographic_orientation,
    mixed_reachable_set,
)
from .orientation import CoverRequirement, SubpartitionCertificate, orient_covering
from .packing import DigraphPacking, pack_reachability


@dataclass(frozen=True)
class EdgeUse:
    """An undirected edge consumed by a tree, with its chosen direction."""

    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class MixedTree:
    """One mixed arborescence: native arcs plus directed edge usages."""

    root_index: int
    root: str
    arcs: tuple[str, ...]
    edges: tuple[EdgeUse, ...]


@dataclass(frozen=True)
class MixedPacking:
    trees: tuple[MixedTree, ...]


@dataclass(frozen=True)
class BiSetFamilyCertificate:
    """Infeasibility witness over the original graph.

    The inner sets subpartition one atom, each outer set avoids the rest
    of that atom, and the crossing edges plus entering arcs fall short of
    the summed demands: ``lhs < rhs``.
    """

    atom_index: int
    bisets: tuple[BiSet, ...]
    lhs: int
    rhs: int

    @property
    def deficit(self) -> int:
        return self.rhs - self.lhs


def _certificate_sides(
    g: MixedGraph,
    roots: Sequence[str],
    dec: AtomDecomposition,
    bisets: Sequence[BiSet],
) -> tuple[int, int]:
    inners = Subpartition(tuple(b.inner for b in bisets))
    native = arcs_view(g)
    lhs = crossing_edge_count(g, inners) + sum(
        biset_in_degree(native, b) for b in bisets
    )
    rhs = sum(p_value(dec, roots, b) for b in bisets)
    return lhs, rhs


def certificate_from_subpartition(
    sc: SubpartitionCertificate,
    aux: AuxiliaryGraph,
    dec: AtomDecomposition,
    g: MixedGraph,
    roots: Sequence[str],
) -> BiSetFamilyCertificate:
    """Lift an atom-level certificate to a bi-set family over ``g``.

    Each part maps to its lifted bi-set; both sides of the inequality are
    recomputed over the original graph.  The lift can only tighten the
    left side, so a positive atom-level deficit must survive.
    """
    if sc.deficit < 1:
        raise ValueError(f"subpartition deficit {sc.deficit} is not positive")
    if sc.atom_index != aux.atom_index:
        raise ValueError("certificate and auxiliary graph refer to different atoms")
    bisets = tuple(lift_biset(aux, part) for part in sc.parts)
    lhs, rhs = _certificate_sides(g, roots, dec, bisets)
    if lhs >= rhs:
        raise InvariantError("lifted certificate lost its deficit")
    return BiSetFamilyCertificate(
        atom_index=sc.atom_index, bisets=bisets, lhs=lhs, rhs=rhs
    )


def verify_certificate(
    g: MixedGraph, roots: Sequence[str], cert: BiSetFamilyCertificate
) -> CheckResult:
    """Re-check a certificate against the input graph alone.

    Recomputes the decomposition, the family shape, and both sides of
    the inequality from scratch; accepts only a strict violation.
    """
    try:
        for b in cert.bisets:
            g.require_vertices(b.outer)
    except ValueError as exc:
        return CheckResult(False, str(exc))
    if not cert.bisets:
        return CheckResult(False, "certificate has no bi-sets")
    dec = compute_atoms(g, roots)
    seen: set[str] = set()
    for b in cert.bisets:
        if not b.inner:
            return CheckResult(False, "a bi-set has an empty inner set")
        if b.inner & seen:
            return CheckResult(False, "inner sets overlap: not a subpartition")
        seen |= b.inner
    atoms_hit = {dec.atom_of.get(v) for b in cert.bisets for v in b.inner}
    if None in atoms_hit:
        return CheckResult(False, "an inner set leaves every atom")
    if len(atoms_hit) != 1:
        return CheckResult(False, "inner sets are not a subpartition of one atom")
    (j,) = atoms_hit
    if j != cert.atom_index:
        return CheckResult(
            False, f"certificate names atom {cert.atom_index} but covers atom {j}"
        )
    gamma = dec.atoms[j]
    for b in cert.bisets:
        if b.wall() & gamma:
            return CheckResult(False, "an outer set meets the atom outside its inner set")
    lhs, rhs = _certificate_sides(g, roots, dec, cert.bisets)
    if (lhs, rhs) != (cert.lhs, cert.rhs):
        return CheckResult(
            False,
            f"recorded sides ({cert.lhs}, {cert.rhs}) do not match "
            f"recomputation ({lhs}, {rhs})",
        )
    if lhs >= rhs:
        return CheckResult(False, f"inequality not violated (lhs={lhs} >= rhs={rhs})")
    return OK_RESULT


# ---------------------------------------------------------------------------
# the solver


def covering_orientation(
    g: MixedGraph,
    roots: Sequence[str],
    bounds: Bounds = DEFAULT_BOUNDS,
    jobs: int = 1,
):
    """Orient all edges so every atom's demands are covered.

    Returns an :class:`Orientation` over the whole edge set, or the
    lifted certificate of the lowest-index atom that cannot be oriented.
    Edges incident to no atom get the lexicographic direction; they can
    never matter.
    """
    roots = list(roots)
    dec = compute_atoms(g, roots)
    reqs = [
        CoverRequirement(build_auxiliary(g, dec, j), dec, tuple(roots), bounds)
        for j in range(len(dec.atoms))
    ]
    results: list[Orientation | SubpartitionCertificate] = []
    if jobs > 1 and len(reqs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(orient_covering, reqs))
    else:
        for req in reqs:
            outcome = orient_covering(req)
            results.append(outcome)
            if isinstance(outcome, SubpartitionCertificate):
                break
    for req, outcome in zip(reqs, results):
        if isinstance(outcome, SubpartitionCertificate):
            return certificate_from_subpartition(outcome, req.aux, dec, g, roots)

    direction: dict[str, tuple[str, str]] = {}
    for outcome in results:
        direction.update(outcome.direction)
    leftover = [e.id for e in g.edges if e.id not in direction]
    direction.update(lexicographic_orientation(g, leftover).direction)
    return Orientation(direction)


def solve(
    g: MixedGraph,
    roots: Sequence[str],
    bounds: Bounds = DEFAULT_BOUNDS,
    jobs: int = 1,
):
    """Solve the packing problem on a mixed graph.

    Returns a :class:`MixedPacking` or, when no packing exists, a
    :class:`BiSetFamilyCertificate` for the lowest-index atom that cannot
    be oriented.
    """
    roots = list(roots)
    outcome = covering_orientation(g, roots, bounds, jobs)
    if isinstance(outcome, BiSetFamilyCertificate):
        return outcome
    oriented = apply_orientation(g, outcome)
    packing = pack_reachability(oriented, roots, bounds)
    if not isinstance(packing, DigraphPacking):
        raise InvariantError(
            "oriented graph fails the cut condition although every atom was covered"
        )
    return _to_mixed_packing(packing, roots)


def _to_mixed_packing(packing: DigraphPacking, roots: Sequence[str]) -> MixedPacking:
    trees = []
    for tree in packing.trees:
        arcs = tuple(a.id for a in tree.arcs if a.origin == "arc")
        edges = tuple(
            EdgeUse(a.id, a.tail, a.head) for a in tree.arcs if a.origin == "edge"
        )
        trees.append(
            MixedTree(
                root_index=tree.root_index,
                root=roots[tree.root_index],
                arcs=arcs,
                edges=edges,
            )
        )
    return MixedPacking(tuple(trees))


def validate_mixed_packing(
    g: MixedGraph, roots: Sequence[str], mp: MixedPacking
) -> CheckResult:
    """Check disjointness, per-tree arborescence shape, and spanning sets."""
    if len(mp.trees) != len(roots):
        return CheckResult(False, f"expected {len(roots)} trees, got {len(mp.trees)}")
    used_arcs: set[str] = set()
    used_edges: set[str] = set()
    for tree in mp.trees:
        for aid in tree.arcs:
            if aid not in g.arc_by_id:
                return CheckResult(False, f"unknown arc {aid!r}")
            if aid in used_arcs:
                return CheckResult(False, f"arc {aid} used twice")
            used_arcs.add(aid)
        for use in tree.edges:
            e = g.edge_by_id.get(use.id)
            if e is None:
                return CheckResult(False, f"unknown edge {use.id!r}")
            if frozenset((use.tail, use.head)) != e.ends:
                return CheckResult(
                    False, f"edge {use.id} used with endpoints not its own"
                )
            if use.id in used_edges:
                return CheckResult(False, f"edge {use.id} used twice")
            used_edges.add(use.id)
    for i, tree in enumerate(mp.trees):
        if tree.root_index != i:
            return CheckResult(
                False, f"tree {i + 1} carries root index {tree.root_index + 1}"
            )
        r = roots[i]
        if tree.root != r:
            return CheckResult(False, f"tree {i + 1} names root {tree.root!r}, not {r!r}")
        span = mixed_reachable_set(g, r)
        verdict = _check_mixed_tree(g, tree, r, span, i)
        if not verdict:
            return verdict
    return OK_RESULT


def _check_mixed_tree(
    g: MixedGraph, tree: MixedTree, root: str, span: frozenset[str], i: int
) -> CheckResult:
    indeg: dict[str, int] = {}
    succ: dict[str, list[str]] = {}
    verts = {root}
    hops: list[tuple[str, str]] = []
    for aid in tree.arcs:
        a = g.arc_by_id[aid]
        hops.append((a.tail, a.head))
    for use in tree.edges:
        hops.append((use.tail, use.head))
    for t, h in hops:
        verts.add(t)
        verts.add(h)
        indeg[h] = indeg.get(h, 0) + 1
        succ.setdefault(t, []).append(h)
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
        return CheckResult(False, f"tree {i + 1} is not an arborescence rooted at {root}")
    if verts != span:
        return CheckResult(False, f"tree {i + 1} does not span U_{i + 1}")
    return OK_RESULT


# ---------------------------------------------------------------------------
# brute-force oracles


def brute_force_feasible(
    g: MixedGraph, roots: Sequence[str], bounds: Bounds = DEFAULT_BOUNDS
) -> bool:
    """Exhaustive feasibility oracle, independent of the solver.

    Tries every orientation of the edges; an orientation works when it
    keeps every vertex's set of reaching roots intact and the resulting
    digraph satisfies the cut condition.
    """
    n = len(g.vertices)
    if n > bounds.max_enum_vertices:
        raise CapacityError(
            f"|V| = {n} exceeds max_enum_vertices = {bounds.max_enum_vertices}"
        )
    plain_edges = [e for e in g.edges if not e.is_loop()]
    if len(plain_edges) > 12:
        raise CapacityError(f"|E| = {len(plain_edges)} exceeds the orientation bound 12")
    for r in roots:
        if r not in g.vertex_set:
            raise ValueError(f"unknown root {r!r}")

    bit = g.vertex_index
    base_reach = [
        sum(1 << bit[v] for v in mixed_reachable_set(g, r)) for r in roots
    ]
    root_bits = [1 << bit[r] for r in roots]
    native = [
        (1 << bit[a.tail], 1 << bit[a.head]) for a in g.arcs if not a.is_loop()
    ]
    edges = [(1 << bit[e.u], 1 << bit[e.v]) for e in plain_edges]

    size = 1 << n
    need = [0] * size
    rho_native = [0] * size
    boundary = [0] * size
    for mask in range(1, size):
        c = 0
        for rb, um in zip(root_bits, base_reach):
            if not rb & mask and um & mask:
                c += 1
        need[mask] = c
        rho_native[mask] = sum(1 for t, h in native if h & mask and not t & mask)
        boundary[mask] = sum(
            1 for bu, bv in edges if bool(bu & mask) != bool(bv & mask)
        )
    # quick refutation: even orienting every boundary edge inward is too little
    for mask in range(1, size):
        if rho_native[mask] + boundary[mask] < need[mask]:
            return False

    succ_base: list[list[int]] = [[] for _ in range(n)]
    for t, h in native:
        succ_base[t.bit_length() - 1].append(h.bit_length() - 1)

    m = len(edges)
    for combo in range(1 << m):
        succ = [list(s) for s in succ_base]
        for pos, (bu, bv) in enumerate(edges):
            if combo >> pos & 1:
                succ[bv.bit_length() - 1].append(bu.bit_length() - 1)
            else:
                succ[bu.bit_length() - 1].append(bv.bit_length() - 1)
        ok = True
        for rb, um in zip(root_bits, base_reach):
            if _reach_mask(succ, rb.bit_length() - 1) != um:
                ok = False
                break
        if not ok:
            continue
        for mask in range(1, size):
            if need[mask] == 0:
                continue
            rho = rho_native[mask]
            if rho < need[mask]:
                for pos, (bu, bv) in enumerate(edges):
                    if combo >> pos & 1:
                        if bu & mask and not bv & mask:
                            rho += 1
                    elif bv & mask and not bu & mask:
                        rho += 1
            if rho < need[mask]:
                ok = False
                break
        if ok:
            return True
    return False


def _reach_mask(succ: list[list[int]], s: int) -> int:
    seen = 1 << s
    stack = [s]
    while stack:
        u = stack.pop()
        for w in succ[u]:
            if not seen >> w & 1:
                seen |= 1 << w
                stack.append(w)
    return seen


def check_spanning_packing_condition(
    g: MixedGraph, r: str, k: int, bounds: Bounds = DEFAULT_BOUNDS
) -> bool:
    """Spanning-packing oracle for a single root repeated ``k`` times.

    Every subpartition of the vertices other than ``r`` must offer at
    least ``k`` entries per part, counting crossing edges once and
    entering arcs per part.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if r not in g.vertex_set:
        raise ValueError(f"unknown root {r!r}")
    if k == 0:
        return True
    ground = [v for v in g.vertices if v != r]
    if len(ground) > bounds.max_subpartition_ground:
        raise CapacityError(
            f"|V|-1 = {len(ground)} exceeds max_subpartition_ground = "
            f"{bounds.max_subpartition_ground}"
        )
    bit = g.vertex_index
    arcs = [(1 << bit[a.tail], 1 << bit[a.head]) for a in g.arcs if not a.is_loop()]
    edges = [(1 << bit[e.u], 1 << bit[e.v]) for e in g.edges if not e.is_loop()]

    def violated(parts: list[int]) -> bool:
        total_rho = 0
        for pm in parts:
            total_rho += sum(1 for t, h in arcs if h & pm and not t & pm)
        crossing = 0
        for bu, bv in edges:
            pu = next((i for i, pm in enumerate(parts) if bu & pm), None)
            pv = next((i for i, pm in enumerate(parts) if bv & pm), None)
            if (pu is not None or pv is not None) and pu != pv:
                crossing += 1
        return crossing + total_rho < k * len(parts)

    parts: list[int] = []

    def rec(idx: int) -> bool:
        """True when some extension violates the condition."""
        if idx == len(ground):
            return bool(parts) and violated(parts)
        b = 1 << bit[ground[idx]]
        if rec(idx + 1):  # leave the vertex out of every part
            return True
        for i in range(len(parts)):
            parts[i] |= b
            if rec(idx + 1):
                return True
            parts[i] &= ~b
        parts.append(b)
        if rec(idx + 1):
            return True
        parts.pop()
        return False

    return not rec(0)
