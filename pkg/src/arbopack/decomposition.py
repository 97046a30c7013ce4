"""Reachability structure: atoms, bi-sets, demand counts, auxiliary graphs.

Each root reaches a vertex set U_i.  Vertices with the same nonempty set
of reaching roots form an *atom*; vertices reached by nobody belong to no
atom and to no tree.  Demands are expressed through bi-sets: nested pairs
(outer, inner) of vertex sets.  The demand of a bi-set counts the roots
whose tree is forced to enter the inner set across the outer "wall".

Per atom, an *auxiliary graph* replaces every arc entering the atom by a
fresh terminal vertex with a single outgoing arc to the original head.
Subsets of the auxiliary vertex set that contain the head of every chosen
terminal ("consistent" sets) carry the demand function down to plain set
functions, one independent subproblem per atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import InvariantError
from .graph_core import (
    RESERVED_TERMINAL_PREFIX,
    Arc,
    DirectedView,
    MixedGraph,
    mixed_reachable_set,
)


@dataclass(frozen=True)
class BiSet:
    """Nested pair of vertex sets: inner within outer."""

    outer: frozenset[str]
    inner: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "outer", frozenset(self.outer))
        object.__setattr__(self, "inner", frozenset(self.inner))
        if not self.inner <= self.outer:
            raise ValueError("bi-set inner set must be contained in the outer set")

    def wall(self) -> frozenset[str]:
        return self.outer - self.inner


def biset_union(x: BiSet, y: BiSet) -> BiSet:
    return BiSet(x.outer | y.outer, x.inner | y.inner)


def biset_intersection(x: BiSet, y: BiSet) -> BiSet:
    return BiSet(x.outer & y.outer, x.inner & y.inner)


@dataclass(frozen=True)
class AtomDecomposition:
    """Reachability sets, atoms, and per-atom root index sets.

    ``atom_roots[j]`` is the set of root indices whose tree must span
    atom ``j``.  Root indices are 0-based here; the CLI presents them
    1-based.
    """

    reach: tuple[frozenset[str], ...]
    atoms: tuple[frozenset[str], ...]
    atom_roots: tuple[frozenset[int], ...]

    @cached_property
    def atom_of(self) -> Mapping[str, int]:
        out: dict[str, int] = {}
        for j, members in enumerate(self.atoms):
            for v in members:
                out[v] = j
        return out

    def membership_vector(self, v: str) -> frozenset[int]:
        j = self.atom_of.get(v)
        return self.atom_roots[j] if j is not None else frozenset()


def membership_atoms(
    vertex_order: Sequence[str], reach: Sequence[frozenset[str]]
) -> tuple[tuple[frozenset[str], ...], tuple[frozenset[int], ...]]:
    """Group vertices by their nonempty reaching-root sets.

    Atom order follows the first appearance of each membership vector in
    ``vertex_order``.
    """
    members: list[list[str]] = []
    keys: list[frozenset[int]] = []
    where: dict[frozenset[int], int] = {}
    for v in vertex_order:
        key = frozenset(i for i, u in enumerate(reach) if v in u)
        if not key:
            continue
        j = where.get(key)
        if j is None:
            j = len(members)
            where[key] = j
            members.append([])
            keys.append(key)
        members[j].append(v)
    return tuple(frozenset(m) for m in members), tuple(keys)


def compute_atoms(g: MixedGraph, roots: Sequence[str]) -> AtomDecomposition:
    """Atoms of ``g`` with respect to the given (possibly repeated) roots."""
    for r in roots:
        if r not in g.vertex_set:
            raise ValueError(f"unknown root {r!r}")
    reach = tuple(mixed_reachable_set(g, r) for r in roots)
    atoms, atom_roots = membership_atoms(g.vertices, reach)
    dec = AtomDecomposition(reach=reach, atoms=atoms, atom_roots=atom_roots)
    # reachability only grows along an arc, so root sets must be nested
    for a in g.arcs:
        ju = dec.atom_of.get(a.tail)
        jv = dec.atom_of.get(a.head)
        if ju is None:
            continue
        if jv is None or not atom_roots[ju] <= atom_roots[jv]:
            raise InvariantError(
                f"arc {a.id!r} violates root-set monotonicity between atoms"
            )
    return dec


def biset_in_degree(d: DirectedView, x: BiSet) -> int:
    """Arcs with tail outside the outer set and head inside the inner set."""
    d.require_vertices(x.outer)
    return sum(1 for a in d.arcs if a.head in x.inner and a.tail not in x.outer)


def p_value(dec: AtomDecomposition, roots: Sequence[str], x: BiSet) -> int:
    """Demand of a bi-set: root indices forced to enter ``x.inner``.

    Index i counts when tree i must reach into the inner set (inner is
    inside U_i), its root is not already there, and the wall blocks every
    detour (the wall avoids U_i entirely).  Indices are counted, not
    distinct root vertices, so repeated roots each contribute.
    """
    if not x.inner:
        raise ValueError("bi-set inner set is empty")
    wall = x.wall()
    n = 0
    for i, r in enumerate(roots):
        u = dec.reach[i]
        if x.inner <= u and r not in x.inner and not (wall & u):
            n += 1
    return n


def in_family_F(dec: AtomDecomposition, x: BiSet) -> int | None:
    """Atom index when ``x`` belongs to the demand family, else ``None``.

    Membership requires a nonempty inner set inside a single atom and a
    wall disjoint from that atom.
    """
    if not x.inner:
        return None
    js = {dec.atom_of.get(v) for v in x.inner}
    if None in js or len(js) != 1:
        return None
    (j,) = js
    if x.wall() & dec.atoms[j]:
        return None
    return j


# ---------------------------------------------------------------------------
# auxiliary graphs


@dataclass(frozen=True)
class AuxiliaryGraph:
    """Atom-local mixed graph with one terminal per entering arc.

    Terminal ``t:<arc-id>`` has in-degree 0 and a single arc (keeping the
    original arc id) to the original head; ``terminal_origin`` maps it
    back to the entering arc and its original tail.
    """

    atom_index: int
    graph: MixedGraph
    gamma: frozenset[str]
    terminal_origin: Mapping[str, tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "gamma", frozenset(self.gamma))
        object.__setattr__(self, "terminal_origin", dict(self.terminal_origin))

    @cached_property
    def terminals(self) -> tuple[str, ...]:
        return tuple(v for v in self.graph.vertices if v not in self.gamma)

    def terminal_head(self, t: str) -> str:
        arc_id, _tail = self.terminal_origin[t]
        return self.graph.arc_by_id[arc_id].head


def build_auxiliary(g: MixedGraph, dec: AtomDecomposition, j: int) -> AuxiliaryGraph:
    """Auxiliary graph of atom ``j`` (0-based)."""
    if not 0 <= j < len(dec.atoms):
        raise ValueError(f"atom index {j} out of range")
    gamma = dec.atoms[j]
    for e in g.edges:
        if (e.u in gamma) != (e.v in gamma):
            raise InvariantError(
                f"edge {e.id!r} crosses the atom boundary; atoms cannot share edges"
            )
    internal = [a for a in g.arcs if a.tail in gamma and a.head in gamma]
    entering = [a for a in g.arcs if a.head in gamma and a.tail not in gamma]
    terminals = []
    origin: dict[str, tuple[str, str]] = {}
    for a in entering:
        t = f"{RESERVED_TERMINAL_PREFIX}{a.id}"
        if t in g.vertex_set or t in origin:
            raise InvariantError(f"terminal id {t!r} collides with an existing vertex")
        terminals.append(t)
        origin[t] = (a.id, a.tail)
    vertices = tuple(v for v in g.vertices if v in gamma) + tuple(terminals)
    edges = tuple(e for e in g.edges if e.u in gamma and e.v in gamma)
    arcs = tuple(internal) + tuple(
        Arc(a.id, f"{RESERVED_TERMINAL_PREFIX}{a.id}", a.head) for a in entering
    )
    graph = MixedGraph(vertices, edges, arcs)
    return AuxiliaryGraph(atom_index=j, graph=graph, gamma=gamma, terminal_origin=origin)


def is_consistent(aux: AuxiliaryGraph, x: Iterable[str]) -> bool:
    """Does ``x`` contain the head of every terminal it includes?"""
    xs = aux.graph.require_vertices(x)
    for t in xs:
        if t in aux.terminal_origin and aux.terminal_head(t) not in xs:
            return False
    return True


def in_Hj(aux: AuxiliaryGraph, x: Iterable[str]) -> bool:
    """Family membership: consistent and meets the atom."""
    xs = aux.graph.require_vertices(x)
    return bool(xs & aux.gamma) and is_consistent(aux, xs)


def lift_biset(aux: AuxiliaryGraph, x: Iterable[str]) -> BiSet:
    """Bi-set over the original vertices induced by a family member.

    Included terminals contribute their original tails to the outer set;
    the inner set is the atom part of ``x``.
    """
    xs = aux.graph.require_vertices(x)
    if not in_Hj(aux, xs):
        raise ValueError("set is not a member of the atom family")
    inner = xs & aux.gamma
    tails = frozenset(aux.terminal_origin[t][1] for t in xs - aux.gamma)
    return BiSet(outer=inner | tails, inner=inner)


def p_j_value(
    aux: AuxiliaryGraph,
    dec: AtomDecomposition,
    roots: Sequence[str],
    x: Iterable[str],
) -> int:
    """Atom-level demand: the bi-set demand of the lifted set."""
    return p_value(dec, roots, lift_biset(aux, x))


# ---------------------------------------------------------------------------
# bit-indexed evaluation context


@dataclass(frozen=True)
class TerminalBits:
    bit: int
    head_bit: int
    hit: int  # bitmask over root indices whose U contains the original tail
    arc_id: str
    tail_id: str


@dataclass(frozen=True)
class AtomContext:
    """Bitmask evaluation context for one auxiliary graph.

    Bit i corresponds to ``order[i]``; atom members come first, then
    terminals, so subsets of the atom occupy the low bits.  All demand
    and in-degree evaluations used by the exhaustive code paths go
    through this context.
    """

    aux: AuxiliaryGraph
    order: tuple[str, ...]
    bit_of: Mapping[str, int]
    gamma_mask: int
    full_mask: int
    tree_indices: tuple[int, ...]
    root_bits: Mapping[int, int]  # root index -> singleton mask inside gamma (0 if outside)
    internal_arcs: tuple[tuple[int, int], ...]  # (tail mask, head mask), loops dropped
    terminals: tuple[TerminalBits, ...]
    edge_bits: tuple[tuple[str, int, int], ...]  # (edge id, bit u, bit v), loops dropped
    loop_edge_ids: tuple[str, ...]

    @classmethod
    def build(
        cls, aux: AuxiliaryGraph, dec: AtomDecomposition, roots: Sequence[str]
    ) -> "AtomContext":
        g = aux.graph
        order = tuple(v for v in g.vertices if v in aux.gamma) + tuple(
            v for v in g.vertices if v not in aux.gamma
        )
        bit_of = {v: i for i, v in enumerate(order)}
        gamma_mask = 0
        for v in aux.gamma:
            gamma_mask |= 1 << bit_of[v]
        full_mask = (1 << len(order)) - 1
        R = tuple(sorted(dec.atom_roots[aux.atom_index]))
        root_bits = {
            i: (1 << bit_of[roots[i]]) if roots[i] in aux.gamma else 0 for i in R
        }
        internal = []
        terms = []
        for a in g.arcs:
            if a.tail in aux.terminal_origin:
                _arc_id, tail0 = aux.terminal_origin[a.tail]
                hit = 0
                for i in R:
                    if tail0 in dec.reach[i]:
                        hit |= 1 << i
                terms.append(
                    TerminalBits(
                        bit=1 << bit_of[a.tail],
                        head_bit=1 << bit_of[a.head],
                        hit=hit,
                        arc_id=a.id,
                        tail_id=tail0,
                    )
                )
            elif not a.is_loop():
                internal.append((1 << bit_of[a.tail], 1 << bit_of[a.head]))
        edge_bits = []
        loop_ids = []
        for e in g.edges:
            if e.is_loop():
                loop_ids.append(e.id)
            else:
                edge_bits.append((e.id, 1 << bit_of[e.u], 1 << bit_of[e.v]))
        return cls(
            aux=aux,
            order=order,
            bit_of=bit_of,
            gamma_mask=gamma_mask,
            full_mask=full_mask,
            tree_indices=R,
            root_bits=root_bits,
            internal_arcs=tuple(internal),
            terminals=tuple(terms),
            edge_bits=tuple(edge_bits),
            loop_edge_ids=tuple(loop_ids),
        )

    @property
    def size(self) -> int:
        return len(self.order)

    def to_mask(self, xs: Iterable[str]) -> int:
        m = 0
        for v in xs:
            m |= 1 << self.bit_of[v]
        return m

    def to_vertices(self, mask: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.order) if mask >> i & 1)

    def consistent(self, mask: int) -> bool:
        for t in self.terminals:
            if mask & t.bit and not mask & t.head_bit:
                return False
        return True

    def in_family(self, mask: int) -> bool:
        return bool(mask & self.gamma_mask) and self.consistent(mask)

    def iter_family(self):
        """All family members as masks, ascending."""
        for mask in range(1, self.full_mask + 1):
            if mask & self.gamma_mask and self.consistent(mask):
                yield mask

    def p_of(self, mask: int) -> int:
        """Demand of a family member given as a mask."""
        disq = 0
        for t in self.terminals:
            if mask & t.bit:
                disq |= t.hit
        n = 0
        for i in self.tree_indices:
            if self.root_bits[i] & mask:
                continue
            if disq >> i & 1:
                continue
            n += 1
        return n

    def rho_static(self, mask: int) -> int:
        """In-degree from the atom's own arcs (terminal arcs included)."""
        c = 0
        for tail, head in self.internal_arcs:
            if head & mask and not tail & mask:
                c += 1
        for t in self.terminals:
            if t.head_bit & mask and not t.bit & mask:
                c += 1
        return c
