"""Mixed multigraph model, parsing, orientations, and cut primitives.

A mixed graph combines undirected edges and directed arcs over a shared
vertex set.  Everything here is immutable after construction and every
operation is a pure function, so instances can be shared freely between
threads.

Vertex ids are arbitrary whitespace-free tokens.  Internal indices follow
first-appearance order, and any "deterministic order" promised by this
package means ascending internal index (for edges and arcs: declaration
order).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ParseError

#: vertex-id prefix reserved for the terminal vertices of auxiliary graphs
RESERVED_TERMINAL_PREFIX = "t:"


@dataclass(frozen=True)
class Edge:
    """Undirected edge; parallel edges are distinguished by id."""

    id: str
    u: str
    v: str

    @property
    def ends(self) -> frozenset[str]:
        return frozenset((self.u, self.v))

    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class Arc:
    """Directed arc from ``tail`` to ``head``."""

    id: str
    tail: str
    head: str

    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class CheckResult:
    """Verdict of a validator: truthy when the check passed."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


OK_RESULT = CheckResult(True)


@dataclass(frozen=True)
class MixedGraph:
    """Immutable mixed multigraph over named vertices.

    Self-loops are accepted but never contribute to cut counts or
    packings; they can never appear in an arborescence.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        seen: set[str] = set()
        for v in self.vertices:
            if v in seen:
                raise ValueError(f"duplicate vertex id {v!r}")
            seen.add(v)
        eids: set[str] = set()
        for e in self.edges:
            if e.id in eids:
                raise ValueError(f"duplicate edge id {e.id!r}")
            eids.add(e.id)
            for x in (e.u, e.v):
                if x not in seen:
                    raise ValueError(f"unknown vertex {x!r} on edge {e.id!r}")
        aids: set[str] = set()
        for a in self.arcs:
            if a.id in aids:
                raise ValueError(f"duplicate arc id {a.id!r}")
            aids.add(a.id)
            for x in (a.tail, a.head):
                if x not in seen:
                    raise ValueError(f"unknown vertex {x!r} on arc {a.id!r}")

    @cached_property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def vertex_index(self) -> Mapping[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_by_id(self) -> Mapping[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def arc_by_id(self) -> Mapping[str, Arc]:
        return {a.id: a for a in self.arcs}

    def index(self, v: str) -> int:
        try:
            return self.vertex_index[v]
        except KeyError:
            raise ValueError(f"unknown vertex {v!r}") from None

    def require_vertices(self, xs: Iterable[str]) -> frozenset[str]:
        xs = frozenset(xs)
        stray = xs - self.vertex_set
        if stray:
            raise ValueError(f"unknown vertex {sorted(stray)[0]!r}")
        return xs


@dataclass(frozen=True)
class Orientation:
    """Total orientation of an edge set: edge-id -> (tail, head)."""

    direction: Mapping[str, tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "direction", dict(self.direction))

    def edge_ids(self) -> frozenset[str]:
        return frozenset(self.direction)


@dataclass(frozen=True)
class ViewArc:
    """Arc of a :class:`DirectedView`, tagged with where it came from."""

    id: str
    tail: str
    head: str
    origin: str  # "arc" for native arcs, "edge" for oriented edges

    @property
    def key(self) -> tuple[str, str]:
        return (self.origin, self.id)

    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class DirectedView:
    """A fully directed picture of a mixed graph.

    Combines native arcs with oriented edges; origin tags keep the two
    populations apart so results can be mapped back.
    """

    vertices: tuple[str, ...]
    arcs: tuple[ViewArc, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arcs", tuple(self.arcs))

    @cached_property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def arc_by_key(self) -> Mapping[tuple[str, str], ViewArc]:
        return {a.key: a for a in self.arcs}

    def require_vertices(self, xs: Iterable[str]) -> frozenset[str]:
        xs = frozenset(xs)
        stray = xs - self.vertex_set
        if stray:
            raise ValueError(f"unknown vertex {sorted(stray)[0]!r}")
        return xs


@dataclass(frozen=True)
class Subpartition:
    """Pairwise-disjoint nonempty vertex subsets."""

    parts: tuple[frozenset[str], ...]

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        seen: set[str] = set()
        for p in parts:
            if not p:
                raise ValueError("subpartition contains an empty part")
            if p & seen:
                raise ValueError("subpartition parts overlap")
            seen |= p


# ---------------------------------------------------------------------------
# parsing


def parse_mixed_graph(text: str) -> tuple[MixedGraph, list[str]]:
    """Parse the line-based graph format.

    Grammar (one declaration per line, ``#`` starts a comment)::

        vertex <id>
        edge <id1> <id2> [<edge-id>]
        arc <tail-id> <head-id> [<arc-id>]
        root <id>

    Edges and arcs without an explicit id get ``e<n>`` / ``a<n>`` where
    ``n`` is the declaration ordinal of their kind.  Roots keep file
    order; the i-th root line defines tree index i.
    """
    vertices: list[str] = []
    vset: set[str] = set()
    pending_edges: list[tuple[int, str | None, str, str]] = []
    pending_arcs: list[tuple[int, str | None, str, str]] = []
    roots: list[str] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tok = body.split()
        kind = tok[0]
        if kind == "vertex":
            if len(tok) != 2:
                raise ParseError("expected 'vertex <id>'", lineno)
            v = tok[1]
            if v.startswith(RESERVED_TERMINAL_PREFIX):
                raise ParseError(
                    f"vertex id {v!r} uses the reserved "
                    f"{RESERVED_TERMINAL_PREFIX!r} prefix",
                    lineno,
                )
            if v in vset:
                raise ParseError(f"duplicate vertex {v!r}", lineno)
            vertices.append(v)
            vset.add(v)
        elif kind in ("edge", "arc"):
            if len(tok) not in (3, 4):
                raise ParseError(f"expected '{kind} <v> <v> [<id>]'", lineno)
            a, b = tok[1], tok[2]
            for x in (a, b):
                if x not in vset:
                    raise ParseError(f"unknown vertex {x!r}", lineno)
            item = (lineno, tok[3] if len(tok) == 4 else None, a, b)
            (pending_edges if kind == "edge" else pending_arcs).append(item)
        elif kind == "root":
            if len(tok) != 2:
                raise ParseError("expected 'root <id>'", lineno)
            if tok[1] not in vset:
                raise ParseError(f"unknown vertex {tok[1]!r}", lineno)
            roots.append(tok[1])
        else:
            raise ParseError(f"unknown declaration {kind!r}", lineno)

    def finish(pending, kind, prefix, make):
        used: dict[str, int] = {}
        for lineno, xid, _a, _b in pending:
            if xid is not None:
                if xid in used:
                    raise ParseError(f"duplicate {kind} id {xid!r}", lineno)
                used[xid] = lineno
        out = []
        for ordinal, (lineno, xid, a, b) in enumerate(pending, start=1):
            if xid is None:
                xid = f"{prefix}{ordinal}"
                if xid in used:
                    raise ParseError(
                        f"auto-assigned id {xid!r} collides with an explicit id",
                        lineno,
                    )
                used[xid] = lineno
            out.append(make(xid, a, b))
        return tuple(out)

    edges = finish(pending_edges, "edge", "e", lambda i, a, b: Edge(i, a, b))
    arcs = finish(pending_arcs, "arc", "a", lambda i, a, b: Arc(i, a, b))
    return MixedGraph(tuple(vertices), edges, arcs), roots


# ---------------------------------------------------------------------------
# reachability and cut primitives


def mixed_reachable_set(g: MixedGraph, s: str) -> frozenset[str]:
    """All vertices reachable from ``s`` by a mixed path.

    Arcs are traversed tail to head only; edges both ways (each edge acts
    as a pair of antiparallel arcs).
    """
    if s not in g.vertex_set:
        raise ValueError(f"unknown vertex {s!r}")
    succ: dict[str, list[str]] = {v: [] for v in g.vertices}
    for a in g.arcs:
        succ[a.tail].append(a.head)
    for e in g.edges:
        succ[e.u].append(e.v)
        succ[e.v].append(e.u)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def in_degree(d: DirectedView, x: Iterable[str]) -> int:
    """Number of arcs entering ``x``: head inside, tail outside."""
    xs = d.require_vertices(x)
    return sum(1 for a in d.arcs if a.head in xs and a.tail not in xs)


def entering_arcs(g: MixedGraph, x: Iterable[str]) -> list[str]:
    """Ids of arcs entering ``x``, in declaration order."""
    xs = g.require_vertices(x)
    return [a.id for a in g.arcs if a.head in xs and a.tail not in xs]


def induced(g: MixedGraph, x: Iterable[str]) -> tuple[list[str], list[str]]:
    """Edge and arc ids with both endpoints inside ``x``, declaration order."""
    xs = g.require_vertices(x)
    es = [e.id for e in g.edges if e.u in xs and e.v in xs]
    as_ = [a.id for a in g.arcs if a.tail in xs and a.head in xs]
    return es, as_


def crossing_edge_count(g: MixedGraph, p: Subpartition) -> int:
    """Edges joining distinct parts of ``p``, or a part and the outside.

    An edge counts when at least one endpoint lies in some part and no
    single part contains both endpoints.  Self-loops never count.
    """
    for part in p.parts:
        g.require_vertices(part)
    part_of: dict[str, int] = {}
    for i, part in enumerate(p.parts):
        for v in part:
            part_of[v] = i
    n = 0
    for e in g.edges:
        if e.is_loop():
            continue
        pu = part_of.get(e.u)
        pv = part_of.get(e.v)
        if (pu is not None or pv is not None) and pu != pv:
            n += 1
    return n


def apply_orientation(g: MixedGraph, o: Orientation) -> DirectedView:
    """Replace every edge by an arc in the direction chosen by ``o``."""
    edge_ids = frozenset(e.id for e in g.edges)
    if o.edge_ids() != edge_ids:
        missing = sorted(edge_ids - o.edge_ids())
        extra = sorted(o.edge_ids() - edge_ids)
        raise ValueError(
            f"orientation domain mismatch (missing {missing}, extra {extra})"
        )
    arcs = [ViewArc(a.id, a.tail, a.head, "arc") for a in g.arcs]
    for e in g.edges:
        t, h = o.direction[e.id]
        if frozenset((t, h)) != e.ends:
            raise ValueError(
                f"orientation of edge {e.id!r} does not match its endpoints"
            )
        arcs.append(ViewArc(e.id, t, h, "edge"))
    return DirectedView(g.vertices, tuple(arcs))


def arcs_view(g: MixedGraph) -> DirectedView:
    """Directed view of the native arcs alone (edges ignored)."""
    return DirectedView(
        g.vertices, tuple(ViewArc(a.id, a.tail, a.head, "arc") for a in g.arcs)
    )


def lexicographic_orientation(g: MixedGraph, edge_ids: Iterable[str] | None = None) -> Orientation:
    """Orient each edge from its smaller to its larger internal index."""
    idx = g.vertex_index
    chosen = g.edges if edge_ids is None else [g.edge_by_id[i] for i in edge_ids]
    direction = {}
    for e in chosen:
        if idx[e.u] <= idx[e.v]:
            direction[e.id] = (e.u, e.v)
        else:
            direction[e.id] = (e.v, e.u)
    return Orientation(direction)
