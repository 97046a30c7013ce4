"""Orient an atom's edges so the resulting digraph covers its demands.

The requirement is the function ``p_j - rho_static`` over the atom's
consistent-set family.  The solver starts from a deterministic
orientation, repeatedly reverses a directed path of oriented edges while
that strictly shrinks the total deficiency, and falls back to exhausting
all orientations when stuck.  Infeasibility is certified by a
subpartition of the auxiliary vertex set whose summed demands exceed what
edges plus fixed arcs can deliver.

Violation checks run over a reduced family: for every inner set only the
terminal completions that maximise the deficit can be binding, and there
is one such completion per subset of the atom's trees.  The reduction is
exact; ``check_cover`` still performs the literal full-family sweep.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bounds import DEFAULT_BOUNDS, Bounds
from .decomposition import AtomContext, AtomDecomposition, AuxiliaryGraph
from .errors import CapacityError, InvariantError
from .graph_core import Orientation


@dataclass(frozen=True)
class CoverRequirement:
    """One atom's orientation subproblem.

    Carries the auxiliary graph plus everything needed to evaluate the
    demand function on the fly.  The total set carries zero requirement;
    that is asserted at construction because the solver relies on it.
    """

    aux: AuxiliaryGraph
    dec: AtomDecomposition
    roots: tuple[str, ...]
    bounds: Bounds = DEFAULT_BOUNDS

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        ctx = AtomContext.build(self.aux, self.dec, self.roots)
        object.__setattr__(self, "_ctx", ctx)
        if ctx.p_of(ctx.full_mask) - ctx.rho_static(ctx.full_mask) != 0:
            raise InvariantError("total auxiliary set carries nonzero requirement")

    @property
    def context(self) -> AtomContext:
        return self._ctx  # type: ignore[attr-defined]

    def h_of(self, mask: int) -> int:
        """Requirement of one family member: demand minus fixed in-degree."""
        ctx = self.context
        return ctx.p_of(mask) - ctx.rho_static(mask)


@dataclass(frozen=True)
class SubpartitionCertificate:
    """Witness that no orientation can cover an atom's demands.

    ``parts`` are disjoint family members of the auxiliary vertex set;
    their summed requirement exceeds the crossing-edge supply by
    ``deficit``.
    """

    atom_index: int
    parts: tuple[frozenset[str], ...]
    deficit: int


def _submasks(mask: int):
    """Nonempty submasks of ``mask``, descending."""
    s = mask
    while s:
        yield s
        s = (s - 1) & mask


def _reduced_table(req: CoverRequirement) -> dict[int, tuple[int, int]]:
    """Per inner set: the worst-case requirement and a set achieving it.

    Maps each nonempty ``Y`` inside the atom to ``(need, xmask)`` where
    ``need`` is the maximum of ``p - rho_static`` over all consistent
    completions ``Y + terminals`` and ``xmask`` attains it.  An
    orientation covers the whole family iff it sends at least ``need``
    edges into every ``Y``.
    """
    ctx = req.context
    if ctx.size > req.bounds.max_enum_vertices:
        raise CapacityError(
            f"|V_j| = {ctx.size} exceeds max_enum_vertices = "
            f"{req.bounds.max_enum_vertices}"
        )
    table: dict[int, tuple[int, int]] = {}
    trees = ctx.tree_indices
    for y in _submasks(ctx.gamma_mask):
        rho_int = sum(1 for t, h in ctx.internal_arcs if h & y and not t & y)
        rt = [t for t in ctx.terminals if t.head_bit & y]
        q = [i for i in trees if not ctx.root_bits[i] & y]
        qmask_of = {i: 1 << pos for pos, i in enumerate(q)}
        hits = []
        for t in rt:
            hq = 0
            for i in q:
                if t.hit >> i & 1:
                    hq |= qmask_of[i]
            hits.append(hq)
        best = None
        best_x = y
        for d in range(1 << len(q)):
            chosen_bits = 0
            union_hit = 0
            chosen = 0
            for t, hq in zip(rt, hits):
                if hq & ~d == 0:
                    chosen_bits |= t.bit
                    union_hit |= hq
                    chosen += 1
            untouched = len(q) - union_hit.bit_count()
            val = untouched - rho_int - (len(rt) - chosen)
            if best is None or val > best:
                best = val
                best_x = y | chosen_bits
        table[y] = (best if best is not None else 0, best_x)
    return table


def _edge_ends(ctx, dirs: list[int]) -> list[tuple[int, int]]:
    """Current (tail bit, head bit) per non-loop edge."""
    out = []
    for (eid, bu, bv), d in zip(ctx.edge_bits, dirs):
        out.append((bu, bv) if d == 0 else (bv, bu))
    return out


def _cross_into(ends: Sequence[tuple[int, int]], y: int) -> int:
    return sum(1 for t, h in ends if h & y and not t & y)


def _find_edge_path(ctx, dirs: list[int], s_bit: int, t_bit: int) -> list[int] | None:
    """Shortest directed path from s to t using oriented edges only.

    Returns edge positions along the path, or ``None``.  Deterministic:
    breadth-first with edges scanned in declaration order.
    """
    if s_bit == t_bit:
        return None
    ends = _edge_ends(ctx, dirs)
    parent: dict[int, tuple[int, int]] = {}
    seen = {s_bit}
    queue = deque([s_bit])
    while queue:
        u = queue.popleft()
        for pos, (tail, head) in enumerate(ends):
            if tail == u and head not in seen:
                seen.add(head)
                parent[head] = (u, pos)
                if head == t_bit:
                    path = []
                    cur = t_bit
                    while cur != s_bit:
                        prev, p = parent[cur]
                        path.append(p)
                        cur = prev
                    path.reverse()
                    return path
                queue.append(head)
    return None


def orient_covering(req: CoverRequirement):
    """Orientation of the atom's edges covering its demands, or a certificate.

    Returns an :class:`Orientation` over exactly the atom's edge ids on
    success, otherwise a :class:`SubpartitionCertificate`.
    """
    ctx = req.context
    table = _reduced_table(req)
    cands = sorted((y, v[0]) for y, v in table.items() if v[0] >= 1)
    # edge direction 0: smaller internal bit is the tail
    dirs = [0] * len(ctx.edge_bits)

    def oriented() -> Orientation:
        direction = {}
        for (eid, bu, bv), d in zip(ctx.edge_bits, dirs):
            u = ctx.order[bu.bit_length() - 1]
            v = ctx.order[bv.bit_length() - 1]
            direction[eid] = (u, v) if d == 0 else (v, u)
        for eid in ctx.loop_edge_ids:
            e = ctx.aux.graph.edge_by_id[eid]
            direction[eid] = (e.u, e.v)
        return Orientation(direction)

    def phi() -> int:
        ends = _edge_ends(ctx, dirs)
        return sum(max(0, need - _cross_into(ends, y)) for y, need in cands)

    # quick refutation: a set demanding more than its whole edge boundary
    # cannot be covered by any orientation, so go straight to a certificate
    for y, need in cands:
        boundary = sum(
            1 for _eid, bu, bv in ctx.edge_bits if bool(bu & y) != bool(bv & y)
        )
        if boundary < need:
            cert = _extract_certificate(req, table)
            if cert is None:
                raise InvariantError(
                    "edge boundary refutes coverage but no positive-deficit "
                    "subpartition exists"
                )
            return cert

    # Reversing a directed path that starts inside Y and ends outside turns
    # it into one more path entering Y, so deficient sets scan their members
    # as path starts.  Any reversal is kept only on a strict drop of the
    # total deficiency, so the loop terminates.
    total = phi()
    while total > 0:
        improved = False
        ends = _edge_ends(ctx, dirs)
        for y, need in cands:
            if improved:
                break
            if _cross_into(ends, y) >= need:
                continue
            for start_pos in range(ctx.size):
                if improved:
                    break
                start_bit = 1 << start_pos
                if not start_bit & y:
                    continue
                for end_pos in range(ctx.size):
                    end_bit = 1 << end_pos
                    if not end_bit & ctx.gamma_mask or end_bit & y:
                        continue
                    path = _find_edge_path(ctx, dirs, start_bit, end_bit)
                    if path is None:
                        continue
                    for p in path:
                        dirs[p] ^= 1
                    new_total = phi()
                    if new_total < total:
                        total = new_total
                        improved = True
                        break
                    for p in path:
                        dirs[p] ^= 1
        if not improved:
            break
    if total == 0:
        return oriented()

    # exhaustive fallback: the descent got stuck
    m = len(ctx.edge_bits)
    if m > req.bounds.max_enum_edges:
        raise CapacityError(
            f"|E_j| = {m} exceeds max_enum_edges = {req.bounds.max_enum_edges}"
        )
    for combo in range(1 << m):
        for pos in range(m):
            dirs[pos] = combo >> pos & 1
        ends = _edge_ends(ctx, dirs)
        if all(_cross_into(ends, y) >= need for y, need in cands):
            return oriented()

    cert = _extract_certificate(req, table)
    if cert is None:
        raise InvariantError(
            "no covering orientation exists, yet no subpartition has positive deficit"
        )
    return cert


def _extract_certificate(
    req: CoverRequirement, table: dict[int, tuple[int, int]] | None = None
) -> SubpartitionCertificate | None:
    """Maximum-deficit subpartition; fewest parts, lexicographic tie-break.

    Only parts with positive requirement can help (dropping a
    nonpositive part never lowers the deficit), so the search runs over
    the reduced table.  Returns ``None`` when every subpartition has
    deficit <= 0.
    """
    ctx = req.context
    if table is None:
        table = _reduced_table(req)
    pool = {y: (need, xm) for y, (need, xm) in table.items() if need >= 1}
    if not pool:
        return None
    edges = ctx.edge_bits

    def in_edges(y: int) -> int:
        return sum(1 for _eid, bu, bv in edges if bu & y and bv & y)

    def touch(w: int) -> int:
        return sum(1 for _eid, bu, bv in edges if (bu | bv) & w)

    # best[w]: (value, -parts, parts tuple) over exact disjoint covers of w
    best: dict[int, tuple[int, int, tuple[int, ...]]] = {0: (0, 0, ())}
    pool_items = sorted(pool.items())
    for w in range(1, ctx.gamma_mask + 1):
        if w & ~ctx.gamma_mask:
            continue
        low = w & -w
        cur = None
        for y, (need, xm) in pool_items:
            if y & ~w or not y & low:
                continue
            prev = best.get(w ^ y)
            if prev is None:
                continue
            value = prev[0] + need + in_edges(y)
            parts = tuple(sorted(prev[2] + (xm,)))
            cand = (value, prev[1] - 1, parts)
            if cur is None or (cand[0], cand[1], _neg_lex(cand[2])) > (
                cur[0],
                cur[1],
                _neg_lex(cur[2]),
            ):
                cur = cand
        if cur is not None:
            best[w] = cur

    winner = None
    for w, (value, negparts, parts) in sorted(best.items()):
        if not parts:
            continue
        deficit = value - touch(w)
        key = (deficit, negparts, _neg_lex(parts))
        if winner is None or key > winner[0]:
            winner = (key, parts, deficit)
    if winner is None or winner[2] < 1:
        return None
    _key, parts, deficit = winner
    return SubpartitionCertificate(
        atom_index=ctx.aux.atom_index,
        parts=tuple(ctx.to_vertices(p) for p in parts),
        deficit=deficit,
    )


def _neg_lex(parts: tuple[int, ...]) -> tuple[int, ...]:
    # larger under max-comparison exactly when lexicographically smaller
    return tuple(-p for p in parts)


def check_cover(req: CoverRequirement, o: Orientation) -> frozenset[str] | None:
    """First family member (ascending mask order) left uncovered, if any.

    This is the literal full-family sweep; the solver's internal checks
    use the reduced table instead.
    """
    ctx = req.context
    if ctx.size > req.bounds.max_enum_vertices:
        raise CapacityError(
            f"|V_j| = {ctx.size} exceeds max_enum_vertices = "
            f"{req.bounds.max_enum_vertices}"
        )
    edge_ids = frozenset(e.id for e in ctx.aux.graph.edges)
    if o.edge_ids() != edge_ids:
        raise ValueError("orientation does not orient exactly the atom's edges")
    ends = []
    for eid, _bu, _bv in ctx.edge_bits:
        t, h = o.direction[eid]
        ends.append((1 << ctx.bit_of[t], 1 << ctx.bit_of[h]))
    for mask in ctx.iter_family():
        rho = ctx.rho_static(mask) + _cross_into(ends, mask)
        if rho < ctx.p_of(mask):
            return ctx.to_vertices(mask)
    return None


def subpartition_deficit(req: CoverRequirement, parts: Iterable[Iterable[str]]) -> int:
    """Summed requirement of the parts minus the crossing-edge supply."""
    ctx = req.context
    masks = []
    seen = 0
    for part in parts:
        m = ctx.to_mask(part)
        if not ctx.in_family(m):
            raise ValueError("subpartition part is not a member of the atom family")
        if m & seen:
            raise ValueError("subpartition parts overlap")
        seen |= m
        masks.append(m)
    total = sum(ctx.p_of(m) - ctx.rho_static(m) for m in masks)
    crossing = 0
    for _eid, bu, bv in ctx.edge_bits:
        pu = next((i for i, m in enumerate(masks) if bu & m), None)
        pv = next((i for i, m in enumerate(masks) if bv & m), None)
        if (pu is not None or pv is not None) and pu != pv:
            crossing += 1
    return total - crossing


def make_subpartition_certificate(
    req: CoverRequirement, parts: Iterable[Iterable[str]]
) -> SubpartitionCertificate:
    """Validated certificate from explicit parts; deficit must be positive."""
    parts = tuple(frozenset(p) for p in parts)
    deficit = subpartition_deficit(req, parts)
    if deficit < 1:
        raise ValueError(f"subpartition has deficit {deficit}; not a certificate")
    return SubpartitionCertificate(
        atom_index=req.aux.atom_index, parts=parts, deficit=deficit
    )
