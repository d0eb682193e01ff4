"""Triangle census with multiplicity counting, round/frustrated typing,
anchors, a/b/c roles and the occupancy statistics bounded by the lemmas.

Directed graphs are counted on their unoriented support: a corner triple
whose three pairs are all linked yields one record per choice of one
directed link per pair, so a fully doubly-linked triple yields 8.

Orientation index of a record on corners ``i < j < m``: bit 0 is set when
the ``{i, j}`` link runs ``j -> i``, bit 1 when ``{j, m}`` runs ``m -> j``,
bit 2 when ``{i, m}`` runs ``m -> i``.  Indices 3 and 4 are the two
directed 3-cycles.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .graphs import EdgeRef, Graph, KOutDigraph, UndirectedGraph

ROUND = "round"
FRUSTRATED = "frustrated"
UNDIRECTED = "undirected"
ROLES = ("a", "b", "c")

# below this node count the count-only kernel uses dense matrices
DENSE_LIMIT = 64


class TriangleRecord(NamedTuple):
    corners: tuple[int, int, int]
    kind: str
    anchor: int
    roles: tuple[EdgeRef, ...]
    orientation_index: int = 0

    @property
    def role_map(self) -> dict[str, EdgeRef]:
        return dict(zip(ROLES, self.roles))

    def links(self) -> list[EdgeRef]:
        if self.kind == UNDIRECTED:
            i, j, m = self.corners
            return [EdgeRef(i, j, False), EdgeRef(j, m, False), EdgeRef(i, m, False)]
        return list(self.roles)


def _orientation_arcs(idx: int) -> list[tuple[int, int]]:
    """Arcs of orientation ``idx`` as position pairs into the sorted corner triple."""
    return [
        (1, 0) if idx & 1 else (0, 1),
        (2, 1) if idx & 2 else (1, 2),
        (2, 0) if idx & 4 else (0, 2),
    ]


def _role_table() -> list[tuple[str, int, tuple[tuple[int, int], ...]]]:
    table = []
    for idx in range(8):
        arcs = _orientation_arcs(idx)
        nxt = {}
        outdeg = [0, 0, 0]
        for s, d in arcs:
            outdeg[s] += 1
            nxt.setdefault(s, []).append(d)
        if outdeg == [1, 1, 1]:
            a = (0, nxt[0][0])
            b = (a[1], nxt[a[1]][0])
            c = (b[1], nxt[b[1]][0])
            table.append((ROUND, 0, (a, b, c)))
        else:
            src = outdeg.index(2)
            mid = outdeg.index(1)
            sink = outdeg.index(0)
            table.append((FRUSTRATED, src, ((src, mid), (mid, sink), (src, sink))))
    return table


_ROLE_TABLE = _role_table()
ROUND_INDICES = tuple(i for i, row in enumerate(_ROLE_TABLE) if row[0] == ROUND)


def record_from_orientation(corners: Sequence[int], idx: int) -> TriangleRecord:
    """The record for sorted ``corners`` under orientation ``idx``."""
    kind, anchor, roles = _ROLE_TABLE[idx]
    c = tuple(corners)
    return TriangleRecord(c, kind, c[anchor], tuple(EdgeRef(c[s], c[d], True) for s, d in roles), idx)


def orientation_of(corners: Sequence[int], arcs: Sequence[tuple[int, int]]) -> int:
    """Inverse of :func:`record_from_orientation`: index from three 1-based arcs."""
    i, j, m = corners
    arcs = set(arcs)
    idx = 0
    if (j, i) in arcs:
        idx |= 1
    if (m, j) in arcs:
        idx |= 2
    if (m, i) in arcs:
        idx |= 4
    return idx


@dataclass
class CensusReport:
    n: int
    directed: bool
    t: int
    records: list[TriangleRecord]
    ell_triang: int
    link_occupancy: dict[EdgeRef, Counter]
    anchor_counts: list[Counter]
    in_degrees: list[int] | None = None
    model: str | None = None

    @property
    def round_count(self) -> int:
        return sum(1 for r in self.records if r.kind == ROUND)

    @property
    def frustrated_count(self) -> int:
        return sum(1 for r in self.records if r.kind == FRUSTRATED)

    def anchor_total(self, node: int) -> int:
        return sum(self.anchor_counts[node - 1].values())

    def to_json(self, include_records: bool = False) -> dict:
        out = {
            "n": self.n,
            "directed": self.directed,
            "model": self.model,
            "t": self.t,
            "round": self.round_count if self.directed else None,
            "frustrated": self.frustrated_count if self.directed else None,
            "ell_triang": self.ell_triang,
            "anchor_counts": {
                str(i): dict(sorted(c.items())) for i, c in enumerate(self.anchor_counts, start=1) if c
            },
            "in_degrees": self.in_degrees,
            "occupancy": {
                str(link): {f"{role}:{kind}": v for (role, kind), v in sorted(cnt.items())}
                for link, cnt in sorted(self.link_occupancy.items())
            },
        }
        if include_records:
            out["records"] = [
                {
                    "corners": list(r.corners),
                    "kind": r.kind,
                    "anchor": r.anchor,
                    "orientation_index": r.orientation_index,
                    "roles": {name: str(e) for name, e in r.role_map.items()},
                }
                for r in self.records
            ]
        return out


def _assemble(graph: Graph, records: list[TriangleRecord], model: str | None) -> CensusReport:
    occupancy: dict[EdgeRef, Counter] = {}
    anchors = [Counter() for _ in range(graph.n)]
    for rec in records:
        anchors[rec.anchor - 1][rec.kind] += 1
        if rec.kind == UNDIRECTED:
            for link in rec.links():
                occupancy.setdefault(link, Counter())[("edge", UNDIRECTED)] += 1
        else:
            for role, link in zip(ROLES, rec.roles):
                occupancy.setdefault(link, Counter())[(role, rec.kind)] += 1
    return CensusReport(
        n=graph.n,
        directed=graph.directed,
        t=len(records),
        records=records,
        ell_triang=len(occupancy),
        link_occupancy=occupancy,
        anchor_counts=anchors,
        in_degrees=graph.in_degrees() if graph.directed else None,
        model=model,
    )


def _support_triples(graph: Graph):
    for u, v in graph.support_edges():
        for w in graph.higher_common(u, v):
            yield u + 1, v + 1, w + 1


def count_undirected(g: UndirectedGraph, model: str | None = None) -> CensusReport:
    """Census of a simple undirected graph; ``model`` tags which caps apply later."""
    records = [TriangleRecord(tri, UNDIRECTED, tri[0], (), 0) for tri in _support_triples(g)]
    return _assemble(g, records, model)


def count_kout(g: KOutDigraph, model: str | None = "k-out") -> CensusReport:
    """Directed census under multiplicity counting."""
    records = []
    has = g.has_arc
    for i, j, m in _support_triples(g):
        # per pair: which of the two directions are present, as allowed bit values
        p0 = [b for b, ok in ((0, has(i, j)), (1, has(j, i))) if ok]
        p1 = [b for b, ok in ((0, has(j, m)), (2, has(m, j))) if ok]
        p2 = [b for b, ok in ((0, has(i, m)), (4, has(m, i))) if ok]
        idxs = sorted(x | y | z for x in p0 for y in p1 for z in p2)
        for idx in idxs:
            records.append(record_from_orientation((i, j, m), idx))
    return _assemble(g, records, model)


def census(g: Graph, model: str | None = None) -> CensusReport:
    if g.directed:
        return count_kout(g, model or "k-out")
    return count_undirected(g, model)


# --------------------------------------------------------------------------
# count-only kernels


def triangle_count(g: Graph) -> int:
    """Total ``t`` without building records."""
    return triangle_stats(g)[0]


def triangle_stats(g: Graph) -> tuple[int, int]:
    """``(t, max link occupancy)``.

    A directed link ``u -> v`` sits in as many records as the weighted
    number of common support neighbors of ``u`` and ``v``, which equals
    the occupancy of the reverse link and of the undirected support pair.
    """
    if not g._use_bits:
        rep = census(g)
        occ = max((sum(c.values()) for c in rep.link_occupancy.values()), default=0)
        return rep.t, occ
    bits = g.support_bits
    t = 0
    top = 0
    if not g.directed:
        for u, v in g.support_edges():
            common = bits[u] & bits[v]
            c = common.bit_count()
            if c > top:
                top = c
            t += ((common >> (v + 1)) << (v + 1)).bit_count()
        return t, top
    out = g.out_bits
    # double[u]: support neighbors joined to u in both directions
    inb = [0] * g.n
    for u, b in enumerate(out):
        x = b
        while x:
            low = x & -x
            inb[low.bit_length() - 1] |= 1 << u
            x ^= low
    double = [out[u] & inb[u] for u in range(g.n)]
    for u, v in g.support_edges():
        common = bits[u] & bits[v]
        du, dv = double[u], double[v]
        occ = common.bit_count() + (common & du).bit_count() + (common & dv).bit_count() + (common & du & dv).bit_count()
        if occ > top:
            top = occ
        hi = (common >> (v + 1)) << (v + 1)
        w = hi.bit_count() + (hi & du).bit_count() + (hi & dv).bit_count() + (hi & du & dv).bit_count()
        muv = 2 if (du >> v) & 1 else 1
        t += muv * w
    return t, top


def sparse_triangle_stats(n: int, src, dst) -> tuple[int, int]:
    """``(t, max link occupancy)`` from 0-based endpoint arrays.

    Works for both arcs and undirected edges: with ``W = A + A^T`` the
    support multiplicity matrix, ``t = sum(W * (W @ W)) / 6`` and the
    occupancy of a link between ``u`` and ``v`` is ``(W @ W)[u, v]``.
    """
    if n == 0 or len(src) == 0:
        return 0, 0
    if n <= DENSE_LIMIT:
        w = np.zeros((n, n), dtype=np.int64)
        np.add.at(w, (np.asarray(src), np.asarray(dst)), 1)
        w += w.T
        common = w @ w
        return int((common * w).sum()) // 6, int(common[w > 0].max())
    data = np.ones(len(src), dtype=np.int64)
    a = sp.csr_matrix((data, (np.asarray(src), np.asarray(dst))), shape=(n, n))
    w = (a + a.T).tocsr()
    common = (w @ w).multiply(w > 0)
    t = int(common.multiply(w).sum()) // 6
    top = int(common.max()) if common.nnz else 0
    return t, top


# --------------------------------------------------------------------------
# naive oracles (kept independent of the support-graph kernel)


def naive_records_kout(g: KOutDigraph) -> list[TriangleRecord]:
    """All triples times all 8 orientations, checked on a plain adjacency matrix.

    Shares nothing with the support-graph kernel except the role table.
    """
    n = g.n
    adj = [[False] * (n + 1) for _ in range(n + 1)]
    for u, v in g.arcs():
        adj[u][v] = True
    out = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if not (adj[i][j] or adj[j][i]):
                continue
            for m in range(j + 1, n + 1):
                for idx in range(8):
                    ok = (adj[j][i] if idx & 1 else adj[i][j]) and \
                         (adj[m][j] if idx & 2 else adj[j][m]) and \
                         (adj[m][i] if idx & 4 else adj[i][m])
                    if ok:
                        out.append(record_from_orientation((i, j, m), idx))
    return out


def naive_count_undirected(g: UndirectedGraph) -> int:
    edges = set(g.edges)
    return sum(
        1
        for i, j, m in combinations(range(1, g.n + 1), 3)
        if (i, j) in edges and (j, m) in edges and (i, m) in edges
    )


# --------------------------------------------------------------------------
# lemma checks


class OccupancyViolation(NamedTuple):
    rule: str
    where: str
    value: int
    cap: int

    def __str__(self) -> str:
        return f"{self.rule} at {self.where}: {self.value} > {self.cap}"


# (role, kind) -> cap as a function of k
_LINK_CAPS = {
    ("a", ROUND): lambda k: k,
    ("a", FRUSTRATED): lambda k: k - 1,
    ("b", ROUND): lambda k: k,
    ("c", ROUND): lambda k: k,
    ("c", FRUSTRATED): lambda k: k - 1,
}


def occupancy_violations(r: CensusReport, k: int) -> list[OccupancyViolation]:
    """Per-link and per-anchor caps that the report must respect.

    Directed reports get the k-out role caps and anchor caps k^2 (round),
    k(k-1) (frustrated).  Undirected reports tagged ``k-regular`` get the
    per-edge cap k-1; other undirected reports only the anchor-sum check.
    """
    bad: list[OccupancyViolation] = []
    total = sum(sum(c.values()) for c in r.anchor_counts)
    if total != r.t:
        bad.append(OccupancyViolation("anchor sum != t", "report", total, r.t))
    if r.directed:
        for link, cnt in r.link_occupancy.items():
            for cell, cap_fn in _LINK_CAPS.items():
                if cnt.get(cell, 0) > cap_fn(k):
                    bad.append(OccupancyViolation(f"role {cell[0]} in {cell[1]} triangles", str(link), cnt[cell], cap_fn(k)))
        for node, cnt in enumerate(r.anchor_counts, start=1):
            if cnt.get(ROUND, 0) > k * k:
                bad.append(OccupancyViolation("round triangles anchored", f"node {node}", cnt[ROUND], k * k))
            if cnt.get(FRUSTRATED, 0) > k * (k - 1):
                bad.append(OccupancyViolation("frustrated triangles anchored", f"node {node}", cnt[FRUSTRATED], k * (k - 1)))
    elif r.model == "k-regular":
        for link, cnt in r.link_occupancy.items():
            s = sum(cnt.values())
            if s > k - 1:
                bad.append(OccupancyViolation("triangles on one edge", str(link), s, k - 1))
    return bad


def triang_sandwich(r: CensusReport, k: int) -> bool:
    """``t/(2k) <= ell_triang <= 3t``; vacuous when t == 0."""
    if r.t == 0:
        return True
    return r.t <= 2 * k * r.ell_triang and r.ell_triang <= 3 * r.t


def product_vi_bound(r: CensusReport | Sequence[int], k: int) -> tuple[float, float]:
    """``(log prod(v_i + k), n log 2k)`` from a directed report or an in-degree sequence."""
    v = r.in_degrees if isinstance(r, CensusReport) else list(r)
    if v is None:
        raise ValueError("product_vi_bound needs a directed census")
    prod = math.prod(x + k for x in v)
    n = len(v)
    if prod == 0:
        return -math.inf, n * math.log(2 * k) if k else -math.inf
    return math.log(prod), n * math.log(2 * k)


def product_vi_holds(r: CensusReport | Sequence[int], k: int) -> bool:
    """Exact integer form of the product bound."""
    v = r.in_degrees if isinstance(r, CensusReport) else list(r)
    return math.prod(x + k for x in v) <= (2 * k) ** len(v)
