"""Witness graphs for the lower bounds: node-disjoint complete clusters that
carry every triangle, plus a bipartite (hence triangle-free) remainder."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, SpecError
from .graphs import MODELS, Graph, KOutDigraph, UndirectedGraph


@dataclass(frozen=True)
class ConstructionPlan:
    model: str
    n: int
    k: int
    target_t: int
    cluster_size: int
    cluster_count: int
    remainder: int
    triangles_per_cluster: int
    predicted_t: int
    links_used_in_clusters: int
    remainder_links: int

    def to_json(self) -> dict:
        return asdict(self)

    @property
    def cluster_nodes(self) -> range:
        return range(1, self.cluster_size * self.cluster_count + 1)

    @property
    def remainder_nodes(self) -> range:
        return range(self.cluster_size * self.cluster_count + 1, self.n + 1)

    def halves(self) -> tuple[list[int], list[int]]:
        """Remainder split, larger half first."""
        nodes = list(self.remainder_nodes)
        h = (len(nodes) + 1) // 2
        return nodes[:h], nodes[h:]


def triangles_per_cluster(model: str, k: int) -> int:
    """Triangles in one complete cluster on k+1 nodes (k-out counts each triple 8 times)."""
    if model == "k-out":
        return 8 * math.comb(k + 1, 3)
    if model == "k-regular":
        return math.comb(k + 1, 3)
    raise SpecError(f"no fixed cluster for model {model!r}")


def _clique_size(t: int) -> tuple[int | None, int, int]:
    """``(m, below, above)``: m with C(m,3) == t if any, else None, plus neighbours."""
    m = 0
    while math.comb(m + 1, 3) <= t:
        m += 1
    # now C(m,3) <= t < C(m+1,3)
    if t == 0:
        return 0, 0, 1
    if math.comb(m, 3) == t:
        return m, t, t
    return None, math.comb(m, 3), math.comb(m + 1, 3)


def plan(model: str, n: int, k: int, target_t: int) -> ConstructionPlan:
    """Size a cluster-plus-remainder construction with exactly ``target_t`` triangles.

    Raises CapacityError when the count is not achievable (naming the
    nearest achievable counts) or the remainder cannot be built.
    """
    if model not in MODELS:
        raise SpecError(f"unknown model {model!r}")
    if n < 0 or k < 0 or target_t < 0:
        raise SpecError("n, k and target_t must be non-negative")

    if model == "general":
        budget = k * n
        if budget > math.comb(n, 2):
            raise SpecError(f"general model needs k*n <= C(n,2): {budget} > {math.comb(n, 2)}")
        m, below, above = _clique_size(target_t)
        if m is None:
            raise CapacityError(
                f"t={target_t} is not C(m,3) for any m; nearest achievable: {below} and {above}",
                constraint="clique triangle count",
            )
        used = math.comb(m, 2)
        rem = n - m
        if rem < 0:
            raise CapacityError(f"clique needs {m} nodes but n={n}", constraint="node count")
        if used > budget:
            raise CapacityError(
                f"clique K_{m} uses {used} links but the budget k*n is {budget}", constraint="link budget"
            )
        left = budget - used
        cross = ((rem + 1) // 2) * (rem // 2)
        if left > cross:
            raise CapacityError(
                f"remainder of {rem} nodes holds at most {cross} bipartite edges, {left} needed",
                constraint="bipartite remainder capacity",
            )
        return ConstructionPlan(model, n, k, target_t, m, 1 if m else 0, rem, target_t, target_t, used, left)

    per = triangles_per_cluster(model, k)
    if per == 0:
        if target_t:
            raise CapacityError(f"k={k} clusters carry no triangles; only t=0 is achievable", constraint="k >= 2")
        count = 0
    else:
        if target_t % per:
            lo = target_t // per * per
            raise CapacityError(
                f"t={target_t} is not a multiple of {per} triangles per cluster; "
                f"nearest achievable: {lo} and {lo + per}",
                constraint="cluster divisibility",
            )
        count = target_t // per
    size = k + 1
    rem = n - size * count
    if rem < 0:
        raise CapacityError(
            f"{count} clusters of {size} nodes need {size * count} nodes but n={n}", constraint="node count"
        )
    if model == "k-out":
        used = k * size * count
        if rem and k > rem // 2:
            raise CapacityError(
                f"bipartite k-out remainder on {rem} nodes needs k <= {rem // 2} (smaller half), k={k}",
                constraint="remainder half size",
            )
        rem_links = k * rem
    else:
        used = math.comb(size, 2) * count
        if rem % 2:
            raise CapacityError(f"bipartite k-regular remainder needs an even node count, got {rem}",
                                constraint="remainder parity")
        if rem and k > rem // 2:
            raise CapacityError(
                f"bipartite k-regular remainder on {rem} nodes needs k <= {rem // 2}, k={k}",
                constraint="remainder half size",
            )
        rem_links = k * rem // 2
    return ConstructionPlan(model, n, k, target_t, size, count, rem, per, per * count, used, rem_links)


def build(p: ConstructionPlan, permute_seed: int | None = None) -> Graph:
    """Realize a plan.  Clusters sit on the lowest labels unless ``permute_seed`` relabels."""
    size, count = p.cluster_size, p.cluster_count
    clusters = [range(c * size + 1, (c + 1) * size + 1) for c in range(count)]
    left, right = p.halves()

    if p.model == "k-out":
        out: list[list[int]] = [[] for _ in range(p.n)]
        for cl in clusters:
            for u in cl:
                out[u - 1] = [v for v in cl if v != u]
        for src_half, dst_half in ((left, right), (right, left)):
            h = len(dst_half)
            for idx, u in enumerate(src_half):
                out[u - 1] = [dst_half[(idx + s) % h] for s in range(p.k)]
        g: Graph = KOutDigraph(p.n, tuple(map(tuple, out)))
    else:
        edges = [(u, v) for cl in clusters for u in cl for v in cl if u < v]
        if p.model == "k-regular":
            h = len(right)
            edges += [(left[i], right[(i + s) % h]) for s in range(p.k) for i in range(len(left))]
        else:
            # shift-major order spreads the remainder degrees evenly; shifts
            # 0..h-1 together cover every cross pair exactly once
            h = len(right)
            cross = ((left[i], right[(i + s) % h]) for s in range(h) for i in range(len(left)))
            edges += [next(cross) for _ in range(p.remainder_links)]
        g = UndirectedGraph(p.n, tuple(edges))
    if permute_seed is not None:
        g = relabel(g, np.random.default_rng(permute_seed).permutation(p.n) + 1)
    return g


def relabel(g: Graph, perm) -> Graph:
    """Apply ``node i -> perm[i - 1]``."""
    perm = [int(x) for x in perm]
    if g.directed:
        return KOutDigraph.from_arcs(g.n, ((perm[u - 1], perm[v - 1]) for u, v in g.arcs()))
    return UndirectedGraph(g.n, tuple((perm[u - 1], perm[v - 1]) for u, v in g.edges))


class LowerBound(NamedTuple):
    ratio: Fraction | None
    vacuous: bool


def lower_bound_exponent(model: str, k: int, alpha) -> LowerBound:
    """Lower-bound ratio of log-cardinalities, as an exact fraction.

    k-out: 1 - 3a/(4(k^2-1)); k-regular: 1 - 12a/(k^2-1); general: 1
    (its subleading (a n)^(2/3) log n loss is reported by
    :func:`tdl.bounds.counter_loss_exponent`).  For k < 2 the k-out and
    k-regular formulas are undefined and the bound is reported vacuous.
    """
    a = as_fraction(alpha)
    if a < 0:
        raise SpecError(f"alpha must be non-negative, got {alpha}")
    if model == "general":
        return LowerBound(Fraction(1), False)
    if model not in ("k-out", "k-regular"):
        raise SpecError(f"unknown model {model!r}")
    if k < 2:
        return LowerBound(None, True) if a else LowerBound(Fraction(1), False)
    if model == "k-out":
        r = 1 - Fraction(3) * a / (4 * (k * k - 1))
    else:
        r = 1 - Fraction(12) * a / (k * k - 1)
    return LowerBound(r, r < 0)


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)
