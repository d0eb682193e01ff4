"""Uniform samplers, exhaustive enumerators and exact cardinalities for the
three sparse ensembles: k-general, k-out and k-regular graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations, product
from typing import Iterator

import numpy as np

from .errors import CapacityError, RejectionBudgetExhausted, SpecError
from .graphs import MODELS, Graph, KOutDigraph, UndirectedGraph

ENUMERATION_CAP = 10**8
ATTEMPT_CAP = 10**6


@dataclass(frozen=True)
class EnsembleSpec:
    model: str
    n: int
    k: int
    seed: int = 0

    def __post_init__(self):
        check_spec(self)

    def with_n(self, n: int) -> "EnsembleSpec":
        return replace(self, n=n)

    def with_seed(self, seed: int) -> "EnsembleSpec":
        return replace(self, seed=seed)


def check_spec(spec: EnsembleSpec) -> None:
    model, n, k = spec.model, spec.n, spec.k
    if model not in MODELS:
        raise SpecError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}")
    if n < 0 or k < 0:
        raise SpecError(f"n and k must be non-negative (n={n}, k={k})")
    if not 0 <= spec.seed < 2**64:
        raise SpecError("seed must fit in 64 bits")
    if model == "general":
        if k * n > math.comb(n, 2):
            raise SpecError(f"general model needs k*n <= C(n,2): {k * n} > {math.comb(n, 2)}")
    elif n > 0 and k > n - 1:
        raise SpecError(f"{model} model needs k <= n-1 (k={k}, n={n})")
    if model == "k-regular" and (n * k) % 2:
        raise SpecError(f"k-regular model needs n*k even (n={n}, k={k})")


def _double_factorial_odd(m: int) -> int:
    """(m-1)!! for even m: the number of perfect matchings of m points."""
    out = 1
    for x in range(m - 1, 0, -2):
        out *= x
    return out


def enumeration_size(spec: EnsembleSpec) -> int:
    """Number of objects the enumerator walks: graphs, or matchings for k-regular."""
    n, k = spec.n, spec.k
    if spec.model == "general":
        return math.comb(math.comb(n, 2), k * n)
    if spec.model == "k-out":
        return math.comb(n - 1, k) ** n if n else 1
    return _double_factorial_odd(n * k)


def count(spec: EnsembleSpec, cap: int = ENUMERATION_CAP) -> int:
    """Exact cardinality of the model.

    k-regular has no closed form here; it is counted by enumeration and
    refused when the matching count exceeds ``cap``.
    """
    if spec.model != "k-regular":
        return enumeration_size(spec)
    need = enumeration_size(spec)
    if need > cap:
        raise CapacityError(
            f"exact count unavailable: k-regular enumeration would walk {need} matchings (cap {cap})",
            constraint="enumeration cap",
            required=need,
        )
    return sum(1 for _ in _regular_graphs(spec.n, spec.k))


# --------------------------------------------------------------------------
# enumeration


def pair_index(i: int, j: int) -> int:
    """Colex rank of the 1-based pair ``i < j``."""
    return (j - 1) * (j - 2) // 2 + (i - 1)


def pair_unrank(p: int) -> tuple[int, int]:
    j = (1 + math.isqrt(1 + 8 * p)) // 2
    while j * (j - 1) // 2 > p:
        j -= 1
    return p - j * (j - 1) // 2 + 1, j + 1


def _colex(N: int, r: int) -> Iterator[tuple[int, ...]]:
    if r == 0:
        yield ()
        return
    for top in range(r - 1, N):
        for rest in _colex(top, r - 1):
            yield rest + (top,)


def enumeration_prefixes(spec: EnsembleSpec) -> list:
    """Keys that split the enumeration into disjoint, independently consumable blocks.

    general: the largest pair index of the subset; k-out: node 1's
    out-set; k-regular: the partner of half-edge 0
    (the first half-edge of some node, as walked canonically).
    """
    n, k = spec.n, spec.k
    if spec.model == "general":
        r = k * n
        if r == 0:
            return [None]
        return list(range(r - 1, math.comb(n, 2)))
    if spec.model == "k-out":
        if n == 0:
            return [None]
        return list(combinations(range(2, n + 1), k))
    if n * k == 0:
        return [None]
    return [b * k for b in range(1, n)]


def enumerate_graphs(spec: EnsembleSpec, cap: int = ENUMERATION_CAP, prefix=None) -> Iterator[Graph]:
    """Every labeled graph of the model exactly once, in a fixed order.

    With ``prefix`` (one of :func:`enumeration_prefixes`) only that block
    is produced.
    """
    need = enumeration_size(spec)
    if need > cap:
        raise CapacityError(
            f"enumeration of {spec.model} n={spec.n} k={spec.k} needs {need} steps (cap {cap})",
            constraint="enumeration cap",
            required=need,
        )
    n, k = spec.n, spec.k
    if spec.model == "general":
        pairs = [pair_unrank(p) for p in range(math.comb(n, 2))]
        r = k * n
        if prefix is None:
            subsets = _colex(len(pairs), r)
        else:
            subsets = (rest + (prefix,) for rest in _colex(prefix, r - 1)) if r else iter([()])
        for sub in subsets:
            yield UndirectedGraph(n, tuple(pairs[p] for p in sub))
    elif spec.model == "k-out":
        choices = [list(combinations([j for j in range(1, n + 1) if j != i], k)) for i in range(1, n + 1)]
        if prefix is not None and n:
            choices[0] = [tuple(prefix)]
        for outs in product(*choices):
            yield KOutDigraph(n, outs)
    else:
        yield from _regular_graphs(n, k, first_partner=prefix)


def _regular_graphs(n: int, k: int, first_partner: int | None = None) -> Iterator[UndirectedGraph]:
    """k-regular graphs via perfect matchings of the n*k half-edges.

    Half-edge ``h`` belongs to node ``h // k``.  Of the ``(k!)^n`` matchings
    inducing one simple graph only the canonical one is walked: each node's
    half-edges go to strictly increasing neighbors, and a node always
    offers its lowest free half-edge.  Loops and repeated pairs are
    excluded by the strict increase.
    """
    m = n * k
    if m == 0:
        if first_partner is None:
            yield UndirectedGraph(n)
        return
    partner = [-1] * m
    free = [v * k for v in range(n)]  # lowest free half-edge of each node
    edges: list[tuple[int, int]] = []

    def rec(h: int) -> Iterator[UndirectedGraph]:
        while h < m and partner[h] >= 0:
            h += 1
        if h == m:
            yield UndirectedGraph(n, tuple((u + 1, v + 1) for u, v in edges))
            return
        a = h // k
        # partner node of a's previous half-edge bounds this one from below
        low = a + 1 if h % k == 0 else max(a + 1, partner[h - 1] // k + 1)
        for b in range(low, n):
            g = free[b]
            if g >= (b + 1) * k:
                continue
            if h == 0 and first_partner is not None and g != first_partner:
                continue
            partner[h], partner[g] = g, h
            free[b] += 1
            edges.append((a, b))
            yield from rec(h + 1)
            edges.pop()
            free[b] -= 1
            partner[h] = partner[g] = -1

    yield from rec(0)


# --------------------------------------------------------------------------
# sampling


def rng_for(seed: int) -> np.random.Generator:
    """PCG64 generator (128-bit state) seeded from a 64-bit seed."""
    return np.random.default_rng(seed)


def sample(spec: EnsembleSpec, rng: np.random.Generator | None = None, max_attempts: int = ATTEMPT_CAP) -> Graph:
    """Draw one graph uniformly from the model.

    Without ``rng`` the generator is seeded from ``spec.seed``, so the
    result is a pure function of the spec.
    """
    if rng is None:
        rng = rng_for(spec.seed)
    src, dst = sample_arrays(spec, rng, max_attempts)
    return graph_from_arrays(spec.model, spec.n, src, dst)


def sample_arrays(
    spec: EnsembleSpec, rng: np.random.Generator, max_attempts: int = ATTEMPT_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """0-based link endpoints of one uniform draw: arcs for k-out, edges otherwise.

    :func:`sample` wraps this, so array consumers (the Monte Carlo kernels)
    see exactly the same distribution and the same draws for a given rng.
    """
    n, k = spec.n, spec.k
    if spec.model == "general":
        N = math.comb(n, 2)
        idx = rng.choice(N, size=k * n, replace=False) if k * n else np.zeros(0, dtype=np.int64)
        return pair_unrank_array(np.asarray(idx, dtype=np.int64))
    if spec.model == "k-out":
        x = kout_choices(n, k, rng)
        return np.repeat(np.arange(n, dtype=np.int64), k), x.ravel()
    return regular_pairs(n, k, rng, max_attempts)


def graph_from_arrays(model: str, n: int, src: np.ndarray, dst: np.ndarray) -> Graph:
    if model == "k-out":
        return KOutDigraph.from_arcs(n, zip((src + 1).tolist(), (dst + 1).tolist()))
    return UndirectedGraph(n, tuple(zip((src + 1).tolist(), (dst + 1).tolist())))


def pair_unrank_array(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`pair_unrank`, 0-based ``(i, j)`` with ``i < j``."""
    j = ((1 + np.sqrt(1 + 8 * p.astype(np.float64))) // 2).astype(np.int64)
    j -= j * (j - 1) // 2 > p
    j += (j + 1) * j // 2 <= p
    return p - j * (j - 1) // 2, j


def kout_choices(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``(n, k)`` array of 0-based out-neighbors; each row a uniform k-subset of the other nodes."""
    if k == 0 or n == 0:
        return np.zeros((n, k), dtype=np.int64)
    self_idx = np.arange(n)[:, None]
    if 4 * k * k < n:
        # iid draws, redraw any row with a repeat: uniform over distinct tuples
        x = rng.integers(0, n - 1, size=(n, k))
        while True:
            s = np.sort(x, axis=1)
            dup = (s[:, 1:] == s[:, :-1]).any(axis=1) if k > 1 else np.zeros(n, dtype=bool)
            if not dup.any():
                break
            rows = np.flatnonzero(dup)
            x[rows] = rng.integers(0, n - 1, size=(rows.size, k))
    else:
        # first k columns of independent uniform row permutations
        x = np.argsort(rng.random((n, n - 1)), axis=1)[:, :k]
    return x + (x >= self_idx)


def regular_pairs(n: int, k: int, rng: np.random.Generator, max_attempts: int = ATTEMPT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """0-based endpoint arrays ``(lo, hi)`` of a uniform simple k-regular graph.

    Pairing model: shuffle the n*k half-edges, pair them consecutively,
    and restart from scratch on any loop or repeated pair.
    """
    if n * k == 0:
        e = np.zeros(0, dtype=np.int64)
        return e, e
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    for _ in range(max_attempts):
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        if (lo == hi).any():
            continue
        code = np.sort(lo * n + hi)
        if (code[1:] == code[:-1]).any():
            continue
        return lo, hi
    raise RejectionBudgetExhausted(
        f"rejection budget exhausted: no simple pairing for n={n}, k={k} in {max_attempts} attempts",
        constraint="attempt cap",
    )
