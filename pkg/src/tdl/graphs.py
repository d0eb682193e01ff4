"""Graph values, role validation and the edge-list text format.

Nodes are labeled ``1..n`` at every public boundary.  Internally the
adjacency caches are 0-based so that node ``i`` owns bit ``i - 1`` of a
Python-int bitset.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Literal, NamedTuple, Sequence, TextIO, Union

from .errors import ParseError

# Graphs with more nodes than this skip the bitset cache and intersect
# sorted neighbor lists instead.
BITSET_THRESHOLD = 4096

Model = Literal["general", "k-out", "k-regular"]
MODELS: tuple[str, ...] = ("general", "k-out", "k-regular")


class EdgeRef(NamedTuple):
    """A link.  Undirected refs always store ``u < v``."""

    u: int
    v: int
    directed: bool

    @classmethod
    def arc(cls, u: int, v: int) -> "EdgeRef":
        return cls(u, v, True)

    @classmethod
    def edge(cls, u: int, v: int) -> "EdgeRef":
        return cls(u, v, False) if u < v else cls(v, u, False)

    @property
    def kind(self) -> str:
        return "directed" if self.directed else "undirected"

    def __str__(self) -> str:
        return f"{self.u}->{self.v}" if self.directed else f"{self.u}-{self.v}"


def _higher_bits(bits: int, v: int) -> int:
    """Drop bits ``0..v`` from ``bits``."""
    return (bits >> (v + 1)) << (v + 1)


def _iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def _merge_higher(a: Sequence[int], b: Sequence[int], floor: int) -> list[int]:
    """Common elements of two sorted lists that exceed ``floor``."""
    out = []
    i = j = 0
    while i < len(a) and a[i] <= floor:
        i += 1
    while j < len(b) and b[j] <= floor:
        j += 1
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        if x == y:
            out.append(x)
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return out


class _SupportMixin:
    """Common-neighbor queries over the unoriented support graph (0-based)."""

    n: int

    @cached_property
    def _use_bits(self) -> bool:
        return self.n <= BITSET_THRESHOLD

    def higher_common(self, u: int, v: int) -> list[int]:
        """0-based common support neighbors ``w > v`` of ``u`` and ``v``."""
        if self._use_bits:
            bits = self.support_bits
            return list(_iter_bits(_higher_bits(bits[u] & bits[v], v)))
        nbrs = self.support_neighbors
        return _merge_higher(nbrs[u], nbrs[v], v)

    def support_edges(self) -> Iterator[tuple[int, int]]:
        """0-based support pairs ``(u, v)`` with ``u < v``, in sorted order."""
        for u, nb in enumerate(self.support_neighbors):
            for v in nb:
                if v > u:
                    yield u, v


@dataclass(frozen=True)
class UndirectedGraph(_SupportMixin):
    """Simple labeled graph.  ``edges`` is normalized to sorted ``(u, v)`` with ``u <= v``."""

    n: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        norm = sorted({(u, v) if u <= v else (v, u) for u, v in self.edges})
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def directed(self) -> bool:
        return False

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def support_neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            if u != v and 1 <= u <= self.n and 1 <= v <= self.n:
                nbrs[u - 1].append(v - 1)
                nbrs[v - 1].append(u - 1)
        for nb in nbrs:
            nb.sort()
        return nbrs

    @cached_property
    def support_bits(self) -> list[int]:
        bits = [0] * self.n
        for u, nb in enumerate(self.support_neighbors):
            b = 0
            for v in nb:
                b |= 1 << v
            bits[u] = b
        return bits

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            if 1 <= u <= self.n:
                deg[u - 1] += 1
            if 1 <= v <= self.n and v != u:
                deg[v - 1] += 1
        return deg

    def links(self) -> list[EdgeRef]:
        return [EdgeRef(u, v, False) for u, v in self.edges]

    def restrict(self, nodes: Iterable[int]) -> "UndirectedGraph":
        """Same node set, keeping only edges with both ends in ``nodes``."""
        keep = set(nodes)
        return UndirectedGraph(self.n, tuple(e for e in self.edges if e[0] in keep and e[1] in keep))


@dataclass(frozen=True)
class KOutDigraph(_SupportMixin):
    """Labeled digraph given by out-neighbor sets.

    ``out[i - 1]`` holds the out-neighbors of node ``i`` as a sorted tuple.
    Any out-degree sequence is representable (the edge-list reader needs
    that); :func:`validate` with role ``"k-out"`` checks the uniform one.
    """

    n: int
    out: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        out = [tuple(sorted(set(s))) for s in self.out]
        if not out:
            out = [()] * self.n
        if len(out) != self.n:
            raise ValueError(f"out has {len(out)} entries for n={self.n}")
        object.__setattr__(self, "out", tuple(out))

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "KOutDigraph":
        out: list[list[int]] = [[] for _ in range(n)]
        for u, v in arcs:
            out[u - 1].append(v)
        return cls(n, tuple(tuple(s) for s in out))

    @property
    def directed(self) -> bool:
        return True

    @property
    def k(self) -> int | None:
        """Common out-degree, or ``None`` if out-degrees differ."""
        degs = {len(s) for s in self.out}
        if not degs:
            return 0
        return degs.pop() if len(degs) == 1 else None

    def arcs(self) -> list[tuple[int, int]]:
        return [(i + 1, j) for i, s in enumerate(self.out) for j in s]

    def links(self) -> list[EdgeRef]:
        return [EdgeRef(u, v, True) for u, v in self.arcs()]

    @property
    def m(self) -> int:
        return sum(len(s) for s in self.out)

    def in_degrees(self) -> list[int]:
        v = [0] * self.n
        for s in self.out:
            for j in s:
                if 1 <= j <= self.n:
                    v[j - 1] += 1
        return v

    @cached_property
    def out_bits(self) -> list[int]:
        bits = [0] * self.n
        for i, s in enumerate(self.out):
            b = 0
            for j in s:
                if 1 <= j <= self.n and j != i + 1:
                    b |= 1 << (j - 1)
            bits[i] = b
        return bits

    @cached_property
    def _arc_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.arcs())

    def has_arc(self, u: int, v: int) -> bool:
        """1-based arc membership."""
        if self._use_bits:
            return bool((self.out_bits[u - 1] >> (v - 1)) & 1)
        return (u, v) in self._arc_set

    def multiplicity(self, u: int, v: int) -> int:
        """Number of directed links (0, 1 or 2) between 1-based nodes ``u`` and ``v``."""
        return self.has_arc(u, v) + self.has_arc(v, u)

    @cached_property
    def support_neighbors(self) -> list[list[int]]:
        sets: list[set[int]] = [set() for _ in range(self.n)]
        for i, s in enumerate(self.out):
            for j in s:
                if 1 <= j <= self.n and j != i + 1:
                    sets[i].add(j - 1)
                    sets[j - 1].add(i)
        return [sorted(s) for s in sets]

    @cached_property
    def support_bits(self) -> list[int]:
        bits = [0] * self.n
        for u, nb in enumerate(self.support_neighbors):
            b = 0
            for v in nb:
                b |= 1 << v
            bits[u] = b
        return bits

    def restrict(self, nodes: Iterable[int]) -> "KOutDigraph":
        keep = set(nodes)
        return KOutDigraph(
            self.n,
            tuple(tuple(j for j in s if j in keep) if i + 1 in keep else () for i, s in enumerate(self.out)),
        )


Graph = Union[UndirectedGraph, KOutDigraph]


# --------------------------------------------------------------------------
# validation


class Violation(NamedTuple):
    node: int | None
    rule: str

    def __str__(self) -> str:
        return self.rule if self.node is None else f"{self.rule} at node {self.node}"


@dataclass
class ValidationResult:
    ok: bool
    violations: list[Violation]

    def __bool__(self) -> bool:
        return self.ok


def validate(graph: Graph, role: str, k: int | None = None) -> ValidationResult:
    """Check ``graph`` against the invariants of ensemble ``role``.

    Violations are returned as data.  When ``k`` is omitted it is taken
    from node 1 (k-out, k-regular) or from ``m / n`` (general).
    """
    bad: list[Violation] = []
    n = graph.n
    if n < 0:
        return ValidationResult(False, [Violation(None, "negative node count")])
    if role not in MODELS:
        return ValidationResult(False, [Violation(None, f"unknown role {role!r}")])

    if role == "k-out":
        if not graph.directed:
            return ValidationResult(False, [Violation(None, "k-out role requires a directed graph")])
        if k is None:
            k = len(graph.out[0]) if n else 0
        for i, s in enumerate(graph.out, start=1):
            for j in s:
                if j == i:
                    bad.append(Violation(i, "self-loop"))
                elif not 1 <= j <= n:
                    bad.append(Violation(i, f"out-neighbor {j} out of range 1..{n}"))
            if len(s) != k:
                bad.append(Violation(i, f"out-degree {len(s)} != k={k}"))
        return ValidationResult(not bad, bad)

    if graph.directed:
        return ValidationResult(False, [Violation(None, f"{role} role requires an undirected graph")])
    for u, v in graph.edges:
        if u == v:
            bad.append(Violation(u, "self-loop"))
        for x in (u, v):
            if not 1 <= x <= n:
                bad.append(Violation(x, f"endpoint {x} out of range 1..{n}"))
    if role == "general":
        if k is None:
            if n and graph.m % n:
                bad.append(Violation(None, f"{graph.m} edges is not a multiple of n={n}"))
        elif graph.m != k * n:
            bad.append(Violation(None, f"{graph.m} edges != k*n={k * n}"))
    else:
        deg = graph.degrees()
        if k is None:
            k = deg[0] if n else 0
        for i, d in enumerate(deg, start=1):
            if d != k:
                bad.append(Violation(i, f"degree {d} != k={k}"))
    return ValidationResult(not bad, bad)


# --------------------------------------------------------------------------
# edge-list format


def _lines(source: Union[str, TextIO]) -> Iterator[tuple[int, str]]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    for no, line in enumerate(stream, start=1):
        yield no, line.strip()


def read_edge_list(source: Union[str, TextIO]) -> Graph:
    """Parse the edge-list format.  ``source`` is a text stream or a string."""
    header = None
    n = 0
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for no, line in _lines(source):
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2 or parts[0] not in ("directed", "undirected"):
                raise ParseError(f"expected header 'directed <n>' or 'undirected <n>', got {line!r}", no)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"node count {parts[1]!r} is not an integer", no) from None
            if n < 0:
                raise ParseError(f"negative node count {n}", no)
            header = parts[0]
            continue
        if len(parts) != 2:
            raise ParseError(f"expected '<u> <v>', got {line!r}", no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer label in {line!r}", no) from None
        for x in (u, v):
            if not 1 <= x <= n:
                raise ParseError(f"label {x} out of range 1..{n}", no)
        if u == v:
            raise ParseError(f"self-loop at node {u}", no)
        key = (u, v) if header == "directed" else (min(u, v), max(u, v))
        if key in seen:
            what = "directed link" if header == "directed" else "edge"
            raise ParseError(f"duplicate {what} {u} {v}", no)
        seen.add(key)
        pairs.append(key)
    if header is None:
        raise ParseError("missing header line", None)
    if header == "directed":
        return KOutDigraph.from_arcs(n, pairs)
    return UndirectedGraph(n, tuple(pairs))


def write_edge_list(graph: Graph, stream: TextIO | None = None) -> str:
    """Canonical text form; lines sorted as integer pairs."""
    if graph.directed:
        head = f"directed {graph.n}"
        pairs = sorted(graph.arcs())
    else:
        head = f"undirected {graph.n}"
        pairs = list(graph.edges)
    text = "\n".join([head] + [f"{u} {v}" for u, v in pairs]) + "\n"
    if stream is not None:
        stream.write(text)
    return text
