"""Exact representation and validation of triangulated 2-spheres.

A triangulation is stored as its abstract simplicial complex: ``n`` vertices
labeled 1..n and a set of ``2n - 4`` vertex triples.  Validation is eager at
construction; every other operation may assume the five structural
invariants (face/edge counts, manifold edges, single-cycle links, connected
edge graph, dense labels).  Values are immutable and safe to share between
threads.

Text format (bit-exact): ``n:t1|t2|...|tk`` where each ``ti`` is a
comma-separated sorted triple and triples are sorted, e.g.
``4:1,2,3|1,2,4|1,3,4|2,3,4``.
"""

from __future__ import annotations

from collections import deque

from .errors import ParseError, UnknownEdge, UnknownVertex, ValidationError

Triangle = tuple[int, int, int]
Edge = tuple[int, int]


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Triangulation:
    """A validated n-vertex triangulated 2-sphere."""

    __slots__ = ("n", "triangles", "_tri_set", "_adj", "_apices", "_links")

    def __init__(self, n: int, triangles):
        tris = _normalize_triangles(n, triangles)
        adj, apices = _validate(n, tris)
        self.n = n
        self.triangles: tuple[Triangle, ...] = tris
        self._tri_set = frozenset(tris)
        self._adj = adj
        self._apices = apices
        self._links: dict[int, tuple[int, ...]] = {}

    # -- basic queries -------------------------------------------------

    def vertices(self):
        return range(1, self.n + 1)

    def edges(self) -> list[Edge]:
        return sorted(self._apices)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self._apices

    def has_triangle(self, t) -> bool:
        return tuple(sorted(t)) in self._tri_set

    def neighbors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        """Number of edges containing ``v``."""
        self._check_vertex(v)
        return len(self._adj[v])

    def edge_apices(self, e) -> tuple[int, int]:
        """The two vertices ``x, y`` with ``abx`` and ``aby`` both faces."""
        key = _norm_edge(*e)
        try:
            return self._apices[key]
        except KeyError:
            raise UnknownEdge(f"{key} is not an edge") from None

    def link_cycle(self, v: int) -> tuple[int, ...]:
        """The boundary cycle of st(v), lowest neighbor first, then the
        lower of its two cycle-neighbors second."""
        self._check_vertex(v)
        cached = self._links.get(v)
        if cached is not None:
            return cached
        link_adj: dict[int, list[int]] = {}
        for t in self.triangles:
            if v in t:
                x, y = (w for w in t if w != v)
                link_adj.setdefault(x, []).append(y)
                link_adj.setdefault(y, []).append(x)
        start = min(link_adj)
        second = min(link_adj[start])
        cycle = [start, second]
        while len(cycle) < len(link_adj):
            a, b = cycle[-2], cycle[-1]
            nxt = [w for w in link_adj[b] if w != a]
            cycle.append(nxt[0])
        result = tuple(cycle)
        self._links[v] = result
        return result

    def _check_vertex(self, v: int):
        if not (isinstance(v, int) and 1 <= v <= self.n):
            raise UnknownVertex(f"vertex {v!r} not in 1..{self.n}")

    # -- global queries ------------------------------------------------

    def nonfacial_3cycles(self) -> list[Triangle]:
        """All 3-cycles of the edge graph that do not bound a triangle."""
        out = []
        for (u, v) in self._apices:
            for w in sorted(self._adj[u] & self._adj[v]):
                if w > v and (u, v, w) not in self._tri_set:
                    out.append((u, v, w))
        return out

    def induced_4cycles(self) -> list[tuple[int, int, int, int]]:
        """All chordless 4-cycles, lexicographically minimal normal form."""
        found = set()
        for a in self.vertices():
            for c in range(a + 1, self.n + 1):
                if c in self._adj[a]:
                    continue
                common = sorted(self._adj[a] & self._adj[c])
                for i, b in enumerate(common):
                    for d in common[i + 1:]:
                        if d not in self._adj[b]:
                            found.add(normalize_cycle((a, b, c, d)))
        return sorted(found)

    # -- serialization -------------------------------------------------

    def text(self) -> str:
        return format_triangles(self.n, self.triangles)

    def __repr__(self):
        return f"Triangulation({self.n}, <{len(self.triangles)} triangles>)"

    def __eq__(self, other):
        if not isinstance(other, Triangulation):
            return NotImplemented
        return self.n == other.n and self.triangles == other.triangles

    def __hash__(self):
        return hash((self.n, self.triangles))


def build(n: int, triangles) -> Triangulation:
    """Construct and validate a triangulation from vertex triples."""
    return Triangulation(n, triangles)


def normalize_cycle(cycle):
    """Lexicographically minimal rotation/reflection of a vertex cycle."""
    k = len(cycle)
    best = None
    for seq in (cycle, cycle[::-1]):
        for i in range(k):
            cand = tuple(seq[i:]) + tuple(seq[:i])
            if best is None or cand < best:
                best = cand
    return best


# -- validation ---------------------------------------------------------


def _normalize_triangles(n, triangles) -> tuple[Triangle, ...]:
    if not isinstance(n, int) or n < 4:
        raise ValidationError(f"vertex count {n!r} below 4")
    seen = set()
    for t in triangles:
        t = tuple(t)
        if len(t) != 3 or len(set(t)) != 3:
            raise ValidationError(f"{t} is not a set of three vertices")
        for v in t:
            if not (isinstance(v, int) and 1 <= v <= n):
                raise ValidationError(f"vertex {v!r} of {t} not in 1..{n}")
        key = tuple(sorted(t))
        if key in seen:
            raise ValidationError(f"duplicate triangle {key}")
        seen.add(key)
    return tuple(sorted(seen))


def _validate(n, tris):
    used = {v for t in tris for v in t}
    if used != set(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - used)
        raise ValidationError(f"vertex labels not dense: {missing} unused")

    if len(tris) != 2 * n - 4:
        raise ValidationError(
            f"triangle count {len(tris)} != 2*{n}-4 = {2 * n - 4}")

    edge_tris: dict[Edge, list[Triangle]] = {}
    for t in tris:
        a, b, c = t
        for e in ((a, b), (a, c), (b, c)):
            edge_tris.setdefault(e, []).append(t)
    if len(edge_tris) != 3 * n - 6:
        raise ValidationError(
            f"edge count {len(edge_tris)} != 3*{n}-6 = {3 * n - 6}")

    apices: dict[Edge, tuple[int, int]] = {}
    for e, owners in edge_tris.items():
        if len(owners) != 2:
            raise ValidationError(
                f"non-manifold edge {e} lies in {len(owners)} triangles")
        u, v = e
        x = next(w for w in owners[0] if w != u and w != v)
        y = next(w for w in owners[1] if w != u and w != v)
        apices[e] = (x, y) if x < y else (y, x)

    adj = {v: set() for v in range(1, n + 1)}
    for (u, v) in edge_tris:
        adj[u].add(v)
        adj[v].add(u)

    for v in range(1, n + 1):
        _check_link_cycle(v, tris, adj[v])

    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != n:
        raise ValidationError("edge graph is disconnected")

    return ({v: frozenset(ws) for v, ws in adj.items()}, apices)


def _check_link_cycle(v, tris, nbrs):
    link_deg = {w: 0 for w in nbrs}
    link_edges = []
    for t in tris:
        if v in t:
            x, y = (w for w in t if w != v)
            link_edges.append((x, y))
            link_deg[x] += 1
            link_deg[y] += 1
    if any(d != 2 for d in link_deg.values()):
        raise ValidationError(f"pinched link at vertex {v}")
    # single cycle: walk from one link edge and count reachable vertices
    link_adj = {}
    for x, y in link_edges:
        link_adj.setdefault(x, []).append(y)
        link_adj.setdefault(y, []).append(x)
    start = next(iter(link_adj))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in link_adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != len(nbrs):
        raise ValidationError(f"link of vertex {v} is not a single cycle")


# -- text format --------------------------------------------------------


def format_triangles(n, tris) -> str:
    body = "|".join(",".join(str(v) for v in t) for t in sorted(tris))
    return f"{n}:{body}"


def parse_triangles(text: str) -> tuple[int, list[Triangle]]:
    """Parse the bit-exact text format; rejects non-canonical spellings."""
    if not isinstance(text, str) or ":" not in text:
        raise ParseError(f"missing ':' separator in {text!r}")
    head, _, body = text.partition(":")
    if not head.isdigit():
        raise ParseError(f"vertex count {head!r} is not a positive integer")
    n = int(head)
    if str(n) != head:
        raise ParseError(f"non-canonical vertex count {head!r}")
    tris = []
    if body:
        for chunk in body.split("|"):
            parts = chunk.split(",")
            if len(parts) != 3:
                raise ParseError(f"triple {chunk!r} does not have 3 entries")
            try:
                t = tuple(int(p) for p in parts)
            except ValueError:
                raise ParseError(f"non-integer entry in {chunk!r}") from None
            if any(str(t[i]) != parts[i] for i in range(3)):
                raise ParseError(f"non-canonical integer in {chunk!r}")
            if not (t[0] < t[1] < t[2]):
                raise ParseError(f"triple {chunk!r} is not sorted")
            tris.append(t)
    if tris != sorted(tris):
        raise ParseError("triples are not sorted")
    return n, tris
