"""Enumerate n-vertex spheres and class subsets; build level flip graphs.

Spheres at a fixed level n are enumerated two independent ways:

* flip closure (:func:`enumerate_all`): breadth-first closure under legal
  edge flips starting from the canonical stacked sphere (complete because
  the level flip graph of all n-vertex spheres is connected);
* vertex splitting (:func:`enumerate_oracle`): inverse edge contraction
  applied to every (n-1)-vertex sphere in every way (complete because every
  sphere on n >= 5 vertices has a contractible edge).

Stacked spheres are generated directly by stellar subdivision of every
triangle of every (n-1)-vertex stacked sphere.

All heavy loops work on raw triangle lists plus the canonical-form kernel;
node lists are sorted signature strings, so identical invocations produce
byte-identical artifacts regardless of thread count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .canonical import canonical_form
from .classify import (
    CLASS_PREDICATES,
    canonical_stacked_sphere,
    is_flag,
    is_hamiltonian,
)
from .errors import BadSize, SizeLimit
from .sphere import Triangulation, parse_triangles

DEFAULT_MAX_N = 14

CLASS_TAGS = ("all", "flag", "stacked", "hamiltonian", "stacked0")


def size_cap() -> int:
    env = os.environ.get("PACHNER_MAX_N")
    return int(env) if env else DEFAULT_MAX_N


def _check_level(n: int):
    if n < 4:
        raise BadSize(f"need n >= 4, got {n}")
    if n > size_cap():
        raise SizeLimit(
            f"n = {n} above cap {size_cap()} (set PACHNER_MAX_N to raise)")


# -- raw triangle-list helpers -------------------------------------------


def _edge_apices_raw(tris):
    ap: dict[tuple[int, int], list[int]] = {}
    for a, b, c in tris:
        ap.setdefault((a, b), []).append(c)
        ap.setdefault((a, c), []).append(b)
        ap.setdefault((b, c), []).append(a)
    return ap


def _adj_masks(n, tris):
    mask = [0] * (n + 1)
    for a, b, c in tris:
        mask[a] |= (1 << b) | (1 << c)
        mask[b] |= (1 << a) | (1 << c)
        mask[c] |= (1 << a) | (1 << b)
    return mask


def _flip_raw(tris, a, b, c, d):
    """Replace abc/abd by acd/bcd on a raw triangle list."""
    t1 = tuple(sorted((a, b, c)))
    t2 = tuple(sorted((a, b, d)))
    out = [t for t in tris if t != t1 and t != t2]
    out.append(tuple(sorted((a, c, d))))
    out.append(tuple(sorted((b, c, d))))
    return out


def _flip_targets(n, tris):
    """Signatures of all legal single-flip neighbors of a raw sphere."""
    ap = _edge_apices_raw(tris)
    mask = _adj_masks(n, tris)
    out = []
    for (a, b), apexes in ap.items():
        c, d = apexes
        if not (mask[c] >> d) & 1:
            out.append(canonical_form(n, _flip_raw(tris, a, b, c, d)))
    return out


def _stacked_flip_targets(n, tris):
    """Signatures of flip neighbors that are again stacked (exact predicate:
    the flipped edge's endpoints have exactly three common neighbors)."""
    ap = _edge_apices_raw(tris)
    mask = _adj_masks(n, tris)
    out = []
    for (a, b), apexes in ap.items():
        common = mask[a] & mask[b]
        if common.bit_count() != 3:
            continue
        c, d = apexes
        if not (mask[c] >> d) & 1:
            out.append(canonical_form(n, _flip_raw(tris, a, b, c, d)))
    return out


def _zero_move_children(n, tris):
    """Signatures of all stellar subdivisions of a raw (n)-sphere."""
    w = n + 1
    out = []
    for i, t in enumerate(tris):
        a, b, c = t
        child = tris[:i] + tris[i + 1:] + [(a, b, w), (a, c, w), (b, c, w)]
        out.append(canonical_form(w, child))
    return out


def _split_children(n, tris):
    """Signatures of all vertex splittings (inverse edge contractions)."""
    links = _link_cycles_raw(n, tris)
    w = n + 1
    out = []
    for v in range(1, n + 1):
        cycle = links[v]
        deg = len(cycle)
        star = {tuple(sorted((v, cycle[i], cycle[(i + 1) % deg])))
                for i in range(deg)}
        rest = [t for t in tris if t not in star]
        for i in range(deg):
            for j in range(i + 1, deg):
                x, y = cycle[i], cycle[j]
                arc_new = [cycle[k] for k in range(i + 1, j)]
                arc_old = [cycle[k % deg] for k in range(j + 1, i + deg)]
                child = list(rest)
                child.append(tuple(sorted((v, w, x))))
                child.append(tuple(sorted((v, w, y))))
                for p, q in zip([x] + arc_new, arc_new + [y]):
                    child.append(tuple(sorted((w, p, q))))
                for p, q in zip([y] + arc_old, arc_old + [x]):
                    child.append(tuple(sorted((v, p, q))))
                out.append(canonical_form(w, child))
    return out


def _link_cycles_raw(n, tris):
    link_adj: list[dict[int, list[int]]] = [dict() for _ in range(n + 1)]
    for a, b, c in tris:
        for (v, x, y) in ((a, b, c), (b, a, c), (c, a, b)):
            link_adj[v].setdefault(x, []).append(y)
            link_adj[v].setdefault(y, []).append(x)
    cycles = [()] * (n + 1)
    for v in range(1, n + 1):
        la = link_adj[v]
        start = min(la)
        second = min(la[start])
        cycle = [start, second]
        while len(cycle) < len(la):
            a, b = cycle[-2], cycle[-1]
            cycle.append(la[b][0] if la[b][1] == a else la[b][1])
        cycles[v] = tuple(cycle)
    return cycles


# -- parallel map ---------------------------------------------------------

_WORKER_MODE = None


def _expand(args):
    kind, n, sig_chunk = args
    out = []
    for sig in sig_chunk:
        _, tris = parse_triangles(sig)
        if kind == "flips":
            out.append((sig, _flip_targets(n, tris)))
        elif kind == "stacked-flips":
            out.append((sig, _stacked_flip_targets(n, tris)))
        elif kind == "zero-moves":
            out.append((sig, _zero_move_children(n, tris)))
        elif kind == "splits":
            out.append((sig, _split_children(n, tris)))
        else:
            raise ValueError(kind)
    return out


def _chunked_expand(kind, n, sigs, threads):
    """Deterministic map of an expansion worker over signature chunks."""
    if threads <= 1 or len(sigs) < 64:
        return _expand((kind, n, list(sigs)))
    chunk = max(32, len(sigs) // (threads * 8))
    jobs = [(kind, n, sigs[i:i + chunk]) for i in range(0, len(sigs), chunk)]
    out = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_expand, jobs):
            out.extend(part)
    return out


# -- enumeration ----------------------------------------------------------

_CACHE: dict[tuple[str, int], tuple[str, ...]] = {}


def enumerate_all(n: int, threads: int = 1) -> list[str]:
    """All n-vertex spheres by flip closure, as sorted signatures."""
    _check_level(n)
    key = ("all", n)
    if key not in _CACHE:
        start = canonical_stacked_sphere(n)
        start_sig = canonical_form(n, start.triangles)
        visited = {start_sig}
        frontier = [start_sig]
        while frontier:
            produced = _chunked_expand("flips", n, sorted(frontier), threads)
            frontier = []
            for _, targets in produced:
                for sig in targets:
                    if sig not in visited:
                        visited.add(sig)
                        frontier.append(sig)
        _CACHE[key] = tuple(sorted(visited))
    return list(_CACHE[key])


def enumerate_oracle(n: int, threads: int = 1) -> list[str]:
    """All n-vertex spheres by vertex splitting from level n-1."""
    _check_level(n)
    key = ("oracle", n)
    if key not in _CACHE:
        if n == 4:
            std = canonical_stacked_sphere(4)
            _CACHE[key] = (canonical_form(4, std.triangles),)
        else:
            parents = enumerate_oracle(n - 1, threads)
            found = set()
            for _, targets in _chunked_expand(
                    "splits", n - 1, parents, threads):
                found.update(targets)
            _CACHE[key] = tuple(sorted(found))
    return list(_CACHE[key])


def enumerate_stacked(n: int, threads: int = 1) -> list[str]:
    """All n-vertex stacked spheres by stellar subdivision from level n-1."""
    _check_level(n)
    key = ("stacked", n)
    if key not in _CACHE:
        if n == 4:
            std = canonical_stacked_sphere(4)
            _CACHE[key] = (canonical_form(4, std.triangles),)
        else:
            parents = enumerate_stacked(n - 1, threads)
            found = set()
            for _, targets in _chunked_expand(
                    "zero-moves", n - 1, parents, threads):
                found.update(targets)
            _CACHE[key] = tuple(sorted(found))
    return list(_CACHE[key])


def _filter_members(sigs, predicate):
    out = []
    for sig in sigs:
        k, tris = parse_triangles(sig)
        if predicate(Triangulation(k, tris)):
            out.append(sig)
    return out


def _stacked0_members(sigs):
    """Members of the stacked enumeration whose dual tree has no degree-4
    node, i.e. every tetrahedron keeps at least one boundary face."""
    out = []
    for sig in sigs:
        n, tris = parse_triangles(sig)
        tri_set = set(tris)
        adj: dict[int, set[int]] = {v: set() for v in range(1, n + 1)}
        edges = set()
        for a, b, c in tris:
            adj[a].update((b, c))
            adj[b].update((a, c))
            adj[c].update((a, b))
            edges.update(((a, b), (a, c), (b, c)))
        ok = True
        for (u, v) in edges:
            common = sorted(adj[u] & adj[v])
            for i, x in enumerate(common):
                if x < v:
                    continue
                for y in common[i + 1:]:
                    if y in adj[x]:
                        tet = (u, v, x, y)
                        faces = ((u, v, x), (u, v, y), (u, x, y), (v, x, y))
                        if not any(f in tri_set for f in faces):
                            ok = False
                            break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.append(sig)
    return out


def class_members(n: int, class_tag: str, threads: int = 1) -> list[str]:
    """Sorted signatures of the class at level n."""
    if class_tag not in CLASS_TAGS:
        raise ValueError(f"unknown class {class_tag!r}")
    if class_tag == "all":
        return enumerate_all(n, threads)
    if class_tag == "stacked":
        return enumerate_stacked(n, threads)
    if class_tag == "stacked0":
        return _stacked0_members(enumerate_stacked(n, threads))
    if class_tag == "flag":
        return _filter_members(enumerate_all(n, threads), is_flag)
    return _filter_members(enumerate_all(n, threads), is_hamiltonian)


# -- level graphs ----------------------------------------------------------


@dataclass(frozen=True)
class LevelGraph:
    """Induced flip graph on the isomorphism classes of one class at level n."""

    n: int
    class_tag: str
    nodes: tuple[str, ...]
    arcs: tuple[tuple[int, int], ...]

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in self.nodes]
        for i, j in self.arcs:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class ComponentReport:
    n: int
    class_tag: str
    total_count: int
    component_sizes: tuple[int, ...]
    representatives: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "class": self.class_tag,
                "total": self.total_count,
                "components": [
                    {"size": s, "representative": r}
                    for s, r in zip(self.component_sizes, self.representatives)
                ],
            }
        )


def build_level_graph(n: int, class_tag: str, threads: int = 1) -> LevelGraph:
    """Arcs join class members one legal flip apart (self-loops dropped)."""
    nodes = class_members(n, class_tag, threads)
    index = {sig: i for i, sig in enumerate(nodes)}
    kind = "stacked-flips" if class_tag in ("stacked", "stacked0") else "flips"
    arcs = set()
    for source, targets in _chunked_expand(kind, n, nodes, threads):
        i = index[source]
        for sig in targets:
            j = index.get(sig)
            if j is not None and j != i:
                arcs.add((min(i, j), max(i, j)))
    return LevelGraph(n, class_tag, tuple(nodes), tuple(sorted(arcs)))


def components(g: LevelGraph) -> ComponentReport:
    parent = list(range(len(g.nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in g.arcs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    groups: dict[int, list[int]] = {}
    for i in range(len(g.nodes)):
        groups.setdefault(find(i), []).append(i)
    comps = sorted(
        (len(members), min(g.nodes[i] for i in members))
        for members in groups.values()
    )
    return ComponentReport(
        n=g.n,
        class_tag=g.class_tag,
        total_count=len(g.nodes),
        component_sizes=tuple(size for size, _ in comps),
        representatives=tuple(rep for _, rep in comps),
    )


def diameter(g: LevelGraph) -> int | None:
    """Exact diameter by BFS from every node; None when disconnected."""
    count = len(g.nodes)
    if count == 0:
        return None
    adj = g.adjacency()
    best = 0
    for source in range(count):
        dist = [-1] * count
        dist[source] = 0
        queue = [source]
        seen = 1
        for u in queue:
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
                    seen += 1
        if seen != count:
            return None
        best = max(best, max(dist))
    return best


# -- exports ---------------------------------------------------------------


def export_dot(g: LevelGraph, path: str):
    lines = [f'graph "{g.class_tag}_{g.n}" {{']
    for i, sig in enumerate(g.nodes):
        lines.append(f'  {i} [label="{sig}"];')
    for i, j in g.arcs:
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def export_json(report: ComponentReport, path: str):
    with open(path, "w") as fh:
        fh.write(report.to_json() + "\n")


def write_signature_file(sigs, n, class_tag, path):
    """One signature per line under a `# pachner-level` header."""
    with open(path, "w") as fh:
        fh.write(f"# pachner-level n={n} class={class_tag} count={len(sigs)}\n")
        for sig in sigs:
            fh.write(sig + "\n")
