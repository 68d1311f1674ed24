"""Constructive flag-preserving flip paths to the canonical flag sphere.

Given any flag sphere other than the double cone (n >= 8), the driver
:func:`to_canonical_an` emits a replayable certificate whose every
intermediate sphere is flag and whose endpoint is :func:`flag_target`.

The machinery mirrors the constructive argument it implements:

* :func:`find_splitting_4cycle` finds (after at most one flip) an induced
  4-cycle whose four vertices all have degree at least five, splitting the
  sphere into two proper quadrilaterals;
* :func:`organise` reorganizes one side until every interior vertex has
  degree four, recursing through smaller quadrilaterals and using
  :func:`transport` (move one interior vertex between adjacent ordered
  quadrilaterals), :func:`merge_quads` (fuse two ordered quadrilaterals
  sharing two edges) and :func:`resolve_quad_disc` (fix the one pathological
  quadrilateral shape that ordering can run into);
* the driver then balances the two ordered sides by transports until the
  target is reached.

Every "choose" in the underlying argument is resolved lexicographically so
certificates are reproducible.  Progress counters turn any non-terminating
defect into :class:`~pachner.errors.InternalBound` instead of a hang.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import signature
from .classify import double_cone, flag_target, is_flag
from .errors import (
    InternalBound,
    IsGamma,
    NotFlag,
    NotProper,
    NotQuadDisc,
    PreconditionFailed,
    UnsupportedSize,
)
from .moves import Certificate, FlipMove, certificate_for, flip
from .sphere import Triangulation, normalize_cycle


@dataclass(frozen=True)
class QuadRegion:
    """A quadrilateral disc in a sphere: boundary 4-cycle plus interior set."""

    boundary: tuple[int, int, int, int]
    interior: frozenset[int]


class _ReachedTarget(Exception):
    """Control flow: the working sphere became the canonical flag sphere."""

    def __init__(self, sphere):
        self.sphere = sphere


class _Guard:
    def __init__(self, limit, what):
        self.left = limit
        self.what = what

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise InternalBound(f"progress bound exhausted in {self.what}")


# -- geometric helpers ----------------------------------------------------


def _cycle_edges(cycle):
    k = len(cycle)
    return {tuple(sorted((cycle[i], cycle[(i + 1) % k]))) for i in range(k)}


def _region_triangles(t, cycle, seed):
    """Triangles on the `seed` side of the closed curve along `cycle`."""
    forbidden = _cycle_edges(cycle)
    edge_owner: dict[tuple[int, int], list] = {}
    for tri in t.triangles:
        a, b, c = tri
        for e in ((a, b), (a, c), (b, c)):
            edge_owner.setdefault(e, []).append(tri)
    seen = {seed}
    stack = [seed]
    while stack:
        tri = stack.pop()
        a, b, c = tri
        for e in ((a, b), (a, c), (b, c)):
            if e in forbidden:
                continue
            for other in edge_owner[e]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
    return seen


def _quad_triangles(t, quad: QuadRegion):
    """Current triangles of the disc (re-derived from the live sphere)."""
    if not quad.interior:
        raise InternalBound("region lookup needs an interior vertex")
    v = min(quad.interior)
    seed = next(tri for tri in t.triangles if v in tri)
    tris = _region_triangles(t, quad.boundary, seed)
    inner = {w for tri in tris for w in tri} - set(quad.boundary)
    if inner != set(quad.interior):
        raise InternalBound(
            f"region of {quad.boundary} has interior {sorted(inner)}, "
            f"expected {sorted(quad.interior)}")
    return tris


def _other_apex(t, u, v, known):
    x, y = t.edge_apices((u, v))
    return y if x == known else x


@dataclass
class _QuadInfo:
    boundary: tuple
    interior: frozenset
    diag_ends: tuple | None  # None when a single interior vertex
    path: tuple  # interior vertices in diagonal order


def _quad_info(t, quad: QuadRegion) -> _QuadInfo:
    """Read an ordered quadrilateral: interior all degree four, interior
    vertices on a path joining one opposite boundary pair."""
    interior = set(quad.interior)
    for v in interior:
        if t.degree(v) != 4:
            raise PreconditionFailed(
                f"interior vertex {v} has degree {t.degree(v)}, not 4")
    if len(interior) == 1:
        (v,) = interior
        return _QuadInfo(quad.boundary, quad.interior, None, (v,))
    b = quad.boundary
    off = [c for c in b if interior <= t.neighbors(c)]
    if len(off) != 2 or (b.index(off[0]) - b.index(off[1])) % 4 != 2:
        raise PreconditionFailed(
            f"quad {b} is not ordered (off-diagonal corners {off})")
    ends = tuple(c for c in b if c not in off)
    start = next(v for v in interior if ends[0] in t.neighbors(v))
    path = [start]
    while len(path) < len(interior):
        nxt = [w for w in t.neighbors(path[-1])
               if w in interior and w not in path]
        if len(nxt) != 1:
            raise PreconditionFailed(f"quad {b} interior is not a path")
        path.append(nxt[0])
    return _QuadInfo(quad.boundary, quad.interior, ends, tuple(path))


def _diag_has(info: _QuadInfo, v) -> bool:
    """Whether the diagonal path can be taken to end at corner v."""
    return info.diag_ends is None or v in info.diag_ends


def _boundary_neighbors(cycle, v):
    i = cycle.index(v)
    return cycle[(i - 1) % 4], cycle[(i + 1) % 4]


def _flip_edge(t, u, v, moves):
    m = FlipMove(tuple(sorted((u, v))), t.edge_apices((u, v)))
    t2 = flip(t, m)
    moves.append(m)
    return t2


# -- transport --------------------------------------------------------------


def transport_moves(t, alpha: QuadRegion, beta: QuadRegion, v, w, moves):
    """Move the interior vertex of ``alpha`` nearest the shared edge vw into
    ``beta``; returns (sphere, moved_vertex).

    Condition (1): both diagonal paths end at w, deg(w) >= 5; four flips.
    Condition (2): alpha's diagonal ends at v, beta's at w, deg(v) >= 5 and
    deg(w) >= 6; four flips.
    """
    edge = tuple(sorted((v, w)))
    for quad in (alpha, beta):
        if edge not in _cycle_edges(quad.boundary):
            raise PreconditionFailed(f"{edge} not on boundary of {quad}")
    if alpha.interior & beta.interior:
        raise PreconditionFailed("quad interiors overlap")
    k, l = len(alpha.interior), len(beta.interior)
    if k < 2 or l < 1:
        raise PreconditionFailed(f"need k >= 2 and l >= 1, got {k}, {l}")
    ia = _quad_info(t, alpha)
    ib = _quad_info(t, beta)

    if _diag_has(ia, w) and _diag_has(ib, w) and t.degree(w) >= 5:
        # condition (1): p-path starts at w, c1 next to w, c2 opposite w
        c1 = next(x for x in _boundary_neighbors(alpha.boundary, w) if x != v)
        p1 = next(x for x in t.neighbors(w) if x in alpha.interior)
        p2 = next(x for x in t.neighbors(p1)
                  if x in alpha.interior and x != p1)
        q1 = next(x for x in t.neighbors(w) if x in beta.interior)
        order = ((v, w), (c1, p1), (w, q1), (p1, p2))
    elif (_diag_has(ia, v) and _diag_has(ib, w)
          and t.degree(v) >= 5 and t.degree(w) >= 6):
        # condition (2): alpha's path starts at v, c2 is v's other neighbor.
        # The off-diagonal edge c2-p1 must go before the w-q1 flip: when the
        # two quads share more boundary than vw, flipping w-q1 first would
        # close a non-facial 3-cycle through c2.
        c2 = next(x for x in _boundary_neighbors(alpha.boundary, v) if x != w)
        p1 = next(x for x in t.neighbors(v) if x in alpha.interior)
        p2 = next(x for x in t.neighbors(p1)
                  if x in alpha.interior and x != p1)
        q1 = next(x for x in t.neighbors(w) if x in beta.interior)
        order = ((v, w), (c2, p1), (w, q1), (p1, p2))
    else:
        raise PreconditionFailed(
            f"neither transport condition holds at edge {edge} "
            f"(deg {t.degree(v)}/{t.degree(w)}, diagonals {ia.diag_ends}"
            f"/{ib.diag_ends})")
    for (x, y) in order:
        t = _flip_edge(t, x, y, moves)
    return t, p1


def transport(t, alpha: QuadRegion, beta: QuadRegion, shared_edge):
    """Public wrapper returning the new sphere and a flag certificate."""
    moves: list[FlipMove] = []
    v, w = shared_edge
    t2, _ = transport_moves(t, alpha, beta, v, w, moves)
    return t2, certificate_for("flag", t, moves, t2)


def _transport_auto(t, loser: QuadRegion, gainer: QuadRegion, moves):
    """Transport across whichever shared edge/condition applies first."""
    shared = sorted(_cycle_edges(loser.boundary)
                    & _cycle_edges(gainer.boundary))
    last = None
    for (x, y) in shared:
        for (v, w) in ((x, y), (y, x)):
            try:
                return transport_moves(t, loser, gainer, v, w, moves)
            except PreconditionFailed as exc:
                last = exc
    raise last if last else PreconditionFailed("no shared edge")


# -- the pathological quadrilateral disc ------------------------------------


@dataclass(frozen=True)
class QuadDiscFrame:
    """Labels of a hub-and-diagonal quadrilateral disc inside a sphere."""

    path: tuple[int, ...]  # diagonal path, endpoints on the boundary
    apex: int  # fan vertex over the whole path
    corner: int  # boundary vertex in exactly two disc triangles
    hub: int  # interior vertex joined to the whole path and the corner

    @property
    def k(self):
        return len(self.path) - 1

    def boundary(self):
        return (self.path[0], self.apex, self.path[-1], self.corner)

    def triangles(self):
        tris = set()
        for x, y in zip(self.path, self.path[1:]):
            tris.add(tuple(sorted((self.apex, x, y))))
            tris.add(tuple(sorted((self.hub, x, y))))
        tris.add(tuple(sorted((self.corner, self.path[0], self.hub))))
        tris.add(tuple(sorted((self.corner, self.hub, self.path[-1]))))
        return tris

    def region(self):
        return QuadRegion(
            self.boundary(),
            frozenset(self.path[1:-1]) | {self.hub},
        )


def quad_disc_frame(t, quad: QuadRegion) -> QuadDiscFrame:
    """Recognize the disc shape and name its parts (NotQuadDisc otherwise)."""
    tris = _quad_triangles(t, quad)
    special = [v for v in quad.interior if t.degree(v) != 4]
    if len(special) != 1:
        raise NotQuadDisc(f"expected one hub vertex, found {special}")
    hub = special[0]
    inner_path = set(quad.interior) - {hub}
    corner_cands = [
        c for c in quad.boundary
        if sum(1 for tri in tris if c in tri) == 2
    ]
    if len(corner_cands) != 1:
        raise NotQuadDisc(f"expected one corner, found {corner_cands}")
    corner = corner_cands[0]
    i = quad.boundary.index(corner)
    apex = quad.boundary[(i + 2) % 4]
    a0, ak = quad.boundary[(i + 1) % 4], quad.boundary[(i + 3) % 4]
    path = [a0]
    while len(path) < len(inner_path) + 2:
        nxt = [w for w in t.neighbors(path[-1])
               if (w in inner_path and w not in path)]
        if not nxt and len(path) == len(inner_path) + 1:
            nxt = [ak]
        if len(nxt) != 1:
            raise NotQuadDisc(f"diagonal path broke at {path}")
        path.append(nxt[0])
    for cand in (QuadDiscFrame(tuple(path), apex, corner, hub),
                 QuadDiscFrame(tuple(reversed(path)), apex, corner, hub)):
        if cand.triangles() == tris:
            return cand
    raise NotQuadDisc("triangle pattern does not match the disc shape")


def _probe_walk(t, frame: QuadDiscFrame):
    """Walk the double fan outside the disc from the apex corner.

    Returns ('target', ell) when both sides meet at the corner vertex
    (the sphere is the canonical flag sphere), or ('ladder', ell, top)
    where top is the first left-side vertex past the divergence point.
    """
    a0, ak, a, b = frame.path[0], frame.path[-1], frame.apex, frame.corner
    left = _other_apex(t, a0, a, frame.path[1])
    right = _other_apex(t, ak, a, frame.path[-2])
    if left != right:
        return ("ladder", 0, left, [])
    xs = [left]
    prev_l = prev_r = a
    guard = _Guard(2 * t.n, "outside fan walk")
    while True:
        guard.tick()
        nl = _other_apex(t, a0, xs[-1], prev_l)
        nr = _other_apex(t, ak, xs[-1], prev_r)
        if nl == nr:
            if nl == b:
                return ("target", len(xs) + 1, None, xs)
            prev_l = prev_r = xs[-1]
            xs.append(nl)
        else:
            return ("ladder", len(xs), nl, xs)


def _resolve_q3(t, frame, moves, guard):
    a0, a1, a2, a3 = frame.path
    a, b, c = frame.apex, frame.corner, frame.hub
    kind, ell, top, xs = _probe_walk(t, frame)
    if kind == "target":
        _assert_target(t)
        raise _ReachedTarget(t)
    guard.tick()
    down = list(reversed(xs)) + [a]
    for v in down:
        t = _flip_edge(t, a0, v, moves)
    t = _flip_edge(t, a1, c, moves)
    t = _flip_edge(t, a, a2, moves)
    rev = [a1] + ([a] + xs[:-1] if xs else [])
    for v in rev:
        t = _flip_edge(t, top, v, moves)
    return t


def _resolve_q4(t, frame, moves, guard):
    a0, a1, a2, a3, a4 = frame.path
    a, b, c = frame.apex, frame.corner, frame.hub
    kind, ell, top, xs = _probe_walk(t, frame)
    if kind == "target":
        # one transport across (a0, a) joins the two ordered sides
        cycle = (a0, a, a4, c)
        inner = frozenset((a1, a2, a3))
        rest = frozenset(range(1, t.n + 1)) - set(cycle) - inner
        t, _ = transport_moves(
            t,
            QuadRegion(cycle, inner),
            QuadRegion(cycle, rest),
            a0, a, moves)
        _assert_target(t)
        raise _ReachedTarget(t)
    guard.tick()
    down = list(reversed(xs)) + [a]
    for v in down:
        t = _flip_edge(t, a0, v, moves)
    for (x, y) in ((a1, c), (a2, c), (a3, a), (a2, a)):
        t = _flip_edge(t, x, y, moves)
    rev = [a1] + ([a] + xs[:-1] if xs else [])
    for v in rev:
        t = _flip_edge(t, top, v, moves)
    return t


def _resolve_disc(t, frame: QuadDiscFrame, moves, guard):
    """Reorganize the disc so all its interior vertices have degree four,
    leaving everything outside unchanged (or reach the canonical sphere)."""
    k = frame.k
    if k == 3:
        return _resolve_q3(t, frame, moves, guard)
    if k == 4:
        return _resolve_q4(t, frame, moves, guard)
    a, b, c = frame.apex, frame.corner, frame.hub
    path = frame.path
    for i in range(k - 3):
        t = _flip_edge(t, path[i], c, moves)
    sub3 = QuadDiscFrame(path[k - 3:], a, b, c)
    t = _resolve_q3(t, sub3, moves, guard)
    inner = QuadRegion((path[k - 3], a, path[-1], b),
                       frozenset((c, path[k - 2], path[k - 1])))
    info = _quad_info(t, inner)
    if info.diag_ends is None or set(info.diag_ends) != {a, b}:
        raise InternalBound("inner disc resolution left a bad diagonal")
    v1, v2, v3 = info.path if a in t.neighbors(info.path[0]) \
        else tuple(reversed(info.path))
    sub4 = QuadDiscFrame((a, v1, v2, v3, b), path[-1], path[k - 4],
                         path[k - 3])
    return _resolve_q4(t, sub4, moves, guard)


def resolve_quad_disc(t, quad: QuadRegion):
    """Public wrapper: outcome is ('resolved', t', cert) or
    ('reached-target', t', cert)."""
    frame = quad_disc_frame(t, quad)
    moves: list[FlipMove] = []
    guard = _Guard(10 * t.n * t.n, "quad disc resolution")
    try:
        t2 = _resolve_disc(t, frame, moves, guard)
    except _ReachedTarget as hit:
        return ("reached-target", hit.sphere,
                certificate_for("flag", t, moves, hit.sphere))
    for v in quad.interior:
        if t2.degree(v) != 4:
            raise InternalBound(f"disc interior vertex {v} not degree 4")
    return ("resolved", t2, certificate_for("flag", t, moves, t2))


def _assert_target(t):
    if signature(t) != signature(flag_target(t.n)):
        raise InternalBound(
            "construction claimed the canonical flag sphere but the "
            "signature differs")


# -- merging two ordered quadrilaterals -------------------------------------


def _merge_frame(alpha: QuadRegion, beta: QuadRegion):
    shared = _cycle_edges(alpha.boundary) & _cycle_edges(beta.boundary)
    if len(shared) != 2:
        raise PreconditionFailed(
            f"quads share {len(shared)} edges, need exactly 2")
    (e1, e2) = sorted(shared)
    common = set(e1) & set(e2)
    if len(common) != 1:
        raise PreconditionFailed("shared edges do not meet at one vertex")
    u = common.pop()
    v, w = sorted((set(e1) | set(e2)) - {u})
    a = next(x for x in alpha.boundary if x not in (u, v, w))
    b = next(x for x in beta.boundary if x not in (u, v, w))
    return u, v, w, a, b


def _orientation(t, quad, u, far):
    """'ua' when the diagonal joins u to the far corner, 'vw' otherwise;
    single-vertex quads count as 'ua'."""
    info = _quad_info(t, quad)
    if info.diag_ends is None:
        return "ua", info
    if set(info.diag_ends) == {u, far}:
        return "ua", info
    return "vw", info


def merge_quads_moves(t, alpha, beta, moves, guard):
    """Returns (t, merged QuadRegion); raises IsGamma or _ReachedTarget."""
    u, v, w, a, b = _merge_frame(alpha, beta)
    if not alpha.interior or not beta.interior:
        # one side is just the two triangles on the chord through u; the
        # union is ordered iff the full side's diagonal runs into u
        if not alpha.interior and not beta.interior:
            raise InternalBound("merging two interior-free quadrilaterals")
        if a == b:
            raise InternalBound("interior-free side in a closed merge")
        merged = QuadRegion(
            (a, v, b, w), alpha.interior | beta.interior | {u})
        _quad_info(t, merged)
        return t, merged
    oa, _ = _orientation(t, alpha, u, a)
    ob, _ = _orientation(t, beta, u, b)

    if oa == "vw" and ob == "ua":
        return merge_quads_moves(t, beta, alpha, moves, guard)

    if oa == "ua" and ob == "ua":
        if a == b:
            raise IsGamma("the two quadrilaterals close into a double cone")
        merged = QuadRegion(
            (a, v, b, w), alpha.interior | beta.interior | {u})
        _quad_info(t, merged)  # sanity: merged quad is ordered
        return t, merged

    if oa == "ua" and ob == "vw":
        if a == b:
            if len(beta.interior) == 1 or len(alpha.interior) == 1:
                raise IsGamma("double cone closed by a single-vertex side")
            while t.degree(u) > 5:
                guard.tick()
                t, moved = _transport_auto(t, beta, alpha, moves)
                beta = QuadRegion(beta.boundary,
                                  beta.interior - {moved})
                alpha = QuadRegion(alpha.boundary,
                                   alpha.interior | {moved})
            _assert_target(t)
            raise _ReachedTarget(t)
        while t.degree(u) > 5:
            guard.tick()
            t, moved = _transport_auto(t, beta, alpha, moves)
            beta = QuadRegion(beta.boundary, beta.interior - {moved})
            alpha = QuadRegion(alpha.boundary, alpha.interior | {moved})
        # beta plus the two alpha triangles at u is the pathological disc
        p1 = next(x for x in sorted(t.neighbors(u))
                  if x in alpha.interior)
        ib = _quad_info(t, beta)
        q_path = ib.path if v in t.neighbors(ib.path[0]) \
            else tuple(reversed(ib.path))
        frame = QuadDiscFrame((v,) + q_path + (w,), b, p1, u)
        if frame.triangles() != _quad_triangles(t, frame.region()):
            raise InternalBound("merge did not produce the expected disc")
        t = _resolve_disc(t, frame, moves, guard)
        quad_a = QuadRegion((v, p1, w, a), alpha.interior - {p1})
        quad_b = QuadRegion((v, p1, w, b),
                            beta.interior | {u})
        return merge_quads_moves(t, quad_a, quad_b, moves, guard)

    # both 'vw'
    if a == b:
        raise IsGamma("double cone with both diagonals between v and w")
    if len(alpha.interior) == 1:
        return merge_quads_moves(t, alpha, beta, moves, guard)
    if len(beta.interior) == 1:
        return merge_quads_moves(t, beta, alpha, moves, guard)
    while len(alpha.interior) > 1:
        guard.tick()
        t, moved = _transport_auto(t, alpha, beta, moves)
        alpha = QuadRegion(alpha.boundary, alpha.interior - {moved})
        beta = QuadRegion(beta.boundary, beta.interior | {moved})
    return merge_quads_moves(t, alpha, beta, moves, guard)


def merge_quads(t, alpha: QuadRegion, beta: QuadRegion):
    """Public wrapper: ('gamma',) | ('reached-target', t', cert) |
    ('merged', t', cert, QuadRegion).

    The internal transports require the strict degree conditions at the
    shared corners, which always hold for the configurations produced by
    :func:`organise` (both far corners of degree at least six there).  A
    hand-built pair whose shared-edge endpoints both have degree four admits
    no flag-preserving flip at all and raises PreconditionFailed.
    """
    moves: list[FlipMove] = []
    guard = _Guard(10 * t.n * t.n, "quad merge")
    try:
        t2, merged = merge_quads_moves(t, alpha, beta, moves, guard)
    except IsGamma:
        return ("gamma",)
    except _ReachedTarget as hit:
        return ("reached-target", hit.sphere,
                certificate_for("flag", t, moves, hit.sphere))
    return ("merged", t2, certificate_for("flag", t, moves, t2), merged)


# -- the organising induction ------------------------------------------------


def _common_interior(t, x, y, interior):
    return sorted(t.neighbors(x) & t.neighbors(y) & interior)


def _fan(t, a, c, d, interior):
    """Neighbors of boundary vertex a inside the quad, in order c .. d."""
    fan = [c]
    prev = a
    cur = next(x for x in t.edge_apices((a, c)) if x in interior)
    fan.append(cur)
    guard = _Guard(2 * t.n, "fan walk")
    while fan[-1] != d:
        guard.tick()
        fan.append(_other_apex(t, a, fan[-1], fan[-2]))
    return fan


def _pocket_region(t, a, y0, y1, z, fan_seed_tri):
    cycle = (y0, a, y1, z)
    tris = _region_triangles(t, cycle, fan_seed_tri)
    inner = {x for tri in tris for x in tri} - set(cycle)
    return cycle, tris, inner


def _claim(t, bound, interior, moves, guard):
    """Flip until the ends (or the sides) of the quad share an interior
    neighbor.  Returns (t, 'ab' | 'cd')."""
    a, c, b, d = bound
    restart_guard = _Guard(10 * t.n * t.n, "organising claim")
    while True:
        restart_guard.tick()
        if _common_interior(t, a, b, interior):
            return t, "ab"
        if _common_interior(t, c, d, interior):
            return t, "cd"
        fan = _fan(t, a, c, d, interior)
        m = len(fan) - 1
        restart = False
        pockets = []  # (QuadRegion, peak)
        s = 0
        while s < m:
            near_a = t.neighbors(a)
            found = None
            # largest far valley first, including the fan endpoint (the
            # first pocket never reaches it: the side-pair check above
            # would have fired)
            for l in range(m, s, -1):
                cands = [z for z in _common_interior(
                    t, fan[s], fan[l], interior) if z not in near_a]
                if cands:
                    found = (l, cands)
                    break
            if found is None:
                break
            l, cands = found
            seed = next(tri for tri in t.triangles
                        if a in tri and fan[s] in tri and fan[s + 1] in tri)
            best = None
            for z in cands:
                _, tris, inner = _pocket_region(t, a, fan[s], fan[l], z,
                                                seed)
                key = (-len(tris), z)
                if best is None or key < best[0]:
                    best = (key, z, inner)
            _, z, inner = best
            if not inner:
                if l != s + 1:
                    raise InternalBound(
                        "empty pocket spanning more than one fan step")
                t = _flip_edge(t, fan[s], fan[s + 1], moves)
                restart = True
                break
            t = _organise(
                t, (fan[s], a, fan[l], z), frozenset(inner), moves, guard)
            pockets.append(
                (QuadRegion((fan[s], a, fan[l], z), frozenset(inner)), z))
            s = l
        if restart:
            continue
        if s < m or len(pockets) < 2:
            raise InternalBound(
                f"claim stalled at valley index {s} of {m} "
                f"with {len(pockets)} pockets")
        # re-orient every pocket's diagonal to run valley-to-valley
        for i in range(len(pockets) - 1):
            pa, xa = pockets[i]
            pb, xb = pockets[i + 1]
            while _bad_pocket_diag(t, pa, a, xa) and len(pa.interior) > 1:
                guard.tick()
                t, moved = _transport_auto(t, pa, pb, moves)
                pa = QuadRegion(pa.boundary, pa.interior - {moved})
                pb = QuadRegion(pb.boundary, pb.interior | {moved})
            while _bad_pocket_diag(t, pb, a, xb) and len(pb.interior) > 1:
                guard.tick()
                t, moved = _transport_auto(t, pb, pa, moves)
                pb = QuadRegion(pb.boundary, pb.interior - {moved})
                pa = QuadRegion(pa.boundary, pa.interior | {moved})
            pockets[i] = (pa, xa)
            pockets[i + 1] = (pb, xb)
        # ladder: push the first peak into the fan of a, then restart
        p0, x1 = pockets[0]
        y0, _, y1, _ = p0.boundary
        info = _quad_info(t, p0)
        path = info.path if y0 in t.neighbors(info.path[0]) \
            else tuple(reversed(info.path))
        t = _flip_edge(t, x1, y1, moves)
        for vtx in reversed(path[1:]):
            t = _flip_edge(t, x1, vtx, moves)
        t = _flip_edge(t, y0, path[0], moves)


def _bad_pocket_diag(t, pocket_quad, a, peak):
    info = _quad_info(t, pocket_quad)
    return info.diag_ends is not None and set(info.diag_ends) == {a, peak}


def _organise(t, bound, interior, moves, guard, top_level=False):
    """Reorganize the quad so every interior vertex gets degree four.

    The complement of the quad is never touched.  Raises _ReachedTarget when
    a sub-step recognizes the canonical flag sphere.
    """
    interior = frozenset(interior)
    if not interior:
        raise NotProper("proper quadrilateral needs an interior vertex")
    exc = NotProper if top_level else InternalBound
    a, c, b, d = bound
    if t.has_edge(a, b) or t.has_edge(c, d):
        raise exc(f"splitting 4-cycle {bound} is not induced")
    for x in bound:
        if t.degree(x) < 5:
            raise exc(f"boundary vertex {x} has degree {t.degree(x)} < 5")
    if all(t.degree(v) == 4 for v in interior):
        return t
    t, which = _claim(t, bound, interior, moves, guard)
    if which == "cd":
        a, c, b, d = c, a, d, b
    cands = [e for e in _common_interior(t, a, b, interior)
             if t.degree(e) >= 5]
    if not cands:
        if not all(t.degree(v) == 4 for v in interior):
            raise InternalBound(
                "all shared neighbors have degree four but the quad "
                "interior does not")
        return t
    e = cands[0]
    sides = {}
    for s in (c, d):
        cycle = (e, a, s, b)
        seed_apex = next(x for x in t.edge_apices((a, s))
                         if x in interior or x == e)
        seed = tuple(sorted((a, s, seed_apex)))
        tris = _region_triangles(t, cycle, seed)
        inner = {x for tri in tris for x in tri} - set(cycle)
        sides[s] = (cycle, tris, frozenset(inner))
    if (sides[c][2] | sides[d][2] | {e}) != interior or \
            (sides[c][2] & sides[d][2]):
        raise InternalBound("split along the shared neighbor went wrong")
    e_tris = {s: sum(1 for tri in sides[s][1] if e in tri) for s in (c, d)}
    s2 = max((c, d), key=lambda s: (e_tris[s], -s))
    s1 = d if s2 == c else c
    q1_cycle, _, q1_int = sides[s1]
    q2_cycle, _, q2_int = sides[s2]
    if q1_int:
        t = _organise(t, q1_cycle, q1_int, moves, guard)
        t = _organise(t, q2_cycle, q2_int, moves, guard)
        t, merged = merge_quads_moves(
            t, QuadRegion(q1_cycle, q1_int), QuadRegion(q2_cycle, q2_int),
            moves, guard)
        if normalize_cycle(merged.boundary) != normalize_cycle(bound) or \
                merged.interior != interior:
            raise InternalBound("merge did not restore the original quad")
        return t
    if q2_int:
        t = _organise(t, q2_cycle, q2_int, moves, guard)
    if t.degree(e) == 4:
        if not all(t.degree(v) == 4 for v in interior):
            raise InternalBound("shared neighbor fell to degree four but "
                                "the quad interior did not follow")
        return t
    info = _quad_info(t, QuadRegion(q2_cycle, q2_int))
    if info.diag_ends is None or set(info.diag_ends) != {a, b}:
        raise InternalBound("hub side kept degree >= 5 but its diagonal "
                            "does not join the quad ends")
    q_path = info.path if a in t.neighbors(info.path[0]) \
        else tuple(reversed(info.path))
    frame = QuadDiscFrame((a,) + q_path + (b,), s2, s1, e)
    if frame.triangles() != _quad_triangles(t, QuadRegion(bound, interior)):
        raise InternalBound("quad did not reduce to the pathological disc")
    t = _resolve_disc(t, frame, moves, guard)
    if not all(t.degree(v) == 4 for v in interior):
        raise InternalBound("disc resolution left a non-degree-4 interior")
    return t


def organise(t, quad: QuadRegion):
    """Public wrapper: ('organised', t', cert) or ('reached-target', ...)."""
    if not is_flag(t):
        raise NotFlag("organising requires a flag sphere")
    moves: list[FlipMove] = []
    guard = _Guard(20 * t.n ** 3, "organise")
    try:
        t2 = _organise(t, quad.boundary, quad.interior, moves, guard,
                       top_level=True)
    except _ReachedTarget as hit:
        return ("reached-target", hit.sphere,
                certificate_for("flag", t, moves, hit.sphere))
    return ("organised", t2, certificate_for("flag", t, moves, t2))


# -- finding the splitting 4-cycle -------------------------------------------


def find_splitting_4cycle(t):
    """An induced 4-cycle with all four degrees >= 5, after at most one
    preparatory flip; returns (t', cycle, certificate)."""
    if not is_flag(t):
        raise NotFlag("need a flag sphere")
    n = t.n
    if n < 8:
        raise UnsupportedSize(f"splitting needs n >= 8, got {n}")
    if signature(t) == signature(double_cone(n)):
        raise IsGamma("the double cone admits no proper splitting")
    moves: list[FlipMove] = []
    start = t
    deg4 = sorted(v for v in t.vertices() if t.degree(v) == 4)
    if deg4:
        v = deg4[0]
        cycle = tuple(t.link_cycle(v))
        interior = {v}
        guard = _Guard(2 * n, "splitting cycle growth")
        while True:
            guard.tick()
            low = sorted(x for x in cycle if t.degree(x) == 4)
            if not low:
                break
            w = low[0]
            link = t.link_cycle(w)
            outside = [x for x in link if x not in cycle and x not in interior]
            if len(outside) != 1:
                raise InternalBound(
                    f"growth at {w} found {outside} outside the disc")
            x = outside[0]
            cycle = tuple(x if y == w else y for y in cycle)
            interior.add(w)
            if t.has_edge(cycle[0], cycle[2]) or \
                    t.has_edge(cycle[1], cycle[3]):
                raise InternalBound("grown 4-cycle is not induced")
        return t, cycle, certificate_for("flag", start, moves, t)
    deg5 = sorted(x for x in t.vertices() if t.degree(x) == 5)
    if not deg5:
        raise InternalBound("flag sphere with minimum degree above five")
    w = deg5[0]
    for u in sorted(t.neighbors(w)):
        x, y = t.edge_apices((u, w))
        shared = sorted((t.neighbors(x) & t.neighbors(y)) - {w, u})
        if shared:
            return t, (shared[0], x, w, y), certificate_for(
                "flag", start, moves, t)
    u = min(t.neighbors(w))
    t = _flip_edge(t, u, w, moves)
    cycle = tuple(t.link_cycle(w))
    if any(t.degree(x) < 5 for x in cycle):
        raise InternalBound("post-flip link cycle has a low-degree vertex")
    return t, cycle, certificate_for("flag", start, moves, t)


# -- the driver ---------------------------------------------------------------


def to_canonical_an(t: Triangulation) -> Certificate:
    """Certificate of flag-preserving flips from t to the canonical flag
    sphere on the same number of vertices."""
    if not is_flag(t):
        raise NotFlag("input is not a flag sphere")
    n = t.n
    if n == 7:
        raise UnsupportedSize("level 7 has no flag sphere beside the cone")
    if signature(t) == signature(double_cone(n)):
        raise IsGamma("the double cone is flip-isolated among flag spheres")
    if n < 8:
        raise UnsupportedSize(
            f"no flag spheres below 8 vertices beside the double cone ({n})")
    target = signature(flag_target(n))
    start = t
    moves: list[FlipMove] = []
    guard = _Guard(40 * n ** 3, "canonical flag path")
    try:
        if signature(t) == target:
            raise _ReachedTarget(t)
        t, cycle, prep = find_splitting_4cycle(t)
        moves.extend(prep.moves)
        if signature(t) == target:
            raise _ReachedTarget(t)
        side_q, side_r = _split_interiors(t, cycle)
        t = _organise(t, cycle, side_q, moves, guard)
        if signature(t) == target:
            raise _ReachedTarget(t)
        t = _organise(t, cycle, side_r, moves, guard)
        if signature(t) == target:
            raise _ReachedTarget(t)
        cycle, side_q, side_r = _regrow_boundary(
            t, cycle, side_q, side_r, guard)
        t = _final_balance(t, cycle, side_q, side_r, moves, guard)
        _assert_target(t)
    except _ReachedTarget as hit:
        t = hit.sphere
    cert = certificate_for("flag", start, moves, t)
    if cert.end != target:
        raise InternalBound("driver finished away from the target sphere")
    return cert


def _split_interiors(t, cycle):
    seed_apex = next(x for x in t.edge_apices((cycle[0], cycle[1])))
    seed = tuple(sorted((cycle[0], cycle[1], seed_apex)))
    tris = _region_triangles(t, cycle, seed)
    inner = frozenset(
        {x for tri in tris for x in tri} - set(cycle))
    other = frozenset(range(1, t.n + 1)) - set(cycle) - inner
    if not inner or not other:
        raise InternalBound("splitting 4-cycle has an empty side")
    return inner, other


def _regrow_boundary(t, cycle, side_q, side_r, guard):
    side_q, side_r = set(side_q), set(side_r)
    while True:
        guard.tick()
        low = sorted(x for x in cycle if t.degree(x) == 4)
        if not low:
            return cycle, frozenset(side_q), frozenset(side_r)
        w = low[0]
        nbrs = t.neighbors(w)
        q_nbr = sorted(nbrs & side_q)
        r_nbr = sorted(nbrs & side_r)
        if len(q_nbr) != 1 or len(r_nbr) != 1:
            raise InternalBound(f"degree-4 boundary vertex {w} has "
                                f"sides {q_nbr}/{r_nbr}")
        if len(side_r) >= 2:
            x = r_nbr[0]
            side_q.add(w)
            side_r.discard(x)
        elif len(side_q) >= 2:
            x = q_nbr[0]
            side_r.add(w)
            side_q.discard(x)
        else:
            raise InternalBound("both sides are singletons during regrowth")
        cycle = tuple(x if y == w else y for y in cycle)


def _final_balance(t, cycle, side_q, side_r, moves, guard):
    """Both sides ordered with boundary degrees >= 5: transport until the
    canonical flag sphere appears."""
    pair1 = {cycle[0], cycle[2]}
    pair2 = {cycle[1], cycle[3]}
    iq = _quad_info(t, QuadRegion(cycle, side_q))
    ir = _quad_info(t, QuadRegion(cycle, side_r))
    dq = set(iq.diag_ends) if iq.diag_ends else None
    dr = set(ir.diag_ends) if ir.diag_ends else None
    if dq is not None and dr is not None and dq == dr:
        raise InternalBound("parallel diagonals form a double cone")
    if dq is None and dr is None:
        raise InternalBound("two singleton sides cannot reach level 8")
    if dq is None:
        dq = pair1 if dr == pair2 else pair2
    if dr is None:
        dr = pair1 if dq == pair2 else pair2
    # gainer A has the diagonal through u; loser B runs between the others
    if len(side_r) >= len(side_q):
        gainer, g_diag = QuadRegion(cycle, side_q), dq
        loser = QuadRegion(cycle, side_r)
    else:
        gainer, g_diag = QuadRegion(cycle, side_r), dr
        loser = QuadRegion(cycle, side_q)
    u = min(g_diag)
    if len(loser.interior) < 2:
        raise InternalBound("loser side too small for the final balance")
    while t.degree(u) > 5:
        guard.tick()
        t, moved = _transport_auto(t, loser, gainer, moves)
        loser = QuadRegion(loser.boundary, loser.interior - {moved})
        gainer = QuadRegion(gainer.boundary, gainer.interior | {moved})
    return t
