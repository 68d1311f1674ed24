"""Bistellar moves, flip-sequence certificates and the replay verifier.

Moves operate on working labels, never on signatures: a certificate carries
the concrete start labeling so replay is exact.  Every move returns a fresh
validated triangulation; inputs are never mutated.

The 2-move removes a vertex and shifts every higher label down by one so
that labels stay dense (see :func:`two_move_relabeling` for the map).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .canonical import from_signature, signature
from .errors import (
    IllegalFlip,
    IllegalMove,
    ParseError,
    ReplayError,
    UnknownTriangle,
    ValidationError,
)
from .sphere import Triangulation, build, parse_triangles


class FlipMove(NamedTuple):
    """Edge flip: remove edge ``ab``, insert the apex diagonal ``cd``."""

    remove: tuple[int, int]
    insert: tuple[int, int]


def make_flip(remove, insert) -> FlipMove:
    return FlipMove(tuple(sorted(remove)), tuple(sorted(insert)))


def inverse(m: FlipMove) -> FlipMove:
    return FlipMove(m.insert, m.remove)


def flip(t: Triangulation, m: FlipMove) -> Triangulation:
    """Apply one edge flip; raises IllegalFlip when not applicable."""
    a, b = m.remove
    c, d = m.insert
    if not t.has_edge(a, b):
        raise IllegalFlip("missing-triangles", f"{m.remove} is not an edge")
    if set(t.edge_apices(m.remove)) != {c, d}:
        raise IllegalFlip(
            "missing-triangles",
            f"apices of {m.remove} are {t.edge_apices(m.remove)}, not {m.insert}",
        )
    if t.has_edge(c, d):
        raise IllegalFlip("diagonal-exists", f"{m.insert} is already an edge")
    tris = set(t.triangles)
    tris.discard(tuple(sorted((a, b, c))))
    tris.discard(tuple(sorted((a, b, d))))
    tris.add(tuple(sorted((a, c, d))))
    tris.add(tuple(sorted((b, c, d))))
    return build(t.n, tris)


def flip_triangle_list(tris: list, m: FlipMove) -> list:
    """Unvalidated flip on a raw triangle list (enumeration fast path)."""
    a, b = m.remove
    c, d = m.insert
    out = [
        x
        for x in tris
        if x != tuple(sorted((a, b, c))) and x != tuple(sorted((a, b, d)))
    ]
    out.append(tuple(sorted((a, c, d))))
    out.append(tuple(sorted((b, c, d))))
    return out


def legal_flips(t: Triangulation) -> list[FlipMove]:
    """Every legal flip, sorted by (remove, insert)."""
    out = []
    for e in t.edges():
        x, y = t.edge_apices(e)
        if not t.has_edge(x, y):
            out.append(FlipMove(e, (x, y)))
    out.sort()
    return out


def zero_move(t: Triangulation, tri) -> Triangulation:
    """Stellar subdivision of a triangle; the new vertex is labeled n+1."""
    key = tuple(sorted(tri))
    if not t.has_triangle(key):
        raise UnknownTriangle(f"{key} is not a triangle")
    a, b, c = key
    w = t.n + 1
    tris = set(t.triangles)
    tris.remove(key)
    tris.update({(a, b, w), (a, c, w), (b, c, w)})
    return build(t.n + 1, tris)


def two_move(t: Triangulation, v: int) -> Triangulation:
    """Remove the star of a degree-3 vertex; labels above v shift down."""
    if t.degree(v) != 3:
        raise IllegalMove("degree-not-3", f"deg({v}) = {t.degree(v)}")
    lk = tuple(sorted(t.link_cycle(v)))
    if t.has_triangle(lk):
        raise IllegalMove("triangle-exists", f"{lk} is already a triangle")
    relab = two_move_relabeling(t.n, v)
    tris = {
        tuple(sorted(relab[w] for w in tri))
        for tri in t.triangles
        if v not in tri
    }
    tris.add(tuple(sorted(relab[w] for w in lk)))
    return build(t.n - 1, tris)


def two_move_relabeling(n: int, v: int) -> dict[int, int]:
    """Old-label -> new-label map used by :func:`two_move`."""
    return {w: (w if w < v else w - 1) for w in range(1, n + 1) if w != v}


# -- certificates --------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """A replayable, class-tagged flip sequence between two signatures."""

    class_tag: str
    start: str
    start_labeling: str
    moves: tuple[FlipMove, ...]
    end: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "class": self.class_tag,
                "start": self.start,
                "start_labeling": self.start_labeling,
                "moves": [
                    {"remove": list(m.remove), "insert": list(m.insert)}
                    for m in self.moves
                ],
                "end": self.end,
            }
        )

    @staticmethod
    def from_json(text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad certificate JSON: {exc}") from None
        try:
            moves = tuple(
                make_flip(m["remove"], m["insert"]) for m in data["moves"]
            )
            return Certificate(
                class_tag=data["class"],
                start=data["start"],
                start_labeling=data["start_labeling"],
                moves=moves,
                end=data["end"],
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad certificate structure: {exc}") from None


def certificate_for(class_tag, start_t, moves, end_t) -> Certificate:
    return Certificate(
        class_tag=class_tag,
        start=signature(start_t),
        start_labeling=start_t.text(),
        moves=tuple(moves),
        end=signature(end_t),
    )


@dataclass
class VerificationReport:
    ok: bool
    step: int | None = None
    reason: str | None = None
    length: int = 0

    def __bool__(self):
        return self.ok


def verify_certificate(
    cert: Certificate,
    predicates: dict[str, Callable[[Triangulation], bool]] | None = None,
) -> VerificationReport:
    """Replay a certificate and check its class predicate at every state.

    Returns a falsy report naming the first failing step (0 = start state,
    i = after move i) instead of raising, so that verification failures are
    data, not exceptions.
    """
    if predicates is None:
        from .classify import CLASS_PREDICATES

        predicates = CLASS_PREDICATES
    try:
        _replay(cert, predicates)
    except ReplayError as exc:
        return VerificationReport(False, exc.step, exc.reason, len(cert.moves))
    return VerificationReport(True, None, None, len(cert.moves))


def _replay(cert, predicates):
    pred = predicates.get(cert.class_tag)
    if pred is None:
        raise ReplayError(0, f"unknown class tag {cert.class_tag!r}")
    try:
        n, tris = parse_triangles(cert.start_labeling)
        t = build(n, tris)
    except (ParseError, ValidationError) as exc:
        raise ReplayError(0, f"bad start labeling: {exc}") from None
    if signature(t) != cert.start:
        raise ReplayError(0, "start labeling does not match start signature")
    if not pred(t):
        raise ReplayError(0, f"start state violates {cert.class_tag!r}")
    for i, m in enumerate(cert.moves, start=1):
        try:
            t = flip(t, m)
        except IllegalFlip as exc:
            raise ReplayError(i, f"illegal flip {m}: {exc}") from None
        if not pred(t):
            raise ReplayError(
                i, f"state after move {i} violates {cert.class_tag!r}")
    if signature(t) != cert.end:
        raise ReplayError(
            len(cert.moves), "final state does not match end signature")
    return t


def concat_certificates(class_tag, parts) -> Certificate:
    """Join consecutive certificates (end of each = start of the next)."""
    parts = [p for p in parts if p is not None]
    if not parts:
        raise ValueError("no certificates to concatenate")
    moves = []
    for prev, nxt in zip(parts, parts[1:]):
        if prev.end != nxt.start:
            raise ValueError("certificates do not chain")
    for p in parts:
        moves.extend(p.moves)
    return Certificate(
        class_tag=class_tag,
        start=parts[0].start,
        start_labeling=parts[0].start_labeling,
        moves=tuple(moves),
        end=parts[-1].end,
    )
