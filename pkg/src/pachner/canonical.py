"""Canonical labeling, isomorphism signatures and isomorphism tests.

A signature is the text form of the canonically relabeled triangulation; it
is equal for two triangulations exactly when they are combinatorially
isomorphic, and it doubles as the storage key in all graph data and files.

Two interchangeable kernels compute the canonical form: a compiled
extension (``pachner._canon_fast``, built from Cython) and a pure Python
fallback (``pachner._canon_py``).  The extension is used when it imported
successfully and ``PACHNER_PURE_PYTHON`` is not set; both produce
bit-identical signatures.
"""

from __future__ import annotations

import os

from . import _canon_py
from .errors import ValidationError
from .sphere import Triangulation, format_triangles, parse_triangles

try:  # pragma: no cover - exercised only when the extension is missing
    from . import _canon_fast
except ImportError:
    _canon_fast = None

if _canon_fast is not None and not os.environ.get("PACHNER_PURE_PYTHON"):
    _kernel = _canon_fast
    BACKEND = "cython"
else:
    _kernel = _canon_py
    BACKEND = "python"


def canonical_form(n: int, triangles) -> str:
    """Signature text for a raw triangle list (assumed to be a valid sphere).

    Fast path used by the enumeration loops; library users should go
    through :func:`signature`.
    """
    return format_triangles(n, _kernel.canonical_triangles(n, triangles))


def signature(t: Triangulation) -> str:
    return canonical_form(t.n, t.triangles)


def isomorphic(t1: Triangulation, t2: Triangulation) -> bool:
    if t1.n != t2.n:
        return False
    return signature(t1) == signature(t2)


def from_signature(sig: str) -> Triangulation:
    """Rebuild a triangulation from its text form (ParseError on bad text)."""
    n, tris = parse_triangles(sig)
    return Triangulation(n, tris)


def validate_signature(sig: str) -> str:
    """Check that ``sig`` is the canonical form of a valid sphere."""
    t = from_signature(sig)
    canon = signature(t)
    if canon != sig:
        raise ValidationError(
            f"text is a valid sphere but not canonical (expected {canon})")
    return sig
