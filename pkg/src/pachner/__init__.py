"""Triangulated 2-spheres, bistellar flips, flip-graph levels and
certificate-producing flip-path synthesizers."""

from .canonical import BACKEND, from_signature, isomorphic, signature
from .sphere import Triangulation, build

__all__ = [
    "BACKEND",
    "Triangulation",
    "build",
    "from_signature",
    "isomorphic",
    "signature",
]

__version__ = "0.1.0"
