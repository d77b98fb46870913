"""torsorkit: exact verification of noncommutative descent structures.

The engine represents finite-dimensional algebras, bimodules, corings and
bialgebroids over an exact field (Q or GF(p)), and mechanically constructs
and checks the objects attached to a pre-torsor: the two associated corings,
Galois and entwining maps, the coinvariant bicomodule, the bialgebroid and
its Galois map, monoidal-functor witnesses, twisted bialgebroids and first
order differential calculi.  Everything is a matrix identity in exact
arithmetic; there are no tolerances.
"""

from .fields import GF, QQ, field_from_spec
from .spaces import LinearMap, Space, Subspace, intersect, invert, kernel, quotient

__all__ = [
    "GF",
    "QQ",
    "field_from_spec",
    "Space",
    "LinearMap",
    "Subspace",
    "kernel",
    "quotient",
    "invert",
    "intersect",
]

__version__ = "0.1.0"
