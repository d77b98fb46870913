"""Named finite-dimensional spaces, linear maps between them, subspaces.

A ``LinearMap`` is the universal currency of the engine: column j of its
matrix is the image of the j-th domain basis vector.  Composition is only
defined when the inner space handles match, which catches a large class of
assembly mistakes at the type level.

Subspaces are always stored with a canonical reduced-echelon basis so two
computations of the same subspace compare equal as matrices.
"""

from __future__ import annotations

import itertools

from .errors import AmbientMismatch, NotInvertible, ShapeMismatch
from .fields import Field
from .linalg import Matrix

_space_counter = itertools.count()


class Space:
    """A based vector space with a unique handle and basis labels."""

    __slots__ = ("uid", "name", "dim", "labels", "field")

    def __init__(self, field: Field, dim: int, name: str = "", labels=None):
        if dim < 0:
            raise ShapeMismatch("negative dimension")
        self.uid = next(_space_counter)
        self.field = field
        self.dim = dim
        self.name = name or f"V{self.uid}"
        if labels is None:
            labels = [f"{self.name}.{i}" for i in range(dim)]
        labels = list(labels)
        if len(labels) != dim:
            raise ShapeMismatch("label count differs from dimension")
        if len(set(labels)) != dim:
            raise ShapeMismatch("duplicate basis labels")
        self.labels = tuple(labels)

    def __repr__(self):
        return f"Space({self.name}, dim={self.dim})"

    def basis_vector(self, i):
        f = self.field
        return tuple(f.one if j == i else f.zero for j in range(self.dim))

    def zero_vector(self):
        return (self.field.zero,) * self.dim


class LinearMap:
    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain: Space, codomain: Space, matrix: Matrix):
        if matrix.shape != (codomain.dim, domain.dim):
            raise ShapeMismatch(
                f"matrix {matrix.shape} does not map {domain.name}(dim {domain.dim}) "
                f"to {codomain.name}(dim {codomain.dim})"
            )
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    # -- constructors --------------------------------------------------

    @staticmethod
    def identity(space: Space) -> "LinearMap":
        return LinearMap(space, space, Matrix.identity(space.field, space.dim))

    @staticmethod
    def zero(domain: Space, codomain: Space) -> "LinearMap":
        return LinearMap(domain, codomain, Matrix.zero(domain.field, codomain.dim, domain.dim))

    @staticmethod
    def from_columns(domain: Space, codomain: Space, cols) -> "LinearMap":
        return LinearMap(domain, codomain, Matrix.from_cols(domain.field, list(cols), codomain.dim))

    @staticmethod
    def from_vector(codomain: Space, vec) -> "LinearMap":
        """The map k -> codomain sending 1 to ``vec`` (a rank<=1 column)."""
        one = Space(codomain.field, 1, "k")
        return LinearMap.from_columns(one, codomain, [tuple(vec)])

    # -- algebra ---------------------------------------------------------

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        """Composition self after other."""
        if other.codomain is not self.domain:
            raise ShapeMismatch(
                f"composition mismatch: {other.codomain.name} vs {self.domain.name}"
            )
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)

    def __add__(self, other):
        self._same_hom(other)
        return LinearMap(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other):
        self._same_hom(other)
        return LinearMap(self.domain, self.codomain, self.matrix - other.matrix)

    def __neg__(self):
        return LinearMap(self.domain, self.codomain, -self.matrix)

    def _same_hom(self, other):
        if self.domain is not other.domain or self.codomain is not other.codomain:
            raise ShapeMismatch("maps live between different spaces")

    def __eq__(self, other):
        return (
            isinstance(other, LinearMap)
            and self.domain is other.domain
            and self.codomain is other.codomain
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.domain.uid, self.codomain.uid, self.matrix))

    def __repr__(self):
        return f"LinearMap({self.domain.name} -> {self.codomain.name})"

    def apply(self, vec):
        return self.matrix.apply(vec)

    def is_zero(self):
        return self.matrix.is_zero()

    def is_identity(self):
        return self.domain is self.codomain and self.matrix.is_identity()

    def kron(self, other: "LinearMap", dom: Space, cod: Space) -> "LinearMap":
        """Kronecker product realised between explicit tensor spaces."""
        m = self.matrix.kron(other.matrix)
        if (dom.dim, cod.dim) != (m.ncols, m.nrows):
            raise ShapeMismatch("kron: supplied tensor spaces have wrong dims")
        return LinearMap(dom, cod, m)

    def rank(self):
        return self.matrix.rank()

    def retarget(self, codomain: Space) -> "LinearMap":
        """Same matrix viewed into another space of equal dimension."""
        return LinearMap(self.domain, codomain, self.matrix)

    def rebase(self, domain: Space) -> "LinearMap":
        """Same matrix viewed from another space of equal dimension."""
        return LinearMap(domain, self.codomain, self.matrix)


class Subspace:
    """A subspace with canonical inclusion and a retraction splitting it.

    The inclusion columns are the reduced-echelon basis of the span, so two
    subspaces are equal iff their inclusion matrices are equal.  The
    retraction reads off the pivot coordinates; ``retraction o inclusion``
    is the identity by construction and is re-checked here.
    """

    __slots__ = ("ambient", "space", "inclusion", "retraction", "pivots")

    def __init__(self, ambient: Space, space: Space, inclusion: LinearMap,
                 retraction: LinearMap, pivots):
        self.ambient = ambient
        self.space = space
        self.inclusion = inclusion
        self.retraction = retraction
        self.pivots = tuple(pivots)
        if not (retraction @ inclusion).is_identity():
            raise ShapeMismatch("retraction does not split the inclusion")

    @property
    def dim(self):
        return self.space.dim

    @staticmethod
    def from_spanning(ambient: Space, vectors, name: str = "") -> "Subspace":
        """Canonicalise a spanning family into a Subspace."""
        field = ambient.field
        mat = Matrix(field, list(vectors), ambient.dim)
        R, pivots = mat.rref()
        basis = [R.rows[i] for i in range(len(pivots))]
        sub = Space(field, len(basis), name or f"sub({ambient.name})")
        incl = LinearMap.from_columns(sub, ambient, basis)
        retr_rows = [ambient.basis_vector(p) for p in pivots]
        retr = LinearMap(ambient, sub, Matrix(field, retr_rows, ambient.dim))
        return Subspace(ambient, sub, incl, retr, pivots)

    def contains_vector(self, vec) -> bool:
        back = self.inclusion.apply(self.retraction.apply(vec))
        f = self.ambient.field
        return all(f.is_zero(f.sub(a, b)) for a, b in zip(back, vec))

    def contains_map(self, f: LinearMap) -> bool:
        """Whether the image of ``f`` (into the ambient) lies in this subspace."""
        if f.codomain is not self.ambient:
            raise AmbientMismatch("map does not land in the ambient space")
        proj = self.inclusion @ self.retraction @ f
        return (proj - f).is_zero()

    def corestrict(self, f: LinearMap) -> LinearMap:
        """View a map into the ambient as a map into the subspace.

        Raises AmbientMismatch if the image is not contained in the subspace.
        """
        if not self.contains_map(f):
            raise AmbientMismatch("image not contained in subspace")
        return self.retraction @ f

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient is other.ambient
            and self.inclusion.matrix == other.inclusion.matrix
        )

    def __hash__(self):
        return hash((self.ambient.uid, self.inclusion.matrix))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient.name})"


def kernel(f: LinearMap, name: str = "") -> Subspace:
    """Kernel as a canonical Subspace of the domain; rank-nullity asserted."""
    basis = f.matrix.kernel_basis()
    sub = Subspace.from_spanning(f.domain, basis, name or f"ker({f.domain.name})")
    assert sub.dim + f.matrix.rank() == f.domain.dim
    return sub


def image(f: LinearMap, name: str = "") -> Subspace:
    cols = [f.matrix.col(j) for j in range(f.domain.dim)]
    return Subspace.from_spanning(f.codomain, cols, name or f"im({f.codomain.name})")


def quotient(V: Space, S: Subspace, name: str = ""):
    """Quotient V/S with canonical complement-pivot basis.

    Returns (Q, proj, sect) with proj surjective, proj o sect = id and
    kernel(proj) = S.
    """
    if S.ambient is not V:
        raise AmbientMismatch("subspace does not live in the given space")
    field = V.field
    if S.dim == 0:
        Q = Space(field, V.dim, name or f"{V.name}/~", labels=V.labels)
        ident = Matrix.identity(field, V.dim)
        return Q, LinearMap(V, Q, ident), LinearMap(Q, V, ident)
    pivset = set(S.pivots)
    free = [j for j in range(V.dim) if j not in pivset]
    Q = Space(field, len(free), name or f"{V.name}/~", labels=[V.labels[j] for j in free])
    # reduce mod S, then read off the complement coordinates
    reduce_rows = []
    basis_rows = S.inclusion.matrix.cols()  # echelon basis vectors of S
    for j in free:
        row = [field.zero] * V.dim
        row[j] = field.one
        for bi, p in enumerate(S.pivots):
            b = basis_rows[bi]
            coeff = b[j]
            if not field.is_zero(coeff):
                row[p] = field.neg(coeff)
        reduce_rows.append(tuple(row))
    proj = LinearMap(V, Q, Matrix(field, reduce_rows, V.dim))
    sect_cols = [V.basis_vector(j) for j in free]
    sect = LinearMap.from_columns(Q, V, sect_cols)
    return Q, proj, sect


def invert(f: LinearMap) -> LinearMap:
    """Two-sided inverse; NotInvertible carries rank and a kernel witness."""
    try:
        inv = f.matrix.inverse()
    except NotInvertible as exc:
        if f.domain.dim != f.codomain.dim:
            raise NotInvertible(
                f"{f!r}: dimension mismatch {f.domain.dim} vs {f.codomain.dim}",
                rank=f.matrix.rank(),
            ) from None
        raise NotInvertible(
            f"{f!r}: {exc}", rank=exc.rank, kernel_vector=exc.kernel_vector
        ) from None
    return LinearMap(f.codomain, f.domain, inv)


def intersect(subspaces, name: str = "") -> Subspace:
    """Set-theoretic intersection, via the kernel of stacked complements."""
    subspaces = list(subspaces)
    if not subspaces:
        raise AmbientMismatch("intersection of an empty family")
    ambient = subspaces[0].ambient
    if any(s.ambient is not ambient for s in subspaces):
        raise AmbientMismatch("subspaces live in different ambients")
    ident = Matrix.identity(ambient.field, ambient.dim)
    blocks = []
    for s in subspaces:
        proj_onto = (s.inclusion @ s.retraction).matrix
        blocks.append(proj_onto - ident)
    stacked = Matrix.stack_rows(blocks)
    basis = stacked.kernel_basis()
    return Subspace.from_spanning(ambient, basis, name or "intersection")


def tensor_space(spaces, name: str = "") -> Space:
    """Plain k-tensor product space with product labels."""
    spaces = list(spaces)
    field = spaces[0].field
    dim = 1
    for s in spaces:
        if s.field is not field:
            raise ShapeMismatch("tensor factors over different fields")
        dim *= s.dim
    labels = []
    for combo in itertools.product(*[s.labels for s in spaces]):
        labels.append("|".join(combo))
    return Space(field, dim, name or "(" + "*".join(s.name for s in spaces) + ")", labels)
