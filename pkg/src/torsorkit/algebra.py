"""Finite-dimensional algebras, bimodules and balanced tensor products.

The balanced tensor product M1 (x)_R1 M2 (x)_R2 ... Mn is realised once as a
``TensorChain``: the quotient of the full k-tensor ambient by all balancing
relations.  Chains are built left-associated (each step quotients only by the
newest link, which keeps intermediate dimensions small) and cached, so the
same factor/action data always yields the identical carrier -- rebracketing
never produces two different spaces.  Every map the engine defines on
representatives goes through ``induce``, which checks that the raw map kills
the relation span before descending it to the carrier.
"""

from __future__ import annotations

import itertools
import threading

from .errors import (
    ActionMismatch,
    NotAssociative,
    NotFree,
    NotHomomorphism,
    NotUnital,
    NotWellDefined,
    ShapeMismatch,
)
from .linalg import Matrix
from .spaces import LinearMap, Space, Subspace, kernel, quotient, tensor_space


class Algebra:
    """Structure-constant algebra with unit, validated at construction."""

    def __init__(self, space: Space, mult: LinearMap, unit, name: str = "", check: bool = True):
        self.space = space
        self.field = space.field
        if mult.codomain is not space:
            raise ShapeMismatch("multiplication must land in the algebra space")
        if mult.domain.dim != space.dim * space.dim:
            raise ShapeMismatch("multiplication domain is not the square tensor")
        self.mult = mult
        self.unit = tuple(unit)
        if len(self.unit) != space.dim:
            raise ShapeMismatch("unit vector has wrong length")
        self.name = name or space.name
        if check:
            self._validate()

    @property
    def dim(self):
        return self.space.dim

    def __repr__(self):
        return f"Algebra({self.name}, dim={self.dim})"

    def product_vec(self, u, v):
        n = self.dim
        f = self.field
        iz, mul = f.is_zero, f.mul
        acc = [f.zero] * n
        rows = self.mult.matrix.rows
        for i, a in enumerate(u):
            if iz(a):
                continue
            base = i * n
            for j, b in enumerate(v):
                if iz(b):
                    continue
                c = mul(a, b)
                col = base + j
                for k in range(n):
                    x = rows[k][col]
                    if not iz(x):
                        acc[k] = f.add(acc[k], mul(c, x))
        return tuple(acc)

    def _validate(self):
        n = self.dim
        f = self.field
        e = [self.space.basis_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                ij = self.product_vec(e[i], e[j])
                for k in range(n):
                    left = self.product_vec(ij, e[k])
                    right = self.product_vec(e[i], self.product_vec(e[j], e[k]))
                    if left != right:
                        raise NotAssociative(i, j, k)
        for i in range(n):
            if self.product_vec(self.unit, e[i]) != e[i]:
                raise NotUnital(i, side="left")
            if self.product_vec(e[i], self.unit) != e[i]:
                raise NotUnital(i, side="right")

    def unit_map(self) -> LinearMap:
        one = Space(self.field, 1, "k")
        return LinearMap.from_columns(one, self.space, [self.unit])

    def left_mult_map(self, vec) -> LinearMap:
        """Left multiplication by a fixed element, as a map on the space."""
        cols = [self.product_vec(vec, self.space.basis_vector(j)) for j in range(self.dim)]
        return LinearMap.from_columns(self.space, self.space, cols)

    def right_mult_map(self, vec) -> LinearMap:
        cols = [self.product_vec(self.space.basis_vector(j), vec) for j in range(self.dim)]
        return LinearMap.from_columns(self.space, self.space, cols)

    def is_commutative(self):
        n = self.dim
        e = [self.space.basis_vector(i) for i in range(n)]
        return all(
            self.product_vec(e[i], e[j]) == self.product_vec(e[j], e[i])
            for i in range(n)
            for j in range(i + 1, n)
        )


def make_algebra(field, dim, structure_constants, unit, name="", labels=None) -> Algebra:
    """Algebra from sparse structure constants [(i, j, k, value), ...]."""
    space = Space(field, dim, name, labels)
    tensor = tensor_space([space, space])
    cols = [[field.zero] * dim for _ in range(dim * dim)]
    for (i, j, k, v) in structure_constants:
        if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
            raise ShapeMismatch(f"structure constant index ({i},{j},{k}) out of range")
        cols[i * dim + j][k] = field.add(cols[i * dim + j][k], field.parse(v))
    mult = LinearMap.from_columns(tensor, space, cols)
    return Algebra(space, mult, [field.parse(x) for x in unit], name)


def algebra_from_table(field, dim, table, unit, name="", labels=None) -> Algebra:
    """Algebra from a dense table: table[i][j] = coefficient vector of ei*ej."""
    sc = []
    for i in range(dim):
        for j in range(dim):
            for k, v in enumerate(table[i][j]):
                val = field.parse(v)
                if not field.is_zero(val):
                    sc.append((i, j, k, val))
    return make_algebra(field, dim, sc, unit, name, labels)


def opposite(A: Algebra) -> Algebra:
    """The opposite algebra on the same underlying space."""
    space = Space(A.field, A.dim, A.name + "^op", A.space.labels)
    n = A.dim
    cols = []
    for i in range(n):
        for j in range(n):
            cols.append(A.product_vec(A.space.basis_vector(j), A.space.basis_vector(i)))
    tensor = tensor_space([space, space])
    mult = LinearMap.from_columns(tensor, space, cols)
    return Algebra(space, mult, A.unit, A.name + "^op")


def enveloping(B: Algebra) -> Algebra:
    """B (x)_k B^op with product (b (x) b')(c (x) c') = bc (x) c'b'."""
    n = B.dim
    f = B.field
    e = [B.space.basis_vector(i) for i in range(n)]
    dim = n * n
    labels = [f"{a}(x){b}" for a in B.space.labels for b in B.space.labels]
    sc = []
    for i1, i2 in itertools.product(range(n), repeat=2):
        for j1, j2 in itertools.product(range(n), repeat=2):
            left = B.product_vec(e[i1], e[j1])
            right = B.product_vec(e[j2], e[i2])
            for k1, a in enumerate(left):
                if f.is_zero(a):
                    continue
                for k2, b in enumerate(right):
                    if f.is_zero(b):
                        continue
                    sc.append((i1 * n + i2, j1 * n + j2, k1 * n + k2, f.mul(a, b)))
    unit = [f.zero] * dim
    for k1, a in enumerate(B.unit):
        for k2, b in enumerate(B.unit):
            v = f.mul(a, b)
            if not f.is_zero(v):
                unit[k1 * n + k2] = v
    return make_algebra(f, dim, sc, unit, B.name + "^e", labels)


class AlgebraMap:
    """A validated (anti-)homomorphism of algebras."""

    def __init__(self, source: Algebra, target: Algebra, map: LinearMap,
                 anti: bool = False, check: bool = True):
        if map.domain is not source.space or map.codomain is not target.space:
            raise ShapeMismatch("algebra map has wrong underlying spaces")
        self.source = source
        self.target = target
        self.map = map
        self.anti = anti
        if check:
            self._validate()

    def _validate(self):
        src, tgt = self.source, self.target
        if self.map.apply(src.unit) != tgt.unit:
            raise NotHomomorphism(f"{self!r} does not preserve the unit")
        n = src.dim
        e = [src.space.basis_vector(i) for i in range(n)]
        for i in range(n):
            fi = self.map.apply(e[i])
            for j in range(n):
                fj = self.map.apply(e[j])
                lhs = self.map.apply(src.product_vec(e[i], e[j]))
                rhs = tgt.product_vec(fj, fi) if self.anti else tgt.product_vec(fi, fj)
                if lhs != rhs:
                    kind = "anti-multiplication" if self.anti else "multiplication"
                    raise NotHomomorphism(
                        f"{self!r} does not preserve {kind} on basis pair ({i}, {j})"
                    )

    def is_injective(self):
        return self.map.rank() == self.source.dim

    def __repr__(self):
        arrow = "-/->" if self.anti else "->"
        return f"AlgebraMap({self.source.name} {arrow} {self.target.name})"


class Bimodule:
    """An L-R bimodule with explicit action matrices.

    ``lact: L (x) M -> M`` and ``ract: M (x) R -> M`` are stored as full
    matrices on k-tensor ambients so induced maps stay uniform.
    """

    def __init__(self, space: Space, left: Algebra, right: Algebra,
                 lact: LinearMap, ract: LinearMap, check: bool = True):
        self.space = space
        self.left = left
        self.right = right
        if lact.codomain is not space or ract.codomain is not space:
            raise ShapeMismatch("actions must land in the module space")
        if lact.domain.dim != left.dim * space.dim:
            raise ShapeMismatch("left action domain has wrong dimension")
        if ract.domain.dim != space.dim * right.dim:
            raise ShapeMismatch("right action domain has wrong dimension")
        self.lact = lact
        self.ract = ract
        if check:
            self._validate()

    @property
    def dim(self):
        return self.space.dim

    @property
    def field(self):
        return self.space.field

    def lact_vec(self, a, m):
        return _pair_apply(self.lact, self.left.dim, self.space.dim, a, m)

    def ract_vec(self, m, a):
        return _pair_apply(self.ract, self.space.dim, self.right.dim, m, a)

    def _validate(self):
        L, R, f = self.left, self.right, self.field
        e = [self.space.basis_vector(i) for i in range(self.dim)]
        eL = [L.space.basis_vector(i) for i in range(L.dim)]
        eR = [R.space.basis_vector(i) for i in range(R.dim)]
        for m in e:
            if self.lact_vec(L.unit, m) != m or self.ract_vec(m, R.unit) != m:
                raise ActionMismatch(f"actions on {self.space.name} are not unital")
        for a in eL:
            for b in eL:
                ab = L.product_vec(a, b)
                for m in e:
                    if self.lact_vec(ab, m) != self.lact_vec(a, self.lact_vec(b, m)):
                        raise ActionMismatch("left action is not associative")
        for a in eR:
            for b in eR:
                ab = R.product_vec(a, b)
                for m in e:
                    if self.ract_vec(m, ab) != self.ract_vec(self.ract_vec(m, a), b):
                        raise ActionMismatch("right action is not associative")
        for a in eL:
            for b in eR:
                for m in e:
                    if self.ract_vec(self.lact_vec(a, m), b) != self.lact_vec(a, self.ract_vec(m, b)):
                        raise ActionMismatch("left and right actions do not commute")

    def __repr__(self):
        return f"Bimodule({self.left.name}-{self.space.name}-{self.right.name})"


def _pair_apply(act: LinearMap, d1, d2, u, v):
    f = act.codomain.field
    iz = f.is_zero
    vec = [f.zero] * (d1 * d2)
    for i, a in enumerate(u):
        if iz(a):
            continue
        for j, b in enumerate(v):
            if not iz(b):
                vec[i * d2 + j] = f.mul(a, b)
    return act.apply(tuple(vec))


def regular_bimodule(T: Algebra, left: AlgebraMap | None = None,
                     right: AlgebraMap | None = None, check: bool = True) -> Bimodule:
    """T as a bimodule over subalgebra images: actions via unit maps.

    ``left``/``right`` default to T acting on itself by multiplication.
    """
    f = T.field
    L = left.source if left else T
    R = right.source if right else T
    n = T.dim
    lcols = []
    for i in range(L.dim):
        ai = left.map.apply(L.space.basis_vector(i)) if left else L.space.basis_vector(i)
        lm = T.left_mult_map(ai)
        for j in range(n):
            lcols.append(lm.apply(T.space.basis_vector(j)))
    lact = LinearMap.from_columns(tensor_space([L.space, T.space]), T.space, lcols)
    rcols = []
    rmaps = []
    for i in range(R.dim):
        bi = right.map.apply(R.space.basis_vector(i)) if right else R.space.basis_vector(i)
        rmaps.append(T.right_mult_map(bi))
    for j in range(n):
        ej = T.space.basis_vector(j)
        for i in range(R.dim):
            rcols.append(rmaps[i].apply(ej))
    ract = LinearMap.from_columns(tensor_space([T.space, R.space]), T.space, rcols)
    return Bimodule(T.space, L, R, lact, ract, check=check)


def sub_bimodule(sub: Subspace, outer: Bimodule, err=ActionMismatch, check: bool = False) -> Bimodule:
    """Restrict a bimodule structure to a stable subspace.

    Raises ``err`` when an action does not preserve the subspace.
    """
    if sub.ambient is not outer.space:
        raise ShapeMismatch("subspace does not live in the bimodule space")
    field = sub.ambient.field
    L, R = outer.left, outer.right
    lcols = []
    for i in range(L.dim):
        a = L.space.basis_vector(i)
        for j in range(sub.dim):
            v = outer.lact_vec(a, sub.inclusion.matrix.col(j))
            if not sub.contains_vector(v):
                raise err(f"left action by {L.space.labels[i]} leaves the subspace")
            lcols.append(sub.retraction.apply(v))
    lact = LinearMap.from_columns(tensor_space([L.space, sub.space]), sub.space, lcols)
    rcols = []
    for j in range(sub.dim):
        w = sub.inclusion.matrix.col(j)
        for i in range(R.dim):
            a = R.space.basis_vector(i)
            v = outer.ract_vec(w, a)
            if not sub.contains_vector(v):
                raise err(f"right action by {R.space.labels[i]} leaves the subspace")
            rcols.append(sub.retraction.apply(v))
    ract = LinearMap.from_columns(tensor_space([sub.space, R.space]), sub.space, rcols)
    return Bimodule(sub.space, L, R, lact, ract, check=check)


def corestrict_through(j: LinearMap, f: LinearMap, err, msg: str) -> LinearMap:
    """Solve j o g = f for g; ``j`` must be injective.

    Failure means the image of ``f`` does not lie in the image of ``j``; the
    error raised is the mathematical verdict supplied by the caller.
    """
    if j.codomain is not f.codomain:
        raise ShapeMismatch("corestriction target mismatch")
    X = j.matrix.solve(f.matrix)
    if X is None or j.matrix @ X != f.matrix:
        raise err(msg)
    return LinearMap(f.domain, j.domain, X)


class Link:
    """Balancing relation between factor positions i < j of a chain.

    ``act_i: S_i (x) R -> S_i`` plays the right-action role and
    ``act_j: R (x) S_j -> S_j`` the left-action role; the relation span is
    generated by (x.r)_i - (r.x)_j over ring basis elements r.
    """

    __slots__ = ("i", "j", "ring", "act_i", "act_j")

    def __init__(self, i, j, ring: Algebra, act_i: LinearMap, act_j: LinearMap):
        if not i < j:
            raise ShapeMismatch("link positions must satisfy i < j")
        self.i, self.j, self.ring = i, j, ring
        self.act_i, self.act_j = act_i, act_j

    def key(self):
        return (self.i, self.j, self.ring.space.uid, self.act_i.matrix, self.act_j.matrix)


class TensorChain:
    """Canonical flat realisation of an iterated balanced tensor product."""

    def __init__(self, factor_spaces, links, carrier, proj, sect, relations):
        self.factor_spaces = tuple(factor_spaces)
        self.links = tuple(links)
        self.carrier = carrier
        self.proj = proj          # ambient -> carrier
        self.sect = sect          # carrier -> ambient
        self.relations = relations  # Subspace of ambient, = kernel(proj)
        self.ambient = proj.domain

    @property
    def dim(self):
        return self.carrier.dim

    def __repr__(self):
        return f"TensorChain({'*'.join(s.name for s in self.factor_spaces)}, dim={self.dim})"


_chain_cache: dict = {}
_chain_lock = threading.Lock()


def _leg_map(field, factor_spaces, pos, m: Matrix) -> Matrix:
    """id (x) ... (x) m (x) ... (x) id on the full k-ambient (matrix level)."""
    left = 1
    for s in factor_spaces[:pos]:
        left *= s.dim
    right = 1
    for s in factor_spaces[pos + 1:]:
        right *= s.dim
    out = Matrix.identity(field, left)
    out = out.kron(m)
    out = out.kron(Matrix.identity(field, right))
    return out


def _link_relation_columns(field, factor_spaces, link: Link):
    """Relation generators of one link, as columns over the full ambient."""
    dims = [s.dim for s in factor_spaces]
    total = 1
    for d in dims:
        total *= d
    cols = []
    ring = link.ring
    for r_idx in range(ring.dim):
        r = ring.space.basis_vector(r_idx)
        # matrix acting on factor i: x -> x.r
        mi_cols = [link.act_i.apply(_outer(field, factor_spaces[link.i].basis_vector(t), r))
                   for t in range(dims[link.i])]
        mi = Matrix.from_cols(field, mi_cols, dims[link.i])
        mj_cols = [link.act_j.apply(_outer(field, r, factor_spaces[link.j].basis_vector(t)))
                   for t in range(dims[link.j])]
        mj = Matrix.from_cols(field, mj_cols, dims[link.j])
        gi = _leg_map(field, factor_spaces, link.i, mi)
        gj = _leg_map(field, factor_spaces, link.j, mj)
        diff = gi - gj
        for j in range(total):
            c = diff.col(j)
            if any(not field.is_zero(x) for x in c):
                cols.append(c)
    return cols


def _outer(field, u, v):
    iz, mul = field.is_zero, field.mul
    out = [field.zero] * (len(u) * len(v))
    for i, a in enumerate(u):
        if iz(a):
            continue
        base = i * len(v)
        for j, b in enumerate(v):
            if not iz(b):
                out[base + j] = mul(a, b)
    return tuple(out)


def tensor_chain(factors, rings, extra_links=(), name="") -> TensorChain:
    """Balanced tensor of bimodule factors over the given rings.

    ``factors`` is a list of Bimodules, ``rings`` the list of middle algebras
    (adjacent links use factor i's right action and factor i+1's left
    action).  ``extra_links`` adds non-adjacent balancing relations.  Results
    are cached by factor spaces and action matrices, so equal data yields
    the identical carrier object.
    """
    factors = list(factors)
    rings = list(rings)
    if len(rings) != len(factors) - 1:
        raise ShapeMismatch("need exactly one ring slot between consecutive factors")
    links = []
    for idx, ring in enumerate(rings):
        if ring is None:
            continue
        M, N = factors[idx], factors[idx + 1]
        if M.right is not ring or N.left is not ring:
            raise ActionMismatch(
                f"factor actions do not match ring {ring.name} at position {idx}"
            )
        links.append(Link(idx, idx + 1, ring, M.ract, N.lact))
    links.extend(extra_links)
    spaces = [m.space for m in factors]
    key = (tuple(s.uid for s in spaces), tuple(sorted(l.key() for l in links)))
    with _chain_lock:
        hit = _chain_cache.get(key)
    if hit is not None:
        return hit
    chain = _build_chain(spaces, links, name)
    with _chain_lock:
        _chain_cache.setdefault(key, chain)
        chain = _chain_cache[key]
    return chain


def chain_of_spaces(spaces, links, name="") -> TensorChain:
    """Like tensor_chain but with explicit spaces and links."""
    key = (tuple(s.uid for s in spaces), tuple(sorted(l.key() for l in links)))
    with _chain_lock:
        hit = _chain_cache.get(key)
    if hit is not None:
        return hit
    chain = _build_chain(list(spaces), list(links), name)
    with _chain_lock:
        _chain_cache.setdefault(key, chain)
        chain = _chain_cache[key]
    return chain


def _build_chain(spaces, links, name="") -> TensorChain:
    field = spaces[0].field
    if len(spaces) == 1 and not links:
        s = spaces[0]
        amb = tensor_space(spaces)
        ident = Matrix.identity(field, s.dim)
        pj = LinearMap(amb, s, ident)
        st = LinearMap(s, amb, ident)
        return TensorChain(spaces, (), s, pj, st,
                           Subspace.from_spanning(amb, []))
    ambient = tensor_space(spaces, name and name + "#amb")
    # a link over a one-dimensional ring has zero relation span (the unital
    # action by the lone basis vector is a scalar on both sides)
    if all(l.ring.dim == 1 for l in links):
        carrier = Space(field, ambient.dim,
                        name or "(x)".join(s.name for s in spaces),
                        ambient.labels)
        ident = Matrix.identity(field, ambient.dim)
        pj = LinearMap(ambient, carrier, ident)
        st = LinearMap(carrier, ambient, ident)
        return TensorChain(spaces, links, carrier, pj, st,
                           Subspace.from_spanning(ambient, []))
    n = len(spaces)
    adjacent = {l.i: l for l in links if l.j == l.i + 1}
    nonadjacent = [l for l in links if l.j != l.i + 1]
    if len(adjacent) + len(nonadjacent) != len(links):
        raise ShapeMismatch("duplicate adjacent links")

    # left-associated fold over adjacent links
    carrier = spaces[0]
    full_proj = LinearMap.identity(spaces[0])
    full_sect = LinearMap.identity(spaces[0])
    amb_so_far = spaces[0]
    for pos in range(1, n):
        s = spaces[pos]
        amb_next = tensor_space([amb_so_far, s])
        step_amb = tensor_space([carrier, s])
        pre = full_proj.matrix.kron(Matrix.identity(field, s.dim))
        pre_map = LinearMap(amb_next, step_amb, pre)
        link = adjacent.get(pos - 1)
        if link is None:
            carrier_next, step_proj, step_sect = step_amb, LinearMap.identity(step_amb), LinearMap.identity(step_amb)
        else:
            ring = link.ring
            # lift act_i through the current carrier (acts on the last factor)
            lifted_cols = []
            for r_idx in range(ring.dim):
                r = ring.space.basis_vector(r_idx)
                mi_cols = [link.act_i.apply(_outer(field, spaces[pos - 1].basis_vector(t), r))
                           for t in range(spaces[pos - 1].dim)]
                mi = Matrix.from_cols(field, mi_cols, spaces[pos - 1].dim)
                lifted = full_proj.matrix @ _leg_map(field, spaces[:pos], pos - 1, mi) @ full_sect.matrix
                mj_cols = [link.act_j.apply(_outer(field, r, s.basis_vector(t)))
                           for t in range(s.dim)]
                mj = Matrix.from_cols(field, mj_cols, s.dim)
                gen = lifted.kron(Matrix.identity(field, s.dim)) - Matrix.identity(field, carrier.dim).kron(mj)
                for j in range(step_amb.dim):
                    c = gen.col(j)
                    if any(not field.is_zero(x) for x in c):
                        lifted_cols.append(c)
            rel = Subspace.from_spanning(step_amb, lifted_cols)
            carrier_next, step_proj, step_sect = quotient(step_amb, rel)
        full_proj = step_proj @ pre_map
        full_sect = LinearMap(carrier_next, amb_next,
                              full_sect.matrix.kron(Matrix.identity(field, s.dim)) @ step_sect.matrix)
        carrier = carrier_next
        amb_so_far = amb_next
    full_proj = full_proj.rebase(ambient)
    full_sect = full_sect.retarget(ambient)

    # non-adjacent links: quotient the carrier once more
    if nonadjacent:
        gen_cols = []
        for link in nonadjacent:
            for c in _link_relation_columns(field, spaces, link):
                v = full_proj.apply(c)
                if any(not field.is_zero(x) for x in v):
                    gen_cols.append(v)
        rel = Subspace.from_spanning(carrier, gen_cols)
        carrier2, extra_proj, extra_sect = quotient(carrier, rel)
        full_proj = extra_proj @ full_proj
        full_sect = full_sect @ extra_sect
        carrier = carrier2

    carrier_named = Space(field, carrier.dim,
                          name or "(x)".join(s.name for s in spaces), carrier.labels)
    full_proj = full_proj.retarget(carrier_named)
    full_sect = full_sect.rebase(carrier_named)
    relations = kernel(full_proj)
    assert (full_proj @ full_sect).is_identity()
    return TensorChain(spaces, links, carrier_named, full_proj, full_sect, relations)


def single_chain(space: Space) -> TensorChain:
    """A one-factor chain: carrier is the space itself."""
    return chain_of_spaces([space], [])


def induce(dom: TensorChain, raw: LinearMap, name: str = "") -> LinearMap:
    """Descend a raw map on the ambient to the carrier.

    ``raw`` must kill the balancing relations; the failure witness is a
    relation vector with nonzero image.
    """
    if raw.domain is not dom.ambient:
        raise ShapeMismatch("raw map is not defined on the chain ambient")
    rel = dom.relations
    if rel.dim:
        img = raw @ rel.inclusion
        if not img.is_zero():
            bad = next(
                j for j in range(rel.dim)
                if any(not raw.domain.field.is_zero(x) for x in img.matrix.col(j))
            )
            raise NotWellDefined(
                f"{name or 'map'} is not balanced on {dom!r}",
                witness=rel.inclusion.matrix.col(bad),
            )
    return raw @ dom.sect


def chain_map(dom: TensorChain, blocks, cod: TensorChain, name: str = "") -> LinearMap:
    """Assemble a carrier-level map from per-run block maps.

    ``blocks`` is a list of (dom_run_len, block, cod_run_len); ``block``
    maps the carrier of the dom sub-chain onto the carrier of the cod
    sub-chain (None = identity on a single shared factor).  Balance across
    block boundaries is verified by ``induce``.
    """
    field = dom.ambient.field
    di = ci = 0
    mat = None
    for (dlen, block, clen) in blocks:
        dom_run = _subchain(dom, di, di + dlen)
        cod_run = _subchain(cod, ci, ci + clen)
        if block is None:
            if dom_run.carrier.dim != cod_run.carrier.dim:
                raise ShapeMismatch("identity block between different dims")
            piece = cod_run.sect.matrix @ dom_run.proj.matrix
        else:
            if block.domain is not dom_run.carrier:
                raise ShapeMismatch(
                    f"block domain {block.domain.name} is not the run carrier {dom_run.carrier.name}"
                )
            if block.codomain is not cod_run.carrier:
                raise ShapeMismatch(
                    f"block codomain {block.codomain.name} is not the run carrier {cod_run.carrier.name}"
                )
            piece = cod_run.sect.matrix @ block.matrix @ dom_run.proj.matrix
        mat = piece if mat is None else mat.kron(piece)
        di += dlen
        ci += clen
    if di != len(dom.factor_spaces) or ci != len(cod.factor_spaces):
        raise ShapeMismatch("blocks do not cover the chains")
    raw = LinearMap(dom.ambient, cod.ambient, mat)
    return induce(dom, cod.proj @ raw, name)


def _subchain(chain: TensorChain, a: int, b: int) -> TensorChain:
    spaces = chain.factor_spaces[a:b]
    links = []
    for l in chain.links:
        if a <= l.i and l.j < b:
            links.append(Link(l.i - a, l.j - a, l.ring, l.act_i, l.act_j))
    return chain_of_spaces(spaces, links)


class TensorSpace:
    """Binary balanced tensor M (x)_R N with outer bimodule structure."""

    def __init__(self, left: Bimodule, right: Bimodule, over: Algebra,
                 chain: TensorChain, outer: Bimodule):
        self.left = left
        self.right = right
        self.over = over
        self.chain = chain
        self.carrier = chain.carrier
        self.outer = outer
        # binary-level proj/sect (one level of pairing)
        field = self.carrier.field
        pair = tensor_space([left.space, right.space])
        self.proj = LinearMap(pair, self.carrier, chain.proj.matrix) \
            if pair.dim == chain.ambient.dim and len(chain.factor_spaces) == 2 \
            else self._binary_proj(pair)
        self.sect = LinearMap(self.carrier, pair, chain.sect.matrix) \
            if pair.dim == chain.ambient.dim and len(chain.factor_spaces) == 2 \
            else self._binary_sect(pair)

    def _binary_proj(self, pair):
        lexp = _expansion(self.left)
        rexp = _expansion(self.right)
        return self.chain.proj @ LinearMap(pair, self.chain.ambient, lexp.kron(rexp))

    def _binary_sect(self, pair):
        lcon = _contraction(self.left)
        rcon = _contraction(self.right)
        return LinearMap(self.chain.ambient, pair, lcon.kron(rcon)) @ self.chain.sect

    @property
    def dim(self):
        return self.carrier.dim


# keyed by object id; each entry retains the bimodule itself so the id can
# never be recycled onto an unrelated object
_chain_outer_registry: dict[int, tuple[Bimodule, TensorChain, list]] = {}


def _expansion(m: Bimodule) -> Matrix:
    entry = _chain_outer_registry.get(id(m))
    if entry is None or entry[0] is not m:
        return Matrix.identity(m.field, m.dim)
    return entry[1].sect.matrix


def _contraction(m: Bimodule) -> Matrix:
    entry = _chain_outer_registry.get(id(m))
    if entry is None or entry[0] is not m:
        return Matrix.identity(m.field, m.dim)
    return entry[1].proj.matrix


def chain_outer_bimodule(chain: TensorChain, left_factor: Bimodule,
                         right_factor: Bimodule, factors=None, check: bool = False) -> Bimodule:
    """Outer bimodule structure on a chain carrier, from the edge factors."""
    field = chain.carrier.field
    L, R = left_factor.left, right_factor.right
    lcols = []
    for i in range(L.dim):
        a = L.space.basis_vector(i)
        m = _fixed_left_act(left_factor, a)
        lifted = chain.proj @ LinearMap(
            chain.ambient, chain.ambient,
            _leg_map(field, chain.factor_spaces, 0, m.matrix)) @ chain.sect
        lcols.append(lifted)
    lact = _assemble_action_left(L, chain.carrier, lcols)
    rcols = []
    n = len(chain.factor_spaces)
    for i in range(R.dim):
        a = R.space.basis_vector(i)
        m = _fixed_right_act(right_factor, a)
        lifted = chain.proj @ LinearMap(
            chain.ambient, chain.ambient,
            _leg_map(field, chain.factor_spaces, n - 1, m.matrix)) @ chain.sect
        rcols.append(lifted)
    ract = _assemble_action_right(R, chain.carrier, rcols)
    bm = Bimodule(chain.carrier, L, R, lact, ract, check=check)
    _chain_outer_registry[id(bm)] = (bm, chain, factors)
    return bm


def _fixed_left_act(m: Bimodule, a) -> LinearMap:
    cols = [m.lact_vec(a, m.space.basis_vector(j)) for j in range(m.dim)]
    return LinearMap.from_columns(m.space, m.space, cols)


def _fixed_right_act(m: Bimodule, a) -> LinearMap:
    cols = [m.ract_vec(m.space.basis_vector(j), a) for j in range(m.dim)]
    return LinearMap.from_columns(m.space, m.space, cols)


def _assemble_action_left(L: Algebra, space: Space, per_basis_maps) -> LinearMap:
    amb = tensor_space([L.space, space])
    cols = []
    for i in range(L.dim):
        mat = per_basis_maps[i].matrix
        for j in range(space.dim):
            cols.append(mat.col(j))
    return LinearMap.from_columns(amb, space, cols)


def _assemble_action_right(R: Algebra, space: Space, per_basis_maps) -> LinearMap:
    amb = tensor_space([space, R.space])
    mats = [m.matrix for m in per_basis_maps]
    cols = []
    for j in range(space.dim):
        for i in range(R.dim):
            cols.append(mats[i].col(j))
    return LinearMap.from_columns(amb, space, cols)


def balanced_tensor(M: Bimodule, R: Algebra, N: Bimodule, name: str = "") -> TensorSpace:
    """M (x)_R N as a TensorSpace; nested chain carriers are flattened."""
    if M.right is not R or N.left is not R:
        raise ActionMismatch("middle algebra does not match the factor actions")
    lfacts = _unfold(M)
    rfacts = _unfold(N)
    factors = lfacts + rfacts
    rings = []
    for a, b in zip(factors, factors[1:]):
        rings.append(a.right)
    chain = tensor_chain(factors, rings, name=name)
    outer = chain_outer_bimodule(chain, factors[0], factors[-1], factors)
    ts = TensorSpace(M, N, R, chain, outer)
    # TensorSpace invariant: relations regenerated in a second enumeration
    # order must span the same subspace.
    _verify_relation_span(ts)
    return ts


def _unfold(m: Bimodule):
    entry = _chain_outer_registry.get(id(m))
    if entry is not None and entry[0] is m and entry[2] is not None:
        return list(entry[2])
    return [m]


def _verify_relation_span(ts: TensorSpace):
    """Regenerate the relation span in reverse enumeration order and compare.

    For large ambients the rank of the regenerated family is certified with
    a sparse modular lower bound instead of a dense second elimination.
    """
    chain = ts.chain
    field = chain.ambient.field
    cols = []
    for link in reversed(chain.links):
        cols.extend(reversed(_link_relation_columns(field, chain.factor_spaces, link)))
    target = chain.relations.dim
    if not cols:
        if target != 0:
            raise NotWellDefined("relation span disagrees between enumeration orders")
        return
    gen = Matrix(field, cols, chain.ambient.dim)
    # containment: every regenerated relation dies under proj
    if not (chain.proj.matrix @ gen.transpose()).is_zero():
        raise NotWellDefined("regenerated relation escapes the relation span")
    if chain.ambient.dim <= 100:
        regenerated = Subspace.from_spanning(chain.ambient, cols)
        if regenerated != chain.relations:
            raise NotWellDefined("relation span disagrees between enumeration orders")
    else:
        from .fields import PrimeField
        from .linalg import sparse_rank_lower_bound

        primes = [field.p] if isinstance(field, PrimeField) else [101, 32003]
        ok = False
        for p in primes:
            try:
                if sparse_rank_lower_bound(gen, p, stop_at=target) >= target:
                    ok = True
                    break
            except ValueError:
                continue
        if not ok:
            regenerated = Subspace.from_spanning(chain.ambient, cols)
            ok = regenerated == chain.relations
        if not ok:
            raise NotWellDefined("relation span disagrees between enumeration orders")
    if ts.carrier.dim != chain.ambient.dim - target:
        raise NotWellDefined("carrier dimension violates rank formula")


def induce_map(raw: LinearMap, dom: TensorSpace, cod: Space | None = None) -> LinearMap:
    """Public form of ``induce`` on a binary TensorSpace: raw is defined on
    the one-level pair ambient ``left.space (x) right.space``."""
    if raw.domain.dim != dom.left.dim * dom.right.dim:
        raise ShapeMismatch("raw map is not defined on the pair ambient")
    composed = raw.rebase(dom.sect.codomain) @ dom.sect
    # well-definedness: raw must kill ker(proj) at the pair level
    ker_pair = kernel(dom.proj)
    if ker_pair.dim:
        img = raw.rebase(ker_pair.ambient) @ ker_pair.inclusion
        if not img.is_zero():
            f = raw.domain.field
            bad = next(
                j for j in range(ker_pair.dim)
                if any(not f.is_zero(x) for x in img.matrix.col(j))
            )
            raise NotWellDefined(
                "map does not factor through the balanced tensor",
                witness=ker_pair.inclusion.matrix.col(bad),
            )
    return composed


class FreenessCertificate:
    """Witness that a one-sided module is free of the forced rank."""

    def __init__(self, module: Bimodule, side: str, rank: int, iso: LinearMap, generators):
        self.module = module
        self.side = side
        self.rank = rank
        self.iso = iso
        self.generators = generators

    def __repr__(self):
        return f"FreenessCertificate({self.module.space.name}, {self.side}, rank={self.rank})"


def certify_free(M: Bimodule, side: str) -> FreenessCertificate:
    """Certify M free as a one-sided module, solving for an explicit iso.

    Generators are searched deterministically among basis vectors, running
    sums and pairwise sums; NotFree means no certificate was found (which
    does not decide faithful flatness).
    """
    if side not in ("left", "right"):
        raise ShapeMismatch("side must be 'left' or 'right'")
    alg = M.left if side == "left" else M.right
    if alg.dim == 0 or M.dim % alg.dim != 0:
        raise NotFree(f"dim {M.dim} not a multiple of dim {alg.dim}")
    rank = M.dim // alg.dim
    field = M.field
    basis = [M.space.basis_vector(i) for i in range(M.dim)]
    candidates = list(basis)
    run = None
    for v in basis:
        run = v if run is None else tuple(field.add(a, b) for a, b in zip(run, v))
        candidates.append(run)
    for i in range(min(M.dim, 6)):
        for j in range(i + 1, min(M.dim, 6)):
            candidates.append(tuple(field.add(a, b) for a, b in zip(basis[i], basis[j])))

    def orbit_cols(v):
        cols = []
        for r in range(alg.dim):
            a = alg.space.basis_vector(r)
            cols.append(M.lact_vec(a, v) if side == "left" else M.ract_vec(v, a))
        return cols

    chosen = []
    span_rows: list = []
    span_rank = 0
    for v in candidates:
        if len(chosen) == rank:
            break
        cols = orbit_cols(v)
        test = Matrix(field, span_rows + cols, M.dim)
        r = test.rank()
        if r == span_rank + alg.dim:
            chosen.append(v)
            span_rows = [tuple(row) for row in test.row_space_basis()]
            span_rank = r
    if len(chosen) != rank:
        raise NotFree(f"no free generating set of rank {rank} found for {M!r}")
    all_cols = []
    for v in chosen:
        all_cols.extend(orbit_cols(v))
    iso = LinearMap.from_columns(
        Space(field, M.dim, f"{alg.name}^{rank}"), M.space, all_cols
    )
    if iso.rank() != M.dim:
        raise NotFree("assembled module map is not bijective")
    return FreenessCertificate(M, side, rank, iso, chosen)
