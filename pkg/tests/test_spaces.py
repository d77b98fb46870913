from fractions import Fraction as F

import pytest

from torsorkit.errors import AmbientMismatch
from torsorkit.fields import QQ
from torsorkit.linalg import Matrix
from torsorkit.spaces import (
    LinearMap,
    Space,
    Subspace,
    intersect,
    invert,
    kernel,
    quotient,
    tensor_space,
)


def test_kernel_examples():
    v3 = Space(QQ, 3, "V3")
    zero = LinearMap.zero(v3, v3)
    assert kernel(zero).dim == 3
    ident = LinearMap.identity(v3)
    assert kernel(ident).dim == 0
    v2, v1 = Space(QQ, 2, "V2"), Space(QQ, 1, "V1")
    f = LinearMap(v2, v1, Matrix.from_rows(QQ, [[1, 1]]))
    k = kernel(f)
    assert k.dim == 1
    assert k.inclusion.matrix.col(0) == (F(1), F(-1))


def test_quotient_examples():
    v4 = Space(QQ, 4, "V4")
    zero_sub = Subspace.from_spanning(v4, [])
    q, proj, sect = quotient(v4, zero_sub)
    assert q.dim == 4 and (proj @ sect).is_identity()
    full = Subspace.from_spanning(v4, [v4.basis_vector(i) for i in range(4)])
    q2, _, _ = quotient(v4, full)
    assert q2.dim == 0
    line = Subspace.from_spanning(v4, [(F(1), F(1), F(0), F(0))])
    q3, proj3, sect3 = quotient(v4, line)
    assert q3.dim == 3
    assert (proj3 @ sect3).is_identity()
    assert kernel(proj3) == line


def test_intersect_examples():
    v2 = Space(QQ, 2, "V2")
    all2 = Subspace.from_spanning(v2, [v2.basis_vector(0), v2.basis_vector(1)])
    assert intersect([all2, all2]) == all2
    l1 = Subspace.from_spanning(v2, [(F(1), F(0))])
    l2 = Subspace.from_spanning(v2, [(F(1), F(1))])
    assert intersect([l1, l2]).dim == 0
    other = Space(QQ, 2, "W")
    lw = Subspace.from_spanning(other, [(F(1), F(0))])
    with pytest.raises(AmbientMismatch):
        intersect([l1, lw])


def test_subspace_canonical_and_retraction():
    v3 = Space(QQ, 3, "V3")
    s1 = Subspace.from_spanning(v3, [(F(1), F(1), F(0)), (F(0), F(0), F(1))])
    s2 = Subspace.from_spanning(v3, [(F(2), F(2), F(2)), (F(0), F(0), F(5))])
    assert s1 == s2
    assert (s1.retraction @ s1.inclusion).is_identity()
    assert s1.contains_vector((F(3), F(3), F(7)))
    assert not s1.contains_vector((F(1), F(0), F(0)))


def test_invert_is_two_sided():
    v2 = Space(QQ, 2, "V2")
    f = LinearMap(v2, v2, Matrix.from_rows(QQ, [[1, 1], [0, 1]]))
    g = invert(f)
    assert (g @ f).is_identity() and (f @ g).is_identity()


def test_corestrict():
    v3 = Space(QQ, 3, "V3")
    s = Subspace.from_spanning(v3, [(F(1), F(0), F(0))])
    inside = LinearMap(Space(QQ, 1, "L"), v3,
                       Matrix.from_rows(QQ, [[2], [0], [0]]))
    co = s.corestrict(inside)
    assert (s.inclusion @ co).matrix == inside.matrix
    outside = LinearMap(Space(QQ, 1, "L2"), v3,
                        Matrix.from_rows(QQ, [[0], [1], [0]]))
    with pytest.raises(AmbientMismatch):
        s.corestrict(outside)


def test_tensor_space_labels():
    a = Space(QQ, 2, "a", labels=["x", "y"])
    b = Space(QQ, 2, "b", labels=["u", "v"])
    t = tensor_space([a, b])
    assert t.dim == 4
    assert t.labels[1] == "x|v"
