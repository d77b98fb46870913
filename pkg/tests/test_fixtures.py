import pytest

from torsorkit.errors import TorsorKitError, UnknownFixture
from torsorkit.fields import GF, QQ
from torsorkit.fixtures import (
    FIXTURE_NAMES,
    generate,
    group_hopf,
    oracle_check_hopf,
    sweedler_hopf,
)
from torsorkit.linalg import Matrix
from torsorkit.pretorsor import build_corings, validate_pretorsor


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        generate("EX-NOPE")


def test_oracle_validates_hopf_structures():
    for h in (group_hopf(QQ, 2, "c2"), group_hopf(QQ, 4, "c4"),
              sweedler_hopf(QQ)):
        oracle_check_hopf(QQ, h.algebra.mult.matrix, h.algebra.unit,
                          h.delta, h.eps, h.antipode)


def test_oracle_rejects_broken_antipode():
    h = sweedler_hopf(QQ)
    rows = [list(r) for r in h.antipode.rows]
    rows[3][2] = QQ.neg(rows[3][2])
    with pytest.raises(TorsorKitError):
        oracle_check_hopf(QQ, h.algebra.mult.matrix, h.algebra.unit,
                          h.delta, h.eps, Matrix(QQ, rows, 4))


def test_all_fixtures_generate_and_validate():
    for name in FIXTURE_NAMES:
        fx = generate(name)
        assert validate_pretorsor(fx.bundle).ok
        assert fx.oracle_report["dim_C"] >= 1


def test_oracle_dims_match_engine(ex_c2, an_c2):
    pair = an_c2.pair
    assert ex_c2.oracle_report["dim_C"] == pair.C.dim
    assert ex_c2.oracle_report["dim_D"] == pair.D.dim
    assert ex_c2.oracle_report["dim_Tbar"] == an_c2.tbar.dim


def test_q3_cyclic_fixture():
    fx = generate("EX-Q3")
    assert fx.bundle.T.dim == 3
    pair = build_corings(fx.bundle)
    assert pair.C.dim == 3 and pair.D.dim == 3


def test_gf_generation_matches_dims():
    fxq = generate("EX-C2")
    fxp = generate("EX-C2", GF(101))
    assert fxq.oracle_report == fxp.oracle_report


def test_relabelling_changes_nothing():
    # verdicts and dimensions do not depend on basis-label strings
    from torsorkit.fixtures import group_algebra, field_algebra, unit_algebra_map, hopf_torsor_tau, group_hopf
    from torsorkit.pretorsor import make_bundle
    h = group_hopf(QQ, 2, "renamed")
    h.algebra.space.labels = tuple(["apple", "pear"])  # cosmetic only
    kA, kB = field_algebra(QQ), field_algebra(QQ)
    bundle = make_bundle(kA, kB, h.algebra, unit_algebra_map(kA, h.algebra),
                         unit_algebra_map(kB, h.algebra),
                         hopf_torsor_tau(h), "relabel", torsor=True)
    assert validate_pretorsor(bundle).ok
    pair = build_corings(bundle)
    assert pair.C.dim == 2 and pair.D.dim == 2


def test_gf2_smoke():
    # small characteristic smoke: dimensions survive reduction mod 2
    fx = generate("EX-C2", GF(2))
    assert fx.oracle_report["dim_C"] == 2
    assert validate_pretorsor(fx.bundle).ok
    pair = build_corings(fx.bundle)
    assert pair.C.dim == 2 and pair.D.dim == 2
