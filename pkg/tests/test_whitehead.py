import pytest

from conftest import load_fixture
from dglinf.freelie import DegreeCapError, is_lie_dynkin
from dglinf.retract import random_retract, retract_from_decomposition
from dglinf.whitehead import (build_fat_wedge, extend, identity_extension, membership_probe,
                              verify_elprime, verify_elsegundo, verify_main1, whitehead_element)


@pytest.mark.parametrize("spheres", [(2, 2), (3, 4), (2, 2, 2), (3, 3, 3), (2, 3, 4),
                                     (2, 2, 2, 2), (3, 3, 3, 3), (2, 2, 2, 2, 2), (3, 3, 3, 3, 3)])
def test_fat_wedge_models(spheres):
    m = build_fat_wedge(spheres)
    L = m.dgl
    k, N = len(spheres), sum(spheres)
    assert len(L.generators) == 2 ** k - 2
    assert m.omega.degree == N - 2
    assert L.check_d_squared() == []
    assert L.apply_differential(m.omega).is_zero()
    assert is_lie_dynkin(m.omega, L.degrees)


def test_two_sphere_model_omega_is_bracket():
    m = build_fat_wedge([3, 5])
    assert m.omega == m.dgl.bracket(m.dgl.gen("u1"), m.dgl.gen("u2"))


def test_triple_omega():
    m = build_fat_wedge([3, 3, 3])
    L = m.dgl
    assert L.format(m.omega) == "[u1,u23] - [u2,u13] + [u3,u12]"


def test_cap_too_small():
    with pytest.raises(DegreeCapError):
        build_fat_wedge([3, 3, 3], cap=6)


def test_identity_extension_is_chain_map():
    L = load_fixture("t2")
    ext = identity_extension(build_fat_wedge([3, 3, 3]), L)
    assert ext.check_chain_map() == []
    assert whitehead_element(ext) == {0: 1}


def test_product_model_has_vanishing_binary_product():
    L = load_fixture("t1")
    m = build_fat_wedge([3, 3])
    ext, obs = extend(m, L, [L.gen("a"), L.gen("b")])
    assert obs is None
    assert whitehead_element(ext) == {}


def test_obstruction_when_a_lower_product_survives():
    # in the free DGL on a:2, b:3 the class [a,b] is nonzero, so u13 cannot be extended
    L = load_fixture("t0")
    m = build_fat_wedge([3, 3, 4])
    ext, obs = extend(m, L, [L.gen("a"), L.gen("a"), L.gen("b")])
    assert obs is not None
    assert obs.generator in ("u13", "u23")
    assert obs.class_coords


def test_main1_on_triple_fixture():
    L = load_fixture("t2")
    m = build_fat_wedge([3, 3, 3])
    rep = verify_main1(L, m, identity_extension(m, L))
    rep.pop("retract", None)
    assert rep["pass"] and rep["orientation"] == "+"
    assert {row["p"] for row in rep["induction"]} == {2, 3}
    assert all(row["holds"] for row in rep["induction"])


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_elprime_and_elsegundo_on_triple_fixture(seed):
    L = load_fixture("t2")
    m = build_fat_wedge([3, 3, 3])
    r = random_retract(L, seed)
    ext = identity_extension(m, L)
    assert verify_elprime(L, m, ext, r)["pass"]
    reps = [L.gen(f"u{i}") for i in (1, 2, 3)]
    assert verify_elsegundo(L, m, reps, r)["pass"]


def test_membership_probe_on_triple_fixture():
    L = load_fixture("t2")
    m = build_fat_wedge([3, 3, 3])
    reps = [L.gen(f"u{i}") for i in (1, 2, 3)]
    hit = membership_probe(m, L, reps, {0: 1}, budget=30)
    assert hit["verdict"] == "MEMBER"
