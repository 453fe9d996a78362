import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load_fixture
from dglinf import example37
from dglinf.retract import (RetractError, dump_retract, load_retract, random_retract,
                            retract_from_decomposition, verify_retract)
from dglinf.whitehead import build_fat_wedge, identity_extension
from dglinf.retract import adapted_retract


@pytest.mark.parametrize("name", ["t0", "t1", "t2", "t3"])
def test_greedy_retract_identities(name):
    r = retract_from_decomposition(load_fixture(name), label="greedy")
    rep = verify_retract(r)
    assert rep["pass"], rep


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_random_retract_identities(seed):
    r = random_retract(load_fixture("t2"), seed)
    assert verify_retract(r)["pass"]


def test_random_retract_is_reproducible():
    L = load_fixture("t2")
    assert random_retract(L, 4).to_json() == random_retract(L, 4).to_json()


def test_homotopy_formula_on_elements():
    L = load_fixture("t1")
    r = random_retract(L, 2)
    for n in range(2, r.max_degree):
        for j in range(L.dim(n)):
            x = L.basis(n).elements[j]
            d = L.apply_differential
            lhs = d(r.K(x)) + r.K(d(x)) if n > 1 else d(r.K(x))
            rhs = x - r.i(r.q(x)) if r.q(x) else x
            assert lhs == rhs


def test_dump_and_load_round_trip(tmp_path):
    L = load_fixture("t2")
    r = random_retract(L, 9)
    r2 = load_retract(L, json.loads(dump_retract(r)))
    for n in range(2, r.max_degree + 1):
        for x in L.basis(n).elements:
            assert r.K(x) == r2.K(x)
            assert r.q(x) == r2.q(x)


def test_printed_table_retract_is_a_retract():
    L = example37.load()
    r = example37.table_retract(L)
    assert verify_retract(r)["pass"]
    assert [L.format(x) for x in r.C_basis(2)] == ["v1", "v2", "v3", "v4"]


def test_bad_decomposition_is_rejected():
    L = load_fixture("t1")
    # a cycle of degree 2 cannot sit in A
    with pytest.raises(RetractError):
        retract_from_decomposition(L, {2: [L.gen("a")]})


def test_adapted_retract_for_identity_extension():
    L = load_fixture("t2")
    ext = identity_extension(build_fat_wedge([3, 3, 3]), L)
    r, cert = adapted_retract(L, ext)
    assert cert is None and r is not None
    assert verify_retract(r)["pass"]
    for name, y in ext.higher_assignments().items():
        assert r.K(L.apply_differential(y)) == y
