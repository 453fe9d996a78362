import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, load_fixture
from dglinf.freelie import DegreeCapError, FreeDGL, Generator, LieElement, bracket


def pm(e):
    return -1 if e % 2 else 1


def brute_lie_dim(dgl, n):
    """Rank of all bracketings of generator sequences of total degree n, in tensor coordinates."""
    gens = [dgl.gen(g.name) for g in dgl.generators]

    def bracketings(xs):
        if len(xs) == 1:
            yield xs[0]
            return
        for cut in range(1, len(xs)):
            for a in bracketings(xs[:cut]):
                for b in bracketings(xs[cut:]):
                    yield bracket(a, b)
    elems = []
    for length in range(1, n + 1):
        for seq in itertools.product(gens, repeat=length):
            if sum(x.degree for x in seq) == n:
                elems.extend(e for e in bracketings(list(seq)) if e.terms)
    words = sorted({w for e in elems for w in e.terms})
    if not words:
        return 0
    return sympy.Matrix([[e.terms.get(w, 0) for w in words] for e in elems]).rank()


@pytest.mark.parametrize("degrees", [(1,), (2,), (1, 1), (2, 2), (1, 2), (2, 3)])
def test_basis_dimension_matches_bracket_span(degrees):
    L = FreeDGL([Generator(f"x{i}", d) for i, d in enumerate(degrees)], degree_cap=6)
    for n in range(1, 7):
        assert L.dim(n) == brute_lie_dim(L, n), n


def test_odd_generator_square_and_even_square():
    L = FreeDGL([Generator("a", 1), Generator("b", 2)], degree_cap=6)
    a, b = L.gen("a"), L.gen("b")
    assert not bracket(a, a).is_zero()
    assert bracket(b, b).is_zero()
    assert L.dim(2) == 2 and L.dim(4) == 1


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_d_squared(name):
    L = load_fixture(name)
    assert L.check_d_squared() == []
    for g in L.generators:
        assert L.is_lie(L.differential_of(g.name))


@pytest.mark.parametrize("name", ["t0", "t1", "t2", "t3"])
def test_homology_ranks_match_sympy(name):
    L = load_fixture(name)

    def rank(n):
        if n < 2 or n > L.degree_cap or not L.dim(n) or not L.dim(n - 1):
            return 0
        cols = L.d_matrix(n)
        return sympy.Matrix([[c.get(i, 0) for c in cols] for i in range(L.dim(n - 1))]).rank()
    for n in range(1, L.degree_cap):
        assert L.homology(n).dimension == L.dim(n) - rank(n) - rank(n + 1), n


def test_homology_of_product_model_is_two_classes():
    L = load_fixture("t1")
    dims = {n: L.homology(n).dimension for n in range(1, L.degree_cap)}
    assert dims == {1: 0, 2: 2, 3: 0, 4: 0, 5: 0, 6: 0, 7: 0}


def test_leibniz_and_jacobi_samples():
    L = load_fixture("t3")
    rng = random.Random(7)
    for _ in range(40):
        n1, n2, n3 = (rng.randint(1, 3) for _ in range(3))
        x, y, z = (L.random_element(n, rng) for n in (n1, n2, n3))
        if x.is_zero() or y.is_zero():
            continue
        d = L.apply_differential
        assert d(bracket(x, y)) == bracket(d(x), y) + pm(x.degree) * bracket(x, d(y))
        if z.is_zero():
            continue
        jac = (pm(x.degree * z.degree) * bracket(x, bracket(y, z))
               + pm(y.degree * x.degree) * bracket(y, bracket(z, x))
               + pm(z.degree * y.degree) * bracket(z, bracket(x, y)))
        assert jac.is_zero()


def test_coords_round_trip():
    L = load_fixture("t2")
    rng = random.Random(3)
    for n in range(2, 9):
        for _ in range(5):
            x = L.random_element(n, rng)
            assert L.element(n, L.coords(x)) == x


def test_cap_is_enforced():
    L = load_fixture("t1")
    with pytest.raises(DegreeCapError):
        L.basis(L.degree_cap + 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_bracket_graded_antisymmetry(c1, c2):
    L = FreeDGL([Generator("a", 1), Generator("b", 2)], degree_cap=6)
    a, b = L.gen("a"), L.gen("b")
    x = c1[0] * bracket(a, a) + c1[1] * b
    y = c2[0] * bracket(a, b)
    assert bracket(x, y) == -pm(x.degree * y.degree) * bracket(y, x)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.lists(st.integers(0, 1), min_size=1, max_size=4), st.integers(-2, 2)),
                min_size=1, max_size=4))
def test_dynkin_test_agrees_with_basis(raw):
    from dglinf.freelie import is_lie_dynkin
    L = FreeDGL([Generator("a", 1), Generator("b", 2)], degree_cap=8)
    by_degree = {}
    for word, c in raw:
        deg = sum(L.degrees[g] for g in word)
        by_degree.setdefault(deg, {})[tuple(word)] = Fraction(c)
    for deg, terms in by_degree.items():
        x = LieElement(deg, terms)
        assert is_lie_dynkin(x, L.degrees) == L.is_lie(x)
    # brackets are always Lie
    y = bracket(L.gen("a"), bracket(L.gen("a"), L.gen("b")))
    assert is_lie_dynkin(y, L.degrees)
