from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from dglinf.qlinalg import (Echelon, axpy, combine, determinant, sparse_kernel, sparse_rank,
                            sparse_solve)

entries = st.integers(-3, 3).map(Fraction)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m)))


def columns_of(rows):
    n = len(rows[0])
    return [{i: r[j] for i, r in enumerate(rows) if r[j]} for j in range(n)]


def test_axpy_drops_zeros():
    y = {0: Fraction(1), 1: Fraction(2)}
    axpy(y, -1, {0: Fraction(1)})
    assert y == {1: Fraction(2)}
    assert combine([(2, {3: Fraction(1, 2)}), (-1, {3: Fraction(1)})]) == {}


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_sympy(rows):
    assert sparse_rank(columns_of(rows)) == sympy.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_vectors_are_killed_and_complete(rows):
    cols = columns_of(rows)
    ker = sparse_kernel(cols)
    for v in ker:
        assert combine((c, cols[j]) for j, c in v.items()) == {}
    assert len(ker) == len(cols) - sympy.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(matrices(), st.lists(entries, min_size=5, max_size=5))
def test_solve_reproduces_right_side(rows, xs):
    cols = columns_of(rows)
    x = {j: xs[j] for j in range(len(cols)) if xs[j]}
    b = combine((c, cols[j]) for j, c in x.items())
    sol = sparse_solve(cols, b)
    assert sol is not None
    assert combine((c, cols[j]) for j, c in sol.items()) == b


def test_solve_reports_inconsistency():
    assert sparse_solve([{0: Fraction(1)}], {1: Fraction(1)}) is None


def test_express_tracks_tags():
    ech = Echelon()
    assert ech.add({0: Fraction(2), 1: Fraction(1)}, tag="a")
    assert ech.add({1: Fraction(3)}, tag="b")
    assert not ech.add({0: Fraction(4), 1: Fraction(5)}, tag="c")
    combo = ech.express({0: Fraction(4), 1: Fraction(5)})
    assert combo == {"a": Fraction(2), "b": Fraction(1)}


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_determinant_matches_sympy(rows):
    assert determinant(rows) == sympy.Matrix(rows).det()
