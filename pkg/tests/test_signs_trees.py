import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dglinf.signs_trees import (anchored_shuffles, catalan, compose, enumerate_trees, koszul_sign,
                                permute, shuffles, signature, signed_koszul)


def bubble_sign(perm, degrees):
    """Sign by adjacent transpositions, moving symbols one step at a time."""
    cur = list(range(1, len(perm) + 1))
    sign = 1
    target = list(perm)
    for pos in range(len(target)):
        j = cur.index(target[pos])
        while j > pos:
            a, b = cur[j - 1], cur[j]
            if degrees[a - 1] % 2 and degrees[b - 1] % 2:
                sign = -sign
            cur[j - 1], cur[j] = b, a
            j -= 1
    return sign


perms_with_degrees = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.permutations(list(range(1, n + 1))),
                        st.lists(st.integers(0, 5), min_size=n, max_size=n)))


@given(perms_with_degrees)
def test_koszul_sign_matches_adjacent_swaps(pd):
    perm, degs = pd
    assert koszul_sign(perm, degs) == bubble_sign(perm, degs)
    assert signed_koszul(perm, degs) == signature(perm) * bubble_sign(perm, degs)


@given(perms_with_degrees, st.data())
def test_koszul_sign_is_multiplicative(pd, data):
    sigma, degs = pd
    tau = data.draw(st.permutations(list(range(1, len(sigma) + 1))))
    moved = permute(degs, sigma)
    assert koszul_sign(compose(sigma, tau), degs) == koszul_sign(sigma, degs) * koszul_sign(tau, moved)


def test_koszul_sign_examples():
    assert koszul_sign((2, 1), (1, 1)) == -1
    assert koszul_sign((2, 1), (1, 2)) == 1
    assert signed_koszul((2, 1), (2, 2)) == -1
    with pytest.raises(ValueError):
        koszul_sign((1, 1), (0, 0))


@pytest.mark.parametrize("p,q", [(0, 3), (1, 2), (2, 2), (3, 2), (2, 4)])
def test_shuffle_counts(p, q):
    from math import comb
    sh = shuffles(p, q)
    assert len(sh) == len(set(sh)) == comb(p + q, p)
    for s in sh:
        assert list(s[:p]) == sorted(s[:p]) and list(s[p:]) == sorted(s[p:])
    if p:
        assert len(anchored_shuffles(p, q)) == comb(p + q - 1, p - 1)


# brute-force oracle: all parenthesisations of labelled leaves, canonicalised as nested sets

def parenthesisations(items):
    if len(items) == 1:
        yield items[0]
        return
    for cut in range(1, len(items)):
        for a in parenthesisations(items[:cut]):
            for b in parenthesisations(items[cut:]):
                yield (a, b)


def canon(t):
    if not isinstance(t, tuple):
        return t
    return tuple(sorted((canon(t[0]), canon(t[1])), key=repr))


def shape(t):
    if not isinstance(t, tuple):
        return "*"
    return "(" + "".join(sorted((shape(t[0]), shape(t[1])), key=lambda s: (s.count("*"), s))) + ")"


def brute_classes(k):
    return {shape(t) for t in parenthesisations(["*"] * k)}


def brute_aut(tree_shape, k):
    labelled = next(t for t in parenthesisations(list(range(k))) if shape(t) == tree_shape)
    ref = canon(labelled)

    def relabel(t, p):
        return p[t] if not isinstance(t, tuple) else (relabel(t[0], p), relabel(t[1], p))
    return sum(1 for p in itertools.permutations(range(k)) if canon(relabel(labelled, p)) == ref)


@pytest.mark.parametrize("k,count", [(2, 1), (3, 1), (4, 2), (5, 3), (6, 6), (7, 11)])
def test_tree_class_counts(k, count):
    trees = enumerate_trees(k)
    assert len(trees) == count == len(brute_classes(k))
    assert {t.key for t in trees} == brute_classes(k)


@pytest.mark.parametrize("k", range(2, 8))
def test_aut_orders_match_brute_force_and_catalan(k):
    trees = enumerate_trees(k)
    for t in trees:
        assert t.aut == brute_aut(t.key, k)
    assert sum(Fraction(2 ** (k - 1), t.aut) for t in trees) == catalan(k - 1)


def test_small_aut_values():
    auts = {t.key: t.aut for k in (2, 3, 4) for t in enumerate_trees(k)}
    assert auts == {"(**)": 2, "(*(**))": 2, "((**)(**))": 8, "(*(*(**)))": 2}


def test_catalan():
    assert [catalan(n) for n in range(7)] == [1, 1, 2, 5, 14, 42, 132]
