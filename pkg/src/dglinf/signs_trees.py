"""Koszul signs, shuffles and binary rooted trees up to isomorphism.

Permutations are tuples ``sigma`` of 1-based images, read as "position ``j``
holds symbol ``sigma[j-1]``": applying ``sigma`` to ``x_1 ... x_n`` produces
``x_sigma(1) ... x_sigma(n)``.
"""

from __future__ import annotations

import threading
from itertools import combinations
from math import comb
from typing import Sequence


def _check(perm: Sequence[int], degrees: Sequence[int]) -> None:
    if len(perm) != len(degrees):
        raise ValueError(f"permutation of length {len(perm)} with {len(degrees)} degrees")
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError(f"{tuple(perm)} is not a permutation")


def signature(perm: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inv % 2 else 1


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering graded symbols ``x_1..x_n`` into ``x_perm(1)..x_perm(n)``.

    Every pair of symbols whose relative order is inverted contributes
    ``(-1)^(d_i d_j)``.
    """
    _check(perm, degrees)
    odd = 0
    for a in range(len(perm)):
        da = degrees[perm[a] - 1]
        if da % 2 == 0:
            continue
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b] and degrees[perm[b] - 1] % 2:
                odd ^= 1
    return -1 if odd else 1


def signed_koszul(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """``signature(perm) * koszul_sign(perm, degrees)``: the skew-graded sign."""
    return signature(perm) * koszul_sign(perm, degrees)


def permute(items: Sequence, perm: Sequence[int]) -> list:
    return [items[i - 1] for i in perm]


def compose(sigma: Sequence[int], tau: Sequence[int]) -> tuple[int, ...]:
    """``(sigma o tau)(j) = sigma(tau(j))``."""
    return tuple(sigma[t - 1] for t in tau)


def shuffles(p: int, q: int) -> list[tuple[int, ...]]:
    """Permutations increasing on the first ``p`` and on the last ``q`` positions."""
    if p < 0 or q < 0:
        raise ValueError("shuffle block sizes must be non-negative")
    n = p + q
    out = []
    for first in combinations(range(1, n + 1), p):
        chosen = set(first)
        out.append(first + tuple(j for j in range(1, n + 1) if j not in chosen))
    return out


def anchored_shuffles(p: int, q: int) -> list[tuple[int, ...]]:
    """The ``(p, q)`` shuffles fixing 1; there are ``C(p+q-1, p-1)`` of them."""
    if p < 1:
        raise ValueError("anchored shuffles need p >= 1")
    return [s for s in shuffles(p, q) if s[0] == 1]


class BinaryTree:
    """Non-planar binary rooted tree, stored with children in canonical order."""

    __slots__ = ("children", "leaves", "key", "aut")

    def __init__(self, left: "BinaryTree | None" = None, right: "BinaryTree | None" = None):
        if (left is None) != (right is None):
            raise ValueError("a node needs two children")
        if left is None:
            self.children = None
            self.leaves = 1
            self.key = "*"
            self.aut = 1
            return
        a, b = sorted((left, right), key=lambda t: (t.leaves, t.key))
        self.children = (a, b)
        self.leaves = a.leaves + b.leaves
        self.key = f"({a.key}{b.key})"
        self.aut = a.aut * b.aut * (2 if a.key == b.key else 1)

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def internal_vertices(self) -> int:
        return self.leaves - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryTree) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"BinaryTree({self.key})"


LEAF = BinaryTree()


def aut_order(tree: BinaryTree) -> int:
    return tree.aut


_tree_cache: dict[int, list[BinaryTree]] = {1: [LEAF]}
_tree_lock = threading.Lock()


def enumerate_trees(k: int) -> list[BinaryTree]:
    """One representative per isomorphism class of binary trees with ``k`` leaves."""
    if k < 1:
        raise ValueError("trees need at least one leaf")
    with _tree_lock:
        return list(_trees(k))


def _trees(k: int) -> list[BinaryTree]:
    if k in _tree_cache:
        return _tree_cache[k]
    seen: dict[str, BinaryTree] = {}
    for p in range(1, k // 2 + 1):
        for f in _trees(p):
            for g in _trees(k - p):
                t = BinaryTree(f, g)
                seen.setdefault(t.key, t)
    result = sorted(seen.values(), key=lambda t: t.key)
    _tree_cache[k] = result
    return result


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)
