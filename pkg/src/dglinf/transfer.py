"""Transferred L-infinity brackets on homology via the binary-tree formula.

Sign policy (the "convention bundle").  Internal edges carry the homotopy
``h = -K``, so that ``dh + hd = iq - id``.  Brackets are computed on the
suspension ``sL`` where every operation is symmetric of odd degree and all
signs are Koszul signs:

* vertex: ``m(sa, sb) = (-1)^{|a|} s[a, b]``
* internal edge: ``-s h s^{-1}``
* leaves ``s i``, root ``s q``.

Unsuspending with the usual décalage gives, for a planar tree ``T`` with
arguments ``y_1..y_k``::

    tree_evaluate(T)(y) = eps(y) * R_T(i y_1, ..., i y_k)

where ``eps(y) = (-1)^{sum_{j<k} (k-j)|y_j|}``, and ``R_T`` brackets
``(-1)^{|a|}[a, b]`` at the root and ``-(-1)^{|a|} h[a, b]`` at every other
vertex.  Then ``ell_k = sum_T q(tree_evaluate(T) o S_k) / |Aut T|`` with
``S_k`` the skew-graded symmetrisation.  The cherry evaluates to ``[ix, iy]``
and the three-leaf comb to ``[h[ix, iy], iz] = -[K[ix, iy], iz]``.

With ``h`` in place of ``K`` every ``ell_k`` changes by ``(-1)^k``; both
choices satisfy the L-infinity axioms, and this one makes
``eps ell_k(x) = phi(omega)`` hold with a plus sign on adapted retracts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .freelie import DegreeCapError, LieElement
from .qlinalg import ONE, Echelon, axpy
from .retract import Retract
from .signs_trees import (BinaryTree, enumerate_trees, permute, shuffles,
                          signed_koszul)

CONVENTION = "suspended-koszul/v2"


def epsilon_sign(degrees: Sequence[int]) -> int:
    k = len(degrees)
    exp = sum((k - j) * d for j, d in enumerate(degrees[:-1], start=1))
    return -1 if exp % 2 else 1


def _pm(exp: int) -> int:
    return -1 if exp % 2 else 1


class TransferEngine:
    """Evaluates trees and transferred brackets for one retract.

    ``weights`` overrides ``1/|Aut T|`` per tree key (used for negative
    controls).  Sub-tree values are memoised per argument tuple.
    """

    def __init__(self, r: Retract, weights: Mapping[str, Fraction] | None = None):
        self.r = r
        self.dgl = r.dgl
        self.weights = dict(weights or {})
        self._leaf: dict[int, LieElement] = {}
        self._sub: dict[tuple, LieElement] = {}

    def weight(self, tree: BinaryTree) -> Fraction:
        return self.weights.get(tree.key, Fraction(1, tree.aut))

    def leaf(self, g: int) -> LieElement:
        if g not in self._leaf:
            self._leaf[g] = self.r.i(g)
        return self._leaf[g]

    def _node(self, tree: BinaryTree, args: tuple, root: bool) -> LieElement:
        if tree.is_leaf:
            return self.leaf(args[0])
        key = (tree.key, args)
        if not root and key in self._sub:
            return self._sub[key]
        f, g = tree.children
        a = self._node(f, args[:f.leaves], False)
        b = self._node(g, args[f.leaves:], False)
        try:
            br = self.dgl.bracket(a, b)
            if root:
                return _pm(a.degree) * br
            # -(-1)^{|a|} h[a, b] with h = -K
            val = _pm(a.degree) * self.r.K(br)
        except DegreeCapError as exc:
            raise DegreeCapError(f"tree {tree.key} on {args}: {exc}") from None
        self._sub[key] = val
        return val

    def tree_evaluate(self, tree: BinaryTree, args: Sequence[int]) -> LieElement:
        """Planar evaluation on homology basis indices (no symmetrisation)."""
        args = tuple(args)
        if len(args) != tree.leaves:
            raise ValueError(f"tree with {tree.leaves} leaves given {len(args)} arguments")
        degs = [self.r.h_degree(g) for g in args]
        if tree.is_leaf:
            return self.leaf(args[0])
        return epsilon_sign(degs) * self._node(tree, args, True)

    def symmetrized_tree(self, tree: BinaryTree, args: Sequence[int]) -> LieElement:
        args = tuple(args)
        degs = [self.r.h_degree(g) for g in args]
        k = len(args)
        total = None
        for perm in itertools.permutations(range(1, k + 1)):
            s = signed_koszul(perm, degs)
            val = s * self.tree_evaluate(tree, permute(args, perm))
            total = val if total is None else total + val
        return total

    def ell(self, k: int, args: Sequence[int]) -> dict:
        """``ell_k`` on homology basis indices; global homology coordinates."""
        if k < 2:
            if k == 1:
                return {}
            raise ValueError("arity must be >= 1")
        if len(args) != k:
            raise ValueError(f"ell_{k} needs {k} arguments")
        out_deg = sum(self.r.h_degree(g) for g in args) + k - 2
        if out_deg > self.r.max_degree:
            raise DegreeCapError(
                f"ell_{k} lands in degree {out_deg}, beyond the retract range {self.r.max_degree}")
        total: dict = {}
        for tree in enumerate_trees(k):
            w = self.weight(tree)
            if not w:
                continue
            axpy(total, w, self.r.q(self.symmetrized_tree(tree, args)))
        return total

    def tree_sum(self, args: Sequence[int]) -> LieElement:
        """``sum_T ell_T(args) / |Aut T|`` as an element of L (before ``q``)."""
        total = None
        for tree in enumerate_trees(len(args)):
            v = self.weight(tree) * self.symmetrized_tree(tree, args)
            total = v if total is None else total + v
        return total


def flipped_weight(tree: BinaryTree) -> dict:
    """Weights with ``1/|Aut T|`` replaced for one tree (1 if ``|Aut T| > 1``, else 1/2)."""
    w = Fraction(1) if tree.aut > 1 else Fraction(1, 2)
    return {tree.key: w}


def ell(k: int, r: Retract, args: Sequence[int]) -> dict:
    return TransferEngine(r).ell(k, args)


def ell3_oracle(r: Retract, args: Sequence[int]) -> dict:
    """Hand-written three-term formula, independent of the tree machinery:

    ``q([h[x1,x2],x3] - (-1)^{|x2||x3|}[h[x1,x3],x2]
    + (-1)^{|x1|(|x2|+|x3|)}[h[x2,x3],x1])`` with ``h = -K``.
    """
    L = r.dgl
    x1, x2, x3 = (r.i(g) for g in args)
    d1, d2, d3 = (x.degree for x in (x1, x2, x3))

    def h(x):
        return -r.K(x)

    t = L.bracket(h(L.bracket(x1, x2)), x3)
    t = t - _pm(d2 * d3) * L.bracket(h(L.bracket(x1, x3)), x2)
    t = t + _pm(d1 * (d2 + d3)) * L.bracket(h(L.bracket(x2, x3)), x1)
    return r.q(t)


def ell2_oracle(r: Retract, args: Sequence[int]) -> dict:
    """Induced bracket on homology: class of ``[rep x, rep y]``."""
    a, b = (r.i(g) for g in args)
    return r.classify(r.dgl.bracket(a, b))


# -- tables ---------------------------------------------------------------------

@dataclass
class LInftyTable:
    """Transferred brackets on sorted tuples of homology basis indices.

    Tuples whose output degree exceeds ``max_degree`` are unknown, never zero.
    """

    degrees: list[int]
    labels: list[str]
    max_arity: int
    max_degree: int
    values: dict = field(default_factory=dict)       # (k, sorted tuple) -> coords
    retract_label: str = ""

    def covers(self, k: int, args: Sequence[int]) -> bool:
        return k <= self.max_arity and self.out_degree(args) + k - 2 <= self.max_degree

    def out_degree(self, args: Sequence[int]) -> int:
        return sum(self.degrees[g] for g in args)

    def get(self, k: int, args: Sequence[int]) -> dict:
        if k == 1:
            return {}
        args = tuple(args)
        if not self.covers(k, args):
            raise KeyError(f"ell_{k}{args} is beyond the table (arity {self.max_arity}, "
                           f"degree {self.max_degree})")
        order = sorted(range(k), key=lambda j: args[j])
        perm = tuple(j + 1 for j in order)
        sgn = signed_koszul(perm, [self.degrees[g] for g in args])
        val = self.values[(k, tuple(args[j] for j in order))]
        return {g: sgn * c for g, c in val.items()}

    def apply(self, k: int, vectors: Sequence[Mapping[int, Fraction]]) -> dict:
        """Multilinear extension to homology vectors."""
        out: dict = {}
        for picks in itertools.product(*(list(v.items()) for v in vectors)):
            coeff = ONE
            idx = []
            for g, c in picks:
                coeff *= c
                idx.append(g)
            axpy(out, coeff, self.get(k, idx))
        return out

    def nonzero(self, k: int) -> dict:
        return {key[1]: v for key, v in self.values.items() if key[0] == k and v}

    def least_nonvanishing_arity(self) -> int | None:
        for k in range(2, self.max_arity + 1):
            if self.nonzero(k):
                return k
        return None


def degree_tuples(degrees: Sequence[int], k: int, max_total: int):
    """Sorted index tuples of length ``k`` with ``sum degrees + k - 2 <= max_total``."""
    n = len(degrees)

    def rec(start, left, total, acc):
        if left == 0:
            yield tuple(acc)
            return
        for g in range(start, n):
            t = total + degrees[g]
            # the remaining entries have degree >= 1
            if t + (left - 1) + k - 2 <= max_total:
                acc.append(g)
                yield from rec(g, left - 1, t, acc)
                acc.pop()

    yield from rec(0, k, 0, [])


def compute_table(r: Retract, max_arity: int, max_degree: int | None = None,
                  engine: TransferEngine | None = None) -> LInftyTable:
    engine = engine or TransferEngine(r)
    max_degree = min(max_degree or r.max_degree, r.max_degree)
    degrees = [h.degree for h in r.h_basis]
    table = LInftyTable(degrees, [h.label for h in r.h_basis], max_arity, max_degree,
                        retract_label=r.label)
    for k in range(2, max_arity + 1):
        for args in degree_tuples(degrees, k, max_degree):
            table.values[(k, args)] = engine.ell(k, args)
    return table


def bracket_image_span(table: LInftyTable, j: int, n: int) -> list[dict]:
    """Independent spanning set of ``im ell_j`` inside ``H_n``."""
    if j == 1:
        return []
    if j > table.max_arity or n > table.max_degree:
        raise KeyError(f"table does not cover ell_{j} into degree {n}")
    ech = Echelon()
    span = []
    for args in degree_tuples(table.degrees, j, n):
        if table.out_degree(args) + j - 2 != n:
            continue
        v = table.values[(j, args)]
        if v and ech.add(v):
            span.append(v)
    return span


def jacobiator(table: LInftyTable, args: Sequence[int]) -> dict:
    """Left side of the generalized Jacobi identity on basis elements ``args``."""
    n = len(args)
    degs = [table.degrees[g] for g in args]
    total: dict = {}
    for i in range(2, n):
        j = n + 1 - i
        for sigma in shuffles(i, n - i):
            s = signed_koszul(sigma, degs) * _pm(i * (j - 1))
            xs = permute(list(args), sigma)
            inner = table.get(i, xs[:i])
            if not inner:
                continue
            rest = [{g: ONE} for g in xs[i:]]
            axpy(total, s, table.apply(j, [inner] + rest))
    return total


def verify_generalized_jacobi(table: LInftyTable, n: int) -> dict:
    checked = 0
    for args in degree_tuples(table.degrees, n, table.max_degree):
        if n > table.max_arity + 1:
            break
        val = jacobiator(table, args)
        checked += 1
        if val:
            return {"pass": False, "arity": n, "checked": checked,
                    "violation": {"args": [table.labels[g] for g in args],
                                  "value": {table.labels[g]: str(c) for g, c in val.items()}}}
    return {"pass": True, "arity": n, "checked": checked}
