"""Quillen chains, brackets as coderivations, and the Phi-certificate solver.

Wedge words are sorted tuples of letters; a letter's suspended degree is
its degree plus one.  Sorting introduces the Koszul sign, and a repeated
letter of odd suspended degree kills the word.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .freelie import DegreeCapError, FreeDGL, bracket
from .qlinalg import ONE, Echelon, axpy
from .signs_trees import koszul_sign
from .transfer import LInftyTable, epsilon_sign


def _pm(e: int) -> int:
    return -1 if e % 2 else 1


class WedgeAlgebra:
    """Graded-commutative words over letters with suspended degrees."""

    def __init__(self, sdegree: Callable[[object], int]):
        self.sdegree = sdegree

    def canonical(self, letters: Sequence) -> tuple[int, tuple]:
        """``(sign, sorted word)``; sign 0 when the word vanishes."""
        order = sorted(range(len(letters)), key=lambda j: letters[j])
        word = tuple(letters[j] for j in order)
        for a, b in zip(word, word[1:]):
            if a == b and self.sdegree(a) % 2:
                return 0, word
        perm = tuple(j + 1 for j in order)
        return koszul_sign(perm, [self.sdegree(x) for x in letters]), word

    def add_word(self, out: dict, coeff, letters: Sequence) -> None:
        sgn, word = self.canonical(letters)
        if sgn and coeff:
            axpy(out, sgn * coeff, {word: ONE})

    def degree(self, word: Sequence) -> int:
        return sum(self.sdegree(x) for x in word)

    def extraction_sign(self, word: Sequence, chosen: Sequence[int]) -> int:
        """Koszul sign of moving the letters at positions ``chosen`` to the front."""
        rest = [j for j in range(len(word)) if j not in set(chosen)]
        perm = tuple(j + 1 for j in list(chosen) + rest)
        return koszul_sign(perm, [self.sdegree(x) for x in word])


# -- Quillen chains C(L) --------------------------------------------------------

class QuillenChains:
    """``(Lambda sL, delta_1 + delta_2)`` with letters ``(n, j)``: basis element ``j`` of ``L_n``."""

    def __init__(self, L: FreeDGL):
        self.L = L
        self.wedge = WedgeAlgebra(lambda x: x[0] + 1)

    def _el(self, x):
        return self.L.basis(x[0]).elements[x[1]]

    def delta(self, w: Sequence) -> dict:
        L, W = self.L, self.wedge
        w = list(w)
        out: dict = {}
        n_i = 0
        for i, x in enumerate(w):
            n = x[0]
            if n > 1:
                for j, c in L.d_coords(n, {x[1]: ONE}).items():
                    W.add_word(out, -_pm(n_i) * c, w[:i] + [(n - 1, j)] + w[i + 1:])
            n_i += n + 1
        for i, j in itertools.combinations(range(len(w)), 2):
            xi, xj = w[i], w[j]
            deg = xi[0] + xj[0]
            if deg > L.degree_cap:
                raise DegreeCapError(f"delta_2 needs degree {deg} beyond cap {L.degree_cap}")
            n_ij = W.extraction_sign(w, [i, j])
            rest = [w[t] for t in range(len(w)) if t not in (i, j)]
            br = bracket(self._el(xi), self._el(xj))
            coeff = -n_ij * _pm(xi[0])
            for t, c in L.coords(br).items():
                W.add_word(out, coeff * c, [(deg, t)] + rest)
        return out

    def delta_of(self, chain: Mapping) -> dict:
        out: dict = {}
        for w, c in chain.items():
            axpy(out, c, self.delta(w))
        return out

    def words(self, max_total: int, max_length: int) -> Iterable[tuple]:
        """Canonical nonzero words with ``sum |x_i| <= max_total``."""
        letters = [(n, j) for n in range(1, max_total + 1) for j in range(self.L.dim(n))]
        for p in range(1, max_length + 1):
            for combo in itertools.combinations_with_replacement(letters, p):
                if sum(x[0] for x in combo) > max_total:
                    continue
                sgn, word = self.wedge.canonical(combo)
                if sgn:
                    yield word

    def check_delta_squared(self, max_total: int | None = None, max_length: int = 3) -> dict:
        max_total = min(max_total or self.L.degree_cap, self.L.degree_cap)
        checked = 0
        for w in self.words(max_total, max_length):
            checked += 1
            if self.delta_of(self.delta(w)):
                return {"pass": False, "checked": checked, "word": [list(x) for x in w]}
        return {"pass": True, "checked": checked, "max_total": max_total, "max_length": max_length}


def quillen_delta(L: FreeDGL, w: Sequence) -> dict:
    return QuillenChains(L).delta(w)


# -- coderivations on Lambda sH -----------------------------------------------

@dataclass
class Coderivation:
    """Corestriction ``h_k: Lambda^k sH -> sH`` read from a bracket table."""

    k: int
    table: LInftyTable

    def sdeg(self, g: int) -> int:
        return self.table.degrees[g] + 1

    def h(self, word: Sequence[int]) -> dict:
        """``(-1)^{k(k-1)/2} s ell_k (s^{-1})^{(x) k}`` on a sorted word."""
        k = self.k
        if len(word) != k:
            raise ValueError("h_k takes words of length k")
        if k == 1:
            return {}
        # s^{-1} in slot j passes the suspended letters before it
        exp = k * (k - 1) // 2 + sum((k - 1 - j) * self.sdeg(g) for j, g in enumerate(word))
        sgn = _pm(exp)
        return {g: sgn * c for g, c in self.table.get(k, word).items()}


def bracket_to_coderivation(table: LInftyTable, k: int) -> Coderivation:
    if k > table.max_arity:
        raise KeyError(f"table has no arity {k}")
    return Coderivation(k, table)


def coderivation_to_bracket(cod: Coderivation, args: Sequence[int]) -> dict:
    """``s^{-1} h_k s^{(x) k}``; the suspensions contribute ``eps``."""
    degs = [cod.table.degrees[g] for g in args]
    order = sorted(range(len(args)), key=lambda j: args[j])
    word = [args[j] for j in order]
    sgn_sort = koszul_sign(tuple(j + 1 for j in order), [d + 1 for d in degs])
    sgn = epsilon_sign(degs) * sgn_sort
    return {g: sgn * c for g, c in cod.h(word).items()}


class LInftyCoalgebra:
    """``(Lambda^+ sH, sum_k delta_k)`` built from a table of transferred brackets."""

    def __init__(self, table: LInftyTable, max_arity: int | None = None):
        self.table = table
        self.max_arity = min(max_arity or table.max_arity, table.max_arity)
        self.cods = {k: Coderivation(k, table) for k in range(2, self.max_arity + 1)}
        self.wedge = WedgeAlgebra(lambda g: table.degrees[g] + 1)

    def delta_k(self, k: int, word: Sequence[int]) -> dict:
        W = self.wedge
        out: dict = {}
        p = len(word)
        if k == 1 or p < k:
            return out
        cod = self.cods[k]
        for chosen in itertools.combinations(range(p), k):
            sub = [word[j] for j in chosen]
            if not self.table.covers(k, sub):
                raise KeyError(f"delta_{k} needs ell_{k} beyond the table")
            val = cod.h(sub)
            if not val:
                continue
            e = W.extraction_sign(word, chosen)
            rest = [word[j] for j in range(p) if j not in chosen]
            for g, c in val.items():
                W.add_word(out, e * c, [g] + rest)
        return out

    def delta(self, word: Sequence[int]) -> dict:
        out: dict = {}
        for k in range(2, min(len(word), self.max_arity) + 1):
            part = self.delta_k(k, word)
            for w in part:
                if len(w) != len(word) - k + 1:
                    raise AssertionError("delta_k changed word length by the wrong amount")
            axpy(out, ONE, part)
        return out

    def delta_of(self, chain: Mapping) -> dict:
        out: dict = {}
        for w, c in chain.items():
            axpy(out, c, self.delta(w))
        return out

    def words(self, sdegree: int | None = None, lengths: Iterable[int] = (),
              max_out: int | None = None) -> Iterable[tuple]:
        n = len(self.table.degrees)
        for p in lengths:
            for combo in itertools.combinations_with_replacement(range(n), p):
                if sdegree is not None and self.wedge.degree(combo) != sdegree:
                    continue
                if max_out is not None and sum(self.table.degrees[g] for g in combo) + p - 2 > max_out:
                    continue
                sgn, word = self.wedge.canonical(combo)
                if sgn:
                    yield word

    def check_delta_squared(self) -> dict:
        checked = 0
        for p in range(2, self.max_arity + 2):
            for w in self.words(lengths=[p], max_out=self.table.max_degree):
                checked += 1
                if self.delta_of(self.delta(w)):
                    return {"pass": False, "checked": checked,
                            "word": [self.table.labels[g] for g in w]}
        return {"pass": True, "checked": checked}


def delta_on_wedge(table: LInftyTable, word: Sequence[int], k: int | None = None) -> dict:
    co = LInftyCoalgebra(table)
    return co.delta(word) if k is None else co.delta_k(k, word)


@dataclass
class PhiSolution:
    phi: dict | None
    unknowns: int
    equations: int

    @property
    def found(self) -> bool:
        return self.phi is not None


def solve_phi(table: LInftyTable, x_args: Sequence[int], x: Mapping[int, Fraction]) -> PhiSolution:
    """Find ``Phi`` in ``Lambda^{<=k-1} sH`` with ``delta(sx_1...sx_k + Phi) = sx``."""
    k = len(x_args)
    co = LInftyCoalgebra(table, max_arity=k)
    W = co.wedge
    D = sum(table.degrees[g] + 1 for g in x_args)
    target_deg = sum(table.degrees[g] for g in x_args) + k - 2
    for g in x:
        if table.degrees[g] != target_deg:
            return PhiSolution(None, 0, 0)
    sgn, top = W.canonical(list(x_args))
    rhs = {(g,): c for g, c in x.items()}
    if sgn:
        axpy(rhs, -sgn, co.delta(top))
    unknowns = list(co.words(sdegree=D, lengths=range(1, k)))
    cols = [co.delta(w) for w in unknowns]
    ech = Echelon()
    for j, col in enumerate(cols):
        ech.add(col, tag=j)
    combo = ech.express(rhs)
    eqs = set(rhs)
    for col in cols:
        eqs.update(col)
    if combo is None:
        return PhiSolution(None, len(unknowns), len(eqs))
    return PhiSolution({unknowns[j]: c for j, c in combo.items()}, len(unknowns), len(eqs))
