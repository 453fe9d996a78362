"""Free graded Lie algebras inside the tensor algebra, and free DGLs.

A :class:`LieElement` is a homogeneous combination of tensor words; a word is
a tuple of generator indices.  Brackets are graded commutators, so every
identity of the free Lie algebra reduces to associative arithmetic.  Bases
of each degree are found by expanding right-normed bracket monomials and
eliminating dependencies, one multidegree block (multiset of letters) at a
time.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .qlinalg import ONE, ZERO, Echelon, axpy, combine, sparse_kernel


class DegreeCapError(ValueError):
    """Raised when a computation would need degrees above the cap."""


class NotLieError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"generator {self.name} has degree {self.degree}; reduced DGLs need >= 1")


def _sign(exp: int) -> int:
    return -1 if exp % 2 else 1


class LieElement:
    """Homogeneous element of the tensor algebra; treat as immutable."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping[tuple, Fraction] | None = None):
        self.degree = degree
        self.terms = {w: Fraction(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, degree: int, terms: dict) -> "LieElement":
        obj = cls.__new__(cls)
        obj.degree = degree
        obj.terms = terms
        return obj

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check_degree(self, other: "LieElement") -> None:
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError(f"adding elements of degrees {self.degree} and {other.degree}")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check_degree(other)
        deg = self.degree if self.terms else other.degree
        return LieElement._raw(deg, axpy(dict(self.terms), ONE, other.terms))

    def __sub__(self, other: "LieElement") -> "LieElement":
        self._check_degree(other)
        deg = self.degree if self.terms else other.degree
        return LieElement._raw(deg, axpy(dict(self.terms), -ONE, other.terms))

    def __neg__(self) -> "LieElement":
        return LieElement._raw(self.degree, {w: -c for w, c in self.terms.items()})

    def __rmul__(self, c) -> "LieElement":
        c = Fraction(c)
        if not c:
            return LieElement._raw(self.degree, {})
        return LieElement._raw(self.degree, {w: c * v for w, v in self.terms.items()})

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def words(self) -> list[tuple]:
        return sorted(self.terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*{w}" for w, c in sorted(self.terms.items())) or "0"
        return f"LieElement(deg={self.degree}: {body})"


def tensor(a: LieElement, b: LieElement) -> dict:
    out: dict = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            w = wa + wb
            v = out.get(w, ZERO) + ca * cb
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


def bracket(a: LieElement, b: LieElement) -> LieElement:
    """Graded commutator ``ab - (-1)^{|a||b|} ba``."""
    deg = a.degree + b.degree
    if not a.terms or not b.terms:
        return LieElement._raw(deg, {})
    out = tensor(a, b)
    axpy(out, -_sign(a.degree * b.degree), tensor(b, a))
    return LieElement._raw(deg, out)


def _left_normed(word: tuple, degrees: Sequence[int]) -> dict:
    """Tensor expansion of ``[[...[x1, x2], ...], xm]``."""
    out = {word[:1]: ONE}
    deg = degrees[word[0]]
    for g in word[1:]:
        dg = degrees[g]
        sgn = _sign(deg * dg)
        nxt: dict = {}
        for w, c in out.items():
            axpy(nxt, c, {w + (g,): ONE})
            axpy(nxt, -sgn * c, {(g,) + w: ONE})
        out = nxt
        deg += dg
    return out


def is_lie_dynkin(x: LieElement, degrees: Sequence[int]) -> bool:
    """Dynkin-Specht-Wever: ``x`` is Lie iff left-normed bracketing multiplies
    each word-length component by its length (characteristic zero)."""
    lhs: dict = {}
    rhs: dict = {}
    for w, c in x.terms.items():
        axpy(lhs, c, _left_normed(w, degrees))
        rhs[w] = c * len(w)
    return {w: c for w, c in lhs.items() if c} == rhs


def _distinct_permutations(items: Sequence[int]):
    items = sorted(items)
    n = len(items)

    def rec(prefix, remaining):
        if not remaining:
            yield tuple(prefix)
            return
        last = None
        for i, x in enumerate(remaining):
            if x == last:
                continue
            last = x
            prefix.append(x)
            yield from rec(prefix, remaining[:i] + remaining[i + 1:])
            prefix.pop()

    if n:
        yield from rec([], items)


@dataclass
class DegreeBasis:
    """Basis of the degree-``n`` part: right-normed monomials ``[g1,[g2,...]]``."""

    degree: int
    sequences: list[tuple] = field(default_factory=list)
    elements: list[LieElement] = field(default_factory=list)
    blocks: dict = field(default_factory=dict)   # content -> Echelon over words

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class Homology:
    degree: int
    cycles: list[dict]             # kernel basis, coordinates in L_n
    boundaries: list[dict]         # independent boundaries spanning B_n
    rep_coords: list[dict]         # chosen representatives (a complement of B_n in Z_n)
    representatives: list[LieElement]
    _classifier: Echelon = field(repr=False, default_factory=Echelon)

    @property
    def dimension(self) -> int:
        return len(self.rep_coords)

    def classify(self, coords: Mapping[int, Fraction]) -> dict:
        """Class of a cycle (given in L_n coordinates) on the representative basis."""
        combo = self._classifier.express(coords)
        if combo is None:
            raise ValueError(f"element of degree {self.degree} is not a cycle")
        return {t[1]: c for t, c in combo.items() if t[0] == "h"}

    def is_boundary(self, coords: Mapping[int, Fraction]) -> bool:
        combo = self._classifier.express(coords)
        return combo is not None and all(t[0] == "b" for t in combo)

    def boundary_preimage_part(self, coords):
        combo = self._classifier.express(coords)
        if combo is None:
            return None
        return {t[1]: c for t, c in combo.items() if t[0] == "b"}


class FreeDGL:
    """Free DGL ``(L(V), d)`` truncated at ``degree_cap``.

    Immutable after construction; bases, differential matrices and homology
    are computed lazily and memoised under a lock.
    """

    def __init__(self, generators: Sequence[Generator],
                 differential: Mapping[str, LieElement] | None = None,
                 degree_cap: int = 10, title: str = ""):
        self.generators = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        self.degrees = tuple(g.degree for g in self.generators)
        self.degree_cap = degree_cap
        self.title = title
        self._dgen: list[LieElement] = []
        differential = dict(differential or {})
        for name in differential:
            if name not in self.index:
                raise KeyError(f"differential given for undeclared generator {name!r}")
        for g in self.generators:
            img = differential.get(g.name)
            if img is None or img.is_zero():
                img = LieElement(g.degree - 1)
            elif img.degree != g.degree - 1:
                raise ValueError(
                    f"d{g.name} has degree {img.degree}, expected {g.degree - 1}")
            self._dgen.append(img)
        self._lock = threading.RLock()
        self._bases: dict[int, DegreeBasis] = {}
        self._dmats: dict[int, list[dict]] = {}
        self._homology: dict[int, Homology] = {}

    # -- elements -----------------------------------------------------------

    def gen(self, name: str) -> LieElement:
        i = self.index[name]
        return LieElement._raw(self.degrees[i], {(i,): ONE})

    def zero(self, degree: int) -> LieElement:
        return LieElement._raw(degree, {})

    def differential_of(self, name: str) -> LieElement:
        return self._dgen[self.index[name]]

    def word_degree(self, word: Iterable[int]) -> int:
        return sum(self.degrees[i] for i in word)

    def bracket(self, a: LieElement, b: LieElement) -> LieElement:
        if a.degree + b.degree > self.degree_cap:
            raise DegreeCapError(
                f"bracket of degree {a.degree + b.degree} exceeds cap {self.degree_cap}")
        return bracket(a, b)

    def apply_differential(self, a: LieElement) -> LieElement:
        """Extend ``d`` on generators to words as a graded derivation."""
        out: dict = {}
        for word, c in a.terms.items():
            before = 0
            for pos, g in enumerate(word):
                dg = self._dgen[g]
                if dg.terms:
                    coeff = c * _sign(before)
                    head, tail = word[:pos], word[pos + 1:]
                    for w, v in dg.terms.items():
                        key = head + w + tail
                        new = out.get(key, ZERO) + coeff * v
                        if new:
                            out[key] = new
                        else:
                            out.pop(key, None)
                before += self.degrees[g]
        return LieElement._raw(a.degree - 1, out)

    d = apply_differential

    def check_d_squared(self) -> list[str]:
        """Generators ``g`` (with ``|g| <= cap``) for which ``d(d g) != 0``."""
        failing = []
        for g, dg in zip(self.generators, self._dgen):
            if g.degree > self.degree_cap or g.degree < 2:
                continue
            if not self.apply_differential(dg).is_zero():
                failing.append(g.name)
        return failing

    # -- bases and coordinates ---------------------------------------------

    def _contents(self, n: int) -> list[tuple]:
        gens = sorted(range(len(self.generators)))
        out = []

        def rec(start, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for i in range(start, len(gens)):
                d = self.degrees[gens[i]]
                if d <= remaining:
                    acc.append(gens[i])
                    rec(i, remaining - d, acc)
                    acc.pop()

        rec(0, n, [])
        return out

    def basis(self, n: int) -> DegreeBasis:
        if n > self.degree_cap:
            raise DegreeCapError(f"degree {n} exceeds cap {self.degree_cap}")
        with self._lock:
            if n not in self._bases:
                self._bases[n] = self._build_basis(n)
            return self._bases[n]

    def _build_basis(self, n: int) -> DegreeBasis:
        db = DegreeBasis(n)
        if n < 1:
            return db
        for content in self._contents(n):
            ech = Echelon()
            for seq in _distinct_permutations(content):
                el = self.monomial(seq)
                if el.is_zero():
                    continue
                if ech.add(el.terms, tag=len(db.elements)):
                    db.sequences.append(seq)
                    db.elements.append(el)
            if len(ech):
                db.blocks[content] = ech
        return db

    def monomial(self, seq: Sequence[int]) -> LieElement:
        """Right-normed bracket ``[g1,[g2,[...,gm]]]`` (no cap check)."""
        el = LieElement._raw(self.degrees[seq[-1]], {(seq[-1],): ONE})
        for g in reversed(seq[:-1]):
            el = bracket(LieElement._raw(self.degrees[g], {(g,): ONE}), el)
        return el

    def lie_basis(self, n: int) -> list[LieElement]:
        return list(self.basis(n).elements)

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def coords(self, x: LieElement) -> dict:
        """Coordinates of ``x`` on :meth:`basis` of its degree."""
        if not x.terms:
            return {}
        db = self.basis(x.degree)
        parts: dict = {}
        for w, c in x.terms.items():
            parts.setdefault(tuple(sorted(w)), {})[w] = c
        out: dict = {}
        for content, sub in parts.items():
            ech = db.blocks.get(content)
            combo = ech.express(sub) if ech is not None else None
            if combo is None:
                raise NotLieError(f"element of degree {x.degree} is not in the free Lie algebra")
            axpy(out, ONE, combo)
        return out

    def element(self, n: int, coords: Mapping[int, Fraction]) -> LieElement:
        db = self.basis(n)
        out: dict = {}
        for j, c in coords.items():
            axpy(out, c, db.elements[j].terms)
        return LieElement._raw(n, out)

    def is_lie(self, x: LieElement) -> bool:
        """Membership in the Lie span; above the cap the Dynkin test is used."""
        if x.degree > self.degree_cap:
            return is_lie_dynkin(x, self.degrees)
        try:
            self.coords(x)
        except NotLieError:
            return False
        return True

    def d_matrix(self, n: int) -> list[dict]:
        """Columns of ``d: L_n -> L_{n-1}`` in basis coordinates."""
        with self._lock:
            if n not in self._dmats:
                db = self.basis(n)
                if n - 1 >= 1:
                    self.basis(n - 1)
                    cols = [self.coords(self.apply_differential(e)) for e in db.elements]
                else:
                    cols = [{} for _ in db.elements]
                self._dmats[n] = cols
            return self._dmats[n]

    def d_coords(self, n: int, v: Mapping[int, Fraction]) -> dict:
        cols = self.d_matrix(n)
        return combine((c, cols[j]) for j, c in v.items())

    # -- homology -------------------------------------------------------------

    def homology(self, n: int) -> Homology:
        if n < 1 or n + 1 > self.degree_cap:
            raise DegreeCapError(
                f"degree cap insufficient: H_{n} needs degree {n + 1} but cap is {self.degree_cap}")
        with self._lock:
            if n not in self._homology:
                self._homology[n] = self._build_homology(n)
            return self._homology[n]

    def _build_homology(self, n: int) -> Homology:
        cycles = sparse_kernel(self.d_matrix(n))
        ech = Echelon()
        boundaries = []
        for col in self.d_matrix(n + 1):
            if ech.add(col, tag=("b", len(boundaries))):
                boundaries.append(col)
        reps = []
        for z in cycles:
            if ech.add(z, tag=("h", len(reps))):
                reps.append(z)
        return Homology(n, cycles, boundaries, reps,
                        [self.element(n, r) for r in reps], ech)

    def random_element(self, n: int, rng: random.Random, terms: int = 3) -> LieElement:
        db = self.basis(n)
        if not len(db):
            return self.zero(n)
        coords = {}
        for _ in range(terms):
            coords[rng.randrange(len(db))] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        return self.element(n, {j: c for j, c in coords.items() if c})

    # -- printing -----------------------------------------------------------

    def monomial_str(self, seq: Sequence[int]) -> str:
        names = [self.generators[g].name for g in seq]
        s = names[-1]
        for nm in reversed(names[:-1]):
            s = f"[{nm},{s}]"
        return s

    def format(self, x: LieElement) -> str:
        """Expression-grammar rendering, round-trippable through the parser."""
        if x.is_zero():
            return "0"
        db = self.basis(x.degree)
        parts = []
        for j, c in sorted(self.coords(x).items()):
            mono = self.monomial_str(db.sequences[j])
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s
