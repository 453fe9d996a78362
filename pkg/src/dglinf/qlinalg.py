"""Exact linear algebra over the rationals.

Everything downstream works with sparse vectors, ``dict`` from a sortable key
(usually an ``int``) to :class:`fractions.Fraction`.  The dense
:class:`Vector` / :class:`LinearMap` types wrap those for callers that want
labelled, fixed-length data.

Pivoting is deterministic: a vector's pivot is its smallest key, and columns
are processed in index order.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

SparseVec = dict


class DimensionError(ValueError):
    pass


class DependentVectorsError(ValueError):
    pass


# --- sparse helpers -------------------------------------------------------

def axpy(y: dict, a, x: Mapping) -> dict:
    """In place ``y += a * x``; drops entries that cancel."""
    if not a:
        return y
    for key, value in x.items():
        new = y.get(key, ZERO) + a * value
        if new:
            y[key] = new
        else:
            y.pop(key, None)
    return y


def scaled(x: Mapping, a) -> dict:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def add(*vectors: Mapping) -> dict:
    out: dict = {}
    for v in vectors:
        axpy(out, ONE, v)
    return out


def combine(pairs: Iterable[tuple[object, Mapping]]) -> dict:
    """Sum of ``coeff * vec`` over ``pairs``."""
    out: dict = {}
    for coeff, vec in pairs:
        axpy(out, coeff, vec)
    return out


class Echelon:
    """Incrementally built echelon form with optional combination tracking.

    Each stored row is normalised to have coefficient 1 at its pivot (the
    smallest key).  When a vector is added with a ``tag``, the row remembers
    which combination of tagged inputs produced it, so :meth:`express` can
    write any vector in the span in terms of the original inputs.
    """

    def __init__(self):
        self._rows: dict = {}      # pivot -> row
        self._combos: dict = {}    # pivot -> {tag: coeff}
        self._order: list = []     # sorted pivots

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list:
        return list(self._order)

    def reduce(self, v: Mapping, track: bool = False):
        """Return ``(residual, combo)`` with ``v = residual + sum combo[t]*input_t``."""
        r = dict(v)
        combo: dict = {}
        if not r:
            return r, combo
        for p in self._order:
            c = r.get(p)
            if c:
                axpy(r, -c, self._rows[p])
                if track:
                    axpy(combo, c, self._combos[p])
        return r, combo

    def add(self, v: Mapping, tag: Hashable = None) -> bool:
        """Add ``v``; return False (and store nothing) if it is dependent."""
        track = tag is not None
        r, combo = self.reduce(v, track=track)
        if not r:
            return False
        p = min(r)
        inv = ONE / r[p]
        row = {k: c * inv for k, c in r.items()}
        if track:
            combo = {t: -c * inv for t, c in combo.items()}
            combo[tag] = combo.get(tag, ZERO) + inv
            combo = {t: c for t, c in combo.items() if c}
        self._rows[p] = row
        self._combos[p] = combo
        bisect.insort(self._order, p)
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)[0]

    def express(self, v: Mapping):
        """Coefficients of ``v`` on the tagged inputs, or None if outside the span."""
        r, combo = self.reduce(v, track=True)
        if r:
            return None
        return combo


def independent_subset(vectors: Sequence[Mapping]) -> list[int]:
    """Indices of the greedy (leftmost) maximal independent subset."""
    ech = Echelon()
    return [j for j, v in enumerate(vectors) if ech.add(v)]


def sparse_rank(vectors: Iterable[Mapping]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)


def sparse_solve(columns: Sequence[Mapping], b: Mapping):
    """Some ``x`` (sparse, keyed by column index) with ``sum x_j col_j = b``, else None.

    Dependent columns get coefficient zero, which gives the reduced echelon
    particular solution.
    """
    ech = Echelon()
    for j, col in enumerate(columns):
        ech.add(col, tag=j)
    return ech.express(b)


def sparse_kernel(columns: Sequence[Mapping]) -> list[dict]:
    """Kernel basis of the map with the given columns, in reduced echelon form.

    One vector per non-pivot column ``j``: ``e_j`` minus its expression in the
    earlier pivot columns.
    """
    ech = Echelon()
    basis = []
    for j, col in enumerate(columns):
        if not ech.add(col, tag=j):
            combo = ech.express(col)
            vec = {t: -c for t, c in combo.items()}
            vec[j] = ONE
            basis.append(vec)
    return basis


def sparse_complement(span: Sequence[Mapping], dim: int) -> list[int]:
    """Indices of unit vectors completing ``span`` to a basis of ``Q^dim``."""
    ech = Echelon()
    for v in span:
        if not ech.add(v):
            raise DependentVectorsError("span vectors are linearly dependent")
    return [i for i in range(dim) if ech.add({i: ONE})]


# --- dense, labelled interface -------------------------------------------

@dataclass(frozen=True)
class Basis:
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def standard(cls, n: int, prefix: str = "e") -> "Basis":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)))


@dataclass(frozen=True)
class Vector:
    basis: Basis
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.basis):
            raise DimensionError(
                f"vector has {len(self.coeffs)} entries for a basis of size {len(self.basis)}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def of(cls, basis: Basis, coeffs: Iterable) -> "Vector":
        return cls(basis, tuple(coeffs))

    @classmethod
    def from_sparse(cls, basis: Basis, vec: Mapping[int, Fraction]) -> "Vector":
        coeffs = [ZERO] * len(basis)
        for i, c in vec.items():
            coeffs[i] = c
        return cls(basis, tuple(coeffs))

    def sparse(self) -> dict:
        return {i: c for i, c in enumerate(self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class LinearMap:
    domain: Basis
    codomain: Basis
    columns: tuple[Vector, ...]

    def __post_init__(self):
        if len(self.columns) != len(self.domain):
            raise DimensionError("column count must equal the domain dimension")
        for col in self.columns:
            if col.basis != self.codomain:
                raise DimensionError("every column must live in the codomain basis")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], domain: Basis | None = None,
                  codomain: Basis | None = None) -> "LinearMap":
        m = len(rows)
        n = len(rows[0]) if rows else 0
        domain = domain or Basis.standard(n)
        codomain = codomain or Basis.standard(m, "f")
        cols = tuple(Vector(codomain, tuple(rows[i][j] for i in range(m))) for j in range(n))
        return cls(domain, codomain, cols)

    @classmethod
    def identity(cls, basis: Basis) -> "LinearMap":
        n = len(basis)
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], basis, basis)

    @classmethod
    def zero(cls, domain: Basis, codomain: Basis) -> "LinearMap":
        cols = tuple(Vector(codomain, (ZERO,) * len(codomain)) for _ in domain.labels)
        return cls(domain, codomain, cols)

    def __call__(self, x: Vector) -> Vector:
        if x.basis != self.domain:
            raise DimensionError("argument is not in the domain basis")
        out = combine((c, col.sparse()) for c, col in zip(x.coeffs, self.columns))
        return Vector.from_sparse(self.codomain, out)

    def sparse_columns(self) -> list[dict]:
        return [col.sparse() for col in self.columns]


def solve(M: LinearMap, b: Vector) -> Vector | None:
    if b.basis != M.codomain:
        raise DimensionError("right-hand side is not in the codomain basis")
    x = sparse_solve(M.sparse_columns(), b.sparse())
    if x is None:
        return None
    return Vector.from_sparse(M.domain, x)


def kernel_basis(M: LinearMap) -> list[Vector]:
    return [Vector.from_sparse(M.domain, v) for v in sparse_kernel(M.sparse_columns())]


def rank(M: LinearMap) -> int:
    return sparse_rank(M.sparse_columns())


def complement(span: Sequence[Vector], within: Basis) -> list[Vector]:
    for v in span:
        if v.basis != within:
            raise DimensionError("span vector outside the ambient basis")
    idx = sparse_complement([v.sparse() for v in span], len(within))
    return [Vector.from_sparse(within, {i: ONE}) for i in idx]


def determinant(rows: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact elimination (used by tests and checks)."""
    m = [[Fraction(x) for x in row] for row in rows]
    n = len(m)
    det = ONE
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return det
