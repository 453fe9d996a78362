"""Homotopy retracts ``(L, i, q, K)`` from decompositions ``L = A + dA + C``.

Per degree ``n`` the decomposition is ``L_n = A_n + d(A_{n+1}) + C_n`` with
``A_n`` a complement of the cycles ``Z_n`` and ``C_n`` a complement of the
boundaries inside ``Z_n``.  ``K`` sends ``d a`` to ``a`` and kills ``A`` and
``C``; ``q`` projects onto ``C`` and reads off the homology class; ``i``
inverts that on ``C``.  Everything is stored in basis coordinates of the
DGL and is valid for degrees ``1 .. cap - 1``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .freelie import DegreeCapError, FreeDGL, LieElement
from .qlinalg import ONE, DependentVectorsError, Echelon, axpy, combine, sparse_kernel


class RetractError(ValueError):
    pass


@dataclass(frozen=True)
class HClass:
    """A homology basis element: local index ``index`` in ``H_degree``."""

    degree: int
    index: int
    rep: LieElement

    @property
    def label(self) -> str:
        return f"h{self.degree}_{self.index}"


@dataclass
class AdaptedCertificate:
    """Why no retract contains the requested elements in ``A``."""

    degree: int
    reason: str
    combination: dict = field(default_factory=dict)   # generator name -> coefficient
    cycle: LieElement | None = None


@dataclass
class _Degree:
    n: int
    A: list
    dA: list = field(default_factory=list)
    C: list = field(default_factory=list)
    split: Echelon | None = None
    i_cols: list = field(default_factory=list)


class Retract:
    """Homotopy retract built from per-degree ``A`` and ``C`` bases (coordinates)."""

    def __init__(self, dgl: FreeDGL, A: Mapping[int, Sequence[dict]],
                 C: Mapping[int, Sequence[dict]] | None = None, label: str = ""):
        self.dgl = dgl
        self.cap = dgl.degree_cap
        self.label = label
        C = dict(C or {})
        self._deg: dict[int, _Degree] = {}
        for n in range(1, self.cap + 1):
            self._deg[n] = _Degree(n, [dict(a) for a in A.get(n, [])])
        for n in range(1, self.cap):
            self._fill(n, C.get(n))
        self.h_basis: list[HClass] = []
        self._h_index: dict[tuple[int, int], int] = {}
        for n in range(1, self.cap):
            for j, rep in enumerate(dgl.homology(n).representatives):
                self._h_index[(n, j)] = len(self.h_basis)
                self.h_basis.append(HClass(n, j, rep))

    @property
    def max_degree(self) -> int:
        """Largest degree on which ``i``, ``q`` and ``K`` are defined."""
        return self.cap - 1

    def _fill(self, n: int, c_choice) -> None:
        L = self.dgl
        d = self._deg[n]
        d.dA = [L.d_coords(n + 1, a) for a in self._deg[n + 1].A]
        hom = L.homology(n)
        split = Echelon()
        for j, a in enumerate(d.A):
            split.add(a, tag=("A", j))
        for j, b in enumerate(d.dA):
            if not split.add(b, tag=("D", j)):
                raise RetractError(f"d(A_{n + 1}) is degenerate in degree {n}")
        C = [dict(c) for c in (c_choice or [])]
        for j, c in enumerate(C):
            if L.d_coords(n, c):
                raise RetractError(f"C_{n} element {j} is not a cycle")
            if not split.add(c, tag=("C", j)):
                raise RetractError(f"C_{n} element {j} is dependent on A + dA + earlier C")
        for rep in hom.rep_coords:
            if len(C) >= hom.dimension:
                break
            if split.add(rep, tag=("C", len(C))):
                C.append(dict(rep))
        if len(C) != hom.dimension or len(split) != L.dim(n):
            raise RetractError(
                f"degree {n}: A + dA + C has dimension {len(split)}, L_{n} has {L.dim(n)}")
        d.C = C
        d.split = split
        # i: express each homology basis vector through the classes of C
        classes = Echelon()
        for j, c in enumerate(C):
            classes.add(hom.classify(c), tag=j)
        d.i_cols = []
        for h in range(hom.dimension):
            m = classes.express({h: ONE})
            d.i_cols.append(combine((coef, C[l]) for l, coef in m.items()))

    # -- the structure maps, in coordinates ---------------------------------

    def _check(self, n: int) -> _Degree:
        if not 1 <= n <= self.max_degree:
            raise DegreeCapError(f"retract maps need 1 <= degree <= {self.max_degree}, got {n}")
        return self._deg[n]

    def components(self, n: int, v: Mapping) -> dict:
        d = self._check(n)
        combo = d.split.express(v)
        if combo is None:
            raise RetractError("decomposition does not span")
        return combo

    def K_coords(self, n: int, v: Mapping) -> dict:
        comp = self.components(n, v)
        A_up = self._deg[n + 1].A
        return combine((c, A_up[t[1]]) for t, c in comp.items() if t[0] == "D")

    def q_coords(self, n: int, v: Mapping) -> dict:
        """Homology class (local coordinates in ``H_n``) of the ``C``-component."""
        d = self._check(n)
        comp = self.components(n, v)
        cpart = combine((c, d.C[t[1]]) for t, c in comp.items() if t[0] == "C")
        return self.dgl.homology(n).classify(cpart) if cpart else {}

    def i_coords(self, n: int, h: Mapping) -> dict:
        d = self._check(n)
        return combine((c, d.i_cols[j]) for j, c in h.items())

    # -- element-level wrappers ------------------------------------------------

    def K(self, x: LieElement) -> LieElement:
        n = x.degree
        if x.is_zero():
            return self.dgl.zero(n + 1)
        return self.dgl.element(n + 1, self.K_coords(n, self.dgl.coords(x)))

    def q(self, x: LieElement) -> dict:
        """Global homology-basis coordinates of ``q(x)``."""
        if x.is_zero():
            return {}
        local = self.q_coords(x.degree, self.dgl.coords(x))
        return {self._h_index[(x.degree, j)]: c for j, c in local.items()}

    def i(self, h: int | Mapping[int, Fraction]) -> LieElement:
        if isinstance(h, int):
            h = {h: ONE}
        if not h:
            raise ValueError("i() of the empty class needs a degree; use i_degree")
        n = self.h_basis[next(iter(h))].degree
        local = {}
        for g, c in h.items():
            cls = self.h_basis[g]
            if cls.degree != n:
                raise ValueError("inhomogeneous homology element")
            local[cls.index] = c
        return self.dgl.element(n, self.i_coords(n, local))

    def h_index(self, degree: int, local: int) -> int:
        return self._h_index[(degree, local)]

    def h_degree(self, g: int) -> int:
        return self.h_basis[g].degree

    def classify(self, x: LieElement) -> dict:
        """Global homology coordinates of a cycle (independent of the decomposition)."""
        if x.is_zero():
            return {}
        local = self.dgl.homology(x.degree).classify(self.dgl.coords(x))
        return {self._h_index[(x.degree, j)]: c for j, c in local.items()}

    def A_basis(self, n: int) -> list[LieElement]:
        return [self.dgl.element(n, a) for a in self._deg[n].A]

    def C_basis(self, n: int) -> list[LieElement]:
        return [self.dgl.element(n, c) for c in self._deg[n].C]

    def dA_basis(self, n: int) -> list[LieElement]:
        return [self.dgl.element(n, b) for b in self._deg[n].dA]

    # -- serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        out = {"dgl": self.dgl.title, "cap": self.cap, "label": self.label, "degrees": {}}
        for n in range(1, self.cap + 1):
            entry = {"A": [self.dgl.format(a) for a in self.A_basis(n)]}
            if n < self.cap:
                entry["C"] = [self.dgl.format(c) for c in self.C_basis(n)]
            if entry["A"] or entry.get("C"):
                out["degrees"][str(n)] = entry
        return out


# -- construction -------------------------------------------------------------

def _cycles_echelon(L: FreeDGL, n: int) -> tuple[Echelon, list[dict]]:
    Z = sparse_kernel(L.d_matrix(n))
    ech = Echelon()
    for z in Z:
        ech.add(z)
    return ech, Z


def complete_A(L: FreeDGL, n: int, chosen: Sequence[dict], names: Sequence[str] | None = None):
    """Extend ``chosen`` to a complement of ``Z_n``; certificate on failure.

    Returns ``(A, None)`` or ``(None, AdaptedCertificate)``.
    """
    names = list(names) if names is not None else [f"a{j}" for j in range(len(chosen))]
    indep = Echelon()
    for j, v in enumerate(chosen):
        if not indep.add(v, tag=j):
            combo = indep.express(v)
            comb = {names[j]: ONE}
            for t, c in combo.items():
                comb[names[t]] = comb.get(names[t], 0) - c
            return None, AdaptedCertificate(n, "chosen elements are linearly dependent", comb)
    images = [L.d_coords(n, v) for v in chosen]
    ker = sparse_kernel(images)
    if ker:
        k = ker[0]
        cyc = L.element(n, combine((c, chosen[j]) for j, c in k.items()))
        return None, AdaptedCertificate(
            n, "a combination of the chosen elements is a cycle",
            {names[j]: c for j, c in k.items()}, cyc)
    Zech, Z = _cycles_echelon(L, n)
    for v in chosen:
        Zech.add(v)
    A = [dict(v) for v in chosen]
    for i in range(L.dim(n)):
        if Zech.add({i: ONE}):
            A.append({i: ONE})
    if len(A) != L.dim(n) - len(Z):
        return None, AdaptedCertificate(n, "dimension mismatch completing A")
    return A, None


def retract_from_decomposition(L: FreeDGL, A_choice: Mapping[int, Sequence] | None = None,
                               C_choice: Mapping[int, Sequence] | None = None,
                               label: str = "") -> Retract:
    """Retract whose ``A_n`` contains ``A_choice[n]`` (elements or coordinates).

    Degrees without a choice, and the rest of each partial choice, are filled
    greedily in basis order.
    """
    A_choice = {n: [_as_coords(L, x) for x in xs] for n, xs in (A_choice or {}).items()}
    C_choice = {n: [_as_coords(L, x) for x in xs] for n, xs in (C_choice or {}).items()}
    for n in list(A_choice) + list(C_choice):
        if n > L.degree_cap:
            raise DegreeCapError(f"choice in degree {n} exceeds cap {L.degree_cap}")
    A = {}
    for n in range(1, L.degree_cap + 1):
        chosen = A_choice.get(n, [])
        Zdim = len(sparse_kernel(L.d_matrix(n)))
        if len(chosen) > L.dim(n) - Zdim:
            raise RetractError(
                f"degree {n}: {len(chosen)} elements chosen but A_{n} has dimension {L.dim(n) - Zdim}")
        A[n], cert = complete_A(L, n, chosen)
        if cert is not None:
            raise RetractError(f"degree {n}: {cert.reason}")
    return Retract(L, A, C_choice, label)


def _as_coords(L: FreeDGL, x) -> dict:
    if isinstance(x, LieElement):
        return L.coords(x)
    return dict(x)


def random_retract(L: FreeDGL, seed: int) -> Retract:
    """Reproducible random retract: perturbs the greedy ``A`` by cycles and shears,
    and moves the ``C`` representatives by random boundaries."""
    rng = random.Random(seed)
    A, C = {}, {}
    for n in range(1, L.degree_cap + 1):
        Zech, Z = _cycles_echelon(L, n)
        base = [{i: ONE} for i in range(L.dim(n)) if Zech.add({i: ONE})]
        out = []
        for j, a in enumerate(base):
            v = dict(a)
            if j and rng.random() < 0.5:
                axpy(v, Fraction(rng.choice([-2, -1, 1, 2])), base[rng.randrange(j)])
            for _ in range(min(2, len(Z))):
                axpy(v, Fraction(rng.randint(-2, 2)), Z[rng.randrange(len(Z))])
            out.append(v)
        A[n] = out
    for n in range(1, L.degree_cap):
        hom = L.homology(n)
        reps = []
        for r in hom.rep_coords:
            v = dict(r)
            for _ in range(min(2, len(hom.boundaries))):
                axpy(v, Fraction(rng.randint(-2, 2)), hom.boundaries[rng.randrange(len(hom.boundaries))])
            reps.append(v)
        C[n] = reps
    return Retract(L, A, C, label=f"random:{seed}")


def load_retract(L: FreeDGL, data: dict) -> Retract:
    from .dglparse import parse_expression
    A, C = {}, {}
    for key, entry in data.get("degrees", {}).items():
        n = int(key)
        A[n] = [parse_expression(s, L) for s in entry.get("A", [])]
        if entry.get("C"):
            C[n] = [parse_expression(s, L) for s in entry["C"]]
    return retract_from_decomposition(L, A, C, label=data.get("label", "file"))


def dump_retract(r: Retract) -> str:
    return json.dumps(r.to_json(), indent=2)


# -- verification -------------------------------------------------------------

def verify_retract(r: Retract, max_degree: int | None = None) -> dict:
    """Check every retract identity on every basis element, degree by degree."""
    L = r.dgl
    top = min(r.max_degree, max_degree or r.max_degree)
    checks = {name: [] for name in (
        "qi = id", "id - iq = dK + Kd", "dKd = d", "KK = 0", "KA = 0", "KC = 0",
        "qK = 0", "Ki = 0", "di = 0", "qd = 0")}

    def fail(name, n, j):
        checks[name].append({"degree": n, "basis_index": j})

    for n in range(1, top + 1):
        hom = L.homology(n)
        for h in range(hom.dimension):
            iv = r.i_coords(n, {h: ONE})
            if r.q_coords(n, iv) != {h: ONE}:
                fail("qi = id", n, h)
            if L.d_coords(n, iv):
                fail("di = 0", n, h)
            if r.K_coords(n, iv):
                fail("Ki = 0", n, h)
        for j in range(L.dim(n)):
            e = {j: ONE}
            dv = L.d_coords(n, e)
            kv = r.K_coords(n, e)
            lhs = axpy(dict(e), -ONE, r.i_coords(n, r.q_coords(n, e)))
            rhs = L.d_coords(n + 1, kv)
            kd = r.K_coords(n - 1, dv) if n > 1 and dv else {}
            axpy(rhs, ONE, kd)
            if lhs != rhs:
                fail("id - iq = dK + Kd", n, j)
            if n > 1 and dv:
                if L.d_coords(n, r.K_coords(n - 1, dv)) != dv:
                    fail("dKd = d", n, j)
                if r.q_coords(n - 1, dv):
                    fail("qd = 0", n, j)
            if kv and n + 1 <= r.max_degree:
                if r.K_coords(n + 1, kv):
                    fail("KK = 0", n, j)
                if r.q_coords(n + 1, kv):
                    fail("qK = 0", n, j)
        d = r._deg[n]
        for j, a in enumerate(d.A):
            if r.K_coords(n, a):
                fail("KA = 0", n, j)
        for j, c in enumerate(d.C):
            if r.K_coords(n, c):
                fail("KC = 0", n, j)
    results = {name: {"pass": not fails, "failures": fails[:5]} for name, fails in checks.items()}
    return {"pass": all(v["pass"] for v in results.values()), "max_degree": top,
            "identities": results}


def adapted_retract(L: FreeDGL, ext, C_choice: Mapping[int, Sequence] | None = None
                    ) -> tuple[Retract | None, AdaptedCertificate | None]:
    """Retract with ``phi(V)`` inside ``A``, for an extension ``ext``.

    ``C_choice`` optionally fixes cycle representatives (e.g. the images of
    the sphere generators) so that ``i`` sends their classes back to them.

    ``ext`` provides ``higher_assignments()`` -> {generator name: element of L}.
    On success, ``K d phi(u) = phi(u)`` is asserted for every such generator.
    """
    if hasattr(ext, "check_chain_map"):
        bad = ext.check_chain_map()
        if bad:
            raise ValueError(f"extension is not a chain map on {bad}")
    by_degree: dict[int, list] = {}
    for name, val in ext.higher_assignments().items():
        if val.is_zero():
            return None, AdaptedCertificate(val.degree, f"phi({name}) = 0 is a cycle", {name: ONE}, val)
        by_degree.setdefault(val.degree, []).append((name, val))
    A = {}
    for n in range(1, L.degree_cap + 1):
        items = by_degree.get(n, [])
        A[n], cert = complete_A(L, n, [L.coords(v) for _, v in items], [nm for nm, _ in items])
        if cert is not None:
            return None, cert
    for n in by_degree:
        if n > L.degree_cap:
            raise DegreeCapError(f"phi(V) reaches degree {n} beyond cap {L.degree_cap}")
    C = {n: [_as_coords(L, x) for x in xs] for n, xs in (C_choice or {}).items()}
    r = Retract(L, A, C, label="adapted")
    for name, val in ext.higher_assignments().items():
        if val.degree - 1 <= r.max_degree and val.degree - 1 >= 1:
            if r.K(L.apply_differential(val)) != val:
                raise RetractError(f"K d phi({name}) != phi({name}) on an adapted retract")
    return r, None
