"""Fat-wedge models, extensions, Whitehead elements and the bracket verifiers.

The model of the fat wedge of spheres ``S^{n_1}, ..., S^{n_k}`` is the free
DGL on ``u_I`` (``I`` a nonempty proper subset of ``{1..k}``) with
``|u_I| = sum_{i in I} n_i - 1`` and

    d u_I = sum_{p=1}^{s-1} sum_{sigma anchored (p, s-p)-shuffle}
            eps(sigma) [u_{I_sigma(1..p)}, u_{I_sigma(p+1..s)}]

where ``eps(sigma) = koszul(sigma; n_i) * (-1)^{|u_A|}`` with ``u_A`` the
left entry.  ``omega`` is the same expression for the full index set.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .freelie import DegreeCapError, FreeDGL, Generator, LieElement, bracket
from .qlinalg import ONE, ZERO, Echelon, axpy, sparse_solve
from .retract import Retract, adapted_retract
from .signs_trees import anchored_shuffles, koszul_sign
from .transfer import (TransferEngine, bracket_image_span, compute_table,
                       epsilon_sign)

DEFAULT_GRID = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(1, 2), Fraction(1), Fraction(2))


def _pm(e: int) -> int:
    return -1 if e % 2 else 1


def subset_name(I: Sequence[int]) -> str:
    return "u" + "".join(str(i) for i in I)


# -- the model ---------------------------------------------------------------------

@dataclass
class WedgeModel:
    spheres: tuple
    subsets: list                      # proper nonempty subsets, by size then lex
    dgl: FreeDGL                       # the fat-wedge model L(U)
    omega: LieElement

    @property
    def k(self) -> int:
        return len(self.spheres)

    @property
    def N(self) -> int:
        return sum(self.spheres)

    def gen_degree(self, I: Sequence[int]) -> int:
        return sum(self.spheres[i - 1] for i in I) - 1

    def name(self, I: Sequence[int]) -> str:
        return subset_name(I)

    def gen(self, I: Sequence[int]) -> LieElement:
        return self.dgl.gen(self.name(I))

    def boundary_of(self, I: Sequence[int]) -> LieElement:
        """``d u_I``, or ``omega`` for the full index set."""
        if len(I) == self.k:
            return self.omega
        return self.dgl.differential_of(self.name(I))

    def product_dgl(self, cap: int | None = None, title: str = "") -> FreeDGL:
        """The model with the top cell attached: ``d u_{1..k} = omega``."""
        top = tuple(range(1, self.k + 1))
        gens = list(self.dgl.generators) + [Generator(self.name(top), self.N - 1)]
        diff = {g.name: self.dgl.differential_of(g.name) for g in self.dgl.generators}
        # reindex omega's words: the new generator is appended so indices are unchanged
        diff[self.name(top)] = self.omega
        return FreeDGL(gens, diff, cap or self.N, title)


def _shuffle_sum(spheres, I, el) -> LieElement:
    s = len(I)
    total = None
    for p in range(1, s):
        for sig in anchored_shuffles(p, s - p):
            J = [I[j - 1] for j in sig]
            A, B = tuple(sorted(J[:p])), tuple(sorted(J[p:]))
            degA = sum(spheres[i - 1] for i in A) - 1
            sgn = koszul_sign(sig, [spheres[i - 1] for i in I]) * _pm(degA)
            term = sgn * bracket(el(A), el(B))
            total = term if total is None else total + term
    return total


def build_fat_wedge(spheres: Sequence[int], cap: int | None = None, title: str = "") -> WedgeModel:
    spheres = tuple(int(n) for n in spheres)
    k = len(spheres)
    if k < 2:
        raise ValueError("a fat wedge needs k >= 2 spheres")
    if k > 9:
        raise ValueError("generator names support k <= 9")
    if any(n < 2 for n in spheres):
        raise ValueError("sphere dimensions must be >= 2")
    N = sum(spheres)
    cap = N - 1 if cap is None else cap
    if cap < N - 2:
        raise DegreeCapError(f"degree cap {cap} too small for omega in degree {N - 2}")
    subsets = [I for s in range(1, k) for I in itertools.combinations(range(1, k + 1), s)]
    gens = [Generator(subset_name(I), sum(spheres[i - 1] for i in I) - 1) for I in subsets]
    index = {I: j for j, I in enumerate(subsets)}

    def el(A):
        return LieElement(gens[index[A]].degree, {(index[A],): ONE})

    diff = {}
    for I in subsets:
        if len(I) >= 2:
            diff[subset_name(I)] = _shuffle_sum(spheres, I, el)
    omega = _shuffle_sum(spheres, tuple(range(1, k + 1)), el)
    title = title or "fat wedge " + ",".join(map(str, spheres))
    dgl = FreeDGL(gens, diff, cap, title)
    bad = dgl.check_d_squared()
    if bad:
        raise AssertionError(f"fat-wedge differential fails d^2 = 0 on {bad}")
    if not dgl.apply_differential(omega).is_zero():
        raise AssertionError("d omega != 0 in the fat-wedge model")
    return WedgeModel(spheres, subsets, dgl, omega)


# -- extensions ------------------------------------------------------------------------

@dataclass
class Extension:
    """A (partial) DGL morphism ``phi: L(U) -> L`` given on generators."""

    model: WedgeModel
    target: FreeDGL
    phi: dict                            # generator name -> element of target
    log: list = field(default_factory=list)

    @property
    def stage(self) -> int:
        """Largest ``s`` such that every ``u_I`` with ``|I| <= s`` is assigned."""
        s = 0
        for size in range(1, self.model.k):
            if all(self.model.name(I) in self.phi for I in self.model.subsets if len(I) == size):
                s = size
            else:
                break
        return s

    @property
    def total(self) -> bool:
        return self.stage == self.model.k - 1

    def higher_assignments(self) -> dict:
        return {self.model.name(I): self.phi[self.model.name(I)]
                for I in self.model.subsets if len(I) >= 2 and self.model.name(I) in self.phi}

    def reps(self) -> list[LieElement]:
        return [self.phi[self.model.name((i,))] for i in range(1, self.model.k + 1)]

    def apply(self, x: LieElement) -> LieElement:
        """Image of a model element (word substitution into the target)."""
        gens = self.model.dgl.generators
        images = []
        for g in gens:
            images.append(self.phi.get(g.name))
        out: dict = {}
        for word, c in x.terms.items():
            acc = {(): c}
            for letter in word:
                img = images[letter]
                if img is None:
                    raise KeyError(f"phi({gens[letter].name}) is not assigned")
                nxt: dict = {}
                for w1, c1 in acc.items():
                    for w2, c2 in img.terms.items():
                        axpy(nxt, c1 * c2, {w1 + w2: ONE})
                acc = nxt
            axpy(out, ONE, acc)
        return LieElement(x.degree, out)

    def check_chain_map(self) -> list[str]:
        """Generators where ``d phi(u) != phi(d u)``."""
        bad = []
        L = self.target
        for I in self.model.subsets:
            nm = self.model.name(I)
            if nm not in self.phi:
                continue
            lhs = L.apply_differential(self.phi[nm])
            rhs = self.apply(self.model.boundary_of(I)) if len(I) >= 2 else L.zero(lhs.degree)
            if lhs != rhs:
                bad.append(nm)
        return bad


@dataclass
class Obstruction:
    generator: str
    degree: int
    class_coords: dict                   # local coordinates in H_degree(target)
    element: LieElement


def identity_extension(model: WedgeModel, L: FreeDGL | None = None) -> Extension:
    """``phi(u_I) = u_I`` into the model itself (or any DGL with those generators)."""
    L = L or model.dgl
    phi = {model.name(I): L.gen(model.name(I)) for I in model.subsets}
    return Extension(model, L, phi)


def extension_from_names(model: WedgeModel, L: FreeDGL, assignment: Mapping[str, LieElement]) -> Extension:
    return Extension(model, L, dict(assignment))


def _solve_boundary(L: FreeDGL, target: LieElement) -> LieElement | None:
    n = target.degree + 1
    if target.is_zero():
        return L.zero(n)
    sol = sparse_solve(L.d_matrix(n), L.coords(target))
    return None if sol is None else L.element(n, sol)


def extend(model: WedgeModel, L: FreeDGL, reps: Sequence[LieElement], strategy: str = "echelon",
           retract: Retract | None = None, perturb: Mapping[str, LieElement] | None = None,
           base: Mapping[str, LieElement] | None = None):
    """Solve the extension stage by stage.

    Returns ``(Extension, None)`` when every generator is assigned, otherwise
    ``(partial Extension, Obstruction)`` at the first unsolvable generator.
    ``perturb`` adds a cycle to the chosen solution of the named generators.
    With ``base`` (echelon strategy), a generator keeps its base value ``y0``
    corrected by a particular solution of ``d y = phi(d u) - d y0``.
    """
    if strategy not in ("echelon", "K-image"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "K-image" and retract is None:
        raise ValueError("the K-image strategy needs a retract")
    if len(reps) != model.k:
        raise ValueError(f"need {model.k} representatives, got {len(reps)}")
    perturb = dict(perturb or {})
    phi = {}
    for i, rep in enumerate(reps, start=1):
        want = model.spheres[i - 1] - 1
        if rep.degree != want:
            raise ValueError(f"representative {i} has degree {rep.degree}, expected {want}")
        if not L.apply_differential(rep).is_zero():
            raise ValueError(f"representative {i} is not a cycle")
        phi[model.name((i,))] = rep
    ext = Extension(model, L, phi)
    for I in model.subsets:
        if len(I) < 2:
            continue
        nm = model.name(I)
        deg = model.gen_degree(I)
        if deg > L.degree_cap:
            raise DegreeCapError(f"degree cap insufficient: {nm} has degree {deg}, cap {L.degree_cap}")
        target = ext.apply(model.boundary_of(I))
        if not L.apply_differential(target).is_zero():
            raise AssertionError(f"phi(d {nm}) is not a cycle")
        if strategy == "K-image":
            y = retract.K(target) if not target.is_zero() else L.zero(deg)
            if L.apply_differential(y) != target:
                y = None
        elif base and nm in base:
            y0 = base[nm]
            y = _solve_boundary(L, target - L.apply_differential(y0))
            y = None if y is None else y0 + y
        else:
            y = _solve_boundary(L, target)
        if y is None:
            cls = L.homology(deg - 1).classify(L.coords(target))
            ext.log.append({"generator": nm, "status": "obstructed"})
            return ext, Obstruction(nm, deg - 1, cls, target)
        if nm in perturb:
            y = y + perturb[nm]
        phi[nm] = y
        ext.log.append({"generator": nm, "status": "solved"})
    return ext, None


def whitehead_element(ext: Extension) -> dict:
    """Local coordinates in ``H_{N-2}`` of the class of ``phi(omega)``."""
    if not ext.total:
        raise ValueError("the extension is not total")
    w = ext.apply(ext.model.omega)
    L = ext.target
    if not L.apply_differential(w).is_zero():
        raise AssertionError("phi(omega) is not a cycle: the extension is not a chain map")
    return L.homology(w.degree).classify(L.coords(w)) if not w.is_zero() else {}


# -- probing the bracket set ---------------------------------------------------------

def _lagrange_derivative_at_zero(points: Sequence[Fraction]) -> list[Fraction]:
    """Weights ``w_j`` with ``f'(0) = sum w_j f(points[j])`` for polynomials of low degree."""
    weights = []
    for j, xj in enumerate(points):
        others = [x for i, x in enumerate(points) if i != j]
        denom = ONE
        for x in others:
            denom *= xj - x
        # derivative at 0 of prod (t - x) over others
        deriv = ZERO
        for a in range(len(others)):
            prod = ONE
            for b, x in enumerate(others):
                if b != a:
                    prod *= -x
            deriv += prod
        weights.append(deriv / denom)
    return weights


def _fmt(v: Mapping) -> dict:
    return {str(k): str(c) for k, c in sorted(v.items())}


def membership_probe(model: WedgeModel, L: FreeDGL, reps: Sequence[LieElement],
                     target: Mapping[int, Fraction], budget: int = 400,
                     grid: Sequence[Fraction] = DEFAULT_GRID, seed: int = 0,
                     initial: Mapping[str, LieElement] | None = None) -> dict:
    """Search the bracket set for ``target`` by perturbing stage assignments.

    ``initial`` seeds the stage solutions (e.g. a known extension).  Never
    concludes non-membership: the answer is MEMBER (with a witness) or
    NOT-FOUND (with what was reached).
    """
    target = {k: Fraction(c) for k, c in target.items() if c}
    initial = dict(initial or {})
    base, obs = extend(model, L, reps, base=initial)
    if obs is not None:
        return {"verdict": "NO-EXTENSION", "obstruction": {"generator": obs.generator,
                                                           "class": _fmt(obs.class_coords)}}
    c0 = whitehead_element(base)
    directions = []
    for I in model.subsets:
        if len(I) < 2:
            continue
        deg = model.gen_degree(I)
        if deg + 1 > L.degree_cap:
            continue
        for j, rep in enumerate(L.homology(deg).representatives):
            directions.append((model.name(I), j, rep))
    samples = 0
    obstructed = 0
    reached: dict = {}
    span = Echelon()
    witness = None

    def run(pert):
        nonlocal samples, obstructed, witness
        samples += 1
        ext, ob = extend(model, L, reps, perturb=pert, base=initial)
        if ob is not None:
            obstructed += 1
            return None
        cls = whitehead_element(ext)
        key = tuple(sorted(cls.items()))
        if key not in reached:
            reached[key] = cls
            diff = dict(cls)
            axpy(diff, -1, c0)
            span.add(diff)
        if cls == target and witness is None:
            witness = {nm: L.format(y) for nm, y in pert.items()}
        return cls

    run({})
    first_order = Echelon()
    first_order_dirs = []
    points = [ZERO] + list(grid)
    weights = _lagrange_derivative_at_zero(points)
    for nm, j, rep in directions:
        if witness is not None or samples >= budget:
            break
        vals = [c0]
        ok = True
        for c in grid:
            if samples >= budget:
                ok = False
                break
            v = run({nm: c * rep})
            if v is None:
                ok = False
            vals.append(v)
        if ok:
            deriv: dict = {}
            for w, v in zip(weights, vals):
                axpy(deriv, w, v)
            if first_order.add(deriv):
                first_order_dirs.append(f"{nm}+c*h{j}")
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(len(directions)), 2))
    rng.shuffle(pairs)
    for a, b in pairs:
        if witness is not None or samples >= budget:
            break
        ca, cb = rng.choice(grid), rng.choice(grid)
        (na, _, ra), (nb, _, rb) = directions[a], directions[b]
        pert = {na: ca * ra}
        pert[nb] = pert.get(nb, L.zero(rb.degree)) + cb * rb
        run(pert)
    report = {
        "verdict": "MEMBER" if witness is not None else "NOT-FOUND",
        "initial_class": _fmt(c0),
        "target": _fmt(target),
        "directions": len(directions),
        "samples": samples,
        "obstructed_samples": obstructed,
        "grid": [str(c) for c in grid],
        "budget": budget,
        "reached_classes": [_fmt(v) for v in reached.values()],
        "reached_affine_span_dim": len(span),
        "first_order_indeterminacy_dim": len(first_order),
        "first_order_directions": first_order_dirs,
    }
    if witness is not None:
        report["witness_perturbation"] = witness
    return report


# -- verifiers ------------------------------------------------------------------------------

def _multilinear(fn, vectors: Sequence[Mapping[int, Fraction]], zero):
    total = zero
    for picks in itertools.product(*(list(v.items()) for v in vectors)):
        coeff = ONE
        for _, c in picks:
            coeff *= c
        val = fn([g for g, _ in picks])
        if isinstance(val, dict):
            axpy(total, coeff, val)
        else:
            total = total + coeff * val
    return total


def _global(r: Retract, degree: int, local: Mapping) -> dict:
    return {r.h_index(degree, j): c for j, c in local.items()}


def _orientation(eps_ell: Mapping, x: Mapping) -> str:
    neg = {g: -c for g, c in eps_ell.items()}
    if dict(eps_ell) == dict(x):
        return "+" if eps_ell else "both"
    if neg == dict(x):
        return "-"
    return "none"


def _classes_of_reps(r: Retract, reps: Sequence[LieElement]) -> list[dict]:
    return [r.classify(x) for x in reps]


def verify_elprime(L: FreeDGL, model: WedgeModel, ext: Extension, r: Retract,
                   table=None, solve: bool = True) -> dict:
    """``eps ell_k(x) - x`` in ``im ell_2 + ... + im ell_{k-1}``, plus the Phi solver."""
    from .coalgebra import solve_phi

    k = model.k
    n = model.N - 2
    if n > r.max_degree:
        raise DegreeCapError(f"retract covers degrees <= {r.max_degree}, need {n}")
    xs = _classes_of_reps(r, ext.reps())
    x = _global(r, n, whitehead_element(ext))
    table = table or compute_table(r, k, n)
    eps = epsilon_sign([s - 1 for s in model.spheres])
    ell_k = table.apply(k, xs)
    eps_ell = {g: eps * c for g, c in ell_k.items()}
    span = Echelon()
    gens = []
    for j in range(2, k):
        for v in bracket_image_span(table, j, n):
            if span.add(v, tag=len(gens)):
                gens.append((j, v))
    report = {"k": k, "degree": n, "x": _fmt(x), "eps": eps, "eps_ell_k": _fmt(eps_ell),
              "gamma_span_dim": len(span)}
    for label, sgn in (("+", 1), ("-", -1)):
        d = dict(eps_ell)
        axpy(d, -sgn, x)
        combo = span.express(d)
        report[f"difference{label}"] = _fmt(d)
        report[f"in_span{label}"] = combo is not None
        if combo is not None:
            report[f"witness{label}"] = [{"arity": gens[t][0], "vector": _fmt(gens[t][1]),
                                          "coeff": str(c)} for t, c in sorted(combo.items())]
    report["pass"] = report["in_span+"]
    if solve:
        basis_args = []
        for v in xs:
            if len(v) == 1 and next(iter(v.values())) == 1:
                basis_args.append(next(iter(v)))
        if len(basis_args) == k:
            sol = solve_phi(table, basis_args, x)
            report["phi_solver"] = {"found": sol.found, "unknowns": sol.unknowns,
                                    "equations": sol.equations}
        else:
            report["phi_solver"] = {"found": None, "note": "classes are not basis elements"}
    return report


def _induction_rows(ext: Extension, r: Retract, engine: TransferEngine, xs: Sequence[dict]) -> list[dict]:
    model, L = ext.model, ext.target
    rows = []
    full = tuple(range(1, model.k + 1))
    for p in range(2, model.k + 1):
        for I in itertools.combinations(full, p):
            lhs = ext.apply(model.boundary_of(I))
            args = [xs[i - 1] for i in I]
            eps = epsilon_sign([model.spheres[i - 1] - 1 for i in I])
            ts = _multilinear(engine.tree_sum, args, L.zero(lhs.degree))
            rhs = eps * ts
            if lhs == rhs:
                sign = "+" if not lhs.is_zero() else "both"
            elif lhs == -rhs:
                sign = "-"
            else:
                sign = "none"
            rows.append({"p": p, "subset": model.name(I), "sign": sign, "holds": sign in ("+", "both")})
    return rows


def verify_main1(L: FreeDGL, model: WedgeModel, ext: Extension) -> dict:
    """Theorem check: on a retract adapted to ``ext``, ``eps ell_k(x) = x``."""
    if not ext.total:
        return {"pass": False, "reason": "extension is not total"}
    bad = ext.check_chain_map()
    if bad:
        return {"pass": False, "reason": f"not a chain map on {bad}"}
    C_choice: dict = {}
    for rep in ext.reps():
        C_choice.setdefault(rep.degree, []).append(rep)
    r, cert = adapted_retract(L, ext, C_choice)
    if cert is not None:
        return {"pass": False, "adapted": False,
                "certificate": {"degree": cert.degree, "reason": cert.reason,
                                "combination": _fmt(cert.combination),
                                "cycle": L.format(cert.cycle) if cert.cycle is not None else None}}
    k = model.k
    n = model.N - 2
    engine = TransferEngine(r)
    xs = _classes_of_reps(r, ext.reps())
    x = _global(r, n, whitehead_element(ext))
    eps = epsilon_sign([s - 1 for s in model.spheres])
    ell_k = _multilinear(lambda a: engine.ell(k, a), xs, {})
    eps_ell = {g: eps * c for g, c in ell_k.items()}
    orient = _orientation(eps_ell, x)
    rows = _induction_rows(ext, r, engine, xs)
    return {"pass": orient in ("+", "both") and all(row["holds"] for row in rows),
            "adapted": True, "k": k, "x": _fmt(x), "eps": eps, "eps_ell_k": _fmt(eps_ell),
            "orientation": orient, "induction": rows, "retract": r}


def verify_elsegundo(L: FreeDGL, model: WedgeModel, reps: Sequence[LieElement], r: Retract,
                     table=None) -> dict:
    """Hypothesis, the vanishing of ``ell_{k-1}`` on sub-tuples, and the staged K-image extension."""
    k = model.k
    n = model.N - 2
    if n > r.max_degree:
        raise DegreeCapError(f"retract covers degrees <= {r.max_degree}, need {n}")
    table = table or compute_table(r, k, n)
    report: dict = {"k": k}
    for i in range(2, k - 1):
        nz = table.nonzero(i)
        if nz:
            args, val = next(iter(nz.items()))
            report["hypothesis"] = {"holds": False, "arity": i,
                                    "witness": [table.labels[g] for g in args]}
            report["pass"] = None
            report["verdict"] = "hypothesis not satisfied"
            return report
    report["hypothesis"] = {"holds": True, "checked_arities": list(range(2, k - 1))}
    xs = _classes_of_reps(r, reps)
    subproducts = []
    for sub in itertools.combinations(range(k), k - 1):
        val = table.apply(k - 1, [xs[j] for j in sub])
        subproducts.append({"indices": [j + 1 for j in sub], "zero": not val})
    report["subproducts"] = subproducts
    staged_reps = [r.i(v) if v else L.zero(rep.degree) for v, rep in zip(xs, reps)]
    ext, obs = extend(model, L, staged_reps, strategy="K-image", retract=r)
    report["stages"] = ext.log
    if obs is not None:
        report["pass"] = False
        report["obstruction"] = {"generator": obs.generator, "class": _fmt(obs.class_coords)}
        return report
    x = _global(r, n, whitehead_element(ext))
    eps = epsilon_sign([s - 1 for s in model.spheres])
    eps_ell = {g: eps * c for g, c in table.apply(k, xs).items()}
    report.update({"x": _fmt(x), "eps_ell_k": _fmt(eps_ell),
                   "orientation": _orientation(eps_ell, x)})
    report["pass"] = report["orientation"] in ("+", "both") and all(m["zero"] for m in subproducts)
    return report
