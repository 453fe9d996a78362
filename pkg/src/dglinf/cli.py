"""Command-line entry point: ``dglinf <command> ...``.

Every command prints a JSON report (exact rationals as strings) and exits
with 0 on pass, 1 on a failed verdict and 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import random
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import example37
from .coalgebra import LInftyCoalgebra, QuillenChains, solve_phi
from .dglparse import DglSyntaxError, dgl_to_document, parse_dgl, parse_expression
from .freelie import DegreeCapError, FreeDGL, LieElement, NotLieError, bracket, is_lie_dynkin
from .retract import (Retract, RetractError, dump_retract, load_retract, random_retract,
                      retract_from_decomposition, verify_retract)
from .signs_trees import catalan, enumerate_trees
from .transfer import CONVENTION, compute_table, verify_generalized_jacobi
from .whitehead import (build_fat_wedge, extend, membership_probe, verify_elprime,
                        verify_elsegundo, verify_main1, whitehead_element)


class UsageError(Exception):
    pass


# -- helpers ---------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, float):
        return str(Fraction(x))
    if isinstance(x, (Retract, LieElement)):
        return repr(x)
    return x


def resolve_fixture(name: str) -> tuple[str, str]:
    """Text and source of a DGL file, falling back to the bundled fixtures."""
    p = Path(name)
    if p.is_file():
        return p.read_text(), str(p)
    stem = p.name[:-4] if p.name.endswith(".dgl") else p.name
    res = resources.files("dglinf.fixtures").joinpath(stem + ".dgl")
    if res.is_file():
        return res.read_text(), f"bundled:{stem}.dgl"
    raise UsageError(f"no such file or bundled fixture: {name}")


def split_top(text: str) -> list[str]:
    """Split on commas outside brackets."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur.strip())
    return parts


def _spheres(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --spheres value {text!r}") from None


class Context:
    def __init__(self, args):
        self.args = args
        self.digest = None
        self.source = None
        self.dgl: FreeDGL | None = None

    def load(self, name: str | None = None) -> FreeDGL:
        a = self.args
        if name is None and getattr(a, "spheres_model", None):
            ns = _spheres(a.spheres_model)
            cap = a.max_degree if a.max_degree is not None else None
            self.dgl = build_fat_wedge(ns, cap).dgl
            self.source = f"fat-wedge:{a.spheres_model}"
            self.digest = hashlib.sha256(self.source.encode()).hexdigest()
            return self.dgl
        text, self.source = resolve_fixture(name or a.file)
        self.digest = hashlib.sha256(text.encode()).hexdigest()
        doc = parse_dgl(text)
        self.dgl = doc.to_dgl(a.max_degree)
        return self.dgl

    def retract(self, L: FreeDGL) -> Retract:
        a = self.args
        if a.retract_file:
            return load_retract(L, json.loads(Path(a.retract_file).read_text()))
        if a.seed is not None:
            return random_retract(L, a.seed)
        return retract_from_decomposition(L, label="greedy")


# -- commands ----------------------------------------------------------------------------

def cmd_check(ctx: Context) -> tuple[dict, bool]:
    L = ctx.load()
    bad = L.check_d_squared()
    rng = random.Random(ctx.args.seed or 0)
    samples = 0
    jac_fail = []
    lie_fail = []
    for g in L.generators:
        if not is_lie_dynkin(L.differential_of(g.name), L.degrees):
            lie_fail.append(g.name)
    top = ctx.args.sample_degree
    if top is None:
        # low-degree generators make the bases grow fast
        top = 2 * min(L.degrees) + 3
    top = min(L.degree_cap, top)
    degrees = [n for n in range(1, top + 1) if L.dim(n)]
    triples = [t for t in itertools.product(degrees, repeat=3) if sum(t) <= top]
    for _ in range(ctx.args.samples if triples else 0):
        trip = rng.choice(triples)
        x, y, z = (L.random_element(n, rng) for n in trip)
        if x.is_zero() or y.is_zero() or z.is_zero():
            continue
        samples += 1
        dx, dy, dz = x.degree, y.degree, z.degree
        s = lambda e: -1 if e % 2 else 1  # noqa: E731
        jac = (s(dx * dz) * bracket(x, bracket(y, z)) + s(dy * dx) * bracket(y, bracket(z, x))
               + s(dz * dy) * bracket(z, bracket(x, y)))
        leib = L.apply_differential(bracket(x, y)) - (
            bracket(L.apply_differential(x), y) + s(dx) * bracket(x, L.apply_differential(y)))
        if not jac.is_zero() or not leib.is_zero() or not L.is_lie(bracket(x, y)):
            jac_fail.append([L.format(x), L.format(y), L.format(z)])
    dims = {n: L.dim(n) for n in range(1, top + 1)}
    ok = not bad and not jac_fail and not lie_fail
    return {"d_squared_failures": bad, "non_lie_differentials": lie_fail,
            "jacobi_leibniz_samples": samples, "jacobi_leibniz_failures": jac_fail[:5],
            "dimensions": dims, "pass": ok}, ok


def cmd_homology(ctx: Context) -> tuple[dict, bool]:
    L = ctx.load()
    out = {}
    for n in range(1, L.degree_cap):
        h = L.homology(n)
        out[n] = {"dim_L": L.dim(n), "dim_Z": len(h.cycles), "dim_B": len(h.boundaries),
                  "dim_H": h.dimension,
                  "representatives": [L.format(x) for x in h.representatives]}
    return {"homology": out, "top_degree_note": f"H_n needs degree n+1 <= cap {L.degree_cap}"}, True


def cmd_retract(ctx: Context) -> tuple[dict, bool]:
    L = ctx.load()
    a = ctx.args
    if a.printed_table:
        r = example37.table_retract(L)
    else:
        r = ctx.retract(L)
    rep = verify_retract(r)
    if a.out:
        Path(a.out).write_text(dump_retract(r))
    return {"retract": r.label, "verification": rep, "written_to": a.out,
            "h_basis": [h.label for h in r.h_basis]}, rep["pass"]


def cmd_transfer(ctx: Context) -> tuple[dict, bool]:
    L = ctx.load()
    a = ctx.args
    r = example37.table_retract(L) if a.printed_table else ctx.retract(L)
    table = compute_table(r, a.arity, a.table_degree)
    values = {}
    for (k, args), v in sorted(table.values.items()):
        if v:
            values.setdefault(k, []).append({"args": [table.labels[g] for g in args],
                                             "value": {table.labels[g]: c for g, c in v.items()}})
    jac = {n: verify_generalized_jacobi(table, n) for n in range(3, a.arity + 2)}
    ok = all(j["pass"] for j in jac.values())
    return {"retract": r.label, "arity": a.arity, "max_degree": table.max_degree,
            "h_basis": {h.label: L.format(h.rep) for h in r.h_basis},
            "nonzero": values, "tuples": len(table.values),
            "least_nonvanishing_arity": table.least_nonvanishing_arity(),
            "jacobi": jac, "pass": ok}, ok


def _h_label_index(r: Retract, label: str) -> int:
    for g, h in enumerate(r.h_basis):
        if h.label == label:
            return g
    raise UsageError(f"unknown homology label {label!r}")


def cmd_coalgebra(ctx: Context) -> tuple[dict, bool]:
    L = ctx.load()
    a = ctx.args
    report: dict = {}
    ok = True
    if a.check_dsq:
        q = QuillenChains(L).check_delta_squared(a.word_degree, a.max_length)
        report["quillen_delta_squared"] = q
        r = ctx.retract(L)
        table = compute_table(r, a.arity, a.table_degree)
        co = LInftyCoalgebra(table).check_delta_squared()
        report["transferred_delta_squared"] = co
        ok = q["pass"] and co["pass"]
    if a.solve_phi:
        r = example37.table_retract(L) if a.printed_table else ctx.retract(L)
        labels = split_top(a.solve_phi)
        if len(labels) < 3:
            raise UsageError("--solve-phi needs x_1,...,x_k,x (homology labels)")
        args = [_h_label_index(r, s) for s in labels[:-1]]
        x = {_h_label_index(r, labels[-1]): Fraction(1)}
        table = compute_table(r, len(args), max(r.h_degree(g) for g in x))
        sol = solve_phi(table, args, x)
        report["solve_phi"] = {"found": sol.found, "unknowns": sol.unknowns, "equations": sol.equations,
                               "phi": {" ^ ".join(table.labels[g] for g in w): c
                                       for w, c in (sol.phi or {}).items()}}
        ok = ok and sol.found
    if not a.check_dsq and not a.solve_phi:
        raise UsageError("coalgebra needs --check-dsq or --solve-phi")
    return report, ok


def _classes(L: FreeDGL, text: str | None) -> list[LieElement]:
    if not text:
        raise UsageError("--classes is required")
    return [parse_expression(t, L) for t in split_top(text)]


def cmd_whitehead(ctx: Context) -> tuple[dict, bool]:
    a = ctx.args
    if a.file is None:
        if not a.spheres:
            raise UsageError("whitehead needs a DGL file or --spheres")
        ns = _spheres(a.spheres)
        model = build_fat_wedge(ns, a.max_degree, title="fat wedge " + ",".join(map(str, ns)))
        text = f"# Fat-wedge model for spheres {a.spheres}.\n" + dgl_to_document(model.dgl).serialize()
        if a.emit_model:
            Path(a.emit_model).write_text(text)
        ctx.source = f"fat-wedge:{a.spheres}"
        ctx.dgl = model.dgl
        return {"spheres": ns, "omega": model.dgl.format(model.omega), "model": text,
                "written_to": a.emit_model}, True
    L = ctx.load()
    reps = _classes(L, a.classes)
    ns = _spheres(a.spheres) if a.spheres else [x.degree + 1 for x in reps]
    model = build_fat_wedge(ns)
    report: dict = {"spheres": ns, "omega": model.dgl.format(model.omega),
                    "model_generators": [f"{g.name}:{g.degree}" for g in model.dgl.generators]}
    ext, obs = extend(model, L, reps, strategy=a.strategy,
                      retract=ctx.retract(L) if a.strategy == "K-image" else None)
    if obs is not None:
        report["extension"] = {"exists": False, "obstruction_at": obs.generator,
                               "obstruction_class": obs.class_coords,
                               "obstruction_element": L.format(obs.element)}
        return report, True
    report["extension"] = {"exists": True,
                           "phi": {nm: L.format(y) for nm, y in ext.phi.items()}}
    w = ext.apply(model.omega)
    cls = whitehead_element(ext)
    report["phi_omega"] = L.format(w)
    report["class"] = cls
    ok = True
    if a.target is not None:
        t = parse_expression(a.target, L)
        if not t.is_zero() and not L.apply_differential(t).is_zero():
            raise UsageError("--target is not a cycle")
        n = model.N - 2
        target = L.homology(n).classify(L.coords(t)) if not t.is_zero() else {}
        probe = membership_probe(model, L, reps, target, budget=a.budget, seed=a.seed or 0,
                                 initial=ext.phi)
        report["probe"] = probe
        ok = probe["verdict"] == "MEMBER"
    return report, ok


def cmd_verify(ctx: Context) -> tuple[dict, bool]:
    a = ctx.args
    if a.theorem == "example37":
        ctx.load(a.file or "example37")
        seeds = range(1, a.seeds + 1)
        rep = example37.investigate(seeds, probe_budget=a.budget, with_probe=not a.no_probe)
        ok = rep["elprime_all_pass"]
        return rep, ok
    if a.file is None:
        raise UsageError(f"--theorem {a.theorem} needs a DGL file")
    L = ctx.load()
    is_ex37 = L.title == "example37"
    if is_ex37 and not a.classes:
        model = build_fat_wedge(example37.SPHERES)
        ext = example37.extension(L, model)
        reps = ext.reps()
    else:
        reps = _classes(L, a.classes)
        ns = _spheres(a.spheres) if a.spheres else [x.degree + 1 for x in reps]
        model = build_fat_wedge(ns)
        ext, obs = extend(model, L, reps)
        if obs is not None:
            return {"theorem": a.theorem, "extension": "obstructed", "generator": obs.generator,
                    "class": obs.class_coords}, False
    if a.theorem == "main1":
        rep = verify_main1(L, model, ext)
        r = rep.pop("retract", None)
        if r is not None:
            rep["retract_identities"] = verify_retract(r)["pass"]
        return rep, bool(rep["pass"])
    if is_ex37 and a.seed is None and not a.retract_file:
        r = example37.table_retract(L)
    else:
        r = ctx.retract(L)
    if a.theorem == "elprime":
        rep = verify_elprime(L, model, ext, r)
        rep["retract"] = r.label
        return rep, bool(rep["pass"])
    if a.theorem == "elsegundo":
        rep = verify_elsegundo(L, model, reps, r)
        rep["retract"] = r.label
        return rep, rep["pass"] is not False
    raise UsageError(f"unknown theorem {a.theorem!r}")


def cmd_trees(ctx: Context) -> tuple[dict, bool]:
    k = ctx.args.leaves
    if k < 1:
        raise UsageError("--leaves must be >= 1")
    trees = enumerate_trees(k)
    total = sum(Fraction(2 ** (k - 1), t.aut) for t in trees)
    ok = total == catalan(k - 1)
    return {"leaves": k, "count": len(trees),
            "trees": [{"shape": t.key, "aut": t.aut} for t in trees],
            "sum_2^(k-1)/aut": total, "catalan(k-1)": catalan(k - 1), "pass": ok}, ok


COMMANDS = {"check": cmd_check, "homology": cmd_homology, "retract": cmd_retract,
            "transfer": cmd_transfer, "coalgebra": cmd_coalgebra, "whitehead": cmd_whitehead,
            "verify": cmd_verify, "trees": cmd_trees}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=None, help="degree cap for the DGL")
    common.add_argument("--seed", type=int, default=None, help="random retract seed")
    common.add_argument("--json", default=None, help="also write the report to this path")
    common.add_argument("--retract-file", default=None, help="retract JSON from the retract command")

    p = argparse.ArgumentParser(prog="dglinf",
                                description="Exact DGL homology, transferred brackets and Whitehead products.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.add_argument("file", nargs="?", default=None, help="a .dgl file or bundled fixture name")
        return sp

    sp = with_file("check", help="d^2 = 0 and bracket sanity samples")
    sp.add_argument("--spheres", dest="spheres_model", default=None,
                    help="check the fat-wedge model of these spheres instead of a file")
    sp.add_argument("--samples", type=int, default=60)
    sp.add_argument("--sample-degree", type=int, default=None,
                    help="largest degree used by the bracket samples")
    with_file("homology", help="homology dimensions and representatives")
    sp = with_file("retract", help="build and verify a homotopy retract")
    sp.add_argument("--printed-table", action="store_true", help="the printed decomposition (example37)")
    sp.add_argument("--out", default=None, help="write the retract JSON here")
    sp = with_file("transfer", help="transferred bracket table")
    sp.add_argument("--arity", type=int, default=3)
    sp.add_argument("--table-degree", type=int, default=None, help="largest output degree tabulated")
    sp.add_argument("--printed-table", action="store_true")
    sp = with_file("coalgebra", help="Quillen chains and the Phi solver")
    sp.add_argument("--check-dsq", action="store_true")
    sp.add_argument("--solve-phi", default=None, help="labels x_1,...,x_k,x such as h2_0,h2_1,h2_2,h7_0")
    sp.add_argument("--word-degree", type=int, default=None)
    sp.add_argument("--max-length", type=int, default=3)
    sp.add_argument("--arity", type=int, default=3)
    sp.add_argument("--table-degree", type=int, default=None)
    sp.add_argument("--printed-table", action="store_true")
    sp = with_file("whitehead", help="extension, Whitehead element, membership probe")
    sp.add_argument("--classes", default=None, help="cycle representatives, comma separated")
    sp.add_argument("--spheres", default=None, help="sphere dimensions n_1,...,n_k")
    sp.add_argument("--target", default=None, help="cycle whose class is probed for membership")
    sp.add_argument("--budget", type=int, default=400)
    sp.add_argument("--strategy", choices=["echelon", "K-image"], default="echelon")
    sp.add_argument("--emit-model", default=None, help="with --spheres and no file: write the model .dgl here")
    sp = with_file("verify", help="theorem verifiers")
    sp.add_argument("--theorem", required=True, choices=["elprime", "main1", "elsegundo", "example37"])
    sp.add_argument("--classes", default=None)
    sp.add_argument("--spheres", default=None)
    sp.add_argument("--seeds", type=int, default=20, help="random retracts for example37")
    sp.add_argument("--budget", type=int, default=200, help="probe budget for example37")
    sp.add_argument("--no-probe", action="store_true")
    sp = sub.add_parser("trees", parents=[common], help="binary tree classes and automorphisms")
    sp.add_argument("--leaves", type=int, required=True)
    return p


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return {"error": "usage"}, 2 if exc.code else 0
    if args.command not in ("trees", "verify", "check", "whitehead") and args.file is None:
        return {"command": args.command, "error": "a DGL file is required"}, 2
    if args.command == "check" and args.file is None and not args.spheres_model:
        return {"command": args.command, "error": "a DGL file or --spheres is required"}, 2
    ctx = Context(args)
    t0 = time.time()
    try:
        results, ok = COMMANDS[args.command](ctx)
        code = 0 if ok else 1
    except (UsageError, DglSyntaxError, DegreeCapError, RetractError, NotLieError,
            FileNotFoundError, KeyError, ValueError) as exc:
        results, code = {"error": f"{type(exc).__name__}: {exc}"}, 2
    report = {
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "input": {"source": ctx.source, "sha256": ctx.digest},
        "seed": args.seed,
        "degree_cap": ctx.dgl.degree_cap if ctx.dgl is not None else None,
        "convention": CONVENTION,
        "results": results,
        "verdict": {0: "pass", 1: "fail", 2: "error"}[code],
        "elapsed_ms": int((time.time() - t0) * 1000),
    }
    return _jsonable(report), code


def main(argv: list[str] | None = None) -> int:
    report, code = run(argv)
    text = json.dumps(report, indent=2, sort_keys=False)
    print(text)
    path = report.get("argv") and _json_path(argv)
    if path:
        Path(path).write_text(text + "\n")
    return code


def _json_path(argv):
    argv = list(argv) if argv is not None else sys.argv[1:]
    for i, tok in enumerate(argv):
        if tok == "--json" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--json="):
            return tok.split("=", 1)[1]
    return None


if __name__ == "__main__":
    sys.exit(main())
