"""Data and the investigation run for the bundled fifteen-generator DGL.

The fourth bracket of four degree-2 classes is compared, over several
retracts, with the fourth-order Whitehead element produced by an explicit
extension.  Nothing here asserts an expected verdict; the report records
what the computation finds.
"""

from __future__ import annotations

import time
from importlib import resources

from .dglparse import parse_dgl, parse_expression
from .freelie import FreeDGL, LieElement
from .retract import Retract, adapted_retract, random_retract, retract_from_decomposition, verify_retract
from .transfer import CONVENTION, TransferEngine, compute_table, epsilon_sign
from .whitehead import (Extension, build_fat_wedge, membership_probe, verify_elprime,
                        verify_elsegundo, verify_main1, whitehead_element)

EXTENSION = {
    "u1": "v1", "u2": "v2", "u3": "v3", "u4": "v4",
    "u12": "v12 + z", "u13": "v13", "u14": "v14", "u23": "v23", "u24": "v24", "u34": "v34",
    "u123": "w123", "u124": "w124", "u134": "v134", "u234": "v234",
}

PRINTED_PHI = ("[w123,v4] - [w124,v3] + [v12,v34] + [z,v34] + [v14,v23] + [v1,v234]"
               " - [v13,v24] + [v134,v2]")

# the printed element with the signs of the [5,5]-terms made consistent;
# the printed one is not a cycle
CORRECTED_PHI = ("[w123,v4] - [w124,v3] - [v12,v34] - [z,v34] - [v14,v23] + [v1,v234]"
                 " + [v13,v24] + [v134,v2]")

TABLE_A = {
    5: ["v12", "v13", "v14", "v23", "v24", "v34"],
    7: ["[v1,v12]", "[v1,v13]", "[v1,v14]", "[v2,v12]", "[v2,v23]", "[v2,v24]",
        "[v3,v13]", "[v3,v23]", "[v3,v34]", "[v4,v14]", "[v4,v24]", "[v4,v34]",
        "[v1,v23]", "[v2,v13]", "[v1,v24]", "[v2,v14]", "[v1,v34]", "[v3,v14]",
        "[v2,v34]", "[v3,v24]"],
    8: ["w123", "w124", "v134", "v234"],
}

TABLE_C = {
    2: ["v1", "v2", "v3", "v4"],
    5: ["z"],
    7: ["[z,v1]", "[z,v2]", "[z,v3]", "[z,v4]"],
    10: [CORRECTED_PHI],
}

SPHERES = (3, 3, 3, 3)


def load(cap: int | None = None) -> FreeDGL:
    text = resources.files("dglinf.fixtures").joinpath("example37.dgl").read_text()
    return parse_dgl(text).to_dgl(cap)


def _parse_all(L: FreeDGL, table: dict) -> dict:
    return {n: [parse_expression(t, L) for t in xs] for n, xs in table.items() if n <= L.degree_cap}


def table_retract(L: FreeDGL) -> Retract:
    """The printed decomposition, completed greedily where it shows dots."""
    C = {n: xs for n, xs in _parse_all(L, TABLE_C).items() if n < L.degree_cap}
    return retract_from_decomposition(L, _parse_all(L, TABLE_A), C, label="printed-table")


def a5_retract(L: FreeDGL) -> Retract:
    A5 = ["v12 + z", "v13", "v14", "v23", "v24", "v34"]
    return retract_from_decomposition(L, {5: [parse_expression(t, L) for t in A5]}, label="A5-v12+z")


def extension(L: FreeDGL, model=None) -> Extension:
    model = model or build_fat_wedge(SPHERES)
    return Extension(model, L, {nm: parse_expression(t, L) for nm, t in EXTENSION.items()})


def _fmt(v) -> dict:
    return {str(k): str(c) for k, c in sorted(v.items())}


def compare_printed(L: FreeDGL, phi_omega: LieElement) -> dict:
    """Term-by-term comparison of the recomputed ``phi(omega)`` with the printed element."""
    printed = parse_expression(PRINTED_PHI, L)
    report = {"recomputed": L.format(phi_omega), "printed": L.format(printed)}
    if phi_omega == printed:
        report["agreement"] = "equal"
    elif phi_omega == -printed:
        report["agreement"] = "equal up to sign"
    else:
        report["agreement"] = "different"
    a, b = L.coords(phi_omega), L.coords(printed)
    report["termwise_up_to_sign"] = (set(a) == set(b)
                                     and all(abs(a[j]) == abs(b[j]) for j in a))
    report["printed_is_cycle"] = L.apply_differential(printed).is_zero()
    diff = L.coords(phi_omega - printed)
    basis = L.basis(printed.degree)
    report["difference_terms"] = [
        {"monomial": L.monomial_str(basis.sequences[j]), "coefficient": str(c)}
        for j, c in sorted(diff.items())]
    return report


def ell4_report(r: Retract, args: list[int], phi_class: dict, table=None) -> dict:
    engine = TransferEngine(r)
    val = engine.ell(4, args)
    eps = epsilon_sign([r.h_degree(g) for g in args])
    eps_val = {g: eps * c for g, c in val.items()}
    neg = {g: -c for g, c in phi_class.items()}
    if eps_val == phi_class:
        rel = "+Phi"
    elif eps_val == neg:
        rel = "-Phi"
    else:
        rel = "neither"
    return {"retract": r.label, "eps": eps, "eps_ell4": _fmt(eps_val), "equals": rel,
            "equals_plus_or_minus_Phi": rel != "neither"}


def investigate(seeds=range(1, 21), probe_budget: int = 120, with_probe: bool = True) -> dict:
    t0 = time.time()
    L = load()
    model = build_fat_wedge(SPHERES)
    ext = extension(L, model)
    report: dict = {"convention": CONVENTION, "cap": L.degree_cap, "seeds": list(seeds)}
    report["homology_dims"] = {str(n): L.homology(n).dimension for n in range(1, L.degree_cap)}
    report["chain_map_failures"] = ext.check_chain_map()
    phi_omega = ext.apply(model.omega)
    report["phi_omega"] = compare_printed(L, phi_omega)
    local = whitehead_element(ext)
    report["phi_class_local"] = _fmt(local)
    H10 = L.homology(10)
    report["H10"] = {"dimension": H10.dimension,
                     "basis": [L.format(x) for x in H10.representatives],
                     "phi_class_generates": H10.dimension == 1 and bool(local)}

    retracts = [("printed-table", table_retract(L)), ("A5-v12+z", a5_retract(L))]
    adapted, cert = adapted_retract(L, ext, {2: [L.gen(f"v{i}") for i in range(1, 5)]})
    if adapted is not None:
        adapted.label = "adapted"
        retracts.append(("adapted", adapted))
        report["adapted_retract"] = {"exists": True}
    else:
        report["adapted_retract"] = {"exists": False, "degree": cert.degree, "reason": cert.reason,
                                     "combination": _fmt(cert.combination)}
    for s in seeds:
        r = random_retract(L, s)
        r.label = f"random-{s}"
        retracts.append((r.label, r))

    rows = []
    for name, r in retracts:
        args = [r.h_index(2, j) for j in range(4)]
        reps = r.C_basis(2)
        # the v_i are the degree-2 representatives in every retract built here
        x_class = {r.h_index(10, j): c for j, c in local.items()}
        row = ell4_report(r, args, x_class)
        if name in ("printed-table", "A5-v12+z", "adapted"):
            row["retract_identities_pass"] = verify_retract(r)["pass"]
        table = compute_table(r, 4, 10)
        ep = verify_elprime(L, model, ext, r, table=table, solve=(name == "printed-table"))
        row["elprime_pass"] = ep["pass"]
        row["elprime_gamma_span_dim"] = ep["gamma_span_dim"]
        if "phi_solver" in ep:
            row["phi_solver"] = ep["phi_solver"]
        row["degree2_reps"] = [L.format(x) for x in reps]
        rows.append(row)
    report["ell4"] = rows
    report["elprime_all_pass"] = all(r["elprime_pass"] for r in rows)
    report["retracts_with_eps_ell4_equal_Phi"] = [r["retract"] for r in rows if r["equals"] == "+Phi"]
    report["retracts_with_eps_ell4_equal_minus_Phi"] = [r["retract"] for r in rows if r["equals"] == "-Phi"]

    if adapted is not None:
        m1 = verify_main1(L, model, ext)
        m1.pop("retract", None)
        report["main1_on_adapted"] = m1
    es = verify_elsegundo(L, model, [L.gen(f"v{i}") for i in range(1, 5)], retracts[0][1])
    report["elsegundo_hypothesis"] = es.get("hypothesis")
    if with_probe:
        reps = [L.gen(f"v{i}") for i in range(1, 5)]
        report["probe_target_phi"] = membership_probe(model, L, reps, local, budget=probe_budget,
                                                       initial=ext.phi)
        report["probe_target_zero"] = membership_probe(model, L, reps, {}, budget=probe_budget,
                                                        initial=ext.phi)
    claim = any(r["equals"] == "+Phi" for r in rows)
    report["claim"] = "for any homotopy retract, ell_4(v1..v4) != Phi"
    report["claim_status"] = ("contradicted: some retract gives eps*ell_4 = Phi" if claim
                                    else "consistent on every retract tried")
    report["elapsed_ms"] = int((time.time() - t0) * 1000)
    return report
