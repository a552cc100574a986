"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances.

Run ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the lines as
they are produced; they are also repeated in the terminal summary).
"""

import time

import numpy as np
from scipy import integrate

from iacopula.conformance import (
    check_extraction_against,
    check_ia_at,
    check_ia_randomized,
    check_m_neutrality,
    check_m_neutrality_randomized,
    extracted_copula,
    factorization_sides,
    verify_extraction_consistency,
    verify_factorization,
)
from iacopula.copulas import CopulaSpec, check_copula_axioms, evaluate
from iacopula.couplings import maximal_coupling
from iacopula.marginals import Profile
from iacopula.oracles import CopulaModel, get_model
from iacopula.tables import render_table

P1 = [0.5, 0.25, 0.25]
P1_FINE = [0.5, 0.25, 0.125, 0.125]
P2 = [0.25, 0.25, 0.25, 0.25]

# the four printed tables, as fraction strings, row by row
TABLE_IND = [["1/8"] * 4, ["1/16"] * 4, ["1/16"] * 4]
TABLE_IND_FINE = [["1/8"] * 4, ["1/16"] * 4, ["1/32"] * 4, ["1/32"] * 4]
TABLE_FRECHET = [["1/4", "1/4", "0", "0"], ["0", "0", "1/4", "0"], ["0", "0", "0", "1/4"]]
TABLE_FRECHET_FINE = [
    ["1/4", "1/4", "0", "0"],
    ["0", "0", "1/4", "0"],
    ["0", "0", "0", "1/8"],
    ["0", "0", "0", "1/8"],
]
TABLE_MAXIMAL = [["1/4", "0", "0", "1/4"], ["0", "1/4", "0", "0"], ["0", "0", "1/4", "0"]]
TABLE_MAXIMAL_FINE = [
    ["1/4", "0", "1/8", "1/8"],
    ["0", "1/4", "0", "0"],
    ["0", "0", "1/8", "0"],
    ["0", "0", "0", "1/8"],
]


def table_cells(jp):
    """Cell strings of the rendered bordered table (marginal border dropped)."""
    lines = render_table(jp).splitlines()[2:-2]
    return [ln.split("|")[1].split() for ln in lines]


def catalogue(n):
    specs = [CopulaSpec.independence(n), CopulaSpec.frechet_upper(n)]
    specs += [CopulaSpec.gaussian_rho(rho, n) for rho in (-0.5, 0.0, 0.5)]
    specs += [CopulaSpec.clayton(theta, n) for theta in (0.5, 2.0)]
    specs += [CopulaSpec.gumbel(theta, n) for theta in (1.5, 3.0)]
    return specs


def label(spec):
    if spec.family == "gaussian":
        return f"gaussian(rho={spec.corr[0, 1]:g}, n={spec.dim})"
    return spec.name


def tol_for(spec, closed=1e-9, gaussian=1e-5):
    return gaussian if spec.family == "gaussian" else closed


def test_criterion_1_reference_tables(record):
    t0 = time.perf_counter()
    ind = CopulaModel(CopulaSpec.independence(2))
    fre = CopulaModel(CopulaSpec.frechet_upper(2))
    checks = {
        "independence": table_cells(ind(Profile([P1, P2]))) == TABLE_IND,
        "independence refined": table_cells(ind(Profile([P1_FINE, P2]))) == TABLE_IND_FINE,
        "frechet": table_cells(fre(Profile([P1, P2]))) == TABLE_FRECHET,
        "frechet refined": table_cells(fre(Profile([P1_FINE, P2]))) == TABLE_FRECHET_FINE,
    }
    fine = ind(Profile([P1_FINE, P2]))
    checks["f(3,2) = f(4,2) = 1/32"] = fine[3, 2] == fine[4, 2] == 1 / 32
    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed < 1.0
    failed = [k for k, v in checks.items() if not v]
    record(1, ok, f"4 tables exact={not failed}{' ' + str(failed) if failed else ''}, {elapsed:.3f} s (< 1 s)")
    assert ok


def test_criterion_2_counterexample(record):
    tables_ok = (
        table_cells(maximal_coupling(P1, P2)) == TABLE_MAXIMAL
        and table_cells(maximal_coupling(P1_FINE, P2)) == TABLE_MAXIMAL_FINE
    )
    rep = check_ia_at(get_model("maximal-coupling"), Profile([P1_FINE, P2]), 1, 3)
    w = rep.witness or {}
    witness_ok = (
        rep.verdict == "fail" and w.get("cell") == [1, 4] and w.get("lhs") == 0.25 and w.get("rhs") == 0.125
    )
    ok = tables_ok and witness_ok
    record(
        2,
        ok,
        f"tables exact={tables_ok}; check_ia_at verdict={rep.verdict} cell={w.get('cell')} "
        f"lhs={w.get('lhs')} rhs={w.get('rhs')}",
    )
    assert ok


def test_criterion_3_ia_property_suite(record):
    t0 = time.perf_counter()
    rows = []
    ok = True
    for n in (2, 3):
        for spec in catalogue(n):
            tol = tol_for(spec)
            rep = check_ia_randomized(CopulaModel(spec), 1000, seed=42, n=n, zmax=6, tol=tol)
            good = rep.passed and rep.trials == 1000 and rep.worst_violation <= tol
            ok &= good
            rows.append((label(spec), rep.verdict, rep.worst_violation))
    elapsed = time.perf_counter() - t0
    worst = max(r[2] for r in rows)
    failed = [r for r in rows if r[1] != "pass"]
    ok = ok and elapsed < 60
    record(
        3,
        ok,
        f"{len(rows)} models x 1000 trials, {len(rows) - len(failed)} pass, worst violation {worst:.2e}, "
        f"{elapsed:.1f} s (< 60 s)",
    )
    for name, verdict, w in rows:
        print(f"    {name:32s} {verdict:5s} {w:.2e}")
    assert ok


def test_criterion_4_extraction(record):
    rows = []
    ok = True
    for spec in catalogue(2):
        rep = check_extraction_against(CopulaModel(spec), spec, k=6, tol=tol_for(spec))
        ok &= rep.passed
        rows.append((label(spec), rep.verdict, rep.worst_violation))
    # three dimensions at depth 4 (depth 6 means 65**3 oracle queries per model)
    for spec in catalogue(3):
        rep = check_extraction_against(CopulaModel(spec), spec, k=4, tol=tol_for(spec))
        ok &= rep.passed
        rows.append((label(spec) + " k=4", rep.verdict, rep.worst_violation))

    maximal = get_model("maximal-coupling")
    ext = extracted_copula(maximal, 2, 6)
    neg = verify_extraction_consistency(maximal, ext, trials=100, seed=42)
    has_witness = neg.verdict == "fail" and neg.witness is not None and "profile" in neg.witness
    ok = ok and has_witness
    worst = max(r[2] for r in rows)
    record(
        4,
        ok,
        f"{sum(r[1] == 'pass' for r in rows)}/{len(rows)} extracted grids match (worst {worst:.2e}); "
        f"maximal coupling vs own extraction: {neg.verdict}, witness profile {neg.witness and neg.witness['profile']}",
    )
    assert ok


def test_criterion_5_factorization_and_neutrality(record):
    parts = {}
    ind3 = CopulaSpec.independence(3)
    parts["independence, every M"] = all(
        verify_factorization(ind3, M, k=4, tol=1e-12).passed
        for M in ([], [1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3])
    )
    block = CopulaSpec.gaussian([[1, 0, 0], [0, 1, 0.6], [0, 0.6, 1]])
    parts["gaussian block, M={1}"] = verify_factorization(block, [1], k=4, tol=1e-5).passed

    fre = CopulaSpec.frechet_upper(2)
    rep = verify_factorization(fre, [1], k=5, tol=1e-12)
    lhs, rhs = factorization_sides(fre, [1], np.array([0.5, 0.25]))
    parts["frechet M={1} fails"] = rep.verdict == "fail"
    parts["deviation at (0.5, 0.25) = 0.125"] = abs(lhs - rhs) == 0.125

    neut = check_m_neutrality_randomized(CopulaModel(CopulaSpec.independence(2)), 500, seed=42, tol=1e-12)
    parts["independence neutral, 500 cases"] = neut.passed and neut.trials == 500
    p = Profile([P1, P2])
    neg = check_m_neutrality(CopulaModel(fre), p, 1, (2, 1, 3), tol=1e-12)
    parts["frechet not neutral"] = neg.verdict == "fail"

    ok = all(parts.values())
    failed = [k for k, v in parts.items() if not v]
    record(
        5,
        ok,
        f"{len(parts) - len(failed)}/{len(parts)} sub-checks; frechet worst grid point {rep.witness['point']} "
        f"(deviation {rep.worst_violation:g}), stated point (0.5, 0.25) deviation {lhs - rhs:g}"
        + (f"; failed: {failed}" if failed else ""),
    )
    assert ok


def test_criterion_6_axioms(record):
    rows = []
    ok = True
    for n, k in ((2, 6), (3, 4)):
        for spec in catalogue(n):
            rep = check_copula_axioms(spec, k)
            mass_tol = 1e-4 if (spec.family == "gaussian" and n == 3) else 1e-9
            good = rep.passed and abs(rep.total_mass - 1.0) <= mass_tol
            ok &= good
            rows.append((label(spec), good, abs(rep.total_mass - 1.0)))
    worst = max(r[2] for r in rows)
    record(6, ok, f"{sum(r[1] for r in rows)}/{len(rows)} specs pass all three axioms; "
                  f"worst partition-of-unity error {worst:.2e}")
    assert ok


def test_criterion_7_gaussian_anchor(record):
    # independent oracle: adaptive 2-D quadrature of the density over (-inf, 0]^2
    rho = 0.5
    c = 1.0 / (2 * np.pi * np.sqrt(1 - rho**2))

    def density(y, x):
        return c * np.exp(-(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho**2)))

    quad, _ = integrate.dblquad(density, -np.inf, 0, -np.inf, 0, epsabs=1e-13, epsrel=1e-13)
    value = evaluate(CopulaSpec.gaussian([[1, rho], [rho, 1]]), [0.5, 0.5])
    ok = abs(value - 0.3333333) <= 1e-6 and abs(value - quad) <= 1e-6
    record(7, ok, f"C(0.5, 0.5) = {value:.15f}, quadrature {quad:.15f}, target 0.3333333 +- 1e-6")
    assert ok
