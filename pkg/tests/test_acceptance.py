"""One test per acceptance criterion, each at its stated tolerance.

Every test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary. Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import json
import math
import time

import pytest
from click.testing import CliRunner

from conftest import CRITERIA
from qspecial import q_euler_constant, q_psi
from qspecial.cli import main
from qspecial.oracle import classical_euler_constant
from qspecial.verify import IdentityId, SweepConfig, run_identity, run_suite

I = IdentityId
CFG = SweepConfig()


def report(name: str, ok: bool, detail: str) -> None:
    CRITERIA.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def worst(records) -> float:
    return max(r.normalized for r in records)


def all_pass(records) -> bool:
    return bool(records) and all(r.passed for r in records)


def test_1_diffeq():
    recs = run_suite("diffeq", CFG)
    j = [r for r in recs if r.identity is I.DiffEqJ]
    n = [r for r in recs if r.identity is I.DiffEqN]
    ok = len(j) == len(n) == 3 * 6 * 20 and worst(j) < 1e-10 and worst(n) < 1e-9 and all_pass(recs)
    report("1 diffeq", ok, f"{len(recs)} points, worst J {worst(j):.2e} (<1e-10), worst N {worst(n):.2e} (<1e-9)")


def test_2_recurrence():
    recs = run_suite("recurrence", CFG)
    psi = [r for r in recs if r.identity in (I.PsiRecForward, I.PsiRecBackward)]
    bessel = [r for r in recs if r.identity in (I.RecurrenceUp, I.RecurrenceDown)]
    families = {r.params["function"] for r in bessel}
    shifts = {r.params["shift"] for r in psi}
    tail = abs(q_psi(50.0, 0.5).value + math.log(1 - 0.5))
    ok = (
        all_pass(recs)
        and worst(psi) < 1e-10
        and worst(bessel) < 1e-10
        and families == {"J", "N"}
        and max(shifts) == 10
        and tail < 1e-10
    )
    report(
        "2 recurrence",
        ok,
        f"psi worst {worst(psi):.2e}, J/N worst {worst(bessel):.2e}, |psi_0.5(50)+log(1-q)| = {tail:.2e}",
    )


def test_3_negorder():
    recs = run_suite("negorder", CFG)
    ok = all_pass(recs) and worst(recs) < 1e-12 and {r.params["n"] for r in recs} == {1, 2, 3}
    report("3 negorder", ok, f"{len(recs)} points, worst relative {worst(recs):.2e} (<1e-12)")


def test_4_dualpath():
    recs = run_suite("dualpath", CFG)
    ok = all_pass(recs) and worst(recs) < 1e-10 and len(recs) == 4 * 3 * 4
    report("4 dualpath", ok, f"{len(recs)} points, worst relative {worst(recs):.2e} (<1e-10)")


def test_5_residue():
    recs = run_suite("residue", CFG)
    by = {i: [r for r in recs if r.identity is i and "check" not in r.params] for i in SUITES_RESIDUE}
    closed = [r for r in recs if r.params.get("check") == "closed_form"]
    ok = (
        all_pass(recs)
        and worst(by[I.ResidueGamma]) < 1e-6
        and worst(by[I.ResiduePsi]) < 1e-5
        and worst(by[I.PsiOverGamma]) < 1e-6
        and worst(closed) < 1e-14
    )
    report(
        "5 residue",
        ok,
        "Gamma {:.1e}, psi {:.1e}, psi/Gamma {:.1e}, closed-form consistency {:.1e}".format(
            worst(by[I.ResidueGamma]), worst(by[I.ResiduePsi]), worst(by[I.PsiOverGamma]), worst(closed)
        ),
    )


SUITES_RESIDUE = (I.ResidueGamma, I.ResiduePsi, I.PsiOverGamma)


def _strictly_decreasing(records, key):
    groups = {}
    for r in records:
        if "constant" in r.params:
            continue
        groups.setdefault(tuple(r.params[k] for k in key), []).append(r)
    ok = True
    for rows in groups.values():
        errs = [r.residual for r in sorted(rows, key=lambda r: r.params["q"])]
        ok &= all(b < a for a, b in zip(errs, errs[1:]))
    return ok, groups


def test_6_limits():
    recs = run_suite("limits", CFG)
    psi = [r for r in recs if r.identity is I.ClassicalPsiLimit]
    j = [r for r in recs if r.identity is I.ClassicalJLimit]
    n = [r for r in recs if r.identity is I.ClassicalNLimit]
    mono_psi, _ = _strictly_decreasing(psi, ("nu",))
    mono_j, _ = _strictly_decreasing(j, ("n", "x"))
    mono_n, _ = _strictly_decreasing(n, ("n", "x"))

    def at_end(rows):
        return max(r.residual for r in rows if r.params["q"] == 0.999 and "constant" not in r.params)

    c_err = abs(q_euler_constant(0.999).value - classical_euler_constant())
    ok = (
        all_pass(recs)
        and mono_psi
        and mono_j
        and mono_n
        and at_end(psi) < 5e-3
        and c_err < 1e-2
        and at_end(j) < 5e-3
        and at_end(n) < 2e-2
    )
    report(
        "6 limits",
        ok,
        f"monotone psi/J/N {mono_psi}/{mono_j}/{mono_n}; at q=0.999 psi {at_end(psi):.1e}, "
        f"C_q {c_err:.1e}, J {at_end(j):.1e}, N {at_end(n):.1e}",
    )


def test_7_nearinteger():
    recs = run_identity(I.NearIntegerLimit, CFG)
    ok = all_pass(recs) and {r.params["n"] for r in recs} == {0, 1, 2}
    report("7 nearinteger", ok, "; ".join(f"n={r.params['n']} {r.diagnostic}" for r in recs))


def test_8_product():
    recs = run_suite("product", CFG)
    sums = [r for r in recs if "expect" not in r.params]
    rejects = [r for r in recs if "expect" in r.params]
    ok = all_pass(recs) and len(sums) == 3 and worst(sums) < 1e-8 and len(rejects) >= 3
    report(
        "8 product",
        ok,
        f"J and N(nu=0.5, 1) worst relative {worst(sums):.2e} (<1e-8); {len(rejects)} precondition rejections",
    )


def test_9_derivative():
    recs = run_identity(I.PsiIsDerivative, CFG)
    negative = [r for r in recs if r.params["nu"] < 0]
    ok = all_pass(recs) and worst(recs) < 1e-8 and bool(negative)
    report("9 derivative", ok, f"{len(recs)} points incl. nu<0, worst {worst(recs):.2e} (<1e-8)")


def test_10_cli():
    runner = CliRunner()

    def run(*args):
        return runner.invoke(main, list(args))

    checks = {}
    r = run("eval", "--fn", "qgamma", "--q", "0.5", "--nu", "3")
    checks["eval qgamma"] = r.exit_code == 0 and r.output.startswith("1.5000000000000000e0 ")
    r = run("eval", "--fn", "jq", "--q", "0.5", "--nu", "0", "--x", "0")
    checks["eval jq x=0"] = r.exit_code == 0 and r.output.startswith("1.0000000000000000e0 ")
    r = run("eval", "--fn", "qgamma", "--q", "0.5", "--nu", "-2")
    checks["pole exit 1"] = r.exit_code == 1 and "pole at nu=-2" in r.stderr
    checks["bad q exit 2"] = run("eval", "--fn", "qgamma", "--q", "2", "--nu", "1").exit_code == 2
    table = ("table", "--fn", "nq", "--q", "0.5", "--nu-range", "0:2:3", "--x-range", "0.5:1.5:3")
    t1, t2 = run(*table), run(*table)
    lines = t1.output.splitlines()
    checks["table"] = (
        t1.exit_code == 0
        and t1.output == t2.output
        and lines[0] == "q,nu,x,value,est_error,terms,flags"
        and len(lines) == 10
    )
    checks["malformed range exit 2"] = run("table", "--fn", "nq", "--q", "0.5", "--nu-range", "1:2").exit_code == 2
    d = run("verify", "--suite", "diffeq", "--report", "json")
    doc = json.loads(d.output)
    checks["verify diffeq"] = d.exit_code == 0 and doc["summary"]["failed"] == 0
    p = run("verify", "--suite", "product", "--report", "json")
    pdoc = json.loads(p.output)
    checks["verify product json"] = p.exit_code == 0 and len(pdoc["cases"]) >= 2 and set(pdoc["cases"][0]) == {
        "identity",
        "params",
        "residual",
        "scale",
        "tol",
        "pass",
    }
    checks["verify nosuch exit 2"] = run("verify", "--suite", "nosuch").exit_code == 2
    checks["verify deterministic"] = run("verify", "--suite", "diffeq", "--report", "json").output == d.output
    bad = [k for k, v in checks.items() if not v]
    report("10 cli", not bad, f"{len(checks) - len(bad)}/{len(checks)} contract checks" + (f", failing {bad}" if bad else ""))


def test_runtime_budget():
    t0 = time.perf_counter()
    run_suite("all", CFG)
    elapsed = time.perf_counter() - t0
    report("runtime", elapsed < 60, f"full sweep in {elapsed:.1f} s (<60 s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
