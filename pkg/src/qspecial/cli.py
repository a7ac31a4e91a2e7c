"""Command-line front end.

Usage:
    qspecial eval --fn qgamma --q 0.5 --nu 3
    qspecial eval --fn nq --q 0.5 --nu 1 --x 0.7
    qspecial table --fn jq --q 0.5 --nu-range 0:2:3 --x-range 0.5:1.5:3
    qspecial verify --suite diffeq --report json

Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable

import click

from .errors import QSpecialError
from .params import Evaluation, QParam, TruncationPolicy
from .qbessel import hahn_exton_j
from .qcore import q_euler_constant, q_gamma, q_psi
from .qneumann import q_neumann
from .verify import SUITES, IdentityId, IdentityResidual, SweepConfig, run_suite

__all__ = ["main", "format_real", "parse_range", "report_json", "report_text"]

CSV_HEADER = ("q", "nu", "x", "value", "est_error", "terms", "flags")


@dataclass(frozen=True)
class _Fn:
    needs_nu: bool
    needs_x: bool
    call: Callable[..., Evaluation]


FUNCTIONS = {
    "qgamma": _Fn(True, False, lambda q, nu, x, p: q_gamma(nu, q, p)),
    "qpsi": _Fn(True, False, lambda q, nu, x, p: q_psi(nu, q, p)),
    "ceuler": _Fn(False, False, lambda q, nu, x, p: q_euler_constant(q, p)),
    "jq": _Fn(True, True, lambda q, nu, x, p: hahn_exton_j(nu, x, q, p)),
    "nq": _Fn(True, True, lambda q, nu, x, p: q_neumann(nu, x, q, p)),
}


def format_real(v: float) -> str:
    """17 significant digits, exponent without padding: 1.5000000000000000e0."""
    if not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    mantissa, exp = f"{v:.16e}".split("e")
    return f"{mantissa}e{int(exp)}"


def _flag_text(ev: Evaluation) -> str:
    return "|".join(ev.flag_names()) or "-"


class QType(click.ParamType):
    name = "q"

    def convert(self, value, param, ctx):
        if isinstance(value, QParam):
            return value
        try:
            return QParam(float(value))
        except (TypeError, ValueError) as exc:
            self.fail(str(exc), param, ctx)


class RangeType(click.ParamType):
    """a:b:steps, inclusive of both ends."""

    name = "a:b:steps"

    def convert(self, value, param, ctx):
        try:
            return parse_range(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


def parse_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like a:b:steps, got {text!r}")
    a, b = float(parts[0]), float(parts[1])
    steps = int(parts[2])
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("range ends must be finite")
    if steps == 1:
        return [a]
    return [a + (b - a) * i / (steps - 1) for i in range(steps)]


def _policy(rel_tol: float | None, max_terms: int | None) -> TruncationPolicy:
    kw = {}
    if rel_tol is not None:
        kw["rel_tol"] = rel_tol
    if max_terms is not None:
        kw["max_terms"] = max_terms
    try:
        return TruncationPolicy(**kw)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _check_args(fn: str, nu, x, x_flag: str) -> None:
    entry = FUNCTIONS[fn]
    if entry.needs_nu and nu is None:
        raise click.UsageError(f"--fn {fn} needs --nu" + ("-range" if x_flag.endswith("range") else ""))
    if entry.needs_x and x is None:
        raise click.UsageError(f"--fn {fn} needs {x_flag}")
    if not entry.needs_x and x is not None:
        raise click.UsageError(f"{x_flag} is not used by --fn {fn}")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """q-gamma, q-psi, q-Bessel and q-Neumann evaluation and verification."""


_fn_option = click.option("--fn", "fn", type=click.Choice(sorted(FUNCTIONS)), required=True)
_q_option = click.option("--q", "q", type=QType(), required=True, help="base, 0 < q <= 0.9999")
_rel_tol_option = click.option("--rel-tol", type=float, default=None, help="series stopping tolerance")
_max_terms_option = click.option("--max-terms", type=int, default=None, help="term cap per series")


@main.command("eval")
@_fn_option
@_q_option
@click.option("--nu", type=float, default=None)
@click.option("--x", type=float, default=None)
@_rel_tol_option
@_max_terms_option
def eval_cmd(fn, q, nu, x, rel_tol, max_terms):
    """Evaluate one function at one point: value est_error terms flags."""
    _check_args(fn, nu, x, "--x")
    policy = _policy(rel_tol, max_terms)
    try:
        ev = FUNCTIONS[fn].call(q, nu, x, policy)
    except (QSpecialError, ValueError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"{format_real(ev.value)} {format_real(ev.est_error)} {ev.terms_used} {_flag_text(ev)}")


@main.command("table")
@_fn_option
@_q_option
@click.option("--nu-range", type=RangeType(), default=None)
@click.option("--x-range", type=RangeType(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv"]), default="csv")
@_rel_tol_option
@_max_terms_option
def table_cmd(fn, q, nu_range, x_range, fmt, rel_tol, max_terms):
    """CSV table over a nu range (outer) and x range (inner)."""
    _check_args(fn, nu_range, x_range, "--x-range")
    policy = _policy(rel_tol, max_terms)
    entry = FUNCTIONS[fn]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    nus = nu_range if entry.needs_nu else [None]
    xs = x_range if entry.needs_x else [None]
    for nu in nus:
        for x in xs:
            cells = [format_real(q.value), "" if nu is None else format_real(nu), "" if x is None else format_real(x)]
            try:
                ev = entry.call(q, nu, x, policy)
                cells += [format_real(ev.value), format_real(ev.est_error), str(ev.terms_used), _flag_text(ev)]
            except (QSpecialError, ValueError, ArithmeticError) as exc:
                cells += ["nan", "nan", "0", type(exc).__name__]
            writer.writerow(cells)


def _json_number(v: float):
    return v if math.isfinite(v) else None


def _json_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, float):
            out[k] = _json_number(v)
        elif isinstance(v, (list, tuple)):
            out[k] = [_json_number(e) if isinstance(e, float) else e for e in v]
        else:
            out[k] = v
    return out


def report_json(suite: str, records: list[IdentityResidual]) -> str:
    cases = [
        {
            "identity": r.identity.value,
            "params": _json_params(r.params),
            "residual": _json_number(r.residual),
            "scale": _json_number(r.scale),
            "tol": _json_number(r.tol),
            "pass": r.passed,
        }
        for r in records
    ]
    passed = sum(r.passed for r in records)
    doc = {
        "suite": suite,
        "cases": cases,
        "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed},
    }
    return json.dumps(doc, indent=2, allow_nan=False)


def report_text(suite: str, records: list[IdentityResidual]) -> str:
    lines = []
    for r in records:
        params = " ".join(f"{k}={v}" for k, v in r.params.items())
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.identity.value:<18} {params}  normalized={r.normalized:.3e} tol={r.tol:.3e}"
        if r.diagnostic and not r.passed:
            line += f"  ({r.diagnostic})"
        lines.append(line)
    passed = sum(r.passed for r in records)
    lines.append(f"suite {suite}: {passed}/{len(records)} passed, {len(records) - passed} failed")
    return "\n".join(lines)


def _parse_tol(items: tuple[str, ...]) -> dict[IdentityId, float]:
    out = {}
    for item in items:
        name, sep, val = item.partition("=")
        try:
            ident = IdentityId(name)
            if not sep:
                raise ValueError
            out[ident] = float(val)
        except ValueError:
            raise click.BadParameter(f"expected IDENTITY=VALUE with a known identity, got {item!r}", param_hint="--tol")
    return out


@main.command("verify")
@click.option("--suite", type=click.Choice(sorted(SUITES)), default="all", show_default=True)
@click.option("--report", type=click.Choice(["text", "json"]), default="text", show_default=True)
@_rel_tol_option
@click.option("--tol", "tols", multiple=True, metavar="IDENTITY=VALUE", help="override one identity's tolerance")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
def verify_cmd(suite, report, rel_tol, tols, workers):
    """Run an identity suite; exit 0 iff every case passes."""
    overrides = _parse_tol(tols)
    try:
        cfg = SweepConfig().with_overrides(overrides, rel_tol)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    records = run_suite(suite, cfg, workers)
    click.echo(report_json(suite, records) if report == "json" else report_text(suite, records))
    sys.exit(0 if all(r.passed for r in records) else 1)


if __name__ == "__main__":
    main()
