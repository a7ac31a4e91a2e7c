"""Identity sweep engine.

Every :class:`IdentityId` maps to one check routine that walks its grid and
returns one :class:`IdentityResidual` per admissible point. Evaluation
errors become failed records; a sweep never aborts.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable

from .. import oracle
from .._series import EPS
from ..errors import PreconditionError, QSpecialError
from ..params import DEFAULT_POLICY, QParam, TruncationPolicy
from ..qbessel import bessel_solution, diff_eq_terms, hahn_exton_j, j_limit_series, j_negative_int
from ..qcore import (
    log_q_gamma,
    psi_over_gamma_limit,
    q_euler_constant,
    q_gamma,
    q_gamma_residue,
    q_number,
    q_psi,
    q_psi_residue,
)
from ..qneumann import (
    neumann_solution,
    q_neumann,
    q_neumann_int_psi_form,
    q_neumann_negative_psi_form,
)
from .product import Window, product_lhs_J, product_lhs_N, product_rhs_J, product_rhs_N

__all__ = [
    "IdentityId",
    "IdentityResidual",
    "SweepConfig",
    "SUITES",
    "run_identity",
    "run_suite",
    "default_tolerances",
]


class IdentityId(enum.Enum):
    DiffEqJ = "DiffEqJ"
    DiffEqN = "DiffEqN"
    PsiRecForward = "PsiRecForward"
    PsiRecBackward = "PsiRecBackward"
    PsiAsymptote = "PsiAsymptote"
    PsiIsDerivative = "PsiIsDerivative"
    GammaFunctional = "GammaFunctional"
    JNegOrder = "JNegOrder"
    NNegOrder = "NNegOrder"
    RecurrenceUp = "RecurrenceUp"
    RecurrenceDown = "RecurrenceDown"
    DualPathN = "DualPathN"
    NearIntegerLimit = "NearIntegerLimit"
    ResidueGamma = "ResidueGamma"
    ResiduePsi = "ResiduePsi"
    PsiOverGamma = "PsiOverGamma"
    ClassicalPsiLimit = "ClassicalPsiLimit"
    ClassicalJLimit = "ClassicalJLimit"
    ClassicalNLimit = "ClassicalNLimit"
    ProductJ = "ProductJ"
    ProductN = "ProductN"


I = IdentityId

SUITES: dict[str, tuple[IdentityId, ...]] = {
    "diffeq": (I.DiffEqJ, I.DiffEqN),
    "recurrence": (
        I.PsiRecForward,
        I.PsiRecBackward,
        I.PsiAsymptote,
        I.GammaFunctional,
        I.RecurrenceUp,
        I.RecurrenceDown,
    ),
    "negorder": (I.JNegOrder, I.NNegOrder),
    "dualpath": (I.DualPathN,),
    "residue": (I.ResidueGamma, I.ResiduePsi, I.PsiOverGamma),
    "limits": (I.ClassicalPsiLimit, I.ClassicalJLimit, I.ClassicalNLimit),
    "nearinteger": (I.NearIntegerLimit,),
    "product": (I.ProductJ, I.ProductN),
    "derivative": (I.PsiIsDerivative,),
}
SUITES["all"] = tuple(i for ids in SUITES.values() for i in ids)


def default_tolerances() -> dict[IdentityId, float]:
    return {
        I.DiffEqJ: 1e-10,
        I.DiffEqN: 1e-9,
        I.PsiRecForward: 1e-10,
        I.PsiRecBackward: 1e-10,
        I.PsiAsymptote: 1e-10,
        I.PsiIsDerivative: 1e-8,
        I.GammaFunctional: 1e-13,
        I.JNegOrder: 1e-12,
        I.NNegOrder: 1e-12,
        I.RecurrenceUp: 1e-10,
        I.RecurrenceDown: 1e-10,
        I.DualPathN: 1e-10,
        I.NearIntegerLimit: math.nextafter(1.0, 0.0),
        I.ResidueGamma: 1e-6,
        I.ResiduePsi: 1e-5,
        I.PsiOverGamma: 1e-6,
        I.ClassicalPsiLimit: 5e-3,
        I.ClassicalJLimit: 5e-3,
        I.ClassicalNLimit: 2e-2,
        I.ProductJ: 1e-8,
        I.ProductN: 1e-8,
    }


def _log_grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    step = math.log(hi / lo) / (n - 1)
    return tuple(lo * math.exp(i * step) for i in range(n - 1)) + (hi,)


@dataclass(frozen=True)
class IdentityResidual:
    identity: IdentityId
    params: dict[str, Any]
    residual: float
    scale: float
    tol: float
    passed: bool
    diagnostic: str | None = None

    @classmethod
    def judge(
        cls,
        identity: IdentityId,
        params: dict[str, Any],
        residual: float,
        scale: float,
        tol: float,
        diagnostic: str | None = None,
    ) -> "IdentityResidual":
        residual = abs(residual)
        if not scale > 0 or not math.isfinite(scale):
            scale = 1.0
        ok = math.isfinite(residual) and residual / scale <= tol
        return cls(identity, params, residual, scale, tol, ok, diagnostic)

    @classmethod
    def failure(cls, identity: IdentityId, params: dict[str, Any], tol: float, exc: BaseException):
        return cls(identity, params, math.nan, 1.0, tol, False, f"{type(exc).__name__}: {exc}")

    @property
    def normalized(self) -> float:
        return self.residual / self.scale


@dataclass
class SweepConfig:
    """Grids, tolerances and summation settings for a verification run."""

    q_grid: tuple[float, ...] = (0.3, 0.5, 0.9)
    nu_grid: tuple[float, ...] = (0.0, 1.0, 2.0, 5.0, 0.5, 2.75)
    x_grid: tuple[float, ...] = field(default_factory=lambda: _log_grid(0.01, 3.0, 20))
    tolerances: dict[IdentityId, float] = field(default_factory=default_tolerances)
    window: Window = field(default_factory=Window)
    policy: TruncationPolicy = DEFAULT_POLICY
    psi_shifts: tuple[int, ...] = (1, 2, 3, 5, 10)
    psi_asymptote_nu: tuple[float, ...] = (10.0, 20.0, 50.0)
    extra_nu: tuple[float, ...] = (-0.5, -1.5, -2.3)
    #: balances O(h^2) truncation against rounding in log Gamma_q amplified by 1/h
    fd_step: float = 1e-5
    neg_orders: tuple[int, ...] = (1, 2, 3)
    dual_orders: tuple[int, ...] = (0, 1, 2, 3)
    dual_x: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0)
    residue_q: tuple[float, ...] = (0.5, 0.9)
    residue_orders: tuple[int, ...] = (0, 1, 2)
    closed_form_tol: float = 1e-14
    limit_q: tuple[float, ...] = (0.9, 0.99, 0.999)
    limit_nu: tuple[float, ...] = (0.5, 1.0, 2.5)
    limit_orders: tuple[int, ...] = (0, 1)
    limit_x: tuple[float, ...] = (0.25, 0.5, 1.0)
    euler_tol: float = 1e-2
    near_orders: tuple[int, ...] = (0, 1, 2)
    near_deltas: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    near_q: float = 0.5
    near_x: float = 1.0
    #: (x, y, nu, r, q)
    product_j_cases: tuple[tuple[float, ...], ...] = ((1.2, 0.3, 0.7, 0.4, 0.5),)
    product_j_rejects: tuple[tuple[float, ...], ...] = ((1.2, 0.3, 0.7, 3.0, 0.5), (1.2, 0.3, 0.7, 0.0, 0.5))
    #: (nu, r, q)
    product_n_cases: tuple[tuple[float, ...], ...] = ((0.5, 0.3, 0.5), (1.0, 0.3, 0.5))
    product_n_rejects: tuple[tuple[float, ...], ...] = ((-2.0, 0.3, 0.5), (0.5, 2.0, 0.5))

    def __post_init__(self):
        for name in ("q_grid", "nu_grid", "x_grid"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        for qv in self.q_grid:
            QParam(qv)
        missing = set(IdentityId) - set(self.tolerances)
        if missing:
            raise ValueError(f"no tolerance for {sorted(m.value for m in missing)}")

    def tol(self, identity: IdentityId) -> float:
        return self.tolerances[identity]

    def with_overrides(self, tolerances: dict[IdentityId, float] | None = None, rel_tol: float | None = None):
        tols = dict(self.tolerances)
        tols.update(tolerances or {})
        policy = self.policy if rel_tol is None else replace(self.policy, rel_tol=rel_tol)
        return replace(self, tolerances=tols, policy=policy)


# ---- helpers ---------------------------------------------------------------


def _is_pole(nu: float, margin: float = 1e-3) -> bool:
    return nu <= 0 and abs(nu - round(nu)) < margin


def _guarded(identity: IdentityId, params: dict, tol: float, fn: Callable[[], IdentityResidual]):
    try:
        return fn()
    except (QSpecialError, ValueError, ArithmeticError) as exc:
        return IdentityResidual.failure(identity, params, tol, exc)


def _sort_key(rec: IdentityResidual):
    p = rec.params
    order = p.get("nu", p.get("n"))
    return tuple(-math.inf if v is None else float(v) for v in (p.get("q"), order, p.get("x")))


def _defect(lhs: float, rhs: float, *others: float) -> tuple[float, float]:
    return lhs - rhs, max(abs(lhs), abs(rhs), *(abs(o) for o in others))


_CHECKS: dict[IdentityId, Callable[[SweepConfig], Iterable[IdentityResidual]]] = {}


def _check(identity: IdentityId):
    def register(fn):
        _CHECKS[identity] = fn
        return fn

    return register


# ---- difference equation ---------------------------------------------------


def _diffeq(identity: IdentityId, make: Callable, cfg: SweepConfig):
    tol = cfg.tol(identity)
    for q in cfg.q_grid:
        for nu in cfg.nu_grid:
            f = make(nu, q, cfg.policy)
            for x in cfg.x_grid:
                params = {"q": q, "nu": nu, "x": x}

                def one():
                    terms = diff_eq_terms(f, nu, x, q)
                    return IdentityResidual.judge(
                        identity, params, math.fsum(terms), max(map(abs, terms)), tol
                    )

                yield _guarded(identity, params, tol, one)


@_check(I.DiffEqJ)
def _diffeq_j(cfg):
    return _diffeq(I.DiffEqJ, bessel_solution, cfg)


@_check(I.DiffEqN)
def _diffeq_n(cfg):
    return _diffeq(I.DiffEqN, neumann_solution, cfg)


# ---- psi_q and Gamma_q ------------------------------------------------------


def _psi_term(nu: float, q: float) -> float:
    return q**nu / (1.0 - q**nu)


@_check(I.PsiRecForward)
def _psi_forward(cfg):
    tol = cfg.tol(I.PsiRecForward)
    for q in cfg.q_grid:
        lq = math.log(q)
        for nu in cfg.nu_grid:
            if _is_pole(nu):
                continue
            for n in cfg.psi_shifts:
                params = {"q": q, "nu": nu, "shift": n}

                def one():
                    s = lq * math.fsum(_psi_term(nu + l, q) for l in range(n))
                    lhs = q_psi(nu + n, q, cfg.policy).value
                    base = q_psi(nu, q, cfg.policy).value
                    d, sc = _defect(lhs, base - s, base, s)
                    return IdentityResidual.judge(I.PsiRecForward, params, d, sc, tol)

                yield _guarded(I.PsiRecForward, params, tol, one)


@_check(I.PsiRecBackward)
def _psi_backward(cfg):
    # psi(nu - n) = psi(nu) + log q sum_{l=1..n} q^(nu-l) / (1 - q^(nu-l))
    tol = cfg.tol(I.PsiRecBackward)
    for q in cfg.q_grid:
        lq = math.log(q)
        for nu in cfg.nu_grid:
            for n in cfg.psi_shifts:
                if any(_is_pole(nu - l) for l in range(n + 1)):
                    continue
                params = {"q": q, "nu": nu, "shift": n}

                def one():
                    s = lq * math.fsum(_psi_term(nu - l, q) for l in range(1, n + 1))
                    lhs = q_psi(nu - n, q, cfg.policy).value
                    base = q_psi(nu, q, cfg.policy).value
                    d, sc = _defect(lhs, base + s, base, s)
                    return IdentityResidual.judge(I.PsiRecBackward, params, d, sc, tol)

                yield _guarded(I.PsiRecBackward, params, tol, one)


@_check(I.PsiAsymptote)
def _psi_asymptote(cfg):
    # |psi_q(nu) + log(1-q)| <= 2 |log q| q^nu / (1-q) once q^nu <= 1/2
    for q in cfg.q_grid:
        floor = -math.log1p(-q)
        for nu in cfg.psi_asymptote_nu:
            params = {"q": q, "nu": nu}
            # the bound plus rounding; never looser than the identity tolerance where the bound is tiny
            tol = max(2.0 * abs(math.log(q)) * q**nu / (1.0 - q), 4 * EPS * abs(floor))
            if q**nu < 1e-12:
                tol = min(tol, cfg.tol(I.PsiAsymptote))

            def one():
                v = q_psi(nu, q, cfg.policy).value
                return IdentityResidual.judge(I.PsiAsymptote, params, v - floor, 1.0, tol)

            yield _guarded(I.PsiAsymptote, params, tol, one)


def _derivative_nus(cfg: SweepConfig) -> list[float]:
    return [nu for nu in (*cfg.nu_grid, *cfg.extra_nu) if not _is_pole(nu)]


@_check(I.PsiIsDerivative)
def _psi_derivative(cfg):
    tol = cfg.tol(I.PsiIsDerivative)
    for q in cfg.q_grid:
        for nu in _derivative_nus(cfg):
            params = {"q": q, "nu": nu}

            def one():
                fd = oracle.finite_difference(lambda v: log_q_gamma(v, q, cfg.policy).value, nu, cfg.fd_step)
                psi = q_psi(nu, q, cfg.policy).value
                return IdentityResidual.judge(I.PsiIsDerivative, params, fd - psi, max(1.0, abs(psi)), tol)

            yield _guarded(I.PsiIsDerivative, params, tol, one)


@_check(I.GammaFunctional)
def _gamma_functional(cfg):
    tol = cfg.tol(I.GammaFunctional)
    for q in cfg.q_grid:
        for nu in _derivative_nus(cfg):
            params = {"q": q, "nu": nu}

            def one():
                lhs = q_gamma(nu + 1.0, q, cfg.policy).value
                rhs = q_number(nu, q) * q_gamma(nu, q, cfg.policy).value
                d, sc = _defect(lhs, rhs)
                return IdentityResidual.judge(I.GammaFunctional, params, d, sc, tol)

            yield _guarded(I.GammaFunctional, params, tol, one)


# ---- three-term recurrences in the order ------------------------------------

_FAMILIES = (("J", hahn_exton_j), ("N", q_neumann))


def _recurrence(identity: IdentityId, cfg: SweepConfig, up: bool):
    tol = cfg.tol(identity)
    for name, fn in _FAMILIES:
        for q in cfg.q_grid:
            rq = math.sqrt(q)
            for nu in cfg.nu_grid:
                for x in cfg.x_grid:
                    params = {"q": q, "nu": nu, "x": x, "function": name}

                    def one():
                        def f(order, arg):
                            return fn(order, arg, q, cfg.policy).value

                        if up:
                            # q^{(nu+1)/2} f_{nu+1}(q^{1/2} x) - f_{nu+1}(x) = (q-1) x f_nu(x)
                            a = q ** ((nu + 1) / 2) * f(nu + 1, rq * x)
                            b = f(nu + 1, x)
                            c = (q - 1.0) * x * f(nu, x)
                        else:
                            # q^{nu/2} f_nu(q^{-1/2} x) - f_nu(x) = (q-1) x f_{nu+1}(x)
                            a = q ** (nu / 2) * f(nu, x / rq)
                            b = f(nu, x)
                            c = (q - 1.0) * x * f(nu + 1, x)
                        d = math.fsum((a, -b, -c))
                        return IdentityResidual.judge(identity, params, d, max(abs(a), abs(b), abs(c)), tol)

                    yield _guarded(identity, params, tol, one)


@_check(I.RecurrenceUp)
def _rec_up(cfg):
    return _recurrence(I.RecurrenceUp, cfg, up=True)


@_check(I.RecurrenceDown)
def _rec_down(cfg):
    return _recurrence(I.RecurrenceDown, cfg, up=False)


# ---- negative integer orders and the two integer-order formulas -------------


def _negorder(identity: IdentityId, cfg: SweepConfig, direct, relation):
    tol = cfg.tol(identity)
    for q in cfg.q_grid:
        for n in cfg.neg_orders:
            for x in cfg.x_grid:
                params = {"q": q, "n": n, "x": x}

                def one():
                    d, sc = _defect(direct(n, x, q, cfg.policy).value, relation(n, x, q, cfg.policy).value)
                    return IdentityResidual.judge(identity, params, d, sc, tol)

                yield _guarded(identity, params, tol, one)


@_check(I.JNegOrder)
def _j_neg(cfg):
    return _negorder(I.JNegOrder, cfg, j_limit_series, j_negative_int)


@_check(I.NNegOrder)
def _n_neg(cfg):
    return _negorder(
        I.NNegOrder, cfg, q_neumann_negative_psi_form, lambda n, x, q, p: q_neumann(-n, x, q, p)
    )


@_check(I.DualPathN)
def _dual_path(cfg):
    tol = cfg.tol(I.DualPathN)
    for q in cfg.q_grid:
        for n in cfg.dual_orders:
            for x in cfg.dual_x:
                params = {"q": q, "n": n, "x": x}

                def one():
                    a = q_neumann_int_psi_form(n, x, q, cfg.policy).value
                    b = q_neumann(n, x, q, cfg.policy).value
                    d, sc = _defect(a, b)
                    return IdentityResidual.judge(I.DualPathN, params, d, sc, tol)

                yield _guarded(I.DualPathN, params, tol, one)


@_check(I.NearIntegerLimit)
def _near_integer(cfg):
    # residual = largest ratio of successive gaps; strictly below 1 means strictly decreasing
    tol = cfg.tol(I.NearIntegerLimit)
    q, x = cfg.near_q, cfg.near_x
    for n in cfg.near_orders:
        params = {"q": q, "n": n, "x": x, "deltas": list(cfg.near_deltas)}

        def one():
            base = q_neumann(n, x, q, cfg.policy).value
            gaps = [abs(q_neumann(n + d, x, q, cfg.policy).value - base) for d in cfg.near_deltas]
            ratios = [b / a if a > 0 else math.inf for a, b in zip(gaps, gaps[1:])]
            worst = max(ratios) if ratios else 0.0
            return IdentityResidual.judge(
                I.NearIntegerLimit, params, worst, 1.0, tol, diagnostic="gaps=" + ",".join(f"{g:.3e}" for g in gaps)
            )

        yield _guarded(I.NearIntegerLimit, params, tol, one)


# ---- poles -----------------------------------------------------------------


def _pole_checks(identity: IdentityId, cfg: SweepConfig, estimate, closed, relative: bool):
    tol = cfg.tol(identity)
    for q in cfg.residue_q:
        for n in cfg.residue_orders:
            params = {"q": q, "n": n}

            def one():
                est = estimate(n, q)
                ref = closed(n, q)
                return IdentityResidual.judge(identity, params, est - ref, abs(ref) if relative else 1.0, tol)

            yield _guarded(identity, params, tol, one)


@_check(I.ResidueGamma)
def _res_gamma(cfg):
    def est(n, q):
        return oracle.estimate_residue(lambda v: q_gamma(v, q, cfg.policy).value, -n).value

    return _pole_checks(I.ResidueGamma, cfg, est, q_gamma_residue, relative=True)


@_check(I.ResiduePsi)
def _res_psi(cfg):
    def est(n, q):
        return oracle.estimate_residue(lambda v: q_psi(v, q, cfg.policy).value, -n).value

    return _pole_checks(I.ResiduePsi, cfg, est, q_psi_residue, relative=False)


@_check(I.PsiOverGamma)
def _psi_over_gamma(cfg):
    def est(n, q):
        def ratio(v):
            return q_psi(v, q, cfg.policy).value / q_gamma(v, q, cfg.policy).value

        return oracle.extrapolate_limit(ratio, -n).value

    yield from _pole_checks(I.PsiOverGamma, cfg, est, psi_over_gamma_limit, relative=True)
    # the three closed forms must agree among themselves: psi residue / Gamma residue = limit
    for q in cfg.residue_q:
        for n in cfg.residue_orders:
            params = {"q": q, "n": n, "check": "closed_form"}

            def one():
                lhs = q_psi_residue(n, q) / q_gamma_residue(n, q)
                d, sc = _defect(lhs, psi_over_gamma_limit(n, q))
                return IdentityResidual.judge(I.PsiOverGamma, params, d, sc, cfg.closed_form_tol)

            yield _guarded(I.PsiOverGamma, params, cfg.closed_form_tol, one)


# ---- q -> 1 limits ------------------------------------------------------------


def _monotone(identity: IdentityId, cfg: SweepConfig, points, error_at):
    """Error along cfg.limit_q must strictly decrease and end below the identity tolerance.

    Each record's tolerance is the previous error (or +inf for the first q);
    the last q also applies the absolute threshold.
    """
    final = cfg.tol(identity)
    for label in points:
        prev = math.inf
        for i, q in enumerate(cfg.limit_q):
            params = {"q": q, **label}
            tol = math.nextafter(prev, 0.0) if math.isfinite(prev) else math.inf
            if i == len(cfg.limit_q) - 1:
                tol = min(tol, final)
            try:
                err = abs(error_at(q, **label))
                rec = IdentityResidual.judge(identity, params, err, 1.0, tol)
            except (QSpecialError, ValueError, ArithmeticError) as exc:
                rec = IdentityResidual.failure(identity, params, tol, exc)
                err = math.nan
            yield rec
            prev = err if math.isfinite(err) else -math.inf


@_check(I.ClassicalPsiLimit)
def _psi_limit(cfg):
    classical = {nu: oracle.classical_digamma(nu) for nu in cfg.limit_nu}
    yield from _monotone(
        I.ClassicalPsiLimit,
        cfg,
        [{"nu": nu} for nu in cfg.limit_nu],
        lambda q, nu: q_psi(nu, q, cfg.policy).value - classical[nu],
    )
    q = cfg.limit_q[-1]
    params = {"q": q, "constant": "C_q"}

    def one():
        c = q_euler_constant(q, cfg.policy).value
        return IdentityResidual.judge(
            I.ClassicalPsiLimit, params, c - oracle.classical_euler_constant(), 1.0, cfg.euler_tol
        )

    yield _guarded(I.ClassicalPsiLimit, params, cfg.euler_tol, one)


def _bessel_points(cfg):
    return [{"n": n, "x": x} for n in cfg.limit_orders for x in cfg.limit_x]


@_check(I.ClassicalJLimit)
def _j_limit(cfg):
    return _monotone(
        I.ClassicalJLimit,
        cfg,
        _bessel_points(cfg),
        lambda q, n, x: hahn_exton_j(float(n), x, q, cfg.policy).value - oracle.classical_bessel_j(n, 2 * x),
    )


@_check(I.ClassicalNLimit)
def _n_limit(cfg):
    return _monotone(
        I.ClassicalNLimit,
        cfg,
        _bessel_points(cfg),
        lambda q, n, x: q_neumann(float(n), x, q, cfg.policy).value - oracle.classical_neumann_y(n, 2 * x),
    )


# ---- product formulas ----------------------------------------------------------


def _rejection(identity: IdentityId, params: dict, call: Callable[[], Any]) -> IdentityResidual:
    """Passes iff ``call`` raises PreconditionError."""
    try:
        call()
    except PreconditionError as exc:
        return IdentityResidual.judge(identity, params, 0.0, 1.0, 0.5, diagnostic=str(exc))
    except (QSpecialError, ValueError, ArithmeticError) as exc:
        return IdentityResidual.failure(identity, params, 0.5, exc)
    return IdentityResidual(identity, params, 1.0, 1.0, 0.5, False, "precondition was not rejected")


@_check(I.ProductJ)
def _product_j(cfg):
    tol = cfg.tol(I.ProductJ)
    for x, y, nu, r, q in cfg.product_j_cases:
        params = {"q": q, "nu": nu, "x": x, "y": y, "r": r}

        def one():
            lhs = product_lhs_J(x, y, nu, r, q, cfg.window, cfg.policy).value
            rhs = product_rhs_J(x, y, nu, r, q, cfg.policy).value
            return IdentityResidual.judge(I.ProductJ, params, lhs - rhs, abs(rhs), tol)

        yield _guarded(I.ProductJ, params, tol, one)
    for x, y, nu, r, q in cfg.product_j_rejects:
        params = {"q": q, "nu": nu, "x": x, "y": y, "r": r, "expect": "PreconditionError"}
        yield _rejection(I.ProductJ, params, lambda: product_lhs_J(x, y, nu, r, q, cfg.window, cfg.policy))


@_check(I.ProductN)
def _product_n(cfg):
    tol = cfg.tol(I.ProductN)
    for nu, r, q in cfg.product_n_cases:
        params = {"q": q, "nu": nu, "r": r}

        def one():
            lhs = product_lhs_N(nu, r, q, cfg.window, cfg.policy).value
            rhs = product_rhs_N(nu, r, q, cfg.policy).value
            return IdentityResidual.judge(I.ProductN, params, lhs - rhs, abs(rhs), tol)

        yield _guarded(I.ProductN, params, tol, one)
    for nu, r, q in cfg.product_n_rejects:
        params = {"q": q, "nu": nu, "r": r, "expect": "PreconditionError"}
        yield _rejection(I.ProductN, params, lambda: product_lhs_N(nu, r, q, cfg.window, cfg.policy))


assert set(_CHECKS) == set(IdentityId)


# ---- drivers ---------------------------------------------------------------------


def run_identity(identity: IdentityId, cfg: SweepConfig | None = None) -> list[IdentityResidual]:
    """All records for one identity, sorted by (q, nu or n, x)."""
    cfg = cfg or SweepConfig()
    records = list(_CHECKS[IdentityId(identity)](cfg))
    if not records:
        raise ValueError(f"{identity.value}: grid has no admissible points")
    return sorted(records, key=_sort_key)


def _run_pair(args: tuple[IdentityId, SweepConfig]) -> list[IdentityResidual]:
    return run_identity(*args)


def run_suite(suite: str, cfg: SweepConfig | None = None, workers: int = 1) -> list[IdentityResidual]:
    """Records for every identity of ``suite``, in suite order.

    With ``workers > 1`` identities run in separate processes; the result is
    the same list either way.
    """
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(sorted(SUITES))}")
    cfg = cfg or SweepConfig()
    ids = SUITES[suite]
    if workers <= 1 or len(ids) == 1:
        chunks = [run_identity(i, cfg) for i in ids]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(ids))) as pool:
            chunks = list(pool.map(_run_pair, [(i, cfg) for i in ids]))
    return [rec for chunk in chunks for rec in chunk]
