"""Self-check suite run by ``mercator verify``.

Every check returns ``(passed, detail)``; the report is plain text with one
line per check and is byte-identical between runs and worker counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from . import gudermann as gn
from . import series as sc
from . import terrell as tr
from . import tolerances

SEED = 20080508

Check = Callable[[], Tuple[bool, str]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _err(x: float) -> str:
    return f"{x:.3e}"


def seidel_euler(m: int) -> List[int]:
    """Secant numbers by the boustrophedon (Seidel) triangle, independent of series code."""
    row = [1]
    out = [1]
    for n in range(1, 2 * m + 1):
        new = [0]
        for k in range(n):
            new.append(new[-1] + row[n - 1 - k])
        row = new
        if n % 2 == 0:
            out.append(row[-1])
    return out[: m + 1]


def build_checks(order: int, grid: int, seed: int = SEED) -> List[Tuple[str, Check]]:
    checks: List[Tuple[str, Check]] = []

    def add(name):
        def deco(fn):
            checks.append((name, fn))
            return fn

        return deco

    m = max(1, (order - 1) // 2)

    @add("euler-numbers")
    def _():
        ok = sc.euler_numbers(m) == seidel_euler(m)
        return ok, f"E_0..E_{m} vs boustrophedon triangle"

    @add("lambda-dual-construction")
    def _():
        lam = sc.gudermann_log_series(order)
        via_sin = sc.series_compose(sc.arctanh_series(order), sc.sin_series(order))
        via_sec = sc.sec_series(order - 1).integral()
        return lam == via_sin == via_sec, f"order {order}: Euler form = arctanh o sin = int sec"

    @add("gd-compositional-inverse")
    def _():
        lam = sc.gudermann_log_series(order)
        gd = sc.gudermann_exp_series(order)
        x = sc.UnivariateSeries.variable(order)
        ok = (
            gd == sc.series_invert_composition(lam)
            and sc.series_compose(lam, gd) == x
            and sc.series_compose(gd, lam) == x
        )
        return ok, f"order {order}: gd = lam^-1, lam o gd = gd o lam = x"

    @add("group-law-axioms")
    def _():
        report = sc.check_group_law_axioms(sc.mercator_group_law(order))
        return report.passed, ", ".join(f"{k} {r.describe()}" for k, r in report.items())

    @add("group-law-two-paths")
    def _():
        F = sc.mercator_group_law(order)
        G = sc.group_law_via_aberration(order)
        ok = F == G
        if order >= 3:
            ok = ok and F[2, 1] == F[1, 2] == sc.Fraction(-1, 2)
        return ok, "gd(lam X + lam Y) = arcsin((sX+sY)/(1+sX sY)); c21 = c12 = -1/2"

    @add("group-law-parity-inverse")
    def _():
        F = sc.mercator_group_law(order)
        ok = F.negate_arguments() == -F and sc.check_formal_inverse(F)
        return ok, "F(-X,-Y) = -F(X,Y), F(X,-X) = 0"

    @add("involution-coefficients")
    def _():
        return sc.check_involution_coefficients(order), f"gd_(2n+1) = (-1)^n lam_(2n+1) to order {order}"

    xs = np.linspace(-1.5, 1.5, grid + 2)[1:-1]

    @add("lambda-representations")
    def _():
        worst = 0.0
        for x in xs:
            vals = [gn.lambda_num(float(x), f) for f in gn.FORMULAS]
            scale = max(1.0, abs(vals[0]))
            worst = max(worst, (max(vals) - min(vals)) / scale)
        return worst < tolerances.CORE, f"max rel spread {_err(worst)} on {len(xs)} points"

    @add("lambda-antiperiodic")
    def _():
        worst = max(abs(gn.lambda_num(float(x) + math.pi) + gn.lambda_num(float(x))) for x in xs)
        return worst < tolerances.ROUND_TRIP, f"max |lam(x+pi)+lam(x)| {_err(worst)}"

    @add("lambda-round-trip")
    def _():
        pts = np.linspace(-1.4, 1.4, grid)
        worst = max(abs(gn.lambda_inv_num(gn.lambda_num(float(x))) - x) for x in pts)
        return worst < tolerances.ROUND_TRIP, f"max error {_err(worst)}"

    g2 = np.linspace(-1.4, 1.4, min(grid, 100))

    @add("closed-form-vs-lambda-route")
    def _():
        worst = 0.0
        worst_log = 0.0
        for a in g2:
            for b in g2:
                a_, b_ = float(a), float(b)
                s = gn.mercator_add(a_, b_)
                worst = max(worst, abs(s - gn.lambda_inv_num(gn.lambda_num(a_) + gn.lambda_num(b_))))
                worst_log = max(worst_log, abs(math.remainder(s - gn.mercator_add_log_form(a_, b_), 2 * math.pi)))
        ok = worst < tolerances.CORE and worst_log < tolerances.CORE
        return ok, f"{len(g2)}^2 grid: atan2 vs lambda {_err(worst)}, vs i log form {_err(worst_log)}"

    @add("cayley-identity")
    def _():
        pts = np.linspace(-1.4, 1.4, 200)
        worst = max(gn.cayley_lambda_check(float(x)) for x in pts)
        return worst < tolerances.ROUND_TRIP, f"max residual {_err(worst)} on 200 points"

    @add("aberration-sine")
    def _():
        worst = max(
            abs(gn.aberration_sine(float(a), float(b)) - math.sin(gn.mercator_add(float(a), float(b))))
            for a in g2
            for b in g2
        )
        return worst < tolerances.CORE, f"max error {_err(worst)}"

    @add("circle-group-random")
    def _():
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size=(grid, 3)) * 0.999
        worst = 0.0
        for a, b, c in pts:
            a, b, c = float(a), float(b), float(c)
            add_ = gn.mercator_add
            worst = max(
                worst,
                abs(add_(add_(a, b), c) - add_(a, add_(b, c))),
                abs(add_(a, b) - add_(b, a)),
                abs(add_(a, -a)),
                abs(add_(a, 0.0) - a),
            )
        return worst < 1e-11, f"{grid} seeded triples: assoc/comm/inverse/unit {_err(worst)}"

    @add("proposition-routes")
    def _():
        rows = tr.rotation_table(
            [0.05 * k for k in range(1, 20)], [-1.4 + 0.05 * k for k in range(57)]
        )
        worst = max(r.abs_diff for r in rows)
        return worst < tolerances.CORE, f"{len(rows)} rows, max |phi_taylor - phi_fgl| {_err(worst)}"

    @add("closest-approach")
    def _():
        worst = 0.0
        for k in range(1, 10):
            v = k / 10
            for route in (tr.rotation_fgl(v, 0.0), tr.rotation_taylor(v, 0.5 * math.pi)):
                worst = max(worst, abs(route.phi - math.asin(v)))
        return worst < tolerances.CLOSEST_APPROACH, f"max |phi(v,0) - arcsin v| {_err(worst)}"

    @add("velocity-reflection")
    def _():
        worst = max(
            abs(tr.rotation_fgl(-v, t).phi + tr.rotation_fgl(v, -t).phi)
            for v in (0.1, 0.5, 0.9)
            for t in np.linspace(-1.4, 1.4, 29)
        )
        return worst < tolerances.CORE, f"phi(-v, t) = -phi(v, -t): {_err(worst)}"

    @add("terrell-convergence")
    def _():
        from .render import Mesh, MotionState, render_sequence

        mismatches = []
        for y0 in (50.0, 100.0, 200.0, 400.0):
            pairs, _ = render_sequence(Mesh.cube(), MotionState(0.6, y0), None, [0.0])
            mismatches.append(pairs[0].mismatch)
        ratios = [a / b for a, b in zip(mismatches, mismatches[1:])]
        ok = all(1.5 <= r <= 3.0 for r in ratios) and mismatches[-1] < 0.02
        return ok, "v=0.6 cube: mismatch " + " ".join(_err(m) for m in mismatches)

    return checks


def run_checks(order: int = 13, grid: int = 1000, workers: int = 1, seed: int = SEED) -> List[CheckResult]:
    checks = build_checks(order, grid, seed)

    def run(item):
        name, fn = item
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        return CheckResult(name, bool(ok), detail)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, checks))
    return [run(c) for c in checks]


def format_report(results: List[CheckResult], order: int, grid: int, seed: int = SEED) -> str:
    lines = [f"mercator verify: order={order} grid={grid} seed={seed}"]
    lines += [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
