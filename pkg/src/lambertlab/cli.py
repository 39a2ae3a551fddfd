"""Command-line entry points: run a scenario, reproduce the worked example, drive the invariant suite.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage or
parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import properties
from .criteria import closed_range_check, fredholm_check
from .errors import InvalidInput
from .lambert import assemble_operator, sandwich_check
from .measure import conditional_expectation
from .report import bands_csv, dumps, make_report, result
from .scenario import Multiplier, Scenario, load_scenario, midpoint_grid, symmetric_pairs
from .young import Entropy

ALG_TOL = 1e-12
BAND_TOL = 1e-12

PAPER_INTERVAL = (-3.0, 3.0)
# u(x) = x^4 + sin x + 3
PAPER_MULTIPLIER = Multiplier(poly=(3.0, 0.0, 0.0, 0.0, 1.0), sin=((1.0, 1.0),))


# --- individual checks ----------------------------------------------------

def check_sandwich(sc: Scenario, params: dict) -> dict:
    tol = float(params.get("tol", 1e-6))
    rep = sandwich_check(sc.u, sc.young, sc.partition, sc.space, net=params.get("net"),
                         tol=tol, seed=int(params.get("seed", 0)),
                         restarts=int(params.get("restarts", 4)))
    return result("sandwich", params, rep.to_dict(), rep.passed, {"tol": tol})


def check_closed_range(sc: Scenario, params: dict) -> dict:
    threshold = float(params.get("threshold", 0.0))
    rep = closed_range_check(sc.u, sc.young, sc.partition, sc.space, threshold)
    passed = True
    if "expect_verdict" in params:
        passed = rep.verdict == bool(params["expect_verdict"])
    return result("closed-range", params, rep.to_dict(), passed)


def check_fredholm(sc: Scenario, params: dict) -> dict:
    n_max = int(params.get("n_max", 32))
    rep = fredholm_check(sc.u, sc.young, sc.partition, sc.space, n_max)
    total = sum(m for _, m in rep.bands) + rep.residual_measure + rep.zero_set_measure
    band_err = abs(total - sc.space.total)
    passed = band_err <= BAND_TOL * sc.space.total and rep.kernel_dim + rep.rank == sc.space.n
    values = rep.to_dict()
    values["band_sum_error"] = band_err
    if "min_abs_Eu_at_least" in params:
        passed = passed and rep.min_abs_Eu >= float(params["min_abs_Eu_at_least"])
    return result("fredholm", params, values, passed, {"band_sum": BAND_TOL})


def check_delta2(sc: Scenario, params: dict) -> dict:
    x_max = float(params.get("x_max", 10.0))
    n_grid = int(params.get("n_grid", 1000))
    k = sc.young.delta2_estimate(x_max, n_grid)
    passed = math.isfinite(k)
    if "below" in params:
        passed = passed and k < float(params["below"])
    return result("delta2", params, {"estimate": k}, passed)


def check_properties(sc: Scenario, params: dict) -> dict:
    seed = int(params.get("seed", 0))
    rng = np.random.default_rng(seed)
    n = sc.space.n

    def vec():
        return tuple(float(x) for x in rng.normal(0.0, 1.0, n))

    inst = properties.Instance(
        weights=tuple(float(w) for w in sc.space.weights),
        labels=tuple(int(k) for k in sc.partition.labels),
        young=sc.young.to_dict(),
        f=vec(), g=vec(), h=vec(), u=tuple(float(x) for x in sc.u), v=vec(),
        a=float(rng.normal()), b=float(rng.normal()),
    )
    outcome, failed = {}, []
    for name in properties.INVARIANTS:
        ok, _ = properties.check(name, inst)
        outcome[name] = "skipped" if ok is None else ("pass" if ok else "fail")
        if ok is False:
            failed.append(name)
    return result("properties", params, {"invariants": outcome, "failed": failed}, not failed,
                  {"algebraic": properties.ALG_TOL, "norm": properties.NORM_TOL})


CHECKS = {
    "sandwich": check_sandwich,
    "closed-range": check_closed_range,
    "fredholm": check_fredholm,
    "delta2": check_delta2,
    "properties": check_properties,
}


def run_check(sc: Scenario, spec: dict) -> dict:
    params = {k: v for k, v in spec.items() if k != "name"}
    try:
        return CHECKS[spec["name"]](sc, params)
    except (ArithmeticError, InvalidInput) as e:
        return result(spec["name"], params, {}, False, error=f"{type(e).__name__}: {e}")


def run_scenario(path, timestamp: bool = False) -> dict:
    sc = load_scenario(path)
    results = [run_check(sc, c) for c in sc.checks]
    return make_report("run", {"scenario": str(path), "name": sc.name}, results, timestamp)


# --- worked example ---------------------------------------------------------

def paper_scenario(grid_points: int, checks=()) -> Scenario:
    if grid_points < 4 or grid_points % 2:
        raise InvalidInput("grid_points must be even and >= 4")
    sp = midpoint_grid(PAPER_INTERVAL, grid_points, symmetric=True)
    return Scenario(sp, symmetric_pairs(sp), Entropy(), PAPER_MULTIPLIER, tuple(checks),
                    "paper-example")


def _partner(sc: Scenario) -> np.ndarray:
    mate = np.empty(sc.space.n, dtype=int)
    for i, j in sc.partition.blocks:
        mate[i], mate[j] = j, i
    return mate


def example_paper(grid_points: int = 1000, sandwich_points: int = 4,
                  timestamp: bool = False) -> dict:
    """Reproduce the worked example on a symmetric midpoint grid of [-3, 3]."""
    sc = paper_scenario(grid_points)
    sp, part, x = sc.space, sc.partition, np.asarray(sc.space.points)
    u = sc.u
    results = []

    Eu = conditional_expectation(u, part, sp)
    Ex = conditional_expectation(x, part, sp)
    err_Eu = float(np.abs(Eu - (x**4 + 3)).max())
    err_odd = float(np.abs(Ex).max())
    results.append(result(
        "expectation", {"grid_points": grid_points},
        {"max_err_Eu_vs_x4_plus_3": err_Eu, "max_abs_E_of_x": err_odd},
        err_Eu <= ALG_TOL and err_odd <= ALG_TOL, {"abs": ALG_TOL}))

    T = assemble_operator(u, part, sp, sc.young).entries
    mate = _partner(sc)
    rows = np.arange(sp.n)
    diag_err = float(np.abs(T[rows, rows] - (x**4 + 0.5 * np.sin(x) + 3)).max())
    off_err = float(np.abs(T[rows, mate] - 0.5 * np.sin(x)).max())
    rest = T.copy()
    rest[rows, rows] = 0.0
    rest[rows, mate] = 0.0
    stray = float(np.abs(rest).max())
    one_err = float(np.abs(T @ np.ones(sp.n) - u).max())
    results.append(result(
        "operator-action", {"grid_points": grid_points},
        {"max_err_self_coefficient": diag_err, "max_err_mirror_coefficient": off_err,
         "max_other_entry": stray, "max_err_T_of_one_vs_u": one_err},
        max(diag_err, off_err, stray, one_err) <= ALG_TOL, {"abs": ALG_TOL}))

    expected_min = 3.0 + (3.0 / grid_points) ** 4
    fred = check_fredholm(sc, {"min_abs_Eu_at_least": 3.0})
    fred["values"]["expected_min_abs_Eu"] = expected_min
    fred["values"]["min_abs_Eu_error"] = abs(fred["values"]["min_abs_Eu"] - expected_min)
    fred["passed"] = fred["passed"] and fred["values"]["min_abs_Eu_error"] <= ALG_TOL
    results.append(fred)
    results.append(check_closed_range(sc, {"expect_verdict": True}))
    results.append(check_delta2(sc, {"x_max": 10.0, "n_grid": 1000, "below": 5.0}))

    coarse = paper_scenario(sandwich_points)
    sw = check_sandwich(coarse, {})
    sw["inputs"] = {"grid_points": sandwich_points}
    results.append(sw)
    return make_report("example-paper", {"grid_points": grid_points}, results, timestamp)


# --- invariant suite ----------------------------------------------------------

def run_properties(seed: int = 0, cases: int = 100, timestamp: bool = False) -> dict:
    if cases < 1:
        raise InvalidInput("cases must be >= 1")
    stats, failures = properties.run_suite(seed, cases)
    results = [result(name, {"seed": seed, "cases": cases}, s, s["failures"] == 0,
                      {"algebraic": properties.ALG_TOL, "norm": properties.NORM_TOL})
               for name, s in stats.items()]
    return make_report("props", {"seed": seed, "cases": cases}, results, timestamp,
                       failures=failures)


def replay(path) -> dict:
    """Re-run the invariants recorded as failures in a props report."""
    data = json.loads(Path(path).read_text())
    results = []
    for fail in data.get("failures", []):
        inst = properties.Instance.from_dict(fail["instance"])
        ok, detail = properties.check(fail["invariant"], inst)
        results.append(result(fail["invariant"], {"case": fail["case"]}, detail, bool(ok)))
    return make_report("props-replay", {"report": str(path)}, results)


# --- argument parsing -----------------------------------------------------------

def _emit(report: dict, out: str | None, bands: str | None = None) -> int:
    text = dumps(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if bands:
        Path(bands).write_text(bands_csv(report))
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lambertlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute the checks listed in a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out")
    r.add_argument("--bands-csv", help="also write band tables as CSV")
    r.add_argument("--timestamp", action="store_true", help="add a generated_at field")

    e = sub.add_parser("example-paper", help="reproduce the x^4 + sin x + 3 example")
    e.add_argument("--grid-points", type=int, default=1000)
    e.add_argument("--out")
    e.add_argument("--bands-csv")
    e.add_argument("--timestamp", action="store_true")

    q = sub.add_parser("props", help="seeded invariant suite over every module")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--cases", type=int, default=100)
    q.add_argument("--replay", help="re-run the failures stored in a props report")
    q.add_argument("--out")
    q.add_argument("--timestamp", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.command == "run":
            return _emit(run_scenario(args.scenario, args.timestamp), args.out, args.bands_csv)
        if args.command == "example-paper":
            return _emit(example_paper(args.grid_points, timestamp=args.timestamp),
                         args.out, args.bands_csv)
        if args.replay:
            return _emit(replay(args.replay), args.out)
        return _emit(run_properties(args.seed, args.cases, args.timestamp), args.out)
    except (InvalidInput, json.JSONDecodeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
