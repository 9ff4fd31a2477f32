"""Configuration-driven experiment runner.

Usage:
    berkvol list
    berkvol describe <kind>
    berkvol run <config.json> [--out-dir DIR] [--threads N] [--seed S] [--m-max M]

Configs are JSON with every rational written exactly, either as the
string "num/den" or as a [num, den] pair; decimals never appear.  Reports
carry both the exact rational (as "num/den") and a display decimal.
Exit status: 0 all assertions pass, 1 assertion failure, 2 parse error,
3 validation error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from . import __version__
from .field import is_prime
from .metrics import Metric, ma_measure
from .tree import PLFunction, SkeletonTree, TreePoint, build_tree, meet
from . import experiments as ex
from . import volumes as vo

OUT_DIR_ENV = "BERKVOL_OUT_DIR"

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3


class ConfigError(Exception):
    """Raised for structurally invalid configs (exit status 3)."""


KINDS: Dict[str, str] = {
    "diff": (
        "Differentiability of relative volumes: the one-sided derivative of "
        "t -> vol(L, phi + t f, phi) at t = 0 equals the pairing of f with "
        "the Monge-Ampere measure of phi.  Checked by symmetric finite "
        "differences of extrapolated volumes against the exact pairing."
    ),
    "sandwich": (
        "Siu-type sandwich bound: for f = psi1 - psi2 a difference of psh "
        "metrics on an auxiliary O(e), the defect between the mixed pairing "
        "int f d(MA(phi) + MA(psi1)) and vol(L, phi + f, phi) lies between "
        "e * inf f and e * sup f."
    ),
    "orth": (
        "Orthogonality: the Monge-Ampere measure of the psh envelope is "
        "supported in the contact locus {env(phi) = phi}, i.e. the residual "
        "int (phi - env(phi)) d MA(env(phi)) vanishes exactly."
    ),
    "dirac": (
        "Dirac solutions: the equilibrium metric of a nonpluripolar point x "
        "solves the Monge-Ampere equation MA(phi_x) = d * delta_x exactly."
    ),
    "fekete": (
        "Fekete equidistribution: configurations maximizing the metrized "
        "Vandermonde determinant equidistribute, after retraction to the "
        "skeleton, toward the normalized Monge-Ampere measure of the metric."
    ),
    "rr": (
        "Asymptotic Riemann-Roch slope: the content of the level-m "
        "restriction to a vertical divisor grows like m times the pairing "
        "of the divisor function with the Monge-Ampere measure of the ample "
        "metric."
    ),
    "vol-energy": (
        "Volume equals energy: the extrapolated relative volume of two "
        "metrics agrees with the relative Monge-Ampere energy of their psh "
        "envelopes."
    ),
}


# ---------------------------------------------------------------------------
# Exact rational (de)serialization


def parse_rational(obj: Any, where: str) -> Fraction:
    if isinstance(obj, bool):
        raise ConfigError(f"{where}: expected a rational, got a boolean")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"{where}: bad rational {obj!r}: {e}") from None
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(x, int) for x in obj):
        if obj[1] == 0:
            raise ConfigError(f"{where}: zero denominator")
        return Fraction(obj[0], obj[1])
    raise ConfigError(f"{where}: expected 'num/den', int, or [num, den], got {obj!r}")


def fmt_rational(x: Fraction) -> Dict[str, Any]:
    x = Fraction(x)
    return {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(x)}


def fmt_point(pt: TreePoint) -> Dict[str, Any]:
    return {
        "center": f"{pt.center.numerator}/{pt.center.denominator}",
        "q": f"{pt.q.numerator}/{pt.q.denominator}",
    }


def fmt_measure(mu) -> List[Dict[str, Any]]:
    items = sorted(mu.masses.items(), key=lambda kv: (kv[0].q, str(kv[0].center)))
    return [{**fmt_point(pt), "mass": fmt_rational(m)} for pt, m in items]


# ---------------------------------------------------------------------------
# Config -> domain objects


def parse_tree_rows(rows: Any, p: int, where: str) -> Tuple[List[TreePoint], List[Fraction]]:
    if not isinstance(rows, list) or not rows:
        raise ConfigError(f"{where}: expected a nonempty list of vertex rows")
    pts, vals = [], []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 6:
            raise ConfigError(
                f"{where}[{i}]: expected [c_num, c_den, q_num, q_den, v_num, v_den]"
            )
        c = parse_rational(row[0:2], f"{where}[{i}].center")
        q = parse_rational(row[2:4], f"{where}[{i}].q")
        v = parse_rational(row[4:6], f"{where}[{i}].value")
        try:
            pts.append(TreePoint(p, c, q))
        except Exception as e:
            raise ConfigError(f"{where}[{i}]: {e}") from None
        vals.append(v)
    # The vertex list must already be meet-closed; report the offending pair.
    given = set(pts)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            m = meet(pts[i], pts[j])
            if m not in given and m not in (pts[i], pts[j]):
                raise ConfigError(
                    f"{where}: vertex set is not meet-closed; the meet of "
                    f"{pts[i]} and {pts[j]} is missing"
                )
    return pts, vals


def parse_pl_function(obj: Any, p: int, where: str) -> PLFunction:
    pts, vals = parse_tree_rows(obj, p, where)
    tree = build_tree(p, pts)
    values = dict(zip(pts, vals))
    for v in tree.vertices:
        if v not in values:
            # Only the Gauss point may be implicit; it defaults to 0.
            if v == tree.root:
                values[v] = Fraction(0)
            else:
                raise ConfigError(f"{where}: no value given for vertex {v}")
    return PLFunction(tree, values)


def parse_metric(obj: Any, p: int, where: str) -> Metric:
    if not isinstance(obj, dict) or "d" not in obj or "tree" not in obj:
        raise ConfigError(f"{where}: expected an object with 'd' and 'tree'")
    d = obj["d"]
    if not isinstance(d, int) or d < 0:
        raise ConfigError(f"{where}.d: expected a nonnegative integer")
    return Metric(d, parse_pl_function(obj["tree"], p, f"{where}.tree"))


def parse_m_range(obj: Any, where: str, m_max: Optional[int]) -> List[int]:
    if isinstance(obj, list) and all(isinstance(x, int) for x in obj):
        ms = sorted(set(obj))
    elif isinstance(obj, dict):
        try:
            start, stop = obj["start"], obj["stop"]
            step = obj.get("step", 1)
        except KeyError as e:
            raise ConfigError(f"{where}: missing {e}") from None
        ms = list(range(start, stop + 1, step))
    else:
        raise ConfigError(f"{where}: expected a list of ints or start/stop/step")
    if m_max is not None:
        ms = [m for m in ms if m <= m_max]
    if not ms or ms[0] < 1:
        raise ConfigError(f"{where}: empty or invalid m range")
    return ms


def parse_point(obj: Any, p: int, where: str) -> TreePoint:
    if not isinstance(obj, list) or len(obj) != 4:
        raise ConfigError(f"{where}: expected [c_num, c_den, q_num, q_den]")
    c = parse_rational(obj[0:2], f"{where}.center")
    q = parse_rational(obj[2:4], f"{where}.q")
    try:
        return TreePoint(p, c, q)
    except Exception as e:
        raise ConfigError(f"{where}: {e}") from None


# ---------------------------------------------------------------------------
# Experiment runners: config -> (results dict, assertions, csv rows)


def _vol_report_json(rep: vo.ExtrapolationReport) -> Dict[str, Any]:
    return {
        "estimate": fmt_rational(rep.estimate),
        "slope": fmt_rational(rep.slope),
        "error_bound": fmt_rational(rep.error_bound),
        "window": rep.window,
    }


def _series_rows(samples, normalize) -> List[Dict[str, Any]]:
    rows = []
    for m, v in samples:
        rows.append(
            {
                "m": m,
                "t": "",
                "value_num": v.numerator,
                "value_den": v.denominator,
                "normalized": float(normalize(m, v)),
            }
        )
    return rows


def run_orth(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi = parse_metric(cfg.get("metric"), p, "metric")
    residual = ex.orthogonality_experiment(phi)
    results = {"residual": fmt_rational(residual)}
    assertions = [("orthogonality_residual_zero", residual == 0, f"residual = {residual}")]
    return results, assertions, []


def run_dirac(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi = parse_metric(cfg.get("metric"), p, "metric")
    x = parse_point(cfg.get("point"), p, "point")
    rep = ex.dirac_experiment(x, phi)
    results = {
        "measure": fmt_measure(rep.measure),
        "equilibrium_values": [
            {**fmt_point(v), "value": fmt_rational(rep.metric.g.values[v])}
            for v in rep.metric.tree.vertices
        ],
    }
    assertions = [
        ("measure_is_d_dirac_at_x", rep.is_dirac(), f"measure = {rep.measure.masses}")
    ]
    return results, assertions, []


def run_diff(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi = parse_metric(cfg.get("metric"), p, "metric")
    f = parse_pl_function(cfg.get("direction"), p, "direction")
    t_grid = [parse_rational(t, "t_grid") for t in cfg.get("t_grid", ["1/8", "1/16"])]
    ms = parse_m_range(cfg.get("m_range"), "m_range", opts.m_max)
    rep = ex.diff_experiment(phi, f, t_grid, ms, workers=opts.threads)
    tol = cfg.get("tolerance")
    tol = parse_rational(tol, "tolerance") if tol is not None else None
    results = {
        "target": fmt_rational(rep.target),
        "derivatives": [
            {"t": fmt_rational(t), "estimate": fmt_rational(e), "bound": fmt_rational(b)}
            for t, e, b in rep.derivatives
        ],
    }
    assertions = []
    for t, est, bound in rep.derivatives:
        gap = abs(est - rep.target)
        limit = bound if tol is None else max(bound, tol)
        assertions.append(
            (f"derivative_within_bound_t={t}", gap <= limit, f"gap={gap} bound={bound}")
        )
    rows = []
    for leg in rep.legs:
        for m, v in leg.report.samples:
            rows.append(
                {
                    "m": m,
                    "t": f"{leg.t.numerator}/{leg.t.denominator}",
                    "value_num": v.numerator,
                    "value_den": v.denominator,
                    "normalized": float(v / (m * m)),
                }
            )
    return results, assertions, rows


def run_sandwich(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi = parse_metric(cfg.get("metric"), p, "metric")
    psi1 = parse_metric(cfg.get("psi1"), p, "psi1")
    psi2 = parse_metric(cfg.get("psi2"), p, "psi2")
    ms = parse_m_range(cfg.get("m_range"), "m_range", opts.m_max)
    rep = ex.sandwich_check(phi, psi1, psi2, ms, workers=opts.threads)
    results = {
        "lower": fmt_rational(rep.lower),
        "middle": fmt_rational(rep.middle),
        "upper": fmt_rational(rep.upper),
        "vol_bound": fmt_rational(rep.vol_bound),
    }
    assertions = [("sandwich_holds", rep.holds(), f"{rep.lower} <= {rep.middle} <= {rep.upper}")]
    return results, assertions, []


def run_vol_energy(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi = parse_metric(cfg.get("metric"), p, "metric")
    psi = parse_metric(cfg.get("metric2"), p, "metric2")
    ms = parse_m_range(cfg.get("m_range"), "m_range", opts.m_max)
    rep = vo.check_vol_equals_energy(phi, psi, ms, workers=opts.threads)
    results = {
        "volume": _vol_report_json(rep.volume),
        "energy": fmt_rational(rep.energy),
        "gap": fmt_rational(rep.gap),
    }
    assertions = [("vol_equals_energy_within_bound", rep.within_bound(), f"gap = {rep.gap}")]
    bmax = cfg.get("bound_max")
    if bmax is not None:
        bmax = parse_rational(bmax, "bound_max")
        assertions.append(
            ("error_bound_small", rep.volume.error_bound <= bmax, f"bound = {rep.volume.error_bound}")
        )
    rows = _series_rows(rep.volume.samples, lambda m, v: v / (m * m))
    return results, assertions, rows


def run_rr(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi_D = parse_pl_function(cfg.get("divisor"), p, "divisor")
    phi_A = parse_metric(cfg.get("ample"), p, "ample")
    ms = parse_m_range(cfg.get("m_range"), "m_range", opts.m_max)
    rep = vo.rr_slope_experiment(phi_D, phi_A, ms, workers=opts.threads)
    results = {
        "slope_estimate": fmt_rational(rep.slope_estimate),
        "target": fmt_rational(rep.target),
        "error_bound": fmt_rational(rep.error_bound),
    }
    assertions = [
        ("slope_matches_pairing", abs(rep.gap) <= rep.error_bound, f"gap = {rep.gap}")
    ]
    rows = _series_rows(rep.samples, lambda m, v: v / m)
    return results, assertions, rows


def run_fekete(cfg: Dict[str, Any], opts) -> Tuple[Dict, List, List]:
    p = cfg["_p"]
    phi = parse_metric(cfg.get("metric"), p, "metric")
    m = cfg.get("m")
    if not isinstance(m, int) or m < 1:
        raise ConfigError("m: expected a positive integer")
    pool_raw = cfg.get("pool")
    if not isinstance(pool_raw, list):
        raise ConfigError("pool: expected a list of rationals")
    pool = [parse_rational(x, "pool") for x in pool_raw]
    seed = opts.seed if opts.seed is not None else cfg.get("seed", 0)
    rep = ex.fekete_experiment(phi, m, pool, seed=seed)
    results = {
        "best_valuation": fmt_rational(rep.best_valuation),
        "best_config": [f"{x.numerator}/{x.denominator}" for x in rep.best_configs[0]],
        "n_optima": len(rep.best_configs),
        "empirical": fmt_measure(rep.empirical),
        "target": fmt_measure(rep.target),
        "tv_distance": fmt_rational(rep.tv_distance),
        "exhaustive": rep.exhaustive,
    }
    assertions = []
    expected = cfg.get("expected_valuation")
    if expected is not None:
        want = parse_rational(expected, "expected_valuation")
        assertions.append(
            ("optimal_valuation", rep.best_valuation == want, f"got {rep.best_valuation}")
        )
    tv_max = cfg.get("tv_max")
    if tv_max is not None:
        want = parse_rational(tv_max, "tv_max")
        assertions.append(("tv_distance_small", rep.tv_distance <= want, f"tv = {rep.tv_distance}"))
    return results, assertions, []


RUNNERS = {
    "orth": run_orth,
    "dirac": run_dirac,
    "diff": run_diff,
    "sandwich": run_sandwich,
    "vol-energy": run_vol_energy,
    "rr": run_rr,
    "fekete": run_fekete,
}


# ---------------------------------------------------------------------------
# Entry points


def cmd_list(_args) -> int:
    for kind in sorted(KINDS):
        print(kind)
    return EXIT_OK


def cmd_describe(args) -> int:
    kind = args.kind
    if kind not in KINDS:
        print(f"unknown experiment kind: {kind!r}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"{kind}: {KINDS[kind]}")
    return EXIT_OK


def cmd_run(args) -> int:
    path = Path(args.config)
    try:
        raw = path.read_text()
        cfg = json.loads(raw)
    except (OSError, json.JSONDecodeError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE

    try:
        if not isinstance(cfg, dict):
            raise ConfigError("top-level config must be an object")
        kind = cfg.get("kind")
        if kind not in RUNNERS:
            raise ConfigError(f"unknown experiment kind: {kind!r}")
        fld = cfg.get("field")
        if not isinstance(fld, dict) or "p" not in fld:
            raise ConfigError("field: expected an object with a prime 'p'")
        p = fld["p"]
        if not isinstance(p, int) or not is_prime(p):
            raise ConfigError(f"field.p: {p!r} is not prime")
        cfg["_p"] = p
        results, assertions, rows = RUNNERS[kind](cfg, args)
    except ConfigError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    out_dir = Path(
        args.out_dir or cfg.get("out_dir") or os.environ.get(OUT_DIR_ENV) or "."
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = cfg.get("name") or path.stem
    config_hash = hashlib.sha256(
        json.dumps({k: v for k, v in cfg.items() if not k.startswith("_")}, sort_keys=True).encode()
    ).hexdigest()

    report = {
        "config_hash": config_hash,
        "tool_version": __version__,
        "kind": kind,
        "results": results,
        "assertions": [
            {"name": name, "passed": ok, "detail": detail} for name, ok, detail in assertions
        ],
    }
    report_path = out_dir / f"{stem}.report.json"
    tmp = report_path.with_suffix(".tmp")
    tmp.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    tmp.replace(report_path)

    if rows:
        csv_path = out_dir / f"{stem}.series.csv"
        tmp = csv_path.with_suffix(".tmp")
        with open(tmp, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["m", "t", "value_num", "value_den", "normalized"])
            writer.writeheader()
            writer.writerows(rows)
        Path(tmp).replace(csv_path)

    failed = [a for a in report["assertions"] if not a["passed"]]
    for a in report["assertions"]:
        status = "PASS" if a["passed"] else "FAIL"
        print(f"[{status}] {a['name']}: {a['detail']}")
    print(f"report: {report_path}")
    return EXIT_ASSERTION if failed else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="berkvol", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="enumerate experiment kinds").set_defaults(func=cmd_list)

    p_desc = sub.add_parser("describe", help="describe what an experiment kind tests")
    p_desc.add_argument("kind")
    p_desc.set_defaults(func=cmd_describe)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--out-dir", default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--m-max", type=int, default=None, dest="m_max")
    p_run.set_defaults(func=cmd_run)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
