"""Command-line front end for the verification laboratory.

Commands
--------
simulate       integrate the nonlinear diffusion flow and report invariants
verify-cd      empirical curvature-dimension verification per vertex
check          inequality checkers along trajectories (ab, diff-harnack, harnack)
reproduce      rerun a named benchmark experiment and compare to its target
gen-graph      write a generated graph to an edge-list file

Outputs are data first: CSV for series, JSON for reports, and small SVG
polyline plots.  Every command is deterministic given --seed.  Exit codes:
0 pass, 1 violation, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .cd import (
    SearchConfig,
    chain_counterexample,
    chain_limit_curvature,
    empirical_optimal_d,
    lattice_cd_check,
    verify_cd_at,
)
from .errors import LambdaOneError, PMELabError, StiffnessError, ValidationError
from .estimates import (
    ab_check,
    diff_harnack_residual,
    harnack_check,
    integral_min_inequality_check,
    minorant_ratio,
    quadratic_minorant_check,
)
from .graphs import (
    GENERATOR_HELP,
    Graph,
    complete_graph,
    resolve_graph,
    save_edge_list,
    square_graph,
)
from .operators import laplacian_field, pressure
from .solver import (
    Measure,
    SolverConfig,
    counting_measure,
    entropy_dissipation_residual,
    exact_two_point,
    integrate,
    load_initial_condition,
    pressure_equation_residual,
    renyi_entropy,
    write_trajectory_csv,
)

DEFAULT_OUT = "pmelab-out"

REPRODUCE_IDS = (
    "ex3.3",
    "ex3.4",
    "ex3.5:D",
    "sq3.3",
    "ex4.1",
    "ex4.2",
    "ex4.3",
    "ex4.5:m",
    "thm4.6:m",
    "ex5.3i",
    "ex5.3ii",
    "ex6.6i",
    "ex6.6ii:D",
    "lemma6.1:m",
    "lemma6.3",
)


# ---------------------------------------------------------------------------
# small serialization helpers


def _jsonable(obj):
    """Convert numpy scalars/arrays and containers into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float):
        if np.isnan(obj):
            return "nan"
        if np.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    return obj


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_series_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join("%.17g" % float(col[i]) for col in columns) + "\n")


def write_svg_polyline(
    path: str,
    series: list[tuple[np.ndarray, np.ndarray, str]],
    title: str,
    xlabel: str = "t",
) -> None:
    """Minimal SVG polyline plot: axes, four ticks per axis, one line per series."""
    width, height = 720.0, 440.0
    left, right, top, bottom = 70.0, 20.0, 40.0, 50.0
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

    finite = []
    for xs, ys, label in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if np.count_nonzero(keep) >= 2:
            finite.append((xs[keep], ys[keep], label))
    if not finite:
        return

    x_lo = min(float(xs.min()) for xs, _, _ in finite)
    x_hi = max(float(xs.max()) for xs, _, _ in finite)
    y_lo = min(float(ys.min()) for _, ys, _ in finite)
    y_hi = max(float(ys.max()) for _, ys, _ in finite)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        pad = max(1e-12, abs(y_lo)) * 0.5 + 1e-12
        y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right)

    def sy(y):
        return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom)

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        'viewBox="0 0 %g %g" font-family="monospace" font-size="12">' % (width, height),
        '<rect width="%g" height="%g" fill="white"/>' % (width, height),
        '<text x="%g" y="20" text-anchor="middle">%s</text>' % (width / 2, title),
        '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
        % (left, height - bottom, width - right, height - bottom),
        '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
        % (left, top, left, height - bottom),
    ]
    for i in range(4):
        xv = x_lo + (x_hi - x_lo) * i / 3.0
        yv = y_lo + (y_hi - y_lo) * i / 3.0
        parts.append(
            '<text x="%.2f" y="%g" text-anchor="middle">%.4g</text>'
            % (sx(xv), height - bottom + 18.0, xv)
        )
        parts.append(
            '<text x="%g" y="%.2f" text-anchor="end">%.4g</text>'
            % (left - 6.0, sy(yv) + 4.0, yv)
        )
    parts.append(
        '<text x="%g" y="%g" text-anchor="middle">%s</text>'
        % ((left + width - right) / 2.0, height - 12.0, xlabel)
    )
    for idx, (xs, ys, label) in enumerate(finite):
        color = colors[idx % len(colors)]
        points = " ".join("%.2f,%.2f" % (sx(x), sy(y)) for x, y in zip(xs, ys))
        parts.append(
            '<polyline fill="none" stroke="%s" stroke-width="1.5" points="%s"/>'
            % (color, points)
        )
        parts.append(
            '<text x="%g" y="%g" fill="%s">%s</text>'
            % (width - right - 150.0, top + 16.0 * (idx + 1), color, label)
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# config resolution


def resolve_outdir(args) -> str:
    out = args.out or os.environ.get("PME_LAB_OUT") or DEFAULT_OUT
    os.makedirs(out, exist_ok=True)
    return out


def resolve_jobs(args) -> int:
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    if jobs < 1:
        raise ValidationError("--jobs must be at least 1")
    return jobs


def resolve_initial_state(spec: str, g: Graph, seed: int) -> np.ndarray:
    """Parse an initial-state spec: file:PATH, const:v[,v2,...], random:lo,hi."""
    kind, _, rest = spec.partition(":")
    if kind == "file":
        if not rest:
            raise ValidationError("file: initial state needs a path")
        return load_initial_condition(rest, g)
    if kind == "const":
        try:
            values = [float(s) for s in rest.split(",")] if rest else [1.0]
        except ValueError as exc:
            raise ValidationError("bad const: initial state %r" % spec) from exc
        if len(values) == 1:
            u0 = np.full(g.n, values[0])
        elif len(values) == g.n:
            u0 = np.array(values, dtype=float)
        else:
            raise ValidationError(
                "const: initial state has %d values for %d vertices"
                % (len(values), g.n)
            )
    elif kind == "random":
        try:
            lo, hi = (float(s) for s in rest.split(",")) if rest else (0.5, 1.5)
        except ValueError as exc:
            raise ValidationError("bad random: initial state %r" % spec) from exc
        if not (0.0 < lo <= hi):
            raise ValidationError("random: bounds need 0 < lo <= hi")
        u0 = np.random.default_rng([seed, 1]).uniform(lo, hi, g.n)
    else:
        raise ValidationError(
            "unknown initial state kind %r (use file:, const:, random:)" % spec
        )
    if not np.all(np.isfinite(u0)) or np.any(u0 <= 0.0):
        raise ValidationError("initial state must be strictly positive and finite")
    return u0


def resolve_times(args, need_positive_start: bool = True) -> np.ndarray:
    if args.points < 2:
        raise ValidationError("--points must be at least 2")
    if need_positive_start and args.t_start <= 0.0:
        raise ValidationError("--t-start must be positive for this command")
    if args.t_start < 0.0:
        raise ValidationError("--t-start must be nonnegative")
    if args.t_end <= args.t_start:
        raise ValidationError("--t-end must exceed --t-start")
    return np.linspace(args.t_start, args.t_end, args.points)


def config_echo(args, **extra) -> dict:
    keep = (
        "graph",
        "m",
        "alpha",
        "d",
        "mu",
        "lam",
        "u0",
        "t_start",
        "t_end",
        "points",
        "seed",
        "jobs",
        "tol",
        "samples",
        "pairs",
        "vertex",
    )
    cfg = {}
    for name in keep:
        if hasattr(args, name):
            value = getattr(args, name)
            if value is not None:
                cfg["lambda" if name == "lam" else name] = value
    cfg.update(extra)
    return cfg


def sample_check_tuples(
    g: Graph, rng: np.random.Generator, count: int, t_lo: float, t_hi: float
) -> list[tuple[float, float, str, str]]:
    """Draw (t1, t2, x1, x2) tuples with 0 < t1 < t2 inside the time window."""
    names = [str(v) for v in g.vertices]
    gap = 0.01 * (t_hi - t_lo)
    tuples = []
    while len(tuples) < count:
        a, b = np.sort(rng.uniform(t_lo, t_hi, 2))
        if b - a < gap:
            continue
        x1 = names[int(rng.integers(len(names)))]
        x2 = names[int(rng.integers(len(names)))]
        tuples.append((float(a), float(b), x1, x2))
    return tuples


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    outdir = resolve_outdir(args)
    jobs = resolve_jobs(args)
    g = resolve_graph(args.graph)
    u0 = resolve_initial_state(args.u0, g, args.seed)
    times = resolve_times(args, need_positive_start=False)
    cfg = SolverConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    summary_path = os.path.join(outdir, "summary.json")
    summary = {"command": "simulate", "config": config_echo(args, jobs=jobs)}

    try:
        traj = integrate(g, args.m, u0, times, config=cfg)
    except StiffnessError as exc:
        summary["status"] = "numerical-failure"
        summary["failure_time"] = exc.t
        summary["error"] = str(exc)
        write_json(summary_path, summary)
        print("simulate: numerical failure, %s" % exc)
        print("wrote %s" % summary_path)
        return 3

    traj_path = os.path.join(outdir, "trajectory.csv")
    write_trajectory_csv(traj, traj_path)

    mass = traj.states.sum(axis=1)
    mass_drift = float(np.max(np.abs(mass - mass[0])) / max(1.0, abs(mass[0])))
    summary["mass_drift_rel"] = mass_drift
    summary["pressure_identity_residual"] = pressure_equation_residual(traj)

    columns = [traj.times, mass]
    header = ["t", "mass"]
    if g.symmetric:
        measure = counting_measure(g)
        entropy = np.array(
            [renyi_entropy(g, args.m, traj.states[i], measure) for i in range(len(traj.times))]
        )
        diffs = np.diff(entropy)
        summary["entropy_monotone"] = bool(
            np.all(diffs <= 1e-12 * max(1.0, float(np.abs(entropy).max())))
        )
        if len(traj.times) >= 3:
            summary["entropy_dissipation_residual"] = entropy_dissipation_residual(
                traj, measure
            )
        columns.append(entropy)
        header.append("entropy")
        write_svg_polyline(
            os.path.join(outdir, "simulate.svg"),
            [(traj.times, entropy, "entropy"), (traj.times, mass, "mass")],
            "diffusion flow invariants",
        )
    else:
        summary["entropy_monotone"] = None
        write_svg_polyline(
            os.path.join(outdir, "simulate.svg"),
            [(traj.times, mass, "mass")],
            "diffusion flow invariants",
        )

    write_series_csv(os.path.join(outdir, "series.csv"), header, columns)
    summary["status"] = "ok"
    write_json(summary_path, summary)
    print(
        "simulate: %d points on %s, mass drift %.3g, pressure identity residual %.3g"
        % (len(traj.times), args.graph, mass_drift, summary["pressure_identity_residual"])
    )
    print("wrote %s" % traj_path)
    print("wrote %s" % summary_path)
    return 0


def cmd_verify_cd(args) -> int:
    outdir = resolve_outdir(args)
    jobs = resolve_jobs(args)
    g = resolve_graph(args.graph)
    vertices = args.vertex or [str(v) for v in g.vertices]
    for v in vertices:
        g.index(v)

    search = SearchConfig(
        samples=args.samples,
        seed=args.seed,
        tol=args.tol if args.tol is not None else 1e-6,
    )
    reports = []
    violated = 0
    for v in vertices:
        if args.d is not None:
            report = verify_cd_at(g, args.m, args.alpha, args.d, v, search)
            reports.append(report.to_json_dict())
            if report.verdict == "violated":
                violated += 1
            print(
                "verify-cd %s at %s: %s (empirical optimal d %s)"
                % (args.graph, v, report.verdict, report.empirical_optimal_d)
            )
        else:
            best = empirical_optimal_d(g, args.m, args.alpha, v, search)
            reports.append(
                {
                    "vertex": v,
                    "m": args.m,
                    "alpha": args.alpha,
                    "empirical_optimal_d": best,
                    "samples_used": search.samples,
                    "seed": search.seed,
                }
            )
            print("verify-cd %s at %s: empirical optimal d %s" % (args.graph, v, best))

    out_path = os.path.join(outdir, "cd_report.json")
    write_json(
        out_path,
        {"command": "verify-cd", "config": config_echo(args, jobs=jobs), "reports": reports},
    )
    print("wrote %s" % out_path)
    return 1 if violated else 0


def cmd_check(args) -> int:
    outdir = resolve_outdir(args)
    jobs = resolve_jobs(args)
    g = resolve_graph(args.graph)
    u0 = resolve_initial_state(args.u0, g, args.seed)
    times = resolve_times(args, need_positive_start=True)
    tol = args.tol if args.tol is not None else 1e-8
    traj = integrate(g, args.m, u0, times)

    if args.which == "ab":
        if args.d is None:
            raise ValidationError("check ab needs --d")
        report = ab_check(traj, args.alpha, args.d, tol=tol)
    elif args.which == "diff-harnack":
        if args.mu is None:
            raise ValidationError("check diff-harnack needs --mu")
        report = diff_harnack_residual(traj, args.lam, args.mu, tol=tol)
    else:
        if args.mu is None:
            raise ValidationError("check harnack needs --mu")
        rng = np.random.default_rng([args.seed, 2])
        pairs = sample_check_tuples(
            g, rng, args.pairs, float(times[0]), float(times[-1])
        )
        report = harnack_check(traj, args.mu, args.lam, pairs, tol=tol)

    tag = args.which.replace("-", "_")
    report_path = os.path.join(outdir, "report_%s.json" % tag)
    payload = report.to_json_dict()
    payload["config"] = config_echo(args, jobs=jobs)
    write_json(report_path, payload)
    csv_path = os.path.join(outdir, "slack_%s.csv" % tag)
    report.write_slack_csv(csv_path)

    if args.which in ("ab", "diff-harnack"):
        records = np.array([[r[0], r[2]] for r in report.records], dtype=float)
        order = np.argsort(records[:, 0])
        write_svg_polyline(
            os.path.join(outdir, "slack_%s.svg" % tag),
            [(records[order, 0], records[order, 1], "min slack over vertices")],
            "%s slack along the trajectory" % args.which,
        )

    status = "pass" if report.passed else "FAIL"
    print(
        "check %s on %s: min slack %.6g at %s -> %s"
        % (args.which, args.graph, report.min_slack, report.argmin, status)
    )
    print("wrote %s" % report_path)
    print("wrote %s" % csv_path)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# reproduce runners


def _optimal_d_target(m: float, d_count: int) -> float:
    if m == 2.0:
        return 2.0 * (d_count - 1) / d_count
    if m > 2.0:
        return m / (m - 1.0) ** 2
    raise ValidationError("closed-form optimal d needs m = 2 or m > 2")


def _run_complete_optimal(d_count: int, m: float, seed: int) -> tuple[bool, dict]:
    g = complete_graph(d_count)
    search = SearchConfig(seed=seed)
    measured = empirical_optimal_d(g, m, 0.0, "x1", search)
    expected = _optimal_d_target(m, d_count)
    passed = abs(measured - expected) <= 1e-3
    return passed, {
        "measured": measured,
        "expected": expected,
        "tolerance": 1e-3,
        "graph": "complete:%d" % d_count,
        "m": m,
    }


def _run_square(seed: int) -> tuple[bool, dict]:
    g = square_graph()
    search = SearchConfig(seed=seed)
    verdicts = {}
    all_hold = True
    for v in ("x", "y1", "y2", "z"):
        report = verify_cd_at(g, 2.0, 0.0, 4.0 / 3.0, v, search)
        verdicts[v] = report.verdict
        all_hold = all_hold and report.verdict == "holds_empirically"
    tight = verify_cd_at(g, 2.0, 0.0, 1.32, "x", search)
    optimal = max(
        empirical_optimal_d(g, 2.0, 0.0, v, search) for v in ("x", "y1", "y2", "z")
    )
    passed = (
        all_hold
        and tight.verdict == "violated"
        and abs(optimal - 4.0 / 3.0) <= 1e-3
    )
    return passed, {
        "verdicts_at_4_3": verdicts,
        "verdict_at_1.32": tight.verdict,
        "witness_at_1.32": tight.to_json_dict()["witness"],
        "measured_optimal_d": optimal,
        "expected_optimal_d": 4.0 / 3.0,
        "tolerance": 1e-3,
    }


def _run_chain(n: int, m: float, eps: float, expected, window: float) -> tuple[bool, dict]:
    witness = chain_counterexample(n, m, eps)
    measured = witness.curvature
    passed = abs(measured - expected) <= window
    return passed, {
        "measured": measured,
        "expected": expected,
        "tolerance": window,
        "neg_lap_pressure": witness.neg_lap_pressure,
        "field": {str(v): float(x) for v, x in zip(witness.graph.vertices, witness.u)},
    }


def _run_chain_limit(m: float, seed: int) -> tuple[bool, dict]:
    if m <= 2.0:
        raise ValidationError("the chain limit comparison needs m > 2")
    q = m / (m - 1.0)
    scale = (m - 1.0) ** 2 / m
    limit_expression = scale * (
        2.0 ** ((m - 2.0) / (m - 1.0)) * (3.0**q + 1.0 - 2.0 * 2.0**q)
        - 2.0 * (2.0**q - 2.0)
    )
    closed_form = chain_limit_curvature(m)
    at_eps = chain_counterexample(5, m, 1e-3).curvature
    gap = abs(limit_expression - closed_form)
    passed = gap <= 1e-6 and closed_form < 0.0 and at_eps < 0.0
    return passed, {
        "measured": limit_expression,
        "expected": closed_form,
        "tolerance": 1e-6,
        "value_at_eps_1e-3": at_eps,
        "m": m,
    }


def _run_lattice(m: float, seed: int) -> tuple[bool, dict]:
    measured = lattice_cd_check(m, 10000, seed)
    passed = measured >= -1e-9
    return passed, {"measured": measured, "expected": ">= -1e-9", "m": m, "samples": 10000}


def _run_ab_square(seed: int) -> tuple[bool, dict]:
    g = square_graph()
    u0 = np.random.default_rng([seed, 1]).uniform(0.5, 1.5, g.n)
    traj = integrate(g, 2.0, u0, np.linspace(0.05, 5.0, 201))
    report = ab_check(traj, 0.0, 4.0 / 3.0, tol=1e-8)
    return report.passed, {
        "measured": report.min_slack,
        "expected": ">= -1e-8",
        "argmin": list(report.argmin),
    }


def _run_ab_sharpness(seed: int) -> tuple[bool, dict]:
    g = complete_graph(2)
    a1, a2 = 1.0, 1e-6
    times = np.linspace(0.0, 5.0, 201)
    traj = integrate(g, 2.0, np.array([a1, a2]), times)
    exact = exact_two_point(a1, a2, times)
    solver_error = float(np.max(np.abs(traj.states - exact)))

    ts = np.linspace(1e-4, 5.0, 4000)
    states = np.array([traj.state_at(t) for t in ts])
    neg_lap_v = np.array(
        [-laplacian_field(traj.graph, pressure(2.0, states[i]))[0] for i in range(len(ts))]
    )
    sup_value = float(np.max(ts * neg_lap_v))
    ratio = sup_value * np.e
    passed = solver_error <= 1e-8 and 0.99 <= ratio <= 1.0
    return passed, {
        "measured": ratio,
        "expected": "[0.99, 1.0]",
        "sup_t_times_neg_lap_pressure": sup_value,
        "solver_max_abs_error": solver_error,
        "solver_error_bound": 1e-8,
    }


def _run_harnack(graph_spec: str, m: float, mu: float, seed: int) -> tuple[bool, dict]:
    g = resolve_graph(graph_spec)
    u0 = np.random.default_rng([seed, 1]).uniform(0.5, 1.5, g.n)
    times = np.linspace(0.1, 5.0, 201)
    traj = integrate(g, m, u0, times)
    rng = np.random.default_rng([seed, 2])
    pairs = sample_check_tuples(g, rng, 100, float(times[0]), float(times[-1]))
    report = harnack_check(traj, mu, 0.0, pairs, tol=1e-8)
    return report.passed, {
        "measured": report.min_slack,
        "expected": ">= -1e-8",
        "graph": graph_spec,
        "m": m,
        "mu": mu,
        "pairs": len(pairs),
    }


def _run_minorant(m: float) -> tuple[bool, dict]:
    if m < 2.0:
        grids = [np.linspace(1.0, 10.0, 1000)]
    elif m > 2.0:
        grids = [np.linspace(1e-4, 1.0, 1000)]
    else:
        grids = [np.linspace(1.0, 10.0, 1000), np.linspace(1e-4, 1.0, 1000)]
    min_slack = min(quadratic_minorant_check(m, grid) for grid in grids)
    ratios = [minorant_ratio(m, 1.0 - 1e-4), minorant_ratio(m, 1.0 + 1e-4)]
    ratio_ok = all(abs(r - 0.5) <= 1e-3 for r in ratios)
    passed = min_slack >= -1e-12 and ratio_ok
    return passed, {
        "measured": min_slack,
        "expected": ">= -1e-12",
        "ratio_probes": ratios,
        "m": m,
    }


def _run_integral_min(seed: int) -> tuple[bool, dict]:
    rng = np.random.default_rng([seed, 3])
    t1, t2 = 0.5, 3.0
    ts = np.linspace(t1, t2, 2000)
    failures = 0
    total = 0
    for nu, c in ((0.5, 1.0), (1.0, 2.0), (4.0 / 3.0, 3.0)):
        for _ in range(100):
            coeffs = rng.uniform(-5.0, 5.0, 4)
            psi = np.polynomial.polynomial.polyval(ts, coeffs)
            total += 1
            if not integral_min_inequality_check(t1, t2, c, nu, ts, psi):
                failures += 1
    return failures == 0, {
        "measured_failures": failures,
        "expected_failures": 0,
        "cases": total,
    }


def run_reproduce(token: str, args) -> tuple[bool, dict]:
    base, _, suffix = token.partition(":")
    seed = args.seed

    def suffix_int(name):
        try:
            return int(suffix)
        except ValueError as exc:
            raise ValidationError("id %s needs an integer suffix, e.g. %s:3" % (base, base)) from exc

    def suffix_float(name):
        try:
            return float(suffix)
        except ValueError as exc:
            raise ValidationError("id %s needs a numeric suffix, e.g. %s:2" % (base, base)) from exc

    if base == "ex3.3" and not suffix:
        return _run_complete_optimal(2, 2.0, seed)
    if base == "ex3.4" and not suffix:
        return _run_complete_optimal(3, 2.0, seed)
    if base == "ex3.5" and suffix:
        return _run_complete_optimal(suffix_int("D"), args.m, seed)
    if base == "sq3.3" and not suffix:
        return _run_square(seed)
    if base == "ex4.1" and not suffix:
        return _run_chain(3, 2.0, 1e-6, -1.5, 0.0)
    if base == "ex4.2" and not suffix:
        return _run_chain(4, 2.0, 1e-6, -1.5, 0.0)
    if base == "ex4.3" and not suffix:
        return _run_chain(5, 2.0, 1e-3, -1.0, 0.05)
    if base == "ex4.5" and suffix:
        return _run_chain_limit(suffix_float("m"), seed)
    if base == "thm4.6" and suffix:
        return _run_lattice(suffix_float("m"), seed)
    if base == "ex5.3i" and not suffix:
        return _run_ab_square(seed)
    if base == "ex5.3ii" and not suffix:
        return _run_ab_sharpness(seed)
    if base == "ex6.6i" and not suffix:
        return _run_harnack("square", 2.0, 4.0 / 3.0, seed)
    if base == "ex6.6ii" and suffix:
        d_count = suffix_int("D")
        m = args.m
        mu = (m - 1.0) * _optimal_d_target(m, d_count)
        return _run_harnack("complete:%d" % d_count, m, mu, seed)
    if base == "lemma6.1" and suffix:
        return _run_minorant(suffix_float("m"))
    if base == "lemma6.3" and not suffix:
        return _run_integral_min(seed)
    raise ValidationError(
        "unknown reproduce id %r; valid ids: %s" % (token, ", ".join(REPRODUCE_IDS))
    )


def cmd_reproduce(args) -> int:
    outdir = resolve_outdir(args)
    passed, payload = run_reproduce(args.id, args)
    result = {
        "command": "reproduce",
        "id": args.id,
        "passed": passed,
        "seed": args.seed,
        "config": config_echo(args),
    }
    result.update(payload)
    out_path = os.path.join(outdir, "reproduce_%s.json" % args.id.replace(":", "_"))
    write_json(out_path, result)
    print("reproduce %s: %s" % (args.id, "PASS" if passed else "FAIL"))
    print("wrote %s" % out_path)
    return 0 if passed else 1


def cmd_gen_graph(args) -> int:
    outdir = resolve_outdir(args)
    g = resolve_graph(args.graph)
    name = "graph_%s.txt" % args.graph.replace(":", "_").replace("/", "_")
    out_path = os.path.join(outdir, name)
    save_edge_list(g, out_path)
    print(
        "gen-graph %s: %d vertices, %d directed edges"
        % (args.graph, g.n, g.kernel_matrix().nnz)
    )
    print("wrote %s" % out_path)
    return 0


# ---------------------------------------------------------------------------
# parser


def add_shared_arguments(p: argparse.ArgumentParser, with_times: bool = True) -> None:
    p.add_argument("--graph", default="complete:2", help="graph spec: " + GENERATOR_HELP)
    p.add_argument("--m", type=float, default=2.0, help="diffusion exponent, m > 1")
    p.add_argument("--alpha", type=float, default=0.0, help="mixing weight in [0, 1]")
    p.add_argument("--d", type=float, default=None, help="dimension constant d > 0")
    p.add_argument("--mu", type=float, default=None, help="time exponent for Harnack checks")
    p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=0.0,
        help="Harnack parameter in [0, 1)",
    )
    p.add_argument(
        "--u0",
        default="const:1",
        help="initial state: file:PATH, const:v or const:v1,...,vn, random:lo,hi",
    )
    if with_times:
        p.add_argument("--t-start", type=float, default=0.1)
        p.add_argument("--t-end", type=float, default=5.0)
        p.add_argument("--points", type=int, default=201)
    p.add_argument("--seed", type=int, default=0, help="seed for all randomized choices")
    p.add_argument("--jobs", type=int, default=None, help="worker budget hint")
    p.add_argument("--out", default=None, help="output directory (default $PME_LAB_OUT)")
    p.add_argument("--tol", type=float, default=None, help="reporting tolerance override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmelab",
        description="verification laboratory for nonlinear diffusion on finite graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the flow and report invariants")
    add_shared_arguments(p)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-cd", help="curvature-dimension verification per vertex")
    add_shared_arguments(p, with_times=False)
    p.add_argument(
        "--vertex",
        action="append",
        default=None,
        help="vertex to verify (repeatable; default all)",
    )
    p.add_argument("--samples", type=int, default=20000, help="search sample budget")
    p.set_defaults(func=cmd_verify_cd)

    p = sub.add_parser("check", help="inequality checkers along a trajectory")
    p.add_argument("which", choices=("ab", "diff-harnack", "harnack"))
    add_shared_arguments(p)
    p.add_argument("--pairs", type=int, default=100, help="harnack: sampled tuples")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reproduce", help="rerun a named benchmark experiment")
    p.add_argument("id", help="one of: " + ", ".join(REPRODUCE_IDS))
    add_shared_arguments(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("gen-graph", help="write a generated graph as an edge list")
    add_shared_arguments(p, with_times=False)
    p.set_defaults(func=cmd_gen_graph)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LambdaOneError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except StiffnessError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except PMELabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
