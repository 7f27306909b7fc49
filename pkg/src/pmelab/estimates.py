"""Inequality checkers along solutions of the graph porous medium equation.

All time derivatives are evaluated by exact substitution of the flow,
``dv/dt = m u^(m-2) L(u^m)``, never by finite differencing, so every slack
reported here is a sharp floating-point quantity and the default tolerance
is a pure round-off budget (``1e-8``).

Checked statements, for a trajectory with pressure ``v``:

* the time-scaled upper bound ``-(Lv + alpha * correction) <= d/t`` and its
  equivalent form through the pressure equation (``ab_check``);
* the differential Harnack hypothesis
  ``dv/dt >= (1-lambda) gradient_energy(v) - (mu/t) v``
  (``diff_harnack_residual``);
* the integrated Harnack bounds comparing ``t^mu v`` at two space-time
  points through a path correction or a distance correction
  (``harnack_check`` with :func:`harnack_rhs_path` and
  :func:`harnack_rhs_distance`);
* the pointwise quadratic minorant of the exponent-weighted remainder and
  the integral minimum inequality that drive the Harnack proof
  (``quadratic_minorant_check``, ``integral_min_inequality_check``).

The binding regime of the time-scaled bounds is small ``t``, so checkers
refine the first reported intervals through the trajectory's dense output
in addition to the reported grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError, LambdaOneError, ValidationError
from .graphs import Graph, graph_distance, k_min
from .operators import (
    check_exponent,
    check_mixing,
    gradient_energy_field,
    laplacian_field,
    mixed_laplacian_field,
    pressure,
)
from .solver import Trajectory

__all__ = [
    "EstimateReport",
    "ab_check",
    "diff_harnack_residual",
    "harnack_rhs_path",
    "harnack_rhs_distance",
    "harnack_check",
    "quadratic_minorant_check",
    "minorant_ratio",
    "integral_min_inequality_check",
    "lemma61_check",
    "lemma63_check",
]


@dataclass
class EstimateReport:
    """Minimum slack of one inequality over all checked points."""

    kind: str
    parameters: dict
    min_slack: float
    argmin: dict
    points_checked: int
    tolerance: float
    records: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tolerance

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": dict(self.parameters),
            "min_slack": self.min_slack,
            "argmin": dict(self.argmin),
            "points_checked": self.points_checked,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }

    def write_slack_csv(self, path) -> None:
        """Per-point slack rows, ``t,x,slack`` or ``t1,t2,x1,x2,slack``."""
        with open(path, "w", encoding="utf-8") as fh:
            if self.kind in ("harnack_path", "harnack_distance"):
                fh.write("t1,t2,x1,x2,slack\n")
                for t1, t2, x1, x2, slack in self.records:
                    fh.write(f"{t1:.17g},{t2:.17g},{x1},{x2},{slack:.17g}\n")
            else:
                fh.write("t,x,slack\n")
                for t, x, slack in self.records:
                    fh.write(f"{t:.17g},{x},{slack:.17g}\n")


def _eval_points(traj: Trajectory) -> list[tuple[float, np.ndarray]]:
    """Reported states plus 10x dense refinement of the earliest intervals."""
    points = [(float(t), traj.states[i]) for i, t in enumerate(traj.times)]
    if traj.dense is not None and len(traj.times) > 1:
        extra = []
        for a, b in zip(traj.times[:10], traj.times[1:11]):
            extra.extend(np.linspace(a, b, 11)[1:-1])
        if extra:
            states = traj.dense(np.asarray(extra))
            points.extend((float(t), s) for t, s in zip(extra, states))
        points.sort(key=lambda p: p[0])
    return points


def _require_positive_times(traj: Trajectory) -> None:
    if traj.times[0] <= 0.0:
        raise ValidationError("trajectory must start at t > 0 for time-scaled bounds")


def ab_check(traj: Trajectory, alpha: float, d: float, tol: float = 1e-8) -> EstimateReport:
    """Check the time-scaled upper bound on the mixed pressure Laplacian.

    Verifies ``d/t + G(t, x) >= 0`` at every checked point, together with
    the equivalent formulation obtained by substituting the pressure
    equation,
    ``d/t - ((1-alpha) gradient_energy(v) - dv/dt) / ((m-1) v) >= 0``,
    with the exact time derivative.  The minimum slack across both forms is
    reported; on a graph satisfying ``CD(0, d)`` with mixing ``alpha`` it
    stays nonnegative up to round-off.
    """
    alpha = check_mixing(alpha)
    if not d > 0.0:
        raise ValidationError("d must be positive")
    _require_positive_times(traj)
    g, m = traj.graph, traj.m
    best = math.inf
    argmin: dict = {}
    records = []
    points = _eval_points(traj)
    for t, u in points:
        v = pressure(m, u)
        gq = mixed_laplacian_field(g, m, alpha, u)
        slack_direct = d / t + gq
        dtv = m * u ** (m - 2.0) * laplacian_field(g, u**m)
        psi = gradient_energy_field(g, m, v)
        slack_pressure = d / t - ((1.0 - alpha) * psi - dtv) / ((m - 1.0) * v)
        both = np.minimum(slack_direct, slack_pressure)
        i = int(np.argmin(both))
        records.append((t, g.vertices[i], float(both[i])))
        if both[i] < best:
            best = float(both[i])
            form = "direct" if slack_direct[i] <= slack_pressure[i] else "pressure_equation"
            argmin = {"t": t, "vertex": g.vertices[i], "form": form}
    return EstimateReport(
        "ab",
        {"m": m, "alpha": alpha, "d": d},
        best,
        argmin,
        len(points) * g.n,
        tol,
        records,
    )


def diff_harnack_residual(traj: Trajectory, lam: float, mu: float, tol: float = 1e-8) -> EstimateReport:
    """Check ``dv/dt >= (1-lambda) gradient_energy(v) - (mu/t) v``.

    On a graph satisfying ``CD(0, d)`` with mixing ``alpha``, trajectories
    pass with ``mu = (m-1) d`` and ``lambda = alpha``; this hypothesis is
    what the integrated Harnack bounds are built from.
    """
    if lam == 1.0:
        raise LambdaOneError("lambda = 1 is outside the Harnack regime")
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    if not mu > 0.0:
        raise DomainError("mu must be positive")
    _require_positive_times(traj)
    g, m = traj.graph, traj.m
    best = math.inf
    argmin: dict = {}
    records = []
    points = _eval_points(traj)
    for t, u in points:
        v = pressure(m, u)
        dtv = m * u ** (m - 2.0) * laplacian_field(g, u**m)
        slack = dtv - (1.0 - lam) * gradient_energy_field(g, m, v) + mu / t * v
        i = int(np.argmin(slack))
        records.append((t, g.vertices[i], float(slack[i])))
        if slack[i] < best:
            best = float(slack[i])
            argmin = {"t": t, "vertex": g.vertices[i]}
    return EstimateReport(
        "diff_harnack",
        {"m": m, "lambda": lam, "mu": mu},
        best,
        argmin,
        len(points) * g.n,
        tol,
        records,
    )


def _check_harnack_params(mu: float, lam: float, t1: float, t2: float) -> None:
    if lam == 1.0:
        raise LambdaOneError("lambda = 1 is outside the Harnack regime")
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    if not mu > 0.0:
        raise DomainError("mu must be positive")
    if not (0.0 < t1 < t2):
        raise ValidationError("need 0 < t1 < t2")


def harnack_rhs_path(g: Graph, m: float, mu: float, lam: float, t1: float, t2: float, path: Sequence[str]) -> float:
    """Additive Harnack correction along an explicit path.

    With ``N`` edges and intermediate times ``tau_i = t1 + i (t2-t1)/N``:

    ``2 N^2 / ((1-lambda)(mu+1)(t2-t1)^2)
    * sum_j (tau_j^(mu+1) - tau_{j-1}^(mu+1)) / k(y_{j-1}, y_j)``

    The exponent ``m`` is part of the statement's context (it fixes how
    ``mu`` was chosen) but the correction itself does not depend on it.
    """
    check_exponent(m)
    _check_harnack_params(mu, lam, t1, t2)
    if len(path) < 2:
        raise ValidationError("a path needs at least one edge")
    n_edges = len(path) - 1
    tau = t1 + np.arange(n_edges + 1) * (t2 - t1) / n_edges
    powers = tau ** (mu + 1.0)
    total = 0.0
    for j in range(1, n_edges + 1):
        w = g.kernel(path[j - 1], path[j])
        if w <= 0.0:
            raise ValidationError(f"path step {path[j - 1]!r} -> {path[j]!r} is not an edge")
        total += (powers[j] - powers[j - 1]) / w
    return 2.0 * n_edges**2 / ((1.0 - lam) * (mu + 1.0) * (t2 - t1) ** 2) * total


def harnack_rhs_distance(g: Graph, mu: float, lam: float, t1: float, t2: float, x1: str, x2: str) -> float:
    """Distance-form Harnack correction.

    ``2 d(x1,x2)^2 (t2^(mu+1) - t1^(mu+1))
    / ((1-lambda)(mu+1) k_min (t2-t1)^2)``,
    which is 0 when ``x1 = x2``; the two-point comparison remains valid in
    that case.
    """
    _check_harnack_params(mu, lam, t1, t2)
    dist = graph_distance(g, x1, x2)
    if dist == 0:
        return 0.0
    span = t2 ** (mu + 1.0) - t1 ** (mu + 1.0)
    return 2.0 * dist**2 * span / ((1.0 - lam) * (mu + 1.0) * k_min(g) * (t2 - t1) ** 2)


def _simple_paths(g: Graph, src: str, dst: str, cap: int) -> Iterable[list[str]]:
    """All simple paths from src to dst with at most ``cap`` edges."""
    stack = [(src, [src])]
    while stack:
        v, prefix = stack.pop()
        if v == dst and len(prefix) > 1:
            yield prefix
            continue
        if len(prefix) - 1 >= cap:
            continue
        for w in g.neighbors(v):
            if w not in prefix:
                stack.append((w, prefix + [w]))


def harnack_check(
    traj: Trajectory,
    mu: float,
    lam: float,
    pairs: Sequence[tuple[float, float, str, str]],
    tol: float = 1e-8,
) -> EstimateReport:
    """Check the integrated Harnack comparison over space-time pairs.

    For each ``(t1, t2, x1, x2)`` the slack
    ``t2^mu v(t2,x2) + correction - t1^mu v(t1,x1)`` is evaluated with the
    distance-form correction and, for distinct vertices, with the sharper
    path form minimized over all simple paths of at most
    ``distance + 2`` edges.  The reported per-pair slack is the smaller of
    the two, and the report kind names the form attaining the overall
    minimum.
    """
    g, m = traj.graph, traj.m
    if not g.symmetric:
        raise ValidationError("Harnack comparison needs a symmetric kernel")
    if len(pairs) == 0:
        raise ValidationError("need at least one (t1, t2, x1, x2) pair")
    t_lo, t_hi = traj.times[0], traj.times[-1]
    best = math.inf
    best_form = "harnack_distance"
    argmin: dict = {}
    records = []
    for t1, t2, x1, x2 in pairs:
        _check_harnack_params(mu, lam, t1, t2)
        if t1 < t_lo - 1e-12 or t2 > t_hi + 1e-12:
            raise ValidationError("pair times outside the trajectory range")
        v1 = pressure(m, traj.value(t1, x1))
        v2 = pressure(m, traj.value(t2, x2))
        lhs = t1**mu * v1
        base = t2**mu * v2
        corr_d = harnack_rhs_distance(g, mu, lam, t1, t2, x1, x2)
        slack_d = base + corr_d - lhs
        slack = slack_d
        form = "harnack_distance"
        if x1 != x2:
            cap = graph_distance(g, x1, x2) + 2
            corr_p = min(
                harnack_rhs_path(g, m, mu, lam, t1, t2, p)
                for p in _simple_paths(g, x1, x2, cap)
            )
            slack_p = base + corr_p - lhs
            if slack_p < slack:
                slack = slack_p
                form = "harnack_path"
        records.append((t1, t2, x1, x2, float(slack)))
        if slack < best:
            best = float(slack)
            best_form = form
            argmin = {"t1": t1, "t2": t2, "x1": x1, "x2": x2}
    return EstimateReport(
        best_form,
        {"m": m, "lambda": lam, "mu": mu},
        best,
        argmin,
        len(pairs),
        tol,
        records,
    )


# -- supporting inequalities -----------------------------------------------


def _power_remainder(m: float, x: np.ndarray) -> np.ndarray:
    # exp_remainder_m(m, log x) in the algebraically equivalent power form;
    # the logarithms cancel exactly, which keeps the m=2 equality sharp.
    return (m - 1.0) ** 2 / m * x ** (m / (m - 1.0)) - (m - 1.0) * x + (m - 1.0) / m


def quadratic_minorant_check(m: float, grid) -> float:
    """Minimum slack of ``exp_remainder_m(m, log x) >= (x-1)^2 / 2``.

    The inequality holds on ``[1, inf)`` for ``m <= 2`` and on ``(0, 1]``
    for ``m >= 2`` (both at ``m = 2``, where the slack vanishes
    identically); the grid must respect that regime.
    """
    m = check_exponent(m)
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise ValidationError("grid must be a nonempty 1-d array")
    if np.any(x <= 0.0):
        raise ValidationError("grid points must be positive")
    if m < 2.0 and np.any(x < 1.0):
        raise ValidationError("for m < 2 the inequality is claimed on [1, inf)")
    if m > 2.0 and np.any(x > 1.0):
        raise ValidationError("for m > 2 the inequality is claimed on (0, 1]")
    return float(np.min(_power_remainder(m, x) - 0.5 * (x - 1.0) ** 2))


def minorant_ratio(m: float, x: float) -> float:
    """Ratio ``exp_remainder_m(m, log x) / (x-1)^2``, stable near ``x = 1``.

    Tends to 1/2 as ``x -> 1`` from either side for every ``m > 1``, which
    is why the quadratic minorant's constant cannot be improved.  Near 1
    the ratio is evaluated by the binomial series of the power form, so the
    limit can be probed without catastrophic cancellation.
    """
    m = check_exponent(m)
    x = float(x)
    if x <= 0.0:
        raise DomainError("x must be positive")
    s = x - 1.0
    if s == 0.0:
        return 0.5
    if abs(s) > 1e-2:
        return _power_remainder(m, x) / s**2
    p = m / (m - 1.0)
    coeff = p * (p - 1.0) / 2.0
    total = coeff
    power = 1.0
    for j in range(3, 13):
        coeff *= (p - (j - 1.0)) / j
        power *= s
        total += coeff * power
    return (m - 1.0) ** 2 / m * total


def integral_min_inequality_check(
    t1: float, t2: float, c: float, nu: float, ts, psi
) -> bool:
    """Check the integral minimum inequality behind the Harnack bound.

    For a sampled continuous ``psi`` on ``[t1, t2]``, both orientations of

    ``min_s ( psi(s) - (1/c) * integral tau^(-nu) psi(tau)^2 dtau )
    <= (c/(nu+1)) (t2^(nu+1) - t1^(nu+1)) / (t2 - t1)^2``

    must hold, with the integral taken from ``s`` to ``t2`` or from ``t1``
    to ``s``.  Integrals use composite trapezoid on the given grid and the
    comparison absorbs quadrature error through a ``1e-6`` slack.
    """
    if not (0.0 < t1 < t2):
        raise ValidationError("need 0 < t1 < t2")
    if not (c > 0.0 and nu > 0.0):
        raise ValidationError("c and nu must be positive")
    ts = np.asarray(ts, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if ts.shape != psi.shape or ts.ndim != 1:
        raise ValidationError("ts and psi must be 1-d arrays of equal length")
    if len(ts) < 100:
        raise ValidationError("grid too coarse; need at least 100 points")
    if np.any(np.diff(ts) <= 0.0):
        raise ValidationError("ts must be strictly increasing")
    span = t2 - t1
    if abs(ts[0] - t1) > 1e-9 * span or abs(ts[-1] - t2) > 1e-9 * span:
        raise ValidationError("grid must span [t1, t2]")
    w = ts**-nu * psi**2
    cum = cumulative_trapezoid(w, ts, initial=0.0)
    total = cum[-1]
    lhs_tail = float(np.min(psi - (total - cum) / c))
    lhs_head = float(np.min(psi - cum / c))
    rhs = c / (nu + 1.0) * (t2 ** (nu + 1.0) - t1 ** (nu + 1.0)) / span**2
    return rhs - lhs_tail >= -1e-6 and rhs - lhs_head >= -1e-6


# -- alternate operation names ---------------------------------------------

lemma61_check = quadratic_minorant_check
lemma63_check = integral_min_inequality_check
