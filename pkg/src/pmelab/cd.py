"""Curvature-dimension verification at graph vertices.

A vertex ``x`` satisfies the curvature-dimension condition ``CD(0, d)`` of
the diffusion with exponent ``m`` and mixing ``alpha`` if

    ``curvature_form_mixed(u)(x) >= (1/d) * (-G(x))^2``

for every positive field ``u`` whose quantity ``-G`` (see
:func:`~pmelab.operators.mixed_laplacian`) has a strict positive local
maximum at ``x``.  This module decides that empirically: admissibility
tests, the ratio ``(-G)^2 / curvature form`` whose supremum over admissible
fields is the optimal ``d``, a seeded sampling-plus-refinement search for
violations, closed-form certificates on complete graphs, the explicit chain
families where the condition fails, and the integer-lattice reduction with
mixing 1.

Both sides of the inequality are homogeneous of degree ``2m - 2`` in ``u``,
so searches fix ``u(x) = 1`` and explore the remaining two-hop coordinates
in a box.  For ``m >= 2`` the box touches zero (the boundary limits are
where several suprema live); for ``m < 2`` a positive floor keeps
``u^(m-2)`` finite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .errors import AdmissibilityError, DomainError, ValidationError
from .graphs import Graph, path_graph, two_hop_ball
from .operators import (
    as_field,
    check_exponent,
    check_mixing,
    curvature_form,
    curvature_form_mixed,
    laplacian,
    mixed_laplacian_field,
    pressure,
    pressure_inverse,
)

__all__ = [
    "SearchConfig",
    "AdmissibilityResult",
    "AdmissibleConfig",
    "CDReport",
    "is_admissible",
    "cd_ratio",
    "verify_cd_at",
    "empirical_optimal_d",
    "complete_graph_certificate",
    "ChainWitness",
    "chain_counterexample",
    "lattice_cd_check",
    "chain_limit_curvature",
    "complete_graph_f",
    "z_lattice_cd_check",
]


@dataclass(frozen=True)
class SearchConfig:
    """Budget and box parameters for the violation search.

    ``floor`` is the lower coordinate bound used when ``m < 2`` (the
    formulas involve ``u^(m-2)``, so zero is excluded there); for
    ``m >= 2`` the box starts at 0.  ``delta`` is the strictness margin
    used while filtering samples, ``tol`` the relative margin a ratio must
    exceed ``d`` by before a violation is declared.
    """

    samples: int = 20000
    refine_iters: int = 200
    seed: int = 0
    hi: float = 4.0
    floor: float = 1e-6
    delta: float = 1e-12
    tol: float = 1e-6
    starts: int = 3

    def __post_init__(self):
        if self.samples < 1:
            raise ValidationError("search budget must be at least 1 sample")
        if self.refine_iters < 0 or self.starts < 1:
            raise ValidationError("bad refinement budget")
        if not (0.0 < self.floor < 1.0) or not self.hi > 1.0:
            raise ValidationError("search box must satisfy 0 < floor < 1 < hi")
        if self.delta < 0.0 or self.tol < 0.0:
            raise ValidationError("delta and tol must be nonnegative")


@dataclass(frozen=True)
class AdmissibilityResult:
    """Outcome of an admissibility test with per-neighbor diagnostics."""

    admissible: bool
    base_vertex: str
    base_neg_g: float
    neighbor_neg_g: dict[str, float]

    def __bool__(self) -> bool:
        return self.admissible


@dataclass(frozen=True)
class AdmissibleConfig:
    """A field on a two-hop ball witnessing a curvature ratio.

    ``field`` maps ball vertices to values; values elsewhere are irrelevant
    to the ratio at ``base_vertex`` and are taken as 1 when rebuilding a
    full field.
    """

    base_vertex: str
    field: dict[str, float]
    m: float
    alpha: float
    delta: float

    def to_field(self, g: Graph) -> np.ndarray:
        u = np.ones(g.n)
        for v, value in self.field.items():
            u[g.index(v)] = value
        return u


@dataclass(frozen=True)
class CDReport:
    """Result of one per-vertex curvature-dimension search."""

    vertex: str
    m: float
    alpha: float
    d_tested: Optional[float]
    verdict: str
    witness: Optional[AdmissibleConfig]
    empirical_optimal_d: Optional[float]
    samples_used: int
    seed: int
    floor: Optional[float] = None

    def to_json_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return "inf" if math.isinf(x) else x

        out = {
            "vertex": self.vertex,
            "m": self.m,
            "alpha": self.alpha,
            "d_tested": self.d_tested,
            "verdict": self.verdict,
            "witness": None,
            "empirical_optimal_d": num(self.empirical_optimal_d),
            "samples_used": self.samples_used,
            "seed": self.seed,
        }
        if self.witness is not None:
            out["witness"] = {
                "base_vertex": self.witness.base_vertex,
                "field": dict(self.witness.field),
                "m": self.witness.m,
                "alpha": self.witness.alpha,
                "delta": self.witness.delta,
            }
        if self.floor is not None:
            out["floor"] = self.floor
        return out


# -- pointwise admissibility and ratio -------------------------------------


def is_admissible(g: Graph, m: float, alpha: float, u, x: str, delta: float = 0.0) -> AdmissibilityResult:
    """Test whether ``-G`` has a strict positive local maximum at ``x``.

    True iff ``-G(x) > delta`` and ``-G(x) >= -G(y)`` for every one-hop
    neighbor ``y``.  Ties with neighbors are allowed; several families
    attain their suprema exactly on such ties.
    """
    if delta < 0.0:
        raise DomainError("strictness margin must be nonnegative")
    neg_g = -mixed_laplacian_field(g, m, alpha, u)
    i = g.index(x)
    nbrs = {g.vertices[j]: float(neg_g[j]) for j in g.neighbors_idx(i)}
    base = float(neg_g[i])
    ok = base > delta and all(base >= val for val in nbrs.values())
    return AdmissibilityResult(ok, x, base, nbrs)


def cd_ratio(g: Graph, m: float, alpha: float, u, x: str) -> float:
    """Ratio ``(-G(x))^2 / curvature_form_mixed(u)(x)`` at an admissible field.

    ``CD(0, d)`` holds at ``x`` for this particular field iff the ratio is
    at most ``d``.  Returns ``+inf`` when the curvature form is not
    positive, in which case no finite ``d`` works.
    """
    adm = is_admissible(g, m, alpha, u, x, 0.0)
    if not adm:
        raise AdmissibilityError(f"field is not admissible at {x!r}: -G diagnostics {adm}")
    dval = curvature_form_mixed(g, m, alpha, u, x)
    if dval <= 0.0:
        return math.inf
    return adm.base_neg_g**2 / dval


# -- vectorized search engine ----------------------------------------------


class _BallProblem:
    """Batch evaluation of admissibility and score on one two-hop ball.

    Works on fields restricted to the ball (everything else is irrelevant
    to the quantities at the base vertex).  The ``score`` of a field is
    ``curvature_form / (-G)^2``, the reciprocal of :func:`cd_ratio`; it is
    smooth across sign changes of the curvature form, which is what the
    refinement descends through when hunting for violations.
    """

    def __init__(self, g: Graph, x: str, m: float, alpha: float):
        self.m = check_exponent(m)
        self.alpha = check_mixing(alpha)
        self.ball = two_hop_ball(g, x)
        self.pos_x = self.ball.index(x)
        idx = np.array([g.index(v) for v in self.ball])
        n = len(self.ball)
        kmat = np.zeros((n, n))
        for a, gi in enumerate(idx):
            cols = {int(j): w for j, w in zip(g.neighbors_idx(gi), g.weights_idx(gi))}
            for b, gj in enumerate(idx):
                kmat[a, b] = cols.get(int(gj), 0.0)
        self.kmat = kmat
        # full-graph degrees: rows for the closed one-hop neighborhood are
        # complete inside the ball, and only those rows are ever used.
        self.deg = g.degree[idx]
        one_hop = g.neighbors_idx(g.index(x))
        self.one_hop_local = np.array(
            [self.ball.index(g.vertices[j]) for j in one_hop], dtype=int
        )
        self.base_weights = np.array([kmat[self.pos_x, j] for j in self.one_hop_local])

    def evaluate(self, U: np.ndarray):
        """Score a batch of ball fields.

        Returns ``(admissible mask, score, -G(base), curvature form)`` for
        ``U`` of shape ``(batch, ball size)`` with positive base column.
        """
        m, alpha = self.m, self.alpha
        kt = self.kmat.T
        with np.errstate(divide="ignore", invalid="ignore"):
            V = m / (m - 1.0) * U ** (m - 1.0)
            KV = V @ kt
            LV = KV - self.deg * V
            if alpha > 0.0:
                q = m / (m - 1.0)
                S = V**q @ kt
                psi = (
                    (m - 1.0) / m * self.deg * V**2
                    + (m - 1.0) ** 2 / m * V ** ((m - 2.0) / (m - 1.0)) * S
                    - (m - 1.0) * V * KV
                )
                G = LV + alpha * psi / ((m - 1.0) * V)
                zero = V == 0.0
                if zero.any():
                    G[zero] = np.where(S[zero] > 0.0, np.inf, LV[zero])
            else:
                G = LV
            neg_g = -G
            base = neg_g[:, self.pos_x]
            ok = base > 0.0
            for j in self.one_hop_local:
                ok &= base >= neg_g[:, j]

            P = U**m
            LP = P @ kt - self.deg * P
            ux = U[:, self.pos_x]
            lead = np.zeros(len(U))
            trail = np.zeros(len(U))
            for j, w in zip(self.one_hop_local, self.base_weights):
                r = U[:, j] / ux
                lead += w * (1.0 - alpha + alpha * r) * m * U[:, j] ** (m - 2.0) * LP[:, j]
                trail += w * (m - alpha + alpha * r**m)
            dform = lead - trail * ux ** (m - 2.0) * LP[:, self.pos_x]
            score = np.where(ok, dform / np.where(ok, base, 1.0) ** 2, np.inf)
        return ok, score, base, dform

    def full_field(self, g: Graph, z: np.ndarray) -> np.ndarray:
        u = np.ones(g.n)
        for j, v in enumerate(self.ball):
            u[g.index(v)] = 1.0 if j == self.pos_x else z[j if j < self.pos_x else j - 1]
        return u

    def embed(self, z: np.ndarray) -> np.ndarray:
        """Ball field(s) from free coordinates (base coordinate fixed at 1)."""
        z = np.atleast_2d(z)
        U = np.insert(z, self.pos_x, 1.0, axis=1)
        return U


@dataclass
class _SearchOutcome:
    min_score: float
    best_z: Optional[np.ndarray]
    evaluations: int
    admissible_found: int


def _search_min_score(g: Graph, x: str, m: float, alpha: float, cfg: SearchConfig) -> _SearchOutcome:
    """Minimize score = curvature form / (-G)^2 over admissible ball fields."""
    prob = _BallProblem(g, x, m, alpha)
    dim = len(prob.ball) - 1
    lo = 0.0 if m >= 2.0 else cfg.floor
    if dim == 0:
        return _SearchOutcome(math.inf, None, 0, 0)

    sampler = qmc.Halton(d=dim, scramble=True, seed=cfg.seed)
    Z = qmc.scale(sampler.random(cfg.samples), lo, cfg.hi)

    # boundary probes: several suprema sit where coordinates vanish, so the
    # all-low corner, the {lo,1} corners and low-pushed variants of the best
    # samples are evaluated explicitly.
    probes = [np.full(dim, lo)]
    if dim <= 12:
        for corner in itertools.product((lo, 1.0), repeat=dim):
            probes.append(np.array(corner))

    ok, score, _, _ = prob.evaluate(prob.embed(Z))
    evals = len(Z)
    admissible = int(ok.sum())
    order = np.argsort(np.where(ok, score, np.inf))
    top = [Z[i] for i in order[: max(cfg.starts, 8)] if ok[i]]
    for z in top:
        for j in range(dim):
            pushed = z.copy()
            pushed[j] = lo
            probes.append(pushed)
    Zp = np.asarray(probes)
    okp, scorep, _, _ = prob.evaluate(prob.embed(Zp))
    evals += len(Zp)
    admissible += int(okp.sum())

    allZ = np.vstack([Z, Zp])
    allok = np.concatenate([ok, okp])
    allscore = np.concatenate([score, scorep])
    if not allok.any():
        return _SearchOutcome(math.inf, None, evals, 0)
    allscore = np.where(allok, allscore, np.inf)
    order = np.argsort(allscore)

    best_idx = order[0]
    best_score = float(allscore[best_idx])
    best_z = allZ[best_idx].copy()

    nfev = 0

    def objective(z):
        nonlocal nfev
        nfev += 1
        zc = np.clip(z, lo, cfg.hi)
        ok1, score1, base1, _ = prob.evaluate(prob.embed(zc))
        if not ok1[0] or base1[0] <= cfg.delta:
            return 1e300
        return float(score1[0])

    if cfg.refine_iters > 0:
        starts = [allZ[i] for i in order[: cfg.starts] if allok[i]]
        for z0 in starts:
            res = optimize.minimize(
                objective,
                z0,
                method="Nelder-Mead",
                bounds=optimize.Bounds(np.full(dim, lo), np.full(dim, cfg.hi)),
                options={"maxiter": cfg.refine_iters, "xatol": 1e-12, "fatol": 1e-14},
            )
            zc = np.clip(res.x, lo, cfg.hi)
            okr, scorer, _, _ = prob.evaluate(prob.embed(zc))
            if okr[0] and float(scorer[0]) < best_score:
                best_score = float(scorer[0])
                best_z = zc.copy()
        evals += nfev

    return _SearchOutcome(best_score, best_z, evals, admissible)


def _ratio_from_score(score: float) -> float:
    if score <= 0.0:
        return math.inf
    return 1.0 / score


def verify_cd_at(g: Graph, m: float, alpha: float, d: float, x: str, search: Optional[SearchConfig] = None) -> CDReport:
    """Search for a violation of ``CD(0, d)`` at vertex ``x``.

    Samples seeded low-discrepancy fields on the two-hop ball (base value
    fixed at 1), filters by admissibility, refines the worst candidates by
    derivative-free simplex descent, and reports ``violated`` with a
    witness when a ratio exceeds ``d (1 + tol)``.  ``holds_empirically`` is
    a budget-bounded claim, not a proof; the report carries seed and budget
    so it can be falsified.
    """
    m = check_exponent(m)
    alpha = check_mixing(alpha)
    if not d > 0.0:
        raise ValidationError("d must be positive")
    cfg = search or SearchConfig()
    out = _search_min_score(g, x, m, alpha, cfg)
    floor_flag = cfg.floor if m < 2.0 else None
    if out.admissible_found == 0:
        return CDReport(x, m, alpha, d, "inconclusive", None, None, out.evaluations, cfg.seed, floor_flag)
    ratio = _ratio_from_score(out.min_score)
    prob_witness = None
    verdict = "holds_empirically"
    if ratio > d * (1.0 + cfg.tol):
        verdict = "violated"
        ballprob = _BallProblem(g, x, m, alpha)
        u = ballprob.full_field(g, out.best_z)
        prob_witness = AdmissibleConfig(
            x,
            {v: float(u[g.index(v)]) for v in ballprob.ball},
            m,
            alpha,
            cfg.delta,
        )
    return CDReport(x, m, alpha, d, verdict, prob_witness, ratio, out.evaluations, cfg.seed, floor_flag)


def empirical_optimal_d(g: Graph, m: float, alpha: float, x: str, search: Optional[SearchConfig] = None) -> float:
    """Supremum of :func:`cd_ratio` over the sampled and refined fields.

    Includes boundary-limit probes with coordinates pushed to the box
    bottom.  Returns ``+inf`` as soon as any admissible probe has a
    nonpositive curvature form, and ``nan`` if no admissible probe was
    found at all.
    """
    m = check_exponent(m)
    alpha = check_mixing(alpha)
    cfg = search or SearchConfig()
    out = _search_min_score(g, x, m, alpha, cfg)
    if out.admissible_found == 0:
        return math.nan
    return _ratio_from_score(out.min_score)


# -- closed forms and counterexamples --------------------------------------


def complete_graph_certificate(nu: float, m: float, z) -> float:
    """Certificate polynomial for ``CD(0, nu)`` on the complete graph.

    For the unit-weight complete graph on ``D`` vertices and the field
    ``u(x1) = 1``, ``u(x_{j+1}) = z_j`` with ``z_j`` in ``(0, 1]``, the
    condition at ``x1`` holds iff this expression is nonnegative:

    ``nu m (sum_j z_j^(m-2) sum_{l != j} z_l^m + sum_j z_j^(m-2)
    - (D-1) sum_j z_j^(2m-2) - (D-1) sum_j z_j^m + (D-1)^2)
    - m^2/(m-1)^2 ((sum_j z_j^(m-1))^2 - 2 (D-1) sum_j z_j^(m-1) + (D-1)^2)``

    The first group equals ``nu * curvature_form / u(x1)^(2m-2)`` and the
    second ``(Lv(x1))^2 / u(x1)^(2m-2)``, so the sign decides the ratio
    test exactly; this is the independent oracle for complete graphs.
    """
    m = check_exponent(m)
    if not nu > 0.0:
        raise ValidationError("nu must be positive")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z <= 0.0) or np.any(z > 1.0):
        raise ValidationError("certificate coordinates must lie in (0, 1]")
    dm1 = len(z)
    s_m = float(np.sum(z**m))
    s_m1 = float(np.sum(z ** (m - 1.0)))
    s_m2_cross = float(np.sum(z ** (m - 2.0) * (s_m - z**m)))
    s_m2 = float(np.sum(z ** (m - 2.0)))
    s_2m2 = float(np.sum(z ** (2.0 * m - 2.0)))
    curv = nu * m * (s_m2_cross + s_m2 - dm1 * s_2m2 - dm1 * s_m + dm1**2)
    grad = m**2 / (m - 1.0) ** 2 * (s_m1**2 - 2.0 * dm1 * s_m1 + dm1**2)
    return curv - grad


@dataclass(frozen=True)
class ChainWitness:
    """Explicit chain field where the curvature condition fails."""

    graph: Graph
    vertex: str
    u: np.ndarray
    curvature: float
    neg_lap_pressure: float
    m: float
    eps: float


def chain_counterexample(n: int, m: float = 2.0, eps: float = 1e-3) -> ChainWitness:
    """Chain fields with negative curvature form at the center.

    ``n = 3, 4`` (exponent 2 only) return the limiting fields with
    curvature form exactly ``-3/2``; ``n = 5`` returns the one-parameter
    family built from the pressure profile ``(0, eps, 1, 2-2eps, 3-5eps)``,
    valid for any ``m >= 2`` and ``eps`` in ``(0, 3/5]``, whose curvature
    form stays negative as ``eps`` shrinks.
    """
    m = check_exponent(m)
    if n not in (3, 4, 5):
        raise ValidationError("chain length must be 3, 4 or 5")
    if n in (3, 4) and m != 2.0:
        raise ValidationError("the length-3 and length-4 fields are exponent-2 constructions")
    if m < 2.0:
        raise ValidationError("chain counterexamples need m >= 2")
    g = path_graph(n)
    if n == 3:
        u = as_field(g, {"1": 1.5, "2": 1.0, "3": 0.0})
        x = "2"
    elif n == 4:
        u = as_field(g, {"1": 1.5, "2": 1.0, "3": 0.0, "4": 0.0})
        x = "2"
    else:
        if not (0.0 < eps <= 0.6):
            raise ValidationError("eps must lie in (0, 3/5]")
        v = np.array([0.0, eps, 1.0, 2.0 - 2.0 * eps, 3.0 - 5.0 * eps])
        u = pressure_inverse(m, v)
        x = "3"
    dval = curvature_form(g, m, u, x)
    neg_lv = -laplacian(g, pressure(m, u), x)
    return ChainWitness(g, x, u, dval, neg_lv, m, eps if n == 5 else math.nan)


def chain_limit_curvature(m: float) -> float:
    """Limit of the length-5 chain curvature value as ``eps`` shrinks to 0.

    Returns the value approached by
    ``chain_counterexample(5, m, eps).curvature``.  For ``m > 2`` this is
    the product form

    ``((m-1)^2/m) 2^(-1/(m-1)) (2 * 3^q - 4^q - 2^q + 2 - 2^q)``

    with ``q = m/(m-1)``.  At ``m = 2`` exactly, the second-vertex term of
    the curvature form carries a factor ``eps^((m-2)/(m-1))`` whose
    exponent vanishes, so that term survives the limit and contributes an
    extra ``(m-1)^2/m``; the limit in ``eps`` is therefore discontinuous
    in ``m`` at 2.  The value is negative for every ``m >= 2``, which is
    what rules out a curvature bound on long chains.
    """
    m = check_exponent(m)
    if m < 2.0:
        raise ValidationError("the chain family is an m >= 2 construction")
    q = m / (m - 1.0)
    scale = (m - 1.0) ** 2 / m
    product_form = (
        scale
        * 2.0 ** (-1.0 / (m - 1.0))
        * (2.0 * 3.0**q - 4.0**q - 2.0**q + 2.0 - 2.0**q)
    )
    if m == 2.0:
        return product_form + scale
    return product_form


def lattice_cd_check(m: float, samples: int, seed: int) -> float:
    """Sampled check of ``CD(0, 1/(m-1))`` with mixing 1 at a lattice site.

    On the integer lattice the condition at a site ``z`` reduces, after
    scaling by ``(m-1)^2/m^2 * v(z)^2``, to a polynomial inequality in the
    powered pressure ratios ``A = a^(m/(m-1))``, ``B = b^(m/(m-1))`` of the
    two neighbors and ``S, N`` of the two second neighbors:

    ``-2(m-1)(A+B-2) - A(A+B-2) + m a (S+1-2A) - B(A+B-2) + m b (N+1-2B)
    >= (m-1) (2-A-B)^2``

    subject to admissibility ``A + B < 2`` and the second-neighbor
    constraints that make the site a local maximum of ``-G``.  Draws
    ``samples`` tuples from the constraint region (a quarter of them on the
    binding boundary) and returns the most negative slack observed;
    nonnegative up to round-off when the reduction is correct.
    """
    m = check_exponent(m)
    if samples < 1:
        raise ValidationError("need at least one sample")
    rng = np.random.default_rng(seed)
    q = m / (m - 1.0)
    worst = 0.0
    # the constant field gives exact equality and is always included
    batch = [(1.0, 1.0, 1.0, 1.0)]
    A = rng.uniform(0.0, 2.0, size=samples)
    B = rng.uniform(0.0, 2.0 - A)
    a = A ** (1.0 / q)
    b = B ** (1.0 / q)
    ex_s = np.where(rng.random(samples) < 0.25, 0.0, rng.exponential(1.0, size=samples))
    ex_n = np.where(rng.random(samples) < 0.25, 0.0, rng.exponential(1.0, size=samples))
    r_s = 2.0 * A - 1.0 - 2.0 * a ** (1.0 / (m - 1.0)) + a ** ((m + 1.0) / (m - 1.0)) + a ** (1.0 / (m - 1.0)) * B
    r_n = 2.0 * B - 1.0 - 2.0 * b ** (1.0 / (m - 1.0)) + b ** ((m + 1.0) / (m - 1.0)) + a ** (m / (m - 1.0)) * b ** (1.0 / (m - 1.0))
    S = np.maximum(r_s, 0.0) + ex_s
    N = np.maximum(r_n, 0.0) + ex_n
    lhs = (
        -2.0 * (m - 1.0) * (A + B - 2.0)
        - A * (A + B - 2.0)
        + m * a * (S + 1.0 - 2.0 * A)
        - B * (A + B - 2.0)
        + m * b * (N + 1.0 - 2.0 * B)
    )
    rhs = (m - 1.0) * (2.0 - A - B) ** 2
    worst = float(np.min(lhs - rhs)) if samples else 0.0
    for (aa, bb, ss, nn) in batch:
        val = (
            -2.0 * (m - 1.0) * (aa**q + bb**q - 2.0)
            - aa**q * (aa**q + bb**q - 2.0)
            + m * aa * (ss**q + 1.0 - 2.0 * aa**q)
            - bb**q * (aa**q + bb**q - 2.0)
            + m * bb * (nn**q + 1.0 - 2.0 * bb**q)
        ) - (m - 1.0) * (2.0 - aa**q - bb**q) ** 2
        worst = min(worst, val)
    return worst


# -- alternate operation names ---------------------------------------------

complete_graph_f = complete_graph_certificate
z_lattice_cd_check = lattice_cd_check
