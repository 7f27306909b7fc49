"""Pointwise operators for the porous medium equation on weighted graphs.

The discrete diffusion ``du/dt = L(u^m)`` with exponent ``m > 1`` is studied
through its pressure ``v = (m/(m-1)) u^(m-1)``.  This module collects the
algebra that the verification routines build on:

* the generalized graph Laplacian ``L``,
* remainder functions of the exponential replacing ``|grad|^2`` calculus,
* the nonlinear gradient energy entering the pressure equation
  ``dv/dt = (m-1) v Lv + gradient_energy(v)``,
* the curvature forms whose lower bounds are the discrete
  curvature-dimension conditions, and
* the mixed second-order quantity bounded by the Aronson-Benilan estimate.

Pointwise operators take ``(graph, field, vertex)`` and return a float; the
``*_field`` variants evaluate every vertex at once and are what the solver
and search code call.  Fields are numpy arrays aligned with
``graph.vertices`` (see :func:`as_field`).

Zero values are accepted where a boundary limit is well defined (``m >= 2``
searches probe the boundary of the positive cone); the conventions
``0^0 = 1`` and division limits into ``+inf`` match the continuous
extensions of the formulas.  For ``m < 2`` all fields must stay strictly
positive.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DomainError
from .graphs import Graph

__all__ = [
    "as_field",
    "check_exponent",
    "check_mixing",
    "laplacian",
    "laplacian_field",
    "exp_remainder",
    "exp_remainder_m",
    "difference_sum",
    "pressure",
    "pressure_inverse",
    "gradient_energy",
    "gradient_energy_field",
    "carre_du_champ",
    "curvature_form",
    "curvature_form_mixed",
    "mixed_laplacian",
    "mixed_laplacian_field",
    "upsilon",
    "tilde_upsilon",
    "psi_H",
    "tilde_psi",
    "gamma",
    "d_m",
    "d_m_alpha",
    "g_quantity",
]


# -- argument validation ---------------------------------------------------


def check_exponent(m: float) -> float:
    """Validate a diffusion exponent: a finite real with ``m > 1``."""
    m = float(m)
    if not np.isfinite(m) or m <= 1.0:
        raise DomainError(f"exponent must satisfy m > 1, got {m}")
    return m


def check_mixing(alpha: float) -> float:
    """Validate a mixing parameter: a real in ``[0, 1]``."""
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < 0.0 or alpha > 1.0:
        raise DomainError(f"mixing parameter must lie in [0, 1], got {alpha}")
    return alpha


def as_field(g: Graph, values) -> np.ndarray:
    """Coerce ``values`` to a float array aligned with ``g.vertices``.

    Accepts a scalar (broadcast), a mapping from vertex id to value, or a
    sequence in graph order.
    """
    if isinstance(values, dict):
        missing = [v for v in g.vertices if v not in values]
        if missing:
            raise DomainError(f"field missing vertices {missing}")
        return np.array([float(values[v]) for v in g.vertices])
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return np.full(g.n, float(arr))
    if arr.shape != (g.n,):
        raise DomainError(f"field has shape {arr.shape}, expected ({g.n},)")
    return arr.copy()


def _check_field(g: Graph, u, m: float, allow_zero: bool) -> np.ndarray:
    u = as_field(g, u)
    if not np.all(np.isfinite(u)):
        raise DomainError("field contains non-finite values")
    if allow_zero and m >= 2.0:
        if np.any(u < 0.0):
            raise DomainError("field contains negative values")
    elif np.any(u <= 0.0):
        raise DomainError("field must be strictly positive")
    return u


# -- Laplacian and kernel sums ---------------------------------------------


def laplacian_field(g: Graph, f) -> np.ndarray:
    """Generalized graph Laplacian ``Lf(x) = sum_y k(x,y) (f(y) - f(x))``."""
    f = as_field(g, f)
    return g.kernel_matrix() @ f - g.degree * f


def laplacian(g: Graph, f, x: str) -> float:
    """Value of ``Lf`` at a single vertex."""
    f = as_field(g, f)
    i = g.index(x)
    w = g.weights_idx(i)
    return float(w @ (f[g.neighbors_idx(i)] - f[i]))


def difference_sum(g: Graph, h: Callable[[np.ndarray], np.ndarray], f, x: str) -> float:
    """Kernel-weighted sum ``sum_y k(x,y) h(f(y) - f(x))``.

    With ``h`` the identity this is exactly :func:`laplacian`.
    """
    f = as_field(g, f)
    i = g.index(x)
    w = g.weights_idx(i)
    return float(w @ np.asarray(h(f[g.neighbors_idx(i)] - f[i]), dtype=float))


# -- remainder functions of the exponential --------------------------------


def exp_remainder(r):
    """First-order Taylor remainder of the exponential, ``e^r - 1 - r``.

    Nonnegative, zero only at ``r = 0``.  Saturates to ``+inf`` for large
    positive arguments instead of overflowing.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(over="ignore"):
        out = np.expm1(r) - r
    return float(out) if out.ndim == 0 else out


def exp_remainder_m(m: float, r):
    """Exponent-weighted remainder combination for diffusion exponent ``m``.

    ``((m-1)^2/m) * exp_remainder(m r / (m-1)) - (m-1) * exp_remainder(r)``.
    Nonnegative for every ``m > 1``; for ``m = 2`` it collapses to
    ``(e^r - 1)^2 / 2``.  Saturates to ``+inf`` for large positive ``r``.
    """
    m = check_exponent(m)
    r = np.asarray(r, dtype=float)
    lead = exp_remainder(m / (m - 1.0) * r)
    with np.errstate(invalid="ignore"):
        out = np.where(
            np.isinf(lead),
            np.inf,
            (m - 1.0) ** 2 / m * lead - (m - 1.0) * exp_remainder(r),
        )
    return float(out) if out.ndim == 0 else out


# -- pressure --------------------------------------------------------------


def pressure(m: float, u):
    """Pressure ``v = (m/(m-1)) u^(m-1)`` of a nonnegative density."""
    m = check_exponent(m)
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0):
        raise DomainError("density must be nonnegative")
    out = m / (m - 1.0) * u ** (m - 1.0)
    return float(out) if out.ndim == 0 else out


def pressure_inverse(m: float, v):
    """Density recovered from a nonnegative pressure field."""
    m = check_exponent(m)
    v = np.asarray(v, dtype=float)
    if np.any(v < 0.0):
        raise DomainError("pressure must be nonnegative")
    out = ((m - 1.0) / m * v) ** (1.0 / (m - 1.0))
    return float(out) if out.ndim == 0 else out


# -- gradient energy -------------------------------------------------------


def _gradient_energy_terms(m: float, wx, wy):
    c1 = (m - 1.0) / m
    c2 = (m - 1.0) ** 2 / m
    p = (m - 2.0) / (m - 1.0)
    q = m / (m - 1.0)
    return c1 * wx**2 + c2 * wx**p * wy**q - (m - 1.0) * wx * wy


def gradient_energy_field(g: Graph, m: float, w) -> np.ndarray:
    """Vectorized :func:`gradient_energy` over all vertices."""
    m = check_exponent(m)
    w = _check_field(g, w, m, allow_zero=True)
    k = g.kernel_matrix()
    if m < 1.5:
        # Near m = 1 the power form cancels catastrophically (its exponents
        # grow like 1/(m-1)), so evaluate through the logarithmic form,
        # which stays conditioned there; zero values cannot occur for m < 2.
        lw = np.log(w)
        rows = np.repeat(np.arange(g.n), np.diff(k.indptr))
        vals = k.data * exp_remainder_m(m, lw[k.indices] - lw[rows])
        return w**2 * np.bincount(rows, weights=vals, minlength=g.n)
    c1 = (m - 1.0) / m
    c2 = (m - 1.0) ** 2 / m
    p = (m - 2.0) / (m - 1.0)
    q = m / (m - 1.0)
    return c1 * g.degree * w**2 + c2 * w**p * (k @ w**q) - (m - 1.0) * w * (k @ w)


def gradient_energy(g: Graph, m: float, w, x: str) -> float:
    """Nonlinear gradient energy of a pressure field at a vertex.

    ``sum_y k(x,y) [ ((m-1)/m) w(x)^2
    + ((m-1)^2/m) w(x)^((m-2)/(m-1)) w(y)^(m/(m-1)) - (m-1) w(x) w(y) ]``

    This is the discrete stand-in for ``|grad w|^2`` in the pressure
    equation and the entropy dissipation.  It is nonnegative, and for
    ``m = 2`` it equals :func:`carre_du_champ`.  The equivalent logarithmic
    form ``w(x)^2 * difference_sum(exp_remainder_m, log w)(x)`` is kept as a
    debug cross-check.
    """
    m = check_exponent(m)
    w = _check_field(g, w, m, allow_zero=True)
    i = g.index(x)
    wt = g.weights_idx(i)
    if m < 1.5:
        lw = np.log(w)
        return float(
            w[i] ** 2 * (wt @ exp_remainder_m(m, lw[g.neighbors_idx(i)] - lw[i]))
        )
    out = float(wt @ _gradient_energy_terms(m, w[i], w[g.neighbors_idx(i)]))
    if __debug__ and np.all((w > 1e-6) & (w < 1e6)):
        ref = w[i] ** 2 * difference_sum(
            g, lambda r: exp_remainder_m(m, r), np.log(w), x
        )
        assert abs(out - ref) <= 1e-9 * max(1.0, abs(out), abs(ref))
    return out


def carre_du_champ(g: Graph, f, x: str) -> float:
    """Quadratic energy density ``(1/2) sum_y k(x,y) (f(y) - f(x))^2``."""
    return 0.5 * difference_sum(g, np.square, f, x)


# -- curvature forms -------------------------------------------------------


def curvature_form(g: Graph, m: float, u, x: str) -> float:
    """Curvature form of the diffusion at a vertex.

    ``m * sum_y k(x,y) [ u(y)^(m-2) L(u^m)(y) - u(x)^(m-2) L(u^m)(x) ]``

    Along solutions this is the time derivative of the pressure Laplacian;
    bounding it below by ``(1/d) (Lv)^2`` at admissible vertices is the
    curvature-dimension condition with mixing 0.
    """
    m = check_exponent(m)
    u = _check_field(g, u, m, allow_zero=True)
    lp = laplacian_field(g, u**m)
    r = u ** (m - 2.0) * lp
    i = g.index(x)
    return float(m * g.weights_idx(i) @ (r[g.neighbors_idx(i)] - r[i]))


def curvature_form_mixed(g: Graph, m: float, alpha: float, u, x: str) -> float:
    """Curvature form with mixing parameter ``alpha`` in ``[0, 1]``.

    ``sum_y k(x,y) [ (1 - alpha + alpha u(y)/u(x)) m u(y)^(m-2) L(u^m)(y)
    - (m - alpha + alpha (u(y)/u(x))^m) u(x)^(m-2) L(u^m)(x) ]``

    Reduces to :func:`curvature_form` at ``alpha = 0``.  Requires
    ``u(x) > 0``; zero values on neighbors are allowed for ``m >= 2``.
    """
    m = check_exponent(m)
    alpha = check_mixing(alpha)
    u = _check_field(g, u, m, allow_zero=True)
    i = g.index(x)
    if u[i] <= 0.0:
        raise DomainError("curvature form needs a positive value at the base vertex")
    lp = laplacian_field(g, u**m)
    nb = g.neighbors_idx(i)
    ratio = u[nb] / u[i]
    left = (1.0 - alpha + alpha * ratio) * m * u[nb] ** (m - 2.0) * lp[nb]
    right = (m - alpha + alpha * ratio**m) * u[i] ** (m - 2.0) * lp[i]
    return float(g.weights_idx(i) @ (left - right))


# -- mixed second-order quantity -------------------------------------------


def mixed_laplacian_field(g: Graph, m: float, alpha: float, u) -> np.ndarray:
    """Vectorized :func:`mixed_laplacian` over all vertices."""
    m = check_exponent(m)
    alpha = check_mixing(alpha)
    u = _check_field(g, u, m, allow_zero=True)
    v = pressure(m, u)
    lv = laplacian_field(g, v)
    if alpha == 0.0:
        return lv
    psi = gradient_energy_field(g, m, v)
    pos = v > 0.0
    out = np.empty(g.n)
    out[pos] = lv[pos] + alpha * psi[pos] / ((m - 1.0) * v[pos])
    if not np.all(pos):
        # v(x) = 0 limit: the correction blows up to +inf as soon as some
        # neighbor carries positive pressure, otherwise it vanishes.
        zero = ~pos
        has_mass = (g.kernel_matrix() @ v ** (m / (m - 1.0)))[zero] > 0.0
        out[zero] = np.where(has_mass, np.inf, lv[zero])
    return out


def mixed_laplacian(g: Graph, m: float, alpha: float, u, x: str) -> float:
    """Pressure Laplacian plus the mixed gradient correction at a vertex.

    ``Lv(x) + alpha * gradient_energy(v)(x) / ((m-1) v(x))`` with
    ``v = pressure(m, u)``.  The negative of this quantity is what the
    Aronson-Benilan estimate bounds by ``d/t`` along solutions, and its
    strict positive local maxima define admissibility for the
    curvature-dimension checks.
    """
    return float(mixed_laplacian_field(g, m, alpha, u)[g.index(x)])


# -- alternate operation names ---------------------------------------------

upsilon = exp_remainder
tilde_upsilon = exp_remainder_m
psi_H = difference_sum
tilde_psi = gradient_energy
gamma = carre_du_champ
d_m = curvature_form
d_m_alpha = curvature_form_mixed
g_quantity = mixed_laplacian
