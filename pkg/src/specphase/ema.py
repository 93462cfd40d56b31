"""Effective-medium saddle-point equations for the leading modularity eigenvalue.

All three phases share the stationarity condition

    R_1(phi, a) = c_bar a / (1 - a^2)                          (*)

which, for fixed ``a`` in (0, 1), has exactly one root ``phi(a)`` above the
largest pole ``c_max a``. A second condition then fixes ``a``:

* detectable:     R_2 = c_bar (a + 1/Gamma) / (1 - a^2)
* undetectable:   S_2 = c_bar (1 + a^2) / (1 - a^2)^2
* unpartitioned:  R_2 = c_bar / (1 - theta - a)

The undetectable condition is the stationarity of ``phi(a)`` along (*), so its
root is the first local minimum of that curve. In every phase the average
leading eigenvalue equals ``phi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import optimize, stats
from scipy.special import ndtr

from .ensembles import DegreeDistribution
from .errors import ConvergenceError, DomainError, ParameterError, PhaseInfeasible

__all__ = [
    "Phase",
    "EmaSolution",
    "PhaseQuery",
    "RegularClosedForms",
    "r_n",
    "s_n",
    "phi_of_a",
    "saddle_residuals",
    "solve_detectable",
    "solve_undetectable",
    "solve_unpartitioned",
    "classify_phase",
    "detectability_threshold",
    "unpartitioned_boundary",
    "regular_closed_forms",
    "poisson_truncated",
    "predicted_overlap",
    "predicted_overlap_regular",
    "dense_approximation_threshold",
]

_XTOL = 1e-15
_RTOL = 4 * np.finfo(float).eps
_SCAN = 400


class Phase(str, enum.Enum):
    DETECTABLE = "D"
    UNDETECTABLE = "U"
    UNPARTITIONED = "N"


@dataclass(frozen=True)
class PhaseQuery:
    dist: DegreeDistribution
    gamma: float
    theta: float
    p1: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError("Gamma must lie in [0, 1]")
        if not self.theta > 0:
            raise ParameterError("theta must be positive")
        if not 0.0 < self.p1 < 1.0:
            raise ParameterError("p1 must lie in (0, 1)")


@dataclass
class EmaSolution:
    phase: Phase
    phi: float
    a_hat: float
    lambda1: float
    m_hat_sq: Optional[float] = None
    omega_hat_zero: bool = True
    candidates: dict[str, float] = field(default_factory=dict)   # phi of every feasible phase

    def as_dict(self) -> dict:
        return {
            "phase": self.phase.value,
            "phi": self.phi,
            "lambda1": self.lambda1,
            "a_hat": self.a_hat,
            "m_hat_sq": self.m_hat_sq,
            "omega_hat_zero": self.omega_hat_zero,
            "candidates": dict(self.candidates),
        }


# --------------------------------------------------------------------------------------
# resolvent sums
# --------------------------------------------------------------------------------------


def _gaps(dist: DegreeDistribution, phi: float, a_hat: float) -> np.ndarray:
    gap = phi - dist.c * a_hat
    if np.any(gap <= 0.0):
        bad = int(dist.c[int(np.argmin(gap))])
        raise DomainError(f"phi - c a_hat <= 0 at degree {bad} (phi={phi!r}, a_hat={a_hat!r})")
    return gap


def r_n(dist: DegreeDistribution, phi: float, a_hat: float, n: int) -> float:
    gap = _gaps(dist, phi, a_hat)
    return float(np.sum(dist.b * dist.c ** n / gap))


def s_n(dist: DegreeDistribution, phi: float, a_hat: float, n: int) -> float:
    gap = _gaps(dist, phi, a_hat)
    return float(np.sum(dist.b * dist.c ** n / gap ** 2))


# --------------------------------------------------------------------------------------
# inner solve: phi(a) from (*)
# --------------------------------------------------------------------------------------


def _pole_gap(dist: DegreeDistribution, a_hat: float) -> float:
    """``delta = phi - c_max a`` at the root of (*); solved in ``delta`` to keep its relative precision."""
    if not 0.0 < a_hat < 1.0:
        raise DomainError(f"a_hat must lie in (0, 1), got {a_hat!r}")
    c, b = dist.c, dist.b
    bc = b * c
    offsets = (c[-1] - c) * a_hat
    target = dist.mean_degree * a_hat / (1.0 - a_hat * a_hat)
    spacing = (1.0 - a_hat * a_hat) / a_hat
    # each term is at most b_t c_t / delta, so R_1 <= c_bar / delta: the root lies below spacing,
    # and above spacing - (c_max - c_min) a by the same argument from the other side
    hi = spacing
    lo = spacing - offsets[0]
    if not lo < hi:
        return float(hi)

    def f(delta: float) -> float:
        return float(np.sum(bc / (delta + offsets))) - target

    if lo <= 0.0:
        lo = hi
        while f(lo) <= 0.0:
            lo *= 0.5
            if lo == 0.0:
                raise ConvergenceError("stationarity root collapsed onto the largest pole", 0.0)
        hi = min(hi, 2.0 * lo)
    return float(optimize.brentq(f, lo, hi, xtol=1e-300, rtol=_RTOL))


def phi_of_a(dist: DegreeDistribution, a_hat: float) -> float:
    """Unique root in ``phi > c_max a`` of ``R_1(phi, a) = c_bar a / (1 - a^2)``, for ``0 < a < 1``."""
    return float(dist.c[-1] * a_hat + _pole_gap(dist, a_hat))


def _state(dist: DegreeDistribution, a_hat: float) -> tuple[float, np.ndarray]:
    delta = _pole_gap(dist, a_hat)
    gaps = delta + (dist.c[-1] - dist.c) * a_hat
    return float(dist.c[-1] * a_hat + delta), gaps


def _sum(dist: DegreeDistribution, gaps: np.ndarray, n: int, power: int = 1) -> float:
    return float(np.sum(dist.b * dist.c ** n / gaps ** power))


def _f_detectable(dist: DegreeDistribution, gamma: float, a: float) -> float:
    _, gaps = _state(dist, a)
    return _sum(dist, gaps, 2) * (1.0 - a * a) / dist.mean_degree - (a + 1.0 / gamma)


def _f_undetectable(dist: DegreeDistribution, a: float) -> float:
    _, gaps = _state(dist, a)
    one = 1.0 - a * a
    return _sum(dist, gaps, 2, 2) * one * one / dist.mean_degree - (1.0 + a * a)


def _f_unpartitioned(dist: DegreeDistribution, theta: float, a: float) -> float:
    _, gaps = _state(dist, a)
    return _sum(dist, gaps, 2) * (1.0 - theta - a) / dist.mean_degree - 1.0


def _a_grid(hi: float = 1.0) -> np.ndarray:
    # denser toward both ends of the interval
    u = (np.arange(1, _SCAN) / _SCAN)
    return hi * (0.5 - 0.5 * np.cos(np.pi * u))


# --------------------------------------------------------------------------------------
# phase solvers
# --------------------------------------------------------------------------------------


@lru_cache(maxsize=256)
def solve_undetectable(dist: DegreeDistribution, tol: float = 1e-8) -> tuple[float, float]:
    """Plateau ``(phi, a_hat)``: first local minimum of ``phi(a)`` along (*)."""
    grid = _a_grid()
    prev_a, prev_f = None, None
    for a in grid:
        fa = _f_undetectable(dist, a)
        if fa > 0.0:
            if prev_a is None:
                raise ConvergenceError("undetectable condition positive at the smallest a_hat", fa)
            root = optimize.brentq(lambda x: _f_undetectable(dist, x), prev_a, a,
                                   xtol=_XTOL, rtol=_RTOL)
            phi = _check_residuals(dist, root, tol, s2_target=True)
            return phi, float(root)
        prev_a, prev_f = a, fa
    raise ConvergenceError("no undetectable root for a_hat in (0, 1)", abs(prev_f or math.nan))


def solve_detectable(dist: DegreeDistribution, gamma: float, tol: float = 1e-8) -> tuple[float, float]:
    """Detectable ``(phi, a_hat)``; raises :class:`PhaseInfeasible` at or below the threshold."""
    if not 0.0 < gamma <= 1.0:
        raise ParameterError("Gamma must lie in (0, 1]")
    _, a_u = solve_undetectable(dist)
    f_top = _f_detectable(dist, gamma, a_u)
    if f_top < 0.0:
        raise PhaseInfeasible(f"Gamma={gamma!r} is below the detectability threshold")
    if f_top == 0.0:
        root = a_u
    else:
        lo = a_u
        while True:
            lo *= 0.5
            if _f_detectable(dist, gamma, lo) < 0.0:
                break
            if lo < 1e-12:
                raise PhaseInfeasible("no sign change of the detectable condition")
        root = optimize.brentq(lambda x: _f_detectable(dist, gamma, x), lo, a_u, xtol=_XTOL, rtol=_RTOL)
    phi = _check_residuals(dist, root, tol, gamma=gamma)
    return phi, float(root)


@lru_cache(maxsize=4096)
def solve_unpartitioned(dist: DegreeDistribution, theta: float, tol: float = 1e-8) -> tuple[float, float]:
    """Smallest-``a_hat`` root of the unpartitioned condition; :class:`PhaseInfeasible` if none."""
    if not theta > 0:
        raise ParameterError("theta must be positive")
    top = min(1.0, 1.0 - theta)
    if top <= 0.0:
        raise PhaseInfeasible("the unpartitioned condition has no root for theta >= 1")
    grid = _a_grid(top)
    vals = np.array([_f_unpartitioned(dist, theta, a) for a in grid])
    pos = np.flatnonzero(vals > 0.0)
    if pos.size:
        i = int(pos[0])
        lo_a = grid[i - 1] if i > 0 else grid[0] * 0.5
        hi_a = grid[i]
    else:
        # the positive window may be narrower than the grid; polish the maximum
        i = int(np.argmax(vals))
        lo_b = grid[i - 1] if i > 0 else 0.0
        hi_b = grid[i + 1] if i + 1 < grid.size else top
        res = optimize.minimize_scalar(lambda x: -_f_unpartitioned(dist, theta, x),
                                       bounds=(lo_b + 1e-300, hi_b), method="bounded",
                                       options={"xatol": 1e-14})
        if -res.fun <= 0.0:
            raise PhaseInfeasible(f"no unpartitioned root at theta={theta!r}")
        lo_a, hi_a = lo_b + 1e-300, float(res.x)
    if _f_unpartitioned(dist, theta, lo_a) > 0.0:
        raise PhaseInfeasible("unpartitioned condition positive at the bottom of its bracket")
    root = optimize.brentq(lambda x: _f_unpartitioned(dist, theta, x), lo_a, hi_a, xtol=_XTOL, rtol=_RTOL)
    phi = _check_residuals(dist, root, tol, theta=theta)
    return phi, float(root)


def _check_residuals(dist, a, tol, gamma=None, theta=None, s2_target=False) -> float:
    """Relative residuals of the saddle-point conditions at ``a``; returns ``phi``."""
    phi, gaps = _state(dist, a)
    cbar = dist.mean_degree
    one = 1.0 - a * a
    r2 = _sum(dist, gaps, 2)
    res = [_sum(dist, gaps, 1) / (cbar * a / one) - 1.0]
    if gamma is not None:
        res.append(r2 / (cbar * (a + 1.0 / gamma) / one) - 1.0)
    if theta is not None:
        res.append(r2 * (1.0 - theta - a) / cbar - 1.0)
    if s2_target:
        res.append(_sum(dist, gaps, 2, 2) / (cbar * (1.0 + a * a) / one ** 2) - 1.0)
    worst = max(abs(x) for x in res)
    if not worst <= tol:
        raise ConvergenceError(f"saddle-point residual {worst:.3e} exceeds tolerance", worst)
    return phi


def saddle_residuals(dist: DegreeDistribution, a_hat: float, gamma: float | None = None,
                     theta: float | None = None, threshold: bool = False) -> dict[str, float]:
    """Relative residuals of the conditions at ``a_hat`` (with ``phi = phi(a_hat)``)."""
    _, gaps = _state(dist, a_hat)
    cbar = dist.mean_degree
    one = 1.0 - a_hat * a_hat
    r2 = _sum(dist, gaps, 2)
    out = {"stationarity": _sum(dist, gaps, 1) / (cbar * a_hat / one) - 1.0}
    if gamma is not None:
        out["detectable"] = r2 / (cbar * (a_hat + 1.0 / gamma) / one) - 1.0
    if theta is not None:
        out["unpartitioned"] = r2 * (1.0 - theta - a_hat) / cbar - 1.0
    if threshold:
        out["threshold"] = _sum(dist, gaps, 2, 2) / (cbar * (1.0 + a_hat ** 2) / one ** 2) - 1.0
    return out


def _inverse_gamma(dist: DegreeDistribution, a: float) -> float:
    _, gaps = _state(dist, a)
    return _sum(dist, gaps, 2) * (1.0 - a * a) / dist.mean_degree - a


@lru_cache(maxsize=256)
def detectability_threshold(dist: DegreeDistribution, tol: float = 1e-8) -> float:
    """Gamma* from the plateau root: ``1/Gamma* = R_2 (1 - a^2) / c_bar - a``.

    Takes no resolution parameter: the threshold condition does not involve it.
    """
    _, a = solve_undetectable(dist, tol)
    inv = _inverse_gamma(dist, a)
    g = 1.0 / inv
    if not 0.0 < g <= 1.0 + 1e-12:
        raise DomainError(f"threshold Gamma*={g!r} outside (0, 1]")
    return min(g, 1.0)


def unpartitioned_boundary(dist: DegreeDistribution, theta: float) -> Optional[float]:
    """Gamma where the detectable branch meets the unpartitioned root (None if infeasible)."""
    try:
        phi, a = solve_unpartitioned(dist, theta)
    except PhaseInfeasible:
        return None
    inv = _inverse_gamma(dist, a)
    if inv <= 0:
        return None
    return 1.0 / inv


def _m_hat_sq_regular(c: int, a_hat: float, gamma: float, p1: float) -> float:
    # closed form written through the numeric root: 1 - 1/((c-1)^2 Gamma^2) = 1 - a^2
    return (1.0 - p1) / (c * p1) * (1.0 - a_hat * a_hat) * ((c - 1) * gamma * gamma - 1.0)


def classify_phase(q: PhaseQuery, tol: float = 1e-8) -> EmaSolution:
    """Phase, ``phi`` and ``a_hat`` at one (Gamma, theta) point.

    Detectable versus undetectable follows the threshold; the unpartitioned
    solution wins only when its ``phi`` is strictly larger than the other one.
    """
    dist = q.dist
    cand: dict[str, float] = {}
    g_star = detectability_threshold(dist, tol)
    phi_u, a_u = solve_undetectable(dist, tol)
    base: EmaSolution
    if q.gamma == g_star:
        # the branches meet here; ties go to the phase on the larger-Gamma side
        m2 = 0.0 if dist.is_regular else None
        base = EmaSolution(Phase.DETECTABLE, phi_u, a_u, phi_u, m2, True)
        cand["D"] = cand["U"] = phi_u
    elif q.gamma > g_star:
        phi_d, a_d = solve_detectable(dist, q.gamma, tol)
        m2 = _m_hat_sq_regular(dist.degrees[0], a_d, q.gamma, q.p1) if dist.is_regular else None
        base = EmaSolution(Phase.DETECTABLE, phi_d, a_d, phi_d, m2, True)
        cand["D"] = phi_d
    else:
        base = EmaSolution(Phase.UNDETECTABLE, phi_u, a_u, phi_u, 0.0 if dist.is_regular else None, True)
        cand["U"] = phi_u
    try:
        phi_n, a_n = solve_unpartitioned(dist, float(q.theta), tol)
        cand["N"] = phi_n
    except PhaseInfeasible:
        phi_n = None
    if phi_n is not None and phi_n > base.phi * (1.0 + 1e-12):
        sol = EmaSolution(Phase.UNPARTITIONED, phi_n, a_n, phi_n, None, False)
    else:
        sol = base
    sol.candidates = cand
    return sol


# --------------------------------------------------------------------------------------
# regular graphs
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularClosedForms:
    c: int
    gamma: float
    theta: float
    p1: float
    lambda1_detectable: float
    m_hat_sq: float
    lambda1_undetectable: float
    gamma_star: float
    gamma_un: Optional[float]
    theta_max: float


def regular_closed_forms(c: int, gamma: float, theta: float = 1.0, p1: float = 0.5) -> RegularClosedForms:
    """Exact expressions available for random c-regular graphs."""
    if int(c) != c or c < 3:
        raise ParameterError("c must be an integer >= 3")
    if gamma == 0.0:
        raise DomainError("the detectable eigenvalue has a pole at Gamma = 0")
    if not 0.0 < gamma <= 1.0:
        raise ParameterError("Gamma must lie in (0, 1]")
    if not 0.0 < p1 < 1.0:
        raise ParameterError("p1 must lie in (0, 1)")
    p2 = 1.0 - p1
    lam_d = (c - 1) * gamma + 1.0 / gamma
    m2 = p2 / (c * p1) * (1.0 - 1.0 / ((c - 1) ** 2 * gamma ** 2)) * ((c - 1) * gamma ** 2 - 1.0)
    root = math.sqrt(c - 1)
    theta_max = 1.0 - 2.0 * root / c
    # c^2 (1-theta)^2 - 4 (c-1), factored so the double root at theta_max carries no cancellation
    disc = c * (theta_max - theta) * (c * (1.0 - theta) + 2.0 * root)
    g_un = None if disc < 0 else (c * (1.0 - theta) + math.sqrt(disc)) / (2.0 * (c - 1))
    return RegularClosedForms(
        c=int(c), gamma=gamma, theta=theta, p1=p1,
        lambda1_detectable=lam_d,
        m_hat_sq=m2,
        lambda1_undetectable=2.0 * math.sqrt(c - 1),
        gamma_star=1.0 / root,
        gamma_un=g_un,
        theta_max=theta_max,
    )


# --------------------------------------------------------------------------------------
# Poisson degrees
# --------------------------------------------------------------------------------------


def poisson_truncated(c_bar: float, epsilon: float = 1e-12) -> DegreeDistribution:
    """Poisson(c_bar) restricted to ``1 <= t <= t_max`` and renormalized.

    ``t_max`` is the smallest degree whose upper tail ``P(X > t_max)`` is
    below ``epsilon``.
    """
    if not c_bar > 0:
        raise ParameterError("c_bar must be positive")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError("epsilon must lie in (0, 1)")
    t_max = int(stats.poisson.isf(epsilon, c_bar))
    while stats.poisson.sf(t_max, c_bar) >= epsilon:
        t_max += 1
    while t_max > 1 and stats.poisson.sf(t_max - 1, c_bar) < epsilon:
        t_max -= 1
    t_max = max(t_max, 1)
    t = np.arange(1, t_max + 1)
    pmf = stats.poisson.pmf(t, c_bar)
    w = pmf / math.fsum(pmf)
    kept_mass = float(math.fsum(pmf))
    dist = DegreeDistribution(tuple(int(x) for x in t), tuple(float(x) for x in w),
                              {"family": "poisson", "c_bar": c_bar, "epsilon": epsilon,
                               "t_max": t_max, "kept_mass": kept_mass})
    dist.metadata["mean_degree"] = dist.mean_degree
    return dist


# --------------------------------------------------------------------------------------
# overlap prediction and the dense-graph threshold
# --------------------------------------------------------------------------------------


def predicted_overlap(dist: DegreeDistribution, gamma: float, p1: float = 0.5, m_hat_sq: float | None = None) -> float:
    """Fraction of correctly classified nodes under a Gaussian ansatz.

    Node ``i`` in block ``r`` has mean ``c_i m_1r / (phi - c_i a)`` and the
    block means are weighted into a signal ``mu_1^2 = S_2 m_11^2``. The
    opposite block carries ``mu_2 = -(p1/p2) mu_1`` (orthogonality to the
    degree vector) and the spread follows from ``sum x_i^2 = N``.
    """
    try:
        phi, a = solve_detectable(dist, gamma)
    except PhaseInfeasible:
        return 0.5
    if m_hat_sq is None:
        if not dist.is_regular:
            raise ParameterError("m_hat_sq must be supplied for non-regular distributions")
        m_hat_sq = _m_hat_sq_regular(dist.degrees[0], a, gamma, p1)
    if m_hat_sq <= 0.0:
        return 0.5
    p2 = 1.0 - p1
    mu1_sq = _sum(dist, _state(dist, a)[1], 2, 2) * m_hat_sq
    mu2_sq = mu1_sq * (p1 / p2) ** 2
    var = 1.0 - p1 * mu1_sq - p2 * mu2_sq
    if var <= 0.0:
        return 1.0
    sd = math.sqrt(var)
    return float(p1 * ndtr(math.sqrt(mu1_sq) / sd) + p2 * ndtr(math.sqrt(mu2_sq) / sd))


def predicted_overlap_regular(c: int, gamma: float, p1: float = 0.5) -> float:
    """Gaussian-ansatz overlap for c-regular graphs; 0.5 at or below the threshold."""
    if gamma <= 1.0 / math.sqrt(c - 1):
        return 0.5
    return predicted_overlap(DegreeDistribution.regular(c), gamma, p1)


def dense_approximation_threshold(c_bar: float) -> float:
    """Gamma at ``c_in - c_out = 2 sqrt(c_bar)`` (equal blocks)."""
    if not c_bar > 0:
        raise ParameterError("c_bar must be positive")
    return min(1.0, 1.0 / math.sqrt(c_bar))
