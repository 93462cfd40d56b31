"""Thick-restart Lanczos for the largest algebraic eigenpair.

Every new Krylov vector is reorthogonalized against the whole basis (two
Gram-Schmidt passes), so the projected matrix stays symmetric to rounding.
On restart the top Ritz vectors are kept together with the residual
direction, which keeps the projected matrix in arrowhead form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, ParameterError

__all__ = ["EigenResult", "lanczos_largest"]


@dataclass
class EigenResult:
    value: float
    vector: np.ndarray       # unit 2-norm
    residual: float          # ||A x - value x|| with ||x|| = 1
    matvecs: int
    ritz_gap: float          # gap to the second Ritz value (inf when unavailable)

    def degenerate(self, tol: float) -> bool:
        return self.ritz_gap < 10.0 * tol


def lanczos_largest(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float = 1e-8,
    max_iter: int | None = None,
    v0: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
    basis_size: int = 80,
    keep: int | None = None,
) -> EigenResult:
    """Largest algebraic eigenpair of the symmetric operator ``matvec``.

    ``max_iter`` bounds the number of operator applications and defaults to
    ``10 sqrt(n) + 200``. Raises :class:`ConvergenceError` carrying the best
    residual when the budget runs out.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if n < 1:
        raise ParameterError("operator dimension must be positive")
    if max_iter is None:
        max_iter = int(10 * math.sqrt(n) + 200)
    rng = rng if rng is not None else np.random.default_rng(0)
    m = min(n, basis_size)
    k_keep = keep if keep is not None else max(1, min(m - 2, m // 2))

    v = rng.standard_normal(n) if v0 is None else np.array(v0, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ParameterError("start vector is zero")
    V = np.zeros((m + 1, n))
    H = np.zeros((m + 1, m + 1))
    V[0] = v / nrm
    start = 0
    nmv = 0
    best = math.inf
    scale = 0.0

    def ritz(j_dim: int):
        evals, Y = np.linalg.eigh(H[:j_dim, :j_dim])
        x = Y[:, -1] @ V[:j_dim]
        x /= np.linalg.norm(x)
        r = matvec(x) - evals[-1] * x
        gap = float(evals[-1] - evals[-2]) if evals.size > 1 else math.inf
        return float(evals[-1]), x, float(np.linalg.norm(r)), gap

    while True:
        j = start
        while j < m:
            w = matvec(V[j])
            nmv += 1
            basis = V[:j + 1]
            h = basis @ w
            w -= h @ basis
            h2 = basis @ w
            w -= h2 @ basis
            h += h2
            H[:j + 1, j] = h
            H[j, :j + 1] = h
            beta = float(np.linalg.norm(w))
            scale = max(scale, abs(float(h[j])), beta)
            H[j + 1, j] = H[j, j + 1] = beta
            if beta <= 1e-13 * max(scale, 1.0):
                # Krylov space exhausted: the Ritz pair is exact up to rounding
                lam, x, res, gap = ritz(j + 1)
                nmv += 1
                if res <= tol:
                    return EigenResult(lam, x, res, nmv, gap)
                best = min(best, res)
                if nmv >= max_iter:
                    raise ConvergenceError(
                        f"Lanczos stalled with residual {best:.3e}", best)
                V[:] = 0.0
                H[:] = 0.0
                V[0] = x
                start = 0
                break
            V[j + 1] = w / beta
            if j == m - 1 or (j - start) % 4 == 3 or nmv >= max_iter:
                evals, Y = np.linalg.eigh(H[:j + 1, :j + 1])
                est = beta * abs(Y[j, -1])
                best = min(best, est)
                if est <= 0.5 * tol:
                    lam, x, res, gap = ritz(j + 1)
                    nmv += 1
                    if res <= tol:
                        return EigenResult(lam, x, res, nmv, gap)
                    best = min(best, res)
                if nmv >= max_iter:
                    raise ConvergenceError(
                        f"Lanczos did not converge in {max_iter} operator applications "
                        f"(best residual {best:.3e})", best)
            j += 1
        else:
            # thick restart: keep the top Ritz vectors plus the residual direction
            evals, Y = np.linalg.eigh(H[:m, :m])
            top = np.arange(m - k_keep, m)
            coupling = H[m, m - 1] * Y[m - 1, top]
            kept = Y[:, top].T @ V[:m]
            residual_dir = V[m].copy()
            V[:] = 0.0
            H[:] = 0.0
            V[:k_keep] = kept
            V[k_keep] = residual_dir
            H[top - top[0], top - top[0]] = evals[top]
            H[k_keep, :k_keep] = coupling
            H[:k_keep, k_keep] = coupling
            start = k_keep
