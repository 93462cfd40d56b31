"""Spectral bisection with the modularity matrix ``B = A - theta c c^T / K``.

The operator is applied matrix-free. The leading eigenvector is rescaled to
``sum x_i^2 = N`` and the graph is split by the signs of its entries; when
all nonzero entries share one sign the graph is reported as unpartitioned.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import IO, Any

import numpy as np
from scipy.sparse.csgraph import connected_components

from .ensembles import Graph
from .errors import DegenerateVectorError, OperatorError, ParameterError
from .lanczos import EigenResult, lanczos_largest

__all__ = [
    "ModularityOperator",
    "NormalizedAdjacencyOperator",
    "SpectralOutcome",
    "LaplacianGap",
    "modularity_matvec",
    "leading_eigenpair",
    "second_smallest_normalized_laplacian",
    "partition_from_vector",
    "overlap",
    "ipr",
    "ones_alignment",
    "spectral_bisection",
    "write_eigenvector",
    "read_eigenvector",
]

ZERO_RULE = "exact zeros join the majority sign, ties to label 1"


class ModularityOperator:
    """Matrix-free modularity matrix of ``graph`` at resolution ``theta``."""

    def __init__(self, graph: Graph, theta: float = 1.0):
        if graph.total_degree == 0:
            raise OperatorError("modularity matrix undefined for a graph without edges (K = 0)")
        if not theta > 0:
            raise ParameterError("theta must be positive")
        self.graph = graph
        self.theta = float(theta)
        self._a = graph.adjacency
        self._c = graph.degrees.astype(float)
        self._k = float(graph.total_degree)

    @property
    def n(self) -> int:
        return self.graph.n_nodes

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def support(self) -> np.ndarray:
        """Mask of non-isolated nodes; B vanishes on the rest."""
        return self._c > 0

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ParameterError(f"vector of length {x.shape} for operator of size {self.n}")
        return self._a @ x - (self.theta * float(self._c @ x) / self._k) * self._c

    __call__ = matvec

    def dense(self) -> np.ndarray:
        """Dense copy, for small-instance checks only."""
        return self._a.toarray() - self.theta * np.outer(self._c, self._c) / self._k


def modularity_matvec(op: ModularityOperator, x: np.ndarray) -> np.ndarray:
    return op.matvec(x)


class NormalizedAdjacencyOperator:
    """``D^{-1/2} A D^{-1/2}`` on the non-isolated nodes, Perron vector shifted to -1."""

    def __init__(self, graph: Graph):
        deg = graph.degrees
        self.nodes = np.flatnonzero(deg > 0)
        sub = graph.adjacency[self.nodes][:, self.nodes]
        d = deg[self.nodes].astype(float)
        inv_sqrt = 1.0 / np.sqrt(d)
        self._m = sub.multiply(inv_sqrt[:, None]).multiply(inv_sqrt[None, :]).tocsr()
        self._perron = np.sqrt(d) / math.sqrt(d.sum())

    @property
    def n(self) -> int:
        return self.nodes.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._m @ x - 2.0 * float(self._perron @ x) * self._perron


def leading_eigenpair(
    op: Any,
    tol: float = 1e-8,
    max_iter: int | None = None,
    seed: int = 0,
    v0: np.ndarray | None = None,
) -> tuple[float, np.ndarray, EigenResult]:
    """Largest algebraic eigenpair of a symmetric operator.

    ``op`` is anything with ``matvec`` and ``n`` (or ``shape``), or a dense
    symmetric array. The returned vector satisfies ``sum x_i^2 = N`` and its
    largest-magnitude entry (lowest index on ties) is positive.
    """
    if isinstance(op, np.ndarray):
        mat = op
        n = mat.shape[0]
        matvec = mat.__matmul__
    else:
        n = op.n if hasattr(op, "n") else op.shape[0]
        matvec = op.matvec
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    if v0 is None:
        v0 = rng.standard_normal(n)
        support = getattr(op, "support", None)
        if support is not None and support.any():
            # isolated coordinates stay exactly zero along the whole Krylov sequence
            v0 = np.where(support, v0, 0.0)
    res = lanczos_largest(matvec, n, tol=tol, max_iter=max_iter, v0=v0, rng=rng)
    value, x = res.value, res.vector
    support = getattr(op, "support", None)
    if support is not None and not support.all() and value < 0.0:
        # the null block (isolated nodes) carries eigenvalue 0, which now leads
        x = np.where(support, 0.0, 1.0)
        x /= np.linalg.norm(x)
        value = 0.0
        res = EigenResult(0.0, x, float(np.linalg.norm(matvec(x))), res.matvecs + 1, abs(res.value))
    x = x * math.sqrt(n) / np.linalg.norm(x)
    if x[int(np.argmax(np.abs(x)))] < 0:
        x = -x
    return value, x, res


@dataclass
class LaplacianGap:
    lambda2: float
    cheeger_lower_bound: float   # lambda2 / 2, lower bound on the optimal normalized cut
    disconnected: bool


def second_smallest_normalized_laplacian(g: Graph, tol: float = 1e-8, seed: int = 0) -> LaplacianGap:
    """Second-smallest eigenvalue of ``I - D^{-1/2} A D^{-1/2}`` over non-isolated nodes."""
    active = np.flatnonzero(g.degrees > 0)
    if active.size < 2:
        raise ParameterError("normalized Laplacian needs at least two non-isolated nodes")
    n_comp, _ = connected_components(g.adjacency[active][:, active], directed=False)
    if n_comp > 1:
        return LaplacianGap(0.0, 0.0, True)
    op = NormalizedAdjacencyOperator(g)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    res = lanczos_largest(op.matvec, op.n, tol=tol, rng=rng)
    lam2 = 1.0 - res.value
    return LaplacianGap(lam2, lam2 / 2.0, False)


def partition_from_vector(x: np.ndarray) -> tuple[np.ndarray, bool]:
    """Labels 1 (positive entry) and 2 (negative entry) plus the unpartitioned flag."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ParameterError("empty vector")
    pos = x > 0
    neg = x < 0
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())
    if n_pos == 0 and n_neg == 0:
        raise DegenerateVectorError("all-zero vector has no sign partition")
    labels = np.where(pos, 1, 2).astype(np.int8)
    zero_label = 1 if n_pos >= n_neg else 2
    labels[~(pos | neg)] = zero_label
    return labels, (n_pos == 0 or n_neg == 0)


def overlap(partition: np.ndarray, planted: np.ndarray) -> float:
    """Fraction of correctly classified nodes, maximized over the label swap."""
    partition = np.asarray(partition)
    planted = np.asarray(planted)
    if partition.shape != planted.shape:
        raise ParameterError("partition and planted labels differ in length")
    agree = int(np.count_nonzero(partition == planted))
    return max(agree, partition.size - agree) / partition.size


def ipr(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    s2 = float(np.dot(x, x))
    if s2 == 0.0:
        raise DegenerateVectorError("IPR of the zero vector")
    return float(np.sum(x ** 4) / (s2 * s2))


def ones_alignment(x: np.ndarray) -> float:
    """``|<1|x>| / N`` for ``x`` normalized to ``sum x_i^2 = N``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    return abs(float(x.sum())) * math.sqrt(n) / (n * float(np.linalg.norm(x)))


@dataclass
class SpectralOutcome:
    lambda1: float
    vector: np.ndarray
    residual: float
    partition: np.ndarray
    unpartitioned: bool
    overlap: float | None
    ipr: float
    ones_alignment: float
    degenerate: bool = False
    matvecs: int = 0

    def summary(self) -> dict[str, Any]:
        return {
            "lambda1": self.lambda1,
            "residual": self.residual,
            "overlap": self.overlap,
            "ipr": self.ipr,
            "unpartitioned": self.unpartitioned,
            "ones_alignment": self.ones_alignment,
            "degenerate": self.degenerate,
            "matvecs": self.matvecs,
            "zero_entry_rule": ZERO_RULE,
        }


def spectral_bisection(
    g: Graph,
    theta: float = 1.0,
    tol: float = 1e-8,
    seed: int = 0,
    max_iter: int | None = None,
) -> SpectralOutcome:
    """Leading eigenpair of the modularity matrix and the statistics derived from it."""
    op = ModularityOperator(g, theta)
    lam, x, res = leading_eigenpair(op, tol=tol, max_iter=max_iter, seed=seed)
    labels, unpart = partition_from_vector(x)
    ov = overlap(labels, g.planted_labels) if g.planted_labels is not None else None
    return SpectralOutcome(
        lambda1=lam,
        vector=x,
        residual=res.residual,
        partition=labels,
        unpartitioned=unpart,
        overlap=ov,
        ipr=ipr(x),
        ones_alignment=ones_alignment(x),
        degenerate=res.degenerate(tol),
        matvecs=res.matvecs,
    )


def write_eigenvector(dest: str | os.PathLike | IO[str], lam: float, residual: float, x: np.ndarray) -> None:
    lines = [f"# lambda={lam:.17g} residual={residual:.17g} n={len(x)}"]
    lines.extend(f"{v:.17g}" for v in np.asarray(x, dtype=float))
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)  # type: ignore[union-attr]
    else:
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def read_eigenvector(src: str | os.PathLike) -> tuple[float, float, np.ndarray]:
    with open(src, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# lambda="):
            raise ParameterError("missing eigenvector header")
        fields = dict(tok.split("=", 1) for tok in header[2:].split())
        x = np.array([float(line) for line in fh if line.strip()])
    if x.size != int(fields["n"]):
        raise ParameterError("eigenvector length disagrees with header")
    return float(fields["lambda"]), float(fields["residual"]), x
