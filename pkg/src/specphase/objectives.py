"""Discrete bisection objectives evaluated exactly.

Counts (``s^T A s``, ``c^T s``, cut sizes, volumes) are integers; the
resolution parameter may be an ``int`` or a :class:`fractions.Fraction`, in
which case every comparison stays exact. Floats only appear in the final
ratio when a float ``theta`` is passed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Literal, Union

import numpy as np

from .ensembles import Graph
from .errors import CapacityError, ConsistencyError, ParameterError, SingularPartitionError

__all__ = [
    "Bipartition",
    "SpinCounts",
    "OptimumSet",
    "EquivalenceCertificate",
    "modularity_q",
    "modularity_double_sum",
    "ncut",
    "spin_identities",
    "exhaustive_optima",
    "equivalence_certificate",
    "MAX_EXHAUSTIVE_N",
]

Number = Union[int, Fraction, float]
MAX_EXHAUSTIVE_N = 20
_CHUNK = 1 << 14


@dataclass(frozen=True)
class Bipartition:
    """Labels in {1, 2}; the spin of label 1 is +1."""

    labels: tuple[int, ...]
    unpartitioned: bool = False

    def __post_init__(self) -> None:
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise ParameterError("empty labeling")
        if any(x not in (1, 2) for x in labels):
            raise ParameterError("labels must be 1 or 2")
        object.__setattr__(self, "labels", labels)
        one_sided = len(set(labels)) == 1
        if one_sided and not self.unpartitioned:
            raise ParameterError("both sides must be nonempty unless flagged unpartitioned")
        if not one_sided and self.unpartitioned:
            raise ParameterError("labeling has two sides but is flagged unpartitioned")

    @classmethod
    def from_labels(cls, labels) -> Bipartition:
        labels = tuple(int(x) for x in labels)
        return cls(labels, unpartitioned=len(set(labels)) == 1)

    @classmethod
    def from_spins(cls, spins) -> Bipartition:
        return cls.from_labels(1 if int(s) > 0 else 2 for s in spins)

    @property
    def spin(self) -> np.ndarray:
        return np.where(np.asarray(self.labels) == 1, 1, -1).astype(np.int64)

    def canonical(self) -> tuple[int, ...]:
        """Labeling with node 0 on side 1 (quotient by the global swap)."""
        if self.labels[0] == 1:
            return self.labels
        return tuple(3 - x for x in self.labels)

    def __len__(self) -> int:
        return len(self.labels)


def _exact(theta: Number) -> bool:
    return isinstance(theta, Rational)


def _spin_counts(g: Graph, s: np.ndarray) -> tuple[int, int]:
    if s.shape != (g.n_nodes,):
        raise ParameterError("labeling length differs from the number of nodes")
    sas = int(s @ (g.adjacency @ s.astype(float)).round().astype(np.int64))
    cs = int(g.degrees @ s)
    return sas, cs


def modularity_q(g: Graph, part: Bipartition, theta: Number = 1) -> Number:
    """Spin form ``s^T A s - theta (c^T s)^2 / K``.

    Exact (``Fraction``) for rational ``theta``; float otherwise.
    """
    k = g.total_degree
    if k == 0:
        raise ParameterError("modularity undefined without edges")
    sas, cs = _spin_counts(g, part.spin)
    if _exact(theta):
        return sas - Fraction(theta) * cs * cs / k
    return sas - float(theta) * cs * cs / k


def modularity_double_sum(g: Graph, part: Bipartition, theta: Number = 1) -> Number:
    """Sum over both sides of ``A_ij - theta c_i c_j / K`` over ordered pairs in one side."""
    k = g.total_degree
    lab = np.asarray(part.labels)
    a = g.adjacency
    total: Number = Fraction(0) if _exact(theta) else 0.0
    coeff = Fraction(theta) if _exact(theta) else float(theta)
    for side in (1, 2):
        idx = np.flatnonzero(lab == side)
        internal = int(a[idx][:, idx].sum())
        vol = int(g.degrees[idx].sum())
        total += internal - coeff * vol * vol / k
    return total


@dataclass(frozen=True)
class SpinCounts:
    cut: int
    k1: int
    k2: int
    cut_from_spins: int
    k1_from_spins: int
    k2_from_spins: int


def _direct_counts(g: Graph, lab: np.ndarray) -> tuple[int, int, int]:
    u, v = g.edges()
    cut = int(np.count_nonzero(lab[u] != lab[v]))
    deg = g.degrees
    return cut, int(deg[lab == 1].sum()), int(deg[lab == 2].sum())


def spin_identities(g: Graph, part: Bipartition) -> SpinCounts:
    """Cut and volumes counted directly and through the spin relations; must agree exactly."""
    lab = np.asarray(part.labels)
    cut, k1, k2 = _direct_counts(g, lab)
    sas, cs = _spin_counts(g, part.spin)
    k = g.total_degree
    num_cut, num_k1, num_k2 = k - sas, k + cs, k - cs
    if num_cut % 4 or num_k1 % 2 or num_k2 % 2:
        raise ConsistencyError("spin counts have the wrong parity")
    rec = SpinCounts(cut, k1, k2, num_cut // 4, num_k1 // 2, num_k2 // 2)
    if (rec.cut, rec.k1, rec.k2) != (rec.cut_from_spins, rec.k1_from_spins, rec.k2_from_spins):
        raise ConsistencyError(f"spin relations violated: {rec}")
    return rec


def ncut(g: Graph, part: Bipartition) -> Fraction:
    """``K |E(S1, S2)| / (K1 K2)`` as an exact fraction."""
    cut, k1, k2 = _direct_counts(g, np.asarray(part.labels))
    if k1 == 0 or k2 == 0:
        raise SingularPartitionError("a side has zero volume; the normalized cut is singular")
    return Fraction(g.total_degree * cut, k1 * k2)


# --------------------------------------------------------------------------------------
# exhaustive enumeration
# --------------------------------------------------------------------------------------


@dataclass
class OptimumSet:
    objective: str
    value: Number
    labelings: frozenset[tuple[int, ...]]   # canonical: node 0 carries label 1
    n_evaluated: int

    def __len__(self) -> int:
        return len(self.labelings)


def _enumerate(g: Graph, include_unpartitioned: bool):
    """Yield (spins, sAs, c.s) blocks over all labelings with node 0 fixed to +1."""
    n = g.n_nodes
    a = g.adjacency.toarray().astype(np.int64)
    deg = g.degrees.astype(np.int64)
    total = 1 << (n - 1)
    start = 0 if include_unpartitioned else 1
    bits = np.arange(n - 1, dtype=np.int64)
    for lo in range(start, total, _CHUNK):
        codes = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        flips = (codes[:, None] >> bits) & 1
        s = np.ones((codes.size, n), dtype=np.int64)
        s[:, 1:] -= 2 * flips
        sas = np.einsum("ij,ij->i", s @ a, s)
        cs = s @ deg
        yield s, sas, cs


def _labels(s_row: np.ndarray) -> tuple[int, ...]:
    return tuple(1 if x > 0 else 2 for x in s_row)


def _labels_from_code(code: int, n: int) -> tuple[int, ...]:
    return (1,) + tuple(2 if (code >> b) & 1 else 1 for b in range(n - 1))


def exhaustive_optima(
    g: Graph,
    objective: Literal["modularity", "ncut"] = "ncut",
    theta: Number = 1,
    include_unpartitioned: bool = False,
) -> OptimumSet:
    """All optimal bipartitions by enumeration of the ``2^(N-1) - 1`` proper labelings.

    ``objective="ncut"`` minimizes the normalized cut; ``"modularity"``
    maximizes ``Q_theta``. Ties are returned in full. With a rational
    ``theta`` the optimum set is exact; with a float it uses a relative tie
    tolerance of 1e-12.
    """
    n = g.n_nodes
    if n > MAX_EXHAUSTIVE_N:
        raise CapacityError(f"exhaustive enumeration limited to N <= {MAX_EXHAUSTIVE_N}, got {n}")
    if n < 2:
        raise ParameterError("need at least two nodes to bisect")
    k = g.total_degree
    if k == 0:
        raise ParameterError("objectives undefined without edges")
    if objective == "ncut":
        if include_unpartitioned:
            raise SingularPartitionError("the unpartitioned labeling is singular for the normalized cut")
        return _exhaustive_ncut(g)
    if objective != "modularity":
        raise ParameterError(f"unknown objective {objective!r}")
    if not (theta > 0):
        raise ParameterError("theta must be positive")

    best = None
    winners: list[tuple[int, ...]] = []
    count = 0
    if _exact(theta):
        th = Fraction(theta)
        p, q = th.numerator, th.denominator
        for s, sas, cs in _enumerate(g, include_unpartitioned):
            count += len(sas)
            # K q Q = K q sAs - p (c.s)^2, integer-valued
            scaled = [k * q * int(x) - p * int(y) * int(y) for x, y in zip(sas, cs)]
            m = max(scaled)
            if best is None or m > best:
                best, winners = m, []
            if m == best:
                winners.extend(_labels(s[i]) for i, v in enumerate(scaled) if v == m)
        value: Number = Fraction(best, k * q)
    else:
        th_f = float(theta)
        vals = np.concatenate([sas - th_f * cs.astype(float) ** 2 / k
                               for _, sas, cs in _enumerate(g, include_unpartitioned)])
        count = vals.size
        best = float(vals.max())
        offset = 0 if include_unpartitioned else 1
        hits = np.flatnonzero(vals >= best - 1e-12 * max(1.0, abs(best))) + offset
        winners = [_labels_from_code(int(c), n) for c in hits]
        value = best
    return OptimumSet("modularity", value, frozenset(winners), count)


def _exhaustive_ncut(g: Graph) -> OptimumSet:
    k = g.total_degree
    cand: list[tuple[Fraction, tuple[int, ...]]] = []
    best_f = np.inf
    count = 0
    for s, sas, cs in _enumerate(g, False):
        count += len(sas)
        k1 = (k + cs) // 2
        k2 = (k - cs) // 2
        cut = (k - sas) // 4
        ok = (k1 > 0) & (k2 > 0)
        vals = np.full(len(sas), np.inf)
        vals[ok] = k * cut[ok] / (k1[ok] * k2[ok])
        m = float(vals.min())
        if m < np.inf:
            best_f = min(best_f, m)
            # generous float screen; exact comparison below decides
            near = np.flatnonzero(vals <= best_f + 1e-9 * max(1.0, best_f))
            cand.extend((Fraction(int(k * cut[i]), int(k1[i] * k2[i])), _labels(s[i])) for i in near)
            cand = [c for c in cand if float(c[0]) <= best_f + 1e-9 * max(1.0, best_f)]
    if not cand:
        raise SingularPartitionError("every proper bipartition has a zero-volume side")
    exact_min = min(c[0] for c in cand)
    winners = frozenset(lab for v, lab in cand if v == exact_min)
    return OptimumSet("ncut", exact_min, winners, count)


@dataclass
class EquivalenceCertificate:
    """Outcome of checking that min ncut and max Q at theta* pick the same bipartitions."""

    theta_star: Fraction
    ncut_optima: frozenset[tuple[int, ...]]
    modularity_optima: frozenset[tuple[int, ...]]
    max_modularity: Fraction
    inequality_holds: bool            # sAs - theta* (c.s)^2 / K <= K (1 - theta*) everywhere
    equality_set: frozenset[tuple[int, ...]] = field(default_factory=frozenset)

    @property
    def sets_equal(self) -> bool:
        return self.ncut_optima == self.modularity_optima

    @property
    def equality_exactly_on_optima(self) -> bool:
        return self.equality_set == self.ncut_optima

    @property
    def holds(self) -> bool:
        return self.sets_equal and self.inequality_holds and self.equality_exactly_on_optima


def equivalence_certificate(g: Graph) -> EquivalenceCertificate:
    """Exact check of the ncut / resolution-modularity equivalence on a small graph."""
    nc = exhaustive_optima(g, "ncut")
    theta_star = Fraction(nc.value)
    mod = exhaustive_optima(g, "modularity", theta_star)
    k = g.total_degree
    p, q = theta_star.numerator, theta_star.denominator
    rhs = k * k * (q - p)   # K q * K (1 - theta*)
    holds = True
    equal: list[tuple[int, ...]] = []
    for s, sas, cs in _enumerate(g, False):
        lhs = [k * q * int(x) - p * int(y) * int(y) for x, y in zip(sas, cs)]
        for i, v in enumerate(lhs):
            if v > rhs:
                holds = False
            elif v == rhs:
                equal.append(_labels(s[i]))
    return EquivalenceCertificate(
        theta_star=theta_star,
        ncut_optima=nc.labelings,
        modularity_optima=mod.labelings,
        max_modularity=Fraction(mod.value),
        inequality_holds=holds,
        equality_set=frozenset(equal),
    )
