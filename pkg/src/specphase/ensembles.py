"""Planted two-block random graph ensembles.

Two generators are provided:

* :func:`gen_planted_regular` -- every node has degree exactly ``c`` and
  exactly ``round(gamma * N)`` edges cross the two planted blocks.
* :func:`gen_sbm` -- the sparse stochastic block model, pairs connected
  independently with probability ``c_in / N`` (same block) or
  ``c_out / N`` (different blocks).

Block 1 always occupies node indices ``[0, round(p1 * N))``.
"""

from __future__ import annotations

import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Any, Union

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, GenerationError, InfeasibleError, ParameterError

__all__ = [
    "DegreeDistribution",
    "Regular",
    "SBM",
    "PlantedSpec",
    "Graph",
    "StructureValues",
    "gen_planted_regular",
    "gen_sbm",
    "generate",
    "structure_conversions",
    "sbm_rates",
    "sbm_structure",
    "empirical_degree_distribution",
    "write_edge_list",
    "read_edge_list",
    "EdgeListFormatError",
    "derive_seed",
]


# --------------------------------------------------------------------------------------
# Degree distributions
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeDistribution:
    """Finite-support degree distribution ``{(c_t, b_t)}``.

    ``metadata`` carries provenance such as the truncation point of a Poisson
    distribution; it does not take part in equality.
    """

    degrees: tuple[int, ...]
    weights: tuple[float, ...]
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        degrees = tuple(int(c) for c in self.degrees)
        weights = tuple(float(b) for b in self.weights)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "weights", weights)
        if not degrees or len(degrees) != len(weights):
            raise ParameterError("degree distribution needs matching, nonempty degrees and weights")
        if degrees[0] < 1 or any(b <= a for a, b in zip(degrees, degrees[1:])):
            raise ParameterError("degrees must be strictly increasing and >= 1")
        if any(not (b > 0.0) for b in weights):
            raise ParameterError("all weights must be positive")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise ParameterError(f"weights sum to {math.fsum(weights)!r}, not 1")

    @classmethod
    def regular(cls, c: int) -> DegreeDistribution:
        return cls((int(c),), (1.0,))

    @classmethod
    def from_counts(cls, counts: dict[int, int], **metadata: Any) -> DegreeDistribution:
        total = sum(counts.values())
        degrees = sorted(counts)
        return cls(tuple(degrees), tuple(counts[c] / total for c in degrees), dict(metadata))

    @cached_property
    def c(self) -> np.ndarray:
        return np.asarray(self.degrees, dtype=float)

    @cached_property
    def b(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def mean_degree(self) -> float:
        return math.fsum(b * c for b, c in zip(self.weights, self.degrees))

    @property
    def max_degree(self) -> int:
        return self.degrees[-1]

    @property
    def is_regular(self) -> bool:
        return len(self.degrees) == 1


# --------------------------------------------------------------------------------------
# Planted specifications
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Regular:
    c: int

    def __post_init__(self) -> None:
        if int(self.c) != self.c or self.c < 3:
            raise ParameterError(f"regular degree must be an integer >= 3, got {self.c}")


@dataclass(frozen=True)
class SBM:
    c_in: float
    c_out: float

    def __post_init__(self) -> None:
        if self.c_out < 0 or self.c_in < 0:
            raise ParameterError("c_in and c_out must be nonnegative")


@dataclass(frozen=True)
class PlantedSpec:
    """Parameters of one planted two-block graph.

    ``structure`` is the structure strength Gamma and is only used by the
    regular ensemble.
    """

    n_nodes: int
    p1: float
    kind: Union[Regular, SBM]
    structure: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ParameterError("n_nodes must be positive")
        if not 0.0 < self.p1 < 1.0:
            raise ParameterError("p1 must lie in (0, 1)")
        if isinstance(self.kind, Regular):
            if self.structure is None or not 0.0 <= self.structure <= 1.0:
                raise ParameterError("regular ensemble needs structure Gamma in [0, 1]")

    @property
    def n1(self) -> int:
        return round(self.p1 * self.n_nodes)

    def describe(self) -> str:
        if isinstance(self.kind, Regular):
            return (f"regular(N={self.n_nodes},c={self.kind.c},p1={self.p1!r},"
                    f"Gamma={self.structure!r},seed={self.seed})")
        return (f"sbm(N={self.n_nodes},c_in={self.kind.c_in!r},c_out={self.kind.c_out!r},"
                f"p1={self.p1!r},seed={self.seed})")


def derive_seed(base_seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed ``h(base_seed, *key)``."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# --------------------------------------------------------------------------------------
# Graph container
# --------------------------------------------------------------------------------------


@dataclass(eq=False)
class Graph:
    """Simple undirected graph in CSR form with sorted neighbor lists."""

    n_nodes: int
    indptr: np.ndarray
    indices: np.ndarray
    planted_labels: np.ndarray | None = None
    provenance: PlantedSpec | str = "external"

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        u: np.ndarray,
        v: np.ndarray,
        planted_labels: np.ndarray | None = None,
        provenance: PlantedSpec | str = "external",
    ) -> Graph:
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape != v.shape:
            raise ParameterError("edge endpoint arrays differ in length")
        if u.size:
            if min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n_nodes:
                raise ParameterError("edge endpoint out of range")
            if np.any(u == v):
                raise ParameterError("self-loops are not allowed")
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            if np.unique(lo * n_nodes + hi).size != lo.size:
                raise ParameterError("duplicate edges are not allowed")
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_nodes), out=indptr[1:])
        if planted_labels is not None:
            planted_labels = np.asarray(planted_labels, dtype=np.int8)
            if planted_labels.shape != (n_nodes,) or not np.all(np.isin(planted_labels, (1, 2))):
                raise ParameterError("planted labels must be N values in {1, 2}")
        return cls(n_nodes, indptr, cols, planted_labels, provenance)

    @classmethod
    def from_pairs(cls, n_nodes: int, pairs, planted_labels=None, provenance="external") -> Graph:
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls.from_edges(n_nodes, arr[:, 0], arr[:, 1], planted_labels, provenance)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def total_degree(self) -> int:
        return int(self.indptr[-1])

    @property
    def n_edges(self) -> int:
        return self.total_degree // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints ``(u, v)`` with ``u < v``, sorted lexicographically."""
        rows = np.repeat(np.arange(self.n_nodes, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return rows[keep], self.indices[keep]

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=float)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n_nodes,) * 2)

    def cross_edge_count(self) -> int:
        if self.planted_labels is None:
            raise ParameterError("graph has no planted labels")
        u, v = self.edges()
        return int(np.count_nonzero(self.planted_labels[u] != self.planted_labels[v]))

    def same_edges(self, other: Graph) -> bool:
        return (self.n_nodes == other.n_nodes
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))


# --------------------------------------------------------------------------------------
# Structure parameterizations
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class StructureValues:
    gamma_struct: float   # Gamma
    gamma: float          # cross edges per node
    cin_minus_cout: float
    c_in: float
    c_out: float


def structure_conversions(
    c_bar: float,
    p1: float,
    *,
    gamma_struct: float | None = None,
    gamma: float | None = None,
    cin_minus_cout: float | None = None,
) -> StructureValues:
    """Convert between Gamma, gamma and ``c_in - c_out``; give exactly one.

    ``c_out = gamma / (p1 p2)`` and ``c_in = (c_bar - 2 gamma) / (p1^2 + p2^2)``,
    which reduces to ``c_in - c_out = 2 c_bar Gamma`` for equal blocks.
    """
    given = [x is not None for x in (gamma_struct, gamma, cin_minus_cout)]
    if sum(given) != 1:
        raise ParameterError("give exactly one of gamma_struct, gamma, cin_minus_cout")
    if c_bar <= 0 or not 0.0 < p1 < 1.0:
        raise ParameterError("need c_bar > 0 and p1 in (0, 1)")
    p2 = 1.0 - p1
    pp = p1 * p2
    ss = p1 * p1 + p2 * p2
    if gamma_struct is not None:
        if gamma_struct > 1.0:
            raise DomainError(f"Gamma={gamma_struct} > 1 implies c_out < 0")
        if gamma_struct < 0.0:
            raise ParameterError("Gamma must lie in [0, 1]")
        gamma = c_bar * pp * (1.0 - gamma_struct)
    elif cin_minus_cout is not None:
        # c_out >= 0 requires c_in - c_out <= c_bar / (p1^2 + p2^2), i.e. 2 c_bar at p1 = 1/2
        gamma = (c_bar / ss - cin_minus_cout) / (2.0 / ss + 1.0 / pp)
        if gamma < 0.0:
            raise DomainError(f"c_in - c_out = {cin_minus_cout} implies c_out < 0")
    assert gamma is not None
    if gamma < 0.0:
        raise ParameterError("gamma must be nonnegative")
    c_out = gamma / pp
    c_in = (c_bar - 2.0 * gamma) / ss
    if c_in < 0.0:
        raise DomainError("implied c_in is negative")
    if gamma_struct is None:
        gamma_struct = 1.0 - gamma / (c_bar * pp)
        if gamma_struct < 0.0:
            # a few ulps below zero is round-off from the c_in - c_out route
            if gamma_struct < -1e-12:
                raise ParameterError("implied Gamma is negative")
            gamma_struct = 0.0
    if cin_minus_cout is None:
        cin_minus_cout = c_in - c_out
    return StructureValues(gamma_struct, gamma, cin_minus_cout, c_in, c_out)


def sbm_rates(c_bar: float, gamma_struct: float, p1: float = 0.5) -> tuple[float, float]:
    """``(c_in, c_out)`` of the SBM with mean degree ``c_bar`` and strength Gamma."""
    sv = structure_conversions(c_bar, p1, gamma_struct=gamma_struct)
    return sv.c_in, sv.c_out


def sbm_structure(c_in: float, c_out: float, p1: float = 0.5) -> tuple[float, float]:
    """Expected mean degree and Gamma of an SBM with rates ``c_in, c_out``."""
    p2 = 1.0 - p1
    c_bar = c_in * (p1 * p1 + p2 * p2) + 2.0 * c_out * p1 * p2
    if c_bar <= 0:
        raise ParameterError("SBM with c_in = c_out = 0 has no structure")
    return c_bar, 1.0 - c_out / c_bar


# --------------------------------------------------------------------------------------
# Regular planted generator
# --------------------------------------------------------------------------------------

_MAX_REGENERATIONS = 20


def _cross_edge_target(c: int, n1: int, n2: int, p1: float, gamma_struct: float) -> int:
    n = n1 + n2
    gamma = c * p1 * (1.0 - p1) * (1.0 - gamma_struct)
    m = round(gamma * n)
    if (n1 * c - m) % 2:
        # n1 c and n2 c share parity because c N is even, so one shift fixes both
        if m > 0:
            m -= 1
        elif gamma > 0.0:
            m += 1
        else:
            raise InfeasibleError(
                f"intra-block stub count n1*c = {n1 * c} is odd and Gamma = 1 forbids cross edges")
    return m


def _check_regular_feasible(c: int, n1: int, n2: int, m: int) -> None:
    if c > n1 + n2 - 1:
        raise InfeasibleError(f"degree {c} exceeds N - 1")
    if m > n1 * c or m > n2 * c:
        raise InfeasibleError(f"{m} cross edges exceed the stubs of a block")
    if m > n1 * n2:
        raise InfeasibleError(f"{m} cross edges exceed the {n1 * n2} distinct cross pairs")
    for name, nr in (("block 1", n1), ("block 2", n2)):
        # a node keeps at most n_r - 1 stubs inside its block
        deficit = nr * max(0, c - (nr - 1))
        if m < deficit:
            raise InfeasibleError(
                f"{name} has {nr} nodes: degree {c} needs at least {deficit} cross edges, "
                f"only {m} available")


def _repair(edges: np.ndarray, rng: np.random.Generator, budget: int, cross: bool) -> bool:
    """Remove self-loops and multi-edges by degree-preserving endpoint swaps.

    For cross-block edges column 0 stays in block 1 and column 1 in block 2.
    Returns False when the swap budget is exhausted first.
    """
    n_e = edges.shape[0]
    if n_e == 0:
        return True
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    keys = lo * (int(edges.max()) + 1) + hi
    _, first = np.unique(keys, return_index=True)
    is_bad = np.ones(n_e, dtype=bool)
    is_bad[first] = False
    is_bad |= lo == hi
    bad = list(np.flatnonzero(is_bad))
    if not bad:
        return True

    def key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    counts = Counter(key(int(a), int(b)) for a, b in edges)
    attempts = 0
    while bad:
        i = bad[-1]
        a, b = int(edges[i, 0]), int(edges[i, 1])
        if a != b and counts[key(a, b)] == 1:
            bad.pop()
            continue
        if attempts >= budget:
            return False
        attempts += 1
        j = int(rng.integers(n_e))
        if j == i:
            continue
        x, y = int(edges[j, 0]), int(edges[j, 1])
        if cross:
            e1, e2 = (a, y), (x, b)
        elif rng.random() < 0.5:
            e1, e2 = (a, x), (b, y)
        else:
            e1, e2 = (a, y), (b, x)
        if e1[0] == e1[1] or e2[0] == e2[1]:
            continue
        k1, k2 = key(*e1), key(*e2)
        if k1 == k2:
            continue
        old1, old2 = key(a, b), key(x, y)
        counts[old1] -= 1
        counts[old2] -= 1
        if counts[k1] == 0 and counts[k2] == 0:
            counts[k1] += 1
            counts[k2] += 1
            edges[i] = e1
            edges[j] = e2
        else:
            counts[old1] += 1
            counts[old2] += 1
    return True


def gen_planted_regular(spec: PlantedSpec) -> Graph:
    """Random ``c``-regular graph with exactly ``round(gamma N)`` cross edges.

    ``gamma = c p1 p2 (1 - Gamma)``. When the rounded count leaves an odd number
    of intra-block stubs it is shifted by one (downwards when possible).
    """
    if not isinstance(spec.kind, Regular):
        raise ParameterError("gen_planted_regular needs a Regular spec")
    c = int(spec.kind.c)
    n = spec.n_nodes
    if (c * n) % 2:
        raise InfeasibleError(f"c*N = {c * n} is odd: no {c}-regular graph on {n} nodes")
    n1 = spec.n1
    n2 = n - n1
    if n1 == 0 or n2 == 0:
        raise ParameterError("both planted blocks must be nonempty")
    assert spec.structure is not None
    m = _cross_edge_target(c, n1, n2, spec.p1, spec.structure)
    _check_regular_feasible(c, n1, n2, m)

    budget = 100 * n
    for attempt in range(_MAX_REGENERATIONS):
        ss = np.random.SeedSequence(int(spec.seed), spawn_key=(attempt,) if attempt else ())
        rng = np.random.default_rng(ss)
        stubs1 = np.repeat(np.arange(n1, dtype=np.int64), c)
        stubs2 = np.repeat(np.arange(n1, n, dtype=np.int64), c)
        sel1 = rng.choice(stubs1.size, size=m, replace=False)
        sel2 = rng.choice(stubs2.size, size=m, replace=False)
        cross = np.column_stack([stubs1[sel1], rng.permutation(stubs2[sel2])])
        rest1 = rng.permutation(np.delete(stubs1, sel1)).reshape(-1, 2)
        rest2 = rng.permutation(np.delete(stubs2, sel2)).reshape(-1, 2)
        if (_repair(cross, rng, budget, cross=True)
                and _repair(rest1, rng, budget, cross=False)
                and _repair(rest2, rng, budget, cross=False)):
            all_edges = np.concatenate([cross, rest1, rest2])
            labels = np.where(np.arange(n) < n1, 1, 2).astype(np.int8)
            return Graph.from_edges(n, all_edges[:, 0], all_edges[:, 1], labels, spec)
    raise GenerationError(
        f"stub matching failed {_MAX_REGENERATIONS} times for {spec.describe()}")


# --------------------------------------------------------------------------------------
# Stochastic block model
# --------------------------------------------------------------------------------------


def _skip_sample(n_pairs: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of successes among ``n_pairs`` Bernoulli(p) trials via geometric skips."""
    if n_pairs <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n_pairs, dtype=np.int64)
    log_q = math.log1p(-p)
    expected = n_pairs * p
    chunk = int(expected + 6.0 * math.sqrt(expected) + 16)
    pieces = []
    pos = -1
    while True:
        u = rng.random(chunk)
        gaps = np.floor(np.log1p(-u) / log_q)
        gaps = np.minimum(gaps, float(n_pairs)).astype(np.int64) + 1
        positions = pos + np.cumsum(gaps)
        if positions[-1] >= n_pairs:
            pieces.append(positions[positions < n_pairs])
            break
        pieces.append(positions)
        pos = int(positions[-1])
    return np.concatenate(pieces)


def _triangle_pairs(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invert ``idx = i (i - 1) / 2 + j`` with ``0 <= j < i``."""
    i = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(float))) / 2.0).astype(np.int64)
    i -= (i * (i - 1) // 2 > idx)
    i += ((i + 1) * i // 2 <= idx)
    return i, idx - i * (i - 1) // 2


def gen_sbm(spec: PlantedSpec) -> Graph:
    """Sparse two-block SBM; isolated nodes are kept."""
    if not isinstance(spec.kind, SBM):
        raise ParameterError("gen_sbm needs an SBM spec")
    n = spec.n_nodes
    p_in = spec.kind.c_in / n
    p_out = spec.kind.c_out / n
    if not (0.0 <= p_in <= 1.0 and 0.0 <= p_out <= 1.0):
        raise ParameterError(f"connection probabilities ({p_in}, {p_out}) outside [0, 1]")
    n1 = spec.n1
    n2 = n - n1
    rng = np.random.default_rng(np.random.SeedSequence(int(spec.seed)))
    us, vs = [], []
    for offset, size in ((0, n1), (n1, n2)):
        idx = _skip_sample(size * (size - 1) // 2, p_in, rng)
        i, j = _triangle_pairs(idx)
        us.append(offset + j)
        vs.append(offset + i)
    idx = _skip_sample(n1 * n2, p_out, rng)
    us.append(idx // max(n2, 1))
    vs.append(n1 + idx % max(n2, 1))
    labels = np.where(np.arange(n) < n1, 1, 2).astype(np.int8)
    return Graph.from_edges(n, np.concatenate(us), np.concatenate(vs), labels, spec)


def generate(spec: PlantedSpec) -> Graph:
    if isinstance(spec.kind, Regular):
        return gen_planted_regular(spec)
    return gen_sbm(spec)


def empirical_degree_distribution(g: Graph) -> DegreeDistribution:
    """Measured degree distribution over the non-isolated nodes.

    Isolated nodes carry no stubs and are dropped; their count is kept in
    ``metadata["n_isolated"]``.
    """
    if g.n_nodes == 0:
        raise ParameterError("empty graph")
    deg = g.degrees
    values, counts = np.unique(deg[deg > 0], return_counts=True)
    if values.size == 0:
        raise ParameterError("graph has no edges")
    n_iso = int(np.count_nonzero(deg == 0))
    return DegreeDistribution.from_counts(
        {int(c): int(k) for c, k in zip(values, counts)}, n_isolated=n_iso)


# --------------------------------------------------------------------------------------
# Edge-list I/O
# --------------------------------------------------------------------------------------


class EdgeListFormatError(ParameterError):
    pass


_HEADER = "# specphase-graph"


def _format_edge_list(g: Graph, labels: bool = True) -> str:
    u, v = g.edges()
    out = io.StringIO()
    out.write(f"{_HEADER} N={g.n_nodes} K={g.total_degree}\n")
    for a, b in zip(u.tolist(), v.tolist()):
        out.write(f"{a} {b}\n")
    if labels and g.planted_labels is not None:
        out.write("# labels\n")
        out.write("".join(f"{int(x)}\n" for x in g.planted_labels))
    return out.getvalue()


def write_edge_list(g: Graph, dest: str | os.PathLike | IO[str], labels: bool = True) -> None:
    text = _format_edge_list(g, labels)
    if hasattr(dest, "write"):
        dest.write(text)  # type: ignore[union-attr]
        return
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _parse_edge_list(text: str) -> Graph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith(_HEADER + " "):
        raise EdgeListFormatError("missing '# specphase-graph' header")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0][len(_HEADER):].split())
        n, k = int(fields["N"]), int(fields["K"])
    except (ValueError, KeyError) as exc:
        raise EdgeListFormatError(f"bad header line: {lines[0]!r}") from exc
    try:
        cut = lines.index("# labels")
    except ValueError:
        cut = len(lines)
    try:
        pairs = [tuple(map(int, ln.split())) for ln in lines[1:cut]]
    except ValueError as exc:
        raise EdgeListFormatError("edge lines must be two integers") from exc
    if any(len(p) != 2 for p in pairs):
        raise EdgeListFormatError("edge lines must be two integers")
    if any(not a < b for a, b in pairs) or pairs != sorted(pairs):
        raise EdgeListFormatError("edges must satisfy u < v and be sorted")
    if 2 * len(pairs) != k:
        raise EdgeListFormatError(f"header K={k} but {len(pairs)} edges listed")
    labels = None
    if cut < len(lines):
        raw = lines[cut + 1:]
        if len(raw) != n or any(x not in ("1", "2") for x in raw):
            raise EdgeListFormatError("labels section must hold N lines of 1 or 2")
        labels = np.array([int(x) for x in raw], dtype=np.int8)
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, arr[:, 0], arr[:, 1], labels, "external")


def read_edge_list(src: str | os.PathLike | IO[str]) -> Graph:
    if hasattr(src, "read"):
        return _parse_edge_list(src.read())  # type: ignore[union-attr]
    with open(src, encoding="utf-8", newline="") as fh:
        return _parse_edge_list(fh.read())
