"""Reproducible parameter sweeps over planted ensembles.

A sweep is a grid over one structure axis (Gamma or ``c_in - c_out``) and a
list of resolution values. Sample ``k`` at axis index ``j`` is generated from
``derive_seed(base_seed, j, k)``; the same graph serves every theta. Results
are merged in grid order, so the output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import signal
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Any, Iterable, Optional, Sequence

import numpy as np

from . import ema
from .ensembles import (
    SBM,
    DegreeDistribution,
    PlantedSpec,
    Regular,
    StructureValues,
    derive_seed,
    generate,
    structure_conversions,
)
from .errors import ParameterError, SpecPhaseError
from .spectral import second_smallest_normalized_laplacian, spectral_bisection

__all__ = [
    "SweepSpec",
    "parse_config",
    "run_sweep",
    "run_cell",
    "aggregate_rows",
    "sweep_columns",
    "ema_columns",
    "phase_grid",
    "PHASE_COLUMNS",
    "write_table",
    "format_value",
    "transition_midpoint",
]

OBSERVABLES = ("lambda1", "overlap", "ipr", "unpartitioned", "ones_alignment")
OUTPUT_KEYS = frozenset(OBSERVABLES[:-2] + ("unpartitioned_rate", "ones_alignment", "ema"))
PHASE_COLUMNS = ("gamma_struct", "theta", "phase", "phi", "lambda1", "a_hat", "m_hat_sq")

_STATIC_COLUMNS = ("ensemble", "spec_hash", "n", "c_bar", "p1", "theta", "gamma_struct",
                   "cin_minus_cout", "sample_index", "n_samples", "seed")


class CellTimeout(SpecPhaseError):
    pass


# --------------------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------------------


def parse_config(text: str) -> dict[str, list[str]]:
    """Flat ``key = value`` lines; repeated keys accumulate; ``#`` starts a comment."""
    out: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParameterError(f"config line {lineno}: empty key")
        out.setdefault(key.lower().replace("-", "_"), []).append(value)
    return out


def _one(cfg: dict[str, list[str]], key: str, default: Any = None) -> Any:
    vals = cfg.get(key)
    if not vals:
        if default is None:
            raise ParameterError(f"config is missing {key!r}")
        return default
    if len(vals) > 1:
        raise ParameterError(f"config key {key!r} given {len(vals)} times")
    return vals[0]


def _floats(values: Iterable[str]) -> tuple[float, ...]:
    out: list[float] = []
    for v in values:
        out.extend(float(x) for x in v.replace(",", " ").split())
    return tuple(out)


@dataclass(frozen=True)
class SweepSpec:
    ensemble: str                      # "regular" or "sbm"
    n_nodes: int
    degree: float                      # c for regular graphs, c_bar for the SBM
    p1: float = 0.5
    axis: str = "gamma"                # "gamma" (Gamma) or "cin_minus_cout"
    axis_min: float = 0.0
    axis_max: float = 1.0
    steps: int = 1
    thetas: tuple[float, ...] = (1.0,)
    samples: int = 1
    base_seed: int = 0
    outputs: frozenset[str] = OUTPUT_KEYS
    tol: float = 1e-8
    trunc_eps: Optional[float] = None  # Poisson truncation for EMA columns; None means 1/N
    cheeger: bool = False

    _KEYS = ("ensemble", "n", "c", "c_bar", "p1", "axis", "axis_min", "axis_max", "steps",
             "theta", "samples", "base_seed", "outputs", "tol", "trunc_eps", "cheeger")

    def __post_init__(self) -> None:
        if self.ensemble not in ("regular", "sbm"):
            raise ParameterError(f"unknown ensemble {self.ensemble!r}")
        if self.axis not in ("gamma", "cin_minus_cout"):
            raise ParameterError(f"unknown axis {self.axis!r}")
        if self.steps < 1 or self.samples < 1:
            raise ParameterError("steps and samples must be >= 1")
        if self.n_nodes < 2:
            raise ParameterError("n must be at least 2")
        if not self.thetas or any(not t > 0 for t in self.thetas):
            raise ParameterError("need at least one theta, all positive")
        if self.ensemble == "regular":
            Regular(int(self.degree))
            if int(self.degree) != self.degree:
                raise ParameterError("regular degree must be an integer")
        elif not self.degree > 0:
            raise ParameterError("c_bar must be positive")
        unknown = set(self.outputs) - OUTPUT_KEYS
        if unknown:
            raise ParameterError(f"unknown outputs {sorted(unknown)}")
        if self.axis_max < self.axis_min:
            raise ParameterError("axis_max < axis_min")
        # both ends must be valid structure values (c_out >= 0)
        self.structure(0)
        self.structure(self.steps - 1)

    @classmethod
    def from_config(cls, text: str, **overrides: Any) -> SweepSpec:
        cfg = parse_config(text)
        for key, value in overrides.items():
            if value is not None:
                cfg[key] = [str(v) for v in value] if isinstance(value, (list, tuple)) else [str(value)]
        unknown = set(cfg) - set(cls._KEYS)
        if unknown:
            raise ParameterError(f"unknown config keys {sorted(unknown)}")
        try:
            ensemble = _one(cfg, "ensemble").lower()
            degree_key = "c" if ensemble == "regular" else "c_bar"
            outputs = cfg.get("outputs")
            out_set = frozenset(x for v in outputs for x in v.replace(",", " ").split()) if outputs else OUTPUT_KEYS
            trunc = _one(cfg, "trunc_eps", "none")
            return cls(
                ensemble=ensemble,
                n_nodes=int(_one(cfg, "n")),
                degree=float(_one(cfg, degree_key)),
                p1=float(_one(cfg, "p1", "0.5")),
                axis=_one(cfg, "axis", "gamma").lower().replace("-", "_"),
                axis_min=float(_one(cfg, "axis_min")),
                axis_max=float(_one(cfg, "axis_max")),
                steps=int(_one(cfg, "steps", "1")),
                thetas=_floats(cfg.get("theta", ["1"])),
                samples=int(_one(cfg, "samples", "1")),
                base_seed=int(_one(cfg, "base_seed", "0")),
                outputs=out_set,
                tol=float(_one(cfg, "tol", "1e-8")),
                trunc_eps=None if trunc.lower() == "none" else float(trunc),
                cheeger=_one(cfg, "cheeger", "false").lower() in ("1", "true", "yes"),
            )
        except ValueError as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"bad config value: {exc}") from None

    def to_config(self) -> str:
        lines = [
            f"ensemble = {self.ensemble}",
            f"n = {self.n_nodes}",
            f"{'c' if self.ensemble == 'regular' else 'c_bar'} = {self.degree!r}",
            f"p1 = {self.p1!r}",
            f"axis = {self.axis}",
            f"axis_min = {self.axis_min!r}",
            f"axis_max = {self.axis_max!r}",
            f"steps = {self.steps}",
        ]
        lines += [f"theta = {t!r}" for t in self.thetas]
        lines += [
            f"samples = {self.samples}",
            f"base_seed = {self.base_seed}",
            f"outputs = {' '.join(sorted(self.outputs))}",
            f"tol = {self.tol!r}",
            f"trunc_eps = {'none' if self.trunc_eps is None else repr(self.trunc_eps)}",
            f"cheeger = {str(self.cheeger).lower()}",
        ]
        return "\n".join(lines) + "\n"

    def spec_hash(self) -> str:
        return hashlib.sha256(self.to_config().encode()).hexdigest()[:16]

    @property
    def work(self) -> int:
        return self.steps * len(self.thetas) * self.samples

    def axis_values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.axis_min])
        return np.linspace(self.axis_min, self.axis_max, self.steps)

    def structure(self, j: int) -> StructureValues:
        x = float(self.axis_values()[j])
        key = "gamma_struct" if self.axis == "gamma" else "cin_minus_cout"
        return structure_conversions(self.degree, self.p1, **{key: x})

    def planted(self, j: int, k: int) -> PlantedSpec:
        sv = self.structure(j)
        seed = derive_seed(self.base_seed, j, k)
        if self.ensemble == "regular":
            return PlantedSpec(self.n_nodes, self.p1, Regular(int(self.degree)), sv.gamma_struct, seed)
        return PlantedSpec(self.n_nodes, self.p1, SBM(sv.c_in, sv.c_out), sv.gamma_struct, seed)

    def distribution(self) -> DegreeDistribution:
        if self.ensemble == "regular":
            return DegreeDistribution.regular(int(self.degree))
        eps = self.trunc_eps if self.trunc_eps is not None else 1.0 / self.n_nodes
        return ema.poisson_truncated(self.degree, eps)


# --------------------------------------------------------------------------------------
# cells
# --------------------------------------------------------------------------------------


def _alarm(signum, frame):
    raise CellTimeout("cell exceeded its time budget")


def run_cell(spec: SweepSpec, j: int, k: int, max_seconds: float | None = None) -> list[dict[str, Any]]:
    """One sampled graph at axis index ``j``; one row per theta."""
    sv = spec.structure(j)
    ps = spec.planted(j, k)
    base = {
        "ensemble": spec.ensemble, "spec_hash": spec.spec_hash(), "n": spec.n_nodes,
        "c_bar": spec.degree, "p1": spec.p1, "gamma_struct": sv.gamma_struct,
        "cin_minus_cout": sv.cin_minus_cout, "sample_index": k, "n_samples": 1, "seed": ps.seed,
    }
    use_alarm = bool(max_seconds) and hasattr(signal, "setitimer")
    old = None
    rows: list[dict[str, Any]] = []
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, float(max_seconds))
    try:
        g = generate(ps)
        cheeger = None
        if spec.cheeger:
            cheeger = second_smallest_normalized_laplacian(g, seed=ps.seed).cheeger_lower_bound
        for i, theta in enumerate(spec.thetas):
            row = dict(base, theta=theta)
            try:
                out = spectral_bisection(g, theta, tol=spec.tol, seed=derive_seed(ps.seed, i))
                row.update(lambda1=out.lambda1, overlap=out.overlap, ipr=out.ipr,
                           unpartitioned=int(out.unpartitioned), ones_alignment=out.ones_alignment,
                           error="")
            except CellTimeout:
                raise
            except SpecPhaseError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            if cheeger is not None:
                row["cheeger_lower_bound_theta"] = cheeger
            rows.append(row)
    except CellTimeout as exc:
        done = {r["theta"] for r in rows}
        rows += [dict(base, theta=t, error=f"CellTimeout: {exc}") for t in spec.thetas if t not in done]
    except SpecPhaseError as exc:
        rows = [dict(base, theta=t, error=f"{type(exc).__name__}: {exc}") for t in spec.thetas]
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0.0)
            signal.signal(signal.SIGALRM, old)
    return rows


def _cell_task(args: tuple[SweepSpec, int, int, float | None]) -> list[dict[str, Any]]:
    return run_cell(*args)


def ema_columns(spec: SweepSpec, j: int, theta: float) -> dict[str, Any]:
    """EMA prediction at one grid point (computed once per point, not per sample)."""
    sv = spec.structure(j)
    try:
        sol = ema.classify_phase(ema.PhaseQuery(spec.distribution(), min(max(sv.gamma_struct, 0.0), 1.0),
                                                theta, spec.p1))
    except SpecPhaseError as exc:
        return {"ema_phase": "", "ema_lambda1": None, "ema_overlap": None,
                "ema_error": f"{type(exc).__name__}: {exc}"}
    ov = None
    if spec.ensemble == "regular":
        if sol.phase is ema.Phase.DETECTABLE:
            ov = ema.predicted_overlap_regular(int(spec.degree), sv.gamma_struct, spec.p1)
        else:
            ov = max(spec.p1, 1.0 - spec.p1) if sol.phase is ema.Phase.UNPARTITIONED else 0.5
    return {"ema_phase": sol.phase.value, "ema_lambda1": sol.lambda1, "ema_overlap": ov, "ema_error": ""}


# --------------------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------------------


def _mean_se(values: Sequence[float]) -> tuple[Optional[float], Optional[float]]:
    arr = np.asarray([v for v in values if v is not None], dtype=float)
    if arr.size == 0:
        return None, None
    mean = math.fsum(arr) / arr.size
    if arr.size < 2:
        return mean, None
    var = math.fsum((arr - mean) ** 2) / (arr.size - 1)
    return mean, math.sqrt(var / arr.size)


def aggregate_rows(rows: Sequence[dict[str, Any]]) -> dict[str, Any]:
    """Aggregate row (``sample_index = -1``) over the error-free per-sample rows."""
    ok = [r for r in rows if not r.get("error")]
    agg = {k: rows[0][k] for k in _STATIC_COLUMNS if k in rows[0]}
    agg.update(theta=rows[0]["theta"], sample_index=-1, seed=None, n_samples=len(ok),
               error="" if ok else "no successful samples")
    for key in OBSERVABLES + ("cheeger_lower_bound_theta",):
        if any(key in r for r in ok):
            mean, se = _mean_se([r.get(key) for r in ok])
            agg[key] = mean
            agg[key + "_se"] = se
    return agg


def sweep_columns(spec: SweepSpec) -> list[str]:
    cols = list(_STATIC_COLUMNS[:2]) + ["n", "c_bar", "p1", "theta", "gamma_struct", "cin_minus_cout",
                                        "sample_index", "n_samples", "seed"]
    obs = []
    if "lambda1" in spec.outputs:
        obs.append("lambda1")
    if "overlap" in spec.outputs:
        obs.append("overlap")
    if "ipr" in spec.outputs:
        obs.append("ipr")
    if "unpartitioned_rate" in spec.outputs:
        obs.append("unpartitioned")
    if "ones_alignment" in spec.outputs:
        obs.append("ones_alignment")
    if spec.cheeger:
        obs.append("cheeger_lower_bound_theta")
    for o in obs:
        cols += [o, o + "_se"]
    if "ema" in spec.outputs:
        cols += ["ema_phase", "ema_lambda1", "ema_overlap"]
    cols.append("error")
    return cols


def run_sweep(
    spec: SweepSpec,
    threads: int = 1,
    max_cell_seconds: float | None = None,
    max_work: int | None = None,
    aggregates: bool = True,
) -> list[dict[str, Any]]:
    """Per-sample rows followed, per grid point, by their aggregate row.

    Rows come out grid point by grid point (axis index, then theta), so the
    result is identical for any ``threads``.
    """
    if max_work is not None and spec.work > max_work:
        raise ParameterError(f"sweep work {spec.work} (steps x thetas x samples) exceeds budget {max_work}")
    tasks = [(spec, j, k, max_cell_seconds) for j in range(spec.steps) for k in range(spec.samples)]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_cell_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    else:
        results = [_cell_task(t) for t in tasks]
    by_cell = {(t[1], t[2]): r for t, r in zip(tasks, results)}
    out: list[dict[str, Any]] = []
    for j in range(spec.steps):
        for i, theta in enumerate(spec.thetas):
            ema_cols = ema_columns(spec, j, theta) if "ema" in spec.outputs else {}
            group = [by_cell[(j, k)][i] for k in range(spec.samples)]
            for r in group:
                r.update(ema_cols)
            out.extend(group)
            if aggregates:
                agg = aggregate_rows(group)
                agg.update(ema_cols)
                out.append(agg)
    return out


def transition_midpoint(axis: Sequence[float], mean_overlap: Sequence[float]) -> float:
    """Midpoint of the grid interval with the largest increase of the mean overlap."""
    x = np.asarray(axis, dtype=float)
    y = np.asarray(mean_overlap, dtype=float)
    if x.size < 2 or x.shape != y.shape:
        raise ParameterError("need at least two matching axis and overlap values")
    order = np.argsort(x)
    x, y = x[order], y[order]
    i = int(np.argmax(np.diff(y)))
    return float(0.5 * (x[i] + x[i + 1]))


# --------------------------------------------------------------------------------------
# phase grid
# --------------------------------------------------------------------------------------


def phase_grid(
    dist: DegreeDistribution,
    gammas: Sequence[float],
    thetas: Sequence[float],
    p1: float = 0.5,
    extras: bool = False,
    cheeger: dict[float, float] | None = None,
) -> list[dict[str, Any]]:
    """EMA phase for every (Gamma, theta); rows ordered by Gamma, then theta.

    With ``extras`` the rows also carry ``cin_minus_cout``, the unpartitioned
    boundary and the Cheeger lower bound on theta. For regular graphs that
    bound is ``(1 - phi/c) / 2`` with ``phi`` the partitioned-branch eigenvalue;
    otherwise it is taken from ``cheeger`` (Gamma -> sampled bound).
    """
    rows = []
    # structure axes refer to the ensemble parameter, not the mean over non-isolated nodes
    c_bar = dist.degrees[0] if dist.is_regular else dist.metadata.get("c_bar", dist.mean_degree)
    for g in gammas:
        sv = structure_conversions(c_bar, p1, gamma_struct=float(g))
        for th in thetas:
            sol = ema.classify_phase(ema.PhaseQuery(dist, float(g), float(th), p1))
            row: dict[str, Any] = {
                "gamma_struct": float(g), "theta": float(th), "phase": sol.phase.value,
                "phi": sol.phi, "lambda1": sol.lambda1, "a_hat": sol.a_hat, "m_hat_sq": sol.m_hat_sq,
            }
            if extras:
                row["cin_minus_cout"] = sv.cin_minus_cout
                row["gamma_un"] = ema.unpartitioned_boundary(dist, float(th))
                if dist.is_regular:
                    branch = sol.candidates.get("D", sol.candidates.get("U"))
                    row["cheeger_lower_bound_theta"] = 0.5 * (1.0 - branch / dist.degrees[0])
                elif cheeger is not None:
                    row["cheeger_lower_bound_theta"] = cheeger.get(float(g))
                else:
                    row["cheeger_lower_bound_theta"] = None
            rows.append(row)
    return rows


# --------------------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------------------


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_table(rows: Sequence[dict[str, Any]], columns: Sequence[str], dest: IO[str], fmt: str = "csv") -> None:
    if fmt == "json":
        json.dump([{c: _json_value(r.get(c)) for c in columns} for r in rows], dest, indent=1)
        dest.write("\n")
        return
    if fmt != "csv":
        raise ParameterError(f"unknown format {fmt!r}")
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(r.get(c)) for c in columns])


def table_text(rows: Sequence[dict[str, Any]], columns: Sequence[str], fmt: str = "csv") -> str:
    buf = io.StringIO()
    write_table(rows, columns, buf, fmt)
    return buf.getvalue()
