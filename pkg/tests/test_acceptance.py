"""End-to-end checks of the whole pipeline, one test per criterion.

Each test prints a single PASS/FAIL line and records it for the terminal
summary. The Monte Carlo sweeps are shared between criteria through
module-scoped fixtures.
"""

import inspect
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from specphase import ema
from specphase.ensembles import DegreeDistribution
from specphase.lab import SweepSpec, run_sweep, transition_midpoint
from specphase.objectives import Bipartition, equivalence_certificate, spin_identities
from specphase.spectral import ModularityOperator, leading_eigenpair

from conftest import ACCEPTANCE, random_connected_graph, random_graph


@pytest.fixture
def report(request):
    def _report(num, ok, detail):
        request.config.stash[ACCEPTANCE][num] = (bool(ok), detail)
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _report


def aggregates(rows):
    return {(round(r["gamma_struct"], 12), r["theta"]): r for r in rows if r["sample_index"] == -1}


def samples(rows, gamma, theta):
    return [r for r in rows if r["sample_index"] != -1
            and abs(r["gamma_struct"] - gamma) < 1e-12 and r["theta"] == theta]


# ---------------------------------------------------------------- shared sweeps

REG_GAMMAS = np.round(np.linspace(0.3, 1.0, 8), 12)
REG_THETAS = (0.5, 1.0, 2.0)


@pytest.fixture(scope="module")
def regular_sweep():
    spec = SweepSpec(ensemble="regular", n_nodes=10_000, degree=3, axis="gamma", axis_min=0.3, axis_max=1.0,
                     steps=8, thetas=REG_THETAS, samples=20, base_seed=2024)
    return aggregates(run_sweep(spec))


@pytest.fixture(scope="module")
def unpartitioned_sweep():
    spec = SweepSpec(ensemble="regular", n_nodes=10_000, degree=3, axis="gamma", axis_min=0.5, axis_max=0.97,
                     steps=2, thetas=(0.02,), samples=20, base_seed=77)
    return run_sweep(spec, aggregates=False)


def sbm_sweep(n_nodes, base_seed):
    common = dict(ensemble="sbm", n_nodes=n_nodes, degree=6.0, axis="cin_minus_cout", thetas=(1.0,),
                  samples=20, outputs=frozenset({"lambda1", "overlap", "ipr", "ema"}))
    low = SweepSpec(axis_min=2.0, axis_max=2.0, steps=1, base_seed=base_seed, **common)
    grid = SweepSpec(axis_min=4.0, axis_max=8.0, steps=9, base_seed=base_seed + 1, **common)
    rows = [r for spec in (low, grid) for r in run_sweep(spec) if r["sample_index"] == -1]
    return {round(r["cin_minus_cout"], 9): r for r in rows}, grid.distribution()


# ---------------------------------------------------------------- criteria


def test_c01_closed_form_cross_check(report):
    t0 = time.perf_counter()
    worst = 0.0
    for c in (3, 4, 6):
        dist = DegreeDistribution.regular(c)
        gstar = 1 / math.sqrt(c - 1)
        for gamma in np.linspace(0.02, 1.0, 50):
            gamma = float(gamma)
            sol = ema.classify_phase(ema.PhaseQuery(dist, gamma, 1.0))
            cf = ema.regular_closed_forms(c, gamma)
            if gamma > gstar:
                worst = max(worst, abs(sol.lambda1 - cf.lambda1_detectable),
                            abs(sol.a_hat - 1 / ((c - 1) * gamma)),
                            abs(sol.m_hat_sq - cf.m_hat_sq))
            else:
                worst = max(worst, abs(sol.lambda1 - cf.lambda1_undetectable))
        worst = max(worst, abs(ema.detectability_threshold(dist) - gstar))
        for theta in np.linspace(0.002, ema.regular_closed_forms(c, 1.0).theta_max - 0.002, 5):
            num = ema.unpartitioned_boundary(dist, float(theta))
            worst = max(worst, abs(num - ema.regular_closed_forms(c, 1.0, float(theta)).gamma_un))
            phi, _ = ema.solve_unpartitioned(dist, float(theta))
            worst = max(worst, abs(phi - c * (1 - theta)))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-8 and elapsed < 5.0, f"max abs error {worst:.2e} in {elapsed:.2f} s")


@pytest.mark.slow
def test_c02_regular_detectable_branch(report, regular_sweep):
    lines, ok = [], True
    for gamma in (0.8, 0.9, 1.0):
        lam = regular_sweep[(gamma, 1.0)]["lambda1"]
        pred = 2 * gamma + 1 / gamma
        rel = abs(lam - pred) / pred
        ok &= rel <= 0.02
        lines.append(f"G={gamma}: {lam:.4f} vs {pred:.4f}")
    ov = regular_sweep[(0.9, 1.0)]["overlap"]
    ok &= ov >= 0.80
    report(2, ok, "; ".join(lines) + f"; overlap(0.9)={ov:.3f}")


@pytest.mark.slow
def test_c03_regular_undetectable_branch(report, regular_sweep):
    lines, ok = [], True
    edge = 2 * math.sqrt(2)
    for gamma in (0.3, 0.5):
        agg = regular_sweep[(gamma, 1.0)]
        rel = abs(agg["lambda1"] - edge) / edge
        ok &= rel <= 0.03 and agg["overlap"] <= 0.56
        lines.append(f"G={gamma}: lambda {agg['lambda1']:.4f} overlap {agg['overlap']:.3f}")
    report(3, ok, "; ".join(lines))


@pytest.mark.slow
def test_c04_theta_universality(report, regular_sweep):
    spread = 0.0
    for gamma in REG_GAMMAS:
        ovs = [regular_sweep[(float(gamma), t)]["overlap"] for t in REG_THETAS]
        spread = max(spread, max(ovs) - min(ovs))
    report(4, spread <= 0.05, f"max pointwise overlap spread {spread:.4f} over {len(REG_GAMMAS)} Gamma values")


@pytest.mark.slow
def test_c05_unpartitioned_phase(report, unpartitioned_sweep):
    low = samples(unpartitioned_sweep, 0.5, 0.02)
    high = samples(unpartitioned_sweep, 0.97, 0.02)
    n_unpart = sum(1 for r in low if r["unpartitioned"] and abs(r["lambda1"] - 2.94) / 2.94 <= 0.01
                   and r["ones_alignment"] >= 0.99)
    n_part = sum(1 for r in high if not r["unpartitioned"] and r["overlap"] >= 0.8)
    gun = ema.regular_closed_forms(3, 0.97, 0.02).gamma_un
    ok = len(low) == len(high) == 20 and n_unpart >= 19 and n_part >= 15 and 0.97 > gun
    report(5, ok, f"G=0.5: {n_unpart}/20 unpartitioned; G=0.97 (> G_un={gun:.4f}): {n_part}/20 partitioned")


def test_c06_equivalence(report):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(200):
        n = int(rng.integers(5, 13))
        g = random_connected_graph(n, rng, float(rng.uniform(0.1, 0.6)))
        cert = equivalence_certificate(g)
        failures += not (cert.sets_equal and cert.inequality_holds and cert.equality_exactly_on_optima)
    elapsed = time.perf_counter() - t0
    report(6, failures == 0 and elapsed < 60, f"{200 - failures}/200 graphs certified in {elapsed:.1f} s")


def test_c07_spin_identities(report):
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(50):
        n = int(rng.integers(2, 33))
        g = random_graph(n, float(rng.uniform(0.05, 0.6)), rng)
        lab = rng.integers(1, 3, n)
        lab[0], lab[-1] = 1, 2
        rec = spin_identities(g, Bipartition(lab))
        checked += (rec.cut, rec.k1, rec.k2) == (rec.cut_from_spins, rec.k1_from_spins, rec.k2_from_spins)
    report(7, checked == 50, f"{checked}/50 exact integer matches")


def _sbm_checks(n_nodes, base_seed, factor):
    by_x, dist = sbm_sweep(n_nodes, base_seed)
    gstar = ema.detectability_threshold(dist)
    x_star = 2 * 6.0 * gstar
    lo, hi = by_x[2.0], by_x[8.0]
    rel = [abs(r["lambda1"] - r["ema_lambda1"]) / r["ema_lambda1"] for r in (lo, hi)]
    axis = sorted(by_x)
    mid = transition_midpoint(axis, [by_x[x]["overlap"] for x in axis])
    checks = {
        "lambda": max(rel) <= 0.05 * factor,
        "overlap8": hi["overlap"] >= 0.75,
        "overlap2": lo["overlap"] <= 0.5 + 0.06 * factor,
        "ipr": lo["ipr"] > hi["ipr"],
        "midpoint": abs(mid - x_star) <= 0.5 * factor,
    }
    detail = (f"N={n_nodes}: lambda rel err {rel[0]:.3f}/{rel[1]:.3f}; overlap {lo['overlap']:.3f}/{hi['overlap']:.3f}; "
              f"IPR {lo['ipr']:.2e}>{hi['ipr']:.2e}; midpoint {mid:.2f} vs EMA {x_star:.3f}"
              + ("" if all(checks.values()) else f"; failed {[k for k, v in checks.items() if not v]}"))
    return all(checks.values()), detail


@pytest.mark.slow
def test_c08_sbm_behaviour(report):
    ok_full, full = _sbm_checks(20_000, 800, 1.0)
    ok_smoke, smoke = _sbm_checks(5_000, 900, 2.0)
    report(8, ok_full and ok_smoke, f"{full} || {smoke}")


def test_c09_eigensolver_oracle(report):
    rng = np.random.default_rng(9)
    worst, done = 0.0, 0
    while done < 100:
        n = int(rng.integers(2, 65))
        g = random_graph(n, float(rng.uniform(1.0, 8.0)) / n, rng)
        if g.n_edges == 0:
            continue
        theta = float(rng.uniform(0.1, 3.0))
        op = ModularityOperator(g, theta)
        ref = np.linalg.eigvalsh(op.dense())[-1]
        lam, _, _ = leading_eigenpair(op, tol=1e-10, seed=done)
        worst = max(worst, abs(lam - ref))
        done += 1
    report(9, worst <= 1e-8, f"max |lambda - dense| = {worst:.2e} over 100 graphs")


def test_c10_threshold_identities(report):
    worst_jump, worst_un = 0.0, 0.0
    for c in (3, 4, 6):
        dist = DegreeDistribution.regular(c)
        gstar = ema.detectability_threshold(dist)
        lam = [ema.classify_phase(ema.PhaseQuery(dist, gstar + s * 1e-6, 1.0)).lambda1 for s in (-1, 1)]
        worst_jump = max(worst_jump, abs(lam[1] - lam[0]))
        tmax = ema.regular_closed_forms(c, 1.0).theta_max
        worst_un = max(worst_un, abs(ema.regular_closed_forms(c, 1.0, tmax).gamma_un - gstar))
    poisson = ema.poisson_truncated(6.0, 1 / 20_000)
    gp = ema.detectability_threshold(poisson)
    lam = [ema.classify_phase(ema.PhaseQuery(poisson, gp + s * 1e-6, 1.0)).lambda1 for s in (-1, 1)]
    worst_jump = max(worst_jump, abs(lam[1] - lam[0]))
    params = set(inspect.signature(ema.detectability_threshold).parameters)
    no_theta = params == {"dist", "tol"}
    ok = worst_jump <= 1e-8 and worst_un <= 1e-10 and no_theta
    report(10, ok, f"max jump at G* {worst_jump:.1e}; |G_un(theta_max) - G*| {worst_un:.1e}; "
                   f"threshold arguments {sorted(params)}")


def test_equivalence_threshold_is_rational():
    # guards the exact arithmetic the certificate relies on
    g = random_connected_graph(6, np.random.default_rng(1))
    assert isinstance(equivalence_certificate(g).theta_star, Fraction)
