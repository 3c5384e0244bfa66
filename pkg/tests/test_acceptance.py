"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (shown in the terminal summary).
Criteria 1 and 6b cannot be met in double precision on this grid; they
are implemented as stated and marked as strict expected failures.
"""

import math
import time

import numpy as np
import pytest

from fishbone.flexural import periods, solve_flexural
from fishbone.floquet import STABLE, StepPotential, meissner_discriminant, monodromy_lanes
from fishbone.limit import EVEN_J_ALWAYS_STABLE, high_energy_verdict, limit_quantities
from fishbone.params import preset
from fishbone.piecewise import BarModel
from fishbone.projection import ProjectionKernel, g_jk, mmk_H
from fishbone.slackening import MMK, Exponential, PiecewiseLinear, SqrtSmooth
from fishbone.sweep import compare_engines, detect_bands, match_tips, sweep_grid, tongue_tips

from conftest import M, R0, academic, record_criterion

RTOL, ATOL = 1e-10, 1e-12


@pytest.fixture(scope="module")
def engine_grid():
    q = np.linspace(0.1, 6.0, 50)
    beta = np.linspace(-20.0, 20.0, 50)
    start = time.perf_counter()
    rep = compare_engines(academic(), BarModel(M, R0), q, beta, rtol=RTOL, atol=ATOL)
    rep["wall"] = time.perf_counter() - start
    return rep


@pytest.mark.xfail(strict=True, reason="round-off in hyperbolic cells exceeds 1e-6; see decisions ledger")
def test_c1_engine_equivalence(engine_grid):
    rep = engine_grid
    ok = rep["max_abs"] <= 1e-6 and rep["failed_cells"] == 0 and rep["wall"] < 300
    record_criterion("1", ok, f"max|dDelta|={rep['max_abs']:.3e} at q={rep['cell']['q']:.3f}, "
                     f"beta={rep['cell']['beta']:.3f} (Delta={rep['cell']['delta_closed']:.3e}); "
                     f"max relative {rep['max_rel']:.1e}; {rep['wall']:.1f}s")
    assert ok


def test_c2_projection_oracle():
    mmk = MMK(M, R0)
    r = np.linspace(-10.0, 10.0, 1000)
    worst = 0.0
    for j in range(1, 7):
        for k in range(1, 7):
            quad = g_jk(mmk, j, k, r, engine="quadrature")
            closed = 2 * M / math.pi * mmk_H(j, k, R0, r)
            worst = max(worst, float(np.max(np.abs(quad - closed))))
    ok = worst <= 1e-8
    record_criterion("2", ok, f"max|g_quad - (2m/pi)H| = {worst:.2e} over 36 (j,k) x 1000 r")
    assert ok


C3_BETAS = (0.5, 1.5, 2.0, 6.0, 12.0)
C3_QS = np.array([1e2, 1e3, 1e4])


def test_c3_high_energy_limit():
    kern = ProjectionKernel(MMK(M, R0), 1, 1, engine="closed_form")
    p = academic()
    tau, _ = periods(p, kern, C3_QS)
    lq0 = limit_quantities(academic(beta=C3_BETAS[0]), M)
    tau_rel = abs(tau[-1] - lq0.period) / lq0.period
    ok, notes, kinds = tau_rel <= 1e-2, [], set()
    for beta in C3_BETAS:
        d_inf = limit_quantities(academic(beta=beta), M).delta_inf
        kinds.add(abs(d_inf) > 2)
        res = monodromy_lanes(p, kern, C3_QS, np.full(3, beta), tau=tau)
        err = np.abs(res.delta - d_inf)
        ok &= bool(err[-1] <= 0.05 and np.all(np.diff(err) < 0))
        notes.append(f"b={beta}:{err[-1]:.1e}")
    ok &= kinds == {True, False}
    record_criterion("3", ok, f"|Delta(1e4)-Delta_inf| {' '.join(notes)}; tau rel err {tau_rel:.1e}")
    assert ok


def test_c4_even_j():
    model = SqrtSmooth(1.0, 1.0)
    qs = np.geomspace(0.1, 100.0, 20)
    spread = 0.0
    for k in (1, 2, 3, 4):
        kern = ProjectionKernel(model, 2, k)
        for q in (0.1, 5.0, 100.0):
            tr = solve_flexural(academic(2, k), kern, q)
            g = kern.gjk(tr.u)
            spread = max(spread, float(np.ptp(g)))
    kern = ProjectionKernel(model, 2, 1)
    p = academic(2, 1, beta=1.0)
    res = monodromy_lanes(p, kern, qs, np.full(20, 1.0))
    stable_a = bool(np.all(np.abs(res.delta) <= 2.0))
    verdicts = {high_energy_verdict(academic(j, k, beta=1.0), MMK(M, R0))["verdict"]
                for j in (2, 4, 6) for k in range(1, 7)}
    ok = spread <= 1e-12 and stable_a and verdicts == {EVEN_J_ALWAYS_STABLE}
    record_criterion("4", ok, f"(a) ptp g = {spread:.1e}, max|Delta| = {np.max(np.abs(res.delta)):.4f} "
                     f"over 20 q; (b) verdicts {sorted(verdicts)}")
    assert ok


def tip_distances(j):
    model = BarModel(M, R0)
    p = academic(j, j)
    beta = np.linspace(-20.0, 40.0, 1201)
    q = model.r_bar + np.linspace(-4e-3, 4e-3, 9)
    grid = sweep_grid(p, model, q, beta, engine="closed_form")
    col = int(np.nonzero(q > model.r_bar)[0][0])
    bands = detect_bands(beta, grid.delta[:, col])
    tips = [t for t in tongue_tips(p, M, 5) if beta[0] <= t[1] <= beta[-1]]
    return match_tips(bands, tips, beta), float(q[col])


def test_c5_tongue_tips():
    m1, q1 = tip_distances(1)
    ok1 = len(m1) == 5 and all(t["distance_cells"] <= 1 for t in m1)
    m2, _ = tip_distances(2)
    odd = [t for t in m2 if t["vanished"]]
    even = [t for t in m2 if not t["vanished"]]
    ok2 = all(t["distance_cells"] > 1 for t in odd) and all(t["distance_cells"] <= 1 for t in even)
    ok = ok1 and ok2
    record_criterion("5", ok, f"j=1 at q={q1:.5f}: cells {[t['distance_cells'] for t in m1]}; "
                     f"j=2 odd-N cells {[t['distance_cells'] for t in odd]}")
    assert ok


def c6_cases(rng):
    knots = ((-2.0, -1.0), (-1.0, -0.9), (-0.5, -0.5), (1.0, 1.0), (3.0, 5.0))
    models = [MMK(M, R0), SqrtSmooth(1.0, 1.0), Exponential(1.0, 1.0), PiecewiseLinear(knots)]
    for i in range(20):
        model = models[i % 4]
        j = int(rng.integers(1, 4))
        yield model, j, float(np.exp(rng.uniform(np.log(0.05), np.log(8.0))))


def test_c6a_energy_drift(rng):
    worst = 0.0
    for model, j, q in c6_cases(rng):
        engine = "closed_form" if isinstance(model, MMK) else "quadrature"
        tr = solve_flexural(academic(j, 1), ProjectionKernel(model, j, 1, engine=engine), q)
        worst = max(worst, tr.energy_drift)
    ok = worst <= 1e-8
    record_criterion("6a", ok, f"energy drift max {worst:.1e} over 20 (model, q) cases")
    assert ok


@pytest.mark.xfail(strict=True, reason="det(M) loses digits to cancellation when |Delta| ~ 1e6; see ledger")
def test_c6b_unit_determinant(engine_grid):
    num = engine_grid["grids"][1]
    err = num.det_error
    worst = float(np.nanmax(err))
    n_bad = int(np.sum(err > 1e-8))
    ok = worst <= 1e-8
    record_criterion("6b", ok, f"max|det M - 1| = {worst:.1e}; {n_bad} of {err.size} cells above 1e-8")
    assert ok


def test_c6c_cyclic_invariance(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        pot = StepPotential.from_squares([(rng.uniform(-4, 30), rng.uniform(0.05, 1.5))
                                          for _ in range(n)])
        d = [meissner_discriminant(pot.rotated(i))[1] for i in range(n)]
        worst = max(worst, max(d) - min(d))
    ok = worst <= 1e-12
    record_criterion("6c", ok, f"max trace spread over rotations {worst:.1e} (100 potentials)")
    assert ok


def test_c7_linear_regime():
    mmk = MMK(M, R0)
    worst_tau = worst_delta = 0.0
    for j in (1, 2, 3):
        kern = ProjectionKernel(mmk, j, j, engine="closed_form")
        p = academic(j, j)
        q = np.array([0.1, 0.5, 0.9]) * R0
        tau, _ = periods(p, kern, q)
        w = math.sqrt(j**4 + 2 * M)
        worst_tau = max(worst_tau, float(np.max(np.abs(tau * w / (2 * math.pi) - 1))))
        for beta in (0.5, 3.0, 10.0):
            A = math.sqrt(beta * j**2 + 2 * 3.0 * M)
            exact = 2 * math.cos(2 * math.pi * A / w)
            res = monodromy_lanes(p, kern, q, np.full(3, beta), tau=tau)
            worst_delta = max(worst_delta, float(np.max(np.abs(res.delta - exact) / abs(exact))))
    ok = worst_tau <= 1e-9 and worst_delta <= 1e-9
    record_criterion("7", ok, f"tau rel err {worst_tau:.1e}, Delta rel err {worst_delta:.1e}")
    assert ok


def test_c8_tnb_smoke():
    pr = preset("tnb", j=3, k=2, gamma=3.0)
    model = MMK(pr.model["m"], pr.model["r0"])
    b_ref = pr.meta["beta_reference"]
    betas = b_ref + (np.arange(100) - 50.0)
    qs = np.linspace(0.016, 1.6, 100)
    start = time.perf_counter()
    grid = sweep_grid(pr.params, model, qs, betas)
    wall = time.perf_counter() - start
    row = grid.cls[50]
    ok = grid.n_failed == 0 and betas[50] == b_ref and bool(np.all(row == STABLE)) and wall < 600
    record_criterion("8", ok, f"{grid.n_failed} failed cells; beta_ref row {int(np.sum(row == STABLE))}"
                     f"/100 stable (max|Delta| {np.max(np.abs(grid.delta[50])):.3f}); {wall:.1f}s")
    assert ok
