import math

import numpy as np
import pytest

from fishbone.errors import HorizonError
from fishbone.flexural import (detect_period, flexural_energy, linear_frequency, periods,
                               solve_flexural)
from fishbone.projection import ProjectionKernel
from fishbone.slackening import Exponential, SqrtSmooth

from conftest import M, R0, academic


@pytest.mark.parametrize("j", [1, 2, 3])
def test_linear_band_period(mmk, j):
    p = academic(j=j, k=1)
    kern = ProjectionKernel(mmk, j, 1, engine="closed_form")
    tau = detect_period(p, kern, 0.5 * R0)
    assert tau == pytest.approx(2 * math.pi / math.sqrt(j**4 + 2 * M), rel=1e-9)


def test_small_amplitude_limit_smooth_model():
    model = SqrtSmooth(1.0, 1.0)
    p = academic()
    kern = ProjectionKernel(model, 1, 1)
    tau, st = periods(p, kern, [1e-3, 1e-2, 1e-1])
    T0 = 2 * math.pi / linear_frequency(p, kern)
    err = np.abs(tau - T0)
    assert np.all(np.diff(err) > 0)
    assert err[0] < 1e-5 * T0


def test_orbit_symmetry_and_closure(params11, mmk_kernel11):
    tr = solve_flexural(params11, mmk_kernel11, 2.0)
    assert abs(tr.closure[0]) < 1e-8 and abs(tr.closure[1]) < 1e-8
    assert tr.u.min() < 0 and tr.u.max() == pytest.approx(2.0)
    # half way round the orbit the velocity vanishes again at the minimum
    i = int(np.argmin(tr.u))
    assert abs(tr.udot[i]) < 0.05 * np.max(np.abs(tr.udot))


@pytest.mark.parametrize("q", [0.2, 1.0, 5.0, 40.0])
def test_energy_conserved(params11, mmk_kernel11, q):
    tr = solve_flexural(params11, mmk_kernel11, q)
    assert tr.energy_drift < 1e-8


def test_period_monotone_in_amplitude_for_mmk(params11, mmk_kernel11):
    # slackening softens the restoring force, so the period grows with q
    tau, _ = periods(params11, mmk_kernel11, np.geomspace(0.5, 100, 12))
    assert np.all(np.diff(tau) > 0)


def test_batch_invariance(params11, mmk_kernel11):
    qs = np.array([0.3, 1.0, 3.0, 9.0])
    tau, _ = periods(params11, mmk_kernel11, qs)
    single = periods(params11, mmk_kernel11, qs[2:3])[0]
    assert tau[2] == single[0]


def test_energy_function_zero_at_rest(params11, mmk_kernel11):
    assert flexural_energy(params11, mmk_kernel11, 0.0, 0.0) == 0.0


def test_nonpositive_amplitude_rejected(params11, mmk_kernel11):
    with pytest.raises(ValueError):
        periods(params11, mmk_kernel11, [0.0])


def test_horizon_error_is_raised(monkeypatch, params11, mmk_kernel11):
    import fishbone.flexural as fx
    monkeypatch.setattr(fx, "HORIZON_FACTOR", 0.1)
    with pytest.raises(HorizonError):
        detect_period(params11, mmk_kernel11, 1.0)


def test_quadrature_kernel_exponential_runs():
    kern = ProjectionKernel(Exponential(1.0, 1.0), 1, 1)
    tr = solve_flexural(academic(), kern, 1.5)
    assert tr.energy_drift < 1e-8 and tr.period > 0
