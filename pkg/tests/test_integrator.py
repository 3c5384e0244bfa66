import math

import numpy as np

from fishbone.integrator import HORIZON, OK, integrate_batch


def oscillator(w2):
    w2 = np.asarray(w2, dtype=float)

    def rhs(t, y, piece, lanes):
        return np.stack([y[:, 1], -w2[lanes] * y[:, 0]], axis=1)
    return rhs


def test_oscillator_half_period_event():
    w2 = np.array([1.0, 4.0, 9.0])
    y0 = np.column_stack([np.ones(3), np.zeros(3)])
    y0[:, 1] = -1e-300  # leave the turning point heading down
    res = integrate_batch(oscillator(w2), y0, terminal=(lambda y: y[:, 1], 1),
                          horizon=20.0, h0=1e-3)
    assert np.all(res.status == OK)
    assert np.allclose(res.t, np.pi / np.sqrt(w2), atol=1e-10)


def test_t_end_state():
    y0 = np.array([[1.0, 0.0]])
    res = integrate_batch(oscillator([1.0]), y0, t_end=2.0)
    assert res.t[0] == 2.0
    assert np.allclose(res.y[0], [math.cos(2.0), -math.sin(2.0)], atol=1e-10)


def test_lane_independent_of_batch():
    w2 = np.linspace(0.5, 5, 7)
    y0 = np.column_stack([np.ones(7), np.zeros(7)])
    big = integrate_batch(oscillator(w2), y0, t_end=3.0)
    one = integrate_batch(oscillator(w2[3:4]), y0[3:4], t_end=3.0)
    assert np.array_equal(big.y[3], one.y[0])


def test_piecewise_stiffness_locks_pieces():
    # u'' = -u for u > 0.5, -4u + 1.5 below: continuous force, kink at 0.5
    def rhs(t, y, piece, lanes):
        u = y[:, 0]
        force = np.where(piece == 1, -u, -4 * u + 1.5)
        return np.stack([y[:, 1], force], axis=1)

    res = integrate_batch(rhs, np.array([[1.0, 0.0]]), breakpoints=[0.5], t_end=10.0,
                          rtol=1e-12, atol=1e-14, record=True)
    assert res.status[0] == OK
    E = lambda u, v: 0.5 * v**2 + np.where(u > 0.5, 0.5 * u**2, 2 * u**2 - 1.5 * u + 0.375)
    ts = np.concatenate([s[0] for s in res.samples])
    us = np.concatenate([s[1][:, 0] for s in res.samples])
    vs = np.concatenate([s[1][:, 1] for s in res.samples])
    assert len(ts) > 10
    assert np.max(np.abs(E(us, vs) - E(1.0, 0.0))) < 1e-9


def test_horizon_status():
    res = integrate_batch(oscillator([1.0]), np.array([[1.0, 0.0]]),
                          terminal=(lambda y: y[:, 0] - 5.0, 1), horizon=3.0)
    assert res.status[0] == HORIZON
