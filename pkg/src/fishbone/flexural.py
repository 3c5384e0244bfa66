"""Pure flexural orbit u(t; q): integration, period and energy audit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import integrator as rk
from .errors import HorizonError, NumericalError, StiffnessError
from .params import BridgeParams

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
HORIZON_FACTOR = 10.0


@dataclass(frozen=True)
class Trajectory:
    q: float
    t: np.ndarray
    u: np.ndarray
    udot: np.ndarray
    period: float
    energy_drift: float
    tolerances: tuple
    closure: tuple  # (u(tau) - q, udot(tau))

    @property
    def samples(self):
        return np.column_stack([self.t, self.u, self.udot])


def linear_frequency(params: BridgeParams, kernel) -> float:
    return float(np.sqrt(params.alpha * params.j**4 + 2.0 * kernel.m))


class FlexuralSystem:
    """u'' + alpha j^4 u + 2 f_j(u) = 0 as a first-order batch right-hand side."""

    def __init__(self, params: BridgeParams, kernel):
        if kernel.j != params.j:
            raise ValueError(f"kernel built for j={kernel.j}, params have j={params.j}")
        self.stiff = params.alpha * params.j**4
        self.kernel = kernel

    def __call__(self, t, y, piece, lanes):
        u = y[:, 0]
        return np.column_stack([y[:, 1], -self.stiff * u - 2.0 * self.kernel.fj(u, piece)])


def _udot(y):
    return y[:, 1]


def _raise_for(status, what):
    if status == rk.STIFF:
        raise StiffnessError(f"{what}: step size underflow")
    if status == rk.HORIZON:
        raise HorizonError(f"{what}: no period found within the time horizon")
    if status != rk.OK:
        raise NumericalError(f"{what}: {rk.STATUS_NAMES.get(status, status)}")


def integrate_periods(params: BridgeParams, kernel, qs, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                      record=False):
    """Batch period search; one lane per amplitude.  Returns the raw BatchResult."""
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    if np.any(qs <= 0):
        raise ValueError("amplitudes must be positive")
    omega = linear_frequency(params, kernel)
    t_lin = 2.0 * np.pi / omega
    y0 = np.column_stack([qs, np.zeros_like(qs)])
    return rk.integrate_batch(FlexuralSystem(params, kernel), y0, breakpoints=kernel.breakpoints,
                              terminal=(_udot, -1), rtol=rtol, atol=atol, h0=1e-3 * t_lin,
                              horizon=HORIZON_FACTOR * t_lin, record=record)


def detect_period(params: BridgeParams, kernel, q, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL) -> float:
    """First t > 0 with udot = 0 and u > 0 (the return to the turning point q)."""
    res = integrate_periods(params, kernel, [q], rtol=rtol, atol=atol)
    _raise_for(res.status[0], f"period search at q={q}")
    return float(res.t[0])


def periods(params: BridgeParams, kernel, qs, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Periods for many amplitudes; NaN where the search failed, plus status codes."""
    res = integrate_periods(params, kernel, qs, rtol=rtol, atol=atol)
    tau = np.where(res.status == rk.OK, res.t, np.nan)
    return tau, res.status


def flexural_energy(params: BridgeParams, kernel, u, udot):
    u = np.asarray(u, dtype=float)
    udot = np.asarray(udot, dtype=float)
    return 0.5 * udot**2 + 0.5 * params.alpha * params.j**4 * u**2 + 2.0 * kernel.Fj(u)


def solve_flexural(params: BridgeParams, kernel, q: float, rtol=DEFAULT_RTOL,
                   atol=DEFAULT_ATOL, audit_energy=True) -> Trajectory:
    """One period of u(t; q) with u(0) = q, udot(0) = 0."""
    res = integrate_periods(params, kernel, [q], rtol=rtol, atol=atol, record=True)
    _raise_for(res.status[0], f"flexural orbit at q={q}")
    ts = np.array([s[0][0] for s in res.samples])
    ys = np.array([s[1][0] for s in res.samples])
    keep = np.concatenate([[True], np.diff(ts) > 0])
    ts, ys = ts[keep], ys[keep]
    tau = float(res.t[0])
    u_end, v_end = res.y[0]
    drift = float("nan")
    if audit_energy:
        e = flexural_energy(params, kernel, ys[:, 0], ys[:, 1])
        e0 = e[0]
        drift = float(np.max(np.abs(e - e0)) / abs(e0)) if e0 != 0 else float(np.max(np.abs(e)))
    return Trajectory(q=float(q), t=ts, u=ys[:, 0], udot=ys[:, 1], period=tau,
                      energy_drift=drift, tolerances=(rtol, atol),
                      closure=(float(u_end - q), float(v_end)))
