"""Floquet discriminant of the torsional Hill equation.

Two routes: exact products of transition matrices for piecewise-constant
(Meissner) coefficients, and numerical integration of the fundamental
system together with the flexural orbit that drives it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import integrator as rk
from .errors import DeterminantDriftError, NumericalError
from .flexural import DEFAULT_ATOL, DEFAULT_RTOL, _raise_for, linear_frequency, periods
from .params import BridgeParams

CLASS_TOL = 1e-9
DET_TOL = 1e-6

STABLE = "stable"
UNSTABLE = "unstable"
BOUNDARY_PERIODIC = "boundary_periodic"
BOUNDARY_ANTIPERIODIC = "boundary_antiperiodic"
FAILED = "failed"
CLASSES = (STABLE, UNSTABLE, BOUNDARY_PERIODIC, BOUNDARY_ANTIPERIODIC)


# ---------------------------------------------------------------------------
# step potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepPotential:
    """Piecewise-constant coefficient v'' + a2_i v = 0 on consecutive intervals.

    Steps hold the *squared* frequency so that negative coefficients
    (imaginary frequency) are representable; ``from_frequencies`` takes A_i.
    """

    steps: tuple  # ((a2, dt), ...)

    def __post_init__(self):
        if len(self.steps) == 0:
            raise ValueError("a step potential needs at least one step")
        for a2, dt in self.steps:
            if not (np.isfinite(a2) and np.isfinite(dt)):
                raise ValueError("step data must be finite")
            if not dt > 0:
                raise ValueError(f"step durations must be positive, got {dt}")

    @classmethod
    def from_frequencies(cls, pairs):
        return cls(tuple((float(A) ** 2, float(dt)) for A, dt in pairs))

    @classmethod
    def from_squares(cls, pairs):
        return cls(tuple((float(a2), float(dt)) for a2, dt in pairs))

    @property
    def period(self) -> float:
        return float(sum(dt for _, dt in self.steps))

    def rotated(self, n: int) -> "StepPotential":
        n %= len(self.steps)
        return StepPotential(self.steps[n:] + self.steps[:n])

    def coefficient(self, t):
        """a2 at time t in [0, period), right-continuous."""
        edges = np.cumsum([dt for _, dt in self.steps])
        idx = np.searchsorted(edges, np.asarray(t) % self.period, side="right")
        idx = np.minimum(idx, len(self.steps) - 1)
        return np.array([a2 for a2, _ in self.steps])[idx]


def transition_matrix(a2, dt):
    """Fundamental matrix of v'' + a2 v = 0 over a time dt, for array a2/dt.

    Returns shape (..., 2, 2).  a2 > 0 rotates, a2 < 0 is hyperbolic and
    a2 = 0 is a free drift.
    """
    a2, dt = np.broadcast_arrays(np.asarray(a2, dtype=float), np.asarray(dt, dtype=float))
    out = np.empty(a2.shape + (2, 2))
    pos, neg, zero = a2 > 0, a2 < 0, a2 == 0
    if np.any(pos):
        A = np.sqrt(a2[pos])
        c, s = np.cos(A * dt[pos]), np.sin(A * dt[pos])
        out[pos] = np.stack([np.stack([c, s / A], -1), np.stack([-A * s, c], -1)], -2)
    if np.any(neg):
        K = np.sqrt(-a2[neg])
        c, s = np.cosh(K * dt[neg]), np.sinh(K * dt[neg])
        out[neg] = np.stack([np.stack([c, s / K], -1), np.stack([K * s, c], -1)], -2)
    if np.any(zero):
        d = dt[zero]
        out[zero] = np.stack([np.stack([np.ones_like(d), d], -1),
                              np.stack([np.zeros_like(d), np.ones_like(d)], -1)], -2)
    return out


def step_monodromy(a2s, dts):
    """L_n ... L_0 for step arrays of shape (..., n); the first step acts first."""
    a2s = np.asarray(a2s, dtype=float)
    dts = np.asarray(dts, dtype=float)
    Ls = transition_matrix(a2s, dts)
    M = Ls[..., 0, :, :]
    for i in range(1, Ls.shape[-3]):
        M = Ls[..., i, :, :] @ M
    return M


def meissner_discriminant(pot: StepPotential):
    """(monodromy, trace) of a multi-step potential."""
    a2 = np.array([s[0] for s in pot.steps])
    dt = np.array([s[1] for s in pot.steps])
    M = step_monodromy(a2, dt)
    return M, float(np.trace(M))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityVerdict:
    delta: float
    cls: str
    tol: float

    @property
    def unstable(self) -> bool:
        return self.cls == UNSTABLE


def classify_array(delta, tol=CLASS_TOL):
    """Vectorised four-way classification; NaN cells become ``failed``."""
    if not tol > 0:
        raise ValueError("classification tolerance must be positive")
    d = np.asarray(delta, dtype=float)
    out = np.full(d.shape, STABLE, dtype=object)
    out[np.abs(d - 2.0) <= tol] = BOUNDARY_PERIODIC
    out[np.abs(d + 2.0) <= tol] = BOUNDARY_ANTIPERIODIC
    out[np.abs(d) > 2.0 + tol] = UNSTABLE
    out[~np.isfinite(d)] = FAILED
    return out


def classify(delta: float, tol: float = CLASS_TOL) -> StabilityVerdict:
    return StabilityVerdict(float(delta), str(classify_array(delta, tol)[()]), tol)


def det_drift(M):
    """|det M - 1| scaled by the size of the products that cancel in det M.

    For strongly hyperbolic monodromies det M = m00 m11 - m01 m10 is a
    difference of two large numbers, and round-off alone is of order
    eps * max(|m00 m11|, |m01 m10|).
    """
    M = np.asarray(M, dtype=float)
    p1 = M[..., 0, 0] * M[..., 1, 1]
    p2 = M[..., 0, 1] * M[..., 1, 0]
    scale = np.maximum(1.0, np.maximum(np.abs(p1), np.abs(p2)))
    return np.abs(p1 - p2 - 1.0) / scale


def det_error(M):
    """Raw |det M - 1|."""
    M = np.asarray(M, dtype=float)
    return np.abs(M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0] - 1.0)


# ---------------------------------------------------------------------------
# numerical monodromy
# ---------------------------------------------------------------------------

class HillSystem:
    """(u, u', v0, v0', v1, v1') driven by the flexural orbit; beta per lane."""

    def __init__(self, params: BridgeParams, kernel, beta_lanes):
        self.stiff = params.alpha * params.j**4
        self.k2 = params.k**2
        self.gamma = params.gamma
        self.kernel = kernel
        self.beta = np.asarray(beta_lanes, dtype=float)

    def __call__(self, t, y, piece, lanes):
        u = y[:, 0]
        coef = self.beta[lanes] * self.k2 + 2.0 * self.gamma * self.kernel.gjk(u, piece)
        out = np.empty_like(y)
        out[:, 0] = y[:, 1]
        out[:, 1] = -self.stiff * u - 2.0 * self.kernel.fj(u, piece)
        out[:, 2] = y[:, 3]
        out[:, 3] = -coef * y[:, 2]
        out[:, 4] = y[:, 5]
        out[:, 5] = -coef * y[:, 4]
        return out


@dataclass
class MonodromyBatch:
    q: np.ndarray
    beta: np.ndarray
    tau: np.ndarray
    matrix: np.ndarray  # (L, 2, 2)
    status: np.ndarray

    @property
    def delta(self):
        d = self.matrix[:, 0, 0] + self.matrix[:, 1, 1]
        return np.where(self.status == rk.OK, d, np.nan)


def monodromy_lanes(params: BridgeParams, kernel, q, beta, tau=None, rtol=DEFAULT_RTOL,
                    atol=DEFAULT_ATOL) -> MonodromyBatch:
    """Monodromy matrices for paired arrays q[i], beta[i], one lane each.

    ``tau`` may carry precomputed periods (NaN marks a failed period search);
    otherwise they are found here.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    beta = np.broadcast_to(np.asarray(beta, dtype=float), q.shape).copy()
    status = np.full(q.shape, rk.OK)
    if tau is None:
        tau, st = periods(params, kernel, q, rtol=rtol, atol=atol)
        status = st.copy()
    else:
        tau = np.broadcast_to(np.asarray(tau, dtype=float), q.shape).copy()
        status[~np.isfinite(tau)] = rk.HORIZON
    matrix = np.full(q.shape + (2, 2), np.nan)
    good = np.nonzero(status == rk.OK)[0]
    if len(good):
        y0 = np.zeros((len(good), 6))
        y0[:, 0] = q[good]
        y0[:, 2] = 1.0
        y0[:, 5] = 1.0
        t_lin = 2.0 * np.pi / linear_frequency(params, kernel)
        res = rk.integrate_batch(HillSystem(params, kernel, beta[good]), y0,
                                 breakpoints=kernel.breakpoints, t_end=tau[good], rtol=rtol,
                                 atol=atol, h0=1e-3 * t_lin)
        status[good] = res.status
        ok = res.status == rk.OK
        Y = res.y
        mats = np.stack([np.stack([Y[:, 2], Y[:, 4]], -1), np.stack([Y[:, 3], Y[:, 5]], -1)], -2)
        matrix[good[ok]] = mats[ok]
    return MonodromyBatch(q=q, beta=beta, tau=tau, matrix=matrix, status=status)


def monodromy_numeric(params: BridgeParams, kernel, q: float, beta_override=None,
                      rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, class_tol=CLASS_TOL,
                      det_tol=DET_TOL):
    """Monodromy of the torsional Hill equation over one flexural period.

    Returns (matrix, StabilityVerdict).  ``beta_override`` replaces
    params.beta (it may be negative, as in spectral sweeps).
    """
    beta = params.beta if beta_override is None else float(beta_override)
    res = monodromy_lanes(params, kernel, [q], [beta], rtol=rtol, atol=atol)
    _raise_for(res.status[0], f"monodromy at q={q}, beta={beta}")
    M = res.matrix[0]
    drift = float(det_drift(M))
    if not drift <= det_tol:
        raise DeterminantDriftError(f"det(M) - 1 drifted by {drift:.3g} (scaled) at q={q}, beta={beta}",
                                    drift=drift)
    return M, classify(np.trace(M), class_tol)


def step_coefficient_monodromy(pot: StepPotential, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Numerically integrated monodromy of a step potential.

    Time is carried as state component 0 so that the integrator's
    breakpoint machinery switches steps exactly at the step edges.
    """
    a2 = np.array([s[0] for s in pot.steps])
    edges = np.cumsum([s[1] for s in pot.steps])[:-1]

    def rhs(t, y, piece, lanes):
        c = a2[np.minimum(piece, len(a2) - 1)]
        return np.column_stack([np.ones(len(y)), y[:, 2], -c * y[:, 1], y[:, 4], -c * y[:, 3]])

    y0 = np.array([[0.0, 1.0, 0.0, 0.0, 1.0]])
    res = rk.integrate_batch(rhs, y0, breakpoints=edges, t_end=pot.period, rtol=rtol, atol=atol,
                             h0=1e-3 * min(s[1] for s in pot.steps))
    if res.status[0] != rk.OK:
        raise NumericalError(f"step potential integration failed: {rk.STATUS_NAMES[res.status[0]]}")
    Y = res.y[0]
    return np.array([[Y[1], Y[3]], [Y[2], Y[4]]])
