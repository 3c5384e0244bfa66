"""Batched Dormand-Prince 5(4) integrator for piecewise-smooth systems.

Every lane of the batch carries its own time, step size and error control,
so a lane's result does not depend on which other lanes share the batch.

The right-hand side is smooth between consecutive *breakpoints* of the first
state component.  A lane keeps evaluating the piece it is in ("piece
locking"); when a step would leave the piece, the step is shortened so that
it ends exactly on the breakpoint and the lane switches piece.  Crossing
times, like the optional terminal event, are refined with genuine RK steps
rather than the interpolant, so the switch happens at integrator accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Dormand & Prince (1980) tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B = np.array(A[6] + [0.0])
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
MAX_REFINE = 12

OK, RUNNING, STIFF, HORIZON, NONFINITE = 0, 1, 2, 3, 4
STATUS_NAMES = {OK: "ok", RUNNING: "running", STIFF: "step-size underflow",
                HORIZON: "horizon exceeded", NONFINITE: "non-finite state"}


@dataclass
class BatchResult:
    t: np.ndarray
    y: np.ndarray
    status: np.ndarray
    n_steps: np.ndarray
    samples: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status == OK


def _step(rhs, t, y, h, k1, piece, lanes):
    """One DP5 step for the given lanes; returns (y_new, err, k7)."""
    ks = [k1]
    hh = h[:, None]
    for s in range(1, 7):
        incr = sum(a * kk for a, kk in zip(A[s], ks) if a != 0.0)
        ks.append(rhs(t + C[s] * h, y + hh * incr, piece, lanes))
    y_new = y + hh * sum(b * kk for b, kk in zip(B[:6], ks[:6]) if b != 0.0)
    # FSAL: the 7th stage was evaluated at y_new
    err = hh * sum(e * kk for e, kk in zip(E, ks) if e != 0.0)
    return y_new, err, ks[6]


def _error_norm(y, y_new, err, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return np.sqrt(np.mean((err / scale) ** 2, axis=1))


def _hermite_root(t0, t1, v0, v1, d0, d1):
    """Fraction theta in [0, 1] where the cubic Hermite interpolant vanishes."""
    h = t1 - t0
    # coefficients in theta of p(theta) = a theta^3 + b theta^2 + c theta + d
    a = 2 * v0 - 2 * v1 + h * (d0 + d1)
    b = -3 * v0 + 3 * v1 - h * (2 * d0 + d1)
    c = h * d0
    d = v0
    out = np.empty_like(v0)
    for i in range(len(v0)):
        roots = np.roots([a[i], b[i], c[i], d[i]])
        roots = roots[np.abs(roots.imag) < 1e-9].real
        roots = roots[(roots >= 0.0) & (roots <= 1.0)]
        # linear fallback when the cubic misbehaves
        out[i] = roots.min() if len(roots) else v0[i] / (v0[i] - v1[i])
    return np.clip(out, 0.0, 1.0)


def _refine(rhs, t, y, h, k1, piece, lanes, value, theta0, v_lo, v_hi):
    """Illinois iteration for theta with value(step(theta h)) = 0.

    ``v_lo``/``v_hi`` are the event values at theta = 0 and theta = 1, which
    bracket the root.  Returns (theta, y_at_theta, k_at_theta).
    """
    lo = np.zeros_like(theta0)
    hi = np.ones_like(theta0)
    f_lo, f_hi = v_lo.copy(), v_hi.copy()
    tol = 1e-14 * np.maximum(np.abs(f_lo), np.abs(f_hi))
    theta = np.clip(theta0, 1e-12, 1.0)
    side = np.zeros(len(theta), dtype=int)
    done = np.zeros(len(theta), dtype=bool)
    for _ in range(MAX_REFINE):
        y_new, _, k_new = _step(rhs, t, y, theta * h, k1, piece, lanes)
        val = value(y_new)
        done |= (np.abs(val) <= tol) | (hi - lo < 1e-14)
        if np.all(done):
            break
        same_lo = np.sign(val) == np.sign(f_lo)
        new_lo = np.where(same_lo, theta, lo)
        new_hi = np.where(same_lo, hi, theta)
        f_lo2 = np.where(same_lo, val, f_lo)
        f_hi2 = np.where(same_lo, f_hi, val)
        # Illinois: damp the endpoint that survived twice in a row
        f_hi2 = np.where(same_lo & (side == 1), 0.5 * f_hi2, f_hi2)
        f_lo2 = np.where(~same_lo & (side == -1), 0.5 * f_lo2, f_lo2)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = (new_lo * f_hi2 - new_hi * f_lo2) / (f_hi2 - f_lo2)
        bad = ~np.isfinite(nxt) | (nxt <= new_lo) | (nxt >= new_hi)
        nxt = np.where(bad, 0.5 * (new_lo + new_hi), nxt)
        keep = ~done
        lo = np.where(keep, new_lo, lo)
        hi = np.where(keep, new_hi, hi)
        f_lo = np.where(keep, f_lo2, f_lo)
        f_hi = np.where(keep, f_hi2, f_hi)
        side = np.where(keep, np.where(same_lo, 1, -1), side)
        theta = np.where(keep, nxt, theta)
    return theta, y_new, k_new


def integrate_batch(rhs, y0, breakpoints=(), t_end=None, terminal=None, rtol=1e-10,
                    atol=1e-12, h0=None, horizon=None, record=False, max_steps=10**6):
    """Integrate every lane of ``y0`` (shape (L, n)) from t = 0.

    ``rhs(t, y, piece, lanes)`` gets the active lanes' state, their locked
    piece index and the lane indices.  Component 0 of the state is the one
    compared against ``breakpoints``.  A lane stops at ``t_end`` (scalar or
    per lane) or when ``terminal`` fires: ``terminal = (value, direction)``
    with ``value(y)`` an event function whose sign change in ``direction``
    (-1 for + to -) ends the lane at the root.
    """
    y = np.array(y0, dtype=float, copy=True)
    L, n = y.shape
    bps = np.asarray(sorted(breakpoints), dtype=float)
    lower = np.concatenate([[-np.inf], bps])
    upper = np.concatenate([bps, [np.inf]])
    piece = np.searchsorted(bps, y[:, 0], side="left").astype(int)

    t = np.zeros(L)
    if t_end is None:
        t_stop = np.full(L, np.inf)
    else:
        t_stop = np.broadcast_to(np.asarray(t_end, dtype=float), (L,)).copy()
    t_horizon = np.full(L, np.inf) if horizon is None else \
        np.broadcast_to(np.asarray(horizon, dtype=float), (L,)).copy()
    h = np.broadcast_to(np.asarray(1e-3 if h0 is None else h0, dtype=float), (L,)).copy()
    h = np.minimum(h, t_stop)
    status = np.full(L, RUNNING)
    n_steps = np.zeros(L, dtype=int)
    status[t_stop <= 0] = OK

    all_lanes = np.arange(L)
    k = np.zeros_like(y)
    act = all_lanes[status == RUNNING]
    if len(act):
        k[act] = rhs(t[act], y[act], piece[act], act)
    samples = [(t.copy(), y.copy())] if record else []

    for _ in range(max_steps):
        act = all_lanes[status == RUNNING]
        if not len(act):
            break
        ta, ya, ha, ka, pa = t[act], y[act], h[act], k[act], piece[act]
        clipped = ha >= t_stop[act] - ta
        ha = np.where(clipped, t_stop[act] - ta, ha)
        y_new, err, k_new = _step(rhs, ta, ya, ha, ka, pa, act)
        en = _error_norm(ya, y_new, err, rtol, atol)
        finite = np.all(np.isfinite(y_new), axis=1) & np.isfinite(en)
        accept = finite & (en <= 1.0)

        with np.errstate(divide="ignore"):
            fac = np.where(en > 0, SAFETY * en ** -0.2, MAX_FACTOR)
        fac = np.clip(fac, MIN_FACTOR, MAX_FACTOR)
        fac = np.where(accept, fac, np.minimum(fac, 1.0))
        fac = np.where(finite, fac, 0.25)
        h_next = ha * fac

        # --- events on accepted trial steps ---------------------------------
        theta = np.ones(len(act))
        kind = np.zeros(len(act), dtype=int)  # 0 none, 1 piece exit, 2 terminal
        u_new = y_new[:, 0]
        lo_b, hi_b = lower[pa], upper[pa]
        slack = 1e-13 * np.maximum(1.0, np.abs(np.where(np.isfinite(hi_b), hi_b, lo_b)))
        exit_up = accept & (u_new > hi_b + slack)
        exit_dn = accept & (u_new < lo_b - slack)
        exits = exit_up | exit_dn
        target = np.where(exit_up, hi_b, lo_b)
        if np.any(exits):
            idx = np.nonzero(exits)[0]
            th = _hermite_root(ta[idx], ta[idx] + ha[idx], ya[idx, 0] - target[idx],
                               u_new[idx] - target[idx], ka[idx, 0], k_new[idx, 0])
            theta[idx] = th
            kind[idx] = 1
        if terminal is not None:
            value, direction = terminal
            v_old, v_new = value(ya), value(y_new)
            hit = accept & (np.sign(v_old) == -direction) & (np.sign(v_new) != -direction)
            if np.any(hit):
                idx = np.nonzero(hit)[0]
                d_old = _event_slope(value, ya[idx], ka[idx])
                d_new = _event_slope(value, y_new[idx], k_new[idx])
                th = _hermite_root(ta[idx], ta[idx] + ha[idx], v_old[idx], v_new[idx], d_old, d_new)
                take = (kind[idx] == 0) | (th < theta[idx])
                theta[idx[take]] = th[take]
                kind[idx[take]] = 2

        ev = np.nonzero(kind > 0)[0]
        if len(ev):
            for kk in (1, 2):
                sel = ev[kind[ev] == kk]
                if not len(sel):
                    continue
                lanes = act[sel]
                if kk == 1:
                    tg = target[sel]
                    value_fn = (lambda yy, tg=tg: yy[:, 0] - tg)
                    v_lo, v_hi = ya[sel, 0] - tg, u_new[sel] - tg
                else:
                    value_fn = terminal[0]
                    v_lo, v_hi = terminal[0](ya[sel]), terminal[0](y_new[sel])
                th, ye, ke = _refine(rhs, ta[sel], ya[sel], ha[sel], ka[sel], pa[sel], lanes,
                                     value_fn, theta[sel], v_lo, v_hi)
                y_new[sel] = ye
                k_new[sel] = ke
                theta[sel] = th

        # --- commit ------------------------------------------------------------
        step_len = ha * theta
        t_new = ta + step_len
        acc = act[accept]
        t[acc] = t_new[accept]
        y[acc] = y_new[accept]
        k[acc] = k_new[accept]
        n_steps[acc] += 1
        h[act] = np.where(kind > 0, np.maximum(h_next, ha), h_next)

        sw = accept & (kind == 1)
        if np.any(sw):
            lanes = act[sw]
            piece[lanes] = pa[sw] + np.where(exit_up[sw], 1, -1)
            # the stored derivative must belong to the new piece
            k[lanes] = rhs(t[lanes], y[lanes], piece[lanes], lanes)
        done_term = accept & (kind == 2)
        status[act[done_term]] = OK
        reached = accept & (kind == 0) & clipped
        status[act[reached]] = OK
        t[act[reached]] = t_stop[act][reached]

        status[act[~finite & (ha < 1e-300)]] = NONFINITE
        tiny = h[act] < 1e-14 * np.maximum(1.0, np.abs(ta))
        status[act[tiny & (status[act] == RUNNING)]] = STIFF
        over = (t[act] > t_horizon[act]) & (status[act] == RUNNING)
        status[act[over]] = HORIZON

        if record:
            samples.append((t.copy(), y.copy()))
    else:
        status[status == RUNNING] = HORIZON

    return BatchResult(t=t, y=y, status=status, n_steps=n_steps, samples=samples)


def _event_slope(value, y, k):
    """d/dt value(y) along the flow, by directional finite difference."""
    eps = 1e-7 * np.maximum(1.0, np.linalg.norm(y, axis=1))
    return (value(y + eps[:, None] * k) - value(y - eps[:, None] * k)) / (2 * eps)
