"""Bar approximation of the projected MMK force and its exact discriminant.

The projected MMK force is replaced by a three-piece linear law with
threshold r_bar = 4 r0 / pi.  The flexural orbit is then a chain of
harmonic arcs and the Hill coefficient is piecewise constant, so both the
switching times and the discriminant are available in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError
from .floquet import step_monodromy
from .params import BridgeParams
from .slackening import MMK

LINEAR, EVEN_J, ODD_J = "linear", "even_j", "odd_j"


def r_bar(r0: float) -> float:
    return 4.0 * r0 / np.pi


def _outer_lines(j, m, rb):
    """Slopes and intercepts (s_lo, c_lo, s_hi, c_hi) of the two outer pieces."""
    if j % 2 == 0:
        return 0.5 * m, -0.5 * m * rb, 0.5 * m, 0.5 * m * rb
    return (0.5 * m * (1 - 1 / j), -0.5 * m * (1 + 1 / j) * rb,
            0.5 * m * (1 + 1 / j), 0.5 * m * (1 - 1 / j) * rb)


def barf_j(j: int, m: float, r0: float, r):
    """Piecewise-linear stand-in for f_j: slope m on |r| <= r_bar."""
    r = np.asarray(r, dtype=float)
    rb = r_bar(r0)
    s_lo, c_lo, s_hi, c_hi = _outer_lines(j, m, rb)
    out = np.where(r > rb, s_hi * r + c_hi, np.where(r < -rb, s_lo * r + c_lo, m * r))
    return out if out.ndim else float(out)


def barf_j_prime(j: int, m: float, r0: float, r, side="right"):
    r = np.asarray(r, dtype=float)
    rb = r_bar(r0)
    s_lo, _, s_hi, _ = _outer_lines(j, m, rb)
    if side == "right":
        out = np.where(r >= rb, s_hi, np.where(r >= -rb, m, s_lo))
    else:
        out = np.where(r > rb, s_hi, np.where(r > -rb, m, s_lo))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BarModel:
    """Model descriptor for the bar system; not a restoring force on its own."""

    m: float
    r0: float
    name = "mmk-bar"

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError("m must be positive", field="m")
        if not self.r0 > 0:
            raise ValidationError("r0 must be positive for the bar approximation", field="r0")

    @property
    def r_bar(self):
        return r_bar(self.r0)

    @property
    def base(self) -> MMK:
        return MMK(self.m, self.r0)

    @property
    def m_at_zero(self):
        return self.m

    @property
    def M_asymptotic(self):
        return self.m

    def assumptions(self):
        return self.base.assumptions()

    def descriptor(self):
        return {"model": "mmk-bar", "m": self.m, "r0": self.r0}


@dataclass(frozen=True)
class BarKernel:
    """Drop-in for ProjectionKernel on the bar system (k = j only).

    Pieces are 0: u < -r_bar, 1: |u| <= r_bar, 2: u > r_bar.  When the
    integrator passes a locked piece, the force follows that piece's line
    even slightly past a threshold, which keeps the right-hand side smooth
    inside each step.
    """

    model: BarModel
    j: int
    k: int = None

    discontinuous = True

    def __post_init__(self):
        if self.k is None:
            object.__setattr__(self, "k", self.j)
        if self.k != self.j:
            raise ConfigError("the bar approximation has no Hill coefficient for k != j")

    @property
    def m(self):
        return self.model.m

    @property
    def breakpoints(self):
        rb = self.model.r_bar
        return (-rb, rb)

    def _lines(self):
        s_lo, c_lo, s_hi, c_hi = _outer_lines(self.j, self.model.m, self.model.r_bar)
        return np.array([s_lo, self.model.m, s_hi]), np.array([c_lo, 0.0, c_hi])

    def _piece(self, r, piece):
        if piece is not None:
            return np.asarray(piece)
        rb = self.model.r_bar
        return np.where(r > rb, 2, np.where(r < -rb, 0, 1))

    def fj(self, r, piece=None):
        r = np.asarray(r, dtype=float)
        s, c = self._lines()
        p = self._piece(r, piece)
        return s[p] * r + c[p]

    def gjk(self, r, piece=None):
        r = np.asarray(r, dtype=float)
        s, _ = self._lines()
        return s[self._piece(r, piece)] * np.ones_like(r)

    def Fj(self, r):
        """int_0^r of the bar force, exact."""
        r = np.asarray(r, dtype=float)
        m, rb = self.model.m, self.model.r_bar
        s_lo, c_lo, s_hi, c_hi = _outer_lines(self.j, m, rb)
        inner = 0.5 * m * np.clip(r, -rb, rb) ** 2
        hi = np.maximum(r, rb)
        lo = np.minimum(r, -rb)
        up = 0.5 * s_hi * (hi**2 - rb**2) + c_hi * (hi - rb)
        dn = 0.5 * s_lo * (lo**2 - rb**2) + c_lo * (lo + rb)
        out = inner + up + dn
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PiecewiseSolution:
    """Switching data of one bar-system orbit.

    ``durations`` are the total times spent per visit in each piece:
    (upper, band[, lower]).  The cycle starting at u = q runs upper/2, band,
    lower, band, upper/2; for even j the lower piece mirrors the upper one.
    """

    q: float
    regime: str
    r_bar: float
    frequencies: tuple
    durations: tuple
    hill_squares: tuple
    period: float

    @property
    def hill_frequencies(self):
        return tuple(float(np.sqrt(a2)) if a2 >= 0 else float("nan") for a2 in self.hill_squares)

    def steps(self):
        """(a2, dt) list of one full cycle, in the cyclic order of the monodromy."""
        if self.regime == LINEAR:
            return [(self.hill_squares[0], self.period)]
        if self.regime == EVEN_J:
            (a0, a1), (d0, d1) = self.hill_squares, self.durations
            return [(a0, d0), (a1, d1), (a0, d0), (a1, d1)]
        (a0, a1, a2), (d0, d1, d2) = self.hill_squares, self.durations
        return [(a0, d0), (a1, d1), (a2, d2), (a1, d1)]


def _bar_data(params: BridgeParams, m, r0, q, beta):
    """Frequencies, durations and Hill squares, broadcast over q and beta."""
    j = params.j
    q = np.asarray(q, dtype=float)
    beta = np.asarray(beta, dtype=float)
    rb = r_bar(r0)
    s_lo, c_lo, s_hi, c_hi = _outer_lines(j, m, rb)
    aj = params.alpha * j**4
    w0s, w1s, w2s = aj + 2 * s_hi, aj + 2 * m, aj + 2 * s_lo
    D, E = 2 * c_hi, -2 * c_lo
    w0, w1, w2 = np.sqrt(w0s), np.sqrt(w1s), np.sqrt(w2s)
    B = np.sqrt(np.maximum(q - rb, 0.0) * (w0s * (q + rb) + 2 * D))
    # arctan forms of the arccos expressions; well conditioned as q -> r_bar
    dt0 = 2 * np.arctan2(w0 * B, w0s * rb + D) / w0
    dt1 = 2 * np.arctan2(w1 * rb, B) / w1
    dt2 = 2 * np.arctan2(w2 * B, w2s * rb + E) / w2
    bj = beta * j**2
    a0 = bj + 2 * params.gamma * s_hi
    a1 = bj + 2 * params.gamma * m
    a2 = bj + 2 * params.gamma * s_lo
    return dict(w=(w0, w1, w2), dt=(dt0, dt1, dt2), a2=(a0, a1, a2), rb=rb, B=B)


def barf_times(params: BridgeParams, m: float, r0: float, q: float, beta=None) -> PiecewiseSolution:
    """Switching data for amplitude q; ``beta`` overrides params.beta."""
    if not q > 0:
        raise ValueError("amplitude q must be positive")
    d = _bar_data(params, m, r0, q, params.beta if beta is None else beta)
    w0, w1, w2 = (float(x) for x in d["w"])
    dt0, dt1, dt2 = (float(x) for x in d["dt"])
    a0, a1, a2 = (float(x) for x in d["a2"])
    rb = d["rb"]
    if q <= rb:
        return PiecewiseSolution(q=float(q), regime=LINEAR, r_bar=rb, frequencies=(w1,),
                                 durations=(2 * np.pi / w1,), hill_squares=(a1,),
                                 period=2 * np.pi / w1)
    if params.j % 2 == 0:
        return PiecewiseSolution(q=float(q), regime=EVEN_J, r_bar=rb, frequencies=(w0, w1),
                                 durations=(dt0, dt1), hill_squares=(a0, a1),
                                 period=2 * dt0 + 2 * dt1)
    return PiecewiseSolution(q=float(q), regime=ODD_J, r_bar=rb, frequencies=(w0, w1, w2),
                             durations=(dt0, dt1, dt2), hill_squares=(a0, a1, a2),
                             period=dt0 + 2 * dt1 + dt2)


def barf_monodromy(params: BridgeParams, m, r0, q, beta):
    """Monodromy matrices of the bar system, broadcast over q and beta."""
    q, beta = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(beta, dtype=float))
    d = _bar_data(params, m, r0, q, beta)
    w1 = d["w"][1]
    (dt0, dt1, dt2), (a0, a1, a2) = d["dt"], d["a2"]
    if params.j % 2 == 0:
        dt2, a2 = dt0, a0
    a2s = np.stack([a0, a1, a2, a1], -1)
    dts = np.stack(np.broadcast_arrays(dt0, dt1, dt2, dt1), -1)
    M = step_monodromy(a2s, dts)
    lin = q <= d["rb"]
    if np.any(lin):
        M_lin = step_monodromy(a1[..., None], np.broadcast_to(2 * np.pi / w1, a1.shape)[..., None])
        M = np.where(lin[..., None, None], M_lin, M)
    return M


def barf_delta(params: BridgeParams, m, r0, q, beta):
    """Exact discriminant of the bar system; arrays broadcast."""
    if np.any(np.asarray(q) <= 0):
        raise ValueError("amplitude q must be positive")
    M = barf_monodromy(params, m, r0, q, beta)
    out = M[..., 0, 0] + M[..., 1, 1]
    return out if out.ndim else float(out)
