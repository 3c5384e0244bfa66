"""Galerkin-projected nonlinearities of the j-k mode system.

All integrals live on x in [0, pi].  Quadrature panels are split at every
x where the argument of f crosses a kink of f, and at the zeros of sin(jx),
so each panel sees a smooth integrand.  For the MMK law the closed forms
are available as a second, independent route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import quadrature
from .errors import ConfigError
from .slackening import MMK, SlackeningModel

TWO_OVER_PI = 2.0 / np.pi


# ---------------------------------------------------------------------------
# finite sums and the Heaviside integral
# ---------------------------------------------------------------------------

def q_factor(j: int, k: int) -> int:
    """sum_{n=1..j} cos(2 k n pi / j): j when j divides k, else 0."""
    return j if k % j == 0 else 0


def p_factor(j: int, k: int) -> float:
    """sum_{n=1..j} (-1)^n sin(2 k n pi / j): 0 for even j, -tan(k pi / j) for odd j."""
    if j % 2 == 0:
        return 0.0
    return -np.tan(k * np.pi / j)


def mmk_H(j: int, k: int, r0: float, r):
    """int_0^pi H(r sin jx + r0) sin^2 kx dx, vectorised over r."""
    r = np.asarray(r, dtype=float)
    out = np.full(r.shape, 0.5 * np.pi)
    absr = np.abs(r)
    outside = absr > r0
    if not np.any(outside):
        return out if out.ndim else float(out)
    ro = r[outside]
    theta = np.arcsin(r0 / np.abs(ro))
    arg = 2.0 * k * theta / j
    val = 0.25 * np.pi + 0.5 * theta - q_factor(j, k) / (4.0 * k) * np.sin(arg)
    if j % 2 == 1:
        val = val + np.sign(ro) * (
            0.25 * np.pi / j - 0.5 * theta / j
            + p_factor(j, k) / (4.0 * k) * np.cos(arg)
            + np.sin(arg) / (4.0 * k)
        )
    out[outside] = val
    return out if out.ndim else float(out)


def mmk_f_tilde(m: float, r0: float, r):
    """Closed form of (2/pi) int_0^pi f(r sin x) sin x dx for the MMK law."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    out = m * r
    low = r < -r0
    if np.any(low):
        ratio = r0 / r[low]
        out[low] = -TWO_OVER_PI * m * r0 * (np.arcsin(ratio) / ratio + np.sqrt(1.0 - ratio**2))
    return float(out[0]) if scalar else out


def epsilon_jk(j: int, k: int) -> float:
    return 1.0 / j - np.tan(np.pi * k / j) / (k * np.pi)


def limit_h(j: int, M: float, r):
    """High-energy limit of f_j: (2M/pi) int (r sin jx)^+ sin jx dx."""
    r = np.asarray(r, dtype=float)
    if j % 2 == 0:
        out = 0.5 * M * r
    else:
        out = 0.5 * M * (1.0 + np.where(r >= 0, 1.0, -1.0) / j) * r
    return out if out.ndim else float(out)


def limit_s(j: int, k: int, M: float, r):
    """High-energy limit of g_jk.  At r = 0 the r > 0 branch is returned."""
    r = np.asarray(r, dtype=float)
    if j % 2 == 0:
        out = np.full(r.shape, 0.5 * M)
    else:
        sgn = np.where(r >= 0, 1.0, -1.0)
        out = 0.5 * M * (1.0 + sgn * epsilon_jk(j, k))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# quadrature routes
# ---------------------------------------------------------------------------

def _sine_breaks(j: int, r: float, kinks) -> list:
    """Panel boundaries in [0, pi] for integrands in f(r sin jx)."""
    pts = [n * np.pi / j for n in range(j + 1)]
    if r != 0.0:
        for c in kinks:
            s = c / r
            if abs(s) > 1.0:
                continue
            base = np.arcsin(s)
            for n in range(-1, j + 1):
                for z in (base + 2 * np.pi * n, np.pi - base + 2 * np.pi * n):
                    if 0.0 < z < j * np.pi:
                        pts.append(z / j)
    return sorted(pts)


def _project(model, j, r, integrand, tol):
    """Evaluate (2/pi) int_0^pi integrand(rr, x) dx for every rr in r."""
    r = np.asarray(r, dtype=float)
    flat = r.ravel()
    kinks = tuple(model.kinks)
    # every r refines its own panels, so a value never depends on its batch
    breaks = [_sine_breaks(j, rr, kinks) for rr in flat]
    out = TWO_OVER_PI * quadrature.integrate_many(lambda x, own: integrand(flat[own], x),
                                                  breaks, tol=tol / TWO_OVER_PI)
    out = out.reshape(r.shape)
    return out if out.ndim else float(out)


def f_tilde(model: SlackeningModel, r, engine="quadrature", tol=1e-10):
    """(2/pi) int_0^pi f(r sin x) sin x dx."""
    if engine == "closed_form":
        _require_mmk(model)
        return mmk_f_tilde(model.m, model.r0, r)
    return _project(model, 1, r, lambda rr, x: model.f(rr * np.sin(x)) * np.sin(x), tol)


class _Part(SlackeningModel):
    """Odd or even part of a model, usable wherever a model is."""

    def __init__(self, model, odd):
        self.model, self.odd = model, odd
        self.kinks = tuple(sorted({c for k in model.kinks for c in (k, -k)}))

    def f(self, r):
        return self.model.f_odd(r) if self.odd else self.model.f_even(r)


def f_j(model: SlackeningModel, j: int, r, engine="quadrature", route="direct", tol=1e-10):
    """(2/pi) int_0^pi f(r sin jx) sin jx dx.

    ``route="parity"`` goes through the transform of the odd and even parts
    instead of the defining integral.
    """
    if engine == "closed_form":
        _require_mmk(model)
        return _parity_combine(j, mmk_f_tilde(model.m, model.r0, r),
                               mmk_f_tilde(model.m, model.r0, -np.asarray(r, dtype=float)))
    if route == "parity":
        odd = f_tilde(_Part(model, True), r, tol=tol)
        even = f_tilde(_Part(model, False), r, tol=tol) if j % 2 else 0.0
        return odd + (even / j if j % 2 else 0.0)
    return _project(model, j, r,
                    lambda rr, x: model.f(rr * np.sin(j * x)) * np.sin(j * x), tol)


def _parity_combine(j, ft_pos, ft_neg):
    odd = 0.5 * (ft_pos - ft_neg)
    if j % 2 == 0:
        return odd
    return odd + 0.5 * (ft_pos + ft_neg) / j


def g_jk(model: SlackeningModel, j: int, k: int, r, engine="quadrature", tol=1e-10):
    """(2/pi) int_0^pi f'(r sin jx) sin^2 kx dx."""
    if engine == "closed_form":
        _require_mmk(model)
        return TWO_OVER_PI * model.m * mmk_H(j, k, model.r0, r)
    return _project(model, j, r,
                    lambda rr, x: model.fprime(rr * np.sin(j * x)) * np.sin(k * x) ** 2, tol)


def _argument_breaks(j, k, y, z, kinks, sign):
    """Roots in (0, pi) of y sin jx + sign z sin kx = c for every kink c."""
    pts = [n * np.pi / j for n in range(j + 1)] + [n * np.pi / k for n in range(k + 1)]
    if not kinks:
        return sorted(set(pts))
    grid = np.linspace(0.0, np.pi, 256 * max(j, k) + 1)

    def arg(x):
        return y * np.sin(j * x) + sign * z * np.sin(k * x)

    vals = arg(grid)
    for c in kinks:
        d = vals - c
        idx = np.nonzero(d[:-1] * d[1:] < 0)[0]
        for i in idx:
            pts.append(brentq(lambda x: arg(x) - c, grid[i], grid[i + 1], xtol=1e-15))
        pts.extend(grid[np.nonzero(d == 0.0)[0]])
    return sorted(set(pts))


def _psi(model, j, k, y, z, parity, weight_k, tol):
    kinks = tuple(model.kinks)
    pts = sorted(set(_argument_breaks(j, k, y, z, kinks, 1.0)
                     + _argument_breaks(j, k, y, z, kinks, -1.0)))

    def integrand(x):
        a, b = y * np.sin(j * x), z * np.sin(k * x)
        w = np.sin(k * x) if weight_k else np.sin(j * x)
        return (model.f(a + b) + parity * model.f(a - b)) * w

    return TWO_OVER_PI * quadrature.integrate(integrand, pts, tol=tol / TWO_OVER_PI)


def psi_1(model: SlackeningModel, j: int, k: int, y: float, z: float, tol=1e-10) -> float:
    return _psi(model, j, k, float(y), float(z), 1.0, False, tol)


def psi_2(model: SlackeningModel, j: int, k: int, y: float, z: float, tol=1e-10) -> float:
    if z == 0.0:
        return 0.0
    return _psi(model, j, k, float(y), float(z), -1.0, True, tol)


def _require_mmk(model):
    if not isinstance(model, MMK):
        raise ConfigError(f"closed-form projection is only available for the MMK law, not {model.name!r}")


# ---------------------------------------------------------------------------
# kernel consumed by the integrators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionKernel:
    """f_j and g_jk of one model for one (j, k) pair.

    ``breakpoints`` are the displacements where the right-hand side of the
    flexural or Hill equation stops being smooth; integrators stop on them.
    """

    model: SlackeningModel
    j: int
    k: int
    engine: str = "quadrature"
    quad_tol: float = 1e-10

    discontinuous = False

    def __post_init__(self):
        if self.engine not in ("quadrature", "closed_form"):
            raise ConfigError(f"unknown projection engine {self.engine!r}")
        if self.engine == "closed_form":
            _require_mmk(self.model)
        if not self.quad_tol > 0:
            raise ConfigError("quad_tol must be positive")
        if self.j < 1 or self.k < 1:
            raise ConfigError("mode indices must be >= 1")

    @property
    def m(self) -> float:
        return self.model.m_at_zero

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted({c for r in self.model.kinks for c in (abs(r), -abs(r))}))

    def fj(self, r, piece=None):
        return f_j(self.model, self.j, r, engine=self.engine, tol=self.quad_tol)

    def gjk(self, r, piece=None):
        return g_jk(self.model, self.j, self.k, r, engine=self.engine, tol=self.quad_tol)

    def Fj(self, r):
        """int_0^r f_j(s) ds."""
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        breaks = [[0.0, rr] + [b for b in self.breakpoints if min(0.0, rr) < b < max(0.0, rr)]
                  for rr in flat]
        val = quadrature.integrate_many(lambda s, own: self.fj(s), breaks, tol=self.quad_tol)
        out = np.where(flat >= 0, val, -val).reshape(r.shape)
        return out if out.ndim else float(out)
