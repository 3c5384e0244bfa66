"""Restoring-force laws for the hangers.

Every model maps a displacement ``r`` (scalar or ndarray) to a force and
exposes the one-sided derivative, the derivative discontinuities ("kinks")
and the two asymptotic slopes needed by the projection and limit code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class AssumptionReport:
    S0: bool
    S1: bool
    S2: bool
    M: Optional[float] = None
    notes: tuple = ()

    def as_dict(self):
        return {"S0": self.S0, "S1": self.S1, "S2": self.S2, "M": self.M,
                "notes": list(self.notes)}


class SlackeningModel:
    """Common interface of the restoring-force variants."""

    name = "abstract"
    kinks: tuple = ()

    def f(self, r):
        raise NotImplementedError

    def fprime(self, r, side="right"):
        raise NotImplementedError

    @property
    def m_at_zero(self) -> float:
        return float(self.fprime(0.0))

    @property
    def M_asymptotic(self) -> Optional[float]:
        return None

    def assumptions(self) -> AssumptionReport:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    # parity helpers used by the projection module
    def f_odd(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * (self.f(r) - self.f(-r))

    def f_even(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * (self.f(r) + self.f(-r))

    def fprime_odd(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * (self.fprime(r) + self.fprime(-r))


@dataclass(frozen=True)
class MMK(SlackeningModel):
    """f(r) = m [(r + r0)^+ - r0]: linear spring that goes slack below -r0."""

    m: float
    r0: float
    name = "mmk"

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError("m must be positive", field="m")
        if not self.r0 >= 0:
            raise ValidationError("r0 must be non-negative", field="r0")

    @property
    def kinks(self):
        return (-self.r0,) if self.r0 > 0 else ()

    def f(self, r):
        r = np.asarray(r, dtype=float)
        return self.m * (np.maximum(r + self.r0, 0.0) - self.r0)

    def fprime(self, r, side="right"):
        r = np.asarray(r, dtype=float)
        s = r + self.r0
        on = s >= 0 if side == "right" else s > 0
        return np.where(on, self.m, 0.0)

    @property
    def m_at_zero(self):
        return self.m

    @property
    def M_asymptotic(self):
        return self.m

    def assumptions(self):
        notes = ("constant for r <= -r0: monotone, not strictly",)
        return AssumptionReport(S0=self.r0 > 0, S1=True, S2=True, M=self.m, notes=notes)

    def descriptor(self):
        return {"model": "mmk", "m": self.m, "r0": self.r0}


@dataclass(frozen=True)
class SqrtSmooth(SlackeningModel):
    """f(r) = m r + sqrt((m r)^2 + h^2) - h."""

    m: float
    h: float
    name = "sqrt"

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError("m must be positive", field="m")
        if not self.h > 0:
            raise ValidationError("h must be positive", field="h")

    def f(self, r):
        mr = self.m * np.asarray(r, dtype=float)
        return mr + np.hypot(mr, self.h) - self.h

    def fprime(self, r, side="right"):
        mr = self.m * np.asarray(r, dtype=float)
        return self.m + self.m * mr / np.hypot(mr, self.h)

    def f_odd(self, r):
        # exact: the square-root term is even
        return self.m * np.asarray(r, dtype=float)

    def f_even(self, r):
        mr = self.m * np.asarray(r, dtype=float)
        return np.hypot(mr, self.h) - self.h

    def fprime_odd(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.m)

    @property
    def m_at_zero(self):
        return self.m

    @property
    def M_asymptotic(self):
        return 2.0 * self.m

    def assumptions(self):
        return AssumptionReport(S0=True, S1=True, S2=True, M=2.0 * self.m)

    def descriptor(self):
        return {"model": "sqrt", "m": self.m, "h": self.h}


@dataclass(frozen=True)
class Exponential(SlackeningModel):
    """f(r) = h (exp(m r / h) - 1); grows without bound, so no asymptotic slope."""

    m: float
    h: float
    name = "exp"

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError("m must be positive", field="m")
        if not self.h > 0:
            raise ValidationError("h must be positive", field="h")

    def f(self, r):
        return self.h * np.expm1(self.m * np.asarray(r, dtype=float) / self.h)

    def fprime(self, r, side="right"):
        return self.m * np.exp(self.m * np.asarray(r, dtype=float) / self.h)

    @property
    def m_at_zero(self):
        return self.m

    def assumptions(self):
        return AssumptionReport(S0=True, S1=True, S2=False, M=None,
                                notes=("f' diverges as r -> +inf",))

    def descriptor(self):
        return {"model": "exp", "m": self.m, "h": self.h}


@dataclass(frozen=True)
class PiecewiseLinear(SlackeningModel):
    """Linear interpolation through ``knots``; end segments are extrapolated.

    Knot values must be non-decreasing, the segment containing the origin must
    have a positive slope and pass through (0, 0), and the origin may not be a
    knot (no kink at zero).
    """

    knots: tuple
    name = "piecewise"
    _r: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)
    _s: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.knots)
        object.__setattr__(self, "knots", pts)
        if len(pts) < 2:
            raise ValidationError("piecewise model needs at least two knots", field="knots")
        r = np.array([p[0] for p in pts])
        v = np.array([p[1] for p in pts])
        if np.any(np.diff(r) <= 0):
            raise ValidationError("knot abscissae must be strictly increasing", field="knots")
        s = np.diff(v) / np.diff(r)
        if np.any(s < 0):
            raise ValidationError("knot values must be non-decreasing", field="knots")
        if np.any(r == 0.0) and 0 < np.searchsorted(r, 0.0) < len(r) - 1:
            raise ValidationError("the origin may not be an interior knot", field="knots")
        object.__setattr__(self, "_r", r)
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_s", s)
        if abs(float(self.f(0.0))) > 1e-12 * max(1.0, np.abs(v).max()):
            raise ValidationError("piecewise model must satisfy f(0) = 0", field="knots")
        if not self.m_at_zero > 0:
            raise ValidationError("slope at the origin must be positive", field="knots")

    @property
    def kinks(self):
        inner = [self._r[i + 1] for i in range(len(self._s) - 1)
                 if self._s[i] != self._s[i + 1]]
        return tuple(float(x) for x in inner)

    def _segment(self, r, side):
        side_arg = "right" if side == "right" else "left"
        idx = np.searchsorted(self._r, r, side=side_arg) - 1
        return np.clip(idx, 0, len(self._s) - 1)

    def f(self, r):
        r = np.asarray(r, dtype=float)
        i = self._segment(r, "right")
        return self._v[i] + self._s[i] * (r - self._r[i])

    def fprime(self, r, side="right"):
        r = np.asarray(r, dtype=float)
        return self._s[self._segment(r, side)]

    @property
    def m_at_zero(self):
        return float(self._s[self._segment(0.0, "right")])

    @property
    def M_asymptotic(self):
        return float(self._s[-1]) if self._s[-1] > 0 else None

    def assumptions(self):
        return AssumptionReport(S0=True, S1=bool(self._s[0] == 0.0),
                                S2=bool(self._s[-1] > 0), M=self.M_asymptotic,
                                notes=("asymptotics read from the end segments",))

    def descriptor(self):
        return {"model": "piecewise", "knots": [list(p) for p in self.knots]}


def eval_f(model: SlackeningModel, r):
    return model.f(r)


def eval_fprime(model: SlackeningModel, r, side="right"):
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    return model.fprime(r, side)


def check_assumptions(model: SlackeningModel) -> AssumptionReport:
    return model.assumptions()


def load_knots_csv(path) -> tuple:
    """Read ``r,f`` pairs (header optional) for a PiecewiseLinear model."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                if rows:
                    raise
    return tuple(rows)
