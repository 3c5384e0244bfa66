"""(q, beta) stability grids, tongue tips and diagram export."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .flexural import DEFAULT_ATOL, DEFAULT_RTOL, periods
from .floquet import CLASS_TOL, FAILED, UNSTABLE, classify_array, det_error, monodromy_lanes
from .params import BridgeParams, serialize_params
from .piecewise import BarKernel, BarModel, barf_delta
from .projection import ProjectionKernel
from .slackening import MMK

ENGINES = ("numeric", "closed_form")

# plain-PGM tones
WHITE, LIGHT, DARK, FAILED_TONE = 255, 191, 95, 0


@dataclass
class StabilityGrid:
    q_axis: np.ndarray
    beta_axis: np.ndarray
    delta: np.ndarray  # (n_beta, n_q)
    cls: np.ndarray
    meta: dict = field(default_factory=dict)
    det_error: np.ndarray = None  # raw |det M - 1|, numeric engine only

    def __post_init__(self):
        shape = (len(self.beta_axis), len(self.q_axis))
        if self.delta.shape != shape or self.cls.shape != shape:
            raise ValueError(f"grid arrays must have shape {shape}")

    @property
    def n_failed(self) -> int:
        return int(np.sum(self.cls == FAILED))


def make_axis(lo, hi, n):
    if n < 1:
        raise ConfigError("axis needs at least one point")
    if n > 1 and not hi > lo:
        raise ConfigError(f"axis range {lo}:{hi} is empty")
    return np.linspace(lo, hi, n) if n > 1 else np.array([float(lo)])


def kernel_for(model, j, k, quad_tol=1e-10):
    """Kernel driving the numeric engine: bar kernel, MMK closed form, or quadrature."""
    if isinstance(model, BarModel):
        return BarKernel(model, j, k)
    engine = "closed_form" if isinstance(model, MMK) else "quadrature"
    return ProjectionKernel(model, j, k, engine=engine, quad_tol=quad_tol)


def _numeric_chunk(params, kernel, q, beta, tau, rtol, atol):
    res = monodromy_lanes(params, kernel, q, beta, tau=tau, rtol=rtol, atol=atol)
    return res.delta, det_error(res.matrix)


def _numeric_cells(params, kernel, q, beta, tau, rtol, atol, jobs):
    if jobs <= 1 or len(q) < 2 * jobs:
        return _numeric_chunk(params, kernel, q, beta, tau, rtol, atol)
    # lanes are independent, so chunking cannot change any value
    bounds = np.linspace(0, len(q), jobs + 1).astype(int)
    parts = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futs = [ex.submit(_numeric_chunk, params, kernel, q[s], beta[s],
                          None if tau is None else tau[s], rtol, atol) for s in parts]
        out = [f.result() for f in futs]
    return np.concatenate([o[0] for o in out]), np.concatenate([o[1] for o in out])


def sweep_grid(params: BridgeParams, model, q_axis, beta_axis, engine="numeric",
               rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, class_tol=CLASS_TOL, cache=True,
               jobs=1, quad_tol=1e-10) -> StabilityGrid:
    """Discriminant on every (beta, q) cell.  Rows follow beta, columns q.

    The numeric engine finds each column's period once (``cache=True``) and
    integrates every cell as its own lane; failed cells come back NaN with
    class ``failed``.
    """
    q_axis = np.asarray(q_axis, dtype=float)
    beta_axis = np.asarray(beta_axis, dtype=float)
    if q_axis.ndim != 1 or beta_axis.ndim != 1 or not len(q_axis) or not len(beta_axis):
        raise ConfigError("axes must be non-empty 1-D arrays")
    if np.any(q_axis <= 0):
        raise ConfigError("amplitudes must be positive")
    if engine not in ENGINES:
        raise ConfigError(f"unknown engine {engine!r}; expected one of {', '.join(ENGINES)}")
    start = time.perf_counter()
    Q, Bt = np.meshgrid(q_axis, beta_axis)
    dets = None
    if engine == "closed_form":
        if not isinstance(model, BarModel):
            raise ConfigError("the closed-form engine needs the mmk-bar model")
        if params.j != params.k:
            raise ConfigError("the closed-form engine needs j = k")
        delta = barf_delta(params, model.m, model.r0, Q, Bt)
    else:
        kernel = kernel_for(model, params.j, params.k, quad_tol)
        tau = None
        if cache:
            tau_col, _ = periods(params, kernel, q_axis, rtol=rtol, atol=atol)
            tau = np.broadcast_to(tau_col, Q.shape).ravel()
        d, e = _numeric_cells(params, kernel, Q.ravel(), Bt.ravel(), tau, rtol, atol, jobs)
        delta, dets = d.reshape(Q.shape), e.reshape(Q.shape)
    meta = {
        "params": serialize_params(params),
        "model": model.descriptor(),
        "engine": engine,
        "rtol": rtol, "atol": atol, "class_tol": class_tol,
        "wall_time": time.perf_counter() - start,
    }
    return StabilityGrid(q_axis=q_axis, beta_axis=beta_axis, delta=np.asarray(delta, dtype=float),
                         cls=classify_array(delta, class_tol), meta=meta, det_error=dets)


# ---------------------------------------------------------------------------
# tongue tips
# ---------------------------------------------------------------------------

def tongue_tips(params: BridgeParams, m: float, N_max: int, gamma=None):
    """Where the instability tongues meet the beta axis at small amplitude.

    Returns (N, beta_N, vanished).  For even j the odd-N tongues vanish.
    """
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    j, k = params.j, params.k
    g = params.gamma if gamma is None else gamma
    w2 = params.alpha * j**4 + 2 * m
    out = []
    for N in range(1, N_max + 1):
        beta_N = (w2 * N**2 / 4 - 2 * g * m) / k**2
        out.append((N, beta_N, j % 2 == 0 and N % 2 == 1))
    return out


def detect_bands(beta_axis, delta_column, class_tol=CLASS_TOL):
    """Contiguous runs of same-sign unstable cells along one column.

    Each band is (beta_lo, beta_hi, sign, i_lo, i_hi).
    """
    d = np.asarray(delta_column, dtype=float)
    unstable = np.abs(d) > 2 + class_tol
    bands = []
    i = 0
    while i < len(d):
        if unstable[i]:
            j = i
            while j + 1 < len(d) and unstable[j + 1] and np.sign(d[j + 1]) == np.sign(d[i]):
                j += 1
            bands.append((float(beta_axis[i]), float(beta_axis[j]), int(np.sign(d[i])), i, j))
            i = j + 1
        else:
            i += 1
    return bands


def match_tips(bands, tips, beta_axis):
    """Distance, in grid cells, from each predicted tip to the nearest band."""
    beta_axis = np.asarray(beta_axis, dtype=float)
    out = []
    for N, beta_N, vanished in tips:
        i_tip = int(np.argmin(np.abs(beta_axis - beta_N)))
        best, dist = None, float("inf")
        for band in bands:
            lo, hi, _, i_lo, i_hi = band
            d = max(i_lo - i_tip, i_tip - i_hi, 0)
            if d < dist:
                best, dist = band, d
        out.append({"N": N, "beta_N": beta_N, "vanished": vanished,
                    "band": None if best is None else [best[0], best[1]],
                    "distance_cells": dist})
    return out


def linear_threshold(model) -> float:
    """Largest amplitude whose orbit never leaves the linear band of the force."""
    return model.r_bar if isinstance(model, BarModel) else float(model.r0)


def tip_report(grid: StabilityGrid, params: BridgeParams, m: float, threshold: float, N_max=5):
    """Band crossings in the first column past ``threshold``, matched to the predicted tips."""
    qs = grid.q_axis
    past = np.nonzero(qs > threshold)[0]
    if not len(past) or len(grid.beta_axis) < 2:
        return {"column_q": None, "bands": [], "tips": []}
    c = int(past[0])
    bands = detect_bands(grid.beta_axis, grid.delta[:, c], grid.meta.get("class_tol", CLASS_TOL))
    tips = [t for t in tongue_tips(params, m, N_max)
            if grid.beta_axis[0] <= t[1] <= grid.beta_axis[-1]]
    return {"column_q": float(qs[c]), "bands": bands,
            "tips": match_tips(bands, tips, grid.beta_axis)}


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def to_csv(grid: StabilityGrid) -> str:
    lines = ["q,beta,delta,class"]
    for i, b in enumerate(grid.beta_axis):
        for jq, q in enumerate(grid.q_axis):
            lines.append(f"{q:.17g},{b:.17g},{grid.delta[i, jq]:.17g},{grid.cls[i, jq]}")
    return "\n".join(lines) + "\n"


def tones(grid: StabilityGrid) -> np.ndarray:
    t = np.full(grid.delta.shape, WHITE, dtype=int)
    unstable = grid.cls == UNSTABLE
    t[unstable & (grid.delta > 0)] = LIGHT
    t[unstable & (grid.delta < 0)] = DARK
    t[grid.cls == FAILED] = FAILED_TONE
    return t


def to_pgm(grid: StabilityGrid) -> str:
    """Plain PGM; x = q to the right, beta increasing upwards."""
    t = tones(grid)[::-1]
    h, w = t.shape
    rows = [" ".join(str(v) for v in row) for row in t]
    return f"P2\n{w} {h}\n255\n" + "\n".join(rows) + "\n"


def summary(grid: StabilityGrid, tips=None) -> dict:
    counts = {c: int(np.sum(grid.cls == c)) for c in np.unique(grid.cls)}
    out = {"meta": grid.meta, "shape": list(grid.delta.shape),
           "q_range": [float(grid.q_axis[0]), float(grid.q_axis[-1])],
           "beta_range": [float(grid.beta_axis[0]), float(grid.beta_axis[-1])],
           "class_counts": counts, "failed_cells": grid.n_failed}
    if tips is not None:
        out["tongue_tips"] = tips
    if grid.det_error is not None:
        out["max_det_error"] = float(np.nanmax(grid.det_error)) if np.any(np.isfinite(grid.det_error)) else None
    return out


def export(grid: StabilityGrid, fmt: str, path, tips=None):
    if fmt == "csv":
        text = to_csv(grid)
    elif fmt == "pgm":
        text = to_pgm(grid)
    elif fmt == "json":
        text = json.dumps(summary(grid, tips), indent=2, default=_jsonable) + "\n"
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


# ---------------------------------------------------------------------------
# engine comparison
# ---------------------------------------------------------------------------

def compare_engines(params: BridgeParams, model, q_axis, beta_axis, rtol=DEFAULT_RTOL,
                    atol=DEFAULT_ATOL, jobs=1) -> dict:
    """Run both engines on one grid and report the largest disagreement."""
    if not isinstance(model, BarModel):
        raise ConfigError("engine comparison needs the mmk-bar model")
    if params.j != params.k:
        raise ConfigError("engine comparison needs j = k")
    closed = sweep_grid(params, model, q_axis, beta_axis, engine="closed_form")
    num = sweep_grid(params, model, q_axis, beta_axis, engine="numeric", rtol=rtol, atol=atol,
                     jobs=jobs)
    diff = np.abs(num.delta - closed.delta)
    rel = diff / np.maximum(1.0, np.abs(closed.delta))
    i, jq = np.unravel_index(np.nanargmax(diff), diff.shape)
    ir, jr = np.unravel_index(np.nanargmax(rel), rel.shape)
    return {
        "max_abs": float(diff[i, jq]),
        "cell": {"q": float(num.q_axis[jq]), "beta": float(num.beta_axis[i]),
                 "delta_closed": float(closed.delta[i, jq]), "delta_numeric": float(num.delta[i, jq])},
        "max_rel": float(rel[ir, jr]),
        "rel_cell": {"q": float(num.q_axis[jr]), "beta": float(num.beta_axis[ir])},
        "failed_cells": num.n_failed,
        "max_det_error": float(np.nanmax(num.det_error)),
        "shape": list(diff.shape),
        "grids": (closed, num),
    }
