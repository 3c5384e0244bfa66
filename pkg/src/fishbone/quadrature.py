"""Composite Gauss-Legendre quadrature with adaptive bisection.

Panels are refined breadth first: every level evaluates the integrand once on
the nodes of all still-open panels, so the integrand only has to accept a 1-D
array of abscissae.  It may return extra leading axes (a batch of parameter
values); a panel is closed when the error estimate over the whole batch meets
its share of the tolerance.
"""

from functools import lru_cache

import numpy as np

from .errors import AccuracyError

DEFAULT_ORDER = 16
MAX_LEVELS = 40


@lru_cache(maxsize=8)
def _rule(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_sums(func, a, b, order):
    """GL sums on panels [a_i, b_i]; returns (..., n_panels)."""
    x, w = _rule(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(func(nodes), dtype=float)
    vals = vals.reshape(vals.shape[:-1] + (len(a), order))
    return (vals @ w) * half


def integrate(func, breakpoints, tol=1e-10, order=DEFAULT_ORDER, max_levels=MAX_LEVELS):
    """Integrate ``func`` over [breakpoints[0], breakpoints[-1]].

    Interior breakpoints are panel boundaries that are never straddled, which
    is where the integrand may be non-smooth.  ``tol`` is absolute.
    """
    pts = np.unique(np.asarray(breakpoints, dtype=float))
    if len(pts) < 2:
        probe = np.asarray(func(np.array([pts[0]] if len(pts) else [0.0])))
        return np.zeros(probe.shape[:-1]) if probe.ndim > 1 else 0.0
    a, b = pts[:-1], pts[1:]
    keep = b - a > 0
    a, b = a[keep], b[keep]
    total_len = pts[-1] - pts[0]

    coarse = _panel_sums(func, a, b, order)
    result = np.zeros(coarse.shape[:-1])
    err_total = 0.0
    for _ in range(max_levels):
        n = len(a)
        m = 0.5 * (a + b)
        left = np.concatenate([a, m])
        right = np.concatenate([m, b])
        children = _panel_sums(func, left, right, order)
        fine = children[..., :n] + children[..., n:]
        err = np.abs(fine - coarse)
        if err.ndim > 1:
            err = err.reshape(-1, n).max(axis=0)
        done = err <= tol * (b - a) / total_len
        if np.any(done):
            result = result + fine[..., done].sum(axis=-1)
            err_total += float(err[done].sum())
        if np.all(done):
            return result if result.ndim else float(result)
        open2 = np.concatenate([~done, ~done])
        a, b = left[open2], right[open2]
        coarse = children[..., open2]
    remaining = float(np.abs(coarse).sum())
    raise AccuracyError(
        f"quadrature did not converge to {tol:g} after {max_levels} bisections",
        achieved=err_total + remaining,
    )


def integrate_many(func, breaks, tol=1e-10, order=DEFAULT_ORDER, max_levels=MAX_LEVELS):
    """Many independent integrals, each with its own breakpoints.

    ``breaks`` is a sequence of breakpoint lists, one per integral.
    ``func(x, owner)`` evaluates integral ``owner[i]``'s integrand at
    ``x[i]``.  All panels of all integrals are refined together, and each
    integral gets an absolute tolerance ``tol``.
    """
    a_list, b_list, own_list, lengths = [], [], [], []
    for i, br in enumerate(breaks):
        pts = np.unique(np.asarray(br, dtype=float))
        lengths.append(pts[-1] - pts[0] if len(pts) > 1 else 0.0)
        if len(pts) < 2:
            continue
        keep = pts[1:] > pts[:-1]
        a_list.append(pts[:-1][keep])
        b_list.append(pts[1:][keep])
        own_list.append(np.full(int(keep.sum()), i))
    n_int = len(lengths)
    result = np.zeros(n_int)
    if not a_list:
        return result
    a, b, own = np.concatenate(a_list), np.concatenate(b_list), np.concatenate(own_list)
    lengths = np.asarray(lengths)
    x, w = _rule(order)

    def sums(a, b, own):
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        nodes = mid[:, None] + half[:, None] * x[None, :]
        vals = np.asarray(func(nodes.ravel(), np.repeat(own, order)), dtype=float)
        return (vals.reshape(len(a), order) @ w) * half

    coarse = sums(a, b, own)
    err_total = np.zeros(n_int)
    for _ in range(max_levels):
        n = len(a)
        m = 0.5 * (a + b)
        left = np.concatenate([a, m])
        right = np.concatenate([m, b])
        own2 = np.concatenate([own, own])
        children = sums(left, right, own2)
        fine = children[:n] + children[n:]
        err = np.abs(fine - coarse)
        done = err <= tol * (b - a) / lengths[own]
        np.add.at(result, own[done], fine[done])
        np.add.at(err_total, own[done], err[done])
        if np.all(done):
            return result
        open2 = np.concatenate([~done, ~done])
        a, b, own = left[open2], right[open2], own2[open2]
        coarse = children[open2]
    raise AccuracyError(
        f"quadrature did not converge to {tol:g} after {max_levels} bisections",
        achieved=float(err_total.max() + np.abs(coarse).sum()),
    )
