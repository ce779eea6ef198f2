"""Independent brute-force oracles used to freeze expected values.

These deliberately avoid the library's solver code paths: objectives are
re-stated from scratch and minimized by iteratively zoomed dense grids.
"""

from __future__ import annotations

import numpy as np


def zoom_grid_minimize(f, lower, upper, points=61, rounds=10, shrink=4):
    """Global grid search with repeated zooming around the incumbent.

    ``f`` must accept an (m, d) array of candidate points and return m values.
    Returns (argmin, min).
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    best_x, best_v = None, np.inf
    for _ in range(rounds):
        axes = [np.linspace(lo[d], hi[d], points) for d in range(lo.size)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = f(pts)
        k = int(np.argmin(vals))
        if vals[k] < best_v:
            best_x, best_v = pts[k], float(vals[k])
        span = (hi - lo) / (points - 1) * shrink
        lo = best_x - span
        hi = best_x + span
    return best_x, best_v


def lasso_objective_batch(x, y, lam):
    def f(pts):
        r = y[None, :] - pts @ x.T
        return np.einsum("kn,kn->k", r, r) + 2.0 * lam * np.abs(pts).sum(axis=1)
    return f


def lasso_grid_oracle(x, y, lam, points=41, rounds=12):
    """Brute-force minimizer of the factor-two l1 least-squares objective."""
    p = x.shape[1]
    box = float(y @ y) / (2.0 * lam) + 1.0  # objective at 0 bounds ||beta||_1
    return zoom_grid_minimize(lasso_objective_batch(x, y, lam),
                              [-box] * p, [box] * p, points=points, rounds=rounds)


def trex_objective_batch(x, y, c, pen_w=None):
    pen_w = np.ones(x.shape[1]) if pen_w is None else np.asarray(pen_w)

    def f(pts):
        r = y[None, :] - pts @ x.T
        q = r @ x
        dual = np.max(np.abs(q) / pen_w[None, :], axis=1)
        rss = np.einsum("kn,kn->k", r, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dual > 0, rss / (c * dual), np.inf)
        return ratio + np.abs(pts) @ pen_w
    return f


def trex_grid_oracle(x, y, c, points=81, rounds=12):
    """Brute-force global minimum of the nonconvex ratio objective (p <= 2)."""
    p = x.shape[1]
    q0 = np.abs(x.T @ y)
    box = float(y @ y) / (c * float(np.max(q0))) + 1.0  # penalty of any optimum
    return zoom_grid_minimize(trex_objective_batch(x, y, c),
                              [-box] * p, [box] * p, points=points, rounds=rounds)


def subproblem_objective_batch(x, y, c, j, s):
    def f(pts):
        r = y[None, :] - pts @ x.T
        d = s * (r @ x[:, j])
        rss = np.einsum("kn,kn->k", r, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(d > 0, rss / (c * d), np.inf)
        return vals + np.abs(pts).sum(axis=1)
    return f


def norm_batch(kind, weights, partition, pts):
    """Penalty norm of each row, re-stated from the definitions."""
    pts = np.asarray(pts, dtype=float)
    if kind == "l1":
        return np.abs(pts).sum(axis=1)
    if kind == "weighted_l1":
        return np.abs(pts) @ np.asarray(weights, dtype=float)
    total = np.zeros(pts.shape[0])
    for w, g in zip(weights, partition):
        total += w * np.sqrt(np.sum(pts[:, list(g)] ** 2, axis=1))
    return total


def prox_objective_min(kind, weights, partition, v, t, points=61, rounds=10):
    """Numerical minimum of the prox objective 0.5||z - v||^2 + t * omega(z)."""
    v = np.asarray(v, dtype=float)
    box = np.abs(v) + 1.0

    def f(pts):
        quad = 0.5 * np.einsum("kp,kp->k", pts - v[None, :], pts - v[None, :])
        return quad + t * norm_batch(kind, weights, partition, pts)

    return zoom_grid_minimize(f, -box, box, points=points, rounds=rounds)
