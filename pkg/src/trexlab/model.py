"""Regression data model and shared numeric helpers.

The linear model is y = x @ beta_star + epsilon with an n-by-p design whose
columns are scaled to Euclidean norm sqrt(n). All containers are immutable
after construction so they can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NotNormalizedError, ZeroColumnError

NORMALIZATION_ATOL = 1e-8


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RegressionProblem:
    """A dense design matrix and response pair.

    ``normalized`` records whether every column of ``x`` has norm sqrt(n);
    solvers refuse unnormalized problems unless explicitly overridden.
    """

    x: np.ndarray
    y: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x))
        object.__setattr__(self, "y", _frozen(self.y))
        if self.x.ndim != 2:
            raise DimensionError(f"design must be 2-d, got shape {self.x.shape}")
        if self.y.ndim != 1 or self.y.shape[0] != self.x.shape[0]:
            raise DimensionError(
                f"response shape {self.y.shape} does not match design {self.x.shape}"
            )
        n, p = self.x.shape
        if n < 1 or p < 1:
            raise DimensionError("need n >= 1 and p >= 1")
        if not (np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise ValueError("design and response must be finite")
        if self.normalized:
            norms = np.linalg.norm(self.x, axis=0)
            if np.max(np.abs(norms - np.sqrt(n))) > NORMALIZATION_ATOL:
                raise NotNormalizedError(
                    "normalized flag set but some column norm differs from sqrt(n)"
                )

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """Synthetic-only knowledge: true coefficients, noise and support."""

    beta_star: np.ndarray
    epsilon: np.ndarray
    sigma: float
    support: np.ndarray = field(default=None)
    sparsity: int = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "beta_star", _frozen(self.beta_star))
        object.__setattr__(self, "epsilon", _frozen(self.epsilon))
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        support = np.flatnonzero(self.beta_star)
        if self.support is not None:
            given = np.asarray(self.support, dtype=int)
            if not np.array_equal(np.sort(given), support):
                raise ValueError("support does not match nonzeros of beta_star")
        object.__setattr__(self, "support", _frozen(support, dtype=int))
        object.__setattr__(self, "sparsity", int(support.size))


@dataclass(frozen=True)
class Residual:
    """Residual vector r = y - x @ beta and its correlations x.T @ r."""

    r: np.ndarray
    correlation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _frozen(self.r))
        object.__setattr__(self, "correlation", _frozen(self.correlation))


def normalize_columns(x) -> tuple[np.ndarray, np.ndarray]:
    """Rescale every column of ``x`` to Euclidean norm sqrt(n).

    Returns the rescaled matrix and the per-column multipliers ``scale`` such
    that the returned matrix equals ``x * scale``. Coefficient estimates in
    normalized coordinates map back to original coordinates as
    ``beta_original = scale * beta_normalized``.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    norms = np.linalg.norm(x, axis=0)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    scale = np.sqrt(n) / norms
    return x * scale, scale


def denormalize_coefficients(beta, scale) -> np.ndarray:
    """Map a coefficient vector from normalized back to original coordinates."""
    return np.asarray(beta, dtype=float) * np.asarray(scale, dtype=float)


def make_problem(x, y, normalize: bool = True):
    """Build a :class:`RegressionProblem`, normalizing columns by default.

    Returns ``(problem, scale)``; ``scale`` is all ones when ``normalize`` is
    false.
    """
    x = np.asarray(x, dtype=float)
    if normalize:
        xn, scale = normalize_columns(x)
        n = x.shape[0]
        normalized = True
    else:
        xn = x
        scale = np.ones(x.shape[1])
        n = x.shape[0]
        normalized = bool(
            np.max(np.abs(np.linalg.norm(xn, axis=0) - np.sqrt(n))) <= NORMALIZATION_ATOL
        )
    return RegressionProblem(xn, y, normalized=normalized), scale


def residual(problem: RegressionProblem, beta) -> Residual:
    """Residual r = y - x @ beta together with correlations x.T @ r."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (problem.p,):
        raise DimensionError(f"beta has shape {beta.shape}, expected ({problem.p},)")
    r = problem.y - problem.x @ beta
    return Residual(r, problem.x.T @ r)


def prediction_loss(problem: RegressionProblem, truth: GroundTruth, beta) -> float:
    """In-sample prediction loss ||x (beta - beta_star)||_2^2 / n."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (problem.p,):
        raise DimensionError(f"beta has shape {beta.shape}, expected ({problem.p},)")
    diff = problem.x @ (beta - truth.beta_star)
    return float(diff @ diff) / problem.n


def verify_model_identity(problem: RegressionProblem, truth: GroundTruth,
                          rtol: float = 1e-10, atol: float = 1e-12) -> bool:
    """Check y = x @ beta_star + epsilon for a paired synthetic instance."""
    gap = problem.y - problem.x @ truth.beta_star - truth.epsilon
    ref = np.linalg.norm(problem.y)
    return float(np.linalg.norm(gap)) <= max(rtol * ref, atol)
