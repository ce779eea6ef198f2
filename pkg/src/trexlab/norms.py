"""Penalty norms, their duals, and proximity operators.

Three penalty families are supported: the l1 norm, a coordinate-weighted l1
norm, and a group norm sum_G w_G ||beta_G||_2 over a partition of the
coordinates. The dual norm is the l-infinity norm for l1, max_j |v_j| / w_j
for the weighted case, and max_G ||v_G||_2 / w_G for groups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

L1 = "l1"
WEIGHTED_L1 = "weighted_l1"
GROUP = "group"


@dataclass(frozen=True)
class NormSpec:
    """Immutable description of a penalty norm.

    kind: "l1", "weighted_l1" or "group".
    weights: per-coordinate (weighted_l1) or per-group (group) positive weights;
        None for plain l1.
    partition: tuple of index tuples covering 0..p-1 (group kind only,
        0-based internally; file formats use 1-based indices).
    """

    kind: str
    weights: tuple = None
    partition: tuple = None

    def __post_init__(self):
        if self.kind not in (L1, WEIGHTED_L1, GROUP):
            raise ConfigError(f"unknown norm kind {self.kind!r}")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if any(v <= 0 or not np.isfinite(v) for v in w):
                raise ConfigError("weights must be strictly positive and finite")
            object.__setattr__(self, "weights", w)
        if self.kind == WEIGHTED_L1 and self.weights is None:
            raise ConfigError("weighted_l1 requires weights")
        if self.kind == GROUP:
            if self.partition is None:
                raise ConfigError("group norm requires a partition")
            part = tuple(tuple(int(i) for i in g) for g in self.partition)
            flat = [i for g in part for i in g]
            if not part or any(len(g) == 0 for g in part):
                raise ConfigError("partition groups must be nonempty")
            if sorted(flat) != list(range(len(flat))):
                raise ConfigError("partition must be disjoint and cover 0..p-1")
            object.__setattr__(self, "partition", part)
            if self.weights is None:
                object.__setattr__(self, "weights", tuple(1.0 for _ in part))
            elif len(self.weights) != len(part):
                raise ConfigError("need one weight per group")
        elif self.partition is not None:
            raise ConfigError("partition is only valid for the group kind")

    @property
    def p(self):
        """Coordinate count pinned by the spec, or None when length-agnostic."""
        if self.kind == WEIGHTED_L1:
            return len(self.weights)
        if self.kind == GROUP:
            return sum(len(g) for g in self.partition)
        return None

    def _check_len(self, v: np.ndarray):
        if self.p is not None and v.shape[-1] != self.p:
            raise DimensionError(f"vector length {v.shape[-1]} != spec length {self.p}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.partition is not None:
            # 1-based indices in serialized form
            out["partition"] = [[i + 1 for i in g] for g in self.partition]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "NormSpec":
        part = d.get("partition")
        if part is not None:
            part = tuple(tuple(i - 1 for i in g) for g in part)
        w = d.get("weights")
        return cls(d["kind"], tuple(w) if w is not None else None, part)


def l1_spec() -> NormSpec:
    return NormSpec(L1)


def weighted_l1_spec(weights) -> NormSpec:
    return NormSpec(WEIGHTED_L1, tuple(float(w) for w in weights))


def group_spec(partition, weights=None) -> NormSpec:
    part = tuple(tuple(int(i) for i in g) for g in partition)
    w = tuple(float(v) for v in weights) if weights is not None else None
    return NormSpec(GROUP, w, part)


def singleton_groups(p: int, weights=None) -> NormSpec:
    return group_spec([(j,) for j in range(p)], weights)


def omega(spec: NormSpec, beta) -> float:
    """Evaluate the penalty norm."""
    beta = np.asarray(beta, dtype=float)
    spec._check_len(beta)
    if spec.kind == L1:
        return float(np.sum(np.abs(beta)))
    if spec.kind == WEIGHTED_L1:
        return float(np.sum(np.asarray(spec.weights) * np.abs(beta)))
    total = 0.0
    for w, g in zip(spec.weights, spec.partition):
        total += w * float(np.linalg.norm(beta[list(g)]))
    return total


def omega_dual(spec: NormSpec, v) -> float:
    """Evaluate the dual norm sup { v @ beta : omega(beta) <= 1 }."""
    v = np.asarray(v, dtype=float)
    spec._check_len(v)
    if v.size == 0:
        return 0.0
    if spec.kind == L1:
        return float(np.max(np.abs(v)))
    if spec.kind == WEIGHTED_L1:
        return float(np.max(np.abs(v) / np.asarray(spec.weights)))
    best = 0.0
    for w, g in zip(spec.weights, spec.partition):
        best = max(best, float(np.linalg.norm(v[list(g)])) / w)
    return best


def prox_omega(spec: NormSpec, v, t: float) -> np.ndarray:
    """Proximity operator argmin_z { 0.5 ||z - v||^2 + t * omega(z) }.

    Coordinate soft-thresholding for (weighted) l1; block shrinkage by
    max(0, 1 - t * w_G / ||v_G||) for groups, with the zero block returned at
    ||v_G|| = 0 (the continuous limit).
    """
    v = np.asarray(v, dtype=float)
    spec._check_len(v)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if spec.kind == L1:
        return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)
    if spec.kind == WEIGHTED_L1:
        th = t * np.asarray(spec.weights)
        return np.sign(v) * np.maximum(np.abs(v) - th, 0.0)
    out = np.zeros_like(v)
    for w, g in zip(spec.weights, spec.partition):
        idx = list(g)
        block = v[idx]
        nrm = float(np.linalg.norm(block))
        if nrm > 0:
            out[idx] = block * max(0.0, 1.0 - t * w / nrm)
    return out


def dual_feasibility_gap(spec: NormSpec, v, bound: float) -> float:
    """Return omega_dual(v) - bound; positive means the bound is violated."""
    return omega_dual(spec, v) - bound


def penalty_weight_vector(spec: NormSpec, p: int) -> np.ndarray:
    """Per-coordinate l1 weights for specs that reduce to a weighted l1 norm.

    Valid for l1, weighted_l1, and group specs whose groups are all singletons.
    """
    if spec.kind == L1:
        return np.ones(p)
    if spec.kind == WEIGHTED_L1:
        return np.asarray(spec.weights, dtype=float)
    if all(len(g) == 1 for g in spec.partition):
        w = np.empty(p)
        for wg, g in zip(spec.weights, spec.partition):
            w[g[0]] = wg
        return w
    raise ConfigError("spec does not reduce to a weighted l1 norm")
