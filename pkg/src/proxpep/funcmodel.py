"""Finite function models: interpolation checks and max-affine extensions.

A ``SampledFunction`` is a finite list of (point, subgradient-candidate,
value, slack) tuples standing in for an unknown convex function.  The
set extends to a closed proper convex function with the prescribed data
iff the pairwise inequalities

    h_i >= h_j + <v_j, w_i - w_j> - eps_j  [+ (mu/2) ||w_i - w_j||^2]

hold; the strong-convexity term is only meaningful when all slacks
vanish.  When an extension exists (mu = 0 case), one is given explicitly
by the max-affine construction h(x) = max_i { h_i + <v_i, x - w_i> - eps_i }.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SamplePoint:
    """One sampled tuple (label, point, subgradient candidate, value, slack)."""

    label: str
    w: np.ndarray
    v: np.ndarray
    h: float
    eps: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "w", np.atleast_1d(np.asarray(self.w, dtype=float)))
        object.__setattr__(self, "v", np.atleast_1d(np.asarray(self.v, dtype=float)))
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.w.shape != self.v.shape:
            raise ValueError("point and subgradient must share a dimension")


@dataclass(frozen=True)
class SampledFunction:
    """Finite sample of an unknown (possibly strongly) convex function."""

    points: tuple[SamplePoint, ...]
    mu: float = 0.0

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if not self.points:
            raise ValueError("need at least one sample point")
        object.__setattr__(self, "points", tuple(self.points))
        d = self.points[0].w.size
        if any(p.w.size != d for p in self.points):
            raise ValueError("all points must share one ambient dimension")

    @property
    def dim(self) -> int:
        return self.points[0].w.size

    def to_json(self) -> str:
        return json.dumps({
            "mu": self.mu,
            "points": [{"label": p.label, "w": p.w.tolist(), "v": p.v.tolist(),
                        "h": p.h, "eps": p.eps} for p in self.points],
        })

    @staticmethod
    def from_json(doc: str) -> "SampledFunction":
        data = json.loads(doc)
        pts = tuple(SamplePoint(label=str(q["label"]), w=np.array(q["w"]),
                                v=np.array(q["v"]), h=float(q["h"]),
                                eps=float(q.get("eps", 0.0)))
                    for q in data["points"])
        return SampledFunction(points=pts, mu=float(data.get("mu", 0.0)))


@dataclass(frozen=True)
class InterpolationReport:
    feasible: bool
    violations: tuple[tuple[int, int, float], ...]  # (i, j, residual)

    def worst_residual(self) -> float:
        return max((r for _, _, r in self.violations), default=0.0)


def check_interpolation(fn: SampledFunction, tol: float = 1e-9) -> InterpolationReport:
    """Test the pairwise extension inequalities; list violated (i, j) pairs.

    The residual stored for a pair (i, j) is
    h_j + <v_j, w_i - w_j> - eps_j + (mu/2)||w_i - w_j||^2 - h_i, positive
    when the pair is violated beyond ``tol``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if fn.mu > 0 and any(p.eps > 0 for p in fn.points):
        raise ValueError("slack-aware interpolation with mu > 0 is not supported")
    bad = []
    for i, pi in enumerate(fn.points):
        for j, pj in enumerate(fn.points):
            if i == j:
                continue
            diff = pi.w - pj.w
            lower = pj.h + float(pj.v @ diff) - pj.eps
            if fn.mu > 0:
                lower += 0.5 * fn.mu * float(diff @ diff)
            residual = lower - pi.h
            if residual > tol:
                bad.append((i, j, residual))
    return InterpolationReport(feasible=not bad, violations=tuple(bad))


@dataclass(frozen=True)
class MaxAffineFunction:
    """f(x) = max_i { <g_i, x> + b_i }, closed proper convex by construction."""

    slopes: np.ndarray      # (pieces, dim)
    intercepts: np.ndarray  # (pieces,)

    def __post_init__(self):
        if self.slopes.ndim != 2 or self.intercepts.shape != (self.slopes.shape[0],):
            raise ValueError("slopes must be (pieces, dim) with matching intercepts")
        if self.slopes.shape[0] == 0:
            raise ValueError("empty piece list")

    @property
    def dim(self) -> int:
        return self.slopes.shape[1]

    def eval(self, x) -> tuple[float, np.ndarray]:
        """Value and a subgradient (slope of the first maximizing piece)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != self.dim:
            raise ValueError("dimension mismatch")
        vals = self.slopes @ x + self.intercepts
        best = int(np.argmax(vals))
        return float(vals[best]), self.slopes[best].copy()

    def value(self, x) -> float:
        return self.eval(x)[0]


def build_max_affine(fn: SampledFunction, tol: float = 1e-9) -> MaxAffineFunction:
    """Explicit convex extension of a feasible sample with mu = 0.

    Each sample contributes the piece h_i + <v_i, x - w_i> - eps_i.  The
    result satisfies f(w_i) <= h_i (equality when eps_i = 0) and
    v_i is an eps_i-subgradient of f at w_i.
    """
    if fn.mu != 0:
        raise ValueError("max-affine extension requires mu = 0")
    report = check_interpolation(fn, tol)
    if not report.feasible:
        raise ValueError(f"sample is not interpolable; worst residual "
                         f"{report.worst_residual():.3e}")
    slopes = np.stack([p.v for p in fn.points])
    intercepts = np.array([p.h - float(p.v @ p.w) - p.eps for p in fn.points])
    return MaxAffineFunction(slopes=slopes, intercepts=intercepts)
