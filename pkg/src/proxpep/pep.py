"""Assembly of performance-estimation SDPs from method schemas.

The decision variables of a PEP are the Gram matrix ``G`` of all
algorithmic vectors and the row ``H`` of function values.  Rows are
emitted in a deterministic order: interpolation pairs lexicographically
(with the minimizer first), then the initial condition, then the
criterion rows by step and sub-index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import basis
from .criteria import EncodingContext, GramConstraint, encode_criterion
from .methods import MethodSchema, accum_sequence, make_orip, unroll
from .sdp import SdpProblem


@dataclass(frozen=True)
class PepLayout(EncodingContext):
    """Selection bases of a PEP: w_star, w_0, the v and e columns, and the
    unrolled expression of every iterate."""

    @property
    def value_dim(self) -> int:
        return basis.value_dim(self.n_inner)

    @property
    def point_labels(self) -> tuple:
        return ("star",) + tuple(range(self.n_inner + 1))


def layout_for(schema: MethodSchema) -> PepLayout:
    return PepLayout(n_inner=schema.n_inner, W=unroll(schema))


@dataclass(frozen=True)
class PepProblem:
    """A built PEP: layout, objective value-row, and ordered constraint rows."""

    layout: PepLayout
    schema: MethodSchema
    objective: np.ndarray
    rows: tuple[GramConstraint, ...]
    mu: float
    R: float
    initial: str
    interp_pairs: tuple[tuple, ...]

    def sdp(self) -> SdpProblem:
        return SdpProblem(n=self.layout.dim, p=self.layout.value_dim,
                          c=self.objective, rows=self.rows)

    def residuals(self, G: np.ndarray, H: np.ndarray) -> np.ndarray:
        """Constraint residuals (<= 0 feasible) of a candidate (G, H)."""
        return np.array([row.evaluate(G, H) for row in self.rows])

    def objective_value(self, H: np.ndarray) -> float:
        return float(self.objective @ H)

    def to_json(self) -> str:
        """Symbolic dump of the bases and rows, for debugging."""
        return json.dumps({
            "n_inner": self.layout.n_inner,
            "dim": self.layout.dim,
            "mu": self.mu,
            "R": self.R,
            "initial": self.initial,
            "objective": self.objective.tolist(),
            "W": self.layout.W.tolist(),
            "rows": [{
                "tag": list(row.tag),
                "a": row.a.tolist(),
                "b": row.b,
                "factors": [[c, p.tolist(), q.tolist()] for c, p, q in row.factors],
            } for row in self.rows],
        })


def _interp_row(layout: PepLayout, i, j, mu: float) -> GramConstraint:
    """h_i - h_j + <v_i, w_j - w_i> + (mu/2)||w_i - w_j||^2 <= 0."""
    a = layout.h(i) - layout.h(j)
    diff = layout.w(j) - layout.w(i)
    factors = []
    if i != "star":
        factors.append((1.0, layout.v(i), diff))
    if mu > 0:
        factors.append((0.5 * mu, diff, diff))
    return GramConstraint(factors=tuple(factors), a=a, b=0.0, dim=layout.dim,
                          tag=("interp", i, j))


def _initial_row(layout: PepLayout, kind: str, R: float) -> GramConstraint:
    if kind == "distance":
        d = layout.w(0) - layout.w("star")
        return GramConstraint(factors=((1.0, d, d),), a=np.zeros(layout.value_dim),
                              b=R * R, dim=layout.dim, tag=("initial",))
    if kind == "value":
        return GramConstraint(factors=(), a=layout.h(0), b=R * R,
                              dim=layout.dim, tag=("initial",))
    raise ValueError(f"unknown initial condition {kind!r}")


def _criterion_rows(schema: MethodSchema, layout: PepLayout) -> list[GramConstraint]:
    rows = []
    for crit in sorted(schema.criteria, key=lambda c: c.step):
        rows.extend(encode_criterion(crit.kind, layout))
    return rows


def build_pep(schema: MethodSchema, R: float = 1.0, mu: float | None = None,
              pairs="all", initial: str | None = None) -> PepProblem:
    """Build the worst-case SDP of a method over the (strongly) convex class.

    ``pairs`` selects the interpolation constraints: "all" ordered pairs,
    or an explicit list of (i, j) labels.  The initial condition defaults
    to the distance bound ||w_0 - w_star||^2 <= R^2, switching to the
    value bound h(w_0) - h_star <= R^2 when mu > 0.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if mu is None:
        mu = float(schema.meta.get("mu", 0.0))
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if initial is None:
        initial = "value" if mu > 0 else "distance"
    layout = layout_for(schema)

    if isinstance(pairs, str):
        if pairs != "all":
            raise ValueError(f"unknown interpolation subset {pairs!r}; "
                             "named relaxations have dedicated builders")
        labels = layout.point_labels
        pair_list = [(i, j) for i in labels for j in labels if i != j]
    else:
        pair_list = [tuple(p) for p in pairs]
        for i, j in pair_list:
            if i == j:
                raise ValueError("interpolation pairs need distinct labels")

    rows = [_interp_row(layout, i, j, mu) for i, j in pair_list]
    rows.append(_initial_row(layout, initial, R))
    rows.extend(_criterion_rows(schema, layout))

    return PepProblem(layout=layout, schema=schema,
                      objective=layout.h(schema.objective_index),
                      rows=tuple(rows), mu=mu, R=R, initial=initial,
                      interp_pairs=tuple(pair_list))


def build_orip_relaxation(lambdas, sigma: float, R: float = 1.0) -> PepProblem:
    """Relaxed PEP keeping only the proof-bearing interpolation rows.

    For sigma in (0, 1] the retained inequalities are, per outer step k,
    convexity between x_k and the anchor u_{k+1}, between the minimizer
    and u_k, and between x_k and u_k, plus the gap rows and the unit
    initial condition.  sigma = 0 degenerates the anchors and routes to
    the exact-case relaxation on the single-point layout.
    """
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    schema = make_orip(lam, sigma)
    N = schema.n_outer
    layout = layout_for(schema)

    if sigma == 0.0:
        pair_list = [(k + 1, k) for k in range(N)]
        pair_list += [(k, "star") for k in range(1, N + 1)]
    else:
        pair_list = [(2 * k + 1, 2 * k) for k in range(N)]
        pair_list += [(2 * k - 1, "star") for k in range(1, N + 1)]
        pair_list += [(2 * k - 1, 2 * k) for k in range(1, N + 1)]

    rows = [_interp_row(layout, i, j, 0.0) for i, j in pair_list]
    rows.append(_initial_row(layout, "distance", R))
    rows.extend(_criterion_rows(schema, layout))

    return PepProblem(layout=layout, schema=schema,
                      objective=layout.h(schema.objective_index),
                      rows=tuple(rows), mu=0.0, R=R, initial="distance",
                      interp_pairs=tuple(pair_list))


def orip_reference_bound(lambdas, sigma: float, R: float = 1.0) -> float:
    """Closed-form worst-case value (1 + sigma) R^2 / (4 A_N)."""
    acc = accum_sequence(lambdas)
    return (1.0 + sigma) * R * R / (4.0 * acc.A[-1])
