"""Fixed-step inexact proximal methods as unrollable coefficient schemas.

Every method handled by this package produces iterates of the form

    w_{k+1} = w_k - sum_i alpha[k+1,i] v_i - sum_i beta[k+1,i] e_i
                  - lam[k+1] (v_{k+1} + e_{k+1}),

where ``v_i`` is a subgradient at the interpolation point ``w_i`` and
``e_i`` is an error vector constrained by a per-step inexactness
criterion.  Accelerated and extragradient-type methods are hosted in this
template by inserting auxiliary points (one extra point per proximal step
for the primal-dual methods, two for the hybrid extragradient method);
the builders below perform that embedding.

Schemas are immutable; builders are pure functions.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .criteria import CriterionKind


def _as_positive_array(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d sequence")
    if np.any(arr <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return arr


# ---------------------------------------------------------------------------
# step-size accumulation sequence shared by the accelerated methods
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccumSequence:
    """Sequence A_0 = 0, A_{k+1} = A_k + (lam_{k+1} + sqrt(4 lam_{k+1} A_k + lam_{k+1}^2)) / 2.

    Satisfies lam_{k+1} A_{k+1} = (A_{k+1} - A_k)^2 and the lower bound
    A_k >= (sum_i sqrt(lam_i))^2 / 4.
    """

    lambdas: np.ndarray
    A: np.ndarray

    def increments(self) -> np.ndarray:
        """Differences A_k - A_{k-1}, k = 1..N."""
        return np.diff(self.A)

    def identity_residual(self) -> float:
        """Max relative residual of lam_{k+1} A_{k+1} = (A_{k+1} - A_k)^2."""
        lhs = self.lambdas * self.A[1:]
        rhs = np.diff(self.A) ** 2
        return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))))

    def lower_bound(self) -> np.ndarray:
        """Lower bound (sum_{i<=k} sqrt(lam_i))^2 / 4 for k = 1..N."""
        return np.cumsum(np.sqrt(self.lambdas)) ** 2 / 4.0


def accum_sequence(lambdas) -> AccumSequence:
    """Build the accumulation sequence for a list of positive step sizes."""
    lam = _as_positive_array(lambdas, "lambdas")
    A = np.zeros(lam.size + 1)
    for k, lk in enumerate(lam):
        A[k + 1] = A[k] + 0.5 * (lk + math.sqrt(4.0 * lk * A[k] + lk * lk))
    return AccumSequence(lambdas=lam, A=A)


def guler_t_sequence(n: int, eta_ratio: Sequence[float] | None = None) -> np.ndarray:
    """t_0 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2 r_k)) / 2 with ratio r_k (1 by default)."""
    t = np.ones(n + 1)
    for k in range(n):
        r = 1.0 if eta_ratio is None else eta_ratio[k]
        t[k + 1] = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t[k] ** 2 * r))
    return t


def guler_beta_sequence(n: int) -> np.ndarray:
    """beta_1 = 1, beta_{k+1} = (1 + sqrt(4 beta_k^2 + 1)) / 2 (second accelerated scheme)."""
    beta = np.ones(n + 1)
    for k in range(1, n):
        beta[k + 1] = 0.5 * (1.0 + math.sqrt(4.0 * beta[k] ** 2 + 1.0))
    return beta[1:]


def guler_beta_equivalence(lambda_const: float, n: int = 50, tol: float = 1e-12) -> bool:
    """Check beta_k == (A_k - A_{k-1}) / lambda for k <= n, to ``tol`` relative."""
    if lambda_const <= 0:
        raise ValueError("lambda must be positive")
    beta = guler_beta_sequence(n)
    acc = accum_sequence([lambda_const] * n)
    ratio = acc.increments() / lambda_const
    return bool(np.max(np.abs(beta - ratio) / np.maximum(1.0, np.abs(beta))) <= tol)


# selection-basis conventions are shared with the PEP builders
from .basis import basis_dim, e_col, unit as _basis_unit, v_col, w0_col, wstar_col


def _unit(dim: int, idx: int) -> np.ndarray:
    return _basis_unit(dim, idx)


# ---------------------------------------------------------------------------
# schemas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepCriterion:
    """Inexactness criterion attached to one proximal step of a schema."""

    step: int
    kind: CriterionKind


@dataclass(frozen=True)
class MethodSchema:
    """Coefficient data of a fixed-step inexact proximal method.

    ``lam[j]`` couples ``(v_j, e_j)`` into row ``j``; ``alpha[j, i]`` and
    ``beta[j, i]`` weight earlier subgradients and errors.  Rows listed in
    ``exact_steps`` drop their error term entirely (the matching error
    column is pinned to zero by a criterion row instead of entering the
    update).  ``objective_index`` names the w-point whose value gap is
    reported.
    """

    name: str
    n_outer: int
    points_per_step: int
    lam: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    criteria: tuple[StepCriterion, ...]
    objective_index: int
    prox_lambdas: np.ndarray
    exact_steps: frozenset[int] = frozenset()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        M = self.n_inner
        if self.lam.shape != (M + 1,):
            raise ValueError("lam must have shape (n_inner+1,)")
        if self.alpha.shape != (M + 1, M + 1) or self.beta.shape != (M + 1, M + 1):
            raise ValueError("alpha/beta must be (n_inner+1) square tables")
        if np.any(np.triu(self.alpha) != 0) or np.any(np.triu(self.beta) != 0):
            # alpha[j, i] needs 1 <= i < j, beta[j, i] needs 0 <= i < j
            raise ValueError("alpha/beta must be strictly lower triangular in the step index")
        if np.any(self.alpha[:, 0] != 0):
            raise ValueError("alpha has no column for v_0 contributions before step 1")
        if not 0 <= self.objective_index <= M:
            raise ValueError("objective index out of range")

    @property
    def n_inner(self) -> int:
        return self.n_outer * self.points_per_step

    def to_json(self) -> str:
        """Method name plus parameters, for experiment configs."""
        return json.dumps({"name": self.name, **self.meta}, sort_keys=True)

    def export_tables_csv(self, destination) -> None:
        """Dump the unrolled alpha/beta/lambda tables for inspection."""
        with open(destination, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "lambda"] + [f"alpha_{i}" for i in range(self.n_inner + 1)]
                            + [f"beta_{i}" for i in range(self.n_inner + 1)])
            for j in range(1, self.n_inner + 1):
                writer.writerow([j, repr(self.lam[j])]
                                + [repr(x) for x in self.alpha[j]]
                                + [repr(x) for x in self.beta[j]])


def unroll(schema: MethodSchema) -> np.ndarray:
    """Express every w_k over the selection basis.

    Returns an array of shape (n_inner + 1, 2 n_inner + 4) whose row k is
    the affine combination representing w_k.  Row 0 is the unit vector of
    w_0; w_star is not included (it is the basis column 0 itself).
    """
    M = schema.n_inner
    dim = basis_dim(M)
    W = np.zeros((M + 1, dim))
    W[0, w0_col(M)] = 1.0
    for j in range(1, M + 1):
        row = W[j - 1].copy()
        for i in range(1, j):
            if schema.alpha[j, i]:
                row[v_col(M, i)] -= schema.alpha[j, i]
        for i in range(j):
            if schema.beta[j, i]:
                row[e_col(M, i)] -= schema.beta[j, i]
        if schema.lam[j]:
            row[v_col(M, j)] -= schema.lam[j]
            if j not in schema.exact_steps:
                row[e_col(M, j)] -= schema.lam[j]
        W[j] = row
    return W


# ---------------------------------------------------------------------------
# symbolic unrolling helper for the builders
# ---------------------------------------------------------------------------


class _SymbolicUnroller:
    """Tracks algorithm sequences as vectors over the selection basis and
    converts the resulting w-rows back into (lam, alpha, beta) tables."""

    def __init__(self, n_inner: int):
        self.M = n_inner
        self.dim = basis_dim(n_inner)
        self.rows = [_unit(self.dim, w0_col(n_inner))]

    def w0(self) -> np.ndarray:
        return self.rows[0].copy()

    def v(self, k: int) -> np.ndarray:
        return _unit(self.dim, v_col(self.M, k))

    def e(self, k: int) -> np.ndarray:
        return _unit(self.dim, e_col(self.M, k))

    def push(self, expr: np.ndarray) -> int:
        """Record w_{len} = expr; returns the new point index."""
        self.rows.append(np.asarray(expr, dtype=float))
        return len(self.rows) - 1

    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, frozenset[int]]:
        M = self.M
        if len(self.rows) != M + 1:
            raise ValueError("unroller holds a partial trajectory")
        lam = np.zeros(M + 1)
        alpha = np.zeros((M + 1, M + 1))
        beta = np.zeros((M + 1, M + 1))
        exact = set()
        for j in range(1, M + 1):
            diff = self.rows[j] - self.rows[j - 1]
            if abs(diff[wstar_col(M)]) > 0 or abs(diff[w0_col(M)]) > 0:
                raise ValueError("row difference escapes the v/e span")
            lam[j] = -diff[v_col(M, j)]
            ecur = -diff[e_col(M, j)]
            if ecur == 0.0 and lam[j] != 0.0:
                exact.add(j)
            elif not math.isclose(ecur, lam[j], rel_tol=0.0, abs_tol=1e-14):
                raise ValueError("current-step v and e coefficients must agree")
            for i in range(1, j):
                alpha[j, i] = -diff[v_col(M, i)]
            for i in range(j):
                beta[j, i] = -diff[e_col(M, i)]
        return lam, alpha, beta, frozenset(exact)


def _criteria_for_unused_errors(n_inner: int, used: set[int]) -> list[StepCriterion]:
    pins = []
    for k in range(n_inner + 1):
        if k not in used:
            pins.append(StepCriterion(step=0, kind=CriterionKind.zero_error(k)))
    return pins


# ---------------------------------------------------------------------------
# builders: plain and inexact proximal minimization
# ---------------------------------------------------------------------------


def make_ppa(lambdas) -> MethodSchema:
    """Exact proximal minimization: w_{k+1} = w_k - lam_{k+1} v_{k+1}.

    All error columns are pinned to zero through ||e_k||^2 <= 0 rows.
    """
    lam_seq = _as_positive_array(lambdas, "lambdas")
    N = lam_seq.size
    lam = np.zeros(N + 1)
    lam[1:] = lam_seq
    crits = tuple(StepCriterion(step=k, kind=CriterionKind.zero_error(k))
                  for k in range(N + 1))
    return MethodSchema(
        name="ppa", n_outer=N, points_per_step=1, lam=lam,
        alpha=np.zeros((N + 1, N + 1)), beta=np.zeros((N + 1, N + 1)),
        criteria=crits, objective_index=N, prox_lambdas=lam_seq,
        exact_steps=frozenset(range(1, N + 1)),
        meta={"lambdas": lam_seq.tolist()},
    )


def make_inexact_ppa(lambdas, criterion: CriterionKind) -> MethodSchema:
    """Inexact proximal minimization with a per-step error-norm criterion.

    ``criterion`` must be an AbsoluteErrorNorm or RelativeErrorNorm kind;
    its level is broadcast to every step.
    """
    lam_seq = _as_positive_array(lambdas, "lambdas")
    N = lam_seq.size
    lam = np.zeros(N + 1)
    lam[1:] = lam_seq
    crits = [StepCriterion(step=0, kind=CriterionKind.zero_error(0))]
    for k in range(1, N + 1):
        crits.append(StepCriterion(step=k, kind=criterion.bind_error_step(
            e_index=k, w_index=k, w_prev_index=k - 1, lam=lam_seq[k - 1], step=k)))
    return MethodSchema(
        name="inexact-ppa", n_outer=N, points_per_step=1, lam=lam,
        alpha=np.zeros((N + 1, N + 1)), beta=np.zeros((N + 1, N + 1)),
        criteria=tuple(crits), objective_index=N, prox_lambdas=lam_seq,
        meta={"lambdas": lam_seq.tolist(), "criterion": json.loads(criterion.to_json())},
    )


def make_str_ppa(lambdas, sigma: float, mu: float) -> MethodSchema:
    """Relatively inexact proximal minimization aimed at mu-strongly convex
    objectives: ||e_k||^2 <= sigma^2/lam_k^2 ||w_k - w_{k-1}||^2.

    The modulus travels with the schema metadata; the PEP builder applies
    it to the interpolation rows.  sigma = 0 yields the exact method.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if sigma == 0.0:
        schema = make_ppa(lambdas)
    else:
        schema = make_inexact_ppa(lambdas, CriterionKind.relative_error_norm(sigma))
    schema.meta.update({"sigma": sigma, "mu": mu})
    return MethodSchema(
        name="str-ppa", n_outer=schema.n_outer, points_per_step=1,
        lam=schema.lam, alpha=schema.alpha, beta=schema.beta,
        criteria=schema.criteria, objective_index=schema.objective_index,
        prox_lambdas=schema.prox_lambdas, exact_steps=schema.exact_steps,
        meta=schema.meta,
    )


# ---------------------------------------------------------------------------
# builders: accelerated exact method of Guler
# ---------------------------------------------------------------------------


def make_guler(lambdas) -> MethodSchema:
    """Accelerated proximal minimization with the t-sequence momentum.

    x_{k+1} = y_k - lam_{k+1} v_{k+1},
    y_{k+1} = x_{k+1} + ((t_k - 1)/t_{k+1}) (x_{k+1} - x_k)
                      + (t_k / t_{k+1}) (x_{k+1} - y_k),
    with t_0 = 1 and t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2.

    The coefficient tables are produced by unrolling the recursion
    symbolically, so the v_{k+1} column picks up both momentum terms.
    """
    lam_seq = _as_positive_array(lambdas, "lambdas")
    N = lam_seq.size
    t = guler_t_sequence(N)
    sym = _SymbolicUnroller(N)
    x_prev = sym.w0()
    y = sym.w0()
    for k in range(N):
        x = y - lam_seq[k] * sym.v(k + 1)
        sym.push(x)
        y_next = x + (t[k] - 1.0) / t[k + 1] * (x - x_prev) + t[k] / t[k + 1] * (x - y)
        x_prev, y = x, y_next
    lam, alpha, beta, exact = sym.tables()
    crits = tuple(StepCriterion(step=k, kind=CriterionKind.zero_error(k))
                  for k in range(N + 1))
    return MethodSchema(
        name="guler", n_outer=N, points_per_step=1, lam=lam, alpha=alpha, beta=beta,
        criteria=crits, objective_index=N, prox_lambdas=lam_seq,
        exact_steps=exact,
        meta={"lambdas": lam_seq.tolist()},
    )


# ---------------------------------------------------------------------------
# builders: hybrid proximal extragradient (three inner points per step)
# ---------------------------------------------------------------------------


def make_hpe(etas, sigma: float) -> MethodSchema:
    """Hybrid proximal extragradient method.

    One outer step unfolds into three inner rows

        w_{3k+1} = w_{3k} - e_{3k}
        w_{3k+2} = w_{3k+1} - e_{3k+1}
        w_{3k+3} = w_{3k+2} + e_{3k} + e_{3k+1} - eta_{k+1} v_{3k+2}

    (so w_{3k+3} = w_{3k} - eta_{k+1} v_{3k+2}) with the primal-dual gap of
    the pair (w_{3k+1}, v_{3k+2}) at base point w_{3k} bounded by
    sigma^2/2 ||w_{3k+1} - w_{3k}||^2.
    """
    eta = _as_positive_array(etas, "etas")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    N = eta.size
    M = 3 * N
    sym = _SymbolicUnroller(M)
    used_errors: set[int] = set()
    crits: list[StepCriterion] = []
    for k in range(N):
        base = sym.rows[3 * k]
        u_pt = sym.push(base - sym.e(3 * k))
        g_pt = sym.push(sym.rows[3 * k + 1] - sym.e(3 * k + 1))
        sym.push(base - eta[k] * sym.v(3 * k + 2))
        used_errors.update({3 * k, 3 * k + 1})
        crits.append(StepCriterion(step=k + 1, kind=CriterionKind.pd_gap_take_i(
            lam=eta[k], x_index=u_pt, u_index=g_pt, v_index=g_pt,
            z=("point", 3 * k),
            level=("prox_distance", sigma, 3 * k),
            step=k + 1,
        )))
    lam, alpha, beta, _ = sym.tables()
    crits += _criteria_for_unused_errors(M, used_errors)
    return MethodSchema(
        name="hpe", n_outer=N, points_per_step=3, lam=lam, alpha=alpha, beta=beta,
        criteria=tuple(crits), objective_index=M, prox_lambdas=eta,
        meta={"etas": eta.tolist(), "sigma": sigma},
    )


# ---------------------------------------------------------------------------
# builders: inexact accelerated proximal point (two inner points per step)
# ---------------------------------------------------------------------------


def _two_point_tables(n_outer: int, push_step) -> tuple[_SymbolicUnroller, list[int], list[int]]:
    """Shared skeleton for the two-point embeddings: odd rows place the
    subgradient anchor w_{2k+1} = w_{2k} - e_{2k}, even rows are produced
    by ``push_step(sym, k, u_point)``."""
    M = 2 * n_outer
    sym = _SymbolicUnroller(M)
    u_points, x_points = [], [0]
    for k in range(n_outer):
        u = sym.push(sym.rows[2 * k] - sym.e(2 * k))
        u_points.append(u)
        x_points.append(push_step(sym, k, u))
    return sym, u_points, x_points


def make_iappa(variant: int, etas, eps_sequence) -> MethodSchema:
    """Inexact accelerated proximal point algorithm, variants 1 and 2.

    x_{k+1} = y_k - eta_{k+1} (g_{k+1} + r_{k+1}),
    y_{k+1} = x_{k+1} + ((t_k - 1)/t_{k+1}) (x_{k+1} - x_k),
    with the primal-dual gap of (x_{k+1}, g_{k+1}) at y_k bounded by the
    absolute level eps_{k+1}.  Variant 2 removes the in-step error r
    (its column is pinned to zero) while keeping the same tables.
    """
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    eta = _as_positive_array(etas, "etas")
    N = eta.size
    eps = np.atleast_1d(np.asarray(eps_sequence, dtype=float))
    if eps.size == 1:
        eps = np.full(N, float(eps[0]))
    if eps.size != N or np.any(eps < 0):
        raise ValueError("eps sequence must be nonnegative with one entry per step")
    t = guler_t_sequence(N, eta_ratio=[eta[k] / eta[k + 1] if k + 1 < N else 1.0
                                       for k in range(N)])

    state = {"x_prev": None, "x": None}

    def push_step(sym: _SymbolicUnroller, k: int, u: int) -> int:
        x = state["x"] if state["x"] is not None else sym.w0()
        x_prev = state["x_prev"] if state["x_prev"] is not None else sym.w0()
        y = x if k == 0 else x + (t[k - 1] - 1.0) / t[k] * (x - x_prev)
        x_next = y - eta[k] * (sym.v(2 * k + 1) + sym.e(2 * k + 1))
        idx = sym.push(x_next)
        state["x_prev"], state["x"] = x, x_next
        return idx

    sym, u_points, x_points = _two_point_tables(N, push_step)
    M = 2 * N
    crits: list[StepCriterion] = []
    used = set()
    for k in range(N):
        used.update({2 * k, 2 * k + 1})
        crits.append(StepCriterion(step=k + 1, kind=CriterionKind.pd_gap_take_i(
            lam=eta[k], x_index=x_points[k + 1], u_index=u_points[k],
            v_index=2 * k + 1, z=("step", 2 * k + 1),
            level=("abs", float(eps[k])), step=k + 1,
        )))
        if variant == 2:
            crits.append(StepCriterion(step=k + 1,
                                       kind=CriterionKind.zero_error(2 * k + 1)))
    lam, alpha, beta, _ = sym.tables()
    crits += _criteria_for_unused_errors(M, used)
    return MethodSchema(
        name=f"iappa{variant}", n_outer=N, points_per_step=2,
        lam=lam, alpha=alpha, beta=beta, criteria=tuple(crits),
        objective_index=M, prox_lambdas=eta,
        meta={"etas": eta.tolist(), "eps": eps.tolist(), "variant": variant},
    )


def make_ahpe(etas, sigma: float) -> MethodSchema:
    """Accelerated hybrid proximal extragradient method.

    a_{k+1} = (eta_{k+1} + sqrt(eta_{k+1}^2 + 4 eta_{k+1} A_k)) / 2,
    A_{k+1} = A_k + a_{k+1},
    xt_k    = y_k + (a_{k+1}/A_{k+1}) (x_k - y_k),
    y_{k+1} = xt_k - eta_{k+1} (g_{k+1} + r_{k+1}),
    x_{k+1} = x_k - a_{k+1} g_{k+1},
    with gap level sigma^2/2 ||eta_{k+1} (g_{k+1} + r_{k+1})||^2.
    Reported point: y_N.
    """
    eta = _as_positive_array(etas, "etas")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    N = eta.size
    acc = accum_sequence(eta)
    a = acc.increments()

    state = {"x": None, "y": None}

    def push_step(sym: _SymbolicUnroller, k: int, u: int) -> int:
        x = state["x"] if state["x"] is not None else sym.w0()
        y = state["y"] if state["y"] is not None else sym.w0()
        xt = y + a[k] / acc.A[k + 1] * (x - y)
        y_next = xt - eta[k] * (sym.v(2 * k + 1) + sym.e(2 * k + 1))
        idx = sym.push(y_next)
        state["x"] = x - a[k] * sym.v(2 * k + 1)
        state["y"] = y_next
        return idx

    sym, u_points, y_points = _two_point_tables(N, push_step)
    M = 2 * N
    crits: list[StepCriterion] = []
    used = set()
    for k in range(N):
        used.update({2 * k, 2 * k + 1})
        crits.append(StepCriterion(step=k + 1, kind=CriterionKind.pd_gap_take_i(
            lam=eta[k], x_index=y_points[k + 1], u_index=u_points[k],
            v_index=2 * k + 1, z=("step", 2 * k + 1),
            level=("moreau_step", sigma, 2 * k + 1), step=k + 1,
        )))
    lam, alpha, beta, _ = sym.tables()
    crits += _criteria_for_unused_errors(M, used)
    return MethodSchema(
        name="ahpe", n_outer=N, points_per_step=2,
        lam=lam, alpha=alpha, beta=beta, criteria=tuple(crits),
        objective_index=M, prox_lambdas=eta,
        meta={"etas": eta.tolist(), "sigma": sigma, "A": acc.A.tolist()},
    )


# ---------------------------------------------------------------------------
# builders: optimized relatively inexact proximal point algorithm
# ---------------------------------------------------------------------------


def make_orip(lambdas, sigma: float) -> MethodSchema:
    """Relatively inexact proximal point method with optimized coefficients.

    For sigma > 0 each outer step carries two inner points: the anchor
    w_{2k+1} (where g_{k+1} is a true subgradient) and the returned primal
    point w_{2k+2} = x_{k+1}, with

        A_{k+1} = A_k + (lam_{k+1} + sqrt(4 lam_{k+1} A_k + lam_{k+1}^2)) / 2
        y_k     = x_k + (lam_{k+1}/(A_{k+1} - A_k)) (z_k - x_k)
        x_{k+1} = y_k - lam_{k+1} (g_{k+1} + e_{k+1})
        z_{k+1} = z_k - (2 (A_{k+1} - A_k)/(1 + sigma)) g_{k+1}

    and the gap criterion at level sigma^2/2 ||lam_{k+1}(g_{k+1}+e_{k+1})||^2.
    sigma = 0 degenerates the anchor points and is routed to the exact
    single-point layout (same iterates as the momentum method above for
    constant steps).
    """
    lam_seq = _as_positive_array(lambdas, "lambdas")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    N = lam_seq.size
    acc = accum_sequence(lam_seq)

    if sigma == 0.0:
        sym = _SymbolicUnroller(N)
        x = sym.w0()
        z = sym.w0()
        for k in range(N):
            inc = acc.A[k + 1] - acc.A[k]
            y = x + lam_seq[k] / inc * (z - x)
            x = y - lam_seq[k] * sym.v(k + 1)
            z = z - 2.0 * inc * sym.v(k + 1)
            sym.push(x)
        lam, alpha, beta, exact = sym.tables()
        crits = tuple(StepCriterion(step=k, kind=CriterionKind.zero_error(k))
                      for k in range(N + 1))
        return MethodSchema(
            name="orip", n_outer=N, points_per_step=1, lam=lam, alpha=alpha, beta=beta,
            criteria=crits, objective_index=N, prox_lambdas=lam_seq,
            exact_steps=exact,
            meta={"lambdas": lam_seq.tolist(), "sigma": 0.0, "A": acc.A.tolist()},
        )

    state = {"x": None, "z": None}

    def push_step(sym: _SymbolicUnroller, k: int, u: int) -> int:
        x = state["x"] if state["x"] is not None else sym.w0()
        z = state["z"] if state["z"] is not None else sym.w0()
        inc = acc.A[k + 1] - acc.A[k]
        y = x + lam_seq[k] / inc * (z - x)
        x_next = y - lam_seq[k] * (sym.v(2 * k + 1) + sym.e(2 * k + 1))
        idx = sym.push(x_next)
        state["x"] = x_next
        state["z"] = z - 2.0 * inc / (1.0 + sigma) * sym.v(2 * k + 1)
        return idx

    sym, u_points, x_points = _two_point_tables(N, push_step)
    M = 2 * N
    crits = []
    used = set()
    for k in range(N):
        used.update({2 * k, 2 * k + 1})
        crits.append(StepCriterion(step=k + 1, kind=CriterionKind.pd_gap_take_i(
            lam=lam_seq[k], x_index=x_points[k + 1], u_index=u_points[k],
            v_index=2 * k + 1, z=("step", 2 * k + 1),
            level=("moreau_step", sigma, 2 * k + 1), step=k + 1,
            scale_by_lam=True,
        )))
    lam, alpha, beta, _ = sym.tables()
    crits += _criteria_for_unused_errors(M, used)
    return MethodSchema(
        name="orip", n_outer=N, points_per_step=2,
        lam=lam, alpha=alpha, beta=beta, criteria=tuple(crits),
        objective_index=M, prox_lambdas=lam_seq,
        meta={"lambdas": lam_seq.tolist(), "sigma": sigma, "A": acc.A.tolist()},
    )


def schema_from_config(config: dict) -> MethodSchema:
    """Instantiate a builder from a JSON-style configuration mapping."""
    name = config["name"]
    if name == "ppa":
        return make_ppa(config["lambdas"])
    if name == "inexact-ppa":
        return make_inexact_ppa(config["lambdas"],
                                CriterionKind.from_json(json.dumps(config["criterion"])))
    if name == "str-ppa":
        return make_str_ppa(config["lambdas"], config["sigma"], config["mu"])
    if name == "guler":
        return make_guler(config["lambdas"])
    if name == "hpe":
        return make_hpe(config["etas"], config["sigma"])
    if name in ("iappa1", "iappa2"):
        return make_iappa(int(name[-1]), config["etas"], config["eps"])
    if name == "ahpe":
        return make_ahpe(config["etas"], config["sigma"])
    if name == "orip":
        return make_orip(config["lambdas"], config["sigma"])
    raise ValueError(f"unknown method name {name!r}")
