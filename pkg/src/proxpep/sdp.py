"""Dense primal-dual interior-point solver for small linear SDPs.

Problem form (maximization, one PSD block plus free scalar variables):

    max   c.H
    s.t.  Tr(A_j G) + a_j.H <= b_j     (j = 1..m)
          G PSD (n x n),  H free (p,)

The KKT system couples slacks s = b - A(G, H) >= 0 with multipliers
y >= 0 and the dual slack matrix Z = sum_j y_j A_j >= 0 subject to
sum_j y_j a_j = c.  The solver runs Mehrotra predictor-corrector steps
with Nesterov-Todd scaling on the matrix block; the free variables are
eliminated through a small Schur complement.  Problems are tiny by
design, so everything is dense.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .criteria import GramConstraint


def min_eig(M: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("min_eig needs a square matrix")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(M).max())):
        raise ValueError("min_eig needs a symmetric matrix")
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


@dataclass(frozen=True)
class SdpProblem:
    """Standard-form linear SDP data; rows are GramConstraint records."""

    n: int
    p: int
    c: np.ndarray
    rows: tuple[GramConstraint, ...]

    def __post_init__(self):
        if self.c.shape != (self.p,):
            raise ValueError("objective row has wrong length")
        for row in self.rows:
            if row.a.shape != (self.p,):
                raise ValueError("constraint value-row has wrong length")
            if row.dim != self.n:
                raise ValueError("constraint Gram dimension mismatch")
        if not all(np.isfinite(row.b) for row in self.rows):
            raise ValueError("constraint offsets must be finite")

    @property
    def m(self) -> int:
        return len(self.rows)

    def row_matrix(self, j: int) -> np.ndarray:
        return self.rows[j].matrix()

    def b(self) -> np.ndarray:
        return np.array([row.b for row in self.rows])


@dataclass
class SdpSolution:
    G: np.ndarray
    H: np.ndarray
    primal_value: float
    y: np.ndarray
    dual_value: float
    status: str          # Optimal | MaxIter | Infeasible | Unbounded
    gap: float
    iterations: int
    primal_residual: float
    dual_residual: float
    regularized: bool = False

    def to_json(self) -> str:
        import json
        return json.dumps({
            "status": self.status,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "iterations": self.iterations,
            "duals": self.y.tolist(),
        })


class _RowOps:
    """Vectorized application of the constraint rows via their factors.

    Every A_j is a short sum of symmetrized outer products; stacking the
    factor vectors into F lets the per-iteration quantities (row values,
    dual-slack accumulation, the normal matrix Tr(A_i W A_j W)) be formed
    with dense BLAS on F rather than materialized n x n matrices.
    """

    def __init__(self, problem: SdpProblem):
        n, m = problem.n, problem.m
        vecs, coefs, rows_idx, p_idx, q_idx = [], [], [], [], []
        for j, row in enumerate(problem.rows):
            for c, pvec, qvec in row.factors:
                p_idx.append(len(vecs)); vecs.append(pvec)
                q_idx.append(len(vecs)); vecs.append(qvec)
                coefs.append(c)
                rows_idx.append(j)
        self.nf = len(coefs)
        self.F = np.array(vecs).T if vecs else np.zeros((n, 0))
        self.coefs = np.array(coefs)
        self.rows_idx = np.array(rows_idx, dtype=int)
        self.P = np.array(p_idx, dtype=int)
        self.Q = np.array(q_idx, dtype=int)
        self.R = sp.csr_matrix((self.coefs, (self.rows_idx, np.arange(self.nf))),
                               shape=(m, self.nf))
        self.Amat = np.array([row.a for row in problem.rows]).reshape(m, problem.p)
        self.bvec = problem.b()
        self.n = n
        self.m = m

    def apply(self, X: np.ndarray) -> np.ndarray:
        """[Tr(A_j X)]_j for symmetric X."""
        if self.nf == 0:
            return np.zeros(self.m)
        XF = X @ self.F
        el = np.einsum("it,it->t", self.F[:, self.P], XF[:, self.Q])
        return self.R @ el

    def accumulate(self, weights: np.ndarray) -> np.ndarray:
        """sum_j weights_j A_j as a dense symmetric matrix."""
        out = np.zeros((self.n, self.n))
        if self.nf == 0:
            return out
        d = self.coefs * weights[self.rows_idx]
        Fp = self.F[:, self.P] * d
        half = Fp @ self.F[:, self.Q].T
        return 0.5 * (half + half.T)

    def normal_matrix(self, W: np.ndarray) -> np.ndarray:
        """M_ij = Tr(A_i W A_j W) through the factor Gram matrix."""
        if self.nf == 0:
            return np.zeros((self.m, self.m))
        WF = W @ self.F
        S = self.F.T @ WF
        S_qp = S[np.ix_(self.Q, self.P)]
        S_pp = S[np.ix_(self.P, self.P)]
        S_qq = S[np.ix_(self.Q, self.Q)]
        Gf = 0.5 * (S_qp * S_qp.T + S_pp * S_qq)
        M = self.R @ (self.R @ Gf.T).T
        return np.asarray(M.todense()) if sp.issparse(M) else np.asarray(M)


def _nt_scaling(G: np.ndarray, Z: np.ndarray):
    """NT scaling point W with W Z W = G, plus its square root."""
    Lg = np.linalg.cholesky(G)
    Lz = np.linalg.cholesky(Z)
    U, svals, Vt = np.linalg.svd(Lz.T @ Lg)
    T = Lg @ Vt.T / np.sqrt(svals)
    W = T @ T.T
    W = 0.5 * (W + W.T)
    ew, Q = np.linalg.eigh(W)
    ew = np.maximum(ew, 1e-300)
    Whalf = (Q * np.sqrt(ew)) @ Q.T
    return W, Whalf


def _max_step_psd(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha with X + alpha dX still PSD (X assumed PD)."""
    L = np.linalg.cholesky(X)
    Y = sla.solve_triangular(L, dX, lower=True)
    Y = sla.solve_triangular(L, Y.T, lower=True)
    lam_min = np.linalg.eigvalsh(0.5 * (Y + Y.T))[0]
    if lam_min >= 0:
        return np.inf
    return -1.0 / lam_min


def _max_step_pos(x: np.ndarray, dx: np.ndarray) -> float:
    mask = dx < 0
    if not np.any(mask):
        return np.inf
    return float(np.min(-x[mask] / dx[mask]))


def _sylvester_inverse(K: np.ndarray, V_eigvals: np.ndarray, V_eigvecs: np.ndarray,
                       Whalf: np.ndarray) -> np.ndarray:
    """Solve H_P(X Z) = K for X in the NT-scaled coordinates.

    With V = Whalf Z Whalf = Q diag(lam) Q^T the solution is
    X = Whalf Q Ytil Q^T Whalf, Ytil_ab = 2 Ktil_ab / (lam_a + lam_b).
    """
    Ktil = V_eigvecs.T @ K @ V_eigvecs
    denom = V_eigvals[:, None] + V_eigvals[None, :]
    Ytil = 2.0 * Ktil / denom
    X = Whalf @ (V_eigvecs @ Ytil @ V_eigvecs.T) @ Whalf
    return 0.5 * (X + X.T)


def solve(problem: SdpProblem, tol: float = 1e-8, max_iter: int = 100) -> SdpSolution:
    """Solve the SDP; returns primal and dual solutions with status.

    At status Optimal the scaled primal/dual feasibility residuals and
    the relative duality gap are below ``tol``.  The algorithm is
    deterministic: fixed cold start, no randomization, so repeated solves
    of one problem agree to machine precision.
    """
    n, p, m = problem.n, problem.p, problem.m
    if m == 0:
        raise ValueError("need at least one constraint to bound the objective")
    ops = _RowOps(problem)
    b = ops.bvec
    c = problem.c
    Amat = ops.Amat

    bscale = 1.0 + float(np.max(np.abs(b))) if m else 1.0
    cscale = 1.0 + float(np.max(np.abs(c))) if p else 1.0

    # deterministic cold start
    G = np.eye(n)
    H = np.zeros(p)
    y = np.ones(m)
    s = np.maximum(1.0, np.abs(b))
    Z = np.eye(n)

    best = None
    best_err = np.inf
    status = "MaxIter"
    stall = 0
    prev_mu = np.inf
    it = 0

    for it in range(1, max_iter + 1):
        rowvals = ops.apply(G) + Amat @ H
        rp = b - rowvals - s                      # want 0
        Rd = ops.accumulate(y) - Z                # want 0 (no C block)
        ra = c - Amat.T @ y                       # want 0

        pobj = float(c @ H)
        dobj = float(b @ y)
        mu = (float(np.sum(G * Z)) + float(y @ s)) / (n + m)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pres = float(np.max(np.abs(rp))) / bscale
        dres = max(float(np.max(np.abs(Rd))) if n else 0.0,
                   float(np.max(np.abs(ra))) if p else 0.0) / cscale
        err = max(gap, pres, dres)

        if err < best_err:
            best_err = err
            best = (G.copy(), H.copy(), y.copy(), pobj, dobj, gap, pres, dres)
        if gap <= tol and pres <= tol and dres <= tol:
            status = "Optimal"
            break
        if mu > 0.9 * prev_mu:
            stall += 1
            if stall >= 8:
                break
        else:
            stall = 0
        prev_mu = mu

        try:
            W, Whalf = _nt_scaling(G, Z)
            V = Whalf @ Z @ Whalf
            V = 0.5 * (V + V.T)
            vlam, vQ = np.linalg.eigh(V)
            if vlam[0] <= 0:
                break
            M = ops.normal_matrix(W)
            K = M + np.diag(s / y)
            K_fac = None
            jitter = 0.0
            for attempt in range(4):
                try:
                    K_fac = sla.cho_factor(K + jitter * np.eye(m), lower=True)
                    break
                except np.linalg.LinAlgError:
                    jitter = max(1e-14 * np.trace(K) / m, 10.0 * jitter, 1e-16)
            if K_fac is None:
                break

            Rd_dir = -Rd                           # C - (sum yA - Z)
            WRdW = W @ Rd_dir @ W

            def directions(sigma_mu: float, corr_mat: np.ndarray | None,
                           corr_lp: np.ndarray | None):
                # complementarity target in scaled space
                Rc = -V @ V
                if sigma_mu:
                    Rc = Rc + sigma_mu * np.eye(n)
                if corr_mat is not None:
                    Rc = Rc - corr_mat
                Xc = _sylvester_inverse(Rc, vlam, vQ, Whalf)
                ds0 = (sigma_mu - y * s - (corr_lp if corr_lp is not None else 0.0)) / y
                q = ops.apply(Xc + WRdW) + ds0 - rp
                rhs_y = sla.cho_solve(K_fac, q)
                if p:
                    KA = sla.cho_solve(K_fac, Amat)
                    schur = Amat.T @ KA
                    dH = np.linalg.solve(schur, ra - Amat.T @ rhs_y)
                    dy = rhs_y + KA @ dH
                else:
                    dH = np.zeros(0)
                    dy = rhs_y
                dZ = ops.accumulate(dy) - Rd_dir
                dG = Xc - W @ (ops.accumulate(dy)) @ W + WRdW
                dG = 0.5 * (dG + dG.T)
                ds = ds0 - (s / y) * dy
                return dG, dH, dy, dZ, ds

            # predictor
            dG_a, dH_a, dy_a, dZ_a, ds_a = directions(0.0, None, None)
            ap = min(1.0, 0.99 * min(_max_step_psd(G, dG_a), _max_step_pos(s, ds_a)))
            ad = min(1.0, 0.99 * min(_max_step_psd(Z, dZ_a), _max_step_pos(y, dy_a)))
            mu_aff = (float(np.sum((G + ap * dG_a) * (Z + ad * dZ_a)))
                      + float((y + ad * dy_a) @ (s + ap * ds_a))) / (n + m)
            sigma = min(max((max(mu_aff, 0.0) / mu) ** 3, 1e-10), 0.99)

            # corrector with second-order terms
            PdG = np.linalg.solve(Whalf, dG_a)
            PdZ = Whalf @ dZ_a
            cross = PdG @ PdZ
            corr_mat = 0.5 * (cross + cross.T)
            corr_lp = dy_a * ds_a
            dG, dH, dy, dZ, ds = directions(sigma * mu, corr_mat, corr_lp)

            ap = min(1.0, 0.99 * min(_max_step_psd(G, dG), _max_step_pos(s, ds)))
            ad = min(1.0, 0.99 * min(_max_step_psd(Z, dZ), _max_step_pos(y, dy)))

            G = G + ap * dG
            H = H + ap * dH
            s = s + ap * ds
            y = y + ad * dy
            Z = Z + ad * dZ
            G = 0.5 * (G + G.T)
            Z = 0.5 * (Z + Z.T)
        except np.linalg.LinAlgError:
            break

    if best is None:  # pragma: no cover
        raise RuntimeError("solver produced no iterate")
    G_b, H_b, y_b, pobj, dobj, gap, pres, dres = best
    if status != "Optimal":
        if gap <= tol and pres <= tol and dres <= tol:
            status = "Optimal"
        elif float(np.max(np.abs(y_b))) > 1e12 * bscale:
            status = "Infeasible"
        elif float(np.max(np.abs(G_b))) > 1e12:
            status = "Unbounded"
    return SdpSolution(G=G_b, H=H_b, primal_value=pobj, y=y_b, dual_value=dobj,
                       status=status, gap=gap, iterations=it,
                       primal_residual=pres, dual_residual=dres)
