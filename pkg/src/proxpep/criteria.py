"""Inexactness criteria for approximate proximal steps.

Two faces of the same objects live here:

* numeric evaluators (``pd_gap``, ``moreau_gap``, ``check_criterion``)
  that decide whether a concrete primal-dual answer satisfies a
  criterion, and
* Gram encoders (``encode_criterion``) that turn a criterion into affine
  constraints ``Tr(A G) + a.H <= b`` on the Gram matrix of algorithmic
  vectors and the row of function values.

The encoders eliminate conjugate values algebraically: whenever a
primal-dual gap appears, the dual point is a true subgradient at some
interpolation point ``u`` and ``h*(v) = <v, u> - h(u)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import basis


class UnsupportedCriterionError(ValueError):
    """Raised when a criterion has no Gram encoding."""


# ---------------------------------------------------------------------------
# numeric evaluators
# ---------------------------------------------------------------------------


def pd_gap(x, v, z, lam: float, h_x: float, hstar_v: float) -> float:
    """Primal-dual gap of the proximal subproblem at the pair (x, v).

    Equals ``lam h(x) + lam h*(v) - lam <x, v> + 0.5 ||x - z + lam v||^2``;
    nonnegative whenever ``h_x`` and ``hstar_v`` are true values of a
    conjugate pair.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    gap = lam * (h_x + hstar_v - float(np.dot(x, v)))
    return gap + 0.5 * float(np.dot(x - z + lam * v, x - z + lam * v))


def moreau_gap(x, v, z, lam: float) -> float:
    """Squared violation ||x - z + lam v||^2 of the proximal decomposition."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    r = x - z + lam * v
    return float(np.dot(r, r))


def eps_from_pdgap(sigma_bound: float, lam: float, x, v, z) -> float:
    """Subgradient slack certified by a primal-dual gap bound.

    If the gap at (x, v, z) is at most ``sigma_bound`` then v is an
    eps-subgradient of h at x with eps = sigma/lam - Mor/(2 lam).
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    return sigma_bound / lam - moreau_gap(x, v, z, lam) / (2.0 * lam)


# ---------------------------------------------------------------------------
# criterion kinds
# ---------------------------------------------------------------------------

_TAGS = (
    "ZeroError",
    "AbsoluteErrorNorm",
    "RelativeErrorNorm",
    "PDGapTakeI",
    "PDGapTakeII",
    "PDGapTakeIII",
    "PDGapTakeIV",
    "PDGapTakeV",
    "SubgradientResidual",
)


@dataclass(frozen=True)
class CriterionKind:
    """Tagged criterion with its level and encoding roles.

    ``params`` carries the error level (absolute constant or relative
    factor with the reference quantity named by the method) and, once
    bound to a schema, the basis indices the encoder needs.
    """

    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown criterion tag {self.tag!r}")
        level = self.params.get("level")
        if level is not None and level[0] != "abs" and not (0.0 <= level[1]):
            raise ValueError("relative level factor must be nonnegative")
        for key in ("eps", "sigma"):
            val = self.params.get(key)
            if val is not None and np.ndim(val) == 0 and val < 0:
                raise ValueError(f"{key} must be nonnegative")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero_error(e_index: int) -> "CriterionKind":
        return CriterionKind("ZeroError", {"e": e_index})

    @staticmethod
    def absolute_error_norm(eps) -> "CriterionKind":
        return CriterionKind("AbsoluteErrorNorm", {"eps": eps})

    @staticmethod
    def relative_error_norm(sigma: float) -> "CriterionKind":
        return CriterionKind("RelativeErrorNorm", {"sigma": sigma})

    @staticmethod
    def pd_gap_take_i(lam: float, x_index: int, u_index: int, v_index: int,
                      z, level, step: int, scale_by_lam: bool = False) -> "CriterionKind":
        return CriterionKind("PDGapTakeI", {
            "lam": lam, "x": x_index, "u": u_index, "v": v_index,
            "z": tuple(z), "level": tuple(level), "step": step,
            "scale_by_lam": scale_by_lam,
        })

    @staticmethod
    def pd_gap_take_iii(lam: float, x_index: int, v_index: int, z, level,
                        step: int) -> "CriterionKind":
        return CriterionKind("PDGapTakeIII", {
            "lam": lam, "x": x_index, "v": v_index, "z": tuple(z),
            "level": tuple(level), "step": step,
        })

    @staticmethod
    def pd_gap_take_iv(lam: float, x_index: int, u_index: int, p_index: int,
                       v_index: int, z, level, step: int) -> "CriterionKind":
        return CriterionKind("PDGapTakeIV", {
            "lam": lam, "x": x_index, "u": u_index, "p": p_index,
            "v": v_index, "z": tuple(z), "level": tuple(level), "step": step,
        })

    @staticmethod
    def pd_gap_take_v(lam: float, x_index: int, u_index: int, v_index: int,
                      z, level, step: int) -> "CriterionKind":
        return CriterionKind("PDGapTakeV", {
            "lam": lam, "x": x_index, "u": u_index, "v": v_index,
            "z": tuple(z), "level": tuple(level), "step": step,
        })

    @staticmethod
    def subgradient_residual(sigma: float) -> "CriterionKind":
        return CriterionKind("SubgradientResidual", {"sigma": sigma})

    def bind_error_step(self, e_index: int, w_index: int, w_prev_index: int,
                        lam: float, step: int) -> "CriterionKind":
        """Attach step indices to an unbound error-norm criterion."""
        if self.tag not in ("AbsoluteErrorNorm", "RelativeErrorNorm"):
            raise ValueError("only error-norm criteria bind to a plain step")
        params = dict(self.params)
        eps = params.get("eps")
        if eps is not None and np.ndim(eps) > 0:
            params["eps"] = float(np.asarray(eps)[step - 1])
        params.update({"e": e_index, "w": w_index, "w_prev": w_prev_index,
                       "lam": lam, "step": step})
        return CriterionKind(self.tag, params)

    # -- serialization ------------------------------------------------

    def to_json(self) -> str:
        def clean(obj):
            if isinstance(obj, np.ndarray):
                return obj.tolist()
            if isinstance(obj, (np.floating, np.integer)):
                return obj.item()
            if isinstance(obj, tuple):
                return list(obj)
            return obj
        return json.dumps({"tag": self.tag,
                           "params": {k: clean(v) for k, v in self.params.items()}},
                          sort_keys=True)

    @staticmethod
    def from_json(doc: str) -> "CriterionKind":
        data = json.loads(doc)
        params = data["params"]
        for key in ("z", "level"):
            if key in params and isinstance(params[key], list):
                params[key] = tuple(params[key])
        return CriterionKind(data["tag"], params)


# ---------------------------------------------------------------------------
# evaluating a criterion on a concrete tuple
# ---------------------------------------------------------------------------


def _as_vec(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


def check_criterion(kind: CriterionKind, sample: Mapping) -> tuple[bool, float]:
    """Evaluate a criterion on a concrete tuple; returns (ok, residual).

    ``sample`` supplies whatever the take demands: always x, z, lam and
    the level sigma; v for takes I/III and the residual notions; function
    and conjugate values (h_x, hstar_v, ...) where gaps need them; the
    auxiliary point u (plus its data) for takes IV/V.  The residual is
    lhs - rhs, nonpositive when the criterion holds.
    """
    x = _as_vec(sample["x"])
    z = _as_vec(sample["z"])
    lam = float(sample["lam"])
    sigma = float(sample.get("sigma", kind.params.get("sigma", kind.params.get("eps", 0.0))))
    tag = kind.tag

    def need(key):
        if key not in sample:
            raise KeyError(f"criterion {tag} needs sample entry {key!r}")
        return sample[key]

    if tag == "ZeroError":
        e = _as_vec(need("e"))
        residual = float(np.dot(e, e))
    elif tag == "AbsoluteErrorNorm":
        e = (z - x) / lam - _as_vec(need("v"))
        residual = float(np.dot(e, e)) - sigma ** 2 / lam ** 2
    elif tag == "RelativeErrorNorm":
        e = (z - x) / lam - _as_vec(need("v"))
        d = x - z
        residual = float(np.dot(e, e)) - sigma ** 2 / lam ** 2 * float(np.dot(d, d))
    elif tag == "PDGapTakeI":
        residual = pd_gap(x, need("v"), z, lam, need("h_x"), need("hstar_v")) - _level_rhs(kind, sample, sigma)
    elif tag == "PDGapTakeII":
        v = (z - x) / lam
        residual = pd_gap(x, v, z, lam, need("h_x"), need("hstar_zx")) - sigma
    elif tag == "PDGapTakeIII":
        residual = 0.5 * moreau_gap(x, need("v"), z, lam) - _level_rhs(kind, sample, sigma)
    elif tag == "PDGapTakeIV":
        u = _as_vec(need("u"))
        v = (z - x) / lam
        residual = pd_gap(u, v, z, lam, need("h_u"), need("hstar_zx")) - sigma
    elif tag == "PDGapTakeV":
        u = _as_vec(need("u"))
        residual = 0.5 * float(np.dot(x - u, x - u)) - sigma
    elif tag == "SubgradientResidual":
        v = _as_vec(need("v"))
        dh = _as_vec(need("subgrad_x"))
        dhs = _as_vec(need("conj_subgrad_v"))
        residual = max(float(np.linalg.norm(x - z + lam * v)),
                       float(np.linalg.norm(v - dh)),
                       float(np.linalg.norm(x - dhs))) - sigma
    else:  # pragma: no cover
        raise UnsupportedCriterionError(tag)
    return residual <= 0.0, residual


def _level_rhs(kind: CriterionKind, sample: Mapping, sigma: float) -> float:
    level = kind.params.get("level")
    if level is None or level[0] == "abs":
        return sigma if level is None else float(level[1])
    factor = float(level[1])
    x = _as_vec(sample["x"])
    z = _as_vec(sample["z"])
    # both relative references reduce to the step length ||x - z||
    return factor ** 2 / 2.0 * float(np.dot(x - z, x - z))


# ---------------------------------------------------------------------------
# Gram-representable encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GramConstraint:
    """One affine row Tr(A G) + a.H <= b over a PEP layout.

    ``A`` is held in factored form: A = sum_t c_t sym(p_t q_t^T) with the
    vectors expressed over the selection basis.
    """

    factors: tuple[tuple[float, np.ndarray, np.ndarray], ...]
    a: np.ndarray
    b: float
    dim: int
    tag: tuple = ()

    def matrix(self) -> np.ndarray:
        A = np.zeros((self.dim, self.dim))
        for c, p, q in self.factors:
            A += 0.5 * c * (np.outer(p, q) + np.outer(q, p))
        return A

    def gram_value(self, G: np.ndarray) -> float:
        """Tr(A G) for symmetric G."""
        return float(sum(c * (p @ G @ q) for c, p, q in self.factors))

    def evaluate(self, G: np.ndarray, H: np.ndarray) -> float:
        """Row residual Tr(A G) + a.H - b (<= 0 when satisfied)."""
        return self.gram_value(G) + float(self.a @ H) - self.b

    def scaled(self, factor: float) -> "GramConstraint":
        return GramConstraint(
            factors=tuple((c * factor, p, q) for c, p, q in self.factors),
            a=self.a * factor, b=self.b * factor, dim=self.dim, tag=self.tag)


@dataclass(frozen=True)
class EncodingContext:
    """Basis access handed to the encoder by the PEP builder.

    ``W`` holds the unrolled w-expressions (row k is w_k over the basis);
    w_star is basis column 0.
    """

    n_inner: int
    W: np.ndarray

    @property
    def dim(self) -> int:
        return basis.basis_dim(self.n_inner)

    def w(self, i) -> np.ndarray:
        if i == "star":
            return basis.unit(self.dim, basis.wstar_col(self.n_inner))
        return self.W[i]

    def v(self, k: int) -> np.ndarray:
        return basis.unit(self.dim, basis.v_col(self.n_inner, k))

    def e(self, k: int) -> np.ndarray:
        return basis.unit(self.dim, basis.e_col(self.n_inner, k))

    def h(self, i) -> np.ndarray:
        row = np.zeros(basis.value_dim(self.n_inner))
        if i != "star":
            row[i] = 1.0
        return row


def encode_criterion(kind: CriterionKind, ctx: EncodingContext) -> list[GramConstraint]:
    """Emit the Gram rows equivalent to ``kind`` on the given layout.

    Raises UnsupportedCriterionError for criteria that have no
    Gram-representable form (the subgradient-residual max criterion and
    the abstract notions) or that need a construction this encoder does
    not materialize (take II).
    """
    tag = kind.tag
    P = kind.params
    zvec = np.zeros(basis.value_dim(ctx.n_inner))

    if tag == "ZeroError":
        e = ctx.e(P["e"])
        return [GramConstraint(factors=((1.0, e, e),), a=zvec, b=0.0, dim=ctx.dim,
                               tag=("crit", P.get("step", 0), "pin", P["e"]))]

    if tag == "AbsoluteErrorNorm":
        e = ctx.e(P["e"])
        lam = float(P["lam"])
        return [GramConstraint(factors=((1.0, e, e),), a=zvec, dim=ctx.dim,
                               b=float(P["eps"]) ** 2 / lam ** 2,
                               tag=("crit", P["step"], "abs-err"))]

    if tag == "RelativeErrorNorm":
        e = ctx.e(P["e"])
        lam = float(P["lam"])
        d = ctx.w(P["w"]) - ctx.w(P["w_prev"])
        sig = float(P["sigma"])
        return [GramConstraint(
            factors=((1.0, e, e), (-sig ** 2 / lam ** 2, d, d)),
            a=zvec, b=0.0, dim=ctx.dim, tag=("crit", P["step"], "rel-err"))]

    if tag in ("PDGapTakeI", "PDGapTakeIII"):
        return [_encode_pd_gap(kind, ctx)]

    if tag == "PDGapTakeIV":
        # take I measured at the materialized point u, with the true
        # subgradient living at p and the method output x = z - lam v
        lam = float(P["lam"])
        _assert_extragradient_output(ctx, P, lam)
        inner = CriterionKind.pd_gap_take_i(
            lam=lam, x_index=P["u"], u_index=P["p"], v_index=P["v"],
            z=P["z"], level=P["level"], step=P["step"])
        row = _encode_pd_gap(inner, ctx)
        return [GramConstraint(row.factors, row.a, row.b, dim=ctx.dim,
                               tag=("crit", P["step"], "take-iv"))]

    if tag == "PDGapTakeV":
        lam = float(P["lam"])
        _assert_extragradient_output(ctx, P, lam)
        d = ctx.w(P["x"]) - ctx.w(P["u"])
        level = P["level"]
        if level[0] != "abs":
            raise UnsupportedCriterionError("take V supports absolute levels only")
        return [GramConstraint(factors=((0.5, d, d),), a=zvec, b=float(level[1]),
                               dim=ctx.dim, tag=("crit", P["step"], "take-v"))]

    if tag in ("PDGapTakeII", "SubgradientResidual"):
        raise UnsupportedCriterionError(
            f"{tag} has no Gram encoding here: it is evaluator-only "
            "(take II would need an eps-subdifferential layout; the residual "
            "max-criterion is not affine in the Gram entries)")

    raise UnsupportedCriterionError(tag)  # pragma: no cover


def _assert_extragradient_output(ctx: EncodingContext, P: Mapping, lam: float) -> None:
    ztag, zarg = P["z"]
    if ztag != "point":
        raise UnsupportedCriterionError("takes IV/V need an explicit base point z")
    resid = ctx.w(P["x"]) - (ctx.w(zarg) - lam * ctx.v(P["v"]))
    if np.max(np.abs(resid)) > 1e-12:
        raise ValueError("method rows do not realize x = z - lam v, "
                         "cannot encode the extragradient take")


def _encode_pd_gap(kind: CriterionKind, ctx: EncodingContext) -> GramConstraint:
    P = kind.params
    lam = float(P["lam"])
    x = ctx.w(P["x"])
    vcol = ctx.v(P["v"])
    factors: list[tuple[float, np.ndarray, np.ndarray]] = []

    if kind.tag == "PDGapTakeI":
        u = ctx.w(P["u"])
        a = lam * (ctx.h(P["x"]) - ctx.h(P["u"]))
        factors.append((-lam, vcol, x - u))
    else:  # take III: v is a true subgradient at x, the value terms cancel
        a = np.zeros(basis.value_dim(ctx.n_inner))

    ztag, zarg = P["z"]
    if ztag == "step":
        # z = x + lam (v + e):  x - z + lam v = -lam e
        e = ctx.e(zarg)
        factors.append((0.5 * lam ** 2, e, e))
    else:
        m = x - ctx.w(zarg) + lam * vcol
        factors.append((0.5, m, m))

    b = 0.0
    ltag = P["level"][0]
    if ltag == "abs":
        b = float(P["level"][1])
    elif ltag == "moreau_step":
        sig = float(P["level"][1])
        ve = vcol + ctx.e(P["level"][2])
        factors.append((-0.5 * sig ** 2 * lam ** 2, ve, ve))
    elif ltag == "prox_distance":
        sig = float(P["level"][1])
        d = x - ctx.w(P["level"][2])
        factors.append((-0.5 * sig ** 2, d, d))
    else:
        raise ValueError(f"unknown level spec {P['level']!r}")

    row = GramConstraint(factors=tuple(factors), a=a, b=b, dim=ctx.dim,
                         tag=("crit", P["step"], kind.tag.lower()))
    if P.get("scale_by_lam"):
        row = row.scaled(1.0 / lam)
    return row
