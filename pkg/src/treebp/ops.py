"""Elementary channel operators and the one-step BP map.

The BP density-evolution step with parameters (degree law P_d, crossover
delta, survey law mu_s) sends a symmetric law mu to

    E_d[ (B_delta boxconv mu)^{*d} ] * mu_s,

where boxconv is box convolution (tanh-half magnitudes multiply), * is
ordinary convolution of LLRs, and B_phi is the BSC law.  Convolution
grows atom counts quadratically, so repeated application rounds every
convolution power onto a uniform lambda grid; the rounding mode decides
what the result certifies:

    "down"    one-sided degradation (rigorous lower transport)
    "up"      one-sided un-degradation (rigorous upper transport)
    "nearest" closest node (midpoint of the down/up pair)
    "split"   mean-preserving two-node split (most accurate, not order-safe)
    None      exact arithmetic, bounded by ``atom_limit``
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _conv
from .errors import AtomBudgetExceeded, NotAnLlrDistribution
from .symdist import (
    MERGE_EPS,
    AsymmetricLlr,
    SymmetricDist,
    bsc,
)

DEFAULT_GRID = 4096
# Cap on raw pair outputs of a single exact convolution.
DEFAULT_ATOM_LIMIT = 4_000_000


# -------------------------------------------------------------------- degrees


@dataclass(frozen=True)
class DegreeDistribution:
    """Offspring-number law: fixed, truncated Poisson, or explicit pmf."""

    kind: str
    ds: np.ndarray
    ps: np.ndarray
    param: float | None = None

    def __post_init__(self):
        ds = np.ascontiguousarray(self.ds, dtype=np.int64)
        ps = np.ascontiguousarray(self.ps, dtype=float)
        if ds.ndim != 1 or ds.shape != ps.shape or ds.size == 0:
            raise ValueError("degree table must be non-empty 1-d arrays")
        if np.any(ds < 0) or np.any(np.diff(ds) <= 0):
            raise ValueError("degrees must be distinct non-negative integers, ascending")
        if np.any(ps <= 0) or abs(ps.sum() - 1.0) > 1e-9:
            raise ValueError("degree weights must be positive and sum to 1")
        ds.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "ds", ds)
        object.__setattr__(self, "ps", ps / ps.sum() if ps.sum() != 1.0 else ps)

    @staticmethod
    def fixed(d: int) -> "DegreeDistribution":
        if d < 0:
            raise ValueError("degree must be non-negative")
        return DegreeDistribution("fixed", np.array([d]), np.array([1.0]), float(d))

    @staticmethod
    def poisson(mean: float, tail_eps: float = 1e-12) -> "DegreeDistribution":
        """Poisson(mean) truncated where the tail mass drops below tail_eps;
        the residual is folded into the largest retained degree."""
        if mean < 0:
            raise ValueError("mean must be non-negative")
        if mean == 0:
            return DegreeDistribution("poisson", np.array([0]), np.array([1.0]), 0.0)
        pmf = [math.exp(-mean)]
        while sum(pmf) < 1.0 - tail_eps:
            pmf.append(pmf[-1] * mean / len(pmf))
            if len(pmf) > 10_000:  # pragma: no cover
                raise ValueError("Poisson truncation did not converge")
        ps = np.array(pmf)
        ps[-1] += max(0.0, 1.0 - ps.sum())
        return DegreeDistribution("poisson", np.arange(len(pmf)), ps, float(mean))

    @staticmethod
    def pmf(pairs: Sequence[tuple[int, float]]) -> "DegreeDistribution":
        pairs = sorted((int(d), float(w)) for d, w in pairs)
        ds = np.array([d for d, _ in pairs])
        ps = np.array([w for _, w in pairs])
        return DegreeDistribution("pmf", ds, ps, None)

    def mean(self) -> float:
        return float(np.dot(self.ds, self.ps))

    @property
    def max_d(self) -> int:
        return int(self.ds[-1])

    def prob_at_most(self, d: int) -> float:
        return float(self.ps[self.ds <= d].sum())

    def to_json(self) -> dict:
        if self.kind == "fixed":
            return {"fixed": int(self.param)}
        if self.kind == "poisson":
            return {"poisson": float(self.param)}
        return {"pmf": [[int(d), float(p)] for d, p in zip(self.ds, self.ps)]}

    @staticmethod
    def from_json(obj: dict) -> "DegreeDistribution":
        if "fixed" in obj:
            return DegreeDistribution.fixed(int(obj["fixed"]))
        if "poisson" in obj:
            return DegreeDistribution.poisson(float(obj["poisson"]))
        if "pmf" in obj:
            return DegreeDistribution.pmf([(d, w) for d, w in obj["pmf"]])
        raise ValueError(f"unrecognized degree object {obj!r}")


@dataclass(frozen=True)
class BpParams:
    """Parameters of one density-evolution step."""

    degree: DegreeDistribution
    delta: float
    survey: SymmetricDist = field(default_factory=SymmetricDist.delta0)

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")

    @property
    def no_survey(self) -> bool:
        return self.survey.is_trivial

    @property
    def is_exceptional(self) -> bool:
        """True when the step is the identity map: no survey, degree 1
        almost surely and a noiseless (or perfectly flipping) edge."""
        return (
            self.no_survey
            and self.degree.ds.size == 1
            and self.degree.max_d == 1
            and self.delta in (0.0, 1.0)
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree.to_json(),
            "delta": float(self.delta),
            "survey": None if self.no_survey else self.survey.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "BpParams":
        survey = obj.get("survey")
        return BpParams(
            DegreeDistribution.from_json(obj["degree"]),
            float(obj["delta"]),
            SymmetricDist.delta0() if survey is None else SymmetricDist.from_json(survey),
        )


# -------------------------------------------------------------------- scalar ops


def f_delta(delta: float, x):
    """The edge map F_delta(x) = 2 atanh((1-2 delta) tanh(x/2)).

    Computed in the tanh domain for stability; F_delta(+inf) is the finite
    value ln((1-delta)/delta) for delta in (0, 1).  delta > 1/2 flips sign.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 2.0 * np.arctanh((1.0 - 2.0 * delta) * np.tanh(x / 2.0))
    return out if out.ndim else float(out)


# -------------------------------------------------------------------- box convolution


def box_conv(mu: SymmetricDist, nu: SymmetricDist) -> SymmetricDist:
    """Box convolution: tanh-half magnitudes multiply.

    Mass at +inf acts as the multiplicative identity on the partner atom;
    the output carries mass at +inf only from the product of both inputs'
    infinite masses.
    """
    lam1 = np.append(mu.lam, 1.0) if mu.inf_mass > 0 else mu.lam
    w1 = np.append(mu.w, mu.inf_mass) if mu.inf_mass > 0 else mu.w
    lam2 = np.append(nu.lam, 1.0) if nu.inf_mass > 0 else nu.lam
    w2 = np.append(nu.w, nu.inf_mass) if nu.inf_mass > 0 else nu.w
    prod = (lam1[:, None] * lam2[None, :]).ravel()
    wout = (w1[:, None] * w2[None, :]).ravel()
    return SymmetricDist.from_atoms(prod, wout)


# -------------------------------------------------------------------- convolution


def _inf_union(a: float, b: float) -> float:
    return a + b - a * b


def conv(mu: SymmetricDist, nu: SymmetricDist, *, atom_limit: int = DEFAULT_ATOM_LIMIT) -> SymmetricDist:
    """Exact convolution of the signed laws, re-canonicalized.

    Works entirely in the magnitude domain: each pair of magnitude atoms
    produces a sum atom and a difference atom with the symmetric weights.
    Any operand atom at +inf dominates its pairings.  Raises
    :class:`AtomBudgetExceeded` when the raw pair output would exceed
    ``atom_limit`` atoms.
    """
    n_out = 2 * mu.n_atoms * nu.n_atoms
    if n_out > atom_limit:
        raise AtomBudgetExceeded(
            f"exact convolution would produce {n_out} atoms (limit {atom_limit}); "
            "quantize the operands or raise the limit"
        )
    out_lam = np.empty(n_out)
    out_w = np.empty(n_out)
    k = _conv.conv_mag_exact(mu.lam, mu.w, nu.lam, nu.w, out_lam, out_w)
    return SymmetricDist.from_atoms(out_lam[:k], out_w[:k], _inf_union(mu.inf_mass, nu.inf_mass))


def conv_quantized(
    mu: SymmetricDist, nu: SymmetricDist, grid_size: int, rounding: str
) -> SymmetricDist:
    """Convolution with outputs rounded onto the uniform lambda grid."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    mode = _conv.mode_code(rounding)
    out = np.zeros(grid_size)
    inf = _conv.conv_mag_grid(mu.lam, mu.w, nu.lam, nu.w, grid_size, mode, out)
    inf += _inf_union(mu.inf_mass, nu.inf_mass)
    nz = np.flatnonzero(out)
    return SymmetricDist.from_atoms(nz / grid_size, out[nz], inf)


def quantize(mu: SymmetricDist, grid_size: int, rounding: str) -> SymmetricDist:
    """Round every atom onto the uniform lambda grid {k / grid_size}."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    g = grid_size
    x = mu.lam * g
    inf = mu.inf_mass
    if rounding == "split":
        f = np.floor(x).astype(np.intp)
        # squared-position interpolation weight (see _conv docstring)
        share = (x * x - f.astype(float) ** 2) / (2.0 * f + 1.0)
        buckets = np.zeros(g + 1)
        np.add.at(buckets, f, mu.w * (1.0 - share))
        np.add.at(buckets, np.minimum(f + 1, g), mu.w * share)
    else:
        if rounding == "down":
            idx = np.floor(x + _conv._SNAP).astype(np.intp)
        elif rounding == "up":
            idx = np.ceil(x - _conv._SNAP).astype(np.intp)
        elif rounding == "nearest":
            idx = np.rint(x).astype(np.intp)
        else:
            raise ValueError(f"unknown rounding mode {rounding!r}")
        buckets = np.zeros(g + 1)
        np.add.at(buckets, np.clip(idx, 0, g), mu.w)
    inf += buckets[g]
    nz = np.flatnonzero(buckets[:g])
    return SymmetricDist.from_atoms(nz / g, buckets[nz], inf)


def quantize_bracket(mu: SymmetricDist, grid_size: int) -> tuple[SymmetricDist, SymmetricDist]:
    """Two-sided grid rounding: (lower, upper) with lower <= mu <= upper
    in the degradation order.

    Rounding lambda down moves mass to smaller magnitudes, which lowers the
    beta-curve pointwise (a degradation); rounding up is the reverse.  Both
    outputs have at most grid_size + 1 atoms and their beta-curves differ
    by at most one grid step anywhere.
    """
    return quantize(mu, grid_size, "down"), quantize(mu, grid_size, "up")


# -------------------------------------------------------------------- BP operator


def _conv_step(
    a: SymmetricDist, b: SymmetricDist, grid_size: int | None, rounding: str | None, atom_limit: int
) -> SymmetricDist:
    if rounding is None:
        return conv(a, b, atom_limit=atom_limit)
    return conv_quantized(a, b, grid_size, rounding)


def _self_conv_powers(
    nu: SymmetricDist,
    ds: Sequence[int],
    grid_size: int | None,
    rounding: str | None,
    atom_limit: int,
) -> dict[int, SymmetricDist]:
    """Convolution powers nu^{*d} for every degree in ds, rounding after
    each convolution.  A single degree uses binary exponentiation."""
    need = sorted(set(int(d) for d in ds))
    powers: dict[int, SymmetricDist] = {}
    if need == [0]:
        return {0: SymmetricDist.delta0()}
    if len(need) == 1:
        d = need[0]
        acc: SymmetricDist | None = None
        base = nu
        k = d
        while k:
            if k & 1:
                acc = base if acc is None else _conv_step(acc, base, grid_size, rounding, atom_limit)
            k >>= 1
            if k:
                base = _conv_step(base, base, grid_size, rounding, atom_limit)
        powers[d] = acc if acc is not None else SymmetricDist.delta0()
        return powers
    cur = SymmetricDist.delta0()
    for d in range(need[-1] + 1):
        if d == 1:
            cur = nu
        elif d > 1:
            cur = _conv_step(cur, nu, grid_size, rounding, atom_limit)
        if d in need:
            powers[d] = cur
    return powers


def bp_apply(
    params: BpParams,
    mu: SymmetricDist,
    *,
    grid_size: int = DEFAULT_GRID,
    rounding: str | None = "split",
    atom_limit: int = DEFAULT_ATOM_LIMIT,
) -> SymmetricDist:
    """One density-evolution step E_d[(B_delta boxconv mu)^{*d}] * mu_s.

    ``rounding`` selects the grid transport applied after every
    convolution (see the module docstring); None computes exactly and
    raises :class:`AtomBudgetExceeded` if the cloud outgrows
    ``atom_limit``.  With "down"/"up" the output is a rigorous
    lower/upper bound of the true step in the degradation order.
    """
    nu = box_conv(bsc(params.delta), mu)
    powers = _self_conv_powers(nu, params.degree.ds, grid_size, rounding, atom_limit)
    mixed = SymmetricDist.mixture(
        [powers[int(d)] for d in params.degree.ds], params.degree.ps
    )
    if params.no_survey:
        return mixed
    return _conv_step(mixed, params.survey, grid_size, rounding, atom_limit)


# -------------------------------------------------------------------- asymmetric BP


def _signed_conv_step(
    a: AsymmetricLlr, b: AsymmetricLlr, grid_size: int | None, rounding: str | None, atom_limit: int
) -> AsymmetricLlr:
    if rounding is None:
        n_out = a.n_atoms * b.n_atoms
        if n_out > atom_limit:
            raise AtomBudgetExceeded(
                f"exact signed convolution would produce {n_out} atoms (limit {atom_limit})"
            )
        out_s = np.empty(n_out)
        out_w = np.empty(n_out)
        k = _conv.conv_signed_exact(a.slam, a.w, b.slam, b.w, out_s, out_w)
        return AsymmetricLlr.from_slam(out_s[:k], out_w[:k])
    g = grid_size
    out = np.zeros(2 * g + 1)
    _conv.conv_signed_grid(a.slam, a.w, b.slam, b.w, g, _conv.mode_code(rounding), out)
    nz = np.flatnonzero(out)
    return AsymmetricLlr.from_slam((nz - g) / g, out[nz])


def _asym_mixture(parts: Sequence[AsymmetricLlr], weights: Sequence[float]) -> AsymmetricLlr:
    slam = np.concatenate([p.slam for p in parts])
    w = np.concatenate([q * p.w for q, p in zip(weights, parts)])
    return AsymmetricLlr.from_slam(slam, w)


def bp_apply_asym(
    params: BpParams,
    mu: AsymmetricLlr,
    *,
    grid_size: int | None = None,
    rounding: str | None = None,
    atom_limit: int = DEFAULT_ATOM_LIMIT,
) -> AsymmetricLlr:
    """One BP step for a general LLR law.

    Each incoming message is an independent draw from the mixture
    (1-delta) mu + delta mu^- pushed through F_delta (a plain scaling by
    1 - 2 delta in the tanh-half domain); the d-wise sums are mixed over
    the degree law and convolved with the survey.  For symmetric inputs
    this coincides with :func:`bp_apply`.

    The default is exact arithmetic; pass a grid to control atom growth
    under iteration (the outputs then carry grid rounding error, with no
    degradation-order guarantee in either direction).
    """
    if not mu.is_llr:
        raise NotAnLlrDistribution(f"E[e^-R] = {mu.llr_integral():.6g} > 1")
    comp = mu.complement()
    mixed_in = _asym_mixture([mu, comp], [1.0 - params.delta, params.delta])
    edge = AsymmetricLlr.from_slam(mixed_in.slam * (1.0 - 2.0 * params.delta), mixed_in.w)

    need = sorted(set(int(d) for d in params.degree.ds))
    powers: dict[int, AsymmetricLlr] = {}
    trivial = AsymmetricLlr.from_slam(np.array([0.0]), np.array([1.0]))
    cur = trivial
    for d in range(need[-1] + 1):
        if d == 1:
            cur = edge
        elif d > 1:
            cur = _signed_conv_step(cur, edge, grid_size, rounding, atom_limit)
        if d in need:
            powers[d] = cur
    out = _asym_mixture([powers[int(d)] for d in params.degree.ds], params.degree.ps)
    if not params.no_survey:
        s_slam, s_w = params.survey.signed()
        survey_cloud = AsymmetricLlr.from_slam(s_slam, s_w)
        out = _signed_conv_step(out, survey_cloud, grid_size, rounding, atom_limit)
    return out
