"""Large-degree limit of the BP step: Gaussian components and scalar maps.

When degrees grow while edges weaken, a BP step only sees the scalar

    V(mu) = 4 E[tanh(R/2)]  =  4 E[tanh^2(R/2)]   (equal for symmetric laws)

and maps mu to a mixture of Gaussian components N(s) = Normal(s/2, s)
with s = dbar * V(mu), mixed over a law for the effective degree dbar on
[0, +inf], then convolved with the survey.  N(s/2, s) is itself a
symmetric LLR law (its density ratio at +/-r is exactly e^r), so the
whole machinery of the canonical representation applies after
discretizing each component.

With a trivial survey the fixed-point problem collapses to one scalar
equation V = E_dbar[v_map(dbar, V)], since the step depends on its input
only through V.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import erf, ndtr

from .fixpoint import IterationTrace, StopRule, TraceStep, linf_beta_gap
from .ops import conv
from .symdist import SymmetricDist

# Quantile count for discretizing one Gaussian component.
COMPONENT_ATOMS = 1025


@dataclass(frozen=True)
class DbarDistribution:
    """Finite pmf for the effective degree on [0, +inf]."""

    ds: np.ndarray
    ps: np.ndarray

    def __post_init__(self):
        ds = np.ascontiguousarray(self.ds, dtype=float)
        ps = np.ascontiguousarray(self.ps, dtype=float)
        if ds.ndim != 1 or ds.shape != ps.shape or ds.size == 0:
            raise ValueError("pmf must be non-empty 1-d arrays")
        if np.any(ds < 0) or np.any(np.isnan(ds)):
            raise ValueError("dbar values must lie in [0, +inf]")
        if np.any(np.diff(ds) <= 0):
            raise ValueError("dbar values must be strictly increasing")
        if np.any(ps <= 0) or abs(ps.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be positive and sum to 1")
        ds.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "ds", ds)
        object.__setattr__(self, "ps", ps / ps.sum() if ps.sum() != 1.0 else ps)

    @staticmethod
    def fixed(dbar: float) -> "DbarDistribution":
        return DbarDistribution(np.array([float(dbar)]), np.array([1.0]))

    @staticmethod
    def pmf(pairs: Sequence[tuple[float, float]]) -> "DbarDistribution":
        pairs = sorted((float(d), float(w)) for d, w in pairs)
        return DbarDistribution(
            np.array([d for d, _ in pairs]), np.array([w for _, w in pairs])
        )

    def mean(self) -> float:
        """E[dbar]; +inf if an infinite atom is present."""
        if np.isinf(self.ds[-1]):
            return math.inf
        return float(np.dot(self.ds, self.ps))

    def to_json(self) -> dict:
        return {
            "pmf": [
                ["inf" if np.isinf(d) else float(d), float(p)]
                for d, p in zip(self.ds, self.ps)
            ]
        }

    @staticmethod
    def from_json(obj: dict) -> "DbarDistribution":
        pairs = []
        for d, p in obj["pmf"]:
            if isinstance(d, str):
                d = math.inf
            pairs.append((float(d), float(p)))
        return DbarDistribution.pmf(pairs)


def v_stat(mu: SymmetricDist) -> float:
    """V(mu) = 4 E[tanh(R/2)] under the signed law.

    For symmetric laws this equals 4 E[tanh^2(R/2)] = 4 (sum w lambda^2 +
    inf_mass), which is the form computed here.
    """
    return 4.0 * (float(np.dot(mu.w, mu.lam**2)) + mu.inf_mass)


def gaussian_beta(s: float, t) -> float:
    """beta(t) of the Gaussian component N(s/2, s), in closed form.

    beta(t) = ((1-t) erf(q - r) + (1+t) erf(q + r)) / 2 with
    q = sqrt(s)/(2 sqrt(2)) and r = sqrt(2/s) atanh(t); the limits are
    t at s = 0 and 1 at s = +inf.
    """
    if s < 0:
        raise ValueError("signal parameter must be non-negative")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("t must lie in [0, 1]")
    if s == 0.0:
        out = t.copy()
        return out if out.ndim else float(out)
    if math.isinf(s):
        out = np.ones_like(t)
        return out if out.ndim else float(out)
    q = math.sqrt(s) / (2.0 * math.sqrt(2.0))
    with np.errstate(divide="ignore"):
        r = math.sqrt(2.0 / s) * np.arctanh(t)
    hi = erf(q + r)
    lo = np.where(np.isinf(r), -1.0, erf(q - r))
    out = 0.5 * ((1.0 - t) * lo + (1.0 + t) * hi)
    out = np.where(t >= 1.0, 1.0, out)
    return out if out.ndim else float(out)


@lru_cache(maxsize=16)
def _gh_nodes(order: int):
    x, w = np.polynomial.hermite.hermgauss(order)
    return x * math.sqrt(2.0), w / math.sqrt(math.pi)


def v_map(dbar: float, v: float, *, order: int = 64, tol: float = 1e-10) -> float:
    """V of the Gaussian component N(dbar * v): 4 E[tanh(R/2)] for
    R ~ Normal(dbar*v/2, dbar*v), by Gauss-Hermite quadrature.

    The order doubles until two successive values agree to ``tol``.
    Always below 4; slope dbar at v = 0.
    """
    if dbar < 0 or v < 0:
        raise ValueError("dbar and v must be non-negative")
    s = dbar * v
    if s == 0.0:
        return 0.0
    if math.isinf(s):
        return 4.0
    prev = None
    while True:
        z, wts = _gh_nodes(order)
        val = 4.0 * float(np.dot(wts, np.tanh((s / 2.0 + math.sqrt(s) * z) / 2.0)))
        if prev is not None and abs(val - prev) < tol:
            return val
        if order >= 1024:
            return val
        prev = val
        order *= 2


def discretize_gaussian(s: float, n_atoms: int = COMPONENT_ATOMS) -> SymmetricDist:
    """Canonical atom cloud for N(s/2, s) via equal-probability quantiles
    of the magnitude law |R|.

    Symmetry is enforced by construction: only the magnitudes are sampled
    and the canonical representation carries the signed split.
    """
    if s < 0:
        raise ValueError("signal parameter must be non-negative")
    if s == 0.0:
        return SymmetricDist.delta0()
    if math.isinf(s):
        return SymmetricDist.perfect()
    m, sd = s / 2.0, math.sqrt(s)
    hi = m + 9.0 * sd
    x = np.linspace(0.0, hi, 200_001)
    cdf = ndtr((x - m) / sd) - ndtr((-x - m) / sd)  # P(|R| <= x)
    q = (np.arange(n_atoms) + 0.5) / n_atoms
    cdf[-1] = 1.0  # the 9-sigma tail carries ~1e-19 mass
    pos = np.interp(q, cdf, x)
    lam = np.tanh(pos / 2.0)
    return SymmetricDist.from_atoms(lam, np.full(n_atoms, 1.0 / n_atoms))


def ql_apply(
    pdbar: DbarDistribution,
    survey: SymmetricDist,
    mu: SymmetricDist,
    *,
    n_atoms: int = COMPONENT_ATOMS,
) -> SymmetricDist:
    """One large-degree BP step: mix N(dbar * V(mu)) over dbar, then
    convolve with the survey."""
    v = v_stat(mu)
    parts = [discretize_gaussian(d * v if v > 0 else 0.0, n_atoms) for d in pdbar.ds]
    mixed = SymmetricDist.mixture(parts, pdbar.ps)
    if survey.is_trivial:
        return mixed
    return conv(mixed, survey)


@dataclass(frozen=True)
class QlSolution:
    """Fixed point of the large-degree step.

    ``v_star`` is the scalar solution (trivial-survey case), with
    ``residual`` = |v_star - E[v_map(dbar, v_star)]|.  For non-trivial
    surveys the fixed point is found by iterating from both extreme
    initializations; ``final_gap`` is their terminal beta-curve distance.
    """

    dist: SymmetricDist
    v_star: float | None
    residual: float
    final_gap: float
    trace: IterationTrace


def _vbar_map(pdbar: DbarDistribution, v: float) -> float:
    return float(sum(p * v_map(d, v) for d, p in zip(pdbar.ds, pdbar.ps)))


def ql_fixed_point(
    pdbar: DbarDistribution,
    survey: SymmetricDist | None = None,
    stop: StopRule = StopRule(max_steps=500, linf_tol=1e-6),
    *,
    n_atoms: int = COMPONENT_ATOMS,
    v_tol: float = 1e-9,
) -> QlSolution:
    """Solve mu = QL(mu).

    Trivial survey: the step sees its input only through V, so the fixed
    point solves the scalar equation V = E[v_map(dbar, V)], bisected on
    [v_tol, 4] (the map is concave with slope E[dbar] at 0 and stays
    below 4).  A non-trivial root exists iff E[dbar] > 1; otherwise the
    trivial law is returned with v_star = 0.

    Non-trivial survey: iterates from the perfect and trivial laws until
    the two chains meet within stop.linf_tol, returning their midpoint
    mixture.
    """
    survey = survey if survey is not None else SymmetricDist.delta0()
    trace = IterationTrace()
    if survey.is_trivial:
        lo, hi = v_tol, 4.0
        g_lo = _vbar_map(pdbar, lo) - lo
        if g_lo <= 0.0:  # no non-trivial fixed point
            return QlSolution(SymmetricDist.delta0(), 0.0, 0.0, 0.0, trace)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _vbar_map(pdbar, mid) - mid > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13:
                break
        v_star = 0.5 * (lo + hi)
        residual = abs(v_star - _vbar_map(pdbar, v_star))
        parts = [discretize_gaussian(d * v_star, n_atoms) for d in pdbar.ds]
        dist = SymmetricDist.mixture(parts, pdbar.ps)
        return QlSolution(dist, v_star, residual, 0.0, trace)

    upper = SymmetricDist.perfect()
    lower = SymmetricDist.delta0()
    gap = math.inf
    for h in range(1, stop.max_steps + 1):
        upper = ql_apply(pdbar, survey, upper, n_atoms=n_atoms)
        lower = ql_apply(pdbar, survey, lower, n_atoms=n_atoms)
        gap = linf_beta_gap(upper, lower)
        trace.append(TraceStep(h, upper.beta0, upper.t_max, gap, float("nan"), gap))
        if gap < stop.linf_tol:
            break
    final = SymmetricDist.mixture([upper, lower], [0.5, 0.5])
    return QlSolution(final, None, float("nan"), gap, trace)
