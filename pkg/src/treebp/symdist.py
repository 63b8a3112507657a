"""Canonical symmetric and asymmetric LLR distributions.

A binary-input symmetric channel is summarized by the law of its
log-likelihood ratio R conditioned on input 0.  Symmetry means
dmu(r) = e^r dmu(-r), so the law is completely determined by the
magnitude statistic

    lambda = tanh(|R| / 2)  in [0, 1],

and we store exactly that: a sorted atom list (lambda_i, w_i) plus the
mass at R = +infinity (lambda = 1).  The signed law is recovered by
splitting each atom into +r with weight w*(1+lambda)/2 and -r with
weight w*(1-lambda)/2, where r = 2*atanh(lambda).

The lambda domain is the numerically stable one: box convolution is a
plain product there, and the beta-curve

    beta(t) = E[max(tanh(|R|/2), |t|)]

reads off the atoms directly.  beta-curves characterize channel
degradation (nu is degraded w.r.t. mu iff beta(t; nu) <= beta(t; mu)
for all t), which this module exposes together with the degradation
index phi*(mu, nu) (the smallest BSC noise phi such that prepending a
BSC(phi) to mu leaves it degraded w.r.t. nu) and the induced metric

    d(mu, nu) = |ln(1 - 2 phi*(mu, nu)) + ln(1 - 2 phi*(nu, mu))|.

LLR values with |r| >= R_CAP are treated as infinite: tanh saturates to
1.0 in double precision well below that point, so nothing representable
is lost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NotAnLlrDistribution, SymmetryViolation, TrivialDistribution

# LLR magnitude treated as +infinity (tanh(R_CAP/2) rounds to 1.0 in float64).
R_CAP = 60.0
# Atoms with lambda closer than this are merged.
MERGE_EPS = 1e-12
# Allowed deviation of the signed mass split from the symmetric ratio.
TOL_SYM = 1e-9
# Default absolute tolerance on beta values in degradation tests.
DEG_TOL = 1e-9
# Weight sums further than this from 1 are rejected; closer ones renormalized.
_NORM_SLOP = 1e-9
# Number of bisection steps for the degradation index (width 0.5 * 2**-60).
_INDEX_ITERS = 60


def lam_to_llr(lam):
    """2 * atanh(lambda); maps lambda = 1 to +inf."""
    lam = np.asarray(lam, dtype=float)
    out = 2.0 * np.arctanh(np.clip(lam, 0.0, 1.0))
    return out if out.ndim else float(out)


def llr_to_lam(r):
    """tanh(|r| / 2) with the R_CAP saturation rule."""
    r = np.asarray(r, dtype=float)
    a = np.abs(r)
    out = np.where(a >= R_CAP, 1.0, np.tanh(a / 2.0))
    return out if out.ndim else float(out)


def _group_close(values: np.ndarray, eps: float) -> np.ndarray:
    """Group boundaries (start indices) for a sorted array, merging
    neighbours closer than eps."""
    if values.size == 0:
        return np.zeros(0, dtype=np.intp)
    new_group = np.empty(values.size, dtype=bool)
    new_group[0] = True
    np.greater(np.diff(values), eps, out=new_group[1:])
    return np.flatnonzero(new_group)


def _merge_atoms(lam: np.ndarray, w: np.ndarray, eps: float = MERGE_EPS):
    """Sort atoms by lambda and merge near-duplicates (weighted-mean position)."""
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    w = w[order]
    starts = _group_close(lam, eps)
    if starts.size == lam.size:
        return lam.copy(), w.copy()
    wm = np.add.reduceat(w, starts)
    lm = np.add.reduceat(lam * w, starts)
    with np.errstate(invalid="ignore"):
        pos = np.where(wm > 0, lm / np.where(wm > 0, wm, 1.0), lam[starts])
    return pos, wm


@dataclass(frozen=True, eq=False)
class SymmetricDist:
    """Finite-atom symmetric LLR law in the canonical lambda representation.

    Fields are immutable; all operations return new objects, so values can
    be shared freely between threads.
    """

    lam: np.ndarray
    w: np.ndarray
    inf_mass: float = 0.0

    def __post_init__(self):
        lam = np.ascontiguousarray(self.lam, dtype=float)
        w = np.ascontiguousarray(self.w, dtype=float)
        if lam.ndim != 1 or w.ndim != 1 or lam.shape != w.shape:
            raise ValueError("lam and w must be 1-d arrays of equal length")
        if lam.size and (not np.all(np.isfinite(lam)) or lam[0] < 0.0 or lam[-1] >= 1.0):
            raise ValueError("lambda values must lie in [0, 1)")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("lambda values must be strictly increasing")
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be strictly positive and finite")
        if not (0.0 <= self.inf_mass <= 1.0):
            raise ValueError("inf_mass must be in [0, 1]")
        total = w.sum() + self.inf_mass
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"total mass {total!r} differs from 1 by more than 1e-12")
        lam.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "inf_mass", float(self.inf_mass))

    # ---------------------------------------------------------------- factories

    @staticmethod
    def from_atoms(lam, w, inf_mass: float = 0.0, *, eps: float = MERGE_EPS) -> "SymmetricDist":
        """Build a canonical distribution from a raw atom cloud.

        Sorts, merges lambdas closer than ``eps``, folds lambda >= 1 into the
        infinity mass, drops zero weights and renormalizes drift up to 1e-9.
        """
        lam = np.asarray(lam, dtype=float).ravel()
        w = np.asarray(w, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("negative weight")
        keep = w > 0.0
        lam, w = lam[keep], w[keep]
        at_inf = lam >= 1.0
        inf_mass = float(inf_mass) + float(w[at_inf].sum())
        lam, w = lam[~at_inf], w[~at_inf]
        lam, w = _merge_atoms(lam, w, eps)
        total = w.sum() + inf_mass
        if abs(total - 1.0) > _NORM_SLOP:
            raise ValueError(f"atom weights sum to {total!r}, not 1")
        if total != 1.0 and total > 0:
            w = w / total
            inf_mass /= total
        return SymmetricDist(lam, w, inf_mass)

    @staticmethod
    def delta0() -> "SymmetricDist":
        """The trivial law: point mass at LLR 0 (zero-capacity channel)."""
        return SymmetricDist(np.array([0.0]), np.array([1.0]), 0.0)

    @staticmethod
    def perfect() -> "SymmetricDist":
        """Point mass at LLR +infinity (noiseless channel)."""
        return SymmetricDist(np.zeros(0), np.zeros(0), 1.0)

    @staticmethod
    def mixture(dists: Sequence["SymmetricDist"], weights: Sequence[float]) -> "SymmetricDist":
        """Convex mixture; beta-curves mix linearly."""
        weights = np.asarray(weights, dtype=float)
        if weights.size != len(dists) or np.any(weights < 0):
            raise ValueError("weights must be non-negative, one per distribution")
        if abs(weights.sum() - 1.0) > _NORM_SLOP:
            raise ValueError("mixture weights must sum to 1")
        lam = np.concatenate([d.lam for d in dists]) if dists else np.zeros(0)
        w = np.concatenate([p * d.w for p, d in zip(weights, dists)]) if dists else np.zeros(0)
        inf = float(sum(p * d.inf_mass for p, d in zip(weights, dists)))
        return SymmetricDist.from_atoms(lam, w, inf)

    # ---------------------------------------------------------------- basic queries

    @property
    def n_atoms(self) -> int:
        return int(self.lam.size)

    @property
    def is_trivial(self) -> bool:
        """True iff this is the point mass at 0."""
        return self.inf_mass == 0.0 and (self.lam.size == 0 or float(self.lam[-1]) == 0.0)

    @property
    def t_max(self) -> float:
        """Largest support point of tanh(|R|/2) (1.0 when mass sits at infinity)."""
        if self.inf_mass > 0.0:
            return 1.0
        return float(self.lam[-1]) if self.lam.size else 0.0

    @property
    def r_max(self) -> float:
        """Essential supremum of |R| (may be +inf)."""
        t = self.t_max
        return math.inf if t >= 1.0 else 2.0 * math.atanh(t)

    @cached_property
    def _cum(self):
        # suffix sums for O(log n) beta evaluation
        cw = np.concatenate([[0.0], np.cumsum(self.w)])
        cwl = np.concatenate([[0.0], np.cumsum(self.w * self.lam)])
        return cw, cwl

    def beta(self, t):
        """beta(t) = E[max(tanh(|R|/2), |t|)], valid for any real t."""
        t = np.abs(np.asarray(t, dtype=float))
        cw, cwl = self._cum
        idx = np.searchsorted(self.lam, t, side="right")
        below = cw[idx]  # total weight with lambda <= t
        above = cwl[-1] - cwl[idx]  # sum of w*lambda over lambda > t
        out = t * below + above + self.inf_mass * np.maximum(t, 1.0)
        return out if out.ndim else float(out)

    @property
    def beta0(self) -> float:
        """beta(0) = E[tanh(|R|/2)]."""
        return float(np.dot(self.w, self.lam) + self.inf_mass)

    def signed(self):
        """Signed atom cloud (slam, weight) with slam = tanh(r/2) in (-1, 1].

        Mass at +infinity appears as slam = 1; symmetric laws carry no mass
        at -infinity.
        """
        pos = self.lam > 0.0
        lp, wp = self.lam[pos], self.w[pos]
        slam = [self.lam[~pos], lp, -lp]
        sw = [self.w[~pos], wp * (1.0 + lp) / 2.0, wp * (1.0 - lp) / 2.0]
        if self.inf_mass > 0.0:
            slam.append(np.array([1.0]))
            sw.append(np.array([self.inf_mass]))
        return np.concatenate(slam), np.concatenate(sw)

    def mean_r(self) -> float:
        """E[R] under the signed law (+inf if mass sits at infinity)."""
        if self.inf_mass > 0.0:
            return math.inf
        r = lam_to_llr(self.lam)
        return float(np.dot(self.w * self.lam, r))

    def var_r(self) -> float:
        """Var(R) under the signed law (+inf if mass sits at infinity)."""
        if self.inf_mass > 0.0:
            return math.inf
        r = lam_to_llr(self.lam)
        m2 = float(np.dot(self.w, r * r))
        m = float(np.dot(self.w * self.lam, r))
        return m2 - m * m

    def expect_even(self, fn) -> float:
        """E[f(R)] for an even function given as f(lambda); f(1) must be finite."""
        out = float(np.dot(self.w, fn(self.lam)))
        if self.inf_mass > 0.0:
            out += self.inf_mass * float(fn(1.0))
        return out

    # ---------------------------------------------------------------- comparison

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetricDist):
            return NotImplemented
        return (
            self.inf_mass == other.inf_mass
            and self.lam.shape == other.lam.shape
            and bool(np.array_equal(self.lam, other.lam))
            and bool(np.array_equal(self.w, other.w))
        )

    def close_to(self, other: "SymmetricDist", tol: float = 1e-12) -> bool:
        """Atomwise comparison of canonical forms within an absolute tolerance."""
        if self.lam.shape != other.lam.shape:
            return False
        return (
            abs(self.inf_mass - other.inf_mass) <= tol
            and bool(np.all(np.abs(self.lam - other.lam) <= tol))
            and bool(np.all(np.abs(self.w - other.w) <= tol))
        )

    # ---------------------------------------------------------------- serialization

    def to_json(self) -> dict:
        return {
            "atoms": [[float(l), float(v)] for l, v in zip(self.lam, self.w)],
            "inf_mass": float(self.inf_mass),
        }

    @staticmethod
    def from_json(obj: dict) -> "SymmetricDist":
        atoms = obj.get("atoms", [])
        lam = np.array([a[0] for a in atoms], dtype=float)
        w = np.array([a[1] for a in atoms], dtype=float)
        return SymmetricDist.from_atoms(lam, w, float(obj.get("inf_mass", 0.0)))

    def __repr__(self) -> str:  # pragma: no cover
        if self.is_trivial:
            return "SymmetricDist(delta0)"
        return f"SymmetricDist({self.n_atoms} atoms, inf_mass={self.inf_mass:.3g}, beta0={self.beta0:.6g})"


def bsc(phi: float) -> SymmetricDist:
    """The BSC LLR law: a single atom at lambda = |1 - 2 phi|.

    phi = 0 is the noiseless channel (all mass at +inf), phi = 1/2 the
    trivial one.  phi and 1 - phi give the same symmetric law.
    """
    if not 0.0 <= phi <= 1.0:
        raise ValueError("crossover probability must lie in [0, 1]")
    lam = abs(1.0 - 2.0 * phi)
    if lam >= 1.0:
        return SymmetricDist.perfect()
    return SymmetricDist(np.array([lam]), np.array([1.0]), 0.0)


def canonicalize(signed_atoms: Iterable[tuple[float, float]], *, tol_sym: float = TOL_SYM) -> SymmetricDist:
    """Fold a signed symmetric atom cloud into the canonical lambda form.

    Pairs +/-r atoms, checks the signed split against the symmetric ratio
    (mass at +r must be total * (1 + lambda)/2 within ``tol_sym``) and
    raises :class:`SymmetryViolation` otherwise.  r >= R_CAP counts as
    +infinity; mass at r <= -R_CAP (or -inf) is a violation unless it is
    below tolerance.
    """
    pairs = list(signed_atoms)
    r = np.array([p[0] for p in pairs], dtype=float)
    w = np.array([p[1] for p in pairs], dtype=float)
    if np.any(w < 0):
        raise ValueError("negative weight")
    total_in = w.sum()
    if abs(total_in - 1.0) > _NORM_SLOP:
        raise ValueError(f"signed weights sum to {total_in!r}, not 1")
    w = w / total_in
    neg_inf = r <= -R_CAP
    if float(w[neg_inf].sum()) > tol_sym:
        raise SymmetryViolation("symmetric laws carry no mass at -infinity")
    r, w = r[~neg_inf], w[~neg_inf]
    slam = np.where(r >= R_CAP, 1.0, np.tanh(r / 2.0))

    mag = np.abs(slam)
    order = np.argsort(mag, kind="stable")
    mag, sl, wv = mag[order], slam[order], w[order]
    starts = _group_close(mag, MERGE_EPS)
    ends = np.append(starts[1:], mag.size)
    out_lam, out_w = [], []
    inf_mass = 0.0
    for a, b in zip(starts, ends):
        wt = float(wv[a:b].sum())
        if wt <= 0.0:
            continue
        lam_g = float(np.dot(mag[a:b], wv[a:b]) / wt)
        if lam_g >= 1.0:
            inf_mass += wt
            continue
        if lam_g > 0.0:
            w_plus = float(wv[a:b][sl[a:b] > 0].sum())
            expected = wt * (1.0 + lam_g) / 2.0
            if abs(w_plus - expected) > tol_sym:
                raise SymmetryViolation(
                    f"mass split at lambda={lam_g:.6g} is {w_plus:.6g} of {wt:.6g}; "
                    f"the symmetric ratio requires {expected:.6g}"
                )
        out_lam.append(lam_g)
        out_w.append(wt)
    return SymmetricDist.from_atoms(np.array(out_lam), np.array(out_w), inf_mass)


# -------------------------------------------------------------------- beta curves


@dataclass(frozen=True)
class BetaCurve:
    """Piecewise-linear convex beta-curve with explicit corner list.

    Corners sit exactly at the atom lambdas of the generating distribution
    (the curve is linear between support points) plus the endpoints 0 and 1.
    ``t_max`` is the smallest t with beta(t) = t and ``r_max`` its LLR image
    2*atanh(t_max), +inf when mass sits at infinity.
    """

    corners_t: np.ndarray
    corners_beta: np.ndarray
    t_max: float
    r_max: float

    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        inside = np.interp(np.minimum(t, 1.0), self.corners_t, self.corners_beta)
        out = np.where(t >= 1.0, t, inside)
        return out if out.ndim else float(out)

    def __len__(self) -> int:
        return int(self.corners_t.size)


def beta_curve(mu: SymmetricDist) -> BetaCurve:
    """Exact beta-curve of a canonical distribution."""
    ts = np.unique(np.concatenate([[0.0, 1.0], mu.lam[mu.lam > 0.0]]))
    return BetaCurve(ts, mu.beta(ts), mu.t_max, mu.r_max)


def bayes_error(mu: SymmetricDist, t: float) -> float:
    """Minimum error probability for prior Ber((1-t)/2): (1 - beta(t)) / 2."""
    if not -1.0 <= t <= 1.0:
        raise ValueError("prior bias t must lie in [-1, 1]")
    return (1.0 - mu.beta(t)) / 2.0


# -------------------------------------------------------------------- degradation


@dataclass(frozen=True)
class DegradationVerdict:
    """Outcome of a beta-curve domination test.

    ``degraded`` reports beta(t; nu) <= beta(t; mu) + tol everywhere.
    ``strict_above`` is the smallest s >= 0 such that the inequality is
    strict (beyond tol) for every t in (tanh(s/2), t_max(nu)], or None
    when no such s exists.  ``strict_at_zero`` additionally reports
    strictness at t = 0, so strict_above == 0.0 together with
    strict_at_zero means the strict gap covers all of [0, t_max(nu)].
    """

    degraded: bool
    strict_above: float | None
    strict_at_zero: bool


def _corner_grid(nu: SymmetricDist, mu: SymmetricDist) -> np.ndarray:
    ts = np.concatenate([[0.0, 1.0], nu.lam, mu.lam, [nu.t_max, mu.t_max]])
    return np.unique(np.clip(ts, 0.0, 1.0))


def is_degraded(nu: SymmetricDist, mu: SymmetricDist, tol: float = DEG_TOL) -> DegradationVerdict:
    """Test whether nu is a degraded version of mu (noisier channel).

    Both beta-curves are piecewise linear with corners at their atom
    positions, so comparing the union of corners plus the endpoints is
    exact.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    ts = _corner_grid(nu, mu)
    gap = mu.beta(ts) - nu.beta(ts)
    degraded = bool(np.all(gap >= -tol))
    strict_at_zero = bool(gap[0] > tol)

    T = nu.t_max
    if T <= 0.0:
        return DegradationVerdict(degraded, None, strict_at_zero)
    keep = ts <= T
    tsr, gapr = ts[keep], gap[keep]
    if tsr[-1] < T:  # ensure the right endpoint is present
        tsr = np.append(tsr, T)
        gapr = np.append(gapr, float(mu.beta(T) - nu.beta(T)))

    ok = gapr > tol
    if not ok[-1]:
        return DegradationVerdict(degraded, None, strict_at_zero)
    if bool(np.all(ok)):
        return DegradationVerdict(degraded, 0.0, strict_at_zero)
    k = int(np.max(np.flatnonzero(~ok)))  # rightmost failing corner
    t0, t1 = tsr[k], tsr[k + 1]
    g0, g1 = gapr[k], gapr[k + 1]
    tau = t0 if g1 == g0 else t0 + (t1 - t0) * (tol - g0) / (g1 - g0)
    tau = min(max(tau, 0.0), 1.0 - 1e-15)
    return DegradationVerdict(degraded, 2.0 * math.atanh(tau), strict_at_zero)


def _scaled_by_bsc(mu: SymmetricDist, c: float) -> SymmetricDist:
    """The law of a BSC(phi) prepended to mu, c = 1 - 2*phi: lambdas scale by c."""
    if c <= 0.0:
        return SymmetricDist.delta0()
    lam = mu.lam * c
    w = mu.w
    inf = 0.0
    if mu.inf_mass > 0.0:
        if c >= 1.0:
            inf = mu.inf_mass
        else:
            lam = np.append(lam, c)
            w = np.append(w, mu.inf_mass)
    return SymmetricDist.from_atoms(lam, w, inf)


def degradation_index(
    mu: SymmetricDist, nu: SymmetricDist, tol_phi: float | None = None
) -> float:
    """Smallest phi such that BSC(phi) prepended to mu is degraded w.r.t. nu.

    Bisects the monotone predicate c * beta(t/c; mu) <= beta(t; nu) with
    c = 1 - 2*phi.  Runs 60 fixed iterations (width below 1e-18) unless a
    coarser ``tol_phi`` is requested; returns the bracket midpoint.
    Returns 0.5 for trivial nu.
    """
    if nu.is_trivial:
        return 0.5
    pred_tol = 1e-14

    def degraded_at(c: float) -> bool:
        return is_degraded(_scaled_by_bsc(mu, c), nu, pred_tol).degraded

    if degraded_at(1.0):
        return 0.0
    iters = _INDEX_ITERS
    if tol_phi is not None:
        if tol_phi <= 0:
            raise ValueError("tol_phi must be positive")
        iters = min(_INDEX_ITERS, max(1, math.ceil(math.log2(0.5 / tol_phi))))
    lo, hi = 0.0, 0.5  # degraded_at(1 - 2*0.5) = degraded_at(0) is always true
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if degraded_at(1.0 - 2.0 * mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def degradation_metric(mu: SymmetricDist, nu: SymmetricDist) -> float:
    """Degradation distance |ln(1-2 phi*(mu,nu)) + ln(1-2 phi*(nu,mu))|.

    Defined for non-trivial inputs only; zero iff the two laws coincide.
    """
    if mu.is_trivial or nu.is_trivial:
        raise TrivialDistribution("the degradation metric requires non-trivial inputs")
    a = degradation_index(mu, nu)
    b = degradation_index(nu, mu)
    return abs(math.log1p(-2.0 * a) + math.log1p(-2.0 * b))


# -------------------------------------------------------------------- asymmetric laws


@dataclass(frozen=True, eq=False)
class AsymmetricLlr:
    """Signed-atom LLR law without the symmetry constraint.

    Atoms are stored as slam = tanh(r/2) in [-1, 1]; slam = -1 and 1 encode
    r = -inf and +inf.  A proper LLR law satisfies the integral constraint
    E[e^{-R}] <= 1 (mass at -inf forbidden); complements of LLR laws can
    carry mass at -inf and are representable here too.
    """

    slam: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        slam = np.ascontiguousarray(self.slam, dtype=float)
        w = np.ascontiguousarray(self.w, dtype=float)
        if slam.ndim != 1 or slam.shape != w.shape:
            raise ValueError("slam and w must be 1-d arrays of equal length")
        if slam.size and (slam[0] < -1.0 or slam[-1] > 1.0):
            raise ValueError("signed lambda values must lie in [-1, 1]")
        if np.any(np.diff(slam) <= 0):
            raise ValueError("signed lambda values must be strictly increasing")
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be strictly positive and finite")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        slam.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "slam", slam)
        object.__setattr__(self, "w", w)

    @staticmethod
    def from_slam(slam, w, *, eps: float = MERGE_EPS) -> "AsymmetricLlr":
        slam = np.asarray(slam, dtype=float).ravel()
        w = np.asarray(w, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("negative weight")
        keep = w > 0.0
        slam, w = np.clip(slam[keep], -1.0, 1.0), w[keep]
        slam, w = _merge_atoms(slam, w, eps)
        total = w.sum()
        if abs(total - 1.0) > _NORM_SLOP:
            raise ValueError(f"weights sum to {total!r}, not 1")
        return AsymmetricLlr(slam, w / total)

    @staticmethod
    def from_signed_atoms(atoms: Iterable[tuple[float, float]]) -> "AsymmetricLlr":
        """Build from (r, weight) pairs; |r| >= R_CAP maps to +/-infinity."""
        pairs = list(atoms)
        r = np.array([p[0] for p in pairs], dtype=float)
        w = np.array([p[1] for p in pairs], dtype=float)
        slam = np.sign(r) * llr_to_lam(np.abs(r))
        return AsymmetricLlr.from_slam(slam, w)

    @staticmethod
    def from_symmetric(mu: SymmetricDist) -> "AsymmetricLlr":
        slam, w = mu.signed()
        return AsymmetricLlr.from_slam(slam, w)

    @property
    def n_atoms(self) -> int:
        return int(self.slam.size)

    @property
    def is_trivial(self) -> bool:
        return self.slam.size == 1 and float(self.slam[0]) == 0.0

    def llr_integral(self) -> float:
        """E[e^{-R}] over finite atoms; +inf when mass sits at -infinity."""
        if self.slam.size and self.slam[0] <= -1.0:
            return math.inf
        return float(np.dot(self.w, (1.0 - self.slam) / (1.0 + self.slam)))

    @property
    def is_llr(self) -> bool:
        return self.llr_integral() <= 1.0 + 1e-12

    def complement(self) -> "AsymmetricLlr":
        """The law of the same LLR statistic under the flipped input.

        Each finite atom at r keeps its position with weight w * e^{-r};
        the residual mass lands at r = -infinity.  Unique when it exists.
        """
        integral = self.llr_integral()
        if not integral <= 1.0 + 1e-12:
            raise NotAnLlrDistribution(
                f"E[e^-R] = {integral:.6g} > 1; no complement exists"
            )
        finite = self.slam < 1.0
        slam = self.slam[finite]
        wc = self.w[finite] * (1.0 - slam) / (1.0 + slam)
        residual = max(0.0, 1.0 - float(wc.sum()))
        if residual > 0.0:
            slam = np.append(slam, -1.0)
            wc = np.append(wc, residual)
        return AsymmetricLlr.from_slam(slam, wc)

    def beta(self, t):
        """Asymmetric beta-curve E[|tanh(R/2) - t|] under the half mixture
        of the law and its complement; coincides with the symmetric curve
        at |t| for symmetric inputs."""
        comp = self.complement()
        t = np.asarray(t, dtype=float)
        mine = np.abs(self.slam[:, None] - t[None, :]) if t.ndim else np.abs(self.slam - t)
        theirs = np.abs(comp.slam[:, None] - t[None, :]) if t.ndim else np.abs(comp.slam - t)
        out = 0.5 * (self.w @ mine + comp.w @ theirs)
        return out if t.ndim else float(out)

    def to_symmetric(self, *, tol_sym: float = TOL_SYM) -> SymmetricDist:
        """Canonicalize, verifying the symmetric mass-ratio condition."""
        r = np.where(np.abs(self.slam) >= 1.0, np.sign(self.slam) * math.inf, 2.0 * np.arctanh(self.slam))
        return canonicalize(zip(r.tolist(), self.w.tolist()), tol_sym=tol_sym)

    def to_json(self) -> dict:
        out = []
        for s, v in zip(self.slam, self.w):
            if s >= 1.0:
                out.append(["inf", float(v)])
            elif s <= -1.0:
                out.append(["-inf", float(v)])
            else:
                out.append([float(2.0 * math.atanh(s)), float(v)])
        return {"signed_atoms": out}

    @staticmethod
    def from_json(obj: dict) -> "AsymmetricLlr":
        atoms = []
        for r, v in obj["signed_atoms"]:
            if isinstance(r, str):
                r = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf}[r.strip().lower()]
            atoms.append((float(r), float(v)))
        return AsymmetricLlr.from_signed_atoms(atoms)

    def __repr__(self) -> str:  # pragma: no cover
        return f"AsymmetricLlr({self.n_atoms} atoms, E[e^-R]={self.llr_integral():.4g})"


def complement(mu: AsymmetricLlr) -> AsymmetricLlr:
    """Module-level alias for :meth:`AsymmetricLlr.complement`."""
    return mu.complement()


def beta_asym(mu: AsymmetricLlr, t) -> float:
    """Module-level alias for :meth:`AsymmetricLlr.beta`."""
    return mu.beta(t)


def dist_to_json(d) -> dict:
    """Serialize either distribution flavor to its JSON object."""
    return d.to_json()


def dist_from_json(obj: dict):
    """Parse the shared JSON distribution format (symmetric or signed)."""
    if "signed_atoms" in obj:
        return AsymmetricLlr.from_json(obj)
    return SymmetricDist.from_json(obj)
