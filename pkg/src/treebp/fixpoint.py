"""Fixed-point iteration of the BP step with convergence and rigor accounting.

Convergence is declared on the L-infinity distance between consecutive
beta-curves, which for symmetric laws is uniform convergence of the
curves and hence equivalent to weak convergence.  The degradation metric
is reported as a per-step diagnostic only: its topology is strictly
finer and can converge much later than the curves themselves.

When bracket tracking is on, every iterate carries a rigorous pipe
[lower, upper] built by rounding all convolutions down/up on the lambda
grid; the reported slack is the beta-curve width of that pipe, and no
strictness claim in this module exceeds it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ExceptionalCase, TrivialDistribution
from .ops import BpParams, DegreeDistribution, bp_apply
from .symdist import DEG_TOL, SymmetricDist, degradation_metric, is_degraded

Operator = Callable[[SymmetricDist, str | None], SymmetricDist]


@dataclass(frozen=True)
class StopRule:
    """Halting policy for the iteration."""

    max_steps: int = 2000
    linf_tol: float = 1e-8
    metric_tol: float | None = None

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.linf_tol <= 0 or (self.metric_tol is not None and self.metric_tol <= 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class TraceStep:
    step: int
    beta0: float
    t_max: float
    linf_gap: float
    metric_step: float
    slack: float


@dataclass
class IterationTrace:
    """Per-step convergence record; rows() matches the trace CSV columns."""

    steps: list[TraceStep] = field(default_factory=list)

    COLUMNS = ("step", "beta0", "t_max", "linf_gap", "metric_step", "slack")

    def append(self, rec: TraceStep) -> None:
        self.steps.append(rec)

    def rows(self) -> list[tuple]:
        return [
            (s.step, s.beta0, s.t_max, s.linf_gap, s.metric_step, s.slack)
            for s in self.steps
        ]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final_slack(self) -> float:
        return self.steps[-1].slack if self.steps else float("nan")


@dataclass(frozen=True)
class IterateResult:
    trace: IterationTrace
    final: SymmetricDist
    converged: bool


@dataclass(frozen=True)
class TwoSidedResult:
    """Traces of the noiseless-leaf and no-leaf chains and their gap."""

    upper: IterationTrace
    lower: IterationTrace
    gaps: np.ndarray
    final_gap: float
    upper_monotone: bool
    lower_monotone: bool
    upper_final: SymmetricDist
    lower_final: SymmetricDist


@dataclass(frozen=True)
class KsReport:
    product: float
    above: bool


@dataclass(frozen=True)
class ContractionReport:
    d_before: float
    d_after: float
    decreased: bool
    slack: float


def linf_beta_gap(a: SymmetricDist, b: SymmetricDist) -> float:
    """max_t |beta(t; a) - beta(t; b)|, exact via the corner union."""
    ts = np.unique(np.concatenate([[0.0, 1.0], a.lam, b.lam, [a.t_max, b.t_max]]))
    ts = np.clip(ts, 0.0, 1.0)
    return float(np.max(np.abs(a.beta(ts) - b.beta(ts))))


def bp_operator(
    params: BpParams,
    *,
    grid_size: int = 4096,
    atom_limit: int | None = None,
    collapse: bool = True,
) -> Operator:
    """Close a BpParams over the grid so iteration only chooses rounding.

    With ``collapse`` (and no survey), a result whose whole support fits
    inside the bottom grid cell snaps to the exact trivial law: below one
    cell the grid cannot represent the law anyway, and without the snap a
    dying iteration shrinks geometrically forever.  Collapsing is a
    degradation, so it is skipped for the "up" rounding whose outputs
    must stay rigorous upper transports.
    """
    kwargs = {} if atom_limit is None else {"atom_limit": atom_limit}

    def op(mu: SymmetricDist, rounding: str | None) -> SymmetricDist:
        out = bp_apply(params, mu, grid_size=grid_size, rounding=rounding, **kwargs)
        if (
            collapse
            and params.no_survey
            and rounding is not None
            and rounding != "up"
            and out.inf_mass == 0.0
            and out.t_max * grid_size <= 1.0 + 1e-9
        ):
            return SymmetricDist.delta0()
        return out

    return op


def _check_exceptional(params_or_op) -> Operator:
    if isinstance(params_or_op, BpParams):
        if params_or_op.is_exceptional:
            raise ExceptionalCase(
                "degree 1 a.s. with delta in {0, 1} and no survey: the BP step is "
                "the identity map and the iteration cannot converge to anything new"
            )
        return bp_operator(params_or_op)
    return params_or_op


def _bracket_slack(lo: SymmetricDist, up: SymmetricDist) -> float:
    ts = np.unique(np.concatenate([[0.0, 1.0], lo.lam, up.lam]))
    return float(np.max(np.maximum(up.beta(ts) - lo.beta(ts), 0.0)))


# Stop early once the successive gap has stalled this many steps without
# improving; quantization floors otherwise burn the full step budget.
_STALL_WINDOW = 60


def iterate(
    params: BpParams | Operator,
    mu0: SymmetricDist,
    stop: StopRule = StopRule(),
    *,
    rounding: str | None = "split",
    track_brackets: bool = True,
    track_metric: bool = True,
) -> IterateResult:
    """Iterate the BP step from mu0 until the beta-curves stop moving.

    Halts when the consecutive-curve gap falls below ``stop.linf_tol``
    (plus ``stop.metric_tol`` on the metric diagnostic when set), the gap
    stalls at the quantization floor, or ``stop.max_steps`` is reached.
    ``converged`` in the result reports whether one more application moves
    the final iterate by less than linf_tol.

    A BpParams first argument uses :func:`bp_operator` at its default
    grid; pass an operator closure to control the grid or iterate other
    one-step maps.  Raises :class:`ExceptionalCase` for the identity-map
    parameter combination.
    """
    op = _check_exceptional(params)
    cur = mu0
    lo = up = mu0
    trace = IterationTrace()
    best_gap = math.inf
    since_best = 0
    converged = False
    for h in range(1, stop.max_steps + 1):
        new = op(cur, rounding)
        gap = linf_beta_gap(new, cur)
        slack = float("nan")
        if track_brackets:
            lo = op(lo, "down")
            up = op(up, "up")
            slack = _bracket_slack(lo, up)
        metric_step = float("nan")
        if track_metric and not new.is_trivial and not cur.is_trivial:
            metric_step = degradation_metric(new, cur)
        trace.append(TraceStep(h, new.beta0, new.t_max, gap, metric_step, slack))
        cur = new
        metric_ok = (
            stop.metric_tol is None
            or (not math.isnan(metric_step) and metric_step < stop.metric_tol)
            or cur.is_trivial
        )
        if gap < stop.linf_tol and metric_ok:
            converged = True
            break
        if gap < best_gap * 0.999:
            best_gap = gap
            since_best = 0
        else:
            since_best += 1
            if since_best >= _STALL_WINDOW:
                break  # stalled at the quantization floor
    return IterateResult(trace, cur, converged)


def two_sided_bracket(
    params: BpParams | Operator,
    stop: StopRule = StopRule(),
    *,
    rounding: str | None = "split",
    monotone_tol: float | None = None,
    grid_size_hint: int = 4096,
) -> TwoSidedResult:
    """Run the chains started from perfect leaves and from no leaves.

    The upper chain (start: all mass at +inf) decreases in degradation,
    the lower chain (start: point mass at 0) increases once a survey is
    present; their terminal beta-curve gap going to zero certifies that
    leaf data is irrelevant in the limit.  Monotonicity is checked per
    step within ``monotone_tol`` (default: one grid step plus the base
    beta tolerance, the quantization slack of a single rounding).
    """
    op = _check_exceptional(params)
    if monotone_tol is None:
        monotone_tol = 1.0 / grid_size_hint + DEG_TOL
    upper = SymmetricDist.perfect()
    lower = SymmetricDist.delta0()
    up_trace = IterationTrace()
    lo_trace = IterationTrace()
    gaps: list[float] = []
    up_mono = lo_mono = True
    for h in range(1, stop.max_steps + 1):
        new_up = op(upper, rounding)
        new_lo = op(lower, rounding)
        up_mono &= is_degraded(new_up, upper, monotone_tol).degraded
        lo_mono &= is_degraded(lower, new_lo, monotone_tol).degraded
        gap = linf_beta_gap(new_up, new_lo)
        up_trace.append(
            TraceStep(h, new_up.beta0, new_up.t_max, linf_beta_gap(new_up, upper), float("nan"), gap)
        )
        lo_trace.append(
            TraceStep(h, new_lo.beta0, new_lo.t_max, linf_beta_gap(new_lo, lower), float("nan"), gap)
        )
        gaps.append(gap)
        upper, lower = new_up, new_lo
        if gap < stop.linf_tol:
            break
    return TwoSidedResult(
        up_trace, lo_trace, np.array(gaps), gaps[-1], up_mono, lo_mono, upper, lower
    )


def ks_threshold(degree: DegreeDistribution, delta: float) -> KsReport:
    """The mean-degree recoverability product (1 - 2 delta)^2 E[d].

    Exact for fixed and Poisson degrees; for a general pmf the mean is a
    stand-in for the branching number and the verdict is approximate.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    product = (1.0 - 2.0 * delta) ** 2 * degree.mean()
    return KsReport(product, product > 1.0)


def contraction_check(
    params: BpParams | Operator,
    mu: SymmetricDist,
    nu: SymmetricDist,
    k: int = 1,
    *,
    rounding: str | None = None,
    slack: float | None = None,
) -> ContractionReport:
    """Degradation-metric distance before and after k BP steps.

    With exact arithmetic (the default) the only slack is the metric's own
    bisection resolution; with grid rounding the per-step transport error
    is added.  ``decreased`` is asserted only beyond the total slack.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if mu.is_trivial or nu.is_trivial:
        raise TrivialDistribution("contraction is defined for non-trivial inputs")
    op = _check_exceptional(params)
    if slack is None:
        slack = 1e-12 if rounding is None else 4.0 * k / 4096
    a, b = mu, nu
    d_before = 0.0 if mu == nu else degradation_metric(mu, nu)
    for _ in range(k):
        a = op(a, rounding)
        b = op(b, rounding)
    d_after = 0.0 if a == b else degradation_metric(a, b)
    return ContractionReport(d_before, d_after, d_after < d_before - slack, slack)


@dataclass(frozen=True)
class ScanPoint:
    delta: float
    ks_product: float
    beta0: float
    steps: int
    converged: bool


def scan_delta(
    degree: DegreeDistribution,
    deltas: Iterable[float],
    survey: SymmetricDist | None = None,
    *,
    grid_size: int = 1024,
    stop: StopRule = StopRule(max_steps=2000, linf_tol=1e-9),
    rounding: str | None = "split",
) -> list[ScanPoint]:
    """Limit beta(0) along a crossover sweep, warm-starting each point
    from the previous limit (valid for an ascending sweep: limits shrink
    as the edge gets noisier, and the iteration is monotone-stable)."""
    survey = survey if survey is not None else SymmetricDist.delta0()
    rows: list[ScanPoint] = []
    warm = SymmetricDist.perfect()
    for delta in deltas:
        params = BpParams(degree, float(delta), survey)
        init = warm if not warm.is_trivial else SymmetricDist.perfect()
        if params.is_exceptional:  # identity map: the sweep records the start point
            rows.append(ScanPoint(float(delta), ks_threshold(degree, delta).product, init.beta0, 0, True))
            continue
        res = iterate(
            bp_operator(params, grid_size=grid_size),
            init,
            stop,
            rounding=rounding,
            track_brackets=False,
            track_metric=False,
        )
        warm = res.final
        rows.append(
            ScanPoint(
                float(delta),
                ks_threshold(degree, delta).product,
                res.final.beta0,
                len(res.trace),
                res.converged,
            )
        )
    return rows


def find_transition(rows: Sequence[ScanPoint], floor: float = 1e-4) -> float | None:
    """Crossover estimate: midpoint between the last scan point with
    beta(0) above ``floor`` and the first one below it."""
    above = [r.delta for r in rows if r.beta0 > floor]
    below = [r.delta for r in rows if r.beta0 <= floor]
    if not above or not below:
        return None
    hi = max(above)
    lo = min(d for d in below if d > hi) if any(d > hi for d in below) else None
    if lo is None:
        return None
    return 0.5 * (hi + lo)
