"""
Observables of the front.

The process seen from its tip, ``alpha_t``, is a positive recurrent chain.
The speed of the tip is the ergodic average of the drift functional ``f``,
and ``M_t = X_t - int_0^t f(alpha_s) ds`` is a martingale with jumps bounded
by ``R`` and predictable quadratic variation ``int_0^t g(alpha_s) ds``. This
module evaluates ``f`` and ``g``, and builds the estimators used to check
those statements on simulated trajectories.

Every estimator takes a ``side``: ``"left"`` studies the leftmost particle
``Y_t`` as the tip of the mirrored process, ``-Y_t``.
"""
import bisect
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress

from birthfront.exceptions import MissingObservableError, ProgrammingError
from birthfront.lattice import (
    Configuration,
    SeenFromTip,
    embed,
    is_origin_proxy,
    mirror,
    seen_from_tip,
)
from birthfront.lib import mean_and_error, write_csv
from birthfront.models.base import RateModel
from birthfront.simulator import Checkpoint, Trajectory
from birthfront.typing import Side, Site

_logger = logging.getLogger(__name__)

MIN_FLUCTUATION_REPLICAS = 100

DEFAULT_Q_GRID = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


@dataclass(frozen=True)
class TipFunctionals:

    """
    The drift and variance functionals at a state seen from the tip.
    """

    f_value: float
    g_value: float
    gamma: SeenFromTip


def _weighted_rates(gamma: SeenFromTip, model: RateModel, power: int) -> float:
    config = embed(gamma)
    return math.fsum(
        k**power * model.rate(k, config) for k in range(1, model.range_ + 1)
    )


def f_functional(gamma: SeenFromTip, model: RateModel) -> float:
    """
    Return ``f(gamma) = sum_{k=1}^{R} k b(k, eta^gamma)``.

    ``eta^gamma`` is ``gamma`` placed with its tip at the origin (see
    ``birthfront.lattice.embed``), so this is the rate at which the tip is
    expected to move.
    """
    return _weighted_rates(gamma, model, 1)


def g_functional(gamma: SeenFromTip, model: RateModel) -> float:
    """
    Return ``g(gamma) = sum_{k=1}^{R} k^2 b(k, eta^gamma)``.
    """
    return _weighted_rates(gamma, model, 2)


def tip_functionals(gamma: SeenFromTip, model: RateModel) -> TipFunctionals:
    """
    Evaluate both functionals.
    """
    return TipFunctionals(f_functional(gamma, model), g_functional(gamma, model), gamma)


def left_functionals(config: Configuration, model: RateModel) -> TipFunctionals:
    """
    Evaluate the functionals of the leftmost particle.

    The lattice is mirrored so that the leftmost particle becomes the tip,
    and the mirrored model is used.
    """
    gamma = seen_from_tip(mirror(config), model.range_)
    return tip_functionals(gamma, model.mirrored())


def _drift_integral(checkpoint: Checkpoint, side: Side) -> float:
    value = checkpoint.drift_integral(side)
    if value is None:
        raise MissingObservableError(
            f"The checkpoint at t={checkpoint.time} has no drift integral",
        )
    return value


def martingale_residual(
    trajectory: Trajectory,
    side: Side = "right",
) -> List[Tuple[float, float]]:
    """
    Return ``(t, M_t)`` at every checkpoint, with ``M_t = X_t - int_0^t f``.
    """
    return [
        (
            checkpoint.time,
            checkpoint.position(side) - _drift_integral(checkpoint, side),
        )
        for checkpoint in trajectory.checkpoints
    ]


def _event_position(trajectory: Trajectory, index: int, side: Side) -> Site:
    event = trajectory.events[index]
    return event.tip if side == "right" else -event.leftmost


def _initial_position(trajectory: Trajectory, side: Side) -> Site:
    first, last = trajectory.initial.bounds
    return last if side == "right" else -first


def martingale_jumps(trajectory: Trajectory, side: Side = "right") -> List[int]:
    """
    Return the jump of ``M`` at every event.

    The integral part is continuous, so these are the jumps of the tip.
    """
    positions = [_initial_position(trajectory, side)] + [
        _event_position(trajectory, index, side)
        for index in range(len(trajectory.events))
    ]
    return [later - earlier for earlier, later in zip(positions, positions[1:])]


def quadratic_variation(
    trajectory: Trajectory,
    side: Side = "right",
) -> List[Tuple[float, float, float]]:
    """
    Return ``(t, [M]_t, <M>_t)`` at every checkpoint.

    ``[M]_t`` is the sum of the squared jumps of the tip up to ``t`` and
    ``<M>_t = int_0^t g``.
    """
    jumps = martingale_jumps(trajectory, side)
    times = [event.time for event in trajectory.events]
    cumulative = np.concatenate([[0.0], np.cumsum(np.square(jumps, dtype=float))])

    rows = []
    for checkpoint in trajectory.checkpoints:
        predictable = checkpoint.variance_integral(side)
        if predictable is None:
            raise MissingObservableError(
                f"The checkpoint at t={checkpoint.time} has no variance integral",
            )
        count = bisect.bisect_right(times, checkpoint.time)
        rows.append((checkpoint.time, float(cumulative[count]), predictable))
    return rows


@dataclass(frozen=True)
class SpeedEstimate:

    """
    Average speed of the front between two times over a batch of runs.
    """

    lambda_hat: float
    t1: float
    t2: float
    n_replicas: int
    std_error: float
    side: Side = "right"


def run_speeds(
    trajectories: Sequence[Trajectory],
    t1: float,
    t2: float,
    side: Side = "right",
) -> List[float]:
    """
    Per-run speeds ``(X_t2 - X_t1) / (t2 - t1)``.
    """
    if not t1 < t2:
        raise ProgrammingError(f"Need t1 < t2, got {t1} and {t2}")

    speeds = []
    for trajectory in trajectories:
        start = trajectory.checkpoint_at(t1).position(side)
        end = trajectory.checkpoint_at(t2).position(side)
        speeds.append((end - start) / (t2 - t1))
    return speeds


def speed_estimate(
    trajectories: Sequence[Trajectory],
    t1: float,
    t2: float,
    side: Side = "right",
) -> SpeedEstimate:
    """
    Estimate the speed of the front as the mean of the per-run speeds.

    Taking ``t1 > 0`` excludes the early evolution, which biases the
    estimate.
    """
    speeds = run_speeds(trajectories, t1, t2, side)
    mean, error = mean_and_error(speeds)
    return SpeedEstimate(mean, t1, t2, len(speeds), error, side)


def drift_average(
    trajectory: Trajectory,
    t1: float,
    t2: float,
    side: Side = "right",
) -> float:
    """
    Time average of ``f`` between two checkpoints.

    By ergodicity of the process seen from the tip this converges to the
    speed.
    """
    if not t1 < t2:
        raise ProgrammingError(f"Need t1 < t2, got {t1} and {t2}")

    start = _drift_integral(trajectory.checkpoint_at(t1), side)
    end = _drift_integral(trajectory.checkpoint_at(t2), side)
    return (end - start) / (t2 - t1)


def mean_position_slope(
    trajectories: Sequence[Trajectory],
    times: Sequence[float],
    side: Side = "right",
) -> Tuple[float, float]:
    """
    Fit ``E[X_t]`` linearly in ``t``, returning the slope and its error.
    """
    if len(times) < 2:
        raise ProgrammingError("At least two times are needed for a slope")

    means = []
    for time in times:
        positions = [
            trajectory.checkpoint_at(time).position(side)
            for trajectory in trajectories
        ]
        means.append(mean_and_error(positions)[0])
    if len(times) == 2:
        slope = (means[1] - means[0]) / (times[1] - times[0])
        return slope, 0.0

    fit = linregress(times, means)
    return float(fit.slope), float(fit.stderr)


@dataclass
class ErgodicityReport:  # pylint: disable=too-many-instance-attributes

    """
    Statistics of the process seen from the tip along one run.

    ``return_times`` are the times between consecutive entries into the
    origin state, and ``excursion_variations`` the quadratic variation of the
    martingale over each of those excursions.
    """

    burn_in: float
    t_end: float
    return_times: List[float]
    excursion_variations: List[float]
    occupation: Dict[str, float]
    drift_average: float
    speed: float
    insufficient_excursions: bool = False
    entries: List[float] = field(default_factory=list)


def _integral_at(trajectory: Trajectory, time: float) -> float:
    """
    Running integral of ``f`` at any time.

    ``f`` is constant between events, so interpolating linearly between the
    integrals recorded at events is exact.
    """
    first, last = trajectory.checkpoints[0], trajectory.checkpoints[-1]
    times = [first.time] + [event.time for event in trajectory.events] + [last.time]
    values = (
        [_drift_integral(first, "right")]
        + [event.int_f for event in trajectory.events]
        + [_drift_integral(last, "right")]
    )
    return float(np.interp(time, times, values))


def _tip_at(trajectory: Trajectory, time: float) -> Site:
    index = bisect.bisect_right([event.time for event in trajectory.events], time)
    if index == 0:
        return _initial_position(trajectory, "right")
    return trajectory.events[index - 1].tip


def ergodicity_report(  # pylint: disable=too-many-locals
    trajectory: Trajectory,
    burn_in: float = 0.0,
) -> ErgodicityReport:
    """
    Analyse the excursions of the process seen from the tip.

    The chain's origin is the state with no particles, which can't be seen
    from an occupied tip; the state with nothing but the tip above the
    saturated block stands for it (``birthfront.lattice.is_origin_proxy``).
    Requires a trajectory recorded with ``record_alpha``.
    """
    if trajectory.alphas is None:
        raise MissingObservableError("The trajectory has no recorded tip states")
    if not trajectory.start <= burn_in < trajectory.t_end:
        raise ProgrammingError(
            f"Burn-in {burn_in} must be in [{trajectory.start}, {trajectory.t_end})",
        )

    alphas = trajectory.alphas
    ends = [time for time, _ in alphas[1:]] + [trajectory.t_end]

    occupation: Dict[str, float] = defaultdict(float)
    entries: List[float] = []
    previous = False
    for (time, gamma), end in zip(alphas, ends):
        proxy = is_origin_proxy(gamma)
        if proxy and not previous and time >= burn_in:
            entries.append(time)
        previous = proxy

        duration = end - max(time, burn_in)
        if duration > 0:
            occupation[gamma.key()] += duration

    total = trajectory.t_end - burn_in
    frequencies = {
        key: value / total
        for key, value in sorted(occupation.items(), key=lambda item: -item[1])
    }

    return_times = [later - earlier for earlier, later in zip(entries, entries[1:])]

    jumps = martingale_jumps(trajectory)
    event_times = [event.time for event in trajectory.events]
    excursion_variations = []
    for earlier, later in zip(entries, entries[1:]):
        # events in (earlier, later]
        lo = bisect.bisect_right(event_times, earlier)
        hi = bisect.bisect_right(event_times, later)
        excursion_variations.append(float(sum(jump**2 for jump in jumps[lo:hi])))

    end = trajectory.t_end
    drift = (_integral_at(trajectory, end) - _integral_at(trajectory, burn_in)) / total
    speed = (_tip_at(trajectory, end) - _tip_at(trajectory, burn_in)) / total

    insufficient = len(return_times) < 2
    if insufficient:
        _logger.warning(
            "Only %d returns to the origin state after t=%r",
            len(return_times),
            burn_in,
        )

    return ErgodicityReport(
        burn_in=burn_in,
        t_end=trajectory.t_end,
        return_times=return_times,
        excursion_variations=excursion_variations,
        occupation=frequencies,
        drift_average=drift,
        speed=speed,
        insufficient_excursions=insufficient,
        entries=entries,
    )


@dataclass
class HittingTimes:

    """
    First times each site comes within reach of the support (``sigma``) and
    gets occupied (``tau``). Sites never reached get ``math.inf``.
    """

    sigma: Dict[Site, float]
    tau: Dict[Site, float]

    def delays(self) -> List[float]:
        """``tau(x) - sigma(x)`` for the sites that were occupied."""
        return [
            self.tau[site] - self.sigma[site]
            for site in self.tau
            if math.isfinite(self.tau[site])
        ]


def hitting_times(trajectory: Trajectory, sites: Sequence[Site]) -> HittingTimes:
    """
    Replay the event log and record first hitting times of ``sites``.
    """
    range_ = trajectory.range_
    start = trajectory.start
    initial = trajectory.initial

    sigma = {site: math.inf for site in sites}
    tau = {site: math.inf for site in sites}
    for site in sites:
        if initial[site] >= 1:
            tau[site] = start
        if any(initial[y] for y in range(site - range_, site + range_ + 1)):
            sigma[site] = start

    for event in trajectory.events:
        for site in range(event.site - range_, event.site + range_ + 1):
            if site in sigma and math.isinf(sigma[site]):
                sigma[site] = event.time
        if event.site in tau and math.isinf(tau[event.site]):
            tau[event.site] = event.time

    return HittingTimes(sigma, tau)


def delay_tail(
    delays: Sequence[float],
    grid: Sequence[float],
) -> List[Tuple[float, float]]:
    """
    Empirical ``P(tau - sigma > s)`` for ``s`` in the grid.
    """
    if not delays:
        return [(s, 0.0) for s in grid]
    array = np.asarray(delays)
    return [(s, float(np.mean(array > s))) for s in grid]


@dataclass
class FluctuationReport:

    """
    Distribution of ``(X_t - lambda t) / sqrt(t)`` over a batch of runs.

    ``tails`` has ``(q, count, frequency)`` rows for ``|Z| >= q``, and
    ``gaussian_slope`` is the slope of the log tail frequency against
    ``q^2``, negative for sub-Gaussian tails.
    """

    time: float
    lambda_hat: float
    n_replicas: int
    residuals: List[float]
    mean: float
    spread: float
    tails: List[Tuple[float, int, float]]
    gaussian_slope: float
    tails_decrease: bool


def fluctuation_stats(
    trajectories: Sequence[Trajectory],
    t: float,
    lambda_hat: float,
    q_grid: Sequence[float] = DEFAULT_Q_GRID,
    side: Side = "right",
) -> FluctuationReport:
    """
    Compute the fluctuations of the front around ``lambda_hat t``.

    ``lambda_hat`` should come from an independent batch of runs.
    """
    if t <= 0:
        raise ProgrammingError("Fluctuations need a positive time")
    if len(trajectories) < MIN_FLUCTUATION_REPLICAS:
        _logger.warning(
            "Fluctuation statistics on %d replicas, at least %d are recommended",
            len(trajectories),
            MIN_FLUCTUATION_REPLICAS,
        )

    deviations = np.array(
        [
            trajectory.checkpoint_at(t).position(side) - lambda_hat * t
            for trajectory in trajectories
        ],
        dtype=float,
    )
    residuals = deviations / math.sqrt(t)
    spread = float(deviations.std(ddof=1)) if len(deviations) > 1 else 0.0

    tails = []
    for q in q_grid:
        count = int(np.sum(np.abs(residuals) >= q))
        tails.append((float(q), count, count / len(residuals)))

    frequencies = [frequency for _, _, frequency in tails]
    positive = [(q, frequency) for q, _, frequency in tails if frequency > 0]
    if len(positive) >= 2:
        fit = linregress(
            [q**2 for q, _ in positive],
            [math.log(frequency) for _, frequency in positive],
        )
        slope = float(fit.slope)
    else:
        slope = math.nan

    return FluctuationReport(
        time=t,
        lambda_hat=lambda_hat,
        n_replicas=len(residuals),
        residuals=[float(value) for value in residuals],
        mean=float(residuals.mean()),
        spread=spread,
        tails=tails,
        gaussian_slope=slope,
        tails_decrease=all(
            later <= earlier for earlier, later in zip(frequencies, frequencies[1:])
        ),
    )


def spread_ratio(small: FluctuationReport, large: FluctuationReport) -> float:
    """
    Ratio of the spreads of ``X_t - lambda t`` at two times.

    Diffusive fluctuations give ``sqrt(t_large / t_small)``.
    """
    if small.spread == 0:
        return math.inf
    return large.spread / small.spread


@dataclass
class ConcentrationProfile:

    """
    Empirical ``P(|X_t / t - lambda| >= delta lambda)`` across times.

    ``decay_slope`` is the slope of the log frequency against ``t``, negative
    when the probabilities decay exponentially.
    """

    lambda_hat: float
    delta: float
    rows: List[Tuple[float, int, float]]
    decay_slope: float
    decreasing: bool


def concentration_profile(
    trajectories: Sequence[Trajectory],
    times: Sequence[float],
    lambda_hat: float,
    delta: float = 0.1,
    side: Side = "right",
) -> ConcentrationProfile:
    """
    Measure how the empirical speed concentrates around ``lambda_hat``.
    """
    if lambda_hat <= 0:
        raise ProgrammingError("The reference speed must be positive")

    rows = []
    for time in times:
        speeds = np.array(
            [
                trajectory.checkpoint_at(time).position(side) / time
                for trajectory in trajectories
            ],
        )
        count = int(np.sum(np.abs(speeds - lambda_hat) >= delta * lambda_hat))
        rows.append((float(time), count, count / len(speeds)))

    positive = [(time, frequency) for time, _, frequency in rows if frequency > 0]
    if len(positive) >= 2:
        fit = linregress(
            [time for time, _ in positive],
            [math.log(frequency) for _, frequency in positive],
        )
        slope = float(fit.slope)
    else:
        slope = math.nan

    frequencies = [frequency for _, _, frequency in rows]
    return ConcentrationProfile(
        lambda_hat=lambda_hat,
        delta=delta,
        rows=rows,
        decay_slope=slope,
        decreasing=all(
            later < earlier or later == 0
            for earlier, later in zip(frequencies, frequencies[1:])
        ),
    )


@dataclass
class ShapeReport:

    """
    Speeds of both ends of the occupied region over consecutive windows.
    """

    windows: List[Tuple[float, float]]
    right: List[SpeedEstimate]
    left: List[SpeedEstimate]

    def max_z_score(self) -> float:
        """
        Largest two-sample z-score between consecutive windows on a side.
        """
        scores = [0.0]
        for estimates in (self.right, self.left):
            for earlier, later in zip(estimates, estimates[1:]):
                error = math.hypot(earlier.std_error, later.std_error)
                difference = abs(later.lambda_hat - earlier.lambda_hat)
                if error == 0:
                    scores.append(0.0 if difference == 0 else math.inf)
                else:
                    scores.append(difference / error)
        return max(scores)

    @property
    def linear(self) -> bool:
        """Both ends move outward with positive speed in every window."""
        return all(estimate.lambda_hat > 0 for estimate in self.right + self.left)


def shape_report(
    trajectories: Sequence[Trajectory],
    windows: Sequence[Tuple[float, float]],
) -> ShapeReport:
    """
    Estimate the speed of the tip and of the leftmost particle per window.
    """
    return ShapeReport(
        windows=list(windows),
        right=[speed_estimate(trajectories, t1, t2, "right") for t1, t2 in windows],
        left=[speed_estimate(trajectories, t1, t2, "left") for t1, t2 in windows],
    )


def write_tails(report: FluctuationReport, path: Union[str, Path]) -> Path:
    """
    Write the tail frequencies as CSV, ``q,count,frequency``.
    """
    return write_csv(path, "fluctuation", ["q", "count", "frequency"], report.tails)


def write_occupation(report: ErgodicityReport, path: Union[str, Path]) -> Path:
    """
    Write the empirical occupation frequencies as CSV, ``state,frequency``.
    """
    return write_csv(
        path,
        "occupation",
        ["state", "frequency"],
        report.occupation.items(),
    )


def write_return_times(
    report: ErgodicityReport,
    path: Union[str, Path],
) -> Path:
    """
    Write the return times and excursion variations as CSV.
    """
    return write_csv(
        path,
        "returns",
        ["return_time", "excursion_variation"],
        zip(report.return_times, report.excursion_variations),
    )

