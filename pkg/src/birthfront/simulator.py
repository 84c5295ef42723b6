"""
Exact simulation of the birth process.

The process is simulated with the direct method: the waiting time to the next
birth is exponential with the total rate, and the birth site is chosen with
probability proportional to its rate. Rates are kept in a cache holding every
site with a positive rate; after a birth only the sites within the
interaction range of the new particle are recomputed.

Along the way the simulator integrates the drift and variance functionals of
the front,

    f = sum_{k=1}^{R} k b(X + k, eta),    g = sum_{k=1}^{R} k^2 b(X + k, eta),

where ``X`` is the tip, together with their mirrored counterparts for the
leftmost site ``Y`` (``b(Y - k, eta)`` instead of ``b(X + k, eta)``). Both are
constant between events, so the integrals are exact.

A typical run::

    >>> model = FreeBranchingModel(Kernel.indicator(3))
    >>> state = init(model, singleton_origin(3), seed=42)
    >>> trajectory = run_until(state, 10.0, checkpoint_times=[5.0])

"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from birthfront.exceptions import (
    BudgetExceededError,
    EmptyConfigurationError,
    FrozenProcessError,
    InternalError,
    MissingObservableError,
    ProgrammingError,
)
from birthfront.lattice import (
    Configuration,
    SeenFromTip,
    format_snapshot,
    seen_from_tip,
    tip,
)
from birthfront.lib import make_rng, run_seeds, write_csv
from birthfront.models.base import RateModel
from birthfront.typing import Side, Site

_logger = logging.getLogger(__name__)

# the total rate is summed from scratch with this period, to avoid drift
RECOMPUTE_EVERY = 4096

RELATIVE_TOLERANCE = 1e-9

Bounds = Tuple[Site, Site]


@dataclass(frozen=True)
class Event:

    """
    A birth, with the observables right after it.

    The running integrals are taken at the event time, so the jump of the
    martingale ``X - int f`` at the event is the jump of the tip.
    """

    time: float
    site: Site
    tip: Site
    leftmost: Site
    int_f: float
    int_g: float
    int_f_left: float
    int_g_left: float


@dataclass(frozen=True)
class Checkpoint:

    """
    Observables at a fixed time.

    The integrals are optional so that trajectories can also be built from
    positions alone.
    """

    time: float
    tip: Site
    leftmost: Site
    mass: int
    int_f: Optional[float] = None
    int_g: Optional[float] = None
    int_f_left: Optional[float] = None
    int_g_left: Optional[float] = None
    alpha: Optional[SeenFromTip] = None

    def position(self, side: Side = "right") -> Site:
        """
        The tip, or the mirrored leftmost site ``-Y`` for the left side.
        """
        return self.tip if side == "right" else -self.leftmost

    def drift_integral(self, side: Side = "right") -> Optional[float]:
        """Running integral of ``f`` on the given side."""
        return self.int_f if side == "right" else self.int_f_left

    def variance_integral(self, side: Side = "right") -> Optional[float]:
        """Running integral of ``g`` on the given side."""
        return self.int_g if side == "right" else self.int_g_left


@dataclass
class Trajectory:  # pylint: disable=too-many-instance-attributes

    """
    The record of one simulation run.

    ``alphas`` is only present when the run recorded the configuration seen
    from the tip; it starts with the initial state and has one entry per
    event after that.
    """

    initial: Configuration
    events: List[Event]
    checkpoints: List[Checkpoint]
    seed: int
    model: str
    range_: int
    start: float = 0.0
    t_end: float = 0.0
    alphas: Optional[List[Tuple[float, SeenFromTip]]] = None

    def checkpoint_at(self, time: float) -> Checkpoint:
        """
        Return the checkpoint recorded at ``time``.
        """
        for checkpoint in self.checkpoints:
            if math.isclose(checkpoint.time, time, rel_tol=1e-12, abs_tol=1e-12):
                return checkpoint
        raise MissingObservableError(f"No checkpoint at t={time}")


@dataclass
class SimState:  # pylint: disable=too-many-instance-attributes

    """
    The state of a running simulation.

    ``active_rates`` holds exactly the sites with a positive rate, and
    ``drift`` the current values of ``(f, g, f_left, g_left)``. The state is
    owned by a single run and mutated in place by ``step``.
    """

    model: RateModel
    config: Configuration
    rng: np.random.Generator
    seed: int
    time: float = 0.0
    active_rates: Dict[Site, float] = field(default_factory=dict)
    total_rate: float = 0.0
    event_count: int = 0
    bounds: Optional[Bounds] = None
    int_f: float = 0.0
    int_g: float = 0.0
    int_f_left: float = 0.0
    int_g_left: float = 0.0
    drift: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    verify_every: Optional[int] = None

    @property
    def rng_state(self) -> Dict[str, Any]:
        """State of the random generator."""
        return self.rng.bit_generator.state

    @property
    def band(self) -> int:
        """Radius of the neighborhood whose rates change after a birth."""
        return max(self.model.range_, self.model.interaction_range)


def _rate_at(state: SimState, site: Site) -> float:
    if state.bounds is not None and not state.bounds[0] <= site <= state.bounds[1]:
        return 0.0
    return state.model.rate(site, state.config)


def _exact_rates(state: SimState) -> Dict[Site, float]:
    first, last = state.config.bounds
    rates = {}
    for site in range(first - state.band, last + state.band + 1):
        rate = _rate_at(state, site)
        if rate > 0:
            rates[site] = rate
    return rates


def _update_drift(state: SimState) -> None:
    first, last = state.config.bounds
    active = state.active_rates
    f_right = g_right = f_left = g_left = 0.0
    for k in range(1, state.model.range_ + 1):
        right = active.get(last + k, 0.0)
        left = active.get(first - k, 0.0)
        f_right += k * right
        g_right += k * k * right
        f_left += k * left
        g_left += k * k * left
    state.drift = (f_right, g_right, f_left, g_left)


def init(  # pylint: disable=too-many-arguments
    model: RateModel,
    initial: Configuration,
    seed: int,
    bounds: Optional[Bounds] = None,
    verify_every: Optional[int] = None,
    time: float = 0.0,
) -> SimState:
    """
    Prepare a simulation run starting from ``initial``.

    When ``bounds`` are given sites outside of them never receive births,
    which gives the truncated dynamics solved by ``birthfront.oracle``. With
    ``verify_every`` the rate cache is compared against a full recomputation
    every that many events.
    """
    if initial.is_empty:
        raise EmptyConfigurationError("Cannot simulate from an empty configuration")
    if initial.cap != model.cap:
        raise ProgrammingError(
            f"Configuration cap {initial.cap} differs from model cap {model.cap}",
        )
    if bounds is not None:
        first, last = initial.bounds
        if not bounds[0] <= first <= last <= bounds[1]:
            raise ProgrammingError(f"Initial configuration is outside of {bounds}")
    if verify_every is not None and verify_every < 1:
        raise ProgrammingError("verify_every must be positive")

    state = SimState(
        model=model,
        config=initial.copy(),
        rng=make_rng(seed),
        seed=seed,
        time=time,
        bounds=bounds,
        verify_every=verify_every,
    )
    state.active_rates = _exact_rates(state)
    state.total_rate = math.fsum(state.active_rates.values())
    _update_drift(state)

    _logger.debug(
        "Initialized run %d with %d active sites, total rate %r",
        seed,
        len(state.active_rates),
        state.total_rate,
    )
    return state


def _refresh(state: SimState, site: Site) -> None:
    active = state.active_rates
    total = state.total_rate
    for neighbor in range(site - state.band, site + state.band + 1):
        rate = _rate_at(state, neighbor)
        total -= active.get(neighbor, 0.0)
        if rate > 0:
            active[neighbor] = rate
            total += rate
        else:
            active.pop(neighbor, None)
    state.total_rate = total if active else 0.0


def verify(state: SimState) -> None:
    """
    Compare the rate cache with a full recomputation.

    Raises ``InternalError`` on a divergence larger than a relative 1e-9,
    which happens when the model understates its interaction range.
    """
    exact = _exact_rates(state)
    for site in sorted(set(exact) | set(state.active_rates)):
        cached = state.active_rates.get(site, 0.0)
        expected = exact.get(site, 0.0)
        if not math.isclose(cached, expected, rel_tol=RELATIVE_TOLERANCE):
            raise InternalError(
                f"Rate cache diverged at site {site} after {state.event_count} "
                f"events: cached {cached!r}, exact {expected!r}",
            )

    total = math.fsum(exact.values())
    if not math.isclose(state.total_rate, total, rel_tol=RELATIVE_TOLERANCE):
        raise InternalError(
            f"Total rate diverged: cached {state.total_rate!r}, exact {total!r}",
        )


def _waiting_time(state: SimState) -> float:
    if state.total_rate <= 0 or not state.active_rates:
        raise FrozenProcessError(
            f"No site can give birth in {format_snapshot(state.config)}",
        )
    # inverse CDF of the exponential distribution
    return -math.log1p(-state.rng.random()) / state.total_rate


def _advance(state: SimState, duration: float) -> None:
    f_right, g_right, f_left, g_left = state.drift
    state.int_f += f_right * duration
    state.int_g += g_right * duration
    state.int_f_left += f_left * duration
    state.int_g_left += g_left * duration
    state.time += duration


def _choose_site(state: SimState) -> Site:
    target = state.rng.random() * state.total_rate
    cumulative = 0.0
    site = None
    for site, rate in state.active_rates.items():
        cumulative += rate
        if cumulative > target:
            return site

    # rounding can leave the target just above the cumulative sum
    if site is None:
        raise FrozenProcessError("No active site")
    return site


def _fire(state: SimState) -> Event:
    site = _choose_site(state)
    if not state.config.add_particle(site):
        raise InternalError(f"Site {site} was chosen but is saturated")

    _refresh(state, site)
    state.event_count += 1
    if state.event_count % RECOMPUTE_EVERY == 0:
        state.total_rate = math.fsum(state.active_rates.values())
    if state.verify_every and state.event_count % state.verify_every == 0:
        verify(state)
    _update_drift(state)

    first, last = state.config.bounds
    return Event(
        time=state.time,
        site=site,
        tip=last,
        leftmost=first,
        int_f=state.int_f,
        int_g=state.int_g,
        int_f_left=state.int_f_left,
        int_g_left=state.int_g_left,
    )


def step(state: SimState) -> Tuple[SimState, Event]:
    """
    Perform one birth.

    Raises ``FrozenProcessError`` when no site has a positive rate.
    """
    duration = _waiting_time(state)
    _advance(state, duration)
    event = _fire(state)
    return state, event


def _checkpoint(state: SimState, time: float, record_alpha: bool) -> Checkpoint:
    elapsed = time - state.time
    f_right, g_right, f_left, g_left = state.drift
    first, last = state.config.bounds
    return Checkpoint(
        time=time,
        tip=last,
        leftmost=first,
        mass=state.config.mass,
        int_f=state.int_f + f_right * elapsed,
        int_g=state.int_g + g_right * elapsed,
        int_f_left=state.int_f_left + f_left * elapsed,
        int_g_left=state.int_g_left + g_left * elapsed,
        alpha=seen_from_tip(state.config, state.model.range_) if record_alpha else None,
    )


def run_until(  # pylint: disable=too-many-locals
    state: SimState,
    t_end: float,
    checkpoint_times: Sequence[float] = (),
    record_alpha: bool = False,
    max_events: Optional[int] = None,
) -> Trajectory:
    """
    Run the simulation until ``t_end``.

    Observables are recorded at the start, at every checkpoint time and at
    ``t_end``. A checkpoint sees every event up to and including its time.
    The exponential clock pending at ``t_end`` is discarded, so the state can
    be run further without changing the law of the process.

    A state where no site can give birth (eg, a fully saturated truncated
    lattice) simply stays put until ``t_end``.
    """
    if t_end < state.time:
        raise ProgrammingError(f"t_end={t_end} is before the clock ({state.time})")
    times = list(checkpoint_times)
    if any(later < earlier for earlier, later in zip(times, times[1:])):
        raise ProgrammingError("Checkpoint times must be sorted")
    if times and (times[0] < state.time or times[-1] > t_end):
        raise ProgrammingError(
            f"Checkpoint times must lie in [{state.time}, {t_end}]",
        )

    start = state.time
    initial = state.config.copy()
    pending = list(dict.fromkeys([start, *times, t_end]))
    range_ = state.model.range_

    events: List[Event] = []
    checkpoints: List[Checkpoint] = []
    alphas = [(start, seen_from_tip(state.config, range_))] if record_alpha else None

    index = 0
    while True:
        if state.active_rates:
            duration = _waiting_time(state)
            next_time = state.time + duration
        else:
            next_time = math.inf

        while index < len(pending) and pending[index] < next_time:
            checkpoints.append(_checkpoint(state, pending[index], record_alpha))
            index += 1

        if next_time > t_end:
            break

        _advance(state, duration)
        events.append(_fire(state))
        if alphas is not None:
            alphas.append((state.time, seen_from_tip(state.config, range_)))
        if max_events is not None and len(events) > max_events:
            raise BudgetExceededError(
                f"More than {max_events} events before t={t_end}",
            )

    _advance(state, t_end - state.time)
    state.time = t_end

    _logger.debug(
        "Run %d reached t=%r with %d events, tip %d",
        state.seed,
        t_end,
        len(events),
        tip(state.config),
    )
    return Trajectory(
        initial=initial,
        events=events,
        checkpoints=checkpoints,
        seed=state.seed,
        model=state.model.describe(),
        range_=range_,
        start=start,
        t_end=t_end,
        alphas=alphas,
    )


def checkpoint_grid(
    t_end: float,
    every: Optional[float],
    extra: Sequence[float] = (),
    start: float = 0.0,
) -> List[float]:
    """
    Regular checkpoint times in ``[start, t_end]``, merged with ``extra``.
    """
    times = set(time for time in extra if start <= time <= t_end)
    if every:
        count = int(math.floor((t_end - start) / every + 1e-9))
        times.update(start + i * every for i in range(count + 1))
    return sorted(times)


def _run_one(  # pylint: disable=too-many-arguments
    model: RateModel,
    initial: Configuration,
    t_end: float,
    checkpoint_times: Tuple[float, ...],
    record_alpha: bool,
    bounds: Optional[Bounds],
    seed: int,
) -> Trajectory:
    state = init(model, initial, seed, bounds=bounds)
    return run_until(state, t_end, checkpoint_times, record_alpha)


def replicate(  # pylint: disable=too-many-arguments
    model: RateModel,
    initial: Configuration,
    t_end: float,
    n_runs: int,
    base_seed: int,
    parallelism: int = 1,
    checkpoint_times: Sequence[float] = (),
    record_alpha: bool = False,
    bounds: Optional[Bounds] = None,
) -> List[Trajectory]:
    """
    Run ``n_runs`` independent simulations.

    Run ``i`` uses the seed ``birthfront.lib.run_seed(base_seed, i)``, and
    the result is in run order, so the output doesn't depend on
    ``parallelism``.
    """
    if n_runs < 1:
        raise ProgrammingError("At least one run is needed")

    seeds = run_seeds(base_seed, n_runs)
    job = partial(
        _run_one,
        model,
        initial,
        t_end,
        tuple(checkpoint_times),
        record_alpha,
        bounds,
    )

    _logger.info(
        "Running %d replicas of %s until t=%r",
        n_runs,
        model.describe(),
        t_end,
    )
    if parallelism <= 1:
        return [job(seed) for seed in seeds]

    with ProcessPoolExecutor(max_workers=parallelism) as executor:
        chunksize = max(1, n_runs // (4 * parallelism))
        return list(executor.map(job, seeds, chunksize=chunksize))


def _optional(value: Optional[float]) -> Union[float, str]:
    return "" if value is None else value


def write_trajectory(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """
    Write the checkpoints as CSV, ``t,X,Y,mass,int_f,int_g``.
    """
    rows = (
        (
            checkpoint.time,
            checkpoint.tip,
            checkpoint.leftmost,
            checkpoint.mass,
            _optional(checkpoint.int_f),
            _optional(checkpoint.int_g),
        )
        for checkpoint in trajectory.checkpoints
    )
    return write_csv(
        path,
        "trajectory",
        ["t", "X", "Y", "mass", "int_f", "int_g"],
        rows,
    )


def write_events(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """
    Write the event log as CSV, ``t,site``.
    """
    rows = ((event.time, event.site) for event in trajectory.events)
    return write_csv(path, "events", ["t", "site"], rows)


def final_configuration(trajectory: Trajectory) -> Configuration:
    """
    Replay the event log on top of the initial configuration.
    """
    config = trajectory.initial.copy()
    for event in trajectory.events:
        config.add_particle(event.site)
    return config

