"""
Tests for birthfront.simulator.
"""
import math
from collections import Counter

import pytest
from pyfakefs.fake_filesystem import FakeFilesystem
from scipy.stats import chisquare

from birthfront.exceptions import (
    BudgetExceededError,
    EmptyConfigurationError,
    FrozenProcessError,
    InternalError,
    MissingObservableError,
    ProgrammingError,
)
from birthfront.lattice import Configuration, seen_from_tip, singleton_origin
from birthfront.lib import mean_and_error, read_csv, run_seed
from birthfront.models.branching import FecEstModel, FreeBranchingModel
from birthfront.models.kernels import Kernel
from birthfront.models.scaled import ScaledRateModel
from birthfront.simulator import (
    checkpoint_grid,
    final_configuration,
    init,
    replicate,
    run_until,
    step,
    verify,
    write_events,
    write_trajectory,
)


def test_init(branching: FreeBranchingModel) -> None:
    """
    Test the initial rate cache.
    """
    state = init(branching, singleton_origin(1), seed=42)
    assert state.active_rates == {-1: 1.0, 1: 1.0}
    assert state.total_rate == 2.0
    assert state.drift == (1.0, 1.0, 1.0, 1.0)
    assert state.time == 0.0
    assert state.event_count == 0
    assert state.band == 1
    assert state.rng_state["bit_generator"] == "PCG64"


def test_init_standard(standard: FecEstModel) -> None:
    """
    The band covers the interaction range.
    """
    state = init(standard, singleton_origin(3), seed=42)
    assert state.band == 4
    assert set(state.active_rates) == {-3, -2, -1, 0, 1, 2, 3}
    verify(state)


def test_init_invalid(branching: FreeBranchingModel) -> None:
    """
    Test invalid starting points.
    """
    with pytest.raises(EmptyConfigurationError) as excinfo:
        init(branching, Configuration(cap=1), seed=0)
    assert str(excinfo.value) == "Cannot simulate from an empty configuration"

    with pytest.raises(ProgrammingError) as excinfo:
        init(branching, singleton_origin(2), seed=0)
    assert str(excinfo.value) == "Configuration cap 2 differs from model cap 1"

    with pytest.raises(ProgrammingError) as excinfo:
        init(branching, singleton_origin(1), seed=0, bounds=(1, 3))
    assert str(excinfo.value) == "Initial configuration is outside of (1, 3)"

    with pytest.raises(ProgrammingError) as excinfo:
        init(branching, singleton_origin(1), seed=0, verify_every=0)
    assert str(excinfo.value) == "verify_every must be positive"


def test_step(branching: FreeBranchingModel) -> None:
    """
    Test a single birth.
    """
    state = init(branching, singleton_origin(1), seed=42)
    state, event = step(state)
    assert event.site in {-1, 1}
    assert event.time > 0
    assert state.time == event.time
    assert state.event_count == 1
    assert state.config.mass == 2
    assert (event.leftmost, event.tip) == state.config.bounds
    assert state.total_rate == 2.0

    # the integrals of f and g are exact: both are 1 until the first birth
    assert event.int_f == event.time
    assert event.int_g == event.time


def test_first_event_is_uniform() -> None:
    """
    With a flat kernel the first birth is equally likely at each of the sites
    within reach of the origin.
    """
    model = FreeBranchingModel(Kernel.indicator(3), cap=3)
    counts: Counter = Counter()
    for seed in range(7000):
        _, event = step(init(model, singleton_origin(3), seed=seed))
        counts[event.site] += 1

    assert set(counts) == set(range(-3, 4))
    result = chisquare([counts[site] for site in range(-3, 4)])
    assert result.pvalue > 1e-3


def test_step_frozen(branching: FreeBranchingModel) -> None:
    """
    A state with no possible birth can't step.
    """
    state = init(branching, singleton_origin(1), seed=42, bounds=(0, 0))
    assert state.active_rates == {}
    assert state.total_rate == 0

    with pytest.raises(FrozenProcessError) as excinfo:
        step(state)
    assert str(excinfo.value) == "No site can give birth in 0: 1"


def test_run_until_frozen(branching: FreeBranchingModel) -> None:
    """
    A frozen state stays put until the end of the run.
    """
    state = init(branching, singleton_origin(1), seed=42, bounds=(-3, 3))
    trajectory = run_until(state, 100.0, checkpoint_times=[50.0])
    assert len(trajectory.events) == 6
    assert final_configuration(trajectory) == Configuration([1] * 7, -3, 1)
    assert [checkpoint.time for checkpoint in trajectory.checkpoints] == [
        0.0,
        50.0,
        100.0,
    ]
    assert trajectory.checkpoints[-1].mass == 7
    assert state.time == 100.0


def test_reproducible(standard: FecEstModel) -> None:
    """
    Runs with the same seed are identical, with different seeds they are not.
    """
    first = run_until(init(standard, singleton_origin(3), seed=7), 10.0)
    second = run_until(init(standard, singleton_origin(3), seed=7), 10.0)
    third = run_until(init(standard, singleton_origin(3), seed=8), 10.0)
    assert first.events == second.events
    assert first.checkpoints == second.checkpoints
    assert first.events != third.events


def test_checkpoints(branching: FreeBranchingModel) -> None:
    """
    Checkpoints see every event up to their time.
    """
    state = init(branching, singleton_origin(1), seed=3)
    trajectory = run_until(state, 5.0, checkpoint_times=[1.0, 2.0, 2.0, 5.0])
    assert [checkpoint.time for checkpoint in trajectory.checkpoints] == [
        0.0,
        1.0,
        2.0,
        5.0,
    ]

    for checkpoint in trajectory.checkpoints:
        before = [event for event in trajectory.events if event.time <= checkpoint.time]
        expected = before[-1].tip if before else 0
        assert checkpoint.tip == expected
        assert checkpoint.mass == 1 + len(before)

        # for N = R = 1 the tip advances at rate 1 in any configuration
        assert checkpoint.int_f == pytest.approx(checkpoint.time)
        assert checkpoint.int_g == pytest.approx(checkpoint.time)
        assert checkpoint.int_f_left == pytest.approx(checkpoint.time)
        assert checkpoint.position("left") == -checkpoint.leftmost

    assert trajectory.checkpoint_at(2.0).time == 2.0
    with pytest.raises(MissingObservableError) as excinfo:
        trajectory.checkpoint_at(3.0)
    assert str(excinfo.value) == "No checkpoint at t=3.0"


def test_run_until_invalid(branching: FreeBranchingModel) -> None:
    """
    Test invalid schedules.
    """
    state = init(branching, singleton_origin(1), seed=0, time=1.0)
    with pytest.raises(ProgrammingError) as excinfo:
        run_until(state, 0.5)
    assert str(excinfo.value) == "t_end=0.5 is before the clock (1.0)"

    with pytest.raises(ProgrammingError) as excinfo:
        run_until(state, 5.0, checkpoint_times=[3.0, 2.0])
    assert str(excinfo.value) == "Checkpoint times must be sorted"

    with pytest.raises(ProgrammingError) as excinfo:
        run_until(state, 5.0, checkpoint_times=[0.5])
    assert str(excinfo.value) == "Checkpoint times must lie in [1.0, 5.0]"


def test_continue_run(branching: FreeBranchingModel) -> None:
    """
    A run can be continued from where it stopped.
    """
    state = init(branching, singleton_origin(1), seed=11)
    first = run_until(state, 5.0)
    second = run_until(state, 10.0)

    assert second.start == 5.0
    assert second.initial == final_configuration(first)
    assert all(event.time > 5.0 for event in second.events)
    assert second.checkpoints[0].int_f == first.checkpoints[-1].int_f
    assert second.checkpoints[-1].int_f == pytest.approx(10.0)


def test_max_events(branching: FreeBranchingModel) -> None:
    """
    Runs can be capped in number of events.
    """
    state = init(branching, singleton_origin(1), seed=0)
    with pytest.raises(BudgetExceededError) as excinfo:
        run_until(state, 1000.0, max_events=10)
    assert str(excinfo.value) == "More than 10 events before t=1000.0"


def test_record_alpha(standard: FecEstModel) -> None:
    """
    The configuration seen from the tip is recorded after every event.
    """
    state = init(standard, singleton_origin(3), seed=5)
    trajectory = run_until(state, 5.0, checkpoint_times=[2.0], record_alpha=True)
    assert trajectory.alphas is not None
    assert len(trajectory.alphas) == len(trajectory.events) + 1
    assert trajectory.alphas[0] == (0.0, seen_from_tip(singleton_origin(3), 3))
    assert trajectory.checkpoint_at(2.0).alpha is not None
    assert trajectory.alphas[-1][1] == seen_from_tip(final_configuration(trajectory), 3)


def test_verify(standard: FecEstModel) -> None:
    """
    The rate cache matches a full recomputation.
    """
    state = init(standard, singleton_origin(3), seed=9, verify_every=1)
    run_until(state, 10.0)
    verify(state)
    assert state.event_count > 0


def test_verify_wrong_range(standard: FecEstModel) -> None:
    """
    A model understating its interaction range corrupts the cache.
    """
    model = FecEstModel(standard.params, interaction_range=3)
    state = init(model, singleton_origin(3), seed=9, verify_every=1)
    with pytest.raises(InternalError) as excinfo:
        run_until(state, 20.0)
    assert str(excinfo.value).startswith("Rate cache diverged at site")


def test_checkpoint_grid() -> None:
    """
    Test regular checkpoint grids.
    """
    assert checkpoint_grid(10.0, 2.5) == [0.0, 2.5, 5.0, 7.5, 10.0]
    assert checkpoint_grid(10.0, 4.0, extra=[3.0, 11.0]) == [0.0, 3.0, 4.0, 8.0]
    assert checkpoint_grid(10.0, None, extra=[5.0]) == [5.0]
    assert checkpoint_grid(3.0, 1.0, start=1.0) == [1.0, 2.0, 3.0]


def test_replicate(branching: FreeBranchingModel) -> None:
    """
    Runs are seeded by index, whatever the parallelism.
    """
    trajectories = replicate(
        branching,
        singleton_origin(1),
        5.0,
        n_runs=4,
        base_seed=2022,
        checkpoint_times=[2.5],
    )
    assert [trajectory.seed for trajectory in trajectories] == [
        run_seed(2022, index) for index in range(4)
    ]
    assert all(len(trajectory.checkpoints) == 3 for trajectory in trajectories)

    parallel = replicate(
        branching,
        singleton_origin(1),
        5.0,
        n_runs=4,
        base_seed=2022,
        parallelism=2,
        checkpoint_times=[2.5],
    )
    assert [trajectory.events for trajectory in parallel] == [
        trajectory.events for trajectory in trajectories
    ]

    with pytest.raises(ProgrammingError) as excinfo:
        replicate(branching, singleton_origin(1), 5.0, n_runs=0, base_seed=0)
    assert str(excinfo.value) == "At least one run is needed"


def test_write_trajectory(fs: FakeFilesystem, branching: FreeBranchingModel) -> None:
    """
    Test writing trajectories and event logs.
    """
    state = init(branching, singleton_origin(1), seed=1)
    trajectory = run_until(state, 3.0, checkpoint_times=[1.0])

    write_trajectory(trajectory, "/results/trajectory.csv")
    kind, header, rows = read_csv("/results/trajectory.csv")
    assert kind == "trajectory"
    assert header == ["t", "X", "Y", "mass", "int_f", "int_g"]
    assert [row[0] for row in rows] == ["0.0", "1.0", "3.0"]

    write_events(trajectory, "/results/events.csv")
    kind, header, rows = read_csv("/results/events.csv")
    assert kind == "events"
    assert header == ["t", "site"]
    assert [int(row[1]) for row in rows] == [event.site for event in trajectory.events]


@pytest.mark.slow_integration_test
def test_tip_is_poisson(branching: FreeBranchingModel) -> None:
    """
    For N = R = 1 the tip is a Poisson process with rate 1.
    """
    trajectories = replicate(branching, singleton_origin(1), 10.0, 2000, base_seed=1)
    tips = [trajectory.checkpoints[-1].tip for trajectory in trajectories]
    mean, error = mean_and_error(tips)
    assert abs(mean - 10.0) <= 4 * error

    first = [trajectory.events[0].time for trajectory in trajectories]
    mean, error = mean_and_error(first)
    assert abs(mean - 0.5) <= 4 * error


@pytest.mark.slow_integration_test
def test_time_scaling(standard: FecEstModel) -> None:
    """
    Doubling the rates runs the process twice as fast.
    """
    slow = replicate(standard, singleton_origin(3), 10.0, 400, base_seed=1)
    fast = replicate(
        ScaledRateModel(standard, 2.0),
        singleton_origin(3),
        5.0,
        400,
        base_seed=2,
    )
    first = mean_and_error([trajectory.checkpoints[-1].tip for trajectory in slow])
    second = mean_and_error([trajectory.checkpoints[-1].tip for trajectory in fast])
    assert abs(first[0] - second[0]) <= 4 * math.hypot(first[1], second[1])
