#!/usr/bin/env python
"""
Command-line interface for the front speed experiments.

The ``birthfront`` script has one verb per experiment::

    birthfront sweep          # speed over random (c_fec, c_est) pairs
    birthfront curve          # speed as a function of c_est, at fixed c_fec
    birthfront trajectories   # a fan of tip trajectories, with an SVG plot
    birthfront fluct          # fluctuations and concentration of the tip
    birthfront validate       # exact oracle, martingale and model checks

Every verb reads the experiment configuration (see ``birthfront.config``),
writes CSV files to the output directory and prints a summary table. The
exit code is 0 on success, 1 when validation fails and 2 for an invalid
configuration.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tabulate import tabulate

from birthfront import analysis
from birthfront.config import (
    FULL_CURVE_T2,
    ExperimentConfig,
    apply_overrides,
    load_config,
)
from birthfront.exceptions import (
    BudgetExceededError,
    Error,
    InterfaceError,
    ProgrammingError,
)
from birthfront.lattice import singleton_origin
from birthfront.lib import make_rng, mean_and_error, run_seed, write_csv
from birthfront.models.base import RateModel
from birthfront.models.branching import FreeBranchingModel
from birthfront.models.checks import check_conditions, compute_bounds
from birthfront.models.kernels import Kernel
from birthfront.oracle import build_truncation, transient
from birthfront.simulator import (
    Trajectory,
    checkpoint_grid,
    final_configuration,
    replicate,
)
from birthfront.svg import Chart

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_CONFIG = 2

# run index reserved for the batch that calibrates the reference speed
CALIBRATION_INDEX = 2**31

# small truncated model with an exact law
ORACLE_HALF_WIDTH = 3
ORACLE_TIME = 0.5
ORACLE_TOLERANCE = 1e-10

MARTINGALE_TIMES = (10.0, 50.0)

# absolute slack for comparisons where the sample has no variance
NUMERICAL_SLACK = 1e-9


def sweep_pairs(config: ExperimentConfig) -> List[Tuple[float, float]]:
    """
    The ``(c_fec, c_est)`` pairs of a sweep.

    Random pairs come from a generator seeded with the base seed, so the
    same configuration always gives the same pairs.
    """
    sweep = config.sweep
    if sweep.pairs is not None:
        return [(float(c_fec), float(c_est)) for c_fec, c_est in sweep.pairs]
    if sweep.mode == "grid":
        axis = np.linspace(0.0, 1.0, sweep.points)
        return [(float(c_fec), float(c_est)) for c_fec in axis for c_est in axis]

    rng = make_rng(config.replication.base_seed)
    pairs = rng.random((sweep.count, 2))
    return [(float(c_fec), float(c_est)) for c_fec, c_est in pairs]


def _speed(
    config: ExperimentConfig,
    model: RateModel,
    t2: float,
) -> analysis.SpeedEstimate:
    replication = config.replication
    t1 = config.schedule.t1
    trajectories = replicate(
        model,
        singleton_origin(model.cap),
        t2,
        replication.n_runs,
        replication.base_seed,
        replication.parallelism,
        checkpoint_times=[t1, t2],
    )
    return analysis.speed_estimate(trajectories, t1, t2)


def cmd_sweep(config: ExperimentConfig) -> int:
    """
    Estimate the speed of the tip over pairs of regulation constants.

    Every pair uses the same seeds, so differences between pairs are not
    blurred by independent noise.
    """
    rows = []
    for c_fec, c_est in sweep_pairs(config):
        model = config.build_model(c_fec=c_fec, c_est=c_est)
        estimate = _speed(config, model, config.schedule.t2)
        rows.append((c_fec, c_est, estimate.lambda_hat, estimate.std_error))
        _logger.info(
            "c_fec=%r c_est=%r speed=%r (%r)",
            c_fec,
            c_est,
            estimate.lambda_hat,
            estimate.std_error,
        )

    write_csv(
        config.out_dir / "sweep.csv",
        "sweep",
        ["c_fec", "c_est", "speed", "std_error"],
        rows,
    )
    print(tabulate(rows, headers=["c_fec", "c_est", "speed", "std_error"]))
    return EXIT_OK


def cmd_curve(config: ExperimentConfig) -> int:
    """
    Estimate the speed as a function of ``c_est`` at fixed ``c_fec``.
    """
    sweep = config.sweep
    values = sweep.values or list(np.linspace(0.0, 1.0, sweep.points))
    t2 = FULL_CURVE_T2 if config.full else config.schedule.t2

    rows = []
    for c_est in values:
        model = config.build_model(c_fec=sweep.c_fec, c_est=float(c_est))
        estimate = _speed(config, model, t2)
        rows.append((float(c_est), estimate.lambda_hat, estimate.std_error))

    write_csv(
        config.out_dir / "curve.csv",
        "curve",
        ["c_est", "speed", "std_error"],
        rows,
    )

    chart = Chart(
        title=f"Speed at c_fec = {sweep.c_fec:g}",
        x_label="c_est",
        y_label="speed",
    )
    chart.line([(c_est, speed) for c_est, speed, _ in rows])
    chart.scatter([(c_est, speed) for c_est, speed, _ in rows])
    chart.save(config.out_dir / "curve.svg")

    print(tabulate(rows, headers=["c_est", "speed", "std_error"]))
    return EXIT_OK


def cmd_trajectories(config: ExperimentConfig) -> int:
    """
    Simulate a fan of tip trajectories and plot them.
    """
    model = config.build_model()
    replication = config.replication
    t2 = config.schedule.t2
    times = checkpoint_grid(t2, config.schedule.checkpoint_every)
    trajectories = replicate(
        model,
        singleton_origin(model.cap),
        t2,
        replication.n_runs,
        replication.base_seed,
        replication.parallelism,
        checkpoint_times=times,
    )

    write_csv(
        config.out_dir / "trajectories.csv",
        "trajectories",
        ["run_id", "t", "X"],
        (
            (run_id, checkpoint.time, checkpoint.tip)
            for run_id, trajectory in enumerate(trajectories)
            for checkpoint in trajectory.checkpoints
        ),
    )

    chart = Chart(title=model.describe(), x_label="t", y_label="X")
    for run_id, trajectory in enumerate(trajectories):
        chart.line(
            [(point.time, point.tip) for point in trajectory.checkpoints],
            label=f"run {run_id}",
        )
    chart.save(config.out_dir / "trajectories.svg")

    rows = []
    for run_id, trajectory in enumerate(trajectories):
        final = trajectory.checkpoints[-1].tip
        rows.append((run_id, trajectory.seed, final, final / t2))
    print(tabulate(rows, headers=["run_id", "seed", "X", "X/t"]))
    return EXIT_OK


def cmd_fluct(config: ExperimentConfig) -> int:  # pylint: disable=too-many-locals
    """
    Measure the fluctuations of the tip around its mean position.

    The reference speed comes from an independent calibration batch.
    """
    model = config.build_model()
    replication = config.replication
    schedule = config.schedule
    fluct = config.fluct

    calibration = replicate(
        model,
        singleton_origin(model.cap),
        schedule.t2,
        replication.n_runs,
        run_seed(replication.base_seed, CALIBRATION_INDEX),
        replication.parallelism,
        checkpoint_times=[schedule.t1, schedule.t2],
    )
    reference = analysis.speed_estimate(calibration, schedule.t1, schedule.t2)
    lambda_hat = reference.lambda_hat

    times = sorted(set(fluct.times) | set(fluct.concentration_times))
    trajectories = replicate(
        model,
        singleton_origin(model.cap),
        times[-1],
        replication.n_runs,
        replication.base_seed,
        replication.parallelism,
        checkpoint_times=times,
    )

    reports = []
    for time in fluct.times:
        report = analysis.fluctuation_stats(
            trajectories,
            time,
            lambda_hat,
            fluct.q_grid,
        )
        analysis.write_tails(report, config.out_dir / f"fluct_t{time:g}.csv")
        reports.append(report)

    summary = [
        (
            report.time,
            report.mean,
            report.spread,
            report.gaussian_slope,
            report.tails_decrease,
        )
        for report in reports
    ]
    write_csv(
        config.out_dir / "fluct_summary.csv",
        "fluct_summary",
        ["t", "mean", "spread", "gaussian_slope", "tails_decrease"],
        summary,
    )
    print(f"lambda_hat = {lambda_hat!r}")
    headers = ["t", "mean", "spread", "slope in q^2", "decreasing"]
    print(tabulate(summary, headers=headers))
    for small, large in zip(reports, reports[1:]):
        print(
            f"spread ratio t={large.time:g} / t={small.time:g}: "
            f"{analysis.spread_ratio(small, large):.3f}",
        )

    profile = analysis.concentration_profile(
        trajectories,
        fluct.concentration_times,
        lambda_hat,
        fluct.delta,
    )
    write_csv(
        config.out_dir / "concentration.csv",
        "concentration",
        ["t", "count", "frequency"],
        profile.rows,
    )
    print(tabulate(profile.rows, headers=["t", "count", "frequency"]))
    return EXIT_OK


Check = Tuple[str, str, float, float, bool]


def _compare(
    suite: str,
    name: str,
    sample: Sequence[float],
    expected: float,
    tolerance: float,
) -> Check:
    mean, error = mean_and_error(sample)
    passed = abs(mean - expected) <= tolerance * error + NUMERICAL_SLACK
    return (suite, name, mean, expected, passed)


def validate_conditions(config: ExperimentConfig, model: RateModel) -> List[Check]:
    """
    Randomized checks of the model conditions, and its rate bounds.
    """
    report = check_conditions(
        model,
        config.validate.trials,
        config.replication.base_seed,
    )
    checks: List[Check] = [
        ("conditions", name, float(count), 0.0, False)
        for name, count in sorted(report.counts().items())
    ]
    if report.ok:
        checks.append(("conditions", "violations", 0.0, 0.0, True))
    for violation in report.violations[:5]:
        _logger.warning(
            "%s violated at %d in %s: %s",
            violation.condition,
            violation.site,
            violation.snapshot,
            violation.detail,
        )

    try:
        bounds = compute_bounds(model)
        ordered = 0 < bounds.lower <= bounds.upper
        checks.append(
            ("bounds", "lower <= upper", bounds.lower, bounds.upper, ordered),
        )
    except BudgetExceededError as ex:
        _logger.warning("Skipping rate bounds: %s", ex)

    reference = FreeBranchingModel(Kernel.indicator(1), cap=1)
    upper = compute_bounds(reference).upper
    checks.append(("bounds", "upper, N=R=1 free branching", upper, 2.0, upper == 2.0))
    return checks


def validate_oracle(config: ExperimentConfig) -> List[Check]:
    """
    Compare simulated means with the exact law of a small truncated chain.
    """
    model = FreeBranchingModel(Kernel.indicator(1), cap=1)
    chain = build_truncation(model, ORACLE_HALF_WIDTH)
    initial = singleton_origin(1)
    result = transient(chain, chain.index_of(initial), ORACLE_TIME, ORACLE_TOLERANCE)

    trajectories = replicate(
        model,
        initial,
        ORACLE_TIME,
        config.validate.replicas,
        config.replication.base_seed,
        config.replication.parallelism,
        bounds=(-ORACLE_HALF_WIDTH, ORACLE_HALF_WIDTH),
    )
    finals = [final_configuration(trajectory) for trajectory in trajectories]
    tolerance = config.validate.tolerance

    checks = [
        _compare(
            "oracle",
            "E[X_t]",
            [trajectory.checkpoints[-1].tip for trajectory in trajectories],
            result.mean_tip,
            tolerance,
        ),
        _compare(
            "oracle",
            "E[mass]",
            [config_.mass for config_ in finals],
            result.mean_mass,
            tolerance,
        ),
    ]
    for site, mean in result.mean_occupancy.items():
        checks.append(
            _compare(
                "oracle",
                f"E[eta_t({site})]",
                [config_[site] for config_ in finals],
                mean,
                tolerance,
            ),
        )
    return checks


def validate_martingale(config: ExperimentConfig, model: RateModel) -> List[Check]:
    """
    Check that ``M`` is centered and compensated by ``int g``.
    """
    trajectories: List[Trajectory] = replicate(
        model,
        singleton_origin(model.cap),
        MARTINGALE_TIMES[-1],
        config.validate.martingale_replicas,
        config.replication.base_seed,
        config.replication.parallelism,
        checkpoint_times=MARTINGALE_TIMES,
    )
    tolerance = config.validate.tolerance

    residuals: Dict[float, List[float]] = {time: [] for time in MARTINGALE_TIMES}
    gaps: Dict[float, List[float]] = {time: [] for time in MARTINGALE_TIMES}
    for trajectory in trajectories:
        series = dict(analysis.martingale_residual(trajectory))
        start = series[trajectory.start]
        variations = {
            time: (bracket, predictable)
            for time, bracket, predictable in analysis.quadratic_variation(trajectory)
        }
        for time in MARTINGALE_TIMES:
            residuals[time].append(series[time] - start)
            bracket, predictable = variations[time]
            gaps[time].append(bracket - predictable)

    checks = []
    for time in MARTINGALE_TIMES:
        checks.append(
            _compare(
                "martingale",
                f"E[M_t - M_0], t={time:g}",
                residuals[time],
                0.0,
                tolerance,
            ),
        )
        checks.append(
            _compare(
                "martingale",
                f"E[[M]_t - <M>_t], t={time:g}",
                gaps[time],
                0.0,
                tolerance,
            ),
        )
    return checks


def cmd_validate(config: ExperimentConfig) -> int:
    """
    Run the validation suite, returning 1 if any check fails.
    """
    model = config.build_model()
    checks = validate_conditions(config, model)
    checks.extend(validate_oracle(config))
    checks.extend(validate_martingale(config, model))

    headers = ["suite", "check", "value", "expected", "passed"]
    write_csv(config.out_dir / "validate.csv", "validate", headers, checks)
    print(tabulate(checks, headers=headers))

    failed = [check for check in checks if not check[-1]]
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed")
        return EXIT_FAILED

    print(f"All {len(checks)} checks passed")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[ExperimentConfig], int]] = {
    "sweep": cmd_sweep,
    "curve": cmd_curve,
    "trajectories": cmd_trajectories,
    "fluct": cmd_fluct,
    "validate": cmd_validate,
}


def parse_args(args: Sequence[str]) -> argparse.Namespace:
    """
    Parse command line parameters.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML experiment configuration")
    common.add_argument("--seed", type=int, help="base seed of the runs")
    common.add_argument("--out-dir", type=Path, help="directory for the outputs")
    common.add_argument("--replicas", type=int, help="number of runs per estimate")
    common.add_argument("--parallelism", type=int, help="number of worker processes")
    common.add_argument(
        "--full",
        action="store_true",
        help="full-size protocol (1000 sweep pairs, curve until t=10000)",
    )
    common.add_argument(
        "-v",
        "--verbose",
        dest="loglevel",
        help="set loglevel to INFO",
        action="store_const",
        const=logging.INFO,
    )
    common.add_argument(
        "-vv",
        "--very-verbose",
        dest="loglevel",
        help="set loglevel to DEBUG",
        action="store_const",
        const=logging.DEBUG,
    )

    parser = argparse.ArgumentParser(
        prog="birthfront",
        description="Front speed experiments for lattice birth processes",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        subparsers.add_parser(
            name,
            parents=[common],
            help=(command.__doc__ or "").strip().splitlines()[0],
        )
    return parser.parse_args(args)


def setup_logging(loglevel: Optional[int]) -> None:
    """
    Setup basic logging.
    """
    logformat = "[%(asctime)s] %(levelname)s:%(name)s:%(message)s"
    logging.basicConfig(
        level=loglevel or logging.WARNING,
        stream=sys.stderr,
        format=logformat,
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def main(args: Optional[Sequence[str]] = None) -> int:
    """
    Run an experiment, returning the exit code.
    """
    namespace = parse_args(sys.argv[1:] if args is None else args)
    setup_logging(namespace.loglevel)

    try:
        config = apply_overrides(
            load_config(namespace.config),
            seed=namespace.seed,
            out_dir=namespace.out_dir,
            replicas=namespace.replicas,
            parallelism=namespace.parallelism,
            full=namespace.full,
        )
    except (ProgrammingError, InterfaceError) as ex:
        print(f"Invalid configuration: {ex}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    _logger.info("Running %s with output in %s", namespace.command, config.out_dir)
    try:
        return COMMANDS[namespace.command](config)
    except (ProgrammingError, InterfaceError) as ex:
        print(f"Invalid configuration: {ex}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except Error as ex:
        print(f"{ex.__class__.__name__}: {ex}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
