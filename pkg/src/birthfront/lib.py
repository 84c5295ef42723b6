"""Helper functions for birthfront."""
import csv
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np

from birthfront.exceptions import DataError, ProgrammingError

_logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SCHEMA_PREFIX = "# schema: birthfront."


def run_seed(base_seed: int, index: int) -> int:
    """
    Derive the seed of run ``index`` from a base seed.

    The seed is the first 64-bit word of the numpy ``SeedSequence`` with
    entropy ``base_seed`` and spawn key ``(index,)``, which is the child
    ``SeedSequence(base_seed).spawn(...)[index]`` would produce. Runs with
    different indices get statistically independent streams, and the seed of
    a run doesn't depend on how many runs there are::

        >>> run_seed(2022, 0) == run_seed(2022, 0)
        True
        >>> run_seed(2022, 0) != run_seed(2022, 1)
        True

    """
    if base_seed < 0 or index < 0:
        raise ProgrammingError("Seeds and run indices must be nonnegative")

    sequence = np.random.SeedSequence(base_seed, spawn_key=(index,))
    return int(sequence.generate_state(1, np.uint64)[0])


def run_seeds(base_seed: int, n_runs: int) -> List[int]:
    """
    Return the seeds of runs ``0, ..., n_runs - 1``.
    """
    return [run_seed(base_seed, index) for index in range(n_runs)]


def make_rng(seed: int) -> np.random.Generator:
    """
    Return the generator used by a simulation run (PCG64).
    """
    return np.random.Generator(np.random.PCG64(seed))


def mean_and_error(values: Sequence[float]) -> Tuple[float, float]:
    """
    Return the sample mean and its standard error.

    A single value has a standard error of 0.
    """
    if not values:
        raise DataError("Cannot average an empty sample")

    array = np.asarray(values, dtype=float)
    mean = float(array.mean())
    if len(array) < 2:
        return mean, 0.0
    return mean, float(array.std(ddof=1) / math.sqrt(len(array)))


def z_score(
    first: Tuple[float, float],
    second: Tuple[float, float],
) -> float:
    """
    Two-sample z-score of ``second - first`` given ``(mean, std_error)`` pairs.
    """
    error = math.hypot(first[1], second[1])
    difference = second[0] - first[0]
    if error == 0:
        return math.copysign(math.inf, difference) if difference else 0.0
    return difference / error


def write_csv(
    path: Union[str, Path],
    kind: str,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    """
    Write a CSV file preceded by a schema tag line.

    The tag line looks like ``# schema: birthfront.trajectory.v1``. Floats are
    written with ``repr``, so identical runs produce identical files.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as csvfile:
        csvfile.write(f"{SCHEMA_PREFIX}{kind}.v{SCHEMA_VERSION}\n")
        writer = csv.writer(csvfile)
        writer.writerow(header)
        writer.writerows(rows)

    _logger.info("Wrote %s", path)
    return path


def read_csv(path: Union[str, Path]) -> Tuple[str, List[str], List[List[str]]]:
    """
    Read a file written by ``write_csv``.

    Returns the schema kind, the header and the rows as strings.
    """
    with open(path, encoding="utf-8", newline="") as csvfile:
        tag = csvfile.readline().strip()
        if not tag.startswith(SCHEMA_PREFIX):
            raise DataError(f"Missing schema tag in {path}")
        kind, _, version = tag[len(SCHEMA_PREFIX) :].rpartition(".v")
        if version != str(SCHEMA_VERSION):
            raise DataError(f"Unsupported schema version {version} in {path}")

        reader = csv.reader(csvfile)
        header = next(reader, None)
        if header is None:
            raise DataError(f"Missing header in {path}")
        return kind, header, list(reader)
