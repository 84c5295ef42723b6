"""
Tests for birthfront.lib.
"""
import math

import numpy as np
import pytest
from pyfakefs.fake_filesystem import FakeFilesystem

from birthfront.exceptions import DataError, ProgrammingError
from birthfront.lib import (
    make_rng,
    mean_and_error,
    read_csv,
    run_seed,
    run_seeds,
    write_csv,
    z_score,
)


def test_run_seed() -> None:
    """
    Seeds depend only on the base seed and the run index.
    """
    assert run_seed(2022, 3) == run_seed(2022, 3)
    assert run_seed(2022, 3) != run_seed(2022, 4)
    assert run_seed(2022, 3) != run_seed(2023, 3)
    assert run_seeds(2022, 5)[3] == run_seed(2022, 3)
    assert len(set(run_seeds(2022, 100))) == 100

    child = np.random.SeedSequence(2022).spawn(4)[3]
    assert run_seed(2022, 3) == int(child.generate_state(1, np.uint64)[0])

    with pytest.raises(ProgrammingError) as excinfo:
        run_seed(-1, 0)
    assert str(excinfo.value) == "Seeds and run indices must be nonnegative"


def test_make_rng() -> None:
    """
    Generators with the same seed produce the same stream.
    """
    first = make_rng(42)
    second = make_rng(42)
    assert first.random(5).tolist() == second.random(5).tolist()
    assert isinstance(first.bit_generator, np.random.PCG64)


def test_mean_and_error() -> None:
    """
    Test the sample mean and its standard error.
    """
    mean, error = mean_and_error([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert error == pytest.approx(1 / math.sqrt(3))

    assert mean_and_error([5.0]) == (5.0, 0.0)

    with pytest.raises(DataError) as excinfo:
        mean_and_error([])
    assert str(excinfo.value) == "Cannot average an empty sample"


def test_z_score() -> None:
    """
    Test two-sample z-scores.
    """
    assert z_score((1.0, 0.3), (2.0, 0.4)) == pytest.approx(2.0)
    assert z_score((2.0, 0.3), (1.0, 0.4)) == pytest.approx(-2.0)
    assert z_score((1.0, 0.0), (1.0, 0.0)) == 0.0
    assert z_score((1.0, 0.0), (2.0, 0.0)) == math.inf


def test_csv(fs: FakeFilesystem) -> None:
    """
    Test writing and reading tagged CSV files.
    """
    write_csv("/results/speeds.csv", "curve", ["c_est", "speed"], [(0.1, 1.5)])
    with open("/results/speeds.csv", encoding="utf-8") as csvfile:
        assert csvfile.read() == (
            "# schema: birthfront.curve.v1\nc_est,speed\n0.1,1.5\n"
        )

    kind, header, rows = read_csv("/results/speeds.csv")
    assert kind == "curve"
    assert header == ["c_est", "speed"]
    assert rows == [["0.1", "1.5"]]


def test_read_csv_invalid(fs: FakeFilesystem) -> None:
    """
    Files need a tag line with a known version, and a header.
    """
    fs.create_file("/untagged.csv", contents="a,b\n1,2\n")
    with pytest.raises(DataError) as excinfo:
        read_csv("/untagged.csv")
    assert str(excinfo.value) == "Missing schema tag in /untagged.csv"

    fs.create_file("/future.csv", contents="# schema: birthfront.curve.v9\na,b\n")
    with pytest.raises(DataError) as excinfo:
        read_csv("/future.csv")
    assert str(excinfo.value) == "Unsupported schema version 9 in /future.csv"

    fs.create_file("/empty.csv", contents="# schema: birthfront.curve.v1\n")
    with pytest.raises(DataError) as excinfo:
        read_csv("/empty.csv")
    assert str(excinfo.value) == "Missing header in /empty.csv"
