"""
Tests for birthfront.models.table.
"""
import pytest

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import Configuration, mirror, singleton_origin
from birthfront.models.table import TableRateModel, parse_pattern


def test_parse_pattern() -> None:
    """
    Patterns can be strings or sequences.
    """
    assert parse_pattern("0 1 2") == (0, 1, 2)
    assert parse_pattern([1, 0, 0]) == (1, 0, 0)

    with pytest.raises(ProgrammingError) as excinfo:
        parse_pattern("0 x 2")
    assert str(excinfo.value) == "Invalid pattern: '0 x 2'"


def test_table_rate() -> None:
    """
    Test looking up rates.
    """
    model = TableRateModel(
        range_=1,
        cap=1,
        table={(1, 0, 0): 0.5, (0, 0, 1): 2.0},
    )
    config = singleton_origin(1)
    assert model.rate(1, config) == 0.5
    assert model.rate(-1, config) == 2.0
    assert model.rate(0, config) == 0.0
    assert model.rate(2, config) == 0.0

    # patterns not in the table get the default rate
    config = Configuration([1, 0, 1], origin_offset=-1, cap=1)
    assert model.rate(0, config) == 1.0


def test_table_invalid() -> None:
    """
    Patterns must have the right width and respect the cap.
    """
    with pytest.raises(ProgrammingError) as excinfo:
        TableRateModel(range_=1, cap=1, table={(1, 0): 1.0})
    assert str(excinfo.value) == "Pattern (1, 0) should have 3 sites"

    with pytest.raises(ProgrammingError) as excinfo:
        TableRateModel(range_=1, cap=1, table={(2, 0, 0): 1.0})
    assert str(excinfo.value) == "Pattern (2, 0, 0) exceeds the cap 1"

    with pytest.raises(ProgrammingError) as excinfo:
        TableRateModel(range_=1, cap=1, table={(1, 0, 0): -1.0})
    assert str(excinfo.value) == "Negative rate for pattern (1, 0, 0)"

    with pytest.raises(ProgrammingError) as excinfo:
        TableRateModel(range_=1, cap=1, table={}, default_rate=-1)
    assert str(excinfo.value) == "The default rate must be nonnegative"


def test_table_from_config() -> None:
    """
    Test building a table model from a config section.
    """
    model = TableRateModel.from_config(
        {
            "name": "table",
            "range": 1,
            "cap": 2,
            "default_rate": 0.25,
            "table": {"1 0 0": 3, "0 0 2": 1.5},
        },
    )
    assert model.range_ == 1
    assert model.cap == 2
    assert model.table == {(1, 0, 0): 3.0, (0, 0, 2): 1.5}
    assert model.describe() == "table(range=1, cap=2, patterns=2, default_rate=0.25)"

    config = Configuration([2], origin_offset=0, cap=2)
    assert model.rate(-1, config) == 1.5
    assert model.rate(1, config) == 0.25


def test_table_mirrored() -> None:
    """
    The mirrored model reverses the patterns.
    """
    model = TableRateModel(range_=1, cap=1, table={(1, 0, 0): 0.5})
    mirrored = model.mirrored()
    assert mirrored.table == {(0, 0, 1): 0.5}

    config = singleton_origin(1)
    assert mirrored.rate(-1, mirror(config)) == model.rate(1, config)
