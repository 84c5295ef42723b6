"""
Tests for birthfront.models.scaled.
"""
import pytest

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import singleton_origin
from birthfront.models.branching import FreeBranchingModel
from birthfront.models.scaled import ScaledRateModel


def test_scaled(branching: FreeBranchingModel) -> None:
    """
    Test scaling a model.
    """
    model = ScaledRateModel(branching, 2.5)
    assert model.range_ == branching.range_
    assert model.cap == branching.cap
    assert model.interaction_range == branching.interaction_range
    assert model.rate(1, singleton_origin(1)) == 2.5
    assert model.mirrored().rate(-1, singleton_origin(1)) == 2.5
    assert model.describe() == f"2.5 * {branching.describe()}"


def test_scaled_invalid(branching: FreeBranchingModel) -> None:
    """
    The factor must be positive, and scaled models can't be configured.
    """
    with pytest.raises(ProgrammingError) as excinfo:
        ScaledRateModel(branching, 0)
    assert str(excinfo.value) == "Scale factor must be positive, got 0"

    with pytest.raises(ProgrammingError) as excinfo:
        ScaledRateModel.from_config({})
    assert str(excinfo.value) == "Scaled models are built programmatically"
