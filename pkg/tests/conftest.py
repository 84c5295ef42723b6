"""
Fixtures for birthfront.
"""
import logging
from typing import Iterator

import pytest
from pytest_mock import MockerFixture

from birthfront.models.branching import FecEstModel, FreeBranchingModel, standard_params
from birthfront.models.kernels import Kernel
from birthfront.models.registry import ModelLoader

_logger = logging.getLogger(__name__)


@pytest.fixture
def registry(mocker: MockerFixture) -> Iterator[ModelLoader]:
    """
    Create a custom model registry.
    """
    custom_registry = ModelLoader()
    mocker.patch("birthfront.models.registry.registry", new=custom_registry)
    mocker.patch("birthfront.config.registry", new=custom_registry)
    yield custom_registry


@pytest.fixture
def branching() -> FreeBranchingModel:
    """
    Free branching with ``N = R = 1``.
    """
    return FreeBranchingModel(Kernel.indicator(1), cap=1)


@pytest.fixture
def standard() -> FecEstModel:
    """
    The regulated model of the speed experiments, at ``c_fec = c_est = 0.5``.
    """
    return FecEstModel(standard_params(c_fec=0.5, c_est=0.5))
