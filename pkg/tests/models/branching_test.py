"""
Tests for birthfront.models.branching.
"""
import math

import numpy as np
import pytest

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import Configuration, mirror, singleton_origin
from birthfront.models.branching import (
    STANDARD_DISPERSAL,
    FecEstModel,
    FecEstParams,
    FreeBranchingModel,
    as_kernel,
    crowding,
    fec_est_rate,
    free_branching_rate,
    standard_params,
)
from birthfront.models.checks import check_conditions, sample_configuration
from birthfront.models.kernels import Kernel


def test_as_kernel() -> None:
    """
    Kernels can be given as literals or sequences.
    """
    kernel = Kernel((0.5, 1.0, 0.5))
    assert as_kernel(kernel) is kernel
    assert as_kernel("0.5 1 0.5") == kernel
    assert as_kernel([0.5, 1, 0.5]) == kernel


def test_crowding() -> None:
    """
    Test the weighted count of neighbors.
    """
    config = Configuration([1, 2, 3], origin_offset=-1, cap=3)
    kernel = Kernel((0.5, 1.0, 0.5))
    assert crowding(kernel, 0, config) == 0.5 * 1 + 2 + 0.5 * 3
    assert crowding(kernel, 2, config) == 0.5 * 3
    assert crowding(kernel, 5, config) == 0


def test_free_branching_rate() -> None:
    """
    The rate is the number of particles within reach.
    """
    dispersal = Kernel.indicator(1)
    config = Configuration([1, 1, 0, 1], origin_offset=0, cap=1)
    assert free_branching_rate(dispersal, 0, config) == 0
    assert free_branching_rate(dispersal, 2, config) == 2
    assert free_branching_rate(dispersal, -1, config) == 1
    assert free_branching_rate(dispersal, 4, config) == 1
    assert free_branching_rate(dispersal, 6, config) == 0


def test_free_branching_model() -> None:
    """
    Test the free branching model.
    """
    model = FreeBranchingModel(STANDARD_DISPERSAL)
    assert model.range_ == 3
    assert model.cap == 3
    assert model.interaction_range == 3
    assert model.rate(1, singleton_origin(3)) == 1.0
    assert model(-3, singleton_origin(3)) == 1.0
    assert model.rate(4, singleton_origin(3)) == 0.0
    assert model.describe() == (
        "free_branching(cap=3, dispersal=[1.0 1.0 1.0 1.0 1.0 1.0 1.0], "
        "interaction_range=3)"
    )

    with pytest.raises(ProgrammingError) as excinfo:
        FreeBranchingModel(Kernel((1.0,)))
    assert str(excinfo.value) == "The dispersal kernel must reach other sites"


def test_free_branching_from_config() -> None:
    """
    Test building free branching from a config section.
    """
    model = FreeBranchingModel.from_config({"dispersal": "1 1 1", "cap": 1})
    assert model.range_ == 1
    assert model.cap == 1
    assert model.rate(1, singleton_origin(1)) == 1.0


def test_fec_est_rate() -> None:
    """
    Test the regulated rate at the standard parameters.
    """
    params = standard_params(c_fec=0.5, c_est=0.5)
    config = singleton_origin(3)

    # the only parent is at the origin, with crowding 1 from itself
    expected = math.exp(-0.5) * math.exp(-0.5 * 0.5)
    assert fec_est_rate(params, 1, config) == pytest.approx(expected)

    # establishment at the origin sees the parent with weight 1
    expected = math.exp(-0.5) * math.exp(-0.5)
    assert fec_est_rate(params, 0, config) == pytest.approx(expected)

    # further away there's no establishment competition
    assert fec_est_rate(params, 3, config) == pytest.approx(math.exp(-0.5))
    assert fec_est_rate(params, 4, config) == 0


def test_fec_est_reduces_to_free_branching() -> None:
    """
    Without regulation the model is free branching.
    """
    model = FecEstModel(standard_params(c_fec=0, c_est=0))
    free = FreeBranchingModel(STANDARD_DISPERSAL)
    rng = np.random.default_rng(42)
    for _ in range(200):
        config = sample_configuration(rng, 3, -6, 6)
        site = int(rng.integers(-10, 11))
        assert model.rate(site, config) == free.rate(site, config)


def test_fec_est_is_monotone() -> None:
    """
    Rates decrease when either regulation constant increases.
    """
    rng = np.random.default_rng(0)
    for _ in range(200):
        config = sample_configuration(rng, 3, -6, 6)
        site = int(rng.integers(-9, 10))
        c_fec, c_est = rng.random(2)
        base = fec_est_rate(standard_params(c_fec, c_est), site, config)
        assert fec_est_rate(standard_params(c_fec + 0.1, c_est), site, config) <= base
        assert fec_est_rate(standard_params(c_fec, c_est + 0.1), site, config) <= base


def test_fec_est_model() -> None:
    """
    Test the declared ranges of the regulated model.
    """
    model = FecEstModel(standard_params(c_fec=0.5, c_est=0.5))
    assert model.range_ == 3
    assert model.cap == 3
    assert model.interaction_range == 4

    # without fecundity regulation parents don't look at their neighbors
    model = FecEstModel(standard_params(c_fec=0, c_est=0.5))
    assert model.interaction_range == 3

    model = FecEstModel(standard_params(c_fec=0.5, c_est=0.5), interaction_range=3)
    assert model.interaction_range == 3


def test_fec_est_wide_regulation() -> None:
    """
    Regulation kernels may reach further than dispersal.
    """
    params = FecEstParams(
        dispersal=Kernel.indicator(1),
        establishment_shape=Kernel.indicator(3),
        c_est=1.0,
    )
    model = FecEstModel(params)
    assert model.range_ == 1
    assert model.interaction_range == 3

    assert model.rate(1, Configuration((1,), 0, 3)) == pytest.approx(math.exp(-1))
    config = Configuration((1, 0, 0, 0, 1), 0, 3)
    assert model.rate(1, config) == pytest.approx(math.exp(-2))

    report = check_conditions(model, 200, seed=4)
    assert report.ok


def test_fec_est_invalid() -> None:
    """
    Regulation constants must be nonnegative.
    """
    with pytest.raises(ProgrammingError) as excinfo:
        standard_params(c_fec=-1, c_est=0)
    assert str(excinfo.value) == "Regulation constants must be nonnegative"


def test_fec_est_from_config() -> None:
    """
    Test building the regulated model from a config section.
    """
    model = FecEstModel.from_config({"c_fec": 0.25, "c_est": "0.75"})
    assert model.params.c_fec == 0.25
    assert model.params.c_est == 0.75
    assert model.params.dispersal == STANDARD_DISPERSAL
    assert model.describe() == (
        "fec_est(cap=3, dispersal=[1.0 1.0 1.0 1.0 1.0 1.0 1.0], "
        "c_fec=0.25, c_est=0.75, interaction_range=4)"
    )

    other = model.with_constants(c_fec=1.0, c_est=0.0)
    assert other.params.c_fec == 1.0
    assert other.params.c_est == 0.0
    assert other.cap == 3


def test_mirrored() -> None:
    """
    The mirrored model acts on mirrored configurations.
    """
    params = FecEstParams(
        dispersal=Kernel((0.0, 1.0, 2.0)),
        establishment_shape=Kernel((0.0, 1.0, 0.5)),
        fecundity_shape=Kernel((1.0, 1.0, 0.0)),
        c_est=0.3,
        c_fec=0.7,
    )
    model = FecEstModel(params, cap=2)
    mirrored = model.mirrored()

    rng = np.random.default_rng(1)
    for _ in range(200):
        config = sample_configuration(rng, 2, -4, 4)
        site = int(rng.integers(-6, 7))
        assert mirrored.rate(-site, mirror(config)) == pytest.approx(
            model.rate(site, config),
        )

    free = FreeBranchingModel(Kernel((0.0, 1.0, 2.0)), cap=2)
    config = singleton_origin(2)
    assert free.rate(1, config) == 2.0
    assert free.mirrored().rate(-1, mirror(config)) == 2.0
