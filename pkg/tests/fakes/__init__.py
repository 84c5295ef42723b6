"""
Fake objects to simplify testing.
"""
from typing import Any, Dict, Type

from birthfront.lattice import Configuration
from birthfront.models.base import RateModel
from birthfront.models.branching import free_branching_rate
from birthfront.models.kernels import Kernel
from birthfront.typing import Site


class FakeEntryPoint:  # pylint: disable=too-few-public-methods
    """
    A fake entry point for loading models.
    """

    def __init__(self, name: str, model: Type[RateModel]):
        self.name = name
        self.model = model

    def load(self) -> Type[RateModel]:
        """
        Load the model.
        """
        return self.model


class FarSightedModel(RateModel):

    """
    Nearest-neighbor branching, slowed down by a particle 5 sites to the left.

    The model declares an interaction range of 1, but its rates depend on a
    site further away.
    """

    def __init__(self, cap: int = 1):
        super().__init__(range_=1, cap=cap, interaction_range=1)
        self.dispersal = Kernel.indicator(1)

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "FarSightedModel":
        return cls(cap=int(spec.get("cap", 1)))

    def rate(self, site: Site, config: Configuration) -> float:
        rate = free_branching_rate(self.dispersal, site, config)
        return rate / 2 if config[site - 5] else rate

    def mirrored(self) -> "FarSightedModel":
        return self


class NegativeModel(RateModel):

    """
    A model with a negative rate next to every particle.
    """

    def __init__(self):
        super().__init__(range_=1, cap=1)
        self.dispersal = Kernel.indicator(1)

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "NegativeModel":
        return cls()

    def rate(self, site: Site, config: Configuration) -> float:
        return -free_branching_rate(self.dispersal, site, config)

    def mirrored(self) -> "NegativeModel":
        return self


class PositionalModel(RateModel):

    """
    Free branching that is twice as fast on positive sites.
    """

    def __init__(self):
        super().__init__(range_=1, cap=1)
        self.dispersal = Kernel.indicator(1)

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "PositionalModel":
        return cls()

    def rate(self, site: Site, config: Configuration) -> float:
        rate = free_branching_rate(self.dispersal, site, config)
        return 2 * rate if site > 0 else rate

    def mirrored(self) -> "PositionalModel":
        return self
