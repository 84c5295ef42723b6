"""
A rate model multiplied by a constant.
"""
from typing import Any, Dict

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import Configuration
from birthfront.models.base import RateModel
from birthfront.typing import Site


class ScaledRateModel(RateModel):

    """
    The rate ``factor * b(x, eta)``.

    Scaling by a positive constant preserves all the model conditions, and
    speeds up time by the same factor.
    """

    def __init__(self, model: RateModel, factor: float):
        if factor <= 0:
            raise ProgrammingError(f"Scale factor must be positive, got {factor}")

        super().__init__(model.range_, model.cap, model.interaction_range)
        self.model = model
        self.factor = factor

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "ScaledRateModel":
        raise ProgrammingError("Scaled models are built programmatically")

    def rate(self, site: Site, config: Configuration) -> float:
        return self.factor * self.model.rate(site, config)

    def mirrored(self) -> "ScaledRateModel":
        return ScaledRateModel(self.model.mirrored(), self.factor)

    def describe(self) -> str:
        return f"{self.factor!r} * {self.model.describe()}"
