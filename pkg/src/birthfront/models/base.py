"""Base class for birth-rate models."""
from typing import Any, Dict, Optional

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import Configuration
from birthfront.typing import Site


class RateModel:

    """
    A birth rate ``b(x, eta)``.

    A rate model gives, for every site ``x`` and configuration ``eta``, the
    rate at which a particle is added at ``x``. Models declare three numbers:

    ``range_``
        The reach ``R`` of births: the rate at ``x`` is positive exactly when
        some occupied site lies within ``R`` of ``x`` (unless ``x`` is
        saturated).

    ``cap``
        The maximum number ``N`` of particles per site. The rate vanishes at
        saturated sites.

    ``interaction_range``
        The radius of the neighborhood the rate depends on. The simulator
        recomputes the rates of all sites within this radius of every birth,
        so understating it silently corrupts the dynamics;
        ``birthfront.models.checks.check_conditions`` detects that.

    New models are registered under the ``birthfront.model`` entry point, eg::

        # setup.cfg
        [options.entry_points]
        birthfront.model =
            custom = my_package.models:CustomModel

    and need to implement ``rate``, ``mirrored`` and ``from_config``.

    Models are immutable after construction and evaluation is pure, so a
    model can be shared between simulation runs and worker processes.
    """

    def __init__(
        self,
        range_: int,
        cap: int,
        interaction_range: Optional[int] = None,
    ):
        if range_ < 1:
            raise ProgrammingError(f"Range must be at least 1, got {range_}")
        if cap < 1:
            raise ProgrammingError(f"Cap must be at least 1, got {cap}")

        self.range_ = range_
        self.cap = cap
        self.interaction_range = (
            range_ if interaction_range is None else interaction_range
        )

    def __call__(self, site: Site, config: Configuration) -> float:
        return self.rate(site, config)

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "RateModel":
        """
        Build the model from the ``model:`` section of an experiment config.
        """
        raise NotImplementedError("Subclasses must implement ``from_config``")

    def rate(self, site: Site, config: Configuration) -> float:
        """
        Return the birth rate at ``site``, in events per unit time.
        """
        raise NotImplementedError("Subclasses must implement ``rate``")

    def mirrored(self) -> "RateModel":
        """
        Return the model acting on the reflected lattice.

        The leftmost particle of the original process is the tip of the
        reflected one, so this is used to study the leftward front.
        """
        raise NotImplementedError("Subclasses must implement ``mirrored``")

    def describe(self) -> str:
        """
        A one-line description stored with trajectories and reports.
        """
        return (
            f"{self.__class__.__name__}(range={self.range_}, cap={self.cap}, "
            f"interaction_range={self.interaction_range})"
        )
