"""
Branching birth rates, with and without crowding regulation.

The regulated rate damps births in dense regions in two ways::

    b(x, eta) = exp(-sum_u phi(u - x) eta(u))
                * sum_y a(x - y) eta(y) exp(-sum_v psi(v - y) eta(v))

The first factor is the establishment of the offspring at ``x``, reduced
when ``x`` is crowded; the sum runs over parents ``y`` dispersing to ``x``
with kernel ``a``, each with a fecundity reduced by the crowding around
``y``. The establishment kernel ``phi`` is scaled by ``c_est`` and the
fecundity kernel ``psi`` by ``c_fec``. Some write-ups of this model use the
same letter for both kernels; we follow the names of the two mechanisms.

With ``c_est = c_fec = 0`` the rate reduces to free branching,
``b(x, eta) = sum_y a(x - y) eta(y)``.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import Configuration
from birthfront.models.base import RateModel
from birthfront.models.kernels import Kernel
from birthfront.typing import Site, Weights

# shape of both regulation kernels in the standard experiments
STANDARD_SHAPE = Kernel((0.5, 1.0, 0.5))
STANDARD_DISPERSAL = Kernel.indicator(3)
STANDARD_CAP = 3


def as_kernel(value: Union[Kernel, str, Weights]) -> Kernel:
    """
    Build a kernel from a literal, a list of weights, or a kernel.
    """
    if isinstance(value, Kernel):
        return value
    if isinstance(value, str):
        return Kernel.parse(value)
    return Kernel.from_weights(value)


@dataclass(frozen=True)
class FecEstParams:

    """
    Parameters of the regulated branching rate.
    """

    dispersal: Kernel
    establishment_shape: Kernel = STANDARD_SHAPE
    fecundity_shape: Kernel = STANDARD_SHAPE
    c_est: float = 0.0
    c_fec: float = 0.0

    def __post_init__(self) -> None:
        if self.dispersal.total <= 0:
            raise ProgrammingError("The dispersal kernel must have positive mass")
        if self.c_est < 0 or self.c_fec < 0:
            raise ProgrammingError("Regulation constants must be nonnegative")

    @property
    def phi(self) -> Kernel:
        """The establishment kernel."""
        return self.establishment_shape.scaled(self.c_est)

    @property
    def psi(self) -> Kernel:
        """The fecundity kernel."""
        return self.fecundity_shape.scaled(self.c_fec)

    def reversed(self) -> "FecEstParams":
        """
        Parameters of the model on the reflected lattice.
        """
        return FecEstParams(
            self.dispersal.reversed(),
            self.establishment_shape.reversed(),
            self.fecundity_shape.reversed(),
            self.c_est,
            self.c_fec,
        )


def standard_params(c_fec: float, c_est: float) -> FecEstParams:
    """
    The regulated model used in the speed experiments.

    Dispersal is uniform on ``|x| <= 3`` and both regulation kernels have the
    shape ``1{x = 0} + 1/2 1{|x| = 1}``.
    """
    return FecEstParams(
        dispersal=STANDARD_DISPERSAL,
        establishment_shape=STANDARD_SHAPE,
        fecundity_shape=STANDARD_SHAPE,
        c_est=c_est,
        c_fec=c_fec,
    )


def crowding(kernel: Kernel, center: Site, config: Configuration) -> float:
    """
    Return ``sum_v kernel(v - center) eta(v)``.
    """
    total = 0.0
    for offset, weight in kernel:
        count = config[center + offset]
        if count:
            total += weight * count
    return total


def free_branching_rate(
    dispersal: Kernel,
    site: Site,
    config: Configuration,
) -> float:
    """
    Return ``sum_y a(x - y) eta(y)``, or 0 if the site is saturated.
    """
    if config[site] >= config.cap:
        return 0.0

    total = 0.0
    for offset, weight in dispersal:
        count = config[site - offset]
        if count:
            total += weight * count
    return total


def fec_est_rate(params: FecEstParams, site: Site, config: Configuration) -> float:
    """
    Return the regulated branching rate, or 0 if the site is saturated.
    """
    return _regulated_rate(params.dispersal, params.phi, params.psi, site, config)


def _regulated_rate(
    dispersal: Kernel,
    phi: Kernel,
    psi: Kernel,
    site: Site,
    config: Configuration,
) -> float:
    if config[site] >= config.cap:
        return 0.0

    total = 0.0
    for offset, weight in dispersal:
        parent = site - offset
        count = config[parent]
        if count:
            total += weight * count * math.exp(-crowding(psi, parent, config))
    if total == 0.0:
        return 0.0

    return math.exp(-crowding(phi, site, config)) * total


class FecEstModel(RateModel):

    """
    Branching with regulation via fecundity and establishment.

    The reach ``R`` is the support radius of the dispersal kernel; the
    regulation kernels may be wider. The rate at ``x`` looks at parents
    within ``R`` and at their neighbors within the radius of ``psi``, so the
    interaction range is
    ``max(radius(phi), R + radius(psi))``.
    """

    def __init__(
        self,
        params: FecEstParams,
        cap: int = STANDARD_CAP,
        interaction_range: Optional[int] = None,
    ):
        range_ = params.dispersal.support_radius
        if range_ < 1:
            raise ProgrammingError("The dispersal kernel must reach other sites")

        derived = max(params.phi.support_radius, range_ + params.psi.support_radius)
        super().__init__(
            range_,
            cap,
            derived if interaction_range is None else interaction_range,
        )

        self.params = params
        self._dispersal = params.dispersal
        self._phi = params.phi
        self._psi = params.psi

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "FecEstModel":
        params = FecEstParams(
            dispersal=as_kernel(spec.get("dispersal", STANDARD_DISPERSAL)),
            establishment_shape=as_kernel(
                spec.get("establishment_shape", STANDARD_SHAPE),
            ),
            fecundity_shape=as_kernel(spec.get("fecundity_shape", STANDARD_SHAPE)),
            c_est=float(spec.get("c_est", 0.0)),
            c_fec=float(spec.get("c_fec", 0.0)),
        )
        return cls(
            params,
            cap=int(spec.get("cap", STANDARD_CAP)),
            interaction_range=spec.get("interaction_range"),
        )

    def rate(self, site: Site, config: Configuration) -> float:
        return _regulated_rate(self._dispersal, self._phi, self._psi, site, config)

    def mirrored(self) -> "FecEstModel":
        return FecEstModel(self.params.reversed(), self.cap, self.interaction_range)

    def with_constants(self, c_fec: float, c_est: float) -> "FecEstModel":
        """
        Return the same model with different regulation constants.
        """
        params = FecEstParams(
            self.params.dispersal,
            self.params.establishment_shape,
            self.params.fecundity_shape,
            c_est=c_est,
            c_fec=c_fec,
        )
        return FecEstModel(params, self.cap)

    def describe(self) -> str:
        return (
            f"fec_est(cap={self.cap}, dispersal=[{self._dispersal.format()}], "
            f"c_fec={self.params.c_fec!r}, c_est={self.params.c_est!r}, "
            f"interaction_range={self.interaction_range})"
        )


class FreeBranchingModel(RateModel):

    """
    Free branching: every particle gives birth at ``x`` with rate ``a(x - y)``.
    """

    def __init__(
        self,
        dispersal: Kernel,
        cap: int = STANDARD_CAP,
        interaction_range: Optional[int] = None,
    ):
        range_ = dispersal.support_radius
        if range_ < 1:
            raise ProgrammingError("The dispersal kernel must reach other sites")
        if dispersal.total <= 0:
            raise ProgrammingError("The dispersal kernel must have positive mass")

        super().__init__(range_, cap, interaction_range)
        self.dispersal = dispersal

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "FreeBranchingModel":
        return cls(
            as_kernel(spec.get("dispersal", STANDARD_DISPERSAL)),
            cap=int(spec.get("cap", STANDARD_CAP)),
            interaction_range=spec.get("interaction_range"),
        )

    def rate(self, site: Site, config: Configuration) -> float:
        return free_branching_rate(self.dispersal, site, config)

    def mirrored(self) -> "FreeBranchingModel":
        return FreeBranchingModel(
            self.dispersal.reversed(),
            self.cap,
            self.interaction_range,
        )

    def describe(self) -> str:
        return (
            f"free_branching(cap={self.cap}, dispersal=[{self.dispersal.format()}], "
            f"interaction_range={self.interaction_range})"
        )
