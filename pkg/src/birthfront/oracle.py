"""
Exact transient laws of the birth process on a finite window.

The process is restricted to the sites ``[-L, L]``: sites outside are empty
and never receive births, so the state space is ``{0, ..., N}^(2L + 1)``.
Occupancy vectors are encoded in base ``N + 1``, with site ``-L`` as the
least significant digit.

Transient laws are computed by uniformization: with ``Lambda`` the largest
exit rate and ``P = I + Q / Lambda``,

    p_t = sum_k Poisson(k; Lambda t) p_0 P^k,

where the sum is truncated once the Poisson tail is below the tolerance.
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy import sparse
from scipy.stats import poisson

from birthfront.exceptions import BudgetExceededError, ProgrammingError
from birthfront.lattice import Configuration, tip
from birthfront.models.base import RateModel
from birthfront.models.checks import compute_bounds
from birthfront.typing import Site

_logger = logging.getLogger(__name__)

DEFAULT_STATE_BUDGET = 2 * 10**6

# Poisson tails are cut at most at this mass, so laws sum to 1 within 1e-12
MAX_TAIL = 1e-14

# warn when the truncated and infinite processes may differ more than this
ESCAPE_THRESHOLD = 1e-6


class TruncatedChain:  # pylint: disable=too-many-instance-attributes

    """
    The birth process on ``[-L, L]`` as a finite Markov chain.
    """

    def __init__(
        self,
        model: RateModel,
        half_width: int,
        budget: int = DEFAULT_STATE_BUDGET,
    ):
        if half_width < 0:
            raise ProgrammingError("The half width must be nonnegative")

        base = model.cap + 1
        width = 2 * half_width + 1
        size = base**width
        if size > budget:
            raise BudgetExceededError(
                f"{size} states exceed the budget of {budget}",
            )
        if half_width < model.range_:
            _logger.warning(
                "Half width %d is smaller than the range %d",
                half_width,
                model.range_,
            )

        self.model = model
        self.half_width = half_width
        self.cap = model.cap
        self.base = base
        self.size = size
        self.sites = range(-half_width, half_width + 1)

        indices = np.arange(size)
        self.occupancy = np.stack(
            [(indices // base**digit) % base for digit in range(width)],
            axis=1,
        )
        self.mass = self.occupancy.sum(axis=1)

        occupied = self.occupancy > 0
        nonempty = occupied.any(axis=1)
        # -1 marks the empty state
        self.tips = np.where(
            nonempty,
            width - 1 - np.argmax(occupied[:, ::-1], axis=1) - half_width,
            -1,
        )
        self.leftmosts = np.where(
            nonempty,
            np.argmax(occupied, axis=1) - half_width,
            -1,
        )
        self.nonempty = nonempty

        self.generator = self._build_generator()
        self.exit_rates = -self.generator.diagonal()

        _logger.info(
            "Built chain on [%d, %d] with %d states and %d transitions",
            -half_width,
            half_width,
            size,
            self.generator.nnz - size,
        )

    def _build_generator(self) -> sparse.csr_matrix:
        rows, cols, values = [], [], []
        exits = np.zeros(self.size)
        for state in range(self.size):
            config = self.configuration(state)
            for digit, site in enumerate(self.sites):
                if config[site] >= self.cap:
                    continue
                rate = self.model.rate(site, config)
                if rate > 0:
                    rows.append(state)
                    cols.append(state + self.base**digit)
                    values.append(rate)
                    exits[state] += rate

        rows.extend(range(self.size))
        cols.extend(range(self.size))
        values.extend(-exits)
        return sparse.csr_matrix(
            (values, (rows, cols)),
            shape=(self.size, self.size),
        )

    def configuration(self, state: int) -> Configuration:
        """
        Return the configuration encoded by a state index.
        """
        return Configuration(
            (int(value) for value in self.occupancy[state]),
            -self.half_width,
            self.cap,
        )

    def index_of(self, config: Configuration) -> int:
        """
        Return the state index of a configuration inside the window.
        """
        if config.cap != self.cap:
            raise ProgrammingError("The configuration has a different cap")

        state = 0
        for site, value in config:
            if value and not -self.half_width <= site <= self.half_width:
                raise ProgrammingError(f"Site {site} is outside of the window")
            if value:
                state += value * self.base ** (site + self.half_width)
        return state


def build_truncation(
    model: RateModel,
    half_width: int,
    budget: int = DEFAULT_STATE_BUDGET,
) -> TruncatedChain:
    """
    Build the chain of ``model`` restricted to ``[-half_width, half_width]``.
    """
    return TruncatedChain(model, half_width, budget)


@dataclass
class OracleResult:

    """
    The law of the truncated process at a given time.
    """

    time: float
    distribution: np.ndarray
    chain: TruncatedChain
    truncation: int = 0

    @property
    def mean_occupancy(self) -> Dict[Site, float]:
        """``E[eta_t(x)]`` for every site in the window."""
        means = self.distribution @ self.chain.occupancy
        return {site: float(mean) for site, mean in zip(self.chain.sites, means)}

    @property
    def tip_law(self) -> Dict[Site, float]:
        """The law of ``X_t`` on the nonempty states."""
        law = np.bincount(
            self.chain.tips[self.chain.nonempty] + self.chain.half_width,
            weights=self.distribution[self.chain.nonempty],
            minlength=len(self.chain.sites),
        )
        return {site: float(mass) for site, mass in zip(self.chain.sites, law)}

    @property
    def mean_tip(self) -> float:
        """``E[X_t]``, over the nonempty states."""
        nonempty = self.chain.nonempty
        return float(self.distribution[nonempty] @ self.chain.tips[nonempty])

    @property
    def mean_leftmost(self) -> float:
        """``E[Y_t]``, over the nonempty states."""
        nonempty = self.chain.nonempty
        return float(self.distribution[nonempty] @ self.chain.leftmosts[nonempty])

    @property
    def mean_mass(self) -> float:
        """Expected number of particles."""
        return float(self.distribution @ self.chain.mass)


def _initial_distribution(
    chain: TruncatedChain,
    initial: Union[int, Configuration, np.ndarray],
) -> np.ndarray:
    if isinstance(initial, Configuration):
        initial = chain.index_of(initial)
    if isinstance(initial, (int, np.integer)):
        if not 0 <= initial < chain.size:
            raise ProgrammingError(f"Invalid state index {initial}")
        distribution = np.zeros(chain.size)
        distribution[initial] = 1.0
        return distribution

    distribution = np.asarray(initial, dtype=float)
    if distribution.shape != (chain.size,):
        raise ProgrammingError("The initial distribution has the wrong shape")
    return distribution


def poisson_truncation(mean: float, tol: float) -> int:
    """
    Smallest ``K`` with ``P(Poisson(mean) > K) <= tol``.
    """
    if mean == 0:
        return 0

    depth = max(0, int(poisson.isf(tol, mean)))
    while poisson.sf(depth, mean) > tol:
        depth += 1
    return depth


def transient(
    chain: TruncatedChain,
    initial: Union[int, Configuration, np.ndarray],
    t: float,
    tol: float = 1e-12,
) -> OracleResult:
    """
    Compute the law at time ``t`` by uniformization.

    ``initial`` is a state index, a configuration inside the window or a
    distribution over the states. The Poisson sum is truncated once the
    neglected mass is below ``tol`` (and never above 1e-14).
    """
    if tol <= 0:
        raise ProgrammingError("The tolerance must be positive")
    if t < 0:
        raise ProgrammingError("Time must be nonnegative")

    distribution = _initial_distribution(chain, initial)
    uniform_rate = float(chain.exit_rates.max(initial=0.0))
    if t == 0 or uniform_rate == 0:
        return OracleResult(t, distribution.copy(), chain)

    mean = uniform_rate * t
    depth = poisson_truncation(mean, min(tol, MAX_TAIL))
    weights = poisson.pmf(np.arange(depth + 1), mean)

    # transpose, since laws are row vectors
    jump = (
        sparse.identity(chain.size, format="csr") + chain.generator / uniform_rate
    ).T.tocsr()

    result = weights[0] * distribution
    vector = distribution
    for weight in weights[1:]:
        vector = jump @ vector
        result += weight * vector

    _logger.debug(
        "Uniformization at t=%r with rate %r and %d terms",
        t,
        uniform_rate,
        depth + 1,
    )
    return OracleResult(t, result, chain, truncation=depth)


def boundary_escape_bound(
    chain: TruncatedChain,
    initial: Union[int, Configuration],
    t: float,
    upper_rate: Optional[float] = None,
) -> float:
    """
    Bound the probability that the front comes within ``R`` of the boundary.

    Until then the truncated and the infinite process coincide. Before that
    happens at most ``2L + 1`` sites can give birth, each with a rate at most
    ``upper_rate`` (computed with ``compute_bounds`` when not given), and
    every birth moves the support by at most ``R``; so the number of births
    needed to reach the boundary must be exceeded by a Poisson variable with
    mean ``upper_rate (2L + 1) t``.
    """
    if isinstance(initial, int):
        initial = chain.configuration(initial)
    if upper_rate is None:
        upper_rate = compute_bounds(chain.model).upper

    range_ = chain.model.range_
    limit = chain.half_width - range_ + 1
    mean = upper_rate * len(chain.sites) * t

    bound = 0.0
    for distance in (limit - tip(initial), limit + initial.bounds[0]):
        needed = math.ceil(max(distance, 0) / range_)
        bound += 1.0 if needed == 0 else float(poisson.sf(needed - 1, mean))
    bound = min(bound, 1.0)

    if bound > ESCAPE_THRESHOLD:
        _logger.warning(
            "The front may reach the boundary by t=%r (probability <= %.3g); "
            "the truncated law differs from the infinite process",
            t,
            bound,
        )
    return bound


def write_golden(
    result: OracleResult,
    path: Union[str, Path],
    metadata: Dict[str, Any],
) -> Path:
    """
    Write a law as CSV, ``state_index,probability``.

    The first line is a comment with the metadata as JSON.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {**metadata, "t": result.time, "L": result.chain.half_width}
    with open(path, "w", encoding="utf-8") as output:
        output.write(f"# {json.dumps(header, sort_keys=True)}\n")
        output.write("state_index,probability\n")
        for state, probability in enumerate(result.distribution):
            output.write(f"{state},{float(probability)!r}\n")

    _logger.info("Wrote golden file %s", path)
    return path


def read_golden(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a golden file, returning the metadata and the probabilities.
    """
    with open(path, encoding="utf-8") as golden:
        metadata = json.loads(golden.readline()[1:])
        golden.readline()
        probabilities = [float(line.split(",")[1]) for line in golden if line.strip()]
    return {"metadata": metadata, "probabilities": np.array(probabilities)}
