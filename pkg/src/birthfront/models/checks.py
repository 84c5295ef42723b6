"""
Randomized and exhaustive checks of rate models.

A rate model is admissible when it satisfies four conditions:

1. Translation invariance, ``b(x + y, eta shifted by y) = b(x, eta)``.
2. Locality, the rate at ``x`` only depends on ``eta`` within the
   interaction range of ``x``.
3. Non-degeneracy, ``b(x, eta) > 0`` iff some occupied site is within ``R`` of
   ``x``, for unsaturated sites.
4. The cap rule, ``b(x, eta) = 0`` when ``eta(x) = N``.

Rates are also required to be finite and nonnegative. ``check_conditions``
tests all of these on random configurations; ``compute_bounds`` enumerates
neighborhoods to find the extreme rates.
"""
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from birthfront.exceptions import BudgetExceededError, ProgrammingError
from birthfront.lattice import Configuration, format_snapshot, shift
from birthfront.models.base import RateModel
from birthfront.typing import Site

_logger = logging.getLogger(__name__)

# how far translations reach in the invariance check
MAX_TRANSLATION = 1000

DEFAULT_BUDGET = 10**8


@dataclass
class Violation:

    """
    A configuration where a model breaks one of the conditions.
    """

    condition: str
    site: Site
    snapshot: str
    detail: str


@dataclass
class ConditionReport:

    """
    Result of ``check_conditions``.

    ``violations`` keeps a limited number of examples per condition, while
    ``counts`` has the total number of failures.
    """

    model: str
    trials: int
    violations: List[Violation] = field(default_factory=list)
    totals: Counter = field(default_factory=Counter)

    @property
    def ok(self) -> bool:
        """True if no violation was found."""
        return not self.totals

    def counts(self) -> Dict[str, int]:
        """
        Number of violations per condition.
        """
        return dict(self.totals)


@dataclass(frozen=True)
class RateBounds:

    """
    The largest and the smallest positive birth rates of a model.
    """

    upper: float
    lower: float


def sample_configuration(
    rng: np.random.Generator,
    cap: int,
    lo: Site,
    hi: Site,
    density: Optional[float] = None,
) -> Configuration:
    """
    Sample a random configuration supported in ``[lo, hi]``.

    Each site is occupied with probability ``density`` (drawn uniformly when
    not given), with an occupancy uniform in ``{1, ..., cap}``. Sparse and
    saturated regions both show up regularly.
    """
    if hi < lo:
        raise ProgrammingError(f"Invalid window [{lo}, {hi}]")

    width = hi - lo + 1
    if density is None:
        density = float(rng.random())
    occupied = rng.random(width) < density
    values = rng.integers(1, cap + 1, size=width) * occupied
    return Configuration((int(value) for value in values), lo, cap)


def _perturb_outside(
    rng: np.random.Generator,
    config: Configuration,
    site: Site,
    radius: int,
    margin: int,
) -> Configuration:
    """
    Keep ``config`` within ``radius`` of ``site`` and randomize a band of
    ``margin`` sites on both sides of it.
    """
    lo, hi = site - radius - margin, site + radius + margin
    outside = sample_configuration(rng, config.cap, lo, hi)
    cells = [
        config[x] if abs(x - site) <= radius else outside[x] for x in range(lo, hi + 1)
    ]
    return Configuration(cells, lo, config.cap)


def check_conditions(  # pylint: disable=too-many-locals
    model: RateModel,
    trials: int,
    seed: int,
    max_examples: int = 20,
) -> ConditionReport:
    """
    Test the model conditions on ``trials`` random configurations.

    Configurations live in a window of width ``4r + 1`` around the origin,
    where ``r`` is the larger of the reach and the interaction range, and the
    tested site is drawn from a slightly larger window so that sites away
    from the support are also covered. Locality is tested by randomizing
    everything beyond the declared interaction range, so a model that
    understates it is caught. Rates must be reproduced exactly by the
    translation and locality checks.
    """
    if trials < 1:
        raise ProgrammingError("At least one trial is needed")

    rng = np.random.default_rng(seed)
    cap, range_ = model.cap, model.range_
    interaction_range = model.interaction_range
    reach = max(range_, interaction_range)
    report = ConditionReport(model.describe(), trials)

    def fail(condition: str, site: Site, config: Configuration, detail: str):
        report.totals[condition] += 1
        if report.totals[condition] <= max_examples:
            report.violations.append(
                Violation(condition, site, format_snapshot(config), detail),
            )
            _logger.debug("%s violated at %d: %s", condition, site, detail)

    for _ in range(trials):
        config = sample_configuration(rng, cap, -2 * reach, 2 * reach)
        site = int(rng.integers(-2 * reach - range_, 2 * reach + range_ + 1))
        rate = model.rate(site, config)

        if not math.isfinite(rate) or rate < 0:
            fail("nonnegativity", site, config, f"rate {rate!r}")
            continue

        if config[site] >= cap:
            if rate != 0:
                fail("cap", site, config, f"saturated site has rate {rate!r}")
        else:
            near = any(config[y] for y in range(site - range_, site + range_ + 1))
            if near != (rate > 0):
                fail(
                    "non_degeneracy",
                    site,
                    config,
                    f"rate {rate!r} with occupied neighbor: {near}",
                )

        offset = int(rng.integers(-MAX_TRANSLATION, MAX_TRANSLATION + 1))
        shifted = model.rate(site + offset, shift(config, offset))
        if shifted != rate:
            fail(
                "translation_invariance",
                site,
                config,
                f"shift {offset} gives {shifted!r} instead of {rate!r}",
            )

        perturbed = _perturb_outside(rng, config, site, interaction_range, reach)
        local = model.rate(site, perturbed)
        if local != rate:
            fail(
                "locality",
                site,
                config,
                f"{format_snapshot(perturbed)} gives {local!r} instead of {rate!r}",
            )

    if report.ok:
        _logger.info("%s passed %d trials", report.model, trials)
    else:
        _logger.info("%s has violations: %s", report.model, report.counts())

    return report


def _neighborhoods(cap: int, radius: int):
    for cells in itertools.product(range(cap + 1), repeat=2 * radius + 1):
        yield Configuration(cells, -radius, cap)


def compute_bounds(model: RateModel, budget: int = DEFAULT_BUDGET) -> RateBounds:
    """
    Compute the extreme rates by exhaustive enumeration.

    The upper bound is the largest rate at the origin over configurations
    supported within ``R`` of it. The lower bound is the smallest positive
    rate at an unsaturated origin with an occupied site within ``R``; by
    locality it is enough to enumerate configurations within the interaction
    range of the origin.
    """
    cap, range_ = model.cap, model.range_
    radius = max(range_, model.interaction_range)
    upper_count = (cap + 1) ** (2 * range_ + 1)
    lower_count = (cap + 1) ** (2 * radius + 1)
    if upper_count + lower_count > budget:
        raise BudgetExceededError(
            f"Enumeration infeasible: {upper_count + lower_count} evaluations "
            f"exceed the budget of {budget}",
        )

    upper = max(model.rate(0, config) for config in _neighborhoods(cap, range_))

    lower = math.inf
    for config in _neighborhoods(cap, radius):
        if config[0] >= cap:
            continue
        if not any(config[y] for y in range(-range_, range_ + 1)):
            continue
        lower = min(lower, model.rate(0, config))

    if lower <= 0:
        _logger.warning("Model %s has a vanishing lower bound", model.describe())

    _logger.info("Bounds for %s: [%r, %r]", model.describe(), lower, upper)
    return RateBounds(upper=upper, lower=lower)
