"""
A rate model given by a lookup table of neighborhood patterns.
"""
import logging
from typing import Any, Dict, Mapping, Optional, Tuple

from birthfront.exceptions import ProgrammingError
from birthfront.lattice import Configuration
from birthfront.models.base import RateModel
from birthfront.typing import Site

_logger = logging.getLogger(__name__)

Pattern = Tuple[int, ...]


def parse_pattern(key: Any) -> Pattern:
    """
    Parse a pattern written as ``"0 1 2"`` or as a list of integers.
    """
    if isinstance(key, str):
        try:
            return tuple(int(token) for token in key.split())
        except ValueError as ex:
            raise ProgrammingError(f"Invalid pattern: {key!r}") from ex
    return tuple(int(value) for value in key)


class TableRateModel(RateModel):

    """
    Rates looked up by the occupancies around the site.

    The key is the pattern ``(eta(x - R), ..., eta(x + R))``. Patterns not in
    the table get ``default_rate`` when some site of the pattern is occupied
    and 0 otherwise. In a config file::

        model:
          name: table
          cap: 1
          range: 1
          default_rate: 1.0
          table:
            "1 0 0": 0.5
            "0 0 1": 2.0

    """

    def __init__(
        self,
        range_: int,
        cap: int,
        table: Mapping[Pattern, float],
        default_rate: float = 1.0,
        interaction_range: Optional[int] = None,
    ):
        super().__init__(range_, cap, interaction_range)

        if default_rate < 0:
            raise ProgrammingError("The default rate must be nonnegative")

        width = 2 * range_ + 1
        self.table: Dict[Pattern, float] = {}
        for pattern, value in table.items():
            if len(pattern) != width:
                raise ProgrammingError(
                    f"Pattern {pattern} should have {width} sites",
                )
            if any(not 0 <= count <= cap for count in pattern):
                raise ProgrammingError(f"Pattern {pattern} exceeds the cap {cap}")
            if value < 0:
                raise ProgrammingError(f"Negative rate for pattern {pattern}")
            self.table[pattern] = float(value)
        self.default_rate = float(default_rate)

        _logger.debug("Loaded %d patterns", len(self.table))

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "TableRateModel":
        table = {
            parse_pattern(key): float(value)
            for key, value in (spec.get("table") or {}).items()
        }
        return cls(
            range_=int(spec.get("range", 1)),
            cap=int(spec.get("cap", 1)),
            table=table,
            default_rate=float(spec.get("default_rate", 1.0)),
            interaction_range=spec.get("interaction_range"),
        )

    def rate(self, site: Site, config: Configuration) -> float:
        if config[site] >= config.cap:
            return 0.0

        pattern = tuple(
            config[site + offset] for offset in range(-self.range_, self.range_ + 1)
        )
        if pattern in self.table:
            return self.table[pattern]
        return self.default_rate if any(pattern) else 0.0

    def mirrored(self) -> "TableRateModel":
        return TableRateModel(
            self.range_,
            self.cap,
            {pattern[::-1]: value for pattern, value in self.table.items()},
            self.default_rate,
            self.interaction_range,
        )

    def describe(self) -> str:
        return (
            f"table(range={self.range_}, cap={self.cap}, "
            f"patterns={len(self.table)}, default_rate={self.default_rate!r})"
        )
