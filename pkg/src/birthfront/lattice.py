"""
Configurations of particles on the integer lattice.

A configuration assigns to every site ``x`` a number of particles
``eta(x)`` in ``{0, ..., N}``. Only finitely many sites are occupied, so
configurations are stored as a tight window of cells::

    >>> config = Configuration([1, 0, 2], origin_offset=-1, cap=3)
    >>> format_snapshot(config)
    '-1: 1 0 2'
    >>> tip(config), leftmost(config)
    (1, -1)

The window grows at both ends with amortized doubling, since births only
happen within a finite range of the occupied sites.
"""
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Set, Tuple

from birthfront.exceptions import EmptyConfigurationError, ProgrammingError
from birthfront.typing import Occupancy, Site, TipValues


class Configuration:

    """
    A finite-support occupancy function on the integers.

    The configuration is mutated only by the simulation run that owns it,
    through ``add_particle``. Everything else should treat it as a value and
    use the functions in this module, which return new configurations.
    """

    def __init__(
        self,
        cells: Iterable[Occupancy] = (),
        origin_offset: Site = 0,
        cap: int = 1,
    ):
        if cap < 1:
            raise ProgrammingError(f"Cap must be at least 1, got {cap}")

        values = list(cells)
        for value in values:
            if not 0 <= value <= cap:
                raise ProgrammingError(
                    f"Occupancy {value} is outside of [0, {cap}]",
                )

        # trim zeros so the window is tight
        start, end = 0, len(values)
        while start < end and values[start] == 0:
            start += 1
        while end > start and values[end - 1] == 0:
            end -= 1

        self.cap = cap
        self._buffer: List[int] = values[start:end] or [0]
        self._base = origin_offset + start
        self._mass = sum(self._buffer)
        if self._mass:
            self._lo = self._base
            self._hi = self._base + end - start - 1
        else:
            self._lo, self._hi = 0, -1

    def __getitem__(self, site: Site) -> Occupancy:
        index = site - self._base
        if 0 <= index < len(self._buffer):
            return self._buffer[index]
        return 0

    def __iter__(self) -> Iterator[Tuple[Site, Occupancy]]:
        """
        Iterate over ``(site, occupancy)`` pairs inside the window.
        """
        for site in range(self._lo, self._hi + 1):
            yield site, self[site]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented

        return (
            self.cap == other.cap
            and self.origin_offset == other.origin_offset
            and self.cells == other.cells
        )

    def __repr__(self) -> str:
        return f"Configuration({format_snapshot(self)!r}, cap={self.cap})"

    @property
    def origin_offset(self) -> Site:
        """Lattice index of the leftmost cell of the window."""
        return self._lo if self._mass else 0

    @property
    def cells(self) -> Tuple[Occupancy, ...]:
        """Occupancies inside the tight window."""
        if not self._mass:
            return ()
        start = self._lo - self._base
        return tuple(self._buffer[start : start + self._hi - self._lo + 1])

    @property
    def mass(self) -> int:
        """Total number of particles."""
        return self._mass

    @property
    def is_empty(self) -> bool:
        """True if no site is occupied."""
        return self._mass == 0

    @property
    def bounds(self) -> Tuple[Site, Site]:
        """
        Return the leftmost and rightmost occupied sites.
        """
        if not self._mass:
            raise EmptyConfigurationError("The configuration is empty")
        return self._lo, self._hi

    def copy(self) -> "Configuration":
        """
        Return an independent copy of the configuration.
        """
        return Configuration(self.cells, self.origin_offset, self.cap)

    def add_particle(self, site: Site) -> bool:
        """
        Add one particle at ``site``, in place.

        Returns false if the site is already at the cap, in which case the
        configuration is left unchanged.
        """
        if self[site] >= self.cap:
            return False

        if site < self._base:
            extra = max(len(self._buffer), self._base - site)
            self._buffer[:0] = [0] * extra
            self._base -= extra
        elif site >= self._base + len(self._buffer):
            extra = max(len(self._buffer), site - self._base - len(self._buffer) + 1)
            self._buffer.extend([0] * extra)

        self._buffer[site - self._base] += 1
        if self._mass:
            self._lo = min(self._lo, site)
            self._hi = max(self._hi, site)
        else:
            self._lo = self._hi = site
        self._mass += 1

        return True


@dataclass(frozen=True)
class SeenFromTip:

    """
    The configuration seen from its tip, down to the first saturated block.

    ``values[0]`` is the occupancy at the tip, ``values[1]`` the occupancy one
    site to the left, and so on. The sequence stops right above the first
    block of ``range_`` consecutive sites holding ``cap`` particles (in which
    case ``blocked`` is true), or at the leftmost occupied site.
    """

    values: TipValues
    cap: int
    range_: int
    blocked: bool = False

    def __post_init__(self) -> None:
        if not self.values or self.values[0] < 1:
            raise ProgrammingError("The tip site must be occupied")
        if any(not 0 <= value <= self.cap for value in self.values):
            raise ProgrammingError(f"Occupancies must be in [0, {self.cap}]")

    @property
    def mass(self) -> int:
        """Number of particles above the truncation."""
        return sum(self.values)

    def key(self) -> str:
        """
        A compact, hashable representation used in occupation reports.
        """
        suffix = "|" if self.blocked else ""
        return " ".join(str(value) for value in self.values) + suffix


def singleton_origin(cap: int) -> Configuration:
    """
    Return the configuration with a single particle at the origin.
    """
    return Configuration([1], origin_offset=0, cap=cap)


def tip(config: Configuration) -> Site:
    """
    Return the rightmost occupied site.
    """
    return config.bounds[1]


def leftmost(config: Configuration) -> Site:
    """
    Return the leftmost occupied site.
    """
    return config.bounds[0]


def occ(config: Configuration) -> Set[Site]:
    """
    Return the set of occupied sites.
    """
    return {site for site, value in config if value > 0}


def increment(config: Configuration, site: Site) -> Configuration:
    """
    Return a copy of the configuration with one more particle at ``site``.

    If the site is already at the cap the copy is identical to the original.
    """
    result = config.copy()
    result.add_particle(site)
    return result


def shift(config: Configuration, offset: int) -> Configuration:
    """
    Translate the configuration, so that the new occupancy at ``x`` is the
    old occupancy at ``x - offset``.
    """
    return Configuration(config.cells, config.origin_offset + offset, config.cap)


def mirror(config: Configuration) -> Configuration:
    """
    Reflect the configuration around the origin.
    """
    if config.is_empty:
        return Configuration(cap=config.cap)
    return Configuration(reversed(config.cells), -tip(config), config.cap)


def seen_from_tip(config: Configuration, range_: int) -> SeenFromTip:
    """
    Return the configuration seen from its tip.

    Sites are read from the tip downward. The scan stops when ``range_``
    consecutive saturated sites are found (the block itself is not included),
    or at the leftmost occupied site.
    """
    first, last = config.bounds
    cap = config.cap

    values = [config[last]]
    run = 0
    for site in range(last - 1, first - 1, -1):
        value = config[site]
        values.append(value)
        run = run + 1 if value == cap else 0
        if run == range_:
            return SeenFromTip(tuple(values[:-range_]), cap, range_, blocked=True)

    return SeenFromTip(tuple(values), cap, range_, blocked=False)


def embed(gamma: SeenFromTip) -> Configuration:
    """
    Place a seen-from-tip state on the lattice with its tip at the origin.

    When the state was truncated at a saturated block the block is restored
    right below it, so that rates near the tip are the same as in any
    configuration that maps to ``gamma``.
    """
    cells = list(reversed(gamma.values))
    if gamma.blocked:
        cells = [gamma.cap] * gamma.range_ + cells
    return Configuration(cells, origin_offset=1 - len(cells), cap=gamma.cap)


def is_origin_proxy(gamma: SeenFromTip) -> bool:
    """
    Check if the state is the origin of the seen-from-tip chain.

    The chain's origin has no particles at all, which a state with an
    occupied tip cannot represent; we use "nothing but the tip above the
    truncation" instead.
    """
    return not any(gamma.values[1:])


def format_snapshot(config: Configuration) -> str:
    """
    Serialize a configuration as ``offset: v v v``.
    """
    if config.is_empty:
        return "0:"
    cells = " ".join(str(value) for value in config.cells)
    return f"{config.origin_offset}: {cells}"


def parse_snapshot(line: str, cap: int) -> Configuration:
    """
    Parse a configuration serialized with ``format_snapshot``.
    """
    offset, separator, cells = line.strip().partition(":")
    if not separator:
        raise ProgrammingError(f"Invalid snapshot: {line!r}")

    try:
        values = [int(token) for token in cells.split()]
        origin_offset = int(offset)
    except ValueError as ex:
        raise ProgrammingError(f"Invalid snapshot: {line!r}") from ex

    return Configuration(values, origin_offset, cap)
