"""
Finite-range kernels on the integers.
"""
import math
from dataclasses import dataclass, field
from typing import Iterator, Tuple

from birthfront.exceptions import ProgrammingError
from birthfront.typing import Weights


@dataclass(frozen=True)
class Kernel:

    """
    A nonnegative kernel stored as a dense symmetric window.

    ``weights[i]`` is the value at offset ``i - radius``, so a kernel with
    weights ``(0.5, 1, 0.5)`` has radius 1 and puts weight 1 on the origin::

        >>> kernel = Kernel((0.5, 1.0, 0.5))
        >>> kernel(0), kernel(-1), kernel(2)
        (1.0, 0.5, 0.0)

    """

    weights: Tuple[float, ...]
    _support: Tuple[Tuple[int, float], ...] = field(
        init=False,
        repr=False,
        compare=False,
    )

    def __post_init__(self) -> None:
        if len(self.weights) % 2 != 1:
            raise ProgrammingError(
                f"A kernel needs an odd number of weights, got {len(self.weights)}",
            )
        for weight in self.weights:
            if not math.isfinite(weight) or weight < 0:
                raise ProgrammingError(f"Invalid kernel weight: {weight}")

        # non-zero weights, precomputed for the inner loops
        object.__setattr__(
            self,
            "_support",
            tuple(
                (offset, weight)
                for offset, weight in zip(self.offsets, self.weights)
                if weight > 0
            ),
        )

    @classmethod
    def from_weights(cls, weights: Weights) -> "Kernel":
        """
        Build a kernel from any sequence of numbers.
        """
        return cls(tuple(float(weight) for weight in weights))

    @classmethod
    def parse(cls, literal: str) -> "Kernel":
        """
        Parse a kernel literal, a space-separated list of weights::

            >>> Kernel.parse("1 1 1").radius
            1

        """
        try:
            weights = [float(token) for token in literal.split()]
        except ValueError as ex:
            raise ProgrammingError(f"Invalid kernel literal: {literal!r}") from ex
        if not weights:
            raise ProgrammingError("A kernel literal needs at least one weight")
        return cls.from_weights(weights)

    @classmethod
    def indicator(cls, radius: int) -> "Kernel":
        """
        The kernel ``1{|x| <= radius}``.
        """
        return cls((1.0,) * (2 * radius + 1))

    @classmethod
    def zero(cls) -> "Kernel":
        """The kernel that vanishes everywhere."""
        return cls((0.0,))

    @property
    def radius(self) -> int:
        """Declared radius of the window."""
        return (len(self.weights) - 1) // 2

    @property
    def offsets(self) -> range:
        """Offsets covered by the window."""
        return range(-self.radius, self.radius + 1)

    @property
    def support_radius(self) -> int:
        """
        Largest ``|offset|`` with a positive weight, 0 for the zero kernel.
        """
        return max((abs(offset) for offset, _ in self), default=0)

    @property
    def total(self) -> float:
        """Sum of all weights."""
        return math.fsum(self.weights)

    def __call__(self, offset: int) -> float:
        if -self.radius <= offset <= self.radius:
            return self.weights[offset + self.radius]
        return 0.0

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        """
        Iterate over ``(offset, weight)`` pairs with positive weight.
        """
        return iter(self._support)

    def scaled(self, factor: float) -> "Kernel":
        """
        Return the kernel multiplied by a nonnegative constant.
        """
        return Kernel(tuple(factor * weight for weight in self.weights))

    def reversed(self) -> "Kernel":
        """
        Return the kernel ``x -> k(-x)``.
        """
        return Kernel(tuple(reversed(self.weights)))

    def format(self) -> str:
        """
        Format the kernel as a literal understood by ``parse``.
        """
        return " ".join(repr(weight) for weight in self.weights)
