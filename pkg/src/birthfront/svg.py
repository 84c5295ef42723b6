"""
A minimal SVG chart writer, for line and scatter plots.
"""
import logging
import math
from dataclasses import dataclass
from html import escape
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from birthfront.exceptions import ProgrammingError

_logger = logging.getLogger(__name__)

Point = Tuple[float, float]

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg version="1.1" width="{width}" height="{height}" \
viewBox="0 0 {width} {height}" xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="{width}" height="{height}" style="fill:#ffffff"/>
"""

POSTAMBLE = "</svg>\n"

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


@dataclass
class Series:
    """A named sequence of points, drawn as a polyline or as dots."""

    points: List[Point]
    label: Optional[str] = None
    color: Optional[str] = None
    scatter: bool = False


def nice_ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    """
    Round tick positions covering ``[lo, hi]``.
    """
    if hi <= lo:
        return [lo]

    raw = (hi - lo) / count
    magnitude = 10 ** math.floor(math.log10(raw))
    step = min(
        (factor * magnitude for factor in (1, 2, 5, 10) if factor * magnitude >= raw),
    )
    first = math.ceil(lo / step) * step
    ticks = []
    tick = first
    while tick <= hi + step * 1e-9:
        ticks.append(round(tick, 12))
        tick += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _label(value: float) -> str:
    return f"{value:g}"


class Chart:  # pylint: disable=too-many-instance-attributes

    """
    A chart with axes, ticks and any number of series.

    Coordinates are in data space; the chart maps them to the canvas when
    rendered::

        >>> chart = Chart(title="Tip", x_label="t", y_label="X")
        >>> chart.line([(0, 0), (1, 2)], label="run 0")
        >>> svg = chart.render()

    """

    def __init__(
        self,
        title: str = "",
        x_label: str = "",
        y_label: str = "",
        width: int = 640,
        height: int = 400,
        margin: int = 50,
    ):
        self.title = title
        self.x_label = x_label
        self.y_label = y_label
        self.width = width
        self.height = height
        self.margin = margin
        self.series: List[Series] = []

    def line(
        self,
        points: Sequence[Point],
        label: Optional[str] = None,
        color: Optional[str] = None,
    ) -> None:
        """Add a polyline."""
        self.series.append(Series([tuple(point) for point in points], label, color))

    def scatter(
        self,
        points: Sequence[Point],
        label: Optional[str] = None,
        color: Optional[str] = None,
    ) -> None:
        """Add a scatter series."""
        self.series.append(
            Series([tuple(point) for point in points], label, color, scatter=True),
        )

    def _extent(self) -> Tuple[float, float, float, float]:
        points = [point for series in self.series for point in series.points]
        if not points:
            raise ProgrammingError("The chart has no points")

        x_lo = min(x for x, _ in points)
        x_hi = max(x for x, _ in points)
        y_lo = min(y for _, y in points)
        y_hi = max(y for _, y in points)
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 1, x_hi + 1
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 1, y_hi + 1
        return x_lo, x_hi, y_lo, y_hi

    def render(self) -> str:  # pylint: disable=too-many-locals
        """
        Render the chart as an SVG document.
        """
        x_lo, x_hi, y_lo, y_hi = self._extent()
        left, right = self.margin, self.width - self.margin / 2
        top, bottom = self.margin / 2, self.height - self.margin

        def to_canvas(point: Point) -> Point:
            x, y = point
            return (
                left + (x - x_lo) / (x_hi - x_lo) * (right - left),
                bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top),
            )

        parts = [PREAMBLE.format(width=self.width, height=self.height)]
        parts.append(
            f'<polyline points="{_fmt(left)},{_fmt(top)} {_fmt(left)},{_fmt(bottom)} '
            f'{_fmt(right)},{_fmt(bottom)}" style="fill:none;stroke:#000000"/>\n',
        )

        for tick in nice_ticks(x_lo, x_hi):
            x, _ = to_canvas((tick, y_lo))
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(bottom)}" x2="{_fmt(x)}" '
                f'y2="{_fmt(bottom + 5)}" style="stroke:#000000"/>\n'
                f'<text x="{_fmt(x)}" y="{_fmt(bottom + 18)}" font-size="11" '
                f'text-anchor="middle">{_label(tick)}</text>\n',
            )
        for tick in nice_ticks(y_lo, y_hi):
            _, y = to_canvas((x_lo, tick))
            parts.append(
                f'<line x1="{_fmt(left - 5)}" y1="{_fmt(y)}" x2="{_fmt(left)}" '
                f'y2="{_fmt(y)}" style="stroke:#000000"/>\n'
                f'<text x="{_fmt(left - 8)}" y="{_fmt(y + 4)}" font-size="11" '
                f'text-anchor="end">{_label(tick)}</text>\n',
            )

        for index, series in enumerate(self.series):
            color = series.color or PALETTE[index % len(PALETTE)]
            title = f"<title>{escape(series.label)}</title>" if series.label else ""
            canvas = [to_canvas(point) for point in series.points]
            if series.scatter:
                for x, y in canvas:
                    parts.append(
                        f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" '
                        f'style="fill:{color}">{title}</circle>\n',
                    )
            else:
                coordinates = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in canvas)
                parts.append(
                    f'<polyline points="{coordinates}" '
                    f'style="fill:none;stroke:{color};stroke-width:1.2">'
                    f"{title}</polyline>\n",
                )

        middle = _fmt((top + bottom) / 2)
        parts.append(
            f'<text x="{_fmt(self.width / 2)}" y="{_fmt(top - 8)}" font-size="14" '
            f'text-anchor="middle">{escape(self.title)}</text>\n'
            f'<text x="{_fmt((left + right) / 2)}" y="{_fmt(self.height - 12)}" '
            f'font-size="12" text-anchor="middle">{escape(self.x_label)}</text>\n'
            f'<text x="14" y="{middle}" font-size="12" '
            f'text-anchor="middle" transform="rotate(-90 14 {middle})">'
            f"{escape(self.y_label)}</text>\n",
        )
        parts.append(POSTAMBLE)
        return "".join(parts)

    def save(self, path: Union[str, Path]) -> Path:
        """
        Write the chart to a file.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as output:
            output.write(self.render())

        _logger.info("Wrote %s", path)
        return path
