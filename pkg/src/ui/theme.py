"""
Sketchboost chart and dashboard tokens.

One color per sketch strategy so every view draws a strategy the same way.
"""

from dataclasses import dataclass
from typing import NamedTuple


# -----------------------------------------------------------------------------
# Color Tokens
# -----------------------------------------------------------------------------

class ColorBase(NamedTuple):
    """Text and grid colors."""
    ink: str = "#2A2A2A"
    muted: str = "#7A858F"
    grid: str = "#E8E4DC"


class ColorSurface(NamedTuple):
    background: str = "#FFFFFF"
    panel: str = "#F3EFE6"


class ColorStrategy(NamedTuple):
    """Line colors keyed by SketchStrategy value."""
    none: str = "#2F4A3E"
    top_outputs: str = "#6A5E4B"
    random_sampling: str = "#B46A3C"
    random_projection: str = "#3C6EB4"
    truncated_svd: str = "#7A4BA0"


class ColorSeries(NamedTuple):
    train: str = "#556B57"
    valid: str = "#B46A3C"
    bound_ok: str = "#556B57"
    bound_violated: str = "#B4303C"


class FontChart(NamedTuple):
    family: str = "DM Sans, -apple-system, BlinkMacSystemFont, sans-serif"
    size: int = 13


# -----------------------------------------------------------------------------
# Aggregated Theme
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Theme:
    color_base: ColorBase = ColorBase()
    color_surface: ColorSurface = ColorSurface()
    color_strategy: ColorStrategy = ColorStrategy()
    color_series: ColorSeries = ColorSeries()
    font_chart: FontChart = FontChart()

    def strategy_color(self, strategy: str) -> str:
        return getattr(self.color_strategy, strategy, self.color_base.muted)


# Singleton for app-wide use
theme = Theme()
