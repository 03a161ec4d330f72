"""Figure emission for benchmark record CSVs."""

from .render import (
    COORDS_COLUMNS,
    EXPECTED_COLUMNS,
    IDENTITY_GID,
    LOG_FLOOR,
    PlotError,
    PlotSpec,
    RenderResult,
    render_scatter,
)

__version__ = "0.1.0"

__all__ = [
    "COORDS_COLUMNS",
    "EXPECTED_COLUMNS",
    "IDENTITY_GID",
    "LOG_FLOOR",
    "PlotError",
    "PlotSpec",
    "RenderResult",
    "render_scatter",
]
