"""Figure regeneration for horizonbattery CSV outputs."""

__version__ = "0.1.0"

from .render import (
    SCHEMAS,
    EmptyDataError,
    FigureSpec,
    SchemaError,
    build_figure,
    load_table,
    render,
)

__all__ = [
    "SCHEMAS",
    "EmptyDataError",
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "load_table",
    "render",
]
