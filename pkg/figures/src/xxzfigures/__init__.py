"""Figure rendering for xxzqubits CSV outputs."""

__version__ = "0.1.0"

from .render import KINDS, FigureSpec, RenderResult, render

__all__ = ["KINDS", "FigureSpec", "RenderResult", "render"]
