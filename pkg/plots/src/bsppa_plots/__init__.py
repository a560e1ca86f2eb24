"""Convergence figures from bsppa trace CSVs."""

from .render import BadFigureSpec, envelope, load_spec, render_convergence
from .traces import EmptyTrace, SchemaMismatch, read_trace

__version__ = "0.1.0"
