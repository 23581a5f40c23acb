"""Exact toolkit for positive-semidefinite kernels, weak closures and finite inverse systems."""

__version__ = "0.1.0"

from .errors import DeskError, InputError  # noqa: E402
from .kernel import FormalVector, Kernel, Point, check_psd, inner, project, rank  # noqa: E402

__all__ = ["DeskError", "InputError", "FormalVector", "Kernel", "Point", "check_psd", "inner", "project", "rank"]
