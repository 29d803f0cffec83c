"""Recoverable qubit coherence under steering, with an environment in the way."""

__version__ = "0.1.0"

from .errors import SteerCohError  # noqa: E402,F401
