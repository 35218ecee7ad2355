"""Prime-constellation laboratory."""

__version__ = "0.1.0"
