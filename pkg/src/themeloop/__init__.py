"""themeloop: iterative crowd-in-the-loop generation of reading themes."""

__version__ = "0.1.0"
