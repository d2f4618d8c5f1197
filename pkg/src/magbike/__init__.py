"""magbike: dual-steering magnetic-wheel climbing robot toolkit."""

__version__ = "0.1.0"
