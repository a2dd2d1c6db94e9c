"""Random-witness reactive synthesis over linear arithmetic contracts."""

__version__ = "0.1.0"
