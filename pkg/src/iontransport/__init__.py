"""Single-ion transport in segmented Paul-trap electrode arrays."""

__version__ = "0.1.0"
