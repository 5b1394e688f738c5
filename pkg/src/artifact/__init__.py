"""Rule discovery for categorical and mixed data, with block based
parallel-coordinates visualization and an HTTP service for interactive use."""

__version__ = "0.1.0"
