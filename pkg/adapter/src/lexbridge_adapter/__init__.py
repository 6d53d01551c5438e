"""lexbridge-adapter: neural embedding export and pair-scoring service
speaking the lexbridge file and wire formats."""

__version__ = "0.1.0"


class ModelLoadFailure(Exception):
    """A neural model could not be loaded."""
