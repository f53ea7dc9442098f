"""Exception hierarchy shared by the library and the CLI."""


class AdaptiveRBFError(Exception):
    """Base class for all package errors."""


class DegenerateMixingError(AdaptiveRBFError, ValueError):
    """Both raw mixing weights are (numerically) zero."""


class DivergenceError(AdaptiveRBFError, ArithmeticError):
    """A training quantity became non-finite.

    Parameters
    ----------
    quantity : str
        Name of the offending quantity (``"y"``, ``"error"``, ``"weights"``...).
    epoch, sample : int, optional
        Location in the training run, filled in by the epoch loop.
    """

    def __init__(self, quantity, epoch=None, sample=None):
        self.quantity = quantity
        self.epoch = epoch
        self.sample = sample
        where = []
        if epoch is not None:
            where.append(f"epoch {epoch}")
        if sample is not None:
            where.append(f"sample {sample}")
        msg = f"training diverged: non-finite {quantity}"
        if where:
            msg += " at " + ", ".join(where)
        super().__init__(msg)


class DataError(AdaptiveRBFError, ValueError):
    """Malformed or missing input data."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)


class ConfigError(AdaptiveRBFError, ValueError):
    """Invalid experiment configuration."""
