"""Exception types shared across the package.

The CLI maps these onto exit codes: bad input or configuration exits 2,
runtime failures (including optimizer divergence) exit 3, and commands
whose result set is empty exit 4.
"""


class InputDataError(ValueError):
    """A file, record, or configuration value failed validation."""


class EmptyResultError(RuntimeError):
    """A command produced no output rows."""


class TrainingDivergedError(RuntimeError):
    """Loss or a gradient became non-finite during optimization."""

    def __init__(self, epoch: int, detail: str = ""):
        self.epoch = epoch
        msg = f"training diverged at epoch {epoch}"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)
