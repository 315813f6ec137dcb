"""Errors raised by estimation and data-handling routines."""


class ConstantFeatureError(ValueError):
    """A data column has zero empirical variance and cannot be scaled."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} has zero variance")


class IllConditionedCovarianceError(ValueError):
    """The sample covariance has an eigenvalue below the whitening floor."""

    def __init__(self, eigenvalue: float, floor: float):
        self.eigenvalue = eigenvalue
        self.floor = floor
        super().__init__(
            f"smallest covariance eigenvalue {eigenvalue:.6e} is below {floor:.6e}"
        )


class SingularSystemError(ValueError):
    """A regularized linear system is numerically singular."""


class RankDeficiencyError(ValueError):
    """A matrix expected to have full column rank does not."""


class DegenerateDirectionError(ValueError):
    """A fixed-point update produced a direction with vanishing norm."""


class DegenerateSignalError(ValueError):
    """An index vector has no usable scale and must be discarded."""


class NoSurvivorsError(RuntimeError):
    """Thresholding removed every candidate index vector."""

    def __init__(self, threshold: float, best: float):
        self.threshold = threshold
        self.best = best
        super().__init__(
            f"no index vector reached threshold {threshold} (best norm {best:.4f})"
        )


class LibsvmFormatError(ValueError):
    """A line of sparse label/index:value text could not be parsed."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {reason}")
