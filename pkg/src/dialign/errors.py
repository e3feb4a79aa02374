"""Exception hierarchy shared across the toolkit."""


class DialignError(Exception):
    """Base class for all toolkit errors."""


class FormatError(DialignError):
    """Input data could not be parsed in the expected format."""


class UndefinedInputError(DialignError, ValueError):
    """An operation was given input for which its result is undefined."""


class ValidationError(DialignError, ValueError):
    """A spec, config or model file failed validation."""


class SamplingError(DialignError, ValueError):
    """A sampling plan cannot be satisfied by the available data."""


class TrainingError(DialignError, ValueError):
    """A model could not be trained on the given data."""


class OOVError(DialignError, KeyError):
    """Token is not in the model vocabulary."""

    def __init__(self, token):
        super().__init__(token)
        self.token = token

    def __str__(self):
        return f"token not in vocabulary: {self.token!r}"


class AnnotationError(DialignError, ValueError):
    """A document lacks an annotation layer required by a construction."""


class RankDeficientError(DialignError, ValueError):
    """Design matrix is not of full column rank."""

    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"design matrix is rank deficient; collinear columns: {', '.join(map(str, self.columns))}")
