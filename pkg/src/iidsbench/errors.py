"""Exception types shared across the harness."""


class HarnessError(Exception):
    """Base class for every error this package raises on purpose."""


class DatasetError(HarnessError):
    """A dataset file or dataset configuration cannot be used."""


class TaxonomyError(HarnessError):
    """The attack taxonomy is malformed or internally inconsistent."""


class SplitError(HarnessError):
    """A fold plan or scenario split cannot be built from the given inputs."""


class TrainError(HarnessError):
    """Classifier training cannot proceed."""


class ConfigError(HarnessError):
    """An experiment or classifier configuration is invalid."""


class RunError(HarnessError):
    """Experiment execution, resumption, or comparison failed."""


class ReportError(HarnessError):
    """Rendering input is malformed."""
