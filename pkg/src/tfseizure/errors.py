"""Exception types raised across the package."""


class TfSeizureError(Exception):
    """Base class; ``kind`` is the short tag used in CLI error lines."""

    kind = "error"


class InputError(TfSeizureError, ValueError):
    kind = "input"


class ConfigError(TfSeizureError, ValueError):
    kind = "config"


class DatasetFileError(TfSeizureError, OSError):
    """A data file could not be parsed or is too short."""

    kind = "file"

    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {message}")


class TrainingError(TfSeizureError, ValueError):
    kind = "training"


class CsvParseError(TfSeizureError, ValueError):
    kind = "parse"
