"""Exception hierarchy. Each error carries the module it was raised from."""


class StreamPredictError(Exception):
    """Base class for all package errors."""

    module = "streampredict"

    def __init__(self, message, module=None):
        if module is not None:
            self.module = module
        super().__init__(message)

    def __str__(self):
        return f"[{self.module}] {super().__str__()}"


class ParseError(StreamPredictError, ValueError):
    """Malformed input file (link stream, node list, predictions)."""

    module = "stream"

    def __init__(self, message, lineno=None, module=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message, module)


class ConfigError(StreamPredictError, ValueError):
    """Invalid configuration or invalid argument combination."""

    module = "config"


class DegenerateIndexError(StreamPredictError, ValueError):
    """The prediction index sums to zero while a positive budget must be allocated."""

    module = "predictor"


class PipelineError(StreamPredictError):
    """A pipeline step could not run with the data at hand."""

    module = "pipeline"
