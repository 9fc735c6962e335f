"""Exception types shared across the package."""


class StoryScoreError(Exception):
    """Base class for every error this package raises deliberately."""


class LoadError(StoryScoreError):
    """A document, outline, or manifest could not be loaded."""


class MissingFileError(LoadError):
    pass


class EmptyDocumentError(LoadError):
    pass


class EncodingError(LoadError):
    pass


class ManifestError(LoadError):
    pass


class ConfigError(StoryScoreError):
    """Invalid configuration (weights, patterns, backend selection...)."""


class MetricError(StoryScoreError):
    """A metric's preconditions were violated (empty paper, no lines...)."""


class ComponentError(StoryScoreError):
    """A component failed during full-story evaluation; names the component."""

    def __init__(self, component: str, cause: Exception):
        super().__init__(f"{component}: {cause}")
        self.component = component


class BackendError(StoryScoreError):
    """An embedding backend failed or is unavailable."""


class RecognizerError(StoryScoreError):
    """An entity recognizer failed or is unavailable."""


class ClientError(StoryScoreError):
    """A text-generation client failed."""


class TransportError(ClientError):
    pass


class ClientTimeoutError(ClientError):
    pass


class VerdictError(StoryScoreError):
    """The judge response could not be turned into a verdict."""


class VerdictParseError(VerdictError):
    pass


class VerdictSchemaError(VerdictError):
    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field
