"""Exception types shared across the toolkit."""


class AnssimError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AnssimError):
    """Invalid or inconsistent run configuration."""


class LengthMismatch(AnssimError):
    """Paired series have different lengths."""


class DimensionMismatch(AnssimError):
    """Vectors have incompatible dimensions."""


class ZeroVector(AnssimError):
    """Cosine similarity requested for an all-zero vector."""


class MissingSpan(AnssimError):
    """A span-based metric received an answer without character offsets."""


class ContextMismatch(AnssimError):
    """Compared spans refer to different contexts."""


class EmptyReferences(AnssimError):
    """max_over_references received an empty reference list."""


class UnsupportedLanguage(AnssimError):
    """Metric is not defined for the requested language profile."""


class EmptyCorpus(AnssimError):
    """IDF table requested for an empty corpus."""


class BackendError(AnssimError):
    """Model backend request failed.

    Carries enough request context to reproduce the failing call.
    """

    def __init__(self, message, *, endpoint=None, model=None, status=None):
        detail = message
        context = ", ".join(
            f"{k}={v}"
            for k, v in (("endpoint", endpoint), ("model", model), ("status", status))
            if v is not None
        )
        if context:
            detail = f"{message} ({context})"
        super().__init__(detail)
        self.endpoint = endpoint
        self.model = model
        self.status = status


class UnknownModel(BackendError):
    """Requested model alias is not in the backend roster."""


class LayerOutOfRange(BackendError):
    """Requested layer index is outside [0, num_layers]."""


class UnknownPairId(AnssimError):
    """Annotation row references a pair id that does not exist."""


class MissingTieBreaker(AnssimError):
    """Annotators disagree and no tie-breaker label is available."""


class MissingScores(AnssimError):
    """Correlation requested for pairs lacking a metric score."""


class MissingLabels(AnssimError):
    """Correlation requested for pairs lacking a majority label."""


class EmptyTokenizationWarning(UserWarning):
    """A text tokenized to zero tokens; the affected score was set to 0."""
