"""anssim-backend: local inference sidecar for the answer-similarity toolkit."""

from .models import (
    DEFAULT_MODELS,
    LoadedModel,
    ModelKind,
    ModelSpec,
    RequestError,
    load_roster,
    parse_config,
    synthetic_roster_config,
)
from .server import make_server

__version__ = "0.1.0"
