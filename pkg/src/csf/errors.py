"""Exception hierarchy. Every error carries a stable machine-parsable code."""

from __future__ import annotations


class CsfError(Exception):
    code = "CSF_ERROR"


class FormatError(CsfError):
    """A file did not parse under its declared format."""

    code = "CSF_FORMAT"


class CorpusError(CsfError):
    code = "CSF_CORPUS"


class SplitError(CsfError):
    code = "CSF_SPLIT"


class StatsError(CsfError):
    code = "CSF_STATS"


class LangidError(CsfError):
    code = "CSF_LANGID"


class TranslitError(CsfError):
    code = "CSF_TRANSLIT"

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class ProviderError(CsfError):
    code = "CSF_PROVIDER"

    def __init__(self, message: str, failed_indices: list[int] | None = None):
        super().__init__(message)
        self.failed_indices = failed_indices or []


class AuthError(ProviderError):
    code = "CSF_AUTH"


class CacheError(CsfError):
    code = "CSF_CACHE"


class PipelineError(CsfError):
    code = "CSF_PIPELINE"


class ModelError(CsfError):
    code = "CSF_MODEL"


class EvalError(CsfError):
    code = "CSF_EVAL"


class ConfigError(CsfError):
    code = "CSF_CONFIG"
