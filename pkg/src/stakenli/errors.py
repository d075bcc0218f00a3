"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: input problems exit 2,
provider failures exit 3, scorer transport failures exit 4.
"""


class StakenliError(Exception):
    """Base class for all package errors."""


class InputError(StakenliError):
    """Bad user input: unreadable files, malformed records, invalid config."""


class RegistryError(InputError):
    """Label registry cannot be loaded or violates its invariants."""


class DatasetError(InputError):
    """Corpus / labeled / NLI file cannot be parsed or validated."""


class TemplateError(InputError):
    """Prompt template missing a placeholder or duplicated placeholders."""


class ConfigError(InputError):
    """PipelineConfig field outside its allowed bounds."""


class ProviderError(StakenliError):
    """An entity recognizer, coreference resolver, or knowledge source failed."""

    def __init__(self, message, provider=None):
        super().__init__(message)
        self.provider = provider


class NetworkError(ProviderError):
    """Remote lookup failed; safe to retry."""

    retryable = True


class TransportError(StakenliError):
    """Sidecar scorer unreachable after bounded retries."""


class ProtocolError(TransportError):
    """Sidecar answered with a malformed or misaligned response."""
