"""Exception hierarchy shared across the pipeline."""


class LexbridgeError(Exception):
    """Base class for all pipeline errors."""


# --- JLS parsing ---

class MalformedXml(LexbridgeError):
    """Input is not well-formed XML."""


class MissingRoot(LexbridgeError):
    """No Law element found in the input."""


class EmptyBody(LexbridgeError):
    """Law contains no Article anywhere."""


# --- AKN conversion ---

class UnmappedKind(LexbridgeError):
    """A node kind has no mapping rule."""


class InvalidIdentity(LexbridgeError):
    """FRBR identity inputs are missing or ill-formed."""


class ValidationFailed(LexbridgeError):
    """A document failed structural validation where a clean one was required."""


# --- corpus ---

class NoSuchLevel(LexbridgeError):
    """Document has no elements at the requested extraction level."""


class DuplicateId(LexbridgeError):
    """Two records share a provision_id."""


class IoFailure(LexbridgeError):
    """An artifact could not be read or written."""


# --- embeddings ---

class EmptyText(LexbridgeError):
    """Cannot embed an empty text."""


class DimMismatch(LexbridgeError):
    """Vector dimensions disagree."""


class BadNorm(LexbridgeError):
    """Vector norm deviates too far from 1 to be trusted."""


class UnknownProvision(LexbridgeError):
    """A provision_id cannot be resolved against the bound corpus."""


class HeaderCountMismatch(LexbridgeError):
    """Vector file header count disagrees with the number of records."""


# --- retrieval ---

class EmptyIndex(LexbridgeError):
    """Cannot build an index over zero records."""


# --- reranking ---

class ServiceUnreachable(LexbridgeError):
    """The remote scoring endpoint could not be reached."""


class ServiceBadResponse(LexbridgeError):
    """The remote scoring endpoint returned an unusable response."""


class MissingText(LexbridgeError):
    """A pair text could not be resolved from the corpus."""


# --- graph ---

class MissingRule(LexbridgeError):
    """A link country has no edge rule."""


# --- pipeline ---

class ConfigInvalid(LexbridgeError):
    """Pipeline configuration failed validation."""


class StageInputMissing(LexbridgeError):
    """A required input of a pipeline stage does not exist yet."""
