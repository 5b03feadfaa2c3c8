"""Exception types shared across the package."""


class HesuiteError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(HesuiteError):
    """Parameter or key generation failed (search/resample bound exceeded)."""


class RangeError(HesuiteError, ValueError):
    """A numeric argument is outside its legal interval."""


class MalformedCiphertext(HesuiteError):
    """Decryption precondition violated: wrong key or tampered ciphertext."""


class DomainError(HesuiteError):
    """A ciphertext carries the wrong key-domain tag for the operation."""


class UnknownId(HesuiteError):
    """A ciphertext id does not resolve in the store."""


class AccessDenied(HesuiteError):
    """The requester is not on the access server's allowlist."""


class RequestError(HesuiteError, ValueError):
    """A compute request is structurally malformed."""


class SerializationError(HesuiteError):
    """Encoding or decoding of an entity failed.

    ``offset`` carries the byte offset of a parse error when one is known.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class SessionError(HesuiteError):
    """A protocol session failed; ``hop`` names the role where it failed."""

    def __init__(self, hop: str, cause: Exception):
        super().__init__(f"session failed at {hop}: {cause}")
        self.hop = hop
        self.__cause__ = cause
