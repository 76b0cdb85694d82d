"""Exception hierarchy shared by every lzkit module."""


class LZKitError(Exception):
    """Base class for all lzkit errors."""


class InputError(LZKitError, ValueError):
    """A precondition on the arguments does not hold."""


class EmptySequenceError(InputError):
    pass


class AlphabetMismatchError(InputError):
    pass


class LengthMismatchError(InputError):
    pass


class DecodeError(InputError):
    """A compressed stream is malformed."""


class TruncatedPayloadError(DecodeError):
    pass


class PhraseIdError(DecodeError):
    pass


class TrailingDataError(DecodeError):
    pass


class KeyExhaustedError(LZKitError):
    pass


class GuardrailError(LZKitError):
    """A desk-scale resource limit would be exceeded."""

    def __init__(self, message: str, limit: int, requested: int):
        super().__init__(f"{message} (requested {requested}, limit {limit})")
        self.limit = limit
        self.requested = requested
