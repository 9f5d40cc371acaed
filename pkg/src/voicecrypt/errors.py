"""Exception hierarchy.

Every error raised for bad input data derives from :class:`VoiceCryptError`
(itself a ``ValueError``) so callers, and the command line front end, can
separate data problems from programming errors with a single ``except``.
"""


class VoiceCryptError(ValueError):
    """Base class for all data errors raised by this package."""


# passwords
class PasswordError(VoiceCryptError):
    pass


class WrongLength(PasswordError):
    pass


class MissingClass(PasswordError):
    pass


class NonPrintable(PasswordError):
    pass


# generic array contracts
class EmptyInput(VoiceCryptError):
    pass


class NonFinite(VoiceCryptError):
    pass


class LengthMismatch(VoiceCryptError):
    pass


class InvalidConfig(VoiceCryptError):
    pass


# channel
class ZeroPower(VoiceCryptError):
    pass


class NoiseTooShort(VoiceCryptError):
    pass


# pitch
class TooShort(VoiceCryptError):
    pass


class LagTooLarge(VoiceCryptError):
    pass


class PeakAtBoundary(VoiceCryptError):
    pass


# features
class EmptyTrack(VoiceCryptError):
    pass


class DegenerateFrame(VoiceCryptError):
    pass


# identification
class MethodMismatch(VoiceCryptError):
    pass


class DuplicateTemplate(VoiceCryptError):
    pass


class EmptyDatabase(VoiceCryptError):
    pass


class EmptyDataset(VoiceCryptError):
    pass


class LabelMissing(VoiceCryptError):
    pass


class IntegrityError(VoiceCryptError):
    pass


# file formats
class BadMagic(VoiceCryptError):
    pass


class UnsupportedCodec(VoiceCryptError):
    pass


class UnsupportedDepth(VoiceCryptError):
    pass


class TruncatedData(VoiceCryptError):
    pass


class EmptyTable(VoiceCryptError):
    pass
