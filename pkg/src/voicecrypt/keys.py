"""Password validation and seed-key derivation.

The derivation is deliberately simple and is *not* a cryptographic KDF:

    password -> ASCII codes -> +4 (Caesar shift) -> decimal concatenation
             -> split into two halves (the first half takes the extra digit)

Both halves become integer seeds for :mod:`voicecrypt.prng`.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .errors import EmptyInput, MissingClass, NonPrintable, WrongLength

PASSWORD_LENGTH = 8
CAESAR_SHIFT = 4
_MASK64 = (1 << 64) - 1

# printable ASCII that is neither a letter nor a digit
SPECIAL_CHARACTERS = frozenset(string.punctuation)


@dataclass(frozen=True, repr=False)
class Password:
    """A validated 8-character password.

    ``repr`` never shows the text so it does not leak into logs or tracebacks.
    """

    text: str

    def __repr__(self) -> str:
        return "Password(<hidden>)"


@dataclass(frozen=True)
class KeyPair:
    """Two decimal-digit seed keys derived from one password."""

    key1_digits: str
    key2_digits: str

    @property
    def key1(self) -> int:
        return digits_to_seed(self.key1_digits)

    @property
    def key2(self) -> int:
        return digits_to_seed(self.key2_digits)

    @property
    def z_digits(self) -> str:
        return self.key1_digits + self.key2_digits


def digits_to_seed(digits: str) -> int:
    """Integer value of a digit string, reduced modulo 2**64."""
    return int(digits) & _MASK64


def validate_password(text: str) -> Password:
    """Check length, character range and the three character-class rules.

    Raises
    ------
    WrongLength
        ``text`` is not exactly 8 characters.
    NonPrintable
        A character falls outside ASCII 33..126.
    MissingClass
        No uppercase letter, no digit, or no special character.
    """
    if len(text) != PASSWORD_LENGTH:
        raise WrongLength(f"password must be exactly {PASSWORD_LENGTH} characters, got {len(text)}")
    for ch in text:
        if not 33 <= ord(ch) <= 126:
            raise NonPrintable("password characters must be printable ASCII (codes 33-126)")
    missing = []
    if not any(ch in string.ascii_uppercase for ch in text):
        missing.append("uppercase letter")
    if not any(ch in string.digits for ch in text):
        missing.append("digit")
    if not any(ch in SPECIAL_CHARACTERS for ch in text):
        missing.append("special character")
    if missing:
        raise MissingClass("password lacks: " + ", ".join(missing))
    return Password(text)


def ascii_encode(password: Password) -> list[int]:
    return [ord(ch) for ch in password.text]


def caesar_shift(codes: list[int], shift: int = CAESAR_SHIFT) -> list[int]:
    """Add ``shift`` to every element. Plain integer addition, no wraparound."""
    return [c + shift for c in codes]


def concat_and_split(codes: list[int]) -> KeyPair:
    """Concatenate decimal representations and split at ``ceil(len / 2)``."""
    if len(codes) == 0:
        raise EmptyInput("cannot derive keys from an empty array")
    if any(c < 0 for c in codes):
        raise ValueError("codes must be nonnegative")
    return split_digits("".join(str(c) for c in codes))


def split_digits(z_digits: str) -> KeyPair:
    if not z_digits:
        raise EmptyInput("empty digit string")
    if not z_digits.isdigit():
        raise ValueError(f"not a decimal digit string: {z_digits!r}")
    cut = (len(z_digits) + 1) // 2
    return KeyPair(z_digits[:cut], z_digits[cut:])


def derive_keys(text: str) -> KeyPair:
    """Validate ``text`` and derive its :class:`KeyPair`.

    Examples
    --------
    >>> derive_keys("Djyot!24").key1_digits
    '7211012511'
    """
    password = validate_password(text)
    return concat_and_split(caesar_shift(ascii_encode(password)))
