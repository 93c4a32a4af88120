"""Exception types shared across the package."""

from __future__ import annotations


class UniverseMismatch(ValueError):
    """Two distributions were indexed by different universes."""


class BudgetExhausted(RuntimeError):
    """A bounded search (isolation index, solver nodes, rejection sampling) ran out."""


class CapExceeded(RuntimeError):
    """An enumeration would produce more items than the configured cap."""


class SizeBoundViolated(ValueError):
    """A chain is larger than the size bound its color was requested for."""


class CodecError(Exception):
    """Base class for encode/decode failures."""


class MalformedCodeword(CodecError):
    """The received bits do not parse under the wire format."""


class EmptyPreimage(CodecError):
    """No element hashes to the received value; corrupted codeword or far-apart priors."""


class NoQualifyingLeader(CodecError):
    """The receiver prior has no element consistent with the transmitted weight class."""


class NoChainFound(CodecError):
    """No candidate chain matches the transmitted color; priors are not close enough."""
