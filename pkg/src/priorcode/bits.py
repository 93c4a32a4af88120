"""Bit-string plumbing: Elias gamma integers and byte-boundary padding.

Codewords are strings over "0"/"1".  Transport is assumed to preserve the
total bit length, which the byte padding below provides for files.
"""

from __future__ import annotations

from .errors import MalformedCodeword


class Bottom:
    """Singleton marker for an encoder that declines to encode."""

    _instance = None

    def __new__(cls) -> "Bottom":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BOTTOM"


BOTTOM = Bottom()


def gamma_encode(value: int) -> str:
    """Elias gamma code: floor(log2 v) zeros, then v in binary."""
    if value < 1:
        raise ValueError("gamma coding needs a positive integer")
    body = format(value, "b")
    return "0" * (len(body) - 1) + body


def gamma_decode(bits: str) -> tuple[int, str]:
    """Read one gamma integer off the front; return (value, remaining bits)."""
    zeros = 0
    while zeros < len(bits) and bits[zeros] == "0":
        zeros += 1
    end = 2 * zeros + 1
    if end > len(bits):
        raise MalformedCodeword("truncated gamma integer")
    return int(bits[zeros:end], 2), bits[end:]


def pad_to_bytes(bits: str) -> bytes:
    """Append a single 1 then zeros up to a byte boundary."""
    padded = bits + "1"
    padded += "0" * (-len(padded) % 8)
    return bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))


def unpad_from_bytes(data: bytes) -> str:
    """Inverse of pad_to_bytes; rejects an all-zero or empty tail."""
    bits = "".join(format(b, "08b") for b in data)
    stripped = bits.rstrip("0")
    if not stripped:
        raise MalformedCodeword("padding marker missing")
    return stripped[:-1]
