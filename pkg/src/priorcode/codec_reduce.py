"""Entropy reduction wrapper around the other codecs.

Any prior can be flattened toward a point mass on message 1: scale every
probability down by a factor and give the removed mass to message 1.
Dividing by 2**ceil(H) caps the entropy of the result near 3 bits, and
scaling both priors by the same factor never increases their distance,
so an inner codec only ever needs to handle low-entropy priors.  The
factor travels on the wire ahead of the inner codeword; the receiver
flattens its own prior by the sender's factor, never by its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bits import BOTTOM, Bottom, gamma_decode, gamma_encode
from .codec_low import decode_low, encode_low, parse_low, serialize_low
from .codec_simple import decode_simple, encode_simple
from .dist import Dist, entropy
from .errors import MalformedCodeword
from .hashing import PROTOCOL_SEED

INNER_SCHEMES = ("simple", "low")


@dataclass(frozen=True)
class ReducedCodeword:
    factor: int
    payload: str

    def __post_init__(self) -> None:
        if self.factor < 1:
            raise ValueError("reduction factor is at least 1")
        if not self.payload:
            raise ValueError("payload must be nonempty")


def reduction_factor(p: Dist) -> int:
    return max(1, math.ceil(entropy(p)))


def concentrate(p: Dist, factor: int) -> Dist:
    """Scale all probabilities down by factor, moving the slack onto message 1."""
    if factor < 1:
        raise ValueError("reduction factor is at least 1")
    probs = [q / factor for q in p.probs]
    probs[0] += 1 - Fraction(1, factor)
    return Dist(p.n, tuple(probs))


def encode_reduced(
    p: Dist,
    m: int,
    delta: int,
    inner: str = "simple",
    epsilon: float = 0.0,
    seed: int = PROTOCOL_SEED,
    **inner_options,
) -> str:
    """Wire bits: the reduction factor, then the inner codeword for the
    flattened prior.  An inner refusal is carried inside the payload."""
    if inner not in INNER_SCHEMES:
        raise ValueError(f"unknown inner scheme {inner!r}")
    factor = reduction_factor(p)
    concentrated = concentrate(p, factor)
    if inner == "simple":
        payload = encode_simple(concentrated, m, delta, seed=seed, **inner_options)
    else:
        codeword = encode_low(
            concentrated, m, delta, epsilon=epsilon, seed=seed, **inner_options
        )
        payload = serialize_low(codeword)
    return gamma_encode(factor) + payload


def parse_reduced(bits: str) -> ReducedCodeword:
    factor, payload = gamma_decode(bits)
    if not payload:
        raise MalformedCodeword("reduction factor with no inner codeword")
    return ReducedCodeword(factor, payload)


def decode_reduced(
    q: Dist,
    bits: str,
    delta: int,
    inner: str = "simple",
    seed: int = PROTOCOL_SEED,
    **inner_options,
) -> int | Bottom:
    """Message recovered through the flattened priors; BOTTOM passes through."""
    if inner not in INNER_SCHEMES:
        raise ValueError(f"unknown inner scheme {inner!r}")
    codeword = parse_reduced(bits)
    concentrated = concentrate(q, codeword.factor)
    if inner == "simple":
        return decode_simple(concentrated, codeword.payload, seed=seed)
    parsed = parse_low(codeword.payload, q.n)
    if isinstance(parsed, Bottom):
        return BOTTOM
    return decode_low(concentrated, parsed, delta, seed=seed, **inner_options)
