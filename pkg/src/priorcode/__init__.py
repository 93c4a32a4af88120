"""Compression under prior mismatch, plus the graph-side toolkit.

The sender encodes against its prior P, the receiver decodes against its
own prior Q, and decoding is exact whenever the two priors are within a
known closeness budget.  Three codecs share one wire discipline:

- ``codec_simple``: hash-isolation against the rival set, near-optimal
  when entropy is moderate.
- ``codec_low``: set-chain coloring, whose length tracks the structure
  of the prior rather than raw support size; may refuse rare messages
  when given a refusal budget.
- ``codec_reduce``: an entropy-concentration wrapper that caps the
  entropy seen by either inner codec.

``graphs`` and ``oracle`` hold the uncertainty-graph laboratory and the
independent verification machinery used by the acceptance suite.
"""

from .bits import BOTTOM, Bottom, gamma_decode, gamma_encode, pad_to_bytes, unpad_from_bytes
from .chains import Chain, ChainColor, chain_color, enum_nearby_chains, within_distance
from .codec_low import (
    LowCodeword,
    build_decoder_chain,
    build_encoder_chain,
    decode_low,
    encode_low,
    find_matching_chain,
    parse_low,
    serialize_low,
)
from .codec_reduce import (
    ReducedCodeword,
    concentrate,
    decode_reduced,
    encode_reduced,
    parse_reduced,
    reduction_factor,
)
from .codec_simple import decode_simple, encode_simple, rival_set
from .dist import (
    Dist,
    FamilyTag,
    binomial_dist,
    capacity,
    dist_from_json,
    dist_to_json,
    distance,
    entropy,
    flat_dist,
    floor_neg_log,
    geometric_dist,
    is_delta_close,
    log_iter,
    log_star,
    make_dist,
    make_family,
    max_ratio,
    perturb_enumerate,
    perturb_sample,
)
from .errors import (
    BudgetExhausted,
    CapExceeded,
    CodecError,
    EmptyPreimage,
    MalformedCodeword,
    NoChainFound,
    NoQualifyingLeader,
    SizeBoundViolated,
    UniverseMismatch,
)
from .hashing import PROTOCOL_SEED, IsolatingFamily, mix64
from .oracle import VerificationReport, verify_roundtrip_instance, verify_scheme

__all__ = [
    "BOTTOM",
    "Bottom",
    "BudgetExhausted",
    "CapExceeded",
    "Chain",
    "ChainColor",
    "CodecError",
    "Dist",
    "EmptyPreimage",
    "FamilyTag",
    "IsolatingFamily",
    "LowCodeword",
    "MalformedCodeword",
    "NoChainFound",
    "NoQualifyingLeader",
    "PROTOCOL_SEED",
    "ReducedCodeword",
    "SizeBoundViolated",
    "UniverseMismatch",
    "VerificationReport",
    "binomial_dist",
    "build_decoder_chain",
    "build_encoder_chain",
    "capacity",
    "chain_color",
    "concentrate",
    "decode_low",
    "decode_reduced",
    "decode_simple",
    "dist_from_json",
    "dist_to_json",
    "distance",
    "encode_low",
    "encode_reduced",
    "encode_simple",
    "entropy",
    "enum_nearby_chains",
    "find_matching_chain",
    "flat_dist",
    "floor_neg_log",
    "gamma_decode",
    "gamma_encode",
    "geometric_dist",
    "is_delta_close",
    "log_iter",
    "log_star",
    "make_dist",
    "make_family",
    "max_ratio",
    "pad_to_bytes",
    "parse_low",
    "parse_reduced",
    "perturb_enumerate",
    "perturb_sample",
    "reduction_factor",
    "rival_set",
    "serialize_low",
    "unpad_from_bytes",
    "mix64",
    "verify_roundtrip_instance",
    "verify_scheme",
    "within_distance",
]

__version__ = "0.1.0"
