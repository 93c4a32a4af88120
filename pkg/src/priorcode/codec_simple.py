"""Baseline one-shot codec for mismatched priors.

The sender hashes the message with an index chosen to dodge every rival
whose sender-side probability is within 4**delta of the message's own;
the receiver takes the most likely preimage under its own prior.  When
the two priors are within distance delta, the true message is the
strict receiver-side maximum of the preimage, so decoding is exact.

Codewords are bit strings: the hash index in gamma form, then the raw
hash output.  The output width r + 2*delta + 1 is recovered by the
receiver as everything after the gamma integer, which is why no other
field is needed.
"""

from __future__ import annotations

from .bits import gamma_decode, gamma_encode
from .dist import Dist, floor_neg_log
from .errors import EmptyPreimage, MalformedCodeword
from .hashing import DEFAULT_ISOLATION_BUDGET, PROTOCOL_SEED, IsolatingFamily


def rival_set(p: Dist, m: int, delta: int) -> list[int]:
    """Messages other than m with p-probability at least p(m) / 4**delta."""
    threshold = p.prob(m) / (1 << (2 * delta))
    return [other for other in p.support() if other != m and p.prob(other) >= threshold]


def encode_simple(
    p: Dist,
    m: int,
    delta: int,
    seed: int = PROTOCOL_SEED,
    *,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> str:
    """Codeword bits for m under sender prior p at tolerance delta."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if p.prob(m) == 0:
        raise ValueError(f"message {m} has probability zero")
    r = floor_neg_log(p.prob(m))
    width = r + 2 * delta + 1
    family = IsolatingFamily(domain_size=p.n, output_bits=width, seed=seed)
    j = family.find_isolating_index(m, rival_set(p, m, delta), search_budget)
    return gamma_encode(j) + family.eval(j, m)


def decode_simple(q: Dist, bits: str, seed: int = PROTOCOL_SEED) -> int:
    """Most q-likely message whose hash matches; ties go to the smallest.

    delta never appears here: the hash width is read off the wire, and
    the preimage argmax is already exact whenever the sender's prior was
    within the delta it encoded with.
    """
    j, payload = gamma_decode(bits)
    if not payload:
        raise MalformedCodeword("codeword has no hash payload")
    family = IsolatingFamily(domain_size=q.n, output_bits=len(payload), seed=seed)
    target = int(payload, 2)
    best = None
    best_prob = None
    for m in q.support():
        if family.eval_int(j, m) == target:
            if best is None or q.prob(m) > best_prob:
                best = m
                best_prob = q.prob(m)
    if best is None:
        raise EmptyPreimage("no supported message hashes to this codeword")
    return best
