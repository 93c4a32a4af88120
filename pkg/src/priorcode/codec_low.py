"""Codec with codeword length driven by entropy instead of log-probability.

The sender builds a chain of probability bands around the message, one
band per level, each level delta wider than the last, and transmits the
chain's color together with the band rank and the element count.  The
receiver rebuilds the corresponding bands around its own prior; under
delta-closeness its chain sits within set distance one of the sender's,
so scanning the chains that sandwich it for the transmitted color pins
down the sender's leader.

Very spread-out priors would need huge chains, so when a nonzero slack
epsilon is allowed the encoder refuses (returns BOTTOM) once the chain
outgrows 2**(H/epsilon + 2*delta*log_star(n) + 1); the refusal rate over
messages drawn from the prior then stays below epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .bits import BOTTOM, Bottom, gamma_decode, gamma_encode
from .chains import (
    DEFAULT_ENUM_CAP,
    Chain,
    ChainColor,
    chain_color,
    color_width,
)
from .dist import Dist, entropy, floor_neg_log, ge_pow2, le_pow2, log_star
from .errors import (
    CapExceeded,
    MalformedCodeword,
    NoChainFound,
    NoQualifyingLeader,
)
from .hashing import DEFAULT_ISOLATION_BUDGET, PROTOCOL_SEED

DEFAULT_VISIT_CAP = 1 << 20


@dataclass(frozen=True)
class LowCodeword:
    """What actually crosses the wire: chain size, band rank, chain color."""

    size: int
    rank: int
    color: ChainColor

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("chain size is at least 1")
        if self.rank < 0:
            raise ValueError("rank is nonnegative")


def derive_chain_length(universe_size: int) -> int:
    """Chain length used by both ends: 2 * max(1, log_star(n)), always even."""
    if universe_size < 1:
        raise ValueError("universe must be nonempty")
    return 2 * max(1, log_star(universe_size))


def _band(p: Dist, rank: int, half_width: int) -> frozenset[int]:
    # Messages with probability in [2**-(rank + half_width + 1), 2**(-rank + half_width + 1)].
    lo = -(rank + half_width + 1)
    hi = -rank + half_width + 1
    return frozenset(
        m for m in p.support() if ge_pow2(p.prob(m), lo) and le_pow2(p.prob(m), hi)
    )


def build_encoder_chain(p: Dist, m: int, delta: int, length: int) -> Chain:
    """Bands around p(m): level k holds everything within (k+1)*delta + 1 of its rank."""
    r = floor_neg_log(p.prob(m))
    sets = [frozenset([m])]
    for k in range(1, length + 1):
        sets.append(_band(p, r, (k + 1) * delta))
    return Chain(tuple(sets))


def build_decoder_chain(q: Dist, rank: int, delta: int, length: int) -> Chain:
    """Receiver-side chain, one level shorter, led by the likeliest in-band message.

    The leader is the q-maximal message within delta + 1 bands of rank,
    ties to the smallest; upper levels reuse the encoder's band widths.
    """
    best = None
    best_prob = None
    for m in q.support():
        prob = q.prob(m)
        if ge_pow2(prob, -(rank + delta + 1)) and le_pow2(prob, -rank + delta + 1):
            if best is None or prob > best_prob:
                best = m
                best_prob = prob
    if best is None:
        raise NoQualifyingLeader(f"no message sits in band {rank} within {delta}")
    sets = [frozenset([best])]
    for k in range(1, length):
        sets.append(_band(q, rank, (k + 1) * delta))
    return Chain(tuple(sets))


def size_limit(p: Dist, delta: int, epsilon: float) -> float:
    """Chain sizes beyond 2**size_limit trip the refusal path."""
    return entropy(p) / epsilon + 2 * delta * log_star(p.n) + 1


def encode_low(
    p: Dist,
    m: int,
    delta: int,
    epsilon: float = 0.0,
    seed: int = PROTOCOL_SEED,
    *,
    enum_cap: int = DEFAULT_ENUM_CAP,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> LowCodeword | Bottom:
    """Codeword for m, or BOTTOM when the chain is too large for the slack."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if p.prob(m) == 0:
        raise ValueError(f"message {m} has probability zero")
    length = derive_chain_length(p.n)
    chain = build_encoder_chain(p, m, delta, length)
    if epsilon > 0 and math.log2(chain.size) > size_limit(p, delta, epsilon):
        return BOTTOM
    color = chain_color(
        chain,
        chain.size,
        p.n,
        seed,
        enum_cap=enum_cap,
        search_budget=search_budget,
    )
    return LowCodeword(chain.size, floor_neg_log(p.prob(m)), color)


def _candidate_chains(b: Chain, universe_size: int, leader: int):
    # Chains one longer than b that sandwich it.  Elements of b are forced,
    # with entries within one of their old level; fresh elements can only
    # appear in the last two levels.  Fresh options come first and absent
    # options come before present ones, so chains built purely from b's
    # elements enumerate before any exotic ones.  The leader slot is pinned
    # up front so every emitted candidate already agrees with the color's base.
    target_len = b.length + 1
    entries = b.entry_levels()
    if leader not in entries or entries[leader] > 1:
        return
    option_lists: list[list[int | None]] = []
    elems: list[int] = []
    for e in range(1, universe_size + 1):
        if e in entries:
            continue
        elems.append(e)
        option_lists.append([None, target_len - 1, target_len])
    for e in sorted(entries):
        t = entries[e]
        window = range(max(0, t - 1), t + 2)
        if e == leader:
            options: list[int | None] = [0]
        else:
            options = [lvl for lvl in window if lvl != 0]
        if not options:
            return
        elems.append(e)
        option_lists.append(options)
    for combo in product(*option_lists):
        chosen = {e: lvl for e, lvl in zip(elems, combo) if lvl is not None}
        yield Chain.from_entries(chosen, target_len)


def _match_generator(
    b: Chain,
    size_bound: int,
    color: ChainColor,
    universe_size: int,
    seed: int,
    visit_cap: int,
    enum_cap: int,
    search_budget: int,
):
    # Colors are compared from the base upward so a candidate dies at its
    # first wrong level; deeper levels are never computed for it.
    nest = []
    level = color
    while True:
        nest.append(level)
        if level.is_base:
            break
        level = level.inner
    nest.reverse()
    visited = 0
    for cand in _candidate_chains(b, universe_size, color.base_leader()):
        visited += 1
        if visited > visit_cap:
            raise CapExceeded(f"visited more than {visit_cap} candidate chains")
        if cand.size > size_bound:
            continue
        for depth, expected in enumerate(nest):
            got = chain_color(
                cand.prefix(2 * depth),
                size_bound,
                universe_size,
                seed,
                enum_cap=enum_cap,
                search_budget=search_budget,
            )
            if got != expected:
                break
        else:
            yield cand


def find_matching_chain(
    b: Chain,
    size_bound: int,
    color: ChainColor,
    universe_size: int,
    seed: int = PROTOCOL_SEED,
    *,
    visit_cap: int = DEFAULT_VISIT_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> Chain:
    """First chain (in deterministic order) sandwiching b with this exact color."""
    for found in _match_generator(
        b, size_bound, color, universe_size, seed, visit_cap, enum_cap, search_budget
    ):
        return found
    raise NoChainFound("no sandwiching chain reproduces this color")


def find_all_matching_chains(
    b: Chain,
    size_bound: int,
    color: ChainColor,
    universe_size: int,
    seed: int = PROTOCOL_SEED,
    *,
    visit_cap: int = DEFAULT_VISIT_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> list[Chain]:
    """Every matching chain; they must all share a leader, which tests verify."""
    return list(
        _match_generator(
            b, size_bound, color, universe_size, seed, visit_cap, enum_cap, search_budget
        )
    )


def decode_low(
    q: Dist,
    codeword: LowCodeword | Bottom,
    delta: int,
    seed: int = PROTOCOL_SEED,
    *,
    visit_cap: int = DEFAULT_VISIT_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> int | Bottom:
    """Message recovered from a codeword, exact whenever distance(p, q) <= delta.

    A refusal decodes to BOTTOM.  Failures to find a leader band or a
    color-matching chain raise; both signal corruption or priors that are
    not actually delta-close.
    """
    if isinstance(codeword, Bottom):
        return BOTTOM
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    length = derive_chain_length(q.n)
    if codeword.color.depth != length // 2:
        raise MalformedCodeword("color depth does not fit this universe")
    b = build_decoder_chain(q, codeword.rank, delta, length)
    found = find_matching_chain(
        b,
        codeword.size,
        codeword.color,
        q.n,
        seed,
        visit_cap=visit_cap,
        enum_cap=enum_cap,
        search_budget=search_budget,
    )
    return found.leader


def serialize_low(codeword: LowCodeword | Bottom) -> str:
    """Wire bits: a refusal flag, then size, rank+1, leader, and hash levels."""
    if isinstance(codeword, Bottom):
        return "0"
    color = codeword.color
    parts = [
        "1",
        gamma_encode(codeword.size),
        gamma_encode(codeword.rank + 1),
        gamma_encode(color.base_leader()),
    ]
    width = color_width(codeword.size)
    for level in color.nodes_outward():
        if len(level.bits) != width:
            raise ValueError("color width does not match its chain size")
        parts.append(gamma_encode(level.index))
        parts.append(level.bits)
    return "".join(parts)


def parse_low(bits: str, universe_size: int) -> LowCodeword | Bottom:
    """Inverse of serialize_low for a given universe; rejects trailing bits."""
    if not bits:
        raise MalformedCodeword("empty codeword")
    flag, rest = bits[0], bits[1:]
    if flag == "0":
        if rest:
            raise MalformedCodeword("refusal flag followed by data")
        return BOTTOM
    size, rest = gamma_decode(rest)
    rank_plus, rest = gamma_decode(rest)
    leader, rest = gamma_decode(rest)
    if leader > universe_size:
        raise MalformedCodeword("leader outside universe")
    width = color_width(size)
    color = ChainColor.base(leader)
    for _ in range(derive_chain_length(universe_size) // 2):
        index, rest = gamma_decode(rest)
        if len(rest) < width:
            raise MalformedCodeword("truncated hash level")
        color = ChainColor.node(index, rest[:width], color)
        rest = rest[width:]
    if rest:
        raise MalformedCodeword("trailing bits after codeword")
    return LowCodeword(size, rank_plus - 1, color)
