"""Deterministic hash families with an isolation search.

Both ends of a codec rebuild the same family from a shared seed, so an
encoder can search for a good index j and transmit it while the decoder
only evaluates h_j.  Bits are produced by the SplitMix64 finalizer:

    h_j(x) = first ell bits of mix64(seed ^ (j * 0x9E3779B97F4A7C15)
                                          ^ (x * 0xBF58476D1CE4E5B9))

with all products taken mod 2**64 and "first" meaning most significant.
Outputs longer than 64 bits continue the stream with a word counter t
folded in as t * 0x94D049BB133111EB (t = 0 reproduces the formula above).
Frozen test vectors live in tests/data/prf_vectors.json.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import BudgetExhausted, CapExceeded

PROTOCOL_SEED = 0x5EED1D

DEFAULT_ISOLATION_BUDGET = 1 << 16

_MASK = (1 << 64) - 1
_J_SALT = 0x9E3779B97F4A7C15
_X_SALT = 0xBF58476D1CE4E5B9
_WORD_SALT = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer, bit-exact with the published constants."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


@dataclass(frozen=True)
class IsolatingFamily:
    """Indexed family h_1, h_2, ... from [domain_size] to output_bits-bit strings.

    domain_size is bookkeeping only: evaluation is a pure function of
    (seed, j, x), so the two codec ends agree as long as seed and
    output_bits agree.
    """

    domain_size: int
    output_bits: int
    seed: int = PROTOCOL_SEED

    def __post_init__(self) -> None:
        if self.domain_size < 1:
            raise ValueError("domain must be nonempty")
        if self.output_bits < 1:
            raise ValueError("need at least one output bit")

    def eval_int(self, j: int, x: int) -> int:
        """h_j(x) as an output_bits-bit integer."""
        if j < 1:
            raise ValueError("hash indices start at 1")
        base = self.seed ^ ((j * _J_SALT) & _MASK) ^ ((x * _X_SALT) & _MASK)
        ell = self.output_bits
        words = (ell + 63) // 64
        acc = 0
        for t in range(words):
            acc = (acc << 64) | mix64(base ^ ((t * _WORD_SALT) & _MASK))
        return acc >> (64 * words - ell)

    def eval(self, j: int, x: int) -> str:
        """h_j(x) as a bit string of length output_bits."""
        return format(self.eval_int(j, x), f"0{self.output_bits}b")

    def find_isolating_index(
        self, x: int, others, j_max: int = DEFAULT_ISOLATION_BUDGET
    ) -> int:
        """Smallest j with h_j(x) outside h_j(others).

        others must not contain x.  Expected O(1) trials when
        len(others) <= 2**(output_bits - 1); the search stays correct
        beyond that, it just takes more indices.
        """
        rivals = list(others)
        if x in rivals:
            raise ValueError("x cannot be isolated from itself")
        for j in range(1, j_max + 1):
            hx = self.eval_int(j, x)
            if all(self.eval_int(j, y) != hx for y in rivals):
                return j
        raise BudgetExhausted(f"no isolating index up to {j_max}")

    def verify_prefix(self, index_count: int, *, cap: int = 1 << 22) -> bool:
        """Exhaustively check that h_1..h_index_count isolate every (x, S).

        Covers all S with |S| <= 2**(output_bits - 1) and all x outside S.
        With index_count = 0 this is False as soon as one instance exists.
        """
        domain = range(1, self.domain_size + 1)
        max_size = min(1 << (self.output_bits - 1), self.domain_size - 1)
        total = sum(
            comb(self.domain_size, size) * (self.domain_size - size)
            for size in range(max_size + 1)
        )
        if total > cap:
            raise CapExceeded(f"{total} instances exceed cap {cap}")
        for size in range(max_size + 1):
            for subset in combinations(domain, size):
                taken = set(subset)
                for x in domain:
                    if x in taken:
                        continue
                    if not any(
                        self.eval_int(j, x)
                        not in {self.eval_int(j, y) for y in subset}
                        for j in range(1, index_count + 1)
                    ):
                        return False
        return True
