"""Ascending set chains and their collision-resistant recursive colors.

A chain is a nested sequence A_0 <= A_1 <= ... <= A_L with a singleton
bottom; the element of A_0 is the leader.  Two codec ends that build
slightly different chains around the same message still agree on nearby
chains, so colors are built to isolate a chain from every chain at set
distance two: equal colors force equal leaders across a shared
neighborhood.

Chains are stored as set tuples but enumerated through their entry
levels (element -> first index present), which turns neighborhood
enumeration into independent per-element windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .dist import log_iter
from .errors import CapExceeded, SizeBoundViolated
from .hashing import DEFAULT_ISOLATION_BUDGET, PROTOCOL_SEED, IsolatingFamily

DEFAULT_ENUM_CAP = 1 << 20


@dataclass(frozen=True)
class Chain:
    """Ascending tuple of frozensets with a singleton first set."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        sets = tuple(frozenset(s) for s in self.sets)
        if not sets:
            raise ValueError("a chain has at least one set")
        if len(sets[0]) != 1:
            raise ValueError("the first set must be a singleton")
        for a, b in zip(sets, sets[1:]):
            if not a <= b:
                raise ValueError("sets must be ascending")
        object.__setattr__(self, "sets", sets)

    @property
    def length(self) -> int:
        return len(self.sets) - 1

    @property
    def leader(self) -> int:
        return next(iter(self.sets[0]))

    @property
    def size(self) -> int:
        return len(self.sets[-1])

    def elements(self) -> tuple[int, ...]:
        return tuple(sorted(self.sets[-1]))

    def prefix(self, length: int) -> "Chain":
        if not 0 <= length <= self.length:
            raise ValueError(f"no prefix of length {length}")
        return Chain(self.sets[: length + 1])

    def entry_levels(self) -> dict[int, int]:
        """Element -> index of the first set containing it."""
        out: dict[int, int] = {}
        for i, s in enumerate(self.sets):
            for e in s:
                out.setdefault(e, i)
        return out

    @classmethod
    def from_entries(cls, entries: Mapping[int, int], length: int) -> "Chain":
        if any(not 0 <= lvl <= length for lvl in entries.values()):
            raise ValueError("entry levels out of range")
        return cls(
            tuple(
                frozenset(e for e, lvl in entries.items() if lvl <= i)
                for i in range(length + 1)
            )
        )


def within_distance(b: Chain, a: Chain, d: int) -> bool:
    """True when b is d shorter than a and A_{i-d} <= B_i <= A_{i+d} throughout."""
    if d < 0:
        raise ValueError("distance must be nonnegative")
    if b.length != a.length - d:
        return False
    for i in range(b.length + 1):
        lower = a.sets[i - d] if i >= d else frozenset()
        if not lower <= b.sets[i] <= a.sets[i + d]:
            return False
    return True


def enum_nearby_chains(a: Chain, d: int, cap: int = DEFAULT_ENUM_CAP) -> list[Chain]:
    """All chains within distance d of a, i.e. every b with within_distance(b, a, d).

    Per element with entry level t the new entry ranges over
    [max(0, t - d), t + d]; the element may drop out entirely only when
    t + d exceeds the shorter length.  Raises CapExceeded when the raw
    combination count (before the one-leader filter) would pass cap.
    """
    if d < 0:
        raise ValueError("distance must be nonnegative")
    new_len = a.length - d
    if new_len < 0:
        return []
    entries = a.entry_levels()
    elems = sorted(entries)
    option_lists: list[list[int | None]] = []
    for e in elems:
        t = entries[e]
        lo = max(0, t - d)
        if t + d <= new_len:
            option_lists.append(list(range(lo, t + d + 1)))
        else:
            options: list[int | None] = [None]
            options.extend(range(lo, new_len + 1))
            option_lists.append(options)
    combos = math.prod(len(o) for o in option_lists)
    if combos > cap:
        raise CapExceeded(f"{combos} candidate chains exceed cap {cap}")
    out = []
    for combo in product(*option_lists):
        chosen = {e: lvl for e, lvl in zip(elems, combo) if lvl is not None}
        if sum(1 for lvl in chosen.values() if lvl == 0) != 1:
            continue
        b = Chain.from_entries(chosen, new_len)
        # The window construction should be exact; re-check rather than trust it.
        if not within_distance(b, a, d):
            raise AssertionError("enumerated chain fails its own distance test")
        out.append(b)
    return out


@dataclass(frozen=True)
class ChainColor:
    """Recursive color: a bare leader, or (hash index, hash bits) over an inner color."""

    leader: int | None = None
    index: int | None = None
    bits: str | None = None
    inner: "ChainColor | None" = None

    def __post_init__(self) -> None:
        if self.leader is not None:
            if self.index is not None or self.bits is not None or self.inner is not None:
                raise ValueError("a base color carries only its leader")
            if self.leader < 1:
                raise ValueError("leaders are positive")
        else:
            if self.index is None or self.bits is None or self.inner is None:
                raise ValueError("a node color needs index, bits and inner")
            if self.index < 1:
                raise ValueError("hash indices start at 1")
            if not self.bits or set(self.bits) - {"0", "1"}:
                raise ValueError("bits must be a nonempty 01-string")

    @classmethod
    def base(cls, leader: int) -> "ChainColor":
        return cls(leader=leader)

    @classmethod
    def node(cls, index: int, bits: str, inner: "ChainColor") -> "ChainColor":
        return cls(index=index, bits=bits, inner=inner)

    @property
    def is_base(self) -> bool:
        return self.leader is not None

    @property
    def depth(self) -> int:
        return 0 if self.is_base else 1 + self.inner.depth

    @property
    def value(self) -> int:
        """Positive integer identity of this level; what the next hash eats."""
        if self.is_base:
            return self.leader
        return (self.index - 1) * (1 << len(self.bits)) + int(self.bits, 2) + 1

    def base_leader(self) -> int:
        color = self
        while not color.is_base:
            color = color.inner
        return color.leader

    def nodes_outward(self) -> list["ChainColor"]:
        """Node levels ordered from just above the base to the top."""
        levels = []
        color = self
        while not color.is_base:
            levels.append(color)
            color = color.inner
        levels.reverse()
        return levels


def color_width(size_bound: int) -> int:
    """Hash output bits per color level: ceil(2.5 * size_bound)."""
    if size_bound < 1:
        raise ValueError("size bound must be positive")
    return (5 * size_bound + 1) // 2


def color_value_bound(depth: int, size_bound: int, universe_size: int) -> int:
    """Worst-case value of a depth-level color over a universe of this size."""
    return max(1, math.ceil(2 ** (6 * (size_bound + 1)) * log_iter(depth, universe_size)))


_COLOR_CACHE: dict[tuple, ChainColor] = {}


def clear_color_cache() -> None:
    _COLOR_CACHE.clear()


def chain_color(
    chain: Chain,
    size_bound: int,
    universe_size: int,
    seed: int = PROTOCOL_SEED,
    *,
    enum_cap: int = DEFAULT_ENUM_CAP,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> ChainColor:
    """Color of an even-length chain with at most size_bound elements.

    Recursion on length: strip the last two sets, color the rest, then
    append a hash level whose index isolates the inner color value from
    the color values of every chain within distance two.  Equal colors
    therefore pin equal leaders among chains sharing a neighborhood.

    Results are memoized on (chain, size_bound, universe_size, seed);
    budgets only bound the search effort, never the answer.
    """
    if chain.length % 2:
        raise ValueError("colors are defined for even-length chains")
    if chain.size > size_bound:
        raise SizeBoundViolated(f"chain has {chain.size} elements, bound is {size_bound}")
    key = (chain, size_bound, universe_size, seed)
    hit = _COLOR_CACHE.get(key)
    if hit is not None:
        return hit
    if chain.length == 0:
        color = ChainColor.base(chain.leader)
    else:
        inner = chain_color(
            chain.prefix(chain.length - 2),
            size_bound,
            universe_size,
            seed,
            enum_cap=enum_cap,
            search_budget=search_budget,
        )
        depth = chain.length // 2
        family = IsolatingFamily(
            domain_size=color_value_bound(depth - 1, size_bound, universe_size),
            output_bits=color_width(size_bound),
            seed=seed,
        )
        rivals = set()
        for nearby in enum_nearby_chains(chain, 2, enum_cap):
            rivals.add(
                chain_color(
                    nearby,
                    size_bound,
                    universe_size,
                    seed,
                    enum_cap=enum_cap,
                    search_budget=search_budget,
                ).value
            )
        rivals.discard(inner.value)
        j = family.find_isolating_index(inner.value, rivals, search_budget)
        color = ChainColor.node(j, family.eval(j, inner.value), inner)
    _COLOR_CACHE[key] = color
    return color
