"""Exact finite distributions over a universe {1, ..., n}.

Probabilities are fractions.Fraction throughout; every comparison a codec
depends on is exact integer arithmetic.  Floats appear only in reported
quantities (entropy, capacity, log-star) where rounding cannot change a
decode.
"""

from __future__ import annotations

import math
import random
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExhausted, CapExceeded, UniverseMismatch

DEFAULT_SAMPLE_BUDGET = 500


@dataclass(frozen=True)
class Dist:
    """Probability distribution on {1..n}, stored as exact fractions."""

    n: int
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("universe must be nonempty")
        probs = tuple(Fraction(p) for p in self.probs)
        if len(probs) != self.n:
            raise ValueError(f"expected {self.n} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if sum(probs) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        object.__setattr__(self, "probs", probs)

    def prob(self, m: int) -> Fraction:
        if not 1 <= m <= self.n:
            raise ValueError(f"message {m} outside universe 1..{self.n}")
        return self.probs[m - 1]

    def support(self) -> tuple[int, ...]:
        return tuple(m for m in range(1, self.n + 1) if self.probs[m - 1] > 0)

    @property
    def support_size(self) -> int:
        return sum(1 for p in self.probs if p > 0)


def ge_pow2(p: Fraction, e: int) -> bool:
    """Exact test p >= 2**e, e of either sign."""
    if e <= 0:
        return p.numerator << -e >= p.denominator
    return p.numerator >= p.denominator << e


def le_pow2(p: Fraction, e: int) -> bool:
    """Exact test p <= 2**e, e of either sign."""
    if e <= 0:
        return p.numerator << -e <= p.denominator
    return p.numerator <= p.denominator << e


def floor_neg_log(q: Fraction) -> int:
    """The unique r >= 0 with 2**-(r+1) < q <= 2**-r, for q in (0, 1]."""
    if not 0 < q <= 1:
        raise ValueError("need a probability in (0, 1]")
    num, den = q.numerator, q.denominator
    r = den.bit_length() - num.bit_length()
    if num << r > den:
        r -= 1
    elif num << (r + 1) <= den:
        r += 1
    return r


def entropy(dist: Dist) -> float:
    """Shannon entropy in bits."""
    terms = []
    for p in dist.probs:
        if p > 0:
            # log2 on the integer parts keeps huge numerators finite.
            terms.append(float(p) * (math.log2(p.denominator) - math.log2(p.numerator)))
    return math.fsum(terms)


def capacity(dist: Dist) -> float:
    """log2 of the largest set of outcomes whose probabilities are within 2x."""
    probs = sorted(p for p in dist.probs if p > 0)
    best = 1
    left = 0
    for right in range(len(probs)):
        while probs[right] > 2 * probs[left]:
            left += 1
        best = max(best, right - left + 1)
    return math.log2(best)


def distance(p: Dist, q: Dist) -> float:
    """Worst-case |log2 p(m)/q(m)|; infinite when the supports differ."""
    if p.n != q.n:
        raise UniverseMismatch(f"universes differ: {p.n} vs {q.n}")
    worst = 0.0
    for pm, qm in zip(p.probs, q.probs):
        if (pm > 0) != (qm > 0):
            return math.inf
        if pm > 0:
            ratio = pm / qm
            worst = max(worst, abs(math.log2(ratio.numerator) - math.log2(ratio.denominator)))
    return worst


def max_ratio(p: Dist, q: Dist) -> Fraction | None:
    """Exact counterpart of distance: max of p(m)/q(m) and q(m)/p(m) over support.

    Returns None when the supports differ.  Comparing two max_ratio values
    compares the two distances without any floating point.
    """
    if p.n != q.n:
        raise UniverseMismatch(f"universes differ: {p.n} vs {q.n}")
    worst = Fraction(1)
    for pm, qm in zip(p.probs, q.probs):
        if (pm > 0) != (qm > 0):
            return None
        if pm > 0:
            worst = max(worst, pm / qm, qm / pm)
    return worst


def is_delta_close(p: Dist, q: Dist, delta: int) -> bool:
    """Exact test distance(p, q) <= delta for integer delta."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if p.n != q.n:
        raise UniverseMismatch(f"universes differ: {p.n} vs {q.n}")
    scale = 1 << delta
    for pm, qm in zip(p.probs, q.probs):
        if (pm > 0) != (qm > 0):
            return False
        if pm.numerator * qm.denominator > scale * qm.numerator * pm.denominator:
            return False
        if qm.numerator * pm.denominator > scale * pm.numerator * qm.denominator:
            return False
    return True


def log_star(x: float) -> int:
    """Iterations of log2 needed to bring x down to at most 1."""
    count = 0
    x = float(x)
    while x > 1:
        x = math.log2(x)
        count += 1
    return count


def log_iter(k: int, x: float) -> float:
    """k-fold iterated log2, floored at 1 so the iteration never leaves its domain."""
    x = float(x)
    for _ in range(k):
        x = max(1.0, math.log2(max(x, 1.0)))
    return x


def _check_perm(n: int, perm: tuple[int, ...] | None) -> tuple[int, ...]:
    if perm is None:
        return tuple(range(1, n + 1))
    perm = tuple(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}")
    return perm


def _place(n: int, perm: tuple[int, ...], weights: list[Fraction]) -> Dist:
    total = sum(weights)
    probs = [Fraction(0)] * n
    for element, w in zip(perm, weights):
        probs[element - 1] = w / total
    return Dist(n, tuple(probs))


def flat_dist(n: int, support: int | Iterable[int]) -> Dist:
    """Uniform over a support set; an integer means the first that many outcomes."""
    if isinstance(support, int):
        members = frozenset(range(1, support + 1))
    else:
        members = frozenset(support)
    if not members or any(not 1 <= m <= n for m in members):
        raise ValueError(f"support must be a nonempty subset of 1..{n}")
    p = Fraction(1, len(members))
    return Dist(n, tuple(p if m in members else Fraction(0) for m in range(1, n + 1)))


def geometric_dist(n: int, alpha: Fraction, perm: tuple[int, ...] | None = None) -> Dist:
    """Each step down the order perm carries alpha times the previous mass."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    perm = _check_perm(n, perm)
    return _place(n, perm, [alpha ** (k - 1) for k in range(1, n + 1)])


def binomial_dist(n: int, p: Fraction, perm: tuple[int, ...] | None = None) -> Dist:
    """Binomial(n, p) count conditioned on being at least 1, placed along perm."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    perm = _check_perm(n, perm)
    weights = [math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(1, n + 1)]
    return _place(n, perm, weights)


@dataclass(frozen=True)
class FamilyTag:
    """Names one member of the flat / geometric / binomial families.

    flat uses support; the other two use param (the ratio or the bias)
    plus an optional placement permutation.
    """

    kind: str
    n: int
    support: frozenset[int] | None = None
    param: Fraction | None = None
    perm: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "flat":
            if self.support is None or self.param is not None:
                raise ValueError("flat takes a support set and nothing else")
        elif self.kind in ("geometric", "binomial"):
            if self.param is None or self.support is not None:
                raise ValueError(f"{self.kind} takes a rational parameter")
        else:
            raise ValueError(f"unknown family {self.kind!r}")


def make_family(tag: FamilyTag) -> Dist:
    if tag.kind == "flat":
        return flat_dist(tag.n, tag.support)
    if tag.kind == "geometric":
        return geometric_dist(tag.n, tag.param, tag.perm)
    return binomial_dist(tag.n, tag.param, tag.perm)


def make_dist(family: str, n: int, param) -> Dist:
    """String-keyed convenience used by the CLI and the bench grids."""
    if family == "flat":
        return flat_dist(n, int(param))
    if family == "geometric":
        return geometric_dist(n, Fraction(param))
    if family == "binomial":
        return binomial_dist(n, Fraction(param))
    raise ValueError(f"unknown family {family!r}")


def enum_grid_dists(n: int, denominator: int, cap: int = 1 << 20) -> list[Dist]:
    """Every distribution on {1..n} whose probabilities are multiples of 1/denominator."""
    if denominator < 1:
        raise ValueError("denominator must be positive")
    total = math.comb(denominator + n - 1, n - 1)
    if total > cap:
        raise CapExceeded(f"{total} grid distributions exceed cap {cap}")
    out = []
    counts = [0] * n

    def fill(i: int, remaining: int) -> None:
        if i == n - 1:
            counts[i] = remaining
            out.append(Dist(n, tuple(Fraction(c, denominator) for c in counts)))
            return
        for c in range(remaining + 1):
            counts[i] = c
            fill(i + 1, remaining - c)

    fill(0, denominator)
    return out


def _grid_window(p: Fraction, delta: int, grid_bits: int) -> tuple[int, int]:
    # Numerator range for q = k / 2**grid_bits with p / 2**delta <= q <= p * 2**delta.
    lo = math.ceil(p * (1 << grid_bits) / (1 << delta))
    hi = math.floor(p * (1 << grid_bits) * (1 << delta))
    return lo, hi


def perturb_enumerate(p: Dist, delta: int, grid_bits: int, cap: int = 1 << 20) -> list[Dist]:
    """All grid distributions within distance delta of p, in lexicographic order.

    The grid is numerators over 2**grid_bits; zero coordinates of p stay
    zero (anything else is infinitely far).  Raises CapExceeded once more
    than cap neighbors have been produced.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    total = 1 << grid_bits
    windows = []
    for prob in p.probs:
        if prob == 0:
            windows.append((0, 0))
        else:
            windows.append(_grid_window(prob, delta, grid_bits))
    suffix_lo = [0] * (p.n + 1)
    suffix_hi = [0] * (p.n + 1)
    for i in range(p.n - 1, -1, -1):
        suffix_lo[i] = suffix_lo[i + 1] + windows[i][0]
        suffix_hi[i] = suffix_hi[i + 1] + windows[i][1]
    out = []
    counts = [0] * p.n

    def fill(i: int, remaining: int) -> None:
        if i == p.n:
            if remaining == 0:
                if len(out) >= cap:
                    raise CapExceeded(f"more than {cap} perturbations")
                out.append(Dist(p.n, tuple(Fraction(c, total) for c in counts)))
            return
        lo, hi = windows[i]
        lo = max(lo, remaining - suffix_hi[i + 1])
        hi = min(hi, remaining - suffix_lo[i + 1])
        for c in range(lo, hi + 1):
            counts[i] = c
            fill(i + 1, remaining - c)

    fill(0, total)
    return out


def perturb_sample(
    p: Dist,
    delta: int,
    seed: int,
    *,
    grid_bits: int | None = None,
    budget: int = DEFAULT_SAMPLE_BUDGET,
) -> Dist:
    """One seeded grid distribution within distance delta of p.

    Coordinates get independent multipliers 2**u, u uniform on [-delta, delta],
    are rounded onto the grid, clamped into the exact window, and the rounding
    residue lands on the heaviest coordinate.  Each attempt is rejection-checked
    with exact arithmetic; after budget failures the grid is declared too coarse.
    grid_bits defaults to just enough resolution that every support coordinate
    has room to move.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return p
    if grid_bits is None:
        grid_bits = floor_neg_log(min(p.prob(m) for m in p.support())) + delta + 1
    total = 1 << grid_bits
    support = [m - 1 for m in p.support()]
    windows = {i: _grid_window(p.probs[i], delta, grid_bits) for i in support}
    if any(lo > hi for lo, hi in windows.values()):
        raise ValueError("grid_bits too small to move every coordinate")
    anchor = max(support, key=lambda i: (p.probs[i], -i))
    rng = random.Random(seed)
    for _ in range(budget):
        counts = [0] * p.n
        for i in support:
            u = rng.uniform(-delta, delta)
            k = round(float(p.probs[i]) * total * 2.0**u)
            lo, hi = windows[i]
            counts[i] = min(max(k, lo), hi)
        counts[anchor] += total - sum(counts)
        lo, hi = windows[anchor]
        if not lo <= counts[anchor] <= hi:
            continue
        q = Dist(p.n, tuple(Fraction(c, total) for c in counts))
        if is_delta_close(p, q, delta):
            return q
    raise BudgetExhausted(f"no grid perturbation found in {budget} attempts")


def dist_to_json(dist: Dist) -> dict:
    """JSON-ready form with exact fraction strings."""
    return {"n": dist.n, "probs": [str(p) for p in dist.probs]}


def dist_from_json(obj: dict) -> Dist:
    """Inverse of dist_to_json; validation happens in the Dist constructor."""
    if not isinstance(obj, dict) or "n" not in obj or "probs" not in obj:
        raise ValueError("expected an object with fields n and probs")
    return Dist(int(obj["n"]), tuple(Fraction(s) for s in obj["probs"]))
