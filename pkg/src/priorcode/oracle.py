"""Ground truth and measurement: exhaustive verification, brute-force
counterparts of the clever constructions, and length/error meters.

The brute functions deliberately share no logic with the modules they
check: chromatic numbers by plain backtracking over a fixed vertex
order, subpermutation distance by enumerating full extensions, chain
neighborhoods by filtering raw set tuples against the sandwich
definition.  Where they disagree with the fast paths, the brute answer
wins.
"""

from __future__ import annotations

import csv
import json
import math
import random
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product

from .bits import Bottom
from .chains import chain_color, color_value_bound
from .codec_low import decode_low, encode_low, parse_low, serialize_low
from .codec_reduce import decode_reduced, encode_reduced, parse_reduced
from .codec_simple import decode_simple, encode_simple, rival_set
from .dist import (
    Dist,
    dist_to_json,
    entropy,
    enum_grid_dists,
    floor_neg_log,
    perturb_enumerate,
)
from .errors import BudgetExhausted, CodecError
from .hashing import PROTOCOL_SEED, IsolatingFamily

SCHEMES = ("simple", "low", "reduced+simple", "reduced+low")

DEFAULT_TRIPLE_BUDGET = 50_000_000


@dataclass
class VerificationReport:
    """Outcome of one exhaustive verification run."""

    scheme: str
    n: int
    delta: int
    epsilon: float
    denominator_bits: int
    dists_tested: int = 0
    pairs_tested: int = 0
    triples_tested: int = 0
    failures: list = field(default_factory=list)
    mean_length: float = 0.0
    length_percentiles: dict = field(default_factory=dict)
    bottom_rate: float = 0.0
    per_dist: list = field(default_factory=list)
    fault_injections: int = 0
    faults_detected: int = 0
    faults_survived: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "configuration": {
                "scheme": self.scheme,
                "n": self.n,
                "delta": self.delta,
                "epsilon": self.epsilon,
                "denominator_bits": self.denominator_bits,
            },
            "dists_tested": self.dists_tested,
            "pairs_tested": self.pairs_tested,
            "triples_tested": self.triples_tested,
            "passed": self.passed,
            "failures": self.failures,
            "mean_length": self.mean_length,
            "length_percentiles": self.length_percentiles,
            "bottom_rate": self.bottom_rate,
            "per_dist": self.per_dist,
            "fault_injections": self.fault_injections,
            "faults_detected": self.faults_detected,
            "faults_survived": self.faults_survived,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["scheme", "n", "delta", "epsilon", "denominator_bits",
                 "dist", "entropy", "expected_length", "bottom_mass", "pairs"]
            )
            for row in self.per_dist:
                writer.writerow(
                    [self.scheme, self.n, self.delta, self.epsilon,
                     self.denominator_bits, row["dist"], row["entropy"],
                     row["expected_length"], row["bottom_mass"], row["pairs"]]
                )


def _encode_any(scheme: str, p: Dist, m: int, delta: int, epsilon: float, seed: int):
    """Wire bits plus a refusal flag, for any scheme id."""
    if scheme == "simple":
        return encode_simple(p, m, delta, seed=seed), False
    if scheme == "low":
        codeword = encode_low(p, m, delta, epsilon=epsilon, seed=seed)
        return serialize_low(codeword), isinstance(codeword, Bottom)
    if scheme == "reduced+simple":
        return encode_reduced(p, m, delta, "simple", epsilon, seed=seed), False
    if scheme == "reduced+low":
        bits = encode_reduced(p, m, delta, "low", epsilon, seed=seed)
        inner = parse_low(parse_reduced(bits).payload, p.n)
        return bits, isinstance(inner, Bottom)
    raise ValueError(f"unknown scheme {scheme!r}")


def _decode_any(scheme: str, q: Dist, bits: str, delta: int, seed: int):
    if scheme == "simple":
        return decode_simple(q, bits, seed=seed)
    if scheme == "low":
        return decode_low(q, parse_low(bits, q.n), delta, seed=seed)
    if scheme == "reduced+simple":
        return decode_reduced(q, bits, delta, "simple", seed=seed)
    if scheme == "reduced+low":
        return decode_reduced(q, bits, delta, "low", seed=seed)
    raise ValueError(f"unknown scheme {scheme!r}")


def _percentiles(lengths: list[int]) -> dict:
    if not lengths:
        return {}
    ordered = sorted(lengths)
    pick = lambda q: ordered[min(len(ordered) - 1, int(q * len(ordered)))]
    return {"p50": pick(0.50), "p90": pick(0.90), "p99": pick(0.99), "max": ordered[-1]}


def verify_scheme(
    scheme: str,
    n: int,
    delta: int,
    epsilon: float,
    b: int,
    seed: int = PROTOCOL_SEED,
    *,
    triple_budget: int = DEFAULT_TRIPLE_BUDGET,
    inject_faults: bool = True,
) -> VerificationReport:
    """Exhaustively check a scheme over the dyadic grid with denominator 2**b.

    For every grid prior P, every grid prior Q within delta of it, and
    every supported message: a non-refused encoding must decode to the
    message under Q.  Decoded answers are additionally replayed against
    the decoder's own contract (for the log-probability codec: the answer
    must be Q-heaviest and must lie in the sender's rival set).  Refusal
    mass and expected lengths are computed exactly per distribution.
    One corrupted-bit probe per (P, m) exercises fault handling; its
    outcomes are tallied, never counted as failures.
    """
    report = VerificationReport(scheme, n, delta, float(epsilon), b)
    rng = random.Random(seed ^ 0xFA)
    grid = enum_grid_dists(n, 1 << b)
    report.dists_tested = len(grid)
    lengths: list[int] = []
    decode_memo: dict = {}
    for p in grid:
        neighbors = perturb_enumerate(p, delta, b)
        report.pairs_tested += len(neighbors)
        support = p.support()
        wires = {}
        bottom_mass = Fraction(0)
        length_mass = Fraction(0)
        for m in support:
            bits, refused = _encode_any(scheme, p, m, delta, epsilon, seed)
            wires[m] = (bits, refused)
            lengths.append(len(bits))
            length_mass += p.prob(m) * len(bits)
            if refused:
                bottom_mass += p.prob(m)
            if inject_faults and bits:
                report.fault_injections += 1
                flipped = rng.randrange(len(bits))
                corrupt = bits[:flipped] + ("1" if bits[flipped] == "0" else "0") + bits[flipped + 1 :]
                try:
                    out = _decode_any(scheme, p, corrupt, delta, seed)
                except CodecError:
                    report.faults_detected += 1
                else:
                    if out == m:
                        report.faults_survived += 1
                    else:
                        report.faults_detected += 1
        for q in neighbors:
            for m in support:
                bits, refused = wires[m]
                report.triples_tested += 1
                if report.triples_tested > triple_budget:
                    raise BudgetExhausted(f"more than {triple_budget} triples")
                key = (q, bits)
                if key in decode_memo:
                    out = decode_memo[key]
                else:
                    try:
                        out = _decode_any(scheme, q, bits, delta, seed)
                    except CodecError as exc:
                        out = exc
                    decode_memo[key] = out
                failure = None
                if refused:
                    if not isinstance(out, Bottom):
                        failure = "refusal did not decode to a refusal"
                elif isinstance(out, CodecError):
                    failure = f"decoder raised {type(out).__name__}: {out}"
                elif out != m:
                    failure = f"decoded {out}"
                elif scheme == "simple":
                    if q.prob(out) < q.prob(m):
                        failure = "replay: answer is not Q-heaviest"
                    elif out != m and out not in rival_set(p, m, delta):
                        failure = "replay: answer outside the rival set"
                if failure is not None:
                    report.failures.append(
                        {
                            "p": dist_to_json(p),
                            "q": dist_to_json(q),
                            "m": m,
                            "what": failure,
                        }
                    )
        report.per_dist.append(
            {
                "dist": "/".join(str(x) for x in p.probs),
                "entropy": entropy(p),
                "expected_length": float(length_mass),
                "bottom_mass": float(bottom_mass),
                "pairs": len(neighbors),
            }
        )
    if lengths:
        report.mean_length = sum(lengths) / len(lengths)
        report.length_percentiles = _percentiles(lengths)
    if report.per_dist:
        report.bottom_rate = max(row["bottom_mass"] for row in report.per_dist)
    return report


def verify_roundtrip_instance(
    scheme: str,
    p: Dist,
    qs: list[Dist],
    delta: int,
    epsilon: float = 0.0,
    seed: int = PROTOCOL_SEED,
) -> dict:
    """Round-trip one prior against a list of receiver priors, exactly.

    Returns failure count, exact expected wire length and refusal mass
    under p, and the longest wire seen.  Used on named family instances
    where full grid enumeration is out of reach.
    """
    failures = 0
    bottom_mass = Fraction(0)
    length_mass = Fraction(0)
    worst = 0
    for m in p.support():
        bits, refused = _encode_any(scheme, p, m, delta, epsilon, seed)
        length_mass += p.prob(m) * len(bits)
        worst = max(worst, len(bits))
        if refused:
            bottom_mass += p.prob(m)
            continue
        for q in qs:
            try:
                out = _decode_any(scheme, q, bits, delta, seed)
            except CodecError:
                failures += 1
                continue
            if out != m:
                failures += 1
    return {
        "failures": failures,
        "expected_length": float(length_mass),
        "max_length": worst,
        "bottom_mass": float(bottom_mass),
        "support": p.support_size,
    }


def sample_bottom_rate(
    p: Dist,
    delta: int,
    epsilon: float,
    draws: int,
    sample_seed: int,
    seed: int = PROTOCOL_SEED,
) -> dict:
    """Empirical refusal rate over messages drawn exactly from p.

    Sampling uses the exact cumulative numerators over the common
    denominator, so the draw distribution is p itself, not a float
    approximation.  Encodings are memoized per message.
    """
    denominator = math.lcm(*(pr.denominator for pr in p.probs))
    cumulative = []
    running = 0
    for pr in p.probs:
        running += pr.numerator * (denominator // pr.denominator)
        cumulative.append(running)
    rng = random.Random(sample_seed)
    refusal: dict[int, bool] = {}
    bottoms = 0
    for _ in range(draws):
        u = rng.randrange(denominator)
        m = bisect_right(cumulative, u) + 1
        if m not in refusal:
            codeword = encode_low(p, m, delta, epsilon=epsilon, seed=seed)
            refusal[m] = isinstance(codeword, Bottom)
        bottoms += refusal[m]
    return {"draws": draws, "bottoms": bottoms, "rate": bottoms / draws}


class SimpleLengthMeter:
    """Codeword lengths for the log-probability codec, measured cheaply.

    A full encode hashes the whole rival set per candidate index.  Here
    rival sets are prefixes of the support sorted by descending
    probability, so one hash-value counter per (width, index, prefix)
    answers isolation for every message sharing that prefix: the message
    is isolated exactly when its own hash value is counted once.
    """

    def __init__(self, p: Dist, delta: int, seed: int = PROTOCOL_SEED):
        if delta < 0:
            raise ValueError("delta must be nonnegative")
        self.p = p
        self.delta = delta
        self.seed = seed
        self.order = sorted(p.support(), key=lambda m: (-p.prob(m), m))
        self.probs_desc = [p.prob(m) for m in self.order]
        self._prefix_for: dict[Fraction, int] = {}
        self._counters: dict[tuple[int, int, int], Counter] = {}
        self._families: dict[int, IsolatingFamily] = {}

    def _family(self, width: int) -> IsolatingFamily:
        fam = self._families.get(width)
        if fam is None:
            fam = IsolatingFamily(self.p.n, width, self.seed)
            self._families[width] = fam
        return fam

    def _prefix_len(self, prob: Fraction) -> int:
        hit = self._prefix_for.get(prob)
        if hit is not None:
            return hit
        threshold = prob / (1 << (2 * self.delta))
        lo, hi = 0, len(self.probs_desc)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.probs_desc[mid] >= threshold:
                lo = mid + 1
            else:
                hi = mid
        self._prefix_for[prob] = lo
        return lo

    def _counter(self, width: int, index: int, prefix: int) -> Counter:
        key = (width, index, prefix)
        hit = self._counters.get(key)
        if hit is None:
            fam = self._family(width)
            hit = Counter(fam.eval_int(index, m) for m in self.order[:prefix])
            self._counters[key] = hit
        return hit

    def length_of(self, m: int) -> int:
        """Exact wire length of the codeword for m (index prefix plus hash bits)."""
        prob = self.p.prob(m)
        if prob == 0:
            raise ValueError(f"message {m} has probability zero")
        rank = floor_neg_log(prob)
        width = rank + 2 * self.delta + 1
        prefix = self._prefix_len(prob)
        fam = self._family(width)
        index = 1
        while True:
            own = fam.eval_int(index, m)
            if self._counter(width, index, prefix)[own] == 1:
                break
            index += 1
        gamma_len = 2 * (index.bit_length() - 1) + 1
        return gamma_len + width

    def expected_length(self) -> float:
        total = Fraction(0)
        for m in self.order:
            total += self.p.prob(m) * self.length_of(m)
        return float(total)

    def sample_lengths(self, draws: int, sample_seed: int) -> list[int]:
        cumulative = []
        running = 0.0
        for m in self.order:
            running += float(self.p.prob(m))
            cumulative.append(running)
        rng = random.Random(sample_seed)
        out = []
        cache: dict[int, int] = {}
        for _ in range(draws):
            u = rng.random() * cumulative[-1]
            m = self.order[min(bisect_right(cumulative, u), len(self.order) - 1)]
            if m not in cache:
                cache[m] = self.length_of(m)
            out.append(cache[m])
        return out


def brute_chromatic(graph, *, node_budget: int = 5_000_000) -> int:
    """Chromatic number by plain backtracking in fixed vertex order.

    Deliberately naive: no saturation ordering, no clique seeding; only
    the new-color symmetry cap.  The independent check for the exact
    solver.
    """
    n = len(graph.vertices)
    if n == 0:
        return 0
    adj = graph.adj
    colors = [0] * n
    nodes = 0

    def colorable(k: int, v: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExhausted(f"brute solver exceeded {node_budget} nodes")
        if v == n:
            return True
        used = max(colors[:v], default=0)
        for c in range(1, min(used + 1, k) + 1):
            if all(colors[w] != c for w in adj[v] if w < v):
                colors[v] = c
                if colorable(k, v + 1):
                    return True
        colors[v] = 0
        return False

    for k in range(1, n + 1):
        if colorable(k, 0):
            return k
    raise AssertionError("unreachable: n colors always suffice")


def brute_subperm_distance(n: int, pi: tuple, sigma: tuple) -> int:
    """Distance by definition: best max-displacement over all full extensions."""
    if len(pi) != len(sigma):
        raise ValueError("subpermutations must have equal length")
    rest_pi = [x for x in range(1, n + 1) if x not in pi]
    rest_sigma = [x for x in range(1, n + 1) if x not in sigma]
    best = None
    for tail_pi in permutations(rest_pi):
        full_pi = pi + tail_pi
        pos_pi = {x: i for i, x in enumerate(full_pi)}
        for tail_sigma in permutations(rest_sigma):
            full_sigma = sigma + tail_sigma
            worst = max(abs(pos_pi[x] - i) for i, x in enumerate(full_sigma))
            if best is None or worst < best:
                best = worst
    return best


def _brute_sandwich(b: tuple, a: tuple, d: int) -> bool:
    # Raw form of the chain sandwich; shares nothing with the chains module.
    if len(b) != len(a) - d:
        return False
    for i, level in enumerate(b):
        lower = a[i - d] if i - d >= 0 else frozenset()
        if not (lower <= level <= a[i + d]):
            return False
    return True


def enum_all_chains(n: int, size_bound: int, half_length: int) -> list[tuple]:
    """Every chain of length 2*half_length over {1..n} with at most
    size_bound elements, as raw tuples of frozensets."""
    length = 2 * half_length
    out = []
    levels = list(range(length + 1))
    for count in range(1, size_bound + 1):
        for members in combinations(range(1, n + 1), count):
            for entries in product(levels, repeat=count):
                if sum(1 for e in entries if e == 0) != 1:
                    continue
                sets = []
                for lvl in range(length + 1):
                    sets.append(frozenset(m for m, e in zip(members, entries) if e <= lvl))
                out.append(tuple(sets))
    return out


def brute_chain_collision_scan(
    n: int,
    size_bound: int,
    half_length: int,
    seed: int = PROTOCOL_SEED,
) -> dict:
    """Scan all small chains for color-value collisions that would corrupt decoding.

    Two same-length chains with different leaders that share a
    distance-one witness must get different color values; any
    counterexample is returned verbatim.  Also confirms every color value
    fits the advertised magnitude bound at each depth.
    """
    from .chains import Chain

    raw = enum_all_chains(n, size_bound, half_length)
    chains = [Chain(sets) for sets in raw]
    colors = [
        chain_color(c, size_bound, n, seed) for c in chains
    ]
    length = 2 * half_length
    witness_levels = list(range(length))
    witnesses = []
    for sets in raw:
        near = set()
        if length == 0:
            witnesses.append(frozenset())
            continue
        elems = sorted(sets[-1])
        for count in range(1, len(elems) + 1):
            for members in combinations(elems, count):
                for entries in product(range(length), repeat=count):
                    if sum(1 for e in entries if e == 0) != 1:
                        continue
                    b = tuple(
                        frozenset(m for m, e in zip(members, entries) if e <= lvl)
                        for lvl in witness_levels
                    )
                    if _brute_sandwich(b, sets, 1):
                        near.add(b)
        witnesses.append(frozenset(near))
    collisions = []
    value_violations = []
    bound = color_value_bound(half_length, size_bound, n)
    for i, color in enumerate(colors):
        if color.value > bound:
            value_violations.append({"chain": [sorted(s) for s in raw[i]], "value": color.value})
    pairs_checked = 0
    for i in range(len(chains)):
        for j in range(i + 1, len(chains)):
            if chains[i].leader == chains[j].leader:
                continue
            if witnesses[i].isdisjoint(witnesses[j]):
                continue
            pairs_checked += 1
            if colors[i].value == colors[j].value:
                collisions.append(
                    {
                        "a": [sorted(s) for s in raw[i]],
                        "b": [sorted(s) for s in raw[j]],
                        "value": colors[i].value,
                    }
                )
    return {
        "n": n,
        "size_bound": size_bound,
        "half_length": half_length,
        "chains": len(chains),
        "pairs_with_shared_witness": pairs_checked,
        "collisions": collisions,
        "value_bound": bound,
        "value_violations": value_violations,
    }
