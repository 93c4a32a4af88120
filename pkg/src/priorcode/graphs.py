"""Graphs on partial permutations and the colorings that tame them.

A k-subpermutation is an injective tuple of k elements of {1..n}.  Two of
them are adjacent in the uncertainty graph when their first elements
differ and they are within a small displacement distance; adjacent in the
shift graph when one is the other shifted left by one position.  Proper
colorings of uncertainty graphs with few colors are the combinatorial
core of the low-entropy codec, and the shift graph embeds into the
closeness-2 uncertainty graph to give chromatic lower bounds.

Everything here is exact and small-scale: exhaustive adjacency, an exact
branch-and-bound chromatic solver for up to a couple hundred vertices,
and two randomized coloring constructions whose outputs are always
re-verified against the edge list before being reported.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import permutations

from .errors import BudgetExhausted, CapExceeded
from .hashing import DEFAULT_ISOLATION_BUDGET, PROTOCOL_SEED, IsolatingFamily

SubPerm = tuple[int, ...]

DEFAULT_VERTEX_CAP = 50_000
DEFAULT_SOLVER_NODES = 2_000_000
EXACT_SOLVER_VERTEX_LIMIT = 256
DEFAULT_COVER_SAMPLES = 100_000


def all_subperms(n: int, k: int) -> list[SubPerm]:
    """Injective k-tuples over {1..n} in lexicographic order."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= {n}")
    return list(permutations(range(1, n + 1), k))


def subperm_distance(pi: SubPerm, sigma: SubPerm) -> int:
    """Smallest d such that each prefix of one lies inside the d-longer prefix
    of the other (both directions).

    Equivalently: an element at position p of one tuple must appear by
    position p + d of the other, or not at all when p + d exceeds k.  The
    binding constraint per element is closed-form, so no search is needed.
    For full permutations this is exactly the maximum displacement.
    """
    if len(pi) != len(sigma):
        raise ValueError("subpermutations must have equal length")
    k = len(pi)
    need = 0
    for a, b in ((pi, sigma), (sigma, pi)):
        pos = {x: i for i, x in enumerate(b, start=1)}
        for p, x in enumerate(a, start=1):
            q = pos.get(x)
            need = max(need, k - p + 1 if q is None else q - p)
    return need


def restrict_subperm(pi: SubPerm, length: int) -> SubPerm:
    """Prefix of a subpermutation; edge-preserving between uncertainty graphs."""
    if not 0 <= length <= len(pi):
        raise ValueError(f"cannot restrict length {len(pi)} to {length}")
    return pi[:length]


@dataclass(eq=False)
class SubPermGraph:
    """Vertex list plus index-based adjacency sets; kind records the builder."""

    kind: str
    n: int
    k: int
    closeness: int | None
    vertices: tuple[SubPerm, ...]
    adj: tuple[frozenset[int], ...]

    def edges(self):
        for i, nbrs in enumerate(self.adj):
            for j in nbrs:
                if i < j:
                    yield i, j

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj) // 2

    def index_of(self) -> dict[SubPerm, int]:
        return {v: i for i, v in enumerate(self.vertices)}


def _check_vertex_cap(n: int, k: int, cap: int) -> None:
    count = math.perm(n, k)
    if count > cap:
        raise CapExceeded(f"{count} vertices exceed cap {cap}")


def build_unc_graph(n: int, closeness: int, k: int, cap: int = DEFAULT_VERTEX_CAP) -> SubPermGraph:
    """Uncertainty graph: edges join distinct-first subpermutations within closeness."""
    if closeness < 0:
        raise ValueError("closeness must be nonnegative")
    _check_vertex_cap(n, k, cap)
    vertices = tuple(all_subperms(n, k))
    nbrs: list[set[int]] = [set() for _ in vertices]
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if vertices[i][0] != vertices[j][0] and subperm_distance(vertices[i], vertices[j]) <= closeness:
                nbrs[i].add(j)
                nbrs[j].add(i)
    return SubPermGraph("uncertainty", n, k, closeness, vertices, tuple(frozenset(s) for s in nbrs))


def _is_left_shift(pi: SubPerm, sigma: SubPerm) -> bool:
    # pi reads sigma starting one position later, with a fresh final element.
    k = len(pi)
    return all(pi[i] == sigma[i + 1] for i in range(k - 1)) and pi[k - 1] != sigma[0]


def build_shift_graph(n: int, k: int, cap: int = DEFAULT_VERTEX_CAP) -> SubPermGraph:
    """Shift graph: edges join subpermutations that are left/right shifts."""
    _check_vertex_cap(n, k, cap)
    vertices = tuple(all_subperms(n, k))
    nbrs: list[set[int]] = [set() for _ in vertices]
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if _is_left_shift(vertices[i], vertices[j]) or _is_left_shift(vertices[j], vertices[i]):
                nbrs[i].add(j)
                nbrs[j].add(i)
    return SubPermGraph("shift", n, k, None, vertices, tuple(frozenset(s) for s in nbrs))


@dataclass
class ColoringResult:
    """A coloring plus the data needed to re-verify it independently."""

    method: str
    assignment: tuple
    color_count: int
    certificate: dict

    def as_json(self) -> dict:
        return {
            "method": self.method,
            "color_count": self.color_count,
            "certificate": self.certificate,
            "assignment": [str(c) for c in self.assignment],
        }


def check_proper(graph: SubPermGraph, assignment) -> bool:
    return all(assignment[i] != assignment[j] for i, j in graph.edges())


def _require_proper(graph: SubPermGraph, assignment, method: str) -> None:
    if not check_proper(graph, assignment):
        raise AssertionError(f"{method} produced a monochromatic edge")


def greedy_color(graph: SubPermGraph, order: list[int] | None = None) -> ColoringResult:
    """First-fit coloring along the given vertex order; a valid upper bound."""
    n = len(graph.vertices)
    if order is None:
        order = list(range(n))
    assignment: list[int | None] = [None] * n
    for v in order:
        taken = {assignment[w] for w in graph.adj[v] if assignment[w] is not None}
        c = 0
        while c in taken:
            c += 1
        assignment[v] = c
    result = tuple(assignment)
    _require_proper(graph, result, "greedy")
    count = len(set(result)) if n else 0
    return ColoringResult("greedy", result, count, {"order": list(order)})


def greedy_chromatic(graph: SubPermGraph, order: list[int] | None = None) -> int:
    return greedy_color(graph, order).color_count


def _dsatur_assignment(adj: list[frozenset[int]]) -> list[int]:
    n = len(adj)
    assignment: list[int | None] = [None] * n
    saturation: list[set[int]] = [set() for _ in range(n)]
    degrees = [len(a) for a in adj]
    for _ in range(n):
        v = max(
            (u for u in range(n) if assignment[u] is None),
            key=lambda u: (len(saturation[u]), degrees[u], -u),
        )
        c = 0
        while c in saturation[v]:
            c += 1
        assignment[v] = c
        for w in adj[v]:
            saturation[w].add(c)
    return assignment


def _greedy_clique(adj: list[frozenset[int]]) -> list[int]:
    n = len(adj)
    if n == 0:
        return []
    start = max(range(n), key=lambda v: len(adj[v]))
    clique = [start]
    common = set(adj[start])
    while common:
        v = max(common, key=lambda u: len(adj[u] & common))
        clique.append(v)
        common &= adj[v]
    return clique


def exact_chromatic(graph: SubPermGraph, *, node_budget: int = DEFAULT_SOLVER_NODES) -> int:
    """Exact chromatic number by branch and bound.

    Upper bound from a saturation-greedy run, lower bound from a greedy
    clique whose vertices are pre-colored to break symmetry, then
    branching on the most saturated uncolored vertex.  Every improvement
    is re-verified.  Only meant for a few hundred vertices.
    """
    n = len(graph.vertices)
    if n == 0:
        return 0
    if n > EXACT_SOLVER_VERTEX_LIMIT:
        raise CapExceeded(f"exact solver capped at {EXACT_SOLVER_VERTEX_LIMIT} vertices, got {n}")
    adj = list(graph.adj)
    ub_assignment = _dsatur_assignment(adj)
    _require_proper(graph, ub_assignment, "saturation greedy")
    best = max(ub_assignment) + 1
    clique = _greedy_clique(adj)
    if len(clique) == best:
        return best
    colors: list[int | None] = [None] * n
    for rank, v in enumerate(clique):
        colors[v] = rank
    nodes = 0

    def branch(used: int, colored: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExhausted(f"exact solver exceeded {node_budget} nodes")
        if used >= best:
            return
        if colored == n:
            _require_proper(graph, colors, "branch and bound")
            best = used
            return
        v = max(
            (u for u in range(n) if colors[u] is None),
            key=lambda u: (
                len({colors[w] for w in adj[u] if colors[w] is not None}),
                len(adj[u]),
                -u,
            ),
        )
        forbidden = {colors[w] for w in adj[v]}
        for c in range(min(used + 1, best - 1)):
            if c in forbidden:
                continue
            colors[v] = c
            branch(max(used, c + 1), colored + 1)
            colors[v] = None

    branch(len(clique), len(clique))
    return best


def frac_cover_color(
    graph: SubPermGraph,
    closeness: int,
    seed: int,
    *,
    sample_cap: int = DEFAULT_COVER_SAMPLES,
) -> ColoringResult:
    """Cover the graph with sampled independent sets, one color each.

    A sample is a map f from {1..n} into {1..2*closeness}; the vertices
    whose first element maps to 1 while positions 2..closeness+1 avoid 1
    form an independent set (distance closeness forces any two adjacent
    such vertices to overlap in those windows).  Independence is
    re-verified per sample rather than trusted.  Colors are spent only on
    samples that cover something new.
    """
    if graph.k < closeness + 1:
        raise ValueError("need prefix length at least closeness + 1")
    rng = random.Random(seed)
    n_vertices = len(graph.vertices)
    assignment: list[int | None] = [None] * n_vertices
    used_sets: list[list[int]] = []
    samples = 0
    next_color = 0
    while any(c is None for c in assignment):
        samples += 1
        if samples > sample_cap:
            raise BudgetExhausted(f"cover did not finish within {sample_cap} samples")
        f = {x: rng.randrange(1, 2 * closeness + 1) for x in range(1, graph.n + 1)}
        members = [
            i
            for i, v in enumerate(graph.vertices)
            if f[v[0]] == 1 and all(f[v[j]] != 1 for j in range(1, closeness + 1))
        ]
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                if members[b] in graph.adj[members[a]]:
                    raise AssertionError("sampled set is not independent")
        fresh = [i for i in members if assignment[i] is None]
        if not fresh:
            continue
        for i in fresh:
            assignment[i] = next_color
        used_sets.append(members)
        next_color += 1
    result = tuple(assignment)
    _require_proper(graph, result, "fractional cover")
    certificate = {
        "seed": seed,
        "closeness": closeness,
        "samples": samples,
        "sets": used_sets,
    }
    return ColoringResult("fractional-cover", result, next_color, certificate)


def cover_count_bound(graph: SubPermGraph, closeness: int) -> float:
    """Color budget the cover construction is expected to stay within."""
    return 8 * closeness * math.log(len(graph.vertices)) + 10


def level_count_bound(d: int, prev_count: int) -> int:
    """Per-level color budget for the iterated construction."""
    return 2 * d * (d + 1) * max(1, math.ceil(math.log2(max(prev_count, 2))))


def iterated_hash_color(
    n: int,
    closeness: int,
    k: int,
    seed: int = PROTOCOL_SEED,
    *,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    search_budget: int = DEFAULT_ISOLATION_BUDGET,
) -> ColoringResult:
    """Color the uncertainty graph by hashing colors down level by level.

    Prefix length steps up from a base of at most closeness, adding
    closeness per level.  The base level is colored by first element.  At
    each later level a vertex looks at the colors its neighbors received
    after restriction to the previous length; restriction preserves edges,
    so the vertex's own restricted color never appears in that set, and an
    isolating hash index separates it.  The new color is the pair (index,
    hash bits).  Each level is re-verified before moving up.
    """
    if closeness < 1:
        raise ValueError("closeness must be positive")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}")
    base = ((k - 1) % closeness) + 1
    levels = list(range(base, k + 1, closeness))
    prev_colors: dict[SubPerm, object] = {v: v[0] for v in all_subperms(n, base)}
    prev_count = len(set(prev_colors.values()))
    base_graph = build_unc_graph(n, closeness, base, vertex_cap)
    _require_proper(base_graph, tuple(prev_colors[v] for v in base_graph.vertices), "base level")
    certificate: dict = {
        "n": n,
        "closeness": closeness,
        "k": k,
        "seed": seed,
        "levels": [{"k": base, "distinct": prev_count, "method": "first-element"}],
    }
    graph = base_graph
    for level in levels[1:]:
        graph = build_unc_graph(n, closeness, level, vertex_cap)
        dense: dict[object, int] = {}
        inner_ids = []
        for v in graph.vertices:
            color = prev_colors[restrict_subperm(v, level - closeness)]
            inner_ids.append(dense.setdefault(color, len(dense)))
        neighbor_ids = [
            {inner_ids[w] for w in graph.adj[i]} for i in range(len(graph.vertices))
        ]
        d = max((len(s) for s in neighbor_ids), default=0)
        t_bits = max(1, math.ceil(math.log2(max(2 * d, 2))))
        family = IsolatingFamily(max(len(dense), 1), t_bits, seed)
        colors = []
        max_index = 0
        for i in range(len(graph.vertices)):
            own = inner_ids[i]
            if own in neighbor_ids[i]:
                raise AssertionError("restriction hit its own color; previous level improper")
            j = family.find_isolating_index(own, neighbor_ids[i], search_budget)
            max_index = max(max_index, j)
            colors.append((j, family.eval(j, own)))
        _require_proper(graph, colors, f"level {level}")
        distinct = len(set(colors))
        certificate["levels"].append(
            {
                "k": level,
                "d": d,
                "t_bits": t_bits,
                "distinct": distinct,
                "max_index": max_index,
                "prev_distinct": prev_count,
                "count_bound": level_count_bound(d, prev_count),
            }
        )
        prev_colors = dict(zip(graph.vertices, colors))
        prev_count = distinct
    assignment = tuple(prev_colors[v] for v in graph.vertices)
    return ColoringResult("iterated-hash", assignment, prev_count, certificate)


def distinct_restriction_degree(graph: SubPermGraph, length: int) -> int:
    """Largest number of distinct length-prefixes among any vertex's neighbors."""
    best = 0
    for i in range(len(graph.vertices)):
        seen = {restrict_subperm(graph.vertices[w], length) for w in graph.adj[i]}
        best = max(best, len(seen))
    return best


def shift_embedding(pi: SubPerm) -> SubPerm:
    """Reorder a subpermutation from the middle outward: position floor(k/2)
    first, then alternately one step right and one step left.

    Intended to carry shift-graph edges into closeness-2 uncertainty edges;
    how well it does so is measured by embedding_report, not assumed.
    """
    k = len(pi)
    if k < 2:
        raise ValueError("need length at least 2")
    t = k // 2
    positions = [t]
    step = 1
    while len(positions) < k:
        if t + step <= k:
            positions.append(t + step)
        if t - step >= 1:
            positions.append(t - step)
        step += 1
    assert sorted(positions) == list(range(1, k + 1))
    return tuple(pi[p - 1] for p in positions)


def embedding_report(n: int, k: int, cap: int = DEFAULT_VERTEX_CAP) -> dict:
    """Check every shift edge against the embedded pair's uncertainty adjacency.

    Violations (embedded distance > 2, or equal first elements) are
    counted and sampled, never asserted away.
    """
    shift = build_shift_graph(n, k, cap)
    images = [shift_embedding(v) for v in shift.vertices]
    if len(set(images)) != len(images):
        raise AssertionError("embedding is not injective")
    edges = 0
    violations = 0
    examples = []
    for i, j in shift.edges():
        edges += 1
        dist = subperm_distance(images[i], images[j])
        ok = dist <= 2 and images[i][0] != images[j][0]
        if not ok:
            violations += 1
            if len(examples) < 5:
                examples.append(
                    {
                        "pair": [list(shift.vertices[i]), list(shift.vertices[j])],
                        "images": [list(images[i]), list(images[j])],
                        "distance": dist,
                    }
                )
    return {"n": n, "k": k, "edges": edges, "violations": violations, "examples": examples}


def brute_embedding_search(n: int, k: int, cap: int = DEFAULT_VERTEX_CAP) -> list[SubPerm]:
    """All position reorderings that carry every shift edge to a closeness-2 edge.

    Exhaustive over the k! candidate reorderings; only sensible for tiny k.
    """
    shift = build_shift_graph(n, k, cap)
    valid = []
    for rho in permutations(range(1, k + 1)):
        good = True
        for i, j in shift.edges():
            a = tuple(shift.vertices[i][p - 1] for p in rho)
            b = tuple(shift.vertices[j][p - 1] for p in rho)
            if a[0] == b[0] or subperm_distance(a, b) > 2:
                good = False
                break
        if good:
            valid.append(rho)
    return valid
