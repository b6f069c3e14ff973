"""Brute-force walk enumeration, the independent check on the recurrences.

A closed walk on a q-hypergraph is recorded up to relabelling of vertices:
visited vertices get labels ``1, 2, ...`` in order of first visit, hyperedges
get ids ``1, 2, ...`` in order of first use, and the vertices that belong to
a hyperedge but are never stepped on are anonymous.  The anonymous vertices
are described by an overlap map ``alpha -> |beta_alpha|``: how many of them
lie in exactly the hyperedges of ``alpha``.

Two generators are provided.  :func:`enumerate_classes` with
``essential_only=True`` grows walks on a hypertree directly.  With
``essential_only=False`` it enumerates every class, including walks whose
skeleton has cycles and hyperedges sharing anonymous vertices; this is what
the exact finite-``N`` moment needs.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Hashable, Iterator, Sequence

from .params import ModelParams, ParameterError, WeightMomentSeq, as_moment_seq, falling_factorial

__all__ = [
    "MinimalWalkClass",
    "EnumerationCapError",
    "DEFAULT_ENUMERATION_CAP",
    "enumerate_classes",
    "is_essential",
    "class_contribution",
    "oracle_moment",
    "oracle_s_table",
    "oracle_k_count",
    "exact_finite_moment",
    "class_from_walk",
    "dump_classes",
]

DEFAULT_ENUMERATION_CAP = 6


class EnumerationCapError(ValueError):
    """Requested walk length is above the enumeration cap."""


Step = tuple[int, int, int]


@dataclass(frozen=True)
class MinimalWalkClass:
    """Canonical representative of an equivalence class of closed walks.

    Attributes
    ----------
    q : int
        Hyperedge size.
    steps : tuple of (from_vertex, edge_id, to_vertex)
        Vertices and edges are 1-based, numbered by first visit / first use.
    edge_vertices : tuple of tuple of int
        Visited members of each hyperedge, sorted.
    overlap : tuple of (alpha, size)
        ``alpha`` is a sorted tuple of edge ids; ``size`` anonymous vertices
        lie in exactly those hyperedges.  Sorted, zero sizes omitted.
    """

    q: int
    steps: tuple[Step, ...]
    edge_vertices: tuple[tuple[int, ...], ...]
    overlap: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def n_edges(self) -> int:
        return len(self.edge_vertices)

    @cached_property
    def n_visited(self) -> int:
        if not self.steps:
            return 1
        return max(max(a, b) for a, _, b in self.steps)

    @property
    def n_anonymous(self) -> int:
        return sum(size for _, size in self.overlap)

    @property
    def n_vertices(self) -> int:
        return self.n_visited + self.n_anonymous

    @cached_property
    def traversals(self) -> tuple[int, ...]:
        """``n_w(e)`` for each edge id in order."""
        counts = Counter(e for _, e, _ in self.steps)
        return tuple(counts[e] for e in range(1, self.n_edges + 1))

    @property
    def root_departures(self) -> int:
        return sum(1 for a, _, _ in self.steps if a == 1)

    @property
    def key(self) -> tuple:
        return (self.q, self.steps, self.edge_vertices, self.overlap)

    def anonymous_in(self, edge: int) -> int:
        return sum(size for alpha, size in self.overlap if edge in alpha)

    def check(self) -> None:
        """Raise ``ValueError`` if any structural invariant fails."""
        steps = self.steps
        if steps and (steps[0][0] != 1 or steps[-1][2] != 1):
            raise ValueError("walk is not closed at the root")
        seen = 1
        for i, (a, e, b) in enumerate(steps):
            if a == b:
                raise ValueError(f"step {i} stays at vertex {a}")
            if i and steps[i - 1][2] != a:
                raise ValueError(f"step {i} does not continue from the previous one")
            if b > seen + 1:
                raise ValueError("vertex labels are not in first-visit order")
            seen = max(seen, b)
            if not 1 <= e <= self.n_edges or a not in self.edge_vertices[e - 1] or b not in self.edge_vertices[e - 1]:
                raise ValueError(f"step {i} leaves hyperedge {e}")
        first_use = []
        for _, e, _ in steps:
            if e not in first_use:
                first_use.append(e)
        if first_use != list(range(1, self.n_edges + 1)):
            raise ValueError("edge ids are not in first-use order")
        for e in range(1, self.n_edges + 1):
            if len(self.edge_vertices[e - 1]) + self.anonymous_in(e) != self.q:
                raise ValueError(f"hyperedge {e} does not have q={self.q} vertices")
        members = [frozenset(vs) | {("anon", a) for a, s in self.overlap if e in a}
                   for e, vs in enumerate(self.edge_vertices, start=1)]
        if len(set(members)) != len(members):
            raise ValueError("two edge ids name the same hyperedge")

    def to_record(self, params: ModelParams | None = None, X: WeightMomentSeq | None = None) -> dict:
        rec = {
            "q": self.q,
            "length": self.length,
            "steps": [list(s) for s in self.steps],
            "edges": [list(vs) for vs in self.edge_vertices],
            "overlap": [{"alpha": list(a), "size": s} for a, s in self.overlap],
            "traversals": list(self.traversals),
            "essential": is_essential(self, self.q),
        }
        if params is not None and X is not None:
            rec["contribution"] = _frac_str(class_contribution(self, params, X))
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "MinimalWalkClass":
        return cls(
            q=rec["q"],
            steps=tuple(tuple(s) for s in rec["steps"]),
            edge_vertices=tuple(tuple(vs) for vs in rec["edges"]),
            overlap=tuple((tuple(o["alpha"]), o["size"]) for o in rec["overlap"]),
        )


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# essential walks: grow the walk on a hypertree


def _essential_walks(k: int, q: int) -> Iterator[MinimalWalkClass]:
    if k == 0:
        yield MinimalWalkClass(q, (), (), ())
        return
    steps: list[Step] = []
    edges: list[list[int]] = []       # visited members per edge
    edge_depth: list[int] = []        # depth of the member closest to the root
    vertex_edges: dict[int, list[int]] = {1: []}
    depth = {1: 0}

    def finish() -> MinimalWalkClass:
        ev = tuple(tuple(sorted(m)) for m in edges)
        ov = tuple(sorted(((e + 1,), q - len(m)) for e, m in enumerate(edges) if len(m) < q))
        return MinimalWalkClass(q, tuple(steps), ev, ov)

    def visit_new(v: int, e: int, left: int) -> Iterator[MinimalWalkClass]:
        new = len(depth) + 1
        depth[new] = edge_depth[e] + 1
        vertex_edges[new] = [e]
        edges[e].append(new)
        steps.append((v, e + 1, new))
        yield from dfs(new, left - 1)
        steps.pop()
        edges[e].pop()
        del vertex_edges[new], depth[new]

    def dfs(v: int, left: int) -> Iterator[MinimalWalkClass]:
        if left == 0:
            if v == 1:
                yield finish()
            return
        for e in list(vertex_edges[v]):
            for u in list(edges[e]):
                if u != v and depth[u] <= left - 1:
                    steps.append((v, e + 1, u))
                    yield from dfs(u, left - 1)
                    steps.pop()
            if len(edges[e]) < q and edge_depth[e] + 1 <= left - 1:
                yield from visit_new(v, e, left)
        # a fresh hyperedge through v; its other members are all unvisited
        if depth[v] + 1 <= left - 1:
            e = len(edges)
            edges.append([v])
            edge_depth.append(depth[v])
            vertex_edges[v].append(e)
            yield from visit_new(v, e, left)
            vertex_edges[v].pop()
            edge_depth.pop()
            edges.pop()

    yield from dfs(1, k)


# ---------------------------------------------------------------------------
# all classes


def _vertex_patterns(k: int) -> Iterator[tuple[int, ...]]:
    """Closed vertex sequences ``w_1..w_k`` in first-visit labelling."""
    if k == 0:
        yield (1,)
        return
    if k == 1:
        return

    def rec(seq: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(seq) == k:
            if seq[-1] != 1:
                yield tuple(seq) + (1,)
            return
        for nxt in range(1, top + 2):
            if nxt != seq[-1]:
                seq.append(nxt)
                yield from rec(seq, max(top, nxt))
                seq.pop()

    yield from rec([1], 1)


def _set_partitions(k: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``k`` (block ids from 1)."""
    if k == 0:
        yield ()
        return

    def rec(seq: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(seq) == k:
            yield tuple(seq)
            return
        for b in range(1, top + 2):
            seq.append(b)
            yield from rec(seq, max(top, b))
            seq.pop()

    yield from rec([1], 1)


def _overlaps(capacity: list[int]) -> Iterator[dict[int, int]]:
    """Multisets of nonempty edge subsets covering edge ``b`` exactly ``capacity[b]`` times.

    Subsets are bitmasks over edge indices; the result maps mask -> count.
    """
    m = len(capacity)
    cap = list(capacity)
    chosen: dict[int, int] = {}

    def rec(last: tuple[int, int]) -> Iterator[dict[int, int]]:
        first = next((b for b in range(m) if cap[b] > 0), None)
        if first is None:
            yield dict(chosen)
            return
        others = [b for b in range(first + 1, m) if cap[b] > 0]
        for r in range(len(others) + 1):
            for combo in itertools.combinations(others, r):
                mask = (1 << first) | sum(1 << b for b in combo)
                if (first, mask) < last:
                    continue
                for b in (first,) + combo:
                    cap[b] -= 1
                chosen[mask] = chosen.get(mask, 0) + 1
                yield from rec((first, mask))
                chosen[mask] -= 1
                if not chosen[mask]:
                    del chosen[mask]
                for b in (first,) + combo:
                    cap[b] += 1

    yield from rec((0, 0))


def _all_walks(k: int, q: int) -> Iterator[MinimalWalkClass]:
    if k == 0:
        yield MinimalWalkClass(q, (), (), ())
        return
    for pattern in _vertex_patterns(k):
        t = max(pattern)
        pairs = list(zip(pattern[:-1], pattern[1:]))
        for blocks in _set_partitions(k):
            m = max(blocks)
            touched = [set() for _ in range(m)]
            for (a, b), e in zip(pairs, blocks):
                touched[e - 1].update((a, b))
            if any(len(T) > q for T in touched):
                continue
            steps = tuple((a, e, b) for (a, b), e in zip(pairs, blocks))
            choices = []
            for T in touched:
                spare = [v for v in range(1, t + 1) if v not in T]
                opts = []
                for r in range(min(q - len(T), len(spare)) + 1):
                    for extra in itertools.combinations(spare, r):
                        opts.append(tuple(sorted(T.union(extra))))
                choices.append(opts)
            for visited in itertools.product(*choices):
                for ov in _overlaps([q - len(vs) for vs in visited]):
                    if not _distinct_edges(visited, ov):
                        continue
                    overlap = tuple(sorted(
                        (tuple(b + 1 for b in range(m) if mask >> b & 1), s) for mask, s in ov.items()
                    ))
                    yield MinimalWalkClass(q, steps, visited, overlap)


def _distinct_edges(visited: Sequence[tuple[int, ...]], ov: dict[int, int]) -> bool:
    seen = set()
    for b, vs in enumerate(visited):
        sig = (vs, frozenset(mask for mask in ov if mask >> b & 1))
        if sig in seen:
            return False
        seen.add(sig)
    return True


def enumerate_classes(k: int, q: int, essential_only: bool = True) -> Iterator[MinimalWalkClass]:
    """Yield one canonical representative per class of closed ``k``-step walks.

    With ``essential_only`` only hypertree-skeleton classes are produced, by
    a generator that never leaves the hypertree; otherwise every class is
    produced, including all overlap patterns of the anonymous vertices.
    """
    if k < 0 or q < 2:
        raise ValueError(f"need k >= 0 and q >= 2, got k={k}, q={q}")
    if essential_only:
        return _essential_walks(k, q)
    return _all_walks(k, q)


def is_essential(w: MinimalWalkClass, q: int) -> bool:
    """True iff the skeleton is a hypertree, ``|V| = (q-1)|E| + 1``."""
    return w.n_vertices == (q - 1) * w.n_edges + 1


def class_contribution(w: MinimalWalkClass, params: ModelParams, X: WeightMomentSeq) -> Fraction:
    """Limiting contribution ``prod_e p X_{n(e)} / (q - |visited(e)|)!`` (zero unless essential)."""
    if not is_essential(w, params.q):
        return Fraction(0)
    out = Fraction(1)
    for vs, n in zip(w.edge_vertices, w.traversals):
        out *= params.p * X[n] / math.factorial(params.q - len(vs))
    return out


def oracle_moment(k: int, params: ModelParams, X: WeightMomentSeq | Sequence) -> Fraction:
    """Limiting moment ``m_k`` as a sum over essential classes."""
    X = as_moment_seq(X)
    X.require(k)
    return sum((class_contribution(w, params, X) for w in _essential_walks(k, params.q)), Fraction(0))


def oracle_s_table(l_max: int, params: ModelParams, X: WeightMomentSeq | Sequence) -> dict[tuple[int, int], Fraction]:
    """``S(l, r)`` for ``l <= l_max``, grouping essential classes by length and root departures."""
    X = as_moment_seq(X)
    X.require(l_max)
    table: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for l in range(l_max + 1):
        for r in range(l // 2 + 1):
            table[l, r] = Fraction(0)
        for w in _essential_walks(l, params.q):
            table[l, w.root_departures] += class_contribution(w, params, X)
    return dict(table)


@lru_cache(maxsize=None)
def _k_count_table(kappa: int, F: int) -> dict[tuple[int, tuple[int, ...]], int]:
    counts: Counter = Counter()
    for tail in itertools.product(range(1, kappa + 1), repeat=F):
        seq = (1,) + tail
        if any(a == b for a, b in zip(seq, seq[1:])):
            continue
        top = 1
        ok = True
        for v in seq:
            if v > top + 1:
                ok = False
                break
            top = max(top, v)
        if not ok or top != kappa:
            continue
        f = [0] * kappa
        for v in seq[:-1]:
            f[v - 1] += 1
        counts[seq[-1], tuple(f)] += 1
    return dict(counts)


def oracle_k_count(kappa: int, j: int, f: Sequence[int]) -> int:
    """Count within-edge walks by listing every vertex sequence."""
    f = tuple(f)
    if len(f) != kappa or not 1 <= j <= kappa or any(x < 0 for x in f):
        raise ValueError(f"bad arguments kappa={kappa}, j={j}, f={f}")
    return _k_count_table(kappa, sum(f)).get((j, f), 0)


def exact_finite_moment(
    N: int,
    k: int,
    params: ModelParams,
    X: WeightMomentSeq | Sequence,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Fraction:
    """Exact ``E Tr(A^k) / N`` at finite ``N``, summed over all walk classes.

    A class with ``|V|`` vertices is realised by
    ``N (N-1) ... (N-|V|+1) / prod_alpha |beta_alpha|!`` concrete walks.
    """
    if k > cap:
        raise EnumerationCapError(f"k={k} exceeds the enumeration cap {cap}")
    if N < params.q:
        raise ParameterError(f"N={N} is smaller than q={params.q}")
    X = as_moment_seq(X)
    X.require(k)
    p, q = params.p, params.q
    total = Fraction(0)
    for w in _all_walks(k, q):
        count = falling_factorial(N, w.n_vertices)
        if not count:
            continue
        weight = Fraction(count, math.prod(math.factorial(s) for _, s in w.overlap))
        for n in w.traversals:
            weight *= X[n]
        total += weight * p ** w.n_edges / Fraction(N) ** ((q - 1) * w.n_edges + 1)
    return total


def class_from_walk(vertices: Sequence[Hashable], edges: Sequence[Sequence[Hashable]], q: int) -> MinimalWalkClass:
    """Canonical class of a concrete closed walk.

    ``vertices`` is ``w_1, ..., w_k`` (the return to ``w_1`` implied or
    repeated at the end) and ``edges[i]`` is the hyperedge used by step
    ``i``, given as a collection of ``q`` vertex labels of any hashable type.
    """
    vertices = list(vertices)
    k = len(edges)
    if len(vertices) == k + 1:
        if vertices[-1] != vertices[0]:
            raise ValueError("walk is not closed")
        vertices = vertices[:-1]
    if len(vertices) != k:
        raise ValueError("need one hyperedge per step")
    edge_sets = [frozenset(e) for e in edges]
    for i, e in enumerate(edge_sets):
        a, b = vertices[i], vertices[(i + 1) % k]
        if len(e) != q:
            raise ValueError(f"hyperedge {sorted(map(str, e))} does not have {q} vertices")
        if a == b or a not in e or b not in e:
            raise ValueError(f"step {i} from {a!r} to {b!r} is not a move inside {sorted(map(str, e))}")
    vlabel: dict[Hashable, int] = {}
    for v in vertices:
        vlabel.setdefault(v, len(vlabel) + 1)
    elabel: dict[frozenset, int] = {}
    for e in edge_sets:
        elabel.setdefault(e, len(elabel) + 1)
    steps = tuple((vlabel[vertices[i]], elabel[e], vlabel[vertices[(i + 1) % k]]) for i, e in enumerate(edge_sets))
    ordered = sorted(elabel, key=elabel.get)
    edge_vertices = tuple(tuple(sorted(vlabel[v] for v in e if v in vlabel)) for e in ordered)
    membership: Counter = Counter()
    for v in set().union(*ordered) if ordered else ():
        if v not in vlabel:
            membership[tuple(i + 1 for i, e in enumerate(ordered) if v in e)] += 1
    return MinimalWalkClass(q, steps, edge_vertices, tuple(sorted(membership.items())))


def dump_classes(classes, fh, params: ModelParams | None = None, X: WeightMomentSeq | None = None) -> int:
    """Write classes as line-delimited JSON; return the number written."""
    n = 0
    for w in classes:
        fh.write(json.dumps(w.to_record(params, X), sort_keys=True) + "\n")
        n += 1
    return n
