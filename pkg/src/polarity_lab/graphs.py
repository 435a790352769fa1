"""Polarity graphs, their coordinate models, structural checks and DIMACS I/O."""

from __future__ import annotations

import json
import math
from functools import cached_property
from typing import Callable, Iterable, TextIO

import numpy as np

from .certificates import Certificate, canonical_json, provenance_hash
from .finite_field import FieldCtx
from .planes import Plane, build_pg2
from .polarities import (
    Polarity,
    orthogonal_polarity_pg2,
    orthogonal_star_polarity_pg2,
    unitary_polarity_pg2,
    unitary_star_polarity_pg2,
    verify_polarity,
)

DENSE_LIMIT = 10_000
ISO_LIMIT = 200


class GraphError(ValueError):
    pass


class Graph:
    """Simple undirected graph in CSR form plus a separate loop set.

    Loops never appear in the adjacency; ``loops`` is ``None`` when loop data is
    unknown (as opposed to an empty set).
    """

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray,
                 loops: Iterable[int] | None = None, provenance: dict | None = None,
                 label_fn: Callable[[int], tuple] | None = None):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.loops = None if loops is None else np.unique(np.asarray(list(loops), dtype=np.int64))
        self.provenance = provenance or {}
        self.label_fn = label_fn

    @classmethod
    def from_edges(cls, n: int, edges, loops=None, provenance=None, label_fn=None) -> "Graph":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        e = e[e[:, 0] != e[:, 1]]
        both = np.concatenate([e, e[:, ::-1]])
        both = np.unique(both, axis=0)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both[:, 0], minlength=n), out=indptr[1:])
        return cls(n, indptr, both[:, 1], loops, provenance, label_fn)

    @classmethod
    def from_rows(cls, rows: np.ndarray, loops=None, provenance=None, label_fn=None) -> "Graph":
        """Neighbor rows (may contain the vertex itself or -1 padding)."""
        n = rows.shape[0]
        keep = (rows != np.arange(n)[:, None]) & (rows >= 0)
        rows = np.sort(np.where(keep, rows, n), axis=1)
        counts = keep.sum(axis=1)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = rows[rows < n]
        return cls(n, indptr, indices, loops, provenance, label_fn)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @cached_property
    def loop_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        if self.loops is not None:
            mask[self.loops] = True
        return mask

    def edges(self) -> np.ndarray:
        src = np.repeat(np.arange(self.n), self.degrees)
        sel = src < self.indices
        return np.stack([src[sel], self.indices[sel]], axis=1)

    @cached_property
    def dense(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise GraphError(f"{self.n} vertices is above the dense limit")
        A = np.zeros((self.n, self.n), dtype=bool)
        src = np.repeat(np.arange(self.n), self.degrees)
        A[src, self.indices] = True
        return A

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def padded(self) -> np.ndarray:
        """Neighbor matrix padded with -1 to the maximum degree."""
        k = int(self.degrees.max()) if self.n else 0
        out = np.full((self.n, k), -1, dtype=np.int64)
        col = np.arange(self.indices.size) - np.repeat(self.indptr[:-1], self.degrees)
        out[np.repeat(np.arange(self.n), self.degrees), col] = self.indices
        return out

    def with_edges(self, add=(), remove=()) -> "Graph":
        e = {tuple(sorted(map(int, x))) for x in self.edges().tolist()}
        e |= {tuple(sorted(map(int, x))) for x in add}
        e -= {tuple(sorted(map(int, x))) for x in remove}
        prov = dict(self.provenance, edited={"add": sorted(map(list, add)),
                                             "remove": sorted(map(list, remove))})
        return Graph.from_edges(self.n, sorted(e), self.loops, prov, self.label_fn)

    def without_loops(self) -> "Graph":
        return Graph(self.n, self.indptr, self.indices, None,
                     dict(self.provenance, loops_stripped=True), self.label_fn)

    def induced(self, vertices) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on ``vertices`` (relabelled 0..k-1) and the id map."""
        vs = np.asarray(vertices, dtype=np.int64)
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[vs] = np.arange(vs.size)
        e = self.edges()
        keep = (pos[e[:, 0]] >= 0) & (pos[e[:, 1]] >= 0)
        loops = None if self.loops is None else pos[self.loops][pos[self.loops] >= 0]
        sub = Graph.from_edges(vs.size, pos[e[keep]], loops,
                               {"induced_from": self.provenance_hash, "vertices": vs.tolist()})
        return sub, vs

    def label(self, v: int) -> tuple:
        return self.label_fn(v) if self.label_fn else (v,)

    @cached_property
    def provenance_hash(self) -> str:
        return provenance_hash(self.provenance)

    def is_independent(self, vertices) -> bool:
        vs = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        if vs.size < 2:
            return True
        if self.n <= DENSE_LIMIT:
            return not self.dense[np.ix_(vs, vs)].any()
        inside = np.zeros(self.n, dtype=bool)
        inside[vs] = True
        return not any(inside[self.neighbors(v)].any() for v in vs)


# -- builders -------------------------------------------------------------------

def build_polarity_graph(P: Plane, pol: Polarity, verify: bool = True) -> Graph:
    """p1 ~ p2 iff p1 lies on the polar line of p2; absolute points become loops."""
    if pol.plane is not P:
        raise GraphError("polarity is attached to a different plane")
    if verify:
        cert = verify_polarity(pol)
        if not cert.passed:
            raise GraphError(f"unverified polarity: {cert.details}")
    if not P.materialized:
        raise GraphError("plane is formula-evaluated; use ImplicitPolarityGraph")
    rows = P.line_table[pol.point_to_line]
    loops = np.nonzero(pol.absolute_mask)[0]
    return Graph.from_rows(rows, loops, pol.provenance, P.point_label)


class ImplicitPolarityGraph:
    """Polarity graph whose neighborhoods are evaluated from the plane's formulas."""

    def __init__(self, P: Plane, pol: Polarity):
        self.plane = P
        self.polarity = pol
        self.n = P.n_points
        self.provenance = pol.provenance

    @property
    def loops(self) -> np.ndarray:
        return np.nonzero(self.polarity.absolute_mask)[0]

    def neighbors(self, v: int) -> np.ndarray:
        row = self.plane.line_points(np.array([self.polarity.point_to_line[v]]))[0]
        return np.sort(row[row != v])

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and bool(self.plane.incident([u], [self.polarity.point_to_line[v]])[0])


def _pg2_graph(ctx: FieldCtx, polarity_fn, model: str) -> Graph:
    P = build_pg2(ctx)
    pol = polarity_fn(P)
    G = build_polarity_graph(P, pol)
    G.provenance = {"model": model, "field": ctx.descriptor()}
    return G


def build_er(ctx: FieldCtx) -> Graph:
    """ER_q: x ~ y iff x0 y0 + x1 y1 + x2 y2 = 0."""
    return _pg2_graph(ctx, orthogonal_polarity_pg2, "er")


def build_er_star(ctx: FieldCtx) -> Graph:
    """ER*_q: x ~ y iff x0 y2 - x1 y1 + x2 y0 = 0."""
    return _pg2_graph(ctx, orthogonal_star_polarity_pg2, "er_star")


def build_uq(ctx: FieldCtx) -> Graph:
    """U_q: x ~ y iff x0 y0^s + x1 y1^s + x2 y2^s = 0, s = sqrt(q)."""
    if ctx.n % 2:
        raise GraphError(f"U_q needs square order, got {ctx.q}")
    return _pg2_graph(ctx, unitary_polarity_pg2, "uq")


def build_uq_star(ctx: FieldCtx) -> Graph:
    """U*_q: x ~ y iff x0 y2^s + x2 y0^s = x1 y1^s."""
    if ctx.n % 2:
        raise GraphError(f"U*_q needs square order, got {ctx.q}")
    return _pg2_graph(ctx, unitary_star_polarity_pg2, "uq_star")


class AGraph:
    """A_{q^2,d}: vertices F x F (F = GF(q^2)), encoded ``s*Q + x``;
    (a^d + a, x) ~ (b^d + b, y) iff a^d b + a b^d = x + y.

    ``root[s]`` is the unique a with a^d + a = s.
    """

    def __init__(self, ctx: FieldCtx, d: int):
        F = ctx
        self.ctx = F
        self.d = d
        self.Q = F.q
        self.n = F.q * F.q
        a = F.elements()
        self.ad = np.asarray(F.pow(a, d), dtype=np.int64)  # a^d
        self.trace = np.asarray(F.add(self.ad, a), dtype=np.int64)  # a^d + a
        if np.unique(self.trace).size != F.q:
            raise GraphError(f"x -> x^{d} + x is not a permutation of {F!r}")
        self.root = np.empty(F.q, dtype=np.int64)
        self.root[self.trace] = a
        self.provenance = {"model": "a_q2_d", "field": F.descriptor(), "d": d}

    def label(self, v: int) -> tuple:
        s, x = divmod(int(v), self.Q)
        return ("a_q2_d", int(self.root[s]), s, x)

    def neighbor_block(self, s, x) -> np.ndarray:
        """For vertices (s_i, x_i), row i lists the Q vertices (b^d+b, y) with
        a^d b + a b^d = x + y (including the vertex itself when it is a loop)."""
        F = self.ctx
        s = np.atleast_1d(np.asarray(s))
        x = np.atleast_1d(np.asarray(x))
        a = self.root[s][:, None]
        b = np.arange(self.Q)[None, :]
        lhs = F.add(F.mul(self.ad[a], b), F.mul(a, self.ad[b]))
        y = F.sub(lhs, x[:, None])
        return self.trace[b] * self.Q + y

    def neighbors(self, v: int) -> np.ndarray:
        s, x = divmod(int(v), self.Q)
        row = self.neighbor_block([s], [x])[0]
        return np.sort(row[row != v])

    def adjacent(self, u, v) -> np.ndarray:
        """Vectorized adjacency test (distinct vertices only)."""
        F = self.ctx
        s1, x1 = np.divmod(np.asarray(u), self.Q)
        s2, x2 = np.divmod(np.asarray(v), self.Q)
        a, b = self.root[s1], self.root[s2]
        lhs = F.add(F.mul(self.ad[a], b), F.mul(a, self.ad[b]))
        return (lhs == F.add(x1, x2)) & (np.asarray(u) != np.asarray(v))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacent(int(u), int(v)))

    def tau(self, v):
        """(a^d + a, x) -> affine point (a, x + a^(d+1)) of Pi_f, f = X^(d+1)."""
        F = self.ctx
        s, x = np.divmod(np.asarray(v), self.Q)
        a = self.root[s]
        return a * self.Q + F.add(x, F.mul(self.ad[a], a))

    def tau_inverse(self, point):
        F = self.ctx
        a, y = np.divmod(np.asarray(point), self.Q)
        return self.trace[a] * self.Q + F.sub(y, F.mul(self.ad[a], a))


def build_a_q2_d(ctx: FieldCtx, d: int) -> AGraph:
    from .coloring import admissible_from_field
    admissible_from_field(ctx, d)
    return AGraph(ctx, d)


# -- structural checks -------------------------------------------------------------

def _pair_codes(rows: np.ndarray, n: int) -> np.ndarray:
    """All codes u*n + w (u < w) of pairs inside each padded row."""
    k = rows.shape[1]
    i, j = np.triu_indices(k, 1)
    out = []
    step = max(1, 4_000_000 // max(1, i.size))
    for s in range(0, rows.shape[0], step):
        r = np.sort(rows[s:s + step], axis=1)
        u, w = r[:, i], r[:, j]
        ok = (u >= 0) & (w >= 0)
        out.append((u * n + w)[ok])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _first_repeat(codes: np.ndarray):
    s = np.sort(codes)
    dup = np.nonzero(s[1:] == s[:-1])[0]
    return None if dup.size == 0 else int(s[dup[0]])


def check_c4_free(G: Graph) -> Certificate:
    """Every pair of distinct vertices has at most one common neighbor."""
    codes = _pair_codes(G.padded(), G.n)
    rep = _first_repeat(codes)
    details = {"vertices": G.n, "edges": G.m, "pairs_listed": int(codes.size)}
    if rep is None:
        return Certificate("c4_free", True, G.provenance, details)
    u, w = divmod(rep, G.n)
    common = np.intersect1d(G.neighbors(u), G.neighbors(w))
    return Certificate("c4_free", False, G.provenance, details,
                       {"pair": [u, w], "common_neighbors": common.tolist()})


def plane_order_of(n: int) -> int:
    q = (math.isqrt(4 * n - 3) - 1) // 2
    if q * q + q + 1 != n:
        raise GraphError(f"{n} vertices is not q^2+q+1")
    return q


def check_nsq_identity(G: Graph) -> Certificate:
    """Looped adjacency N satisfies N^2 = qI + J, checked combinatorially.

    Every looped neighborhood has q+1 vertices and every pair of distinct
    vertices has exactly one common looped neighbor.
    """
    if G.loops is None:
        raise GraphError("loop data is required for the N^2 = qI + J identity")
    q = plane_order_of(G.n)
    rows = G.padded()
    looped = np.concatenate([rows, np.where(G.loop_mask, np.arange(G.n), -1)[:, None]], axis=1)
    sizes = (looped >= 0).sum(axis=1)
    details = {"q": q, "vertices": G.n}
    bad = np.nonzero(sizes != q + 1)[0]
    if bad.size:
        v = int(bad[0])
        return Certificate("nsq_identity", False, G.provenance, details,
                           {"diagonal": v, "value": int(sizes[v]), "expected": q + 1})
    codes = _pair_codes(looped, G.n)
    rep = _first_repeat(codes)
    if rep is not None:
        return Certificate("nsq_identity", False, G.provenance, details,
                           {"pair": list(divmod(rep, G.n)), "common": ">1"})
    seen = np.zeros(G.n * G.n, dtype=bool)
    seen[codes] = True
    seen = seen.reshape(G.n, G.n)
    missing = np.argwhere(np.triu(~seen, 1))
    if missing.size:
        return Certificate("nsq_identity", False, G.provenance, details,
                           {"pair": missing[0].tolist(), "common": 0})
    return Certificate("nsq_identity", True, G.provenance, details)


def degree_law(G: Graph) -> Certificate:
    """Degrees in {q, q+1}, the q-degree vertices being exactly the loops."""
    q = plane_order_of(G.n)
    deg = G.degrees
    ok = bool(np.all(np.where(G.loop_mask, deg == q, deg == q + 1)))
    return Certificate("degree_law", ok, G.provenance,
                       {"q": q, "min_degree": int(deg.min()), "max_degree": int(deg.max())})


# -- small isomorphism search ---------------------------------------------------------

def _refine(G: Graph, colors: list[int]) -> list[tuple]:
    """One round of color refinement over neighbor color multisets."""
    return [(colors[v], tuple(sorted(colors[u] for u in G.neighbors(v)))) for v in range(G.n)]


def _joint_colors(G1: Graph, G2: Graph) -> tuple[list[int], list[int]]:
    c1 = [int(G1.loop_mask[v]) for v in range(G1.n)]
    c2 = [int(G2.loop_mask[v]) for v in range(G2.n)]
    for _ in range(G1.n):
        s1, s2 = _refine(G1, c1), _refine(G2, c2)
        palette = {s: i for i, s in enumerate(sorted(set(s1) | set(s2)))}
        n1 = [palette[s] for s in s1]
        n2 = [palette[s] for s in s2]
        if len(set(n1)) == len(set(c1)) and len(set(n2)) == len(set(c2)):
            return n1, n2
        c1, c2 = n1, n2
    return c1, c2


def iso_small(G1: Graph, G2: Graph, limit: int = ISO_LIMIT) -> dict[int, int] | None:
    """Explicit isomorphism G1 -> G2 (loops preserved when both carry loop data),
    or None when none exists.  Plain backtracking with refinement pruning."""
    if G1.n > limit or G2.n > limit:
        raise GraphError(f"iso_small is limited to {limit} vertices")
    if G1.n != G2.n or G1.m != G2.m:
        return None
    if not np.array_equal(np.sort(G1.degrees), np.sort(G2.degrees)):
        return None
    use_loops = G1.loops is not None and G2.loops is not None
    if use_loops and G1.loops.size != G2.loops.size:
        return None
    if not use_loops:
        G1, G2 = G1.without_loops(), G2.without_loops()
    c1, c2 = _joint_colors(G1, G2)
    if sorted(c1) != sorted(c2):
        return None
    n = G1.n
    adj1 = [0] * n
    adj2 = [0] * n
    for v in range(n):
        for u in G1.neighbors(v):
            adj1[v] |= 1 << int(u)
        for u in G2.neighbors(v):
            adj2[v] |= 1 << int(u)
    cls2: dict[int, int] = {}
    for v in range(n):
        cls2[c2[v]] = cls2.get(c2[v], 0) | (1 << v)

    # order: rarest class first, then greedily by number of already placed neighbors
    counts = {c: c1.count(c) for c in set(c1)}
    order: list[int] = []
    placed = 0
    remaining = set(range(n))
    while remaining:
        best = min(remaining, key=lambda v: (-bin(adj1[v] & placed).count("1"), counts[c1[v]], v))
        order.append(best)
        placed |= 1 << best
        remaining.discard(best)

    mapping = [-1] * n
    used = 0

    def search(i: int) -> bool:
        nonlocal used
        if i == n:
            return True
        v = order[i]
        cand = cls2[c1[v]] & ~used
        for u in order[:i]:
            if adj1[v] >> u & 1:
                cand &= adj2[mapping[u]]
            else:
                cand &= ~adj2[mapping[u]]
            if not cand:
                return False
        while cand:
            w = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            mapping[v] = w
            used |= 1 << w
            if search(i + 1):
                return True
            used &= ~(1 << w)
            mapping[v] = -1
        return False

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 100))
    try:
        found = search(0)
    finally:
        sys.setrecursionlimit(old)
    return {v: mapping[v] for v in range(n)} if found else None


def is_isomorphism(G1: Graph, G2: Graph, mapping: dict[int, int]) -> bool:
    f = np.array([mapping[v] for v in range(G1.n)])
    if np.unique(f).size != G1.n:
        return False
    e1 = np.sort(f[G1.edges()], axis=1)
    e2 = G2.edges()
    same = np.array_equal(np.unique(e1, axis=0), np.unique(e2, axis=0))
    if G1.loops is not None and G2.loops is not None:
        same = same and np.array_equal(np.sort(f[G1.loops]), G2.loops)
    return bool(same)


# -- DIMACS ------------------------------------------------------------------------------

def write_dimacs(G: Graph, fh: TextIO) -> None:
    """``p edge n m`` header, 1-based ``e u v`` lines; loops and provenance as comments."""
    fh.write(f"c provenance {canonical_json(G.provenance)}\n")
    if G.loops is not None:
        fh.write("c loops" + "".join(f" {int(v) + 1}" for v in G.loops) + "\n")
    fh.write(f"p edge {G.n} {G.m}\n")
    for u, v in G.edges().tolist():
        fh.write(f"e {u + 1} {v + 1}\n")


def read_dimacs(fh: TextIO) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    loops = None
    provenance: dict = {}
    for line in fh:
        line = line.strip()
        if not line:
            continue
        tag = line[0]
        if tag == "c":
            body = line[1:].strip()
            if body.startswith("provenance "):
                provenance = json.loads(body[len("provenance "):])
            elif body == "loops" or body.startswith("loops "):
                loops = [int(t) - 1 for t in body.split()[1:]]
        elif tag == "p":
            parts = line.split()
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphError(f"bad DIMACS header: {line!r}")
            n, m = int(parts[2]), int(parts[3])
        elif tag == "e":
            _, u, v = line.split()
            edges.append((int(u) - 1, int(v) - 1))
        else:
            raise GraphError(f"unknown DIMACS line: {line!r}")
    if n is None:
        raise GraphError("missing DIMACS header")
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, file has {len(edges)}")
    return Graph.from_edges(n, edges, loops, provenance)
