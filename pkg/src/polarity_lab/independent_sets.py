"""Independent-set constructions in polarity graphs, an exact oracle, and the
spectral upper bound they are compared against."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import sympy

from .certificates import canonical_json, ids_hash, provenance_hash
from .finite_field import FieldCtx, half_partition, planar_witness, square_mask
from .graphs import Graph, build_polarity_graph, build_uq, build_uq_star
from .planes import DivisionRingPlane, build_pg2, build_pi_f
from .polarities import orthogonal_polarity_pi_f, polarity_pi_d

ORACLE_LIMIT = 200
THM3_CONSTANT = 0.19239


class ConstructionError(ValueError):
    pass


@dataclass
class IndepCertificate:
    provenance: dict
    vertices: list[int]
    verified: bool
    absolute_free: bool
    bound_context: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def provenance_hash(self) -> str:
        return provenance_hash(self.provenance)

    def to_dict(self) -> dict:
        d = {"kind": "independent_set", "provenance": self.provenance,
             "provenance_hash": self.provenance_hash, "size": self.size,
             "verified": self.verified, "absolute_free": self.absolute_free,
             "bound_context": self.bound_context, "details": self.details}
        if self.size > 10_000:
            d["vertices_hash"] = ids_hash(self.vertices)
        else:
            d["vertices"] = sorted(self.vertices)
        return d

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def certify(G: Graph, vertices, bound_order: int | None = None,
            lower_formula: float | None = None, **details) -> IndepCertificate:
    vs = sorted({int(v) for v in vertices})
    verified = G.is_independent(vs)
    absolute_free = not bool(G.loop_mask[vs].any()) if G.loops is not None else False
    ctx: dict = {}
    if bound_order is not None:
        hb = hoffman_bound(bound_order)
        ctx["hoffman_closed_form"] = hb.closed_str
        ctx["hoffman_closed_form_value"] = hb.closed_value
    if lower_formula is not None:
        ctx["construction_lower_bound"] = lower_formula
    return IndepCertificate(G.provenance, vs, verified, absolute_free, ctx, details)


# -- Hoffman bound ------------------------------------------------------------------

@dataclass(frozen=True)
class HoffmanBound:
    q: int
    printed: sympy.Expr  # (q^2+q+1) q^(1/2) / (q + 1 - q^(1/2))
    closed: sympy.Expr  # q^(3/2) + q^(1/2) + 1

    @property
    def discrepancy(self) -> bool:
        return sympy.simplify(self.printed - self.closed) != 0

    @property
    def closed_value(self) -> float:
        return float(self.closed)

    @property
    def closed_ceiling(self) -> int:
        return int(sympy.ceiling(self.closed))

    @property
    def closed_floor(self) -> int:
        return int(sympy.floor(self.closed))

    @property
    def closed_str(self) -> str:
        return str(sympy.nsimplify(self.closed))

    def to_dict(self) -> dict:
        return {"q": self.q, "printed": str(self.printed), "printed_value": float(self.printed),
                "closed": str(self.closed), "closed_value": float(self.closed),
                "closed_ceiling": self.closed_ceiling, "discrepancy": self.discrepancy}


def hoffman_bound(q: int) -> HoffmanBound:
    """Exact values of the eigenvalue bound for a polarity graph of order q."""
    s = sympy.sqrt(sympy.Integer(q))
    n = sympy.Integer(q * q + q + 1)
    printed = sympy.nsimplify(sympy.radsimp(n * s / (q + 1 - s)))
    closed = q * s + s + 1
    return HoffmanBound(q, printed, closed)


# -- exact maximum independent set ----------------------------------------------------

def _bits(xs: Sequence[int]) -> int:
    b = 0
    for x in xs:
        b |= 1 << int(x)
    return b


def _members(b: int) -> list[int]:
    out = []
    while b:
        low = b & -b
        out.append(low.bit_length() - 1)
        b ^= low
    return out


def max_independent_exact(G: Graph, limit: int = ORACLE_LIMIT) -> IndepCertificate:
    """Exact alpha(G) by branch and bound.

    The search is a maximum-clique search in the complement: candidates are
    ordered by a greedy clique cover of G (each clique holds at most one
    independent vertex), which also gives the pruning bound.  Vertices are
    processed in canonical id order, so the witness is deterministic.
    """
    if G.n > limit:
        raise ConstructionError(f"oracle limited to {limit} vertices (graph has {G.n}); "
                                "use greedy_independent instead")
    n = G.n
    adj = [_bits(G.neighbors(v)) for v in range(n)]
    full = (1 << n) - 1
    non_adj = [full & ~adj[v] & ~(1 << v) for v in range(n)]

    greedy = greedy_independent(G)
    best = [len(greedy), _bits(greedy)]
    nodes = [0]

    def cover_order(P: int) -> tuple[list[int], list[int]]:
        # greedy clique cover: vertices of a clique share one bound level
        order, bounds = [], []
        level = 0
        U = P
        while U:
            level += 1
            Q = U
            while Q:
                v = (Q & -Q).bit_length() - 1
                Q &= adj[v]  # stay inside a clique of G
                U &= ~(1 << v)
                order.append(v)
                bounds.append(level)
        return order, bounds

    def expand(size: int, chosen: int, P: int) -> None:
        nodes[0] += 1
        order, bounds = cover_order(P)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best[0]:
                return
            v = order[i]
            newP = P & non_adj[v]
            newchosen = chosen | (1 << v)
            if newP:
                expand(size + 1, newchosen, newP)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, newchosen
            P &= ~(1 << v)

    expand(0, 0, full)
    witness = _members(best[1])
    cert = certify(G, witness, method="exact", nodes=nodes[0])
    cert.details["alpha"] = best[0]
    return cert


def alpha_bruteforce(G: Graph) -> int:
    """Exhaustive subset enumeration (tiny graphs only)."""
    if G.n > 24:
        raise ConstructionError("brute force is for at most 24 vertices")
    adj = [_bits(G.neighbors(v)) for v in range(G.n)]
    best = 0
    for mask in range(1 << G.n):
        if bin(mask).count("1") <= best:
            continue
        if all(not (adj[v] & mask) for v in _members(mask)):
            best = bin(mask).count("1")
    return best


def greedy_independent(G: Graph, candidates=None) -> list[int]:
    """Repeatedly take a minimum-degree vertex (ties by id) and delete its neighborhood."""
    alive = np.zeros(G.n, dtype=bool)
    if candidates is None:
        alive[:] = True
    else:
        alive[np.asarray(list(candidates), dtype=np.int64)] = True
    deg = np.array([alive[G.neighbors(v)].sum() for v in range(G.n)])
    chosen = []
    while alive.any():
        ids = np.nonzero(alive)[0]
        v = int(ids[np.argmin(deg[ids])])
        chosen.append(v)
        gone = [v] + [int(u) for u in G.neighbors(v) if alive[u]]
        for u in gone:
            alive[u] = False
        for u in gone:
            for w in G.neighbors(u):
                if alive[w]:
                    deg[w] -= 1
    return sorted(chosen)


# -- constructions --------------------------------------------------------------------

def _half_degree(ctx: FieldCtx) -> int:
    if ctx.n % 2:
        raise ConstructionError(f"{ctx!r} is not a square-order field")
    return ctx.n // 2


def thm1_set(ctx: FieldCtx) -> np.ndarray:
    """{(x, y + z mu) : x, y in F_q, z in F_q^+} as point ids of Pi_f over F_{q^2}."""
    m = _half_degree(ctx)
    sub = ctx.subfield(m)
    plus = np.array(sorted(half_partition(ctx, sub).plus), dtype=np.int64)
    mu = ctx.generator
    Q = ctx.q
    x, y, z = np.meshgrid(sub, sub, plus, indexing="ij")
    second = ctx.add(y, ctx.mul(z, mu))
    return np.sort((x * Q + second).ravel())


def construct_thm1(ctx: FieldCtx, f: Sequence[int]) -> IndepCertificate:
    """Independent set of size q^2(q-1)/2 in G_f, f planar over F_{q^2} with F_q coefficients."""
    m = _half_degree(ctx)
    q = ctx.p ** m
    coeffs = np.asarray(f, dtype=np.int64)
    if not np.all(ctx.in_subfield(coeffs, m)):
        bad = [int(c) for c in coeffs if not ctx.in_subfield(int(c), m)]
        raise ConstructionError(f"coefficients {bad} lie outside the subfield GF({q})")
    if planar_witness(ctx, f) is not None:
        raise ConstructionError("f is not planar")
    P = build_pi_f(ctx, f, check=False)
    pol = orthogonal_polarity_pi_f(P)
    G = build_polarity_graph(P, pol)
    I = thm1_set(ctx)
    cert = certify(G, I, bound_order=ctx.q, lower_formula=q * q * (q - 1) / 2,
                   construction="thm1", mu=int(ctx.generator), mu_choice="field generator")
    cert.details["expected_size"] = q * q * (q - 1) // 2
    return cert


def thm2_set(P: DivisionRingPlane) -> np.ndarray:
    D = P.D
    base = D.base
    small = base.subfield(base.n // 2)
    squares = np.nonzero(square_mask(base))[0]
    allq = base.elements()
    x1, x2, y1, y2 = np.meshgrid(small, squares, small, allq, indexing="ij")
    X = D.join(x1, x2)
    Y = D.join(y1, y2)
    return np.sort((X * P.Q + Y).ravel())


def construct_thm2(P: DivisionRingPlane) -> IndepCertificate:
    """Independent set {(x1 + l x2, y1 + l y2)} with x1, y1 in the half-degree
    subfield and x2 a nonzero square, in the twisted-ring polarity graph."""
    if not isinstance(P, DivisionRingPlane) or P.D.kind != "section3":
        raise ConstructionError("needs the plane of the section3 division ring")
    pol = polarity_pi_d(P)
    G = build_polarity_graph(P, pol)
    I = thm2_set(P)
    q = P.D.base.q
    cert = certify(G, I, bound_order=P.order, lower_formula=q * q * (q - 1) / 2,
                   construction="thm2")
    cert.details["expected_size"] = q * q * (q - 1) // 2
    cert.details["normalization"] = {"plane_order": P.order, "base_field_order": q,
                                     "size_formula": "q^2 (q-1)/2 with q = sqrt(plane order)"}
    cert.details["obstruction_holds"] = thm2_obstruction(P, I)
    return cert


def thm2_obstruction(P: DivisionRingPlane, I: np.ndarray) -> bool:
    """For every pair in I, (x2 z2)^-1 (-y1 - t1 - x1 z1) is zero or a square,
    hence never the nonsquare theta required for adjacency."""
    D, F = P.D, P.D.base
    X, Y = np.divmod(I, P.Q)
    x1, x2 = D.split(X)
    y1, _ = D.split(Y)
    i, j = np.triu_indices(I.size, 1)
    rhs = F.mul(F.inv(F.mul(x2[i], x2[j])),
                F.sub(F.neg(F.add(y1[i], y1[j])), F.mul(x1[i], x1[j])))
    sq = square_mask(F)
    return bool(np.all((rhs == 0) | sq[rhs]) and not sq[D.theta])


def unitary_mu(ctx: FieldCtx) -> int:
    """theta^((sqrt(q)+1)/2), which satisfies mu^sqrt(q) + mu = 0."""
    m = _half_degree(ctx)
    r = ctx.p ** m
    mu = ctx.exp((r + 1) // 2)
    if ctx.add(ctx.pow(mu, r), mu) != 0:
        raise ConstructionError("mu^sqrt(q) + mu != 0")
    if ctx.in_subfield(mu, m):
        raise ConstructionError("mu lies in the subfield")
    return int(mu)


def slice_vertices(ctx: FieldCtx, c: int, mu: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ids of X_c = {(1, a, b + c mu) : a, b in F_sqrt(q)} with their (a, b)."""
    sub = ctx.subfield(ctx.n // 2)
    a, b = np.meshgrid(sub, sub, indexing="ij")
    a, b = a.ravel(), b.ravel()
    third = ctx.add(b, ctx.mul(c, mu))
    return a * ctx.q + third, a, b


InnerProvider = Callable[[Graph, FieldCtx, np.ndarray, np.ndarray], tuple[list[int], str]]


def _provider_exact(H: Graph, ctx, a, b):
    return max_independent_exact(H).vertices, "exact"


def _provider_greedy(H: Graph, ctx, a, b):
    return greedy_independent(H), "greedy"


def _provider_thm1(H: Graph, ctx: FieldCtx, a, b):
    """Image of the thm1 set of affine G_{X^2} over F_sqrt(q) under
    (x, y) -> (2x, 2(y - x^2)); needs sqrt(q) to be a square."""
    n = ctx.n
    if n % 4:
        raise ConstructionError("thm1 provider needs q to be a fourth power")
    F = ctx
    r_sub = F.subfield(n // 4)
    mid = F.subfield(n // 2)
    nu = next(int(v) for v in mid if v and not F.in_subfield(int(v), n // 4))
    plus = np.array(sorted(half_partition(F, r_sub).plus), dtype=np.int64)
    x, y, z = np.meshgrid(r_sub, r_sub, plus, indexing="ij")
    x = x.ravel()
    yy = F.add(y.ravel(), F.mul(z.ravel(), nu))
    two = F.prime(2)
    aa = F.mul(two, x)
    bb = F.mul(two, F.sub(yy, F.mul(x, x)))
    lookup = {(int(p), int(s)): i for i, (p, s) in enumerate(zip(a, b))}
    return sorted(lookup[(int(p), int(s))] for p, s in zip(aa, bb)), "thm1"


PROVIDERS: dict[str, InnerProvider] = {
    "exact": _provider_exact,
    "greedy": _provider_greedy,
    "thm1": _provider_thm1,
}


def choose_provider(ctx: FieldCtx) -> str:
    slice_size = ctx.q
    if slice_size <= ORACLE_LIMIT:
        return "exact"
    if ctx.n % 4 == 0:
        return "thm1"
    return "greedy"


def construct_thm3(ctx: FieldCtx, provider: str | InnerProvider = "auto",
                   G: Graph | None = None) -> IndepCertificate:
    """Absolute-point-free independent set in U*_q assembled from the slices X_c."""
    if ctx.p == 2:
        raise ConstructionError("needs odd characteristic")
    _half_degree(ctx)
    m = ctx.n // 2
    r = ctx.p ** m
    mu = unitary_mu(ctx)
    if G is None:
        G = build_uq_star(ctx)
    if provider == "auto":
        provider = choose_provider(ctx)
    fn = PROVIDERS[provider] if isinstance(provider, str) else provider
    sub = ctx.subfield(m)
    two = ctx.prime(2)
    union: list[int] = []
    log = []
    slice_sets = []
    for c in sub:
        ids, a, b = slice_vertices(ctx, int(c), mu)
        H, _ = G.induced(ids)
        local, used = fn(H, ctx, a, b)
        if not H.is_independent(local):
            raise ConstructionError(f"provider {used!r} returned a dependent set on slice c={c}")
        absolute = ctx.mul(two, b) == ctx.mul(a, a)
        if not np.array_equal(absolute, G.loop_mask[ids]):
            raise ConstructionError("2b = a^2 does not match the absolute points of the slice")
        kept = [i for i in local if not absolute[i]]
        log.append({"c": int(c), "provider": used, "inner_size": len(local),
                    "absolute_removed": len(local) - len(kept), "kept": len(kept)})
        slice_sets.append([int(ids[i]) for i in kept])
        union.extend(int(ids[i]) for i in kept)
    cert = certify(G, union, bound_order=ctx.q, construction="thm3", mu=mu, slices=log)
    q = ctx.q
    cert.bound_context["reference_curve"] = THM3_CONSTANT * q ** 1.25
    cert.bound_context["reference_formula"] = "0.19239 q^(5/4) (asymptotic, reported only)"
    cert.details["slices_independent"] = all(G.is_independent(s) for s in slice_sets)
    cert.details["sqrt_q"] = r
    return cert


def cross_slice_edges(ctx: FieldCtx, G: Graph | None = None) -> int:
    """Number of U*_q edges between different slices X_c (zero by construction)."""
    if G is None:
        G = build_uq_star(ctx)
    mu = unitary_mu(ctx)
    label = np.full(G.n, -1)
    for c in ctx.subfield(ctx.n // 2):
        ids, _, _ = slice_vertices(ctx, int(c), mu)
        label[ids] = c
    e = G.edges()
    la, lb = label[e[:, 0]], label[e[:, 1]]
    return int(np.sum((la >= 0) & (lb >= 0) & (la != lb)))


def unitary_absolute_set(ctx: FieldCtx) -> IndepCertificate:
    """Absolute points of U_q, i.e. the zero set of x0^(s+1) + x1^(s+1) + x2^(s+1)."""
    _half_degree(ctx)
    r = ctx.p ** (ctx.n // 2)
    G = build_uq(ctx)
    P = build_pg2(ctx)
    v = P.vectors
    h = ctx.add(ctx.add(ctx.pow(v[:, 0], r + 1), ctx.pow(v[:, 1], r + 1)), ctx.pow(v[:, 2], r + 1))
    J = np.nonzero(h == 0)[0]
    cert = certify(G, J, bound_order=ctx.q, lower_formula=ctx.q * r + 1,
                   construction="unitary_absolute")
    cert.details["matches_loops"] = bool(np.array_equal(J, G.loops))
    cert.details["expected_size"] = ctx.q * r + 1
    return cert
