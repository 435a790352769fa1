"""Acceptance criteria 1-10.

Each ``criterion_k`` runs one criterion from scratch and returns a
``Outcome`` holding a pass flag, the printed line and the certificate bytes
used by the determinism check. Under pytest every criterion becomes a test and
the lines appear in the "acceptance criteria" summary section; run as a
script (``python3 tests/test_acceptance.py``) the lines are printed directly.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from polarity_lab.certificates import canonical_json
from polarity_lab.coloring import (check_admissible, color_dickson, color_graph,
                                   dickson_phi_exhaustive, find_mu, phi_automorphism_sampled, solve_linearized)
from polarity_lab.finite_field import ff_build, monomial
from polarity_lab.graphs import (AGraph, build_er, build_er_star, build_polarity_graph,
                                 build_uq, build_uq_star, check_c4_free, check_nsq_identity)
from polarity_lab.independent_sets import (alpha_bruteforce, construct_thm1, construct_thm2,
                                           construct_thm3, greedy_independent,
                                           max_independent_exact, unitary_mu)
from polarity_lab.planes import (build_coordinatized_plane, build_division_ring, build_pg2,
                                 build_pi_f)
from polarity_lab.polarities import (absolute_points, orthogonal_polarity_dickson,
                                     orthogonal_polarity_pi_f, polarity_pi_d,
                                     unitary_polarity_pg2)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = {}


@dataclass
class Outcome:
    number: int
    passed: bool
    summary: str
    seconds: float = 0.0
    limit: float = math.inf
    artifacts: list[bytes] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed and self.seconds < self.limit

    @property
    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.number}: {self.summary} ({self.seconds:.1f}s)"


def _timed(number: int, limit: float):
    def wrap(fn):
        def run() -> Outcome:
            t0 = time.perf_counter()
            passed, summary, artifacts = fn()
            out = Outcome(number, passed, summary, time.perf_counter() - t0, limit, artifacts)
            if out.seconds >= limit:
                out.summary += f"; over the {limit:.0f}s limit"
            return out
        run.__name__ = fn.__name__
        return run
    return wrap


def _blob(obj) -> bytes:
    return canonical_json(obj).encode()


def _pairs(n: int):
    return np.triu_indices(n, 1)


# -- 1 ------------------------------------------------------------------------------

@_timed(1, 60)
def criterion_1():
    rows, arts, ok = [], [], True
    for q, (p, n) in [(3, (3, 1)), (5, (5, 1)), (7, (7, 1)), (9, (3, 2))]:
        P = build_pi_f(ff_build(p, n), monomial(2))
        rep = absolute_points(orthogonal_polarity_pi_f(P))
        ok &= rep.count == q + 1 and rep.classification == "orthogonal"
        rows.append(f"X^2/{q}:{rep.count}")
        arts.append(_blob(rep.to_dict()))
    for q, (p, n), r in [(9, (3, 2), 3), (25, (5, 2), 5), (81, (3, 4), 9)]:
        rep = absolute_points(unitary_polarity_pg2(build_pg2(ff_build(p, n))))
        ok &= rep.count == q * r + 1 and rep.classification == "unitary"
        rows.append(f"U/{q}:{rep.count}")
        arts.append(_blob(rep.to_dict()))
    P = build_coordinatized_plane(build_division_ring("section3", ff_build(3, 2)))
    rep = absolute_points(polarity_pi_d(P))
    ok &= P.order == 81 and rep.count == 244 and rep.classification == "neither"
    rows.append(f"D/81:{rep.count} {rep.classification}")
    arts.append(_blob(rep.to_dict()))
    return ok, "absolute points " + ", ".join(rows), arts


# -- 2 ------------------------------------------------------------------------------

def _pi_f_adjacent_affine(F, f, ids):
    """Formula oracle for affine points of G_f: y1 + y2 = f(x1 + x2), u != v."""
    x, y = np.divmod(np.asarray(ids), F.q)
    i, j = _pairs(len(ids))
    return (F.add(y[i], y[j]) == F.poly_eval(f, F.add(x[i], x[j]))) & (i != j)


@_timed(2, 60)
def criterion_2():
    rows, arts, ok = [], [], True
    for q, (p, n) in [(3, (3, 2)), (5, (5, 2)), (9, (3, 4))]:
        F, f = ff_build(p, n), monomial(2)
        cert = construct_thm1(F, f)
        ids = np.asarray(cert.vertices)
        affine = bool(np.all(ids < F.q * F.q))
        clash = _pi_f_adjacent_affine(F, f, ids)
        good = (cert.verified and affine and not clash.any()
                and cert.size == q * q * (q - 1) // 2)
        ok &= good
        rows.append(f"q={q}: {cert.size}/{q * q * (q - 1) // 2} over {clash.size} pairs")
        arts.append(cert.to_json().encode())
    return ok, "thm1 " + "; ".join(rows), arts


# -- 3 ------------------------------------------------------------------------------

@_timed(3, 60)
def criterion_3():
    P = build_coordinatized_plane(build_division_ring("section3", ff_build(3, 2)))
    cert = construct_thm2(P)
    D, Q = P.D, P.Q
    X, Y = np.divmod(np.asarray(cert.vertices), Q)
    i, j = _pairs(cert.size)
    # (x1,y1) lies on the polar [x2^a, -y2^a] of (x2,y2): x2^a * x1 + y1 + y2^a = 0
    lhs = D.add(D.add(D.mul(D.alpha(X[j]), X[i]), Y[i]), D.alpha(Y[j]))
    clash = lhs == 0
    G = build_polarity_graph(P, polarity_pi_d(P))
    ok = (G.n == 6643 and cert.size == 324 and cert.verified and not clash.any()
          and bool(np.all(np.asarray(cert.vertices) < Q * Q)))
    summary = (f"thm2 size {cert.size} in {G.n}-vertex graph, {clash.size} pairs checked, "
               f"obstruction {cert.details['obstruction_holds']}")
    return ok, summary, [cert.to_json().encode()]


# -- 4 ------------------------------------------------------------------------------

@_timed(4, 120)
def criterion_4():
    rows, arts, ok = [], [], True
    for q, (p, n) in [(9, (3, 2)), (25, (5, 2))]:
        F = ff_build(p, n)
        G = build_uq_star(F)
        cert = construct_thm3(F, provider="exact", G=G)
        exact = all(s["provider"] == "exact" for s in cert.details["slices"])
        indep = G.is_independent(cert.vertices)
        free = not bool(G.loop_mask[cert.vertices].any())
        ok &= cert.verified and cert.absolute_free and indep and free and exact and cert.size > 0
        ref = cert.bound_context["reference_curve"]
        rows.append(f"q={q}: size {cert.size} (reference curve {ref:.2f}, reported only)")
        arts.append(cert.to_json().encode())
    return ok, "thm3 independent and absolute-free; " + "; ".join(rows), arts


# -- 5 ------------------------------------------------------------------------------

@_timed(5, 30 * 60)
def criterion_5():
    pair = check_admissible(3, 3, 2)
    cert = color_graph(pair, verify="full", seed=0)
    pal = cert.palettes
    ver = cert.details["verification"]
    Q = 27 * 27
    n = Q * Q + Q + 1
    edges = (n * (Q + 1) - (Q + 1)) // 2
    ok = (cert.verified and ver["proper"] and ver["edges_checked"] == edges
          and cert.colors.size == n == 532171 and pal["K"] == 54 and pal["X"] <= 54
          and pal["infinity"] == 3 and cert.total_colors <= 111)
    summary = (f"planar coloring q=27 K={pal['K']} X={pal['X']} inf={pal['infinity']} "
               f"total={cert.total_colors}<=111, {ver['edges_checked']} edges verified")
    return ok, summary, [cert.to_json().encode()]


# -- 6 ------------------------------------------------------------------------------

@_timed(6, 5 * 60)
def criterion_6():
    cert = color_dickson(3, 2, r=1, verify="full", seed=0)
    pal = cert.palettes
    ver = cert.details["verification"]
    ok = (cert.verified and ver["proper"] and cert.colors.size == 6643 and pal["K"] == 18
          and pal["X"] <= 18 and pal["infinity"] == 3)
    summary = (f"Dickson coloring q=9 K={pal['K']} X={pal['X']} inf={pal['infinity']}, "
               f"{ver['edges_checked']} edges verified")
    return ok, summary, [cert.to_json().encode()]


# -- 7 ------------------------------------------------------------------------------

def _prime_powers(limit: int):
    for q in range(2, limit + 1):
        p = next(d for d in range(2, q + 1) if q % d == 0)
        n, r = 0, q
        while r % p == 0:
            r //= p
            n += 1
        if r == 1:
            yield q, p, n


def built_graphs(max_vertices: int = 10_000):
    """Every materialized polarity graph the package builds, up to a vertex cap."""
    for q, p, n in _prime_powers(100):
        if q * q + q + 1 > max_vertices:
            continue
        F = ff_build(p, n)
        yield f"ER_{q}", build_er(F)
        if p != 2:
            yield f"ER*_{q}", build_er_star(F)
        if n % 2 == 0:
            yield f"U_{q}", build_uq(F)
            if p != 2:
                yield f"U*_{q}", build_uq_star(F)
        if p != 2 and q in (3, 5, 7, 9, 25, 27, 81):
            P = build_pi_f(F, monomial(2))
            yield f"G_X2_{q}", build_polarity_graph(P, orthogonal_polarity_pi_f(P))
    P = build_coordinatized_plane(build_division_ring("section3", ff_build(3, 2)))
    yield "G_D_81", build_polarity_graph(P, polarity_pi_d(P))
    P = build_coordinatized_plane(build_division_ring("dickson", ff_build(3, 2), r=1))
    yield "G_Dickson_81", build_polarity_graph(P, orthogonal_polarity_dickson(P))


@_timed(7, 5 * 60)
def criterion_7():
    ok, names, arts, failed = True, [], [], []
    for name, G in built_graphs():
        c4, nsq = check_c4_free(G), check_nsq_identity(G)
        if not (c4.passed and nsq.passed):
            failed.append(name)
        ok &= c4.passed and nsq.passed
        names.append(name)
        arts.append(c4.to_json().encode() + nsq.to_json().encode())
    summary = f"C4-free and N^2 = qI + J on {len(names)} graphs (largest ER_97)"
    if failed:
        summary += f"; failed {failed}"
    return ok, summary, arts


# -- 8 ------------------------------------------------------------------------------

@_timed(8, 5 * 60)
def criterion_8():
    rows, arts, ok = [], [], True
    for q, p in [(2, 2), (3, 3), (5, 5)]:
        G = build_er(ff_build(p, 1))
        H = G.without_loops()
        cert = max_independent_exact(H)
        alpha = cert.details["alpha"]
        ceiling = math.ceil(q ** 1.5 + q ** 0.5 + 1)
        good = cert.verified and cert.size == alpha <= ceiling
        if q == 2:
            good &= alpha_bruteforce(H) == alpha
        absolute = G.loops.tolist()
        good &= H.is_independent(absolute) and len(absolute) <= alpha
        good &= len(greedy_independent(H)) <= alpha
        ok &= good
        rows.append(f"alpha(ER_{q})={alpha}<={ceiling}")
        arts.append(cert.to_json().encode())
    # constructions against the oracle on a larger instance
    F = ff_build(3, 2)
    thm1 = construct_thm1(F, monomial(2))
    P = build_pi_f(F, monomial(2))
    G = build_polarity_graph(P, orthogonal_polarity_pi_f(P)).without_loops()
    cert = max_independent_exact(G)
    alpha = cert.details["alpha"]
    ok &= thm1.size <= alpha and thm1.verified and G.is_independent(thm1.vertices)
    thm3 = construct_thm3(F, provider="exact")
    U = build_uq_star(F).without_loops()
    ok &= thm3.size <= max_independent_exact(U).details["alpha"]
    rows.append(f"thm1 {thm1.size}<=alpha(G_X2/9)={alpha}")
    arts.append(cert.to_json().encode())
    return ok, "oracle " + ", ".join(rows), arts


# -- 9 ------------------------------------------------------------------------------

@_timed(9, 5 * 60)
def criterion_9():
    checks = {}
    for q, (p, n) in [(9, (3, 2)), (25, (5, 2)), (81, (3, 4))]:
        F = ff_build(p, n)
        mu = unitary_mu(F)
        checks[f"mu_sqrt_q_{q}"] = F.add(F.pow(mu, p ** (n // 2)), mu) == 0
    F = ff_build(3, 6)
    pair = check_admissible(3, 3, 2)
    md = find_mu(pair, F)
    checks["mu_d"] = (F.pow(md.mu, pair.d) == F.mul(md.u2, md.mu) and md.u1 == 0
                      and md.t % 2 == 1)
    rng = np.random.default_rng(0)
    xs = F.elements()
    xd = F.pow(xs, pair.d)
    unique = 0
    for _ in range(100):
        delta = int(rng.integers(1, F.q))
        xi = int(rng.integers(0, F.q))
        x = solve_linearized(F, md.u2, delta, xi, pair.d)
        c = F.mul(md.u2, F.pow(delta, pair.d - 1))
        roots = np.nonzero(F.add(xd, F.mul(c, xs)) == xi)[0]
        unique += roots.tolist() == [x]
    checks["solve_linearized_unique"] = unique == 100
    P = build_coordinatized_plane(build_division_ring("dickson", ff_build(3, 2), r=1))
    G = build_polarity_graph(P, orthogonal_polarity_dickson(P))
    dphi = dickson_phi_exhaustive(P, G)
    checks["dickson_phi"] = dphi["bijective"] and dphi["edges_preserved"] and dphi["loops_preserved"]
    A = AGraph(F, pair.d)
    alpha = int(F.mul(F.prime(2), F.exp(1)))
    sphi = phi_automorphism_sampled(A, alpha, samples=10_000, seed=0)
    checks["a_graph_phi_sampled"] = sphi["edges_preserved"] and sphi["non_edges_preserved"]
    checks = {k: bool(v) for k, v in checks.items()}
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    summary = (f"micro-checks {sum(checks.values())}/{len(checks)} "
               f"(100/100 linearized solves unique, {sphi['edges_checked']} sampled edges)")
    if failed:
        summary += f"; failed {failed}"
    return ok, summary, [_blob({"checks": checks, "dickson_phi": dphi, "a_graph_phi": sphi})]


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]
_FIRST_RUN: dict[int, Outcome] = {}


def _run(fn) -> Outcome:
    out = fn()
    _FIRST_RUN.setdefault(out.number, out)
    ACCEPTANCE_LINES[out.number] = out.line
    return out


# -- 10 -----------------------------------------------------------------------------

def criterion_10() -> Outcome:
    t0 = time.perf_counter()
    first = {k: _FIRST_RUN[k] if k in _FIRST_RUN else CRITERIA[k - 1]() for k in range(1, 10)}
    differing = []
    total = 0
    for k in range(1, 10):
        again = CRITERIA[k - 1]()
        total += sum(len(a) for a in again.artifacts)
        if again.artifacts != first[k].artifacts:
            differing.append(k)
    summary = f"reran criteria 1-9, {total} certificate bytes compared"
    if differing:
        summary += f"; differing {differing}"
    return Outcome(10, not differing, summary, time.perf_counter() - t0)


# -- pytest entry points ------------------------------------------------------------

def _check(fn):
    out = _run(fn)
    assert out.ok, out.line


def test_criterion_1_absolute_points():
    _check(criterion_1)


def test_criterion_2_thm1_sets():
    _check(criterion_2)


def test_criterion_3_thm2_set():
    _check(criterion_3)


def test_criterion_4_thm3_sets():
    _check(criterion_4)


def test_criterion_5_planar_coloring():
    _check(criterion_5)


def test_criterion_6_dickson_coloring():
    _check(criterion_6)


def test_criterion_7_structure():
    _check(criterion_7)


def test_criterion_8_oracle():
    _check(criterion_8)


def test_criterion_9_micro_checks():
    _check(criterion_9)


def test_criterion_10_determinism():
    out = criterion_10()
    ACCEPTANCE_LINES[10] = out.line
    assert out.ok, out.line


def main() -> int:
    outcomes = []
    for fn in CRITERIA:
        outcomes.append(_run(fn))
        print(outcomes[-1].line, flush=True)
    last = criterion_10()
    print(last.line)
    outcomes.append(last)
    return 0 if all(o.ok for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
