import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarity_lab.certificates import rle_decode, rle_encode
from polarity_lab.coloring import (ColoringCertificate, ColoringError, admissible_from_field,
                                   build_partition, check_admissible, color_dickson, color_graph,
                                   dsatur, find_mu, i_plus_minus, independent_in_a, is_power,
                                   x_degree_solver_check, phi, phi_automorphism_sampled,
                                   translates_match, verify_graph_coloring, verify_pi_f_coloring,
                                   x_graph)
from polarity_lab.finite_field import monomial
from polarity_lab.graphs import Graph, build_er


@pytest.fixture(scope="module")
def gf729(field):
    return field(3, 6)


@pytest.fixture(scope="module")
def partition(gf729):
    pair = check_admissible(3, 3, 2)
    return build_partition(pair, gf729)


@pytest.fixture(scope="module")
def planar_cert(gf729):
    return color_graph(check_admissible(3, 3, 2), gf729)


def test_admissible_examples():
    pair = check_admissible(3, 3, 2)
    assert (pair.q, pair.d) == (27, 9)
    assert check_admissible(5, 3, 2).q == 125
    with pytest.raises(ColoringError, match="even"):
        check_admissible(3, 1, 1)
    with pytest.raises(ColoringError):
        check_admissible(3, 1, 2)
    with pytest.raises(ColoringError):
        check_admissible(2, 3, 2)
    with pytest.raises(ColoringError):
        check_admissible(3, 3, 4)


def test_admissible_from_field(gf729):
    assert admissible_from_field(gf729, 9).s == 2
    with pytest.raises(ColoringError):
        admissible_from_field(gf729, 10)


def test_find_mu(gf729):
    F = gf729
    mu = find_mu(check_admissible(3, 3, 2), F)
    assert mu.t == 91 and mu.t % 2 == 1
    assert mu.mu == F.exp(28 + 91)
    assert mu.u1 == 0
    assert F.pow(mu.mu, 9) == F.mul(mu.u2, mu.mu)
    assert not F.in_subfield(mu.mu, 3)
    # exhaustive cross-check that u2 is an 8th power
    eighth = set(F.pow(F.elements()[1:], 8).tolist())
    assert mu.u2 in eighth
    assert is_power(F, mu.u2, 8)
    assert F.pow(mu.mu, 10) == F.add(mu.w1, F.mul(mu.w2, mu.mu))


def test_solve_linearized_zero(gf729):
    from polarity_lab.coloring import solve_linearized
    mu = find_mu(check_admissible(3, 3, 2), gf729)
    assert solve_linearized(gf729, mu.u2, 5, 0, 9) == 0


def test_solve_linearized_unique_by_exhaustive_scan(gf729):
    from polarity_lab.coloring import solve_linearized
    F = gf729
    mu = find_mu(check_admissible(3, 3, 2), F)
    rng = np.random.default_rng(0)
    xs = F.elements()
    x9 = F.pow(xs, 9)
    for _ in range(100):
        delta = int(rng.integers(1, F.q))
        xi = int(rng.integers(0, F.q))
        x = solve_linearized(F, mu.u2, delta, xi, 9)
        c = F.mul(mu.u2, F.pow(delta, 8))
        values = F.add(x9, F.mul(c, xs))
        roots = np.nonzero(values == xi)[0]
        assert roots.tolist() == [x]


def test_solve_linearized_singular(gf729):
    from polarity_lab.coloring import solve_linearized
    F = gf729
    # u2 = -1 is not an 8th power; with delta = 1, x^9 - x vanishes on GF(9)
    minus_one = int(F.neg(1))
    assert not is_power(F, minus_one, 8)
    roots = np.nonzero(F.sub(F.pow(F.elements(), 9), F.elements()) == 0)[0]
    assert roots.size == 9
    with pytest.raises(ColoringError):
        solve_linearized(F, minus_one, 1, 0, 9)


def test_partition_counts(partition):
    assert partition.counts == {"K": 27 ** 4 - 27 ** 3, "X": 27 ** 3}
    assert np.unique(partition.x_ids).size == 19683
    assert np.all(partition.k_color[partition.x_ids] == -1)
    assert set(np.unique(partition.k_color[~partition.in_x]).tolist()) == set(range(54))


def test_k_classes_are_translates(partition):
    assert translates_match(partition)


def test_i_plus_minus_independent(partition):
    ip, im = i_plus_minus(partition)
    assert ip.size == im.size == 27 * 27 * 13
    assert independent_in_a(partition.A, ip)
    assert independent_in_a(partition.A, im)
    # J = I+ u I- is not independent (x2 + y2 = 0 pairs exist)
    assert not independent_in_a(partition.A, np.concatenate([ip, im]))


def test_phi_automorphism(partition):
    F = partition.A.ctx
    alpha = int(F.mul(3, partition.mu.mu))
    res = phi_automorphism_sampled(partition.A, alpha, samples=10_000, seed=0)
    assert res["edges_preserved"] and res["non_edges_preserved"]
    v = np.arange(0, partition.A.n, 97)
    assert np.unique(phi(partition.A, alpha, v)).size == v.size


def test_x_degrees(partition):
    from polarity_lab.coloring import x_degree_maxima
    H = x_graph(partition)
    m = x_degree_maxima(partition, H)
    assert m["max_same_slice"] <= 27
    assert m["max_per_other_slice"] <= 1
    assert m["max_degree"] < 54
    assert x_degree_solver_check(partition, H, samples=100)


def test_color_graph_q27(planar_cert):
    c = planar_cert
    assert c.verified
    assert c.palettes["K"] == 54
    assert c.palettes["X"] <= 54
    assert c.palettes["infinity"] == 3
    assert c.total_colors <= 111
    assert c.colors.size == 27 ** 4 + 27 ** 2 + 1
    ver = c.details["verification"]
    # every edge of G_f: (n (Q+1) - (Q+1)) / 2 with Q = 729
    assert ver["edges_checked"] == (532171 * 730 - 730) // 2
    assert c.details["lower_bound"] == pytest.approx((27 ** 4 + 27 ** 2 + 1) / (27 ** 3 + 28))


def test_tampered_coloring_detected(planar_cert, gf729):
    colors = planar_cert.colors.copy()
    # give the neighbor (0, f(0+x2) - 0) of vertex 0 the color of vertex 0
    F = gf729
    fv = F.poly_eval(monomial(10), F.elements())
    v = 1 * F.q + int(F.sub(fv[1], 0))
    colors[v] = colors[0]
    res = verify_pi_f_coloring(F, monomial(10), colors)
    assert not res["proper"]
    assert res["witness"] is not None
    colors = planar_cert.colors.copy()
    colors[-1] = colors[F.q * F.q]
    assert not verify_pi_f_coloring(F, monomial(10), colors)["proper"]


def test_color_map_roundtrip(planar_cert, gf729):
    d = json.loads(planar_cert.to_json())
    colors = ColoringCertificate.colors_from_dict(d)
    assert np.array_equal(colors, planar_cert.colors)


def test_color_dickson():
    c = color_dickson(3, 2, r=1)
    assert c.verified
    assert c.colors.size == 6643
    assert c.palettes == {"K": 18, "X": c.palettes["X"], "infinity": 3}
    assert c.palettes["X"] <= 18
    d = c.details
    assert d["I_plus_independent"] and d["I_minus_independent"]
    assert d["phi"]["bijective"] and d["phi"]["edges_preserved"] and d["phi"]["loops_preserved"]
    assert d["counts"] == {"K": 81 * 81 - 729, "X": 729}
    assert d["x_degree_within_2q"]
    lines = c.to_csv().splitlines()
    assert lines[0] == "vertex,color" and len(lines) == 6644


def test_dsatur_random_graphs():
    rng = np.random.default_rng(1)
    for n in (20, 60):
        iu = np.triu_indices(n, 1)
        keep = rng.random(iu[0].size) < 0.3
        G = Graph.from_edges(n, np.stack([iu[0][keep], iu[1][keep]], axis=1))
        col = dsatur(G)
        assert verify_graph_coloring(G, col)["proper"]
        assert col.max() <= G.degrees.max()


def test_dsatur_bipartite_and_odd_cycle():
    even = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    assert dsatur(even).max() == 1
    odd = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert dsatur(odd).max() == 2


def test_verify_graph_coloring_witness(field):
    G = build_er(field(3, 1))
    col = np.zeros(G.n, dtype=np.int64)
    res = verify_graph_coloring(G, col)
    assert not res["proper"] and res["witness"] == {"u": int(G.edges()[0, 0]),
                                                    "v": int(G.edges()[0, 1])}


def test_rle():
    vals = [3, 3, 1, 1, 1, 2]
    assert rle_encode(vals) == [[3, 2], [1, 3], [2, 1]]
    assert rle_decode(rle_encode(vals)).tolist() == vals
    assert rle_decode([]).size == 0


@given(st.lists(st.integers(0, 5), max_size=60))
def test_rle_roundtrip_property(vals):
    runs = rle_encode(vals)
    assert rle_decode(runs).tolist() == vals
    assert all(a[0] != b[0] for a, b in zip(runs, runs[1:]))
