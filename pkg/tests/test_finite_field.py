import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarity_lab.finite_field import (FieldError, ff_build, field_from_descriptor,
                                       half_partition, is_irreducible, is_square, monomial,
                                       planar_check, planar_witness, rank_mod_p,
                                       smallest_irreducible, solve_mod_p, square_mask)

SMALL = [(2, 1), (3, 1), (5, 1), (2, 3), (3, 2), (5, 2), (7, 2), (3, 4), (2, 6)]


def poly_mul_oracle(ctx, a, b):
    """Schoolbook product of coefficient vectors reduced by the modulus."""
    p, n, m = ctx.p, ctx.n, list(ctx.modulus)
    ca, cb = ctx.to_coeffs(a), ctx.to_coeffs(b)
    prod = [0] * (2 * n - 1)
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * m[i]) % p
    return ctx.from_coeffs(prod[:n])


@pytest.mark.parametrize("p,n", SMALL)
def test_multiplication_matches_polynomial_oracle(field, p, n):
    F = field(p, n)
    xs = F.elements()
    a, b = np.meshgrid(xs, xs, indexing="ij")
    got = F.mul(a, b)
    for i, j in itertools.product(range(F.q), repeat=2):
        if (i * 7 + j) % 5 == 0 or F.q <= 27:
            assert got[i, j] == poly_mul_oracle(F, i, j)


@pytest.mark.parametrize("p,n", SMALL)
def test_field_axioms_exhaustive(field, p, n):
    F = field(p, n)
    x = F.elements()
    a, b = np.meshgrid(x, x, indexing="ij")
    assert np.array_equal(F.add(a, b), F.add(b, a))
    assert np.array_equal(F.mul(a, b), F.mul(b, a))
    assert np.all(F.add(x, F.neg(x)) == 0)
    assert np.all(F.mul(x[1:], F.inv(x[1:])) == 1)
    # distributivity over a slice of c values
    for c in x[:: max(1, F.q // 9)]:
        assert np.array_equal(F.mul(c, F.add(a, b)), F.add(F.mul(c, a), F.mul(c, b)))
        assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))


@pytest.mark.parametrize("p,n", SMALL)
def test_generator_is_primitive(field, p, n):
    F = field(p, n)
    powers = F.exp(np.arange(F.q - 1))
    assert np.unique(powers).size == F.q - 1
    assert F.order_of(F.generator) == F.q - 1


def test_modulus_is_smallest_irreducible():
    assert smallest_irreducible(3, 2) == (1, 0, 1)  # x^2 + 1
    assert is_irreducible((2, 1, 0, 0, 0, 0, 1), 3)
    assert not is_irreducible((1, 0, 1), 5)  # x^2 + 1 = (x-2)(x+2)


def test_frobenius_and_subfields(field):
    F = field(3, 6)
    x = F.elements()
    assert np.array_equal(F.frobenius(x, 1), F.pow(x, 3))
    for m in (1, 2, 3, 6):
        sub = F.subfield(m)
        assert sub.size == 3 ** m
        assert np.all(F.pow(sub, 3 ** m) == sub)
    with pytest.raises(FieldError):
        F.frobenius(x, 6)
    with pytest.raises(FieldError):
        F.subfield(4)


def test_ceiling_rejects_large_fields(monkeypatch):
    with pytest.raises(FieldError):
        ff_build(3, 8, ceiling=1000)
    monkeypatch.setenv("POLARITY_LAB_CEILING", "100")
    with pytest.raises(FieldError):
        ff_build(5, 3)


def test_bad_parameters():
    with pytest.raises(FieldError):
        ff_build(6, 1)
    with pytest.raises(FieldError):
        ff_build(3, 0)


def test_descriptor_roundtrip(field):
    F = field(3, 4)
    G = field_from_descriptor(F.descriptor())
    assert G == F and G.generator == F.generator


def test_field_element_operators(field):
    F = field(5, 2)
    a, b = F.element(7), F.element(13)
    assert int(a * b) == int(F.mul(7, 13))
    assert int(a / b * b) == 7
    assert int(-a + a) == 0
    assert int(a ** (F.q - 1)) == 1
    with pytest.raises(FieldError):
        a + field(3, 2).element(1)


def test_squares(field):
    F = field(3, 2)
    sq = square_mask(F)
    assert sq.sum() == (F.q - 1) // 2
    expected = np.zeros(F.q, dtype=bool)
    expected[F.mul(F.elements()[1:], F.elements()[1:])] = True
    assert np.array_equal(sq, expected)
    assert is_square(F, 0).zero
    assert bool(is_square(F, 1))
    assert not bool(is_square(F, F.generator))
    assert is_square(field(2, 3), 5).degenerate


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (7, 1), (3, 3)])
def test_half_partition(field, p, n):
    F = field(p, n)
    part = half_partition(F)
    assert len(part.plus) == len(part.minus) == (F.q - 1) // 2
    assert {int(F.neg(a)) for a in part.plus} == set(part.minus)
    sub = F.subfield(1)
    sp = half_partition(F, sub)
    assert len(sp.plus) == (p - 1) // 2


def test_half_partition_char2(field):
    with pytest.raises(FieldError):
        half_partition(field(2, 2))


def planar_oracle(F, f):
    """Pure-Python difference-map bijectivity."""
    fx = [int(F.poly_eval(f, x)) for x in range(F.q)]
    for a in range(1, F.q):
        if len({int(F.sub(fx[int(F.add(x, a))], fx[x])) for x in range(F.q)}) != F.q:
            return False
    return True


@pytest.mark.parametrize("p,n,deg", [(3, 1, 2), (5, 1, 2), (3, 2, 2), (3, 2, 4), (3, 3, 10),
                                     (3, 2, 3), (5, 1, 3), (3, 3, 4)])
def test_planarity_matches_oracle(field, p, n, deg):
    F = field(p, n)
    f = monomial(deg)
    assert planar_check(F, f) == planar_oracle(F, f)


def test_planar_witness_for_cube(field):
    F = field(3, 2)
    a = planar_witness(F, monomial(3))
    assert a == 1  # x^3 is additive in characteristic 3


def test_solve_mod_p():
    A = np.array([[2, 1], [1, 1]])
    x = solve_mod_p(A, np.array([1, 2]), 5)
    assert np.array_equal((A @ x) % 5, [1, 2])
    with pytest.raises(np.linalg.LinAlgError):
        solve_mod_p(np.array([[1, 2], [2, 4]]), np.array([1, 1]), 5)
    assert rank_mod_p(np.array([[1, 2], [2, 4]]), 5) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 728), st.integers(0, 728), st.integers(0, 728))
def test_gf729_ring_laws(a, b, c):
    F = ff_build(3, 6)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    if b:
        assert F.mul(F.div(a, b), b) == a


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 80), st.integers(0, 200))
def test_pow_log_consistency(a, e):
    F = ff_build(3, 4)
    assert F.pow(a, e) == F.exp((int(F.log(a)) * e) % (F.q - 1))
