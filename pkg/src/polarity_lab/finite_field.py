"""Table-driven arithmetic in GF(p^n).

Elements are encoded as integers in ``range(q)``: the coefficient vector
``(c_0, ..., c_{n-1})`` of ``c_0 + c_1 X + ... + c_{n-1} X^{n-1}`` maps to
``sum(c_i * p**i)``.  Every arithmetic method of :class:`FieldCtx` accepts
plain ints or numpy integer arrays and broadcasts.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CEILING = 2**20
_TABLE_LIMIT = 1024  # full add/mul tables up to this order


class FieldError(ValueError):
    pass


def field_ceiling() -> int:
    env = os.environ.get("POLARITY_LAB_CEILING")
    return int(env) if env else DEFAULT_CEILING


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    i = 2
    while i * i <= m:
        if m % i == 0:
            return False
        i += 1
    return True


def prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


# -- polynomials over GF(p) as coefficient lists, lowest degree first ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, m, p)


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over GF(p), lowest degree first."""
    f = list(f)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**n, f, p), x, p):
        return False
    for r in prime_factors(n):
        h = _psub(_ppowmod(x, p ** (n // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Monic irreducible of degree n whose lower coefficients have the smallest base-p code."""
    for code in range(p**n):
        low = [(code // p**i) % p for i in range(n)]
        if n == 1 or low[0] != 0:
            f = low + [1]
            if is_irreducible(f, p):
                return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {n} over GF({p})")


def solve_mod_p(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Solve A x = b over GF(p) for square nonsingular A.

    Raises :class:`np.linalg.LinAlgError` when A is singular.
    """
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    n = A.shape[0]
    M = np.concatenate([A, b.reshape(n, -1)], axis=1)
    for col in range(n):
        nz = np.nonzero(M[col:, col])[0]
        if nz.size == 0:
            raise np.linalg.LinAlgError("singular system over GF(%d)" % p)
        piv = col + nz[0]
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
        M[col] = M[col] * pow(int(M[col, col]), -1, p) % p
        others = M[:, col].copy()
        others[col] = 0
        M = (M - np.outer(others, M[col])) % p
    return M[:, n:].reshape(b.shape)


def rank_mod_p(A: np.ndarray, p: int) -> int:
    M = np.asarray(A, dtype=np.int64) % p
    rows, cols = M.shape
    rank = 0
    for col in range(cols):
        nz = np.nonzero(M[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        M[[rank, piv]] = M[[piv, rank]]
        M[rank] = M[rank] * pow(int(M[rank, col]), -1, p) % p
        others = M[:, col].copy()
        others[rank] = 0
        M = (M - np.outer(others, M[rank])) % p
        rank += 1
        if rank == rows:
            break
    return rank


# -- the field ------------------------------------------------------------------

class FieldCtx:
    """A fully materialized GF(p^n) with log/antilog tables.

    Build with :func:`ff_build`; the object is immutable afterwards.
    """

    def __init__(self, p: int, n: int, modulus: tuple[int, ...], generator: int,
                 exp: np.ndarray, log: np.ndarray):
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = modulus
        self.generator = generator
        self._exp = exp  # length 2(q-1) so log sums never need a modulo
        self._log = log  # log[0] == -1
        self._exp.setflags(write=False)
        self._log.setflags(write=False)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.n})"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FieldCtx) and self.p == other.p and self.n == other.n
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.modulus))

    # encoding helpers

    @cached_property
    def digits(self) -> np.ndarray:
        """``digits[x, i]`` is coefficient i of element x."""
        x = np.arange(self.q, dtype=np.int64)
        return np.stack([(x // self.p**i) % self.p for i in range(self.n)], axis=1)

    @cached_property
    def _powers_of_p(self) -> np.ndarray:
        return self.p ** np.arange(self.n, dtype=np.int64)

    def to_coeffs(self, x: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digits[int(x)])

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.n:
            raise FieldError("too many coefficients")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def prime(self, k: int) -> int:
        """The prime-field element k mod p."""
        return k % self.p

    def element(self, x: int) -> "FieldElement":
        return FieldElement(self, x)

    @property
    def one(self) -> int:
        return 1

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # tables

    @cached_property
    def add_table(self) -> np.ndarray | None:
        if self.q > _TABLE_LIMIT:
            return None
        d = self.digits
        s = (d[:, None, :] + d[None, :, :]) % self.p
        t = (s @ self._powers_of_p).astype(np.int32)
        t.setflags(write=False)
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        t = ((-self.digits) % self.p) @ self._powers_of_p
        t.setflags(write=False)
        return t

    @cached_property
    def mul_table(self) -> np.ndarray | None:
        if self.q > _TABLE_LIMIT:
            return None
        lg = self._log
        x = np.arange(self.q)
        s = lg[x][:, None] + lg[x][None, :]
        t = self._exp[np.where(s < 0, 0, s)].astype(np.int32)
        t[0, :] = 0
        t[:, 0] = 0
        t.setflags(write=False)
        return t

    # arithmetic

    def add(self, a, b):
        t = self.add_table
        if t is not None:
            return t[a, b]
        s = (self.digits[a] + self.digits[b]) % self.p
        return s @ self._powers_of_p

    def neg(self, a):
        return self.neg_table[a]

    def sub(self, a, b):
        return self.add(a, self.neg_table[b])

    def mul(self, a, b):
        t = self.mul_table
        if t is not None:
            return t[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        s = self._log[a] + self._log[b]
        out = self._exp[np.where((a == 0) | (b == 0), 0, s)]
        out = np.where((a == 0) | (b == 0), 0, out)
        return out if out.ndim else int(out)

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        out = self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return out if out.ndim else int(out)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        """a**e with e any integer (negative allowed for nonzero a)."""
        a = np.asarray(a)
        if e == 0:
            out = np.ones_like(a)
        else:
            if e < 0 and np.any(a == 0):
                raise ZeroDivisionError("negative power of zero")
            s = (self._log[a].astype(np.int64) * (e % (self.q - 1))) % (self.q - 1)
            out = np.where(a == 0, 0, self._exp[s])
        return out if out.ndim else int(out)

    def exp(self, k):
        """theta**k for the fixed generator theta."""
        return self._exp[np.asarray(k) % (self.q - 1)] if np.ndim(k) else int(self._exp[k % (self.q - 1)])

    def log(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("log of zero")
        out = self._log[a]
        return out if out.ndim else int(out)

    def poly_eval(self, coeffs: Sequence[int], x):
        """Evaluate sum(coeffs[i] * x**i) by Horner's rule."""
        x = np.asarray(x)
        acc = np.zeros_like(x, dtype=np.int64)
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), np.full_like(x, c, dtype=np.int64))
        return acc if acc.ndim else int(acc)

    def frobenius(self, x, k: int = 1):
        """x**(p**k) for 0 <= k < n."""
        if not 0 <= k < self.n:
            raise FieldError(f"frobenius index {k} outside [0, {self.n})")
        return self.pow(x, self.p**k)

    def subfield(self, m: int) -> np.ndarray:
        """Sorted elements of the subfield GF(p^m), i.e. the fixed set of x -> x^(p^m)."""
        if m <= 0 or self.n % m:
            raise FieldError(f"GF({self.p}^{m}) is not a subfield of {self!r}")
        x = self.elements()
        return x[self.pow(x, self.p**m) == x]

    def in_subfield(self, x, m: int):
        return self.pow(x, self.p**m) == np.asarray(x)

    def order_of(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        from math import gcd
        return (self.q - 1) // gcd(int(self._log[x]), self.q - 1)

    def is_square(self, x) -> "SquareTest":
        return is_square(self, x)

    def descriptor(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus),
                "generator": self.generator}

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)


@dataclass(frozen=True)
class FieldElement:
    """Scalar wrapper over an encoded element; mixing fields is an error."""

    ctx: FieldCtx
    value: int

    def __post_init__(self):
        if not 0 <= int(self.value) < self.ctx.q:
            raise FieldError(f"{self.value} is not an element of {self.ctx!r}")
        object.__setattr__(self, "value", int(self.value))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError(f"cannot combine {self.ctx!r} with {other.ctx!r}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.ctx.prime(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, int(self.ctx.add(self.value, o)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, int(self.ctx.sub(self.value, o)))

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, int(self.ctx.sub(o, self.value)))

    def __neg__(self):
        return FieldElement(self.ctx, int(self.ctx.neg(self.value)))

    def __mul__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, int(self.ctx.mul(self.value, o)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, int(self.ctx.div(self.value, o)))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, int(self.ctx.pow(self.value, e)))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, int(self.ctx.inv(self.value)))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError(f"cannot compare {self.ctx!r} with {other.ctx!r}")
            return self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == self.ctx.prime(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.ctx!r}({self.value})"


def _companion(modulus: Sequence[int], p: int) -> np.ndarray:
    """Matrix of multiplication by X on coefficient vectors."""
    n = len(modulus) - 1
    C = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        C[i, i - 1] = 1
    C[:, n - 1] = [(-c) % p for c in modulus[:n]]
    return C


def _mul_matrix(g_coeffs: Sequence[int], modulus: Sequence[int], p: int) -> np.ndarray:
    """Matrix of multiplication by the element with coefficients g_coeffs."""
    n = len(modulus) - 1
    C = _companion(modulus, p)
    M = np.zeros((n, n), dtype=np.int64)
    P = np.eye(n, dtype=np.int64)
    for c in g_coeffs:
        M = (M + c * P) % p
        P = (C @ P) % p
    return M


def _is_primitive(g: list[int], modulus: list[int], p: int, q: int) -> bool:
    if not _trim(list(g)):
        return False
    for r in prime_factors(q - 1):
        if _ppowmod(g, (q - 1) // r, modulus, p) == [1]:
            return False
    return q - 1 > 1 or _pmod(g, modulus, p) == [1]


def ff_build(p: int, n: int, ceiling: int | None = None) -> FieldCtx:
    """Build GF(p^n) with the smallest monic irreducible modulus and smallest generator."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise FieldError(f"characteristic {p} is not prime")
    if n < 1:
        raise FieldError("extension degree must be at least 1")
    q = p**n
    ceiling = field_ceiling() if ceiling is None else ceiling
    if q > ceiling:
        raise FieldError(f"field order {q} exceeds the desk-scale ceiling {ceiling}")
    modulus = smallest_irreducible(p, n)
    mod_list = list(modulus)

    generator = None
    for code in range(1, q):
        g = [(code // p**i) % p for i in range(n)]
        if _is_primitive(g, mod_list, p, q):
            generator = code
            g_coeffs = g
            break
    assert generator is not None

    # antilog table: block k holds theta^(kB + i) = M_B^k theta^i
    M = _mul_matrix(g_coeffs, mod_list, p)
    B = max(1, int(np.sqrt(q)))
    first = np.zeros((B, n), dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    v[0] = 1
    for i in range(B):
        first[i] = v
        v = (M @ v) % p
    MB = np.eye(n, dtype=np.int64)
    Mpow, e = M.copy(), B
    while e:
        if e & 1:
            MB = (MB @ Mpow) % p
        Mpow = (Mpow @ Mpow) % p
        e >>= 1
    blocks = []
    cur = first
    total = 0
    while total < q - 1:
        blocks.append(cur)
        total += B
        cur = (cur @ MB.T) % p
    vecs = np.concatenate(blocks)[: q - 1]
    powers = p ** np.arange(n, dtype=np.int64)
    exp = vecs @ powers
    if len(np.unique(exp)) != q - 1:
        raise FieldError("generator search produced a non-primitive element")
    log = np.full(q, -1, dtype=np.int64)
    log[exp] = np.arange(q - 1)
    exp2 = np.concatenate([exp, exp]).astype(np.int64)
    return FieldCtx(p, n, modulus, generator, exp2, log)


def field_from_descriptor(desc: dict) -> FieldCtx:
    ctx = ff_build(desc["p"], desc["n"])
    if list(ctx.modulus) != list(desc["modulus"]) or ctx.generator != desc["generator"]:
        raise FieldError("descriptor does not match the canonical construction")
    return ctx


def frobenius(ctx: FieldCtx, x, k: int):
    return ctx.frobenius(x, k)


@dataclass(frozen=True)
class SquareTest:
    square: bool
    zero: bool = False
    degenerate: bool = False  # characteristic 2: everything is a square

    def __bool__(self) -> bool:
        return self.square


def is_square(ctx: FieldCtx, x) -> SquareTest:
    """Euler-criterion square test; zero counts as a square but is flagged."""
    x = int(x)
    if ctx.p == 2:
        return SquareTest(True, zero=x == 0, degenerate=True)
    if x == 0:
        return SquareTest(True, zero=True)
    return SquareTest(ctx.pow(x, (ctx.q - 1) // 2) == 1)


def square_mask(ctx: FieldCtx) -> np.ndarray:
    """Boolean mask over all elements: True for the nonzero squares."""
    x = ctx.elements()
    mask = np.zeros(ctx.q, dtype=bool)
    if ctx.p == 2:
        mask[1:] = True
        return mask
    mask[1:] = ctx._log[x[1:]] % 2 == 0
    return mask


@dataclass(frozen=True)
class SignPartition:
    plus: frozenset[int]
    minus: frozenset[int]

    def sign(self, a: int) -> int:
        if a in self.plus:
            return 1
        if a in self.minus:
            return -1
        return 0


def half_partition(ctx: FieldCtx, elements: Iterable[int] | None = None) -> SignPartition:
    """Split the nonzero elements (of the whole field, or of a negation-closed
    subset such as a subfield) into a ``plus`` half and its negatives."""
    if ctx.p == 2:
        raise FieldError("characteristic 2 has a == -a; no sign partition exists")
    pool = ctx.elements() if elements is None else np.asarray(list(elements), dtype=np.int64)
    pool = pool[pool != 0]
    negs = ctx.neg(pool)
    plus = frozenset(int(a) for a in pool[pool < negs])
    minus = frozenset(int(a) for a in pool[pool > negs])
    return SignPartition(plus, minus)


def sign_array(ctx: FieldCtx) -> np.ndarray:
    """+1 / -1 / 0 per element under the canonical half partition."""
    x = ctx.elements()
    negs = ctx.neg(x)
    return np.where(x == 0, 0, np.where(x < negs, 1, -1))


def planar_witness(ctx: FieldCtx, f: Sequence[int]) -> int | None:
    """First a != 0 whose difference map x -> f(x+a) - f(x) is not a bijection."""
    if not len(f):
        raise FieldError("empty polynomial")
    fx = np.asarray(ctx.poly_eval(f, ctx.elements()))
    x = ctx.elements()
    for a in range(1, ctx.q):
        diff = ctx.sub(fx[ctx.add(x, a)], fx)
        if np.unique(diff).size != ctx.q:
            return a
    return None


def planar_check(ctx: FieldCtx, f: Sequence[int]) -> bool:
    if ctx.p == 2:
        raise FieldError("planarity as defined needs odd characteristic")
    return planar_witness(ctx, f) is None


def monomial(degree: int, coeff: int = 1) -> list[int]:
    f = [0] * (degree + 1)
    f[degree] = coeff
    return f
