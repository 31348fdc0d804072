"""Exact arithmetic in prime fields F_p and extensions F_{p^s}.

Elements are coefficient vectors over a fixed monic irreducible modulus.
The module also provides deterministic primality testing, integer
factorization (trial division plus Brent's cycle method), multiplicative
orders via the factorization of q - 1, and the set of elements of small
multiplicative order.

Desk-scale caps: s <= 16 and q = p^s <= 2^48.  Larger inputs are rejected
early so that order computations stay feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import (
    CompositeModulus,
    DegreeOutOfRange,
    OutOfRange,
    TooLarge,
    ZeroArgument,
    ZeroElement,
)

MAX_EXTENSION_DEGREE = 16
MAX_FIELD_SIZE = 1 << 48
MAX_FACTOR_ARG = 1 << 96
_ORDER_CACHE_LIMIT = 1 << 22


def _sieve(limit: int) -> Tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return tuple(i for i in range(limit + 1) if flags[i])


_SMALL_PRIMES = _sieve(10000)

# Proven deterministic Miller-Rabin base sets.
_MR_BASES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_MR_BOUND_64 = 3317044064679887385961981  # covers n < 3.3e24 with the 13 bases
_MR_BASES_81 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_BASES_BIG = _sieve(100)


def _miller_rabin(n: int, bases: Iterable[int]) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic primality test (proven base sets up to ~2^81)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if n < 1 << 64:
        return _miller_rabin(n, _MR_BASES_64)
    if n < _MR_BOUND_64:
        return _miller_rabin(n, _MR_BASES_81)
    return _miller_rabin(n, _MR_BASES_BIG)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization: ``pairs`` is ((prime, exponent), ...) ascending."""

    pairs: Tuple[Tuple[int, int], ...]
    value: int

    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)


def _brent_rho(n: int) -> int:
    # Deterministic: fixed start x0 = 2 and increment sweep c = 1, 2, ...
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, r, q_acc, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q_acc = q_acc * abs(x - y) % n
                g = math.gcd(q_acc, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError("cycle factoring failed for %d" % n)


def factorize(n: int) -> Factorization:
    """Complete prime factorization of n, deterministic given n.

    Accepts 1 <= n < 2^96; factorize(1) has no prime pairs.
    """
    if not 1 <= n < MAX_FACTOR_ARG:
        raise OutOfRange("factorize requires 1 <= n < 2^96, got %r" % (n,))
    value = n
    counts = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _brent_rho(m)
        stack.append(d)
        stack.append(m // d)
    pairs = tuple(sorted(counts.items()))
    return Factorization(pairs, value)


def omega_distinct_primes(n: int) -> int:
    """Number of distinct prime divisors of |n|."""
    if n == 0:
        raise ZeroArgument("omega is undefined for 0")
    return len(factorize(abs(n)).pairs)


def euler_phi(n: int) -> int:
    if n < 1:
        raise OutOfRange("euler_phi requires n >= 1")
    out = 1
    for p, e in factorize(n).pairs:
        out *= (p - 1) * p ** (e - 1)
    return out


def _divisors(fact: Factorization) -> List[int]:
    divs = [1]
    for p, e in fact.pairs:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


# ---------------------------------------------------------------------------
# dense polynomial arithmetic over F_p, used for irreducibility testing


def _pstrip(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a: List[int], b: List[int], mod: List[int], p: int) -> List[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    prod = [c % p for c in prod]
    # mod is monic
    dm = len(mod) - 1
    for t in range(len(prod) - 1, dm - 1, -1):
        c = prod[t]
        if c:
            for i in range(dm):
                prod[t - dm + i] = (prod[t - dm + i] - c * mod[i]) % p
            prod[t] = 0
    return _pstrip(prod[:dm])


def _ppowmod(base: List[int], e: int, mod: List[int], p: int) -> List[int]:
    result = [1]
    acc = list(base)
    while e:
        if e & 1:
            result = _pmulmod(result, acc, mod, p)
        acc = _pmulmod(acc, acc, mod, p)
        e >>= 1
    return result


def _pgcd(a: List[int], b: List[int], p: int) -> List[int]:
    a, b = _pstrip(list(a)), _pstrip(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        db = len(b) - 1
        r = list(a)
        while len(r) - 1 >= db and _pstrip(r):
            dr = len(r) - 1
            c = r[-1] * inv % p
            for i in range(db + 1):
                r[dr - db + i] = (r[dr - db + i] - c * b[i]) % p
            r = _pstrip(r)
        a, b = b, r
    return a


def _is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin's criterion: x^(p^s) = x mod f, gcd(x^(p^(s/t)) - x, f) = 1."""
    f = list(coeffs)
    s = len(f) - 1
    if s < 1:
        return False
    if s == 1:
        return True
    x = [0, 1]
    for t, _ in factorize(s).pairs:
        g = _ppowmod(x, p ** (s // t), f, p)
        width = max(len(g), 2)
        diff = [
            ((g[i] if i < len(g) else 0) - (x[i] if i < 2 else 0)) % p
            for i in range(width)
        ]
        if len(_pgcd(f, _pstrip(diff), p)) - 1 != 0:
            return False
    xq = _ppowmod(x, p**s, f, p)
    return xq == x


# ---------------------------------------------------------------------------


class FieldContext:
    """A finite field F_{p^s} given by a monic irreducible modulus.

    Elements are represented by coefficient vectors of length s with entries
    in [0, p); the index of an element is its base-p digit value, which gives
    a deterministic enumeration order.
    """

    __slots__ = (
        "p",
        "s",
        "q",
        "modulus",
        "_xred",
        "_key",
        "_fact_q1",
        "_generator_idx",
        "_order_cache",
    )

    def __init__(self, p: int, s: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise CompositeModulus("%r is not prime" % (p,))
        if not 1 <= s <= MAX_EXTENSION_DEGREE:
            raise DegreeOutOfRange(
                "extension degree must satisfy 1 <= s <= %d" % MAX_EXTENSION_DEGREE
            )
        q = p**s
        if q > MAX_FIELD_SIZE:
            raise TooLarge("field size %d exceeds the 2^48 cap" % q)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != s + 1 or modulus[-1] != 1:
            raise CompositeModulus("modulus must be monic of degree s")
        if s == 1:
            if modulus != (0, 1):
                raise CompositeModulus("prime fields use the modulus X")
        elif not _is_irreducible(modulus, p):
            raise CompositeModulus("modulus is reducible over F_%d" % p)
        self.p = p
        self.s = s
        self.q = q
        self.modulus = modulus
        self._key = (p, s, modulus)
        self._fact_q1: Optional[Factorization] = None
        self._generator_idx: Optional[int] = None
        self._order_cache: dict = {}
        if s >= 2:
            row0 = tuple((-m) % p for m in modulus[:s])
            rows = [row0]
            for _ in range(s - 2):
                prev = rows[-1]
                carry = prev[s - 1]
                shifted = (0,) + prev[: s - 1]
                rows.append(
                    tuple((shifted[i] + carry * row0[i]) % p for i in range(s))
                )
            self._xred = tuple(rows)
        else:
            self._xred = ()

    # -- identity ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, FieldContext) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.s == 1:
            return "F_%d" % self.p
        return "F_%d^%d" % (self.p, self.s)

    # -- element construction ----------------------------------------------
    def element(self, value) -> "FieldElement":
        """Scalar embed an int, or build from a coefficient sequence."""
        if isinstance(value, FieldElement):
            if value.ctx._key != self._key:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, int):
            coeffs = (value % self.p,) + (0,) * (self.s - 1)
            return FieldElement(self, coeffs)
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) != self.s:
            raise ValueError("coefficient vector must have length s")
        return FieldElement(self, coeffs)

    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.s)

    def one(self) -> "FieldElement":
        return self.element(1)

    def from_index(self, m: int) -> "FieldElement":
        if not 0 <= m < self.q:
            raise OutOfRange("index must lie in [0, q)")
        if self.s == 1:
            return FieldElement(self, (m,))
        coeffs = []
        for _ in range(self.s):
            m, c = divmod(m, self.p)
            coeffs.append(c)
        return FieldElement(self, tuple(coeffs))

    def index(self, u: "FieldElement") -> int:
        m = 0
        for c in reversed(u.coeffs):
            m = m * self.p + c
        return m

    def elements(self) -> Iterator["FieldElement"]:
        for m in range(self.q):
            yield self.from_index(m)

    # -- coefficient-vector arithmetic ---------------------------------------
    def _add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def _neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def _mul(self, a, b):
        p = self.p
        if self.s == 1:
            return (a[0] * b[0] % p,)
        s = self.s
        prod = [0] * (2 * s - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        for t in range(2 * s - 2, s - 1, -1):
            c = prod[t] % p
            if c:
                row = self._xred[t - s]
                for i in range(s):
                    if row[i]:
                        prod[i] += c * row[i]
        return tuple(c % p for c in prod[:s])

    def _pow(self, a, e: int):
        if self.s == 1:
            return (pow(a[0], e, self.p),)
        result = self.element(1).coeffs
        acc = a
        while e:
            if e & 1:
                result = self._mul(result, acc)
            acc = self._mul(acc, acc)
            e >>= 1
        return result

    def _inv(self, a):
        if not any(a):
            raise ZeroElement("zero is not invertible")
        return self._pow(a, self.q - 2)

    # -- group-order helpers -------------------------------------------------
    def group_order_factorization(self) -> Factorization:
        if self._fact_q1 is None:
            self._fact_q1 = factorize(self.q - 1)
        return self._fact_q1

    def multiplicative_generator(self) -> "FieldElement":
        """First generator of F_q* in index order (deterministic)."""
        if self._generator_idx is not None:
            return self.from_index(self._generator_idx)
        fact = self.group_order_factorization()
        n = self.q - 1
        one = self.one().coeffs
        for m in range(1, self.q):
            g = self.from_index(m)
            if all(self._pow(g.coeffs, n // p) != one for p in fact.primes()):
                self._generator_idx = m
                return g
        raise ArithmeticError("no generator found; field construction is broken")


class FieldElement:
    """An element of a :class:`FieldContext`, hashable and immutable."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldContext, coeffs: Tuple[int, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and self.coeffs == other.coeffs
            and self.ctx._key == other.ctx._key
        )

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx._add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx._sub(self.coeffs, other.coeffs))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx._neg(self.coeffs))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx._mul(self.coeffs, other.coeffs))

    def __truediv__(self, other):
        return FieldElement(
            self.ctx, self.ctx._mul(self.coeffs, self.ctx._inv(other.coeffs))
        )

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.ctx, self.ctx._pow(self.ctx._inv(self.coeffs), -e))
        return FieldElement(self.ctx, self.ctx._pow(self.coeffs, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx._inv(self.coeffs))

    @property
    def index(self) -> int:
        return self.ctx.index(self)

    def __repr__(self):
        return "%r(%d)" % (self.ctx, self.index)


class FieldPolynomial:
    """A polynomial with coefficients in the prime subfield of ``ctx``.

    This is the reduction of an integer polynomial mod p; evaluation maps
    field elements to field elements.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldContext, coeffs: Sequence[int]):
        cs = [int(c) % ctx.p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return (
            isinstance(other, FieldPolynomial)
            and self.coeffs == other.coeffs
            and self.ctx._key == other.ctx._key
        )

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "FieldPolynomial(%r, %r)" % (self.ctx, list(self.coeffs))

    def eval(self, x: FieldElement) -> FieldElement:
        ctx = self.ctx
        if ctx.s == 1:
            acc = 0
            v = x.coeffs[0]
            p = ctx.p
            for c in reversed(self.coeffs):
                acc = (acc * v + c) % p
            return FieldElement(ctx, (acc,))
        acc = (0,) * ctx.s
        for c in reversed(self.coeffs):
            acc = ctx._mul(acc, x.coeffs)
            acc = ((acc[0] + c) % ctx.p,) + acc[1:]
        return FieldElement(ctx, acc)

    def eval_index(self, m: int) -> int:
        """Index-to-index evaluation; fast path for prime fields."""
        ctx = self.ctx
        if ctx.s == 1:
            acc = 0
            p = ctx.p
            for c in reversed(self.coeffs):
                acc = (acc * m + c) % p
            return acc
        return ctx.index(self.eval(ctx.from_index(m)))


def make_prime_field(p: int) -> FieldContext:
    """F_p for prime p (deterministic primality check)."""
    return FieldContext(p, 1, (0, 1))


def make_extension_field(p: int, s: int) -> FieldContext:
    """F_{p^s} with the first monic irreducible modulus in index order.

    Candidates of degree s are enumerated by their base-p coefficient index
    (constant term varying fastest), so the choice is deterministic.
    """
    if not is_prime(p):
        raise CompositeModulus("%r is not prime" % (p,))
    if not 1 <= s <= MAX_EXTENSION_DEGREE:
        raise DegreeOutOfRange(
            "extension degree must satisfy 1 <= s <= %d" % MAX_EXTENSION_DEGREE
        )
    if p**s > MAX_FIELD_SIZE:
        raise TooLarge("field size %d exceeds the 2^48 cap" % p**s)
    if s == 1:
        return make_prime_field(p)
    for m in range(p**s):
        digits = []
        mm = m
        for _ in range(s):
            mm, c = divmod(mm, p)
            digits.append(c)
        candidate = tuple(digits) + (1,)
        if _is_irreducible(candidate, p):
            return FieldContext(p, s, candidate)
    raise ArithmeticError("no irreducible modulus found; unreachable for s >= 2")


def mul_order(u: FieldElement) -> int:
    """Multiplicative order of a nonzero element.

    Standard algorithm: factor q - 1, then for each prime strip exponents
    while the corresponding power of u is still 1.
    """
    if u.is_zero:
        raise ZeroElement("zero has no multiplicative order")
    ctx = u.ctx
    cache = ctx._order_cache if ctx.q <= _ORDER_CACHE_LIMIT else None
    if cache is not None:
        hit = cache.get(u.coeffs)
        if hit is not None:
            return hit
    n = ctx.q - 1
    one = ctx.one().coeffs
    order = 1
    for p, e in ctx.group_order_factorization().pairs:
        x = ctx._pow(u.coeffs, n // p**e)
        while x != one:
            x = ctx._pow(x, p)
            order *= p
    if cache is not None:
        cache[u.coeffs] = order
    return order


def small_order_set(ctx: FieldContext, t: int) -> Set[FieldElement]:
    """The set of elements of F_q* with multiplicative order at most t.

    Built from a generator g: for each divisor l of q - 1 with l <= t, the
    l-th roots of unity are g^(j(q-1)/l), and their union is the set.
    """
    if t < 1:
        raise OutOfRange("t must be at least 1")
    g = ctx.multiplicative_generator()
    n = ctx.q - 1
    out = {ctx.one()}
    for l in _divisors(ctx.group_order_factorization()):
        if l > t:
            break
        if l == 1:
            continue
        h = g ** (n // l)
        x = ctx.one()
        for _ in range(l):
            x = x * h
            out.add(x)
    return out
