"""Arbitrary-precision integer polynomials.

Ring operations, composition, cyclotomic polynomials by exact division,
resultants via the subresultant polynomial remainder sequence, logarithmic
Weil heights of primitive integer polynomials, normalized Chebyshev forms,
and classification of polynomials up to rational linear conjugacy.

Text format: sparse descending with caret powers, e.g. ``X^4 - X^2 + 1``.
Parsing additionally accepts an optional ``*`` between coefficient and
variable and arbitrary whitespace; printing and parsing round-trip.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DegreeTooSmall,
    EmptySystem,
    OutOfRange,
    PolynomialParseError,
    ZeroPolynomial,
)
from .ff import FieldContext, FieldPolynomial

MAX_CYCLOTOMIC_INDEX = 100000


class IntPolynomial:
    """A polynomial in Z[X], stored low-to-high with no trailing zeros.

    The zero polynomial has degree -1 (sentinel for minus infinity).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def x_power(cls, n: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * n + (c,))

    # -- basic queries --------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> int:
        if not self.coeffs:
            raise ZeroPolynomial("the zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    # -- ring operations -------------------------------------------------------
    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(out)

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(tuple(c * other for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolynomial()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return IntPolynomial(out)

    def __rmul__(self, other: int) -> "IntPolynomial":
        return self * other

    def __pow__(self, e: int) -> "IntPolynomial":
        if e < 0:
            raise OutOfRange("polynomial powers require e >= 0")
        result = IntPolynomial((1,))
        acc = self
        while e:
            if e & 1:
                result = result * acc
            acc = acc * acc
            e >>= 1
        return result

    def compose(self, inner: "IntPolynomial") -> "IntPolynomial":
        """self(inner(X)), by Horner evaluation in Z[X]."""
        acc = IntPolynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + IntPolynomial((c,))
        return acc

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- content ---------------------------------------------------------------
    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPolynomial":
        c = self.content()
        if c in (0, 1):
            return self
        return IntPolynomial(tuple(a // c for a in self.coeffs))

    # -- dunder plumbing ---------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "IntPolynomial(%s)" % format_poly(self)

    def __str__(self):
        return format_poly(self)


X = IntPolynomial((0, 1))


# ---------------------------------------------------------------------------
# text format


def format_poly(f: IntPolynomial) -> str:
    if f.is_zero:
        return "0"
    parts = []
    for i in range(f.degree, -1, -1):
        c = f.coeff(i)
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            var = "X" if i == 1 else "X^%d" % i
            body = var if mag == 1 else "%d%s" % (mag, var)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def parse_poly(text: str) -> IntPolynomial:
    """Parse the sparse text format; raises with the failing offset."""
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def read_int() -> int:
        nonlocal pos
        start = pos
        while pos < n and text[pos].isdigit():
            pos += 1
        if pos == start:
            raise PolynomialParseError("expected an integer", start)
        return int(text[start:pos])

    coeffs: dict = {}
    skip_ws()
    if pos == n:
        raise PolynomialParseError("empty polynomial text", pos)
    first = True
    while pos < n:
        sign = 1
        skip_ws()
        if not first or (pos < n and text[pos] in "+-"):
            if pos >= n or text[pos] not in "+-":
                raise PolynomialParseError("expected '+' or '-'", pos)
            sign = -1 if text[pos] == "-" else 1
            pos += 1
            skip_ws()
        first = False
        if pos >= n:
            raise PolynomialParseError("dangling sign", pos)
        coeff = None
        if text[pos].isdigit():
            coeff = read_int()
            skip_ws()
            if pos < n and text[pos] == "*":
                pos += 1
                skip_ws()
                if pos >= n or text[pos] not in "Xx":
                    raise PolynomialParseError("expected X after '*'", pos)
        power = 0
        if pos < n and text[pos] in "Xx":
            pos += 1
            power = 1
            skip_ws()
            if pos < n and text[pos] == "^":
                pos += 1
                skip_ws()
                power = read_int()
        elif coeff is None:
            raise PolynomialParseError("expected a term", pos)
        coeffs[power] = coeffs.get(power, 0) + sign * (1 if coeff is None else coeff)
        skip_ws()
    out = [0] * (max(coeffs) + 1 if coeffs else 0)
    for k, v in coeffs.items():
        out[k] = v
    return IntPolynomial(out)


# ---------------------------------------------------------------------------
# cyclotomic polynomials


_cyclo_cache = {1: IntPolynomial((-1, 1))}
_cyclo_lock = threading.RLock()


def _exact_div(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Quotient of an exact division in Z[X] (b monic or dividing exactly)."""
    ra = list(a.coeffs)
    db = b.degree
    blc = b.lc
    out = [0] * (len(ra) - db)
    for i in range(len(ra) - 1, db - 1, -1):
        c = ra[i]
        if c % blc != 0:
            raise ArithmeticError("division is not exact")
        qc = c // blc
        out[i - db] = qc
        if qc:
            for j in range(db + 1):
                ra[i - db + j] -= qc * b.coeffs[j]
    if any(ra[:db]):
        raise ArithmeticError("division is not exact")
    return IntPolynomial(out)


def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial, by exact division of X^n - 1.

    Memoized; safe under concurrent lookup-or-insert.
    """
    if not 1 <= n <= MAX_CYCLOTOMIC_INDEX:
        raise OutOfRange("cyclotomic index must satisfy 1 <= n <= %d" % MAX_CYCLOTOMIC_INDEX)
    with _cyclo_lock:
        hit = _cyclo_cache.get(n)
        if hit is not None:
            return hit
        poly = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
        for d in range(1, n):
            if n % d == 0:
                poly = _exact_div(poly, cyclotomic(d))
        _cyclo_cache[n] = poly
        return poly


# ---------------------------------------------------------------------------
# resultants (subresultant polynomial remainder sequence)


def _prem(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b."""
    r = list(a)
    db = len(b) - 1
    blc = b[-1]
    e = len(a) - len(b) + 1
    while len(r) - 1 >= db and any(r):
        c = r[-1]
        r = [blc * x for x in r]
        shift = len(r) - 1 - db
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        while r and r[-1] == 0:
            r.pop()
        e -= 1
    return [x * blc**e for x in r]


def resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Res(f, g) = lc(f)^deg(g) * prod g(alpha) over the roots alpha of f.

    Computed with the subresultant PRS, so all intermediate divisions are
    exact over Z.  Constants: Res(f, c) = c^deg(f); two constants give 1.
    """
    if f.is_zero or g.is_zero:
        raise ZeroPolynomial("resultants require nonzero polynomials")
    a, b = f, g
    sign = 1
    if a.degree < b.degree:
        a, b = b, a
        if a.degree % 2 == 1 and b.degree % 2 == 1:
            sign = -1
    if b.degree == 0:
        return sign * b.lc**a.degree
    ca, cb = a.content(), b.content()
    scale = ca**b.degree * cb**a.degree
    A = list(a.primitive().coeffs)
    B = list(b.primitive().coeffs)
    g_, h = 1, 1
    while True:
        da, db = len(A) - 1, len(B) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            sign = -sign
        R = _prem(A, B)
        A = B
        div = g_ * h**delta
        B = [c // div for c in R]
        g_ = A[-1]
        if delta > 0:
            h = g_**delta // h ** (delta - 1)
        if not B:
            return 0
        if len(B) - 1 == 0:
            break
    da = len(A) - 1
    res = B[0] ** da // h ** (da - 1)
    return sign * scale * res


# ---------------------------------------------------------------------------
# heights


def height(f: IntPolynomial) -> float:
    """Logarithmic Weil height: log of the max |coefficient| of the
    primitive part (content divided out)."""
    if f.is_zero:
        raise ZeroPolynomial("the zero polynomial has no height")
    c = f.content()
    return math.log(max(abs(a) // c for a in f.coeffs))


def system_height(polys: Sequence[IntPolynomial]) -> float:
    """Max height over a nonempty family of generators."""
    if not polys:
        raise EmptySystem("a generator system needs at least one polynomial")
    return max(height(f) for f in polys)


def composition_height_bound(n: int, d: int, h_f: float) -> float:
    """Height bound for an n-fold composition of degree-d generators of
    system height h_f:  ((d^n-1)/(d-1)) h_f + d^2 ((d^(n-1)-1)/(d-1)) log 8.
    """
    if n < 1 or d < 2:
        raise OutOfRange("need n >= 1 and d >= 2")
    lead = (d**n - 1) // (d - 1)
    tail = d * d * ((d ** (n - 1) - 1) // (d - 1))
    return lead * h_f + tail * math.log(8)


# ---------------------------------------------------------------------------
# Chebyshev normal forms and linear conjugacy


def chebyshev(d: int) -> IntPolynomial:
    """Normalized Chebyshev form: T~_1 = X, T~_2 = X^2 - 2, and
    T~_(d+1) = X * T~_d - T~_(d-1)."""
    if d < 1:
        raise OutOfRange("chebyshev index must be >= 1")
    prev = IntPolynomial((2,))
    cur = X
    for _ in range(d - 1):
        prev, cur = cur, X * cur - prev
    return cur


MONOMIAL_CONJUGATE = "monomial_conjugate"
CHEBYSHEV_CONJUGATE = "chebyshev_conjugate"
NON_SPECIAL = "non_special"


@dataclass(frozen=True)
class SpecialClassification:
    """Outcome of the rational linear-conjugacy test.

    ``witness`` is (alpha, beta) for L(X) = alpha*X + beta such that
    L^(-1) o f o L equals ``normal_form`` exactly over Q.
    """

    kind: str
    witness: Optional[Tuple[Fraction, Fraction]] = None
    normal_form: Optional[IntPolynomial] = None


def conjugate_linear(
    f: IntPolynomial, alpha: Fraction, beta: Fraction
) -> Tuple[Fraction, ...]:
    """Coefficients of L^(-1) o f o L for L(X) = alpha*X + beta, over Q."""
    if alpha == 0:
        raise OutOfRange("conjugation requires alpha != 0")
    acc: List[Fraction] = []
    for c in reversed(f.coeffs):
        # acc <- acc * (alpha X + beta) + c
        nxt = [Fraction(0)] * (len(acc) + 1)
        for i, a in enumerate(acc):
            nxt[i + 1] += a * alpha
            nxt[i] += a * beta
        nxt[0] += c
        acc = nxt
    if not acc:
        acc = [Fraction(0)]
    acc[0] -= beta
    out = [a / alpha for a in acc]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _iroot(n: int, k: int) -> Optional[int]:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    for cand in (r, r + 1):
        if cand**k == n:
            return cand
    return None


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    a = _iroot(x.numerator, 2)
    b = _iroot(x.denominator, 2)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def is_special(f: IntPolynomial) -> SpecialClassification:
    """Classify f up to rational linear conjugacy against X^d and +-T~_d.

    The unique centering translation (killing the X^(d-1) coefficient) is
    applied first; a monomial class then shows up as an exact monomial, and
    a Chebyshev class as a rational rescaling of +-T~_d.  Detection is over
    Q only: conjugations that need an irrational scaling are not found.
    """
    d = f.degree
    if d < 2:
        raise DegreeTooSmall("classification requires degree >= 2")
    ad = f.lc
    beta = Fraction(-f.coeff(d - 1), d * ad)
    h = conjugate_linear(f, Fraction(1), beta)
    # monomial branch: the centered form must be exactly a_d * X^d
    if all(h[i] == 0 for i in range(d)):
        alpha = _scaling_to_monic(ad, d)
        if alpha is not None:
            return SpecialClassification(
                MONOMIAL_CONJUGATE, (alpha, beta), IntPolynomial.x_power(d)
            )
        return SpecialClassification(
            MONOMIAL_CONJUGATE, (Fraction(1), beta), IntPolynomial.x_power(d, ad)
        )
    # Chebyshev branch: h(sigma X)/sigma = eps * T~_d needs
    # sigma^2 = -h_(d-2) / (d * a_d) and h_j sigma^(j-1) = eps * t_j.
    t = chebyshev(d)
    if h[d - 2] != 0:
        sigma2 = Fraction(-h[d - 2], d) / ad
        sigma = _rational_sqrt(sigma2)
        if sigma is not None and sigma != 0:
            for cand in (sigma, -sigma):
                eps = ad * cand ** (d - 1)
                if eps in (1, -1) and all(
                    h[j] * cand ** (j - 1) == eps * t.coeff(j) for j in range(d + 1)
                ):
                    normal = t if eps == 1 else -t
                    return SpecialClassification(
                        CHEBYSHEV_CONJUGATE, (cand, beta), normal
                    )
    return SpecialClassification(NON_SPECIAL)


def _scaling_to_monic(ad: int, d: int) -> Optional[Fraction]:
    """alpha with alpha^(d-1) = 1/ad, if one exists in Q (alpha = 1/w with
    w^(d-1) = ad)."""
    m = d - 1
    if m % 2 == 1:
        w = _iroot(abs(ad), m)
        if w is None:
            return None
        if ad < 0:
            w = -w
        return Fraction(1, w)
    if ad < 0:
        return None
    w = _iroot(ad, m)
    return None if w is None else Fraction(1, w)


# ---------------------------------------------------------------------------


def reduce_mod(f: IntPolynomial, ctx: FieldContext) -> FieldPolynomial:
    """Reduction of f into the prime subfield of ctx; degree may drop."""
    return FieldPolynomial(ctx, f.coeffs)
