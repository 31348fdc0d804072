"""Semigroup orbits of polynomial systems over finite fields.

A system F = (phi_1, ..., phi_k) of integer polynomials of degree >= 2 acts
on a field by composition.  Words over the alphabet {1, ..., k} pick which
generator acts at each step, with the first letter acting first.  Streams
are infinite words (eventually periodic, or seeded pseudorandom) supporting
the shift map.

The statistics here count iterates of small multiplicative order: m_count
along a fixed stream, its supremum over all words of a given length (by
dynamic programming over field values), and small-order points among the
level sets of the whole system.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .errors import (
    DegenerateGenerator,
    DegreeTooSmall,
    EmptySystem,
    ExplosionGuard,
    LetterOutOfRange,
    OutOfRange,
    Truncated,
)
from .ff import FieldContext, FieldElement, FieldPolynomial, mul_order
from .intpoly import IntPolynomial, reduce_mod, system_height

Word = Tuple[int, ...]

EXHAUSTIVE_WORD_GUARD = 1 << 24
DEFAULT_ORBIT_CAP = 1 << 20


class GeneratorSet:
    """An ordered system of k >= 1 integer polynomials, each of degree >= 2."""

    def __init__(self, polys: Sequence[IntPolynomial]):
        if not polys:
            raise EmptySystem("a generator system needs at least one polynomial")
        for f in polys:
            if f.degree < 2:
                raise DegreeTooSmall("generators must have degree >= 2")
        self.polys: Tuple[IntPolynomial, ...] = tuple(polys)
        self.k = len(self.polys)
        self.degrees = tuple(f.degree for f in self.polys)
        self.d = max(self.degrees)
        self.hF = system_height(self.polys)
        self._reduced: Dict[tuple, Tuple[FieldPolynomial, ...]] = {}

    def reduced(self, ctx: FieldContext) -> Tuple[FieldPolynomial, ...]:
        """Reductions mod p, re-validated to still have degree >= 2."""
        hit = self._reduced.get(ctx._key)
        if hit is not None:
            return hit
        red = tuple(reduce_mod(f, ctx) for f in self.polys)
        for f in red:
            if f.degree < 2:
                raise DegenerateGenerator(
                    "degenerate generator: degree < 2 after reduction mod %d" % ctx.p
                )
        self._reduced[ctx._key] = red
        return red

    def __repr__(self):
        return "GeneratorSet([%s])" % ", ".join(str(f) for f in self.polys)


class WordStream:
    """An infinite word over {1, ..., k}: eventually periodic or seeded
    pseudorandom.  Letters are 1-indexed; ``shift(n)`` drops the first n."""

    def __init__(self, kind, preperiod=(), period=(), k=0, seed=0, _shared=None, _offset=0):
        self.kind = kind
        self.preperiod = tuple(preperiod)
        self.period = tuple(period)
        self.k = k
        self.seed = seed
        if kind == "periodic":
            if not self.period:
                raise OutOfRange("a periodic stream needs a nonempty period")
        elif kind == "random":
            if k < 1:
                raise OutOfRange("a random stream needs k >= 1")
            self._rng = random.Random(seed) if _shared is None else None
            self._letters: List[int] = [] if _shared is None else _shared[0]
            if _shared is not None:
                self._rng = _shared[1]
        else:
            raise OutOfRange("unknown stream kind %r" % (kind,))
        self._offset = _offset

    @classmethod
    def periodic(cls, period: Sequence[int], preperiod: Sequence[int] = ()) -> "WordStream":
        return cls("periodic", preperiod=preperiod, period=period)

    @classmethod
    def constant(cls, letter: int) -> "WordStream":
        return cls("periodic", period=(letter,))

    @classmethod
    def random(cls, k: int, seed: int) -> "WordStream":
        return cls("random", k=k, seed=seed)

    def letter(self, i: int) -> int:
        """The i-th letter, 1-indexed."""
        if i < 1:
            raise OutOfRange("stream letters are 1-indexed")
        i += self._offset
        if self.kind == "periodic":
            if i <= len(self.preperiod):
                return self.preperiod[i - 1]
            return self.period[(i - len(self.preperiod) - 1) % len(self.period)]
        while len(self._letters) < i:
            self._letters.append(self._rng.randint(1, self.k))
        return self._letters[i - 1]

    def prefix(self, n: int) -> Word:
        return tuple(self.letter(i) for i in range(1, n + 1))

    def shift(self, n: int) -> "WordStream":
        """The stream with the first n letters removed."""
        if n < 0:
            raise OutOfRange("shift requires n >= 0")
        if n == 0:
            return self
        if self.kind == "random":
            return WordStream(
                "random",
                k=self.k,
                seed=self.seed,
                _shared=(self._letters, self._rng),
                _offset=self._offset + n,
            )
        pre, per = self.preperiod, self.period
        if n <= len(pre):
            return WordStream("periodic", preperiod=pre[n:], period=per)
        r = (n - len(pre)) % len(per)
        return WordStream("periodic", period=per[r:] + per[:r])

    def describe(self) -> dict:
        if self.kind == "periodic":
            out = {"kind": "periodic", "period": list(self.period)}
            if self.preperiod:
                out["preperiod"] = list(self.preperiod)
        else:
            out = {"kind": "random", "k": self.k, "seed": self.seed}
        if self._offset:
            out["offset"] = self._offset
        return out


def shift(stream: WordStream, n: int) -> WordStream:
    return stream.shift(n)


def stream_from_config(desc: dict) -> WordStream:
    """Build a stream from its ``describe()`` dictionary."""
    kind = desc.get("kind")
    if kind == "periodic":
        s = WordStream.periodic(desc["period"], desc.get("preperiod", ()))
    elif kind == "random":
        s = WordStream.random(desc["k"], desc.get("seed", 0))
    else:
        raise OutOfRange("unknown stream kind %r" % (kind,))
    return s.shift(desc.get("offset", 0))


def apply_word(F: GeneratorSet, word: Sequence[int], x: FieldElement) -> FieldElement:
    """Apply the composition picked by ``word`` (first letter first)."""
    red = F.reduced(x.ctx)
    v = x
    for letter in word:
        if not 1 <= letter <= F.k:
            raise LetterOutOfRange("letter %r outside [1, %d]" % (letter, F.k))
        v = red[letter - 1].eval(v)
    return v


@dataclass
class OrbitRecord:
    """A breadth-first orbit: elements with their first-discovery level."""

    start: FieldElement
    levels: Dict[FieldElement, int]
    order_found: Tuple[FieldElement, ...]
    truncated: bool

    @property
    def T(self) -> int:
        return len(self.levels)

    def elements(self) -> Set[FieldElement]:
        return set(self.levels)


def orbit(F: GeneratorSet, x: FieldElement, cap: int = DEFAULT_ORBIT_CAP) -> OrbitRecord:
    """BFS orbit of x under the whole system, including x at level 0.

    Stops when closed, or flags truncation once ``cap`` elements are found.
    """
    if cap < 1:
        raise OutOfRange("orbit cap must be >= 1")
    red = F.reduced(x.ctx)
    levels = {x: 0}
    order_found = [x]
    queue = deque((x,))
    truncated = False
    while queue and not truncated:
        v = queue.popleft()
        lvl = levels[v] + 1
        for g in red:
            w = g.eval(v)
            if w not in levels:
                if len(levels) >= cap:
                    truncated = True
                    break
                levels[w] = lvl
                order_found.append(w)
                queue.append(w)
    return OrbitRecord(x, levels, tuple(order_found), truncated)


def level_images(
    F: GeneratorSet, x: FieldElement, N: int, exhaustive: bool = False
) -> List[Set[FieldElement]]:
    """The value sets {f(x) : f a length-n composition} for n = 1..N.

    The default propagates value sets level by level, which is equivalent to
    enumerating all k^n words; the exhaustive mode does the enumeration and
    is retained as an oracle behind a guard.
    """
    if N < 1:
        raise OutOfRange("level_images requires N >= 1")
    if exhaustive:
        if F.k**N > EXHAUSTIVE_WORD_GUARD:
            raise ExplosionGuard("k^N exceeds the exhaustive-word guard")
        out = []
        for n in range(1, N + 1):
            out.append(
                {apply_word(F, w, x) for w in product(range(1, F.k + 1), repeat=n)}
            )
        return out
    red = F.reduced(x.ctx)
    cur = {x}
    out = []
    for _ in range(N):
        cur = {g.eval(v) for v in cur for g in red}
        out.append(cur)
    return out


def _qualifies(v: FieldElement, t: int) -> bool:
    return not v.is_zero and mul_order(v) <= t


@dataclass(frozen=True)
class MCountDetail:
    count: int
    zero_hits: int


def m_count_detail(
    F: GeneratorSet, stream: WordStream, x: FieldElement, t: int, N: int
) -> MCountDetail:
    if N < 1:
        raise OutOfRange("m_count requires N >= 1")
    if t < 1:
        raise OutOfRange("m_count requires t >= 1")
    red = F.reduced(x.ctx)
    v = x
    count = 0
    zeros = 0
    for n in range(N):
        if n > 0:
            letter = stream.letter(n)
            if not 1 <= letter <= F.k:
                raise LetterOutOfRange("letter %r outside [1, %d]" % (letter, F.k))
            v = red[letter - 1].eval(v)
        if v.is_zero:
            zeros += 1
        elif mul_order(v) <= t:
            count += 1
    return MCountDetail(count, zeros)


def m_count(F: GeneratorSet, stream: WordStream, x: FieldElement, t: int, N: int) -> int:
    """#{n in [0, N-1] : the n-th iterate along the stream is nonzero and
    has multiplicative order <= t}.  Zero iterates are skipped (they are
    tallied separately by :func:`m_count_detail`)."""
    return m_count_detail(F, stream, x, t, N).count


def sup_m_over_sequences(
    F: GeneratorSet,
    x: FieldElement,
    t: int,
    N: int,
    exhaustive: bool = False,
) -> Tuple[int, Word]:
    """Maximum of m_count over all length-N words, with a witness word.

    Dynamic programming over (field value, step) states; the witness is the
    lexicographically smallest maximizer.  The exhaustive mode enumerates
    all k^N words behind a guard, as an independent oracle.
    """
    if N < 1:
        raise OutOfRange("need N >= 1")
    if t < 1:
        raise OutOfRange("need t >= 1")
    red = F.reduced(x.ctx)
    k = F.k
    if exhaustive:
        if k**N > EXHAUSTIVE_WORD_GUARD:
            raise ExplosionGuard("k^N exceeds the exhaustive-word guard")
        best = -1
        best_word: Word = ()
        for word in product(range(1, k + 1), repeat=N):
            v = x
            c = 1 if _qualifies(v, t) else 0
            for n in range(N - 1):
                v = red[word[n] - 1].eval(v)
                if _qualifies(v, t):
                    c += 1
            if c > best:
                best, best_word = c, word
        return best, best_word

    qual_cache: Dict[FieldElement, int] = {}

    def qual(v: FieldElement) -> int:
        hit = qual_cache.get(v)
        if hit is None:
            hit = 1 if _qualifies(v, t) else 0
            qual_cache[v] = hit
        return hit

    reach: List[Set[FieldElement]] = [{x}]
    for _ in range(N - 1):
        reach.append({g.eval(v) for v in reach[-1] for g in red})
    # gain[n][v]: best additional score from steps n+1 .. N-1 starting at v
    gain: List[Dict[FieldElement, int]] = [dict() for _ in range(N)]
    for v in reach[N - 1]:
        gain[N - 1][v] = 0
    for n in range(N - 2, -1, -1):
        nxt = gain[n + 1]
        cur = gain[n]
        for v in reach[n]:
            cur[v] = max(qual(w) + nxt[w] for w in (g.eval(v) for g in red))
    total = qual(x) + gain[0][x]
    letters: List[int] = []
    v = x
    for n in range(N - 1):
        target = gain[n][v]
        for i in range(1, k + 1):
            w = red[i - 1].eval(v)
            if qual(w) + gain[n + 1][w] == target:
                letters.append(i)
                v = w
                break
    letters.append(1)
    return total, tuple(letters)


def count_small_order_points(
    F: GeneratorSet,
    u: FieldElement,
    t: int,
    N: int,
    include_start: bool = False,
) -> int:
    """Distinct nonzero points of multiplicative order <= t among the level
    sets 1..N of u (level 0, the start point, is included on request)."""
    if N < 0:
        raise OutOfRange("need N >= 0")
    if t < 1:
        raise OutOfRange("need t >= 1")
    seen: Set[FieldElement] = set()
    if include_start:
        seen.add(u)
    if N >= 1:
        for level in level_images(F, u, N):
            seen |= level
    return sum(1 for v in seen if _qualifies(v, t))


def greedy_sequence_cover(
    F: GeneratorSet, x: FieldElement, cap: int = DEFAULT_ORBIT_CAP
) -> int:
    """Upper bound on the minimal number of single-sequence orbits covering
    the full orbit of x.

    Greedy: walk from x, repeatedly steering (by BFS) to the nearest vertex
    not yet covered; when no uncovered vertex is reachable, start a new walk
    from x.  Every walk is a genuine sequence orbit, so the count is a valid
    cover size and hence an upper bound on the minimum.
    """
    rec = orbit(F, x, cap)
    if rec.truncated:
        raise Truncated("orbit hit its cap; cover count would not be exact")
    red = F.reduced(x.ctx)
    succ = {v: tuple(g.eval(v) for g in red) for v in rec.levels}
    uncovered = set(rec.levels)
    walks = 0
    while uncovered:
        walks += 1
        cur = x
        uncovered.discard(cur)
        while uncovered:
            # BFS from cur to the nearest uncovered vertex
            parent: Dict[FieldElement, Optional[FieldElement]] = {cur: None}
            queue = deque((cur,))
            goal = None
            while queue and goal is None:
                v = queue.popleft()
                for w in succ[v]:
                    if w not in parent:
                        parent[w] = v
                        if w in uncovered:
                            goal = w
                            break
                        queue.append(w)
            if goal is None:
                break
            path = []
            v = goal
            while v is not None:
                path.append(v)
                v = parent[v]
            for v in reversed(path):
                uncovered.discard(v)
            cur = goal
    return walks


def theorem46_lhs(d: int, T: int, tau: int, s: int) -> float:
    """T * log(d) + s * log(tau): the log of d^T * tau^s."""
    if min(d, T, tau, s) < 1:
        raise OutOfRange("all arguments must be >= 1")
    return T * math.log(d) + s * math.log(tau)
