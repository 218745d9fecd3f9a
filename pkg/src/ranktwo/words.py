"""Combinatorics on finite words.

Words are tuples of small non-negative integers.  The helpers here are the
ground layer for the rank decision procedure: periods, primitive roots,
conjugation equations, reduction of a word pair to a minimal generating
pair, and greedy parsing of a symbol stream into two-word blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

Word = tuple[int, ...]

WordLike = Union[str, Iterable[int]]


def word(w: WordLike) -> Word:
    """Coerce a digit string or an int iterable to a Word tuple."""
    if isinstance(w, str):
        return tuple(int(c) for c in w)
    return tuple(int(c) for c in w)


def period(w: WordLike) -> int:
    """Smallest p >= 1 with w[i] == w[i+p] for all valid i.

    Computed from the border (failure-function) table: the minimal period
    of w is len(w) minus the length of its longest proper border.
    """
    w = word(w)
    n = len(w)
    if n == 0:
        raise ValueError("period of the empty word is undefined")
    border = [0] * (n + 1)
    border[0] = -1
    b = -1
    for i in range(n):
        while b >= 0 and w[b] != w[i]:
            b = border[b]
        b += 1
        border[i + 1] = b
    return n - border[n]


def exponent(w: WordLike) -> Fraction:
    """len(w) / period(w) as an exact fraction."""
    w = word(w)
    return Fraction(len(w), period(w))


def primitive_root(w: WordLike) -> tuple[Word, int]:
    """Return (t, e) with w == t^e, t primitive and e maximal."""
    w = word(w)
    n = len(w)
    p = period(w)
    if p < n and n % p == 0:
        return w[:p], n // p
    return w, 1


def is_primitive(w: WordLike) -> bool:
    return primitive_root(w)[1] == 1


def commutes(u: WordLike, v: WordLike) -> bool:
    """True iff uv == vu, i.e. u and v are powers of a common word."""
    u, v = word(u), word(v)
    return u + v == v + u


@dataclass(frozen=True)
class ConjugationSolution:
    """Solution of d u = u c: d = rs, c = sr, u = (rs)^alpha r."""

    r: Word
    s: Word
    alpha: int

    @property
    def c(self) -> Word:
        return self.s + self.r


def solve_conjugation(d: WordLike, u: WordLike) -> Optional[ConjugationSolution]:
    """Solve d u = u c for c, if possible.

    The equation is solvable iff u is a prefix of d u, which forces
    u = d^alpha d[:rho] for alpha = len(u) // len(d), rho = len(u) % len(d).
    The returned split d = r s has maximal alpha (r as short as possible);
    r may be empty.
    """
    d, u = word(d), word(u)
    if not d:
        raise ValueError("d must be nonempty")
    alpha, rho = divmod(len(u), len(d))
    if d * alpha + d[:rho] != u:
        return None
    return ConjugationSolution(r=d[:rho], s=d[rho:], alpha=alpha)


@dataclass(frozen=True)
class Single:
    """Reduction outcome for a commuting pair: both are powers of root."""

    root: Word


@dataclass(frozen=True)
class Pair:
    """A minimal generating pair; neither word is a prefix of the other."""

    a: Word
    b: Word


FreeReduction = Union[Single, Pair]


def _factorizes(w: Word, a: Word, b: Word) -> bool:
    """True iff w is a concatenation of copies of a and b."""
    n = len(w)
    la, lb = len(a), len(b)
    ok = [False] * (n + 1)
    ok[0] = True
    for m in range(n):
        if not ok[m]:
            continue
        if w[m : m + la] == a:
            ok[m + la] = True
        if w[m : m + lb] == b:
            ok[m + lb] = True
    return ok[n]


def _strip_to_fixed_point(u: Word, v: Word) -> tuple[Word, Word]:
    # While one word is a prefix of the other, replace the longer word by
    # its remainder.  Total length strictly decreases, so this terminates.
    while True:
        if len(u) > len(v):
            u, v = v, u
        if not u or v[: len(u)] != u:
            return u, v
        v = v[len(u) :]


def free_reduce(u: WordLike, v: WordLike) -> FreeReduction:
    """Reduce {u, v} to a minimal generating set.

    If u and v commute the result is Single(t) with t their common
    primitive root.  Otherwise the result is Pair(a, b) such that u and v
    are concatenations of a and b, neither of a, b is a prefix of the
    other, and |a| + |b| is minimal among all generating pairs.

    Prefix stripping alone does not always reach the minimum (for example
    (0, 11) is stripping-stable but is generated by (0, 1)), so after
    stripping we search candidate pairs in order of total length.  The
    search is complete: in any generating pair one word starts u or v, and
    both words occur as factors of u or v.
    """
    u, v = word(u), word(v)
    if not u or not v:
        raise ValueError("free_reduce requires nonempty words")
    if commutes(u, v):
        return Single(primitive_root(u + v)[0])
    u, v = _strip_to_fixed_point(u, v)

    prefixes = {u[:i] for i in range(1, len(u) + 1)}
    prefixes |= {v[:i] for i in range(1, len(v) + 1)}
    factors = set()
    for w in (u, v):
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                factors.add(w[i:j])
    key = lambda w: (len(w), w)
    prefix_list = sorted(prefixes, key=key)
    factor_list = sorted(factors, key=key)

    best: Optional[tuple[Word, Word]] = None
    best_total = len(u) + len(v) + 1
    for a in prefix_list:
        if len(a) + 1 >= best_total:
            break
        for b in factor_list:
            if len(a) + len(b) >= best_total:
                break
            if a == b or a[: len(b)] == b or b[: len(a)] == a:
                continue
            if _factorizes(u, a, b) and _factorizes(v, a, b):
                cand = tuple(sorted((a, b), key=key))
                total = len(a) + len(b)
                if total < best_total or (total == best_total and cand < best):
                    best, best_total = cand, total
    if best is None:
        best = tuple(sorted((u, v), key=key))
    return Pair(*best)


def is_prefix_code_pair(u: WordLike, v: WordLike) -> bool:
    """True iff neither word is a prefix of the other."""
    u, v = word(u), word(v)
    if not u or not v:
        return False
    return u[: len(v)] != v and v[: len(u)] != u


@dataclass(frozen=True)
class StopRule:
    """When greedy_parse should stop: after so many blocks, so many
    occurrences of the second word, or so many consumed symbols."""

    kind: str  # "blocks" | "v_count" | "length"
    value: int

    def __post_init__(self):
        if self.kind not in ("blocks", "v_count", "length"):
            raise ValueError(f"unknown stop rule kind {self.kind!r}")
        if self.value < 0:
            raise ValueError("stop rule value must be non-negative")


@dataclass(frozen=True)
class ParseResult:
    """Outcome of greedy_parse.

    blocks is a 0/1 tuple (0 for u, 1 for v), consumed the number of
    symbols covered by complete blocks.  outcome is "hit" when the stop
    rule was reached, "fail" when neither word matched at position
    fail_position, and "exhausted" when the stream ended first.
    """

    blocks: tuple[int, ...]
    consumed: int
    outcome: str
    fail_position: Optional[int] = None


def greedy_parse(stream: Iterable[int], u: WordLike, v: WordLike, stop: StopRule) -> ParseResult:
    """Parse a symbol stream into u/v blocks until the stop rule fires.

    u and v must form a prefix code pair, which makes the parse
    deterministic: at each boundary at most one of the two words can
    match.
    """
    u, v = word(u), word(v)
    if not is_prefix_code_pair(u, v):
        raise ValueError("greedy_parse requires a prefix code pair")
    it: Iterator[int] = iter(int(s) for s in stream)
    buf: list[int] = []

    def fill(n: int) -> bool:
        while len(buf) < n:
            try:
                buf.append(next(it))
            except StopIteration:
                return False
        return True

    blocks: list[int] = []
    consumed = 0
    v_count = 0

    def done() -> bool:
        if stop.kind == "blocks":
            return len(blocks) >= stop.value
        if stop.kind == "v_count":
            return v_count >= stop.value
        return consumed >= stop.value

    while not done():
        matched = None
        saw_partial = False
        for bit, w in ((0, u), (1, v)):
            if fill(len(w)):
                if tuple(buf[: len(w)]) == w:
                    matched = (bit, w)
                    break
            elif tuple(buf) == w[: len(buf)]:
                # stream ended inside this candidate block
                saw_partial = True
        if matched is None:
            if saw_partial:
                return ParseResult(tuple(blocks), consumed, "exhausted")
            return ParseResult(tuple(blocks), consumed, "fail", fail_position=consumed)
        bit, w = matched
        del buf[: len(w)]
        consumed += len(w)
        blocks.append(bit)
        if bit == 1:
            v_count += 1
    return ParseResult(tuple(blocks), consumed, "hit")


FactorizationPattern = tuple[int, ...]


def pattern(bits: Union[str, Iterable[int]]) -> FactorizationPattern:
    """Coerce "0110"-style strings or bit iterables to a pattern tuple."""
    p = word(bits)
    if any(b not in (0, 1) for b in p):
        raise ValueError("pattern bits must be 0 or 1")
    return p


def build_pattern(bits: Union[str, Iterable[int]], u: WordLike, v: WordLike) -> Word:
    """Substitute u for 0 and v for 1 in the pattern."""
    u, v = word(u), word(v)
    return tuple(s for bit in pattern(bits) for s in (v if bit else u))


def is_p_syndetic(blocks: Union[str, Iterable[int]], p: int) -> bool:
    """Check the flanked-run condition on a 0/1 block sequence.

    True iff no run of 1-blocks of length >= p is enclosed by 0-blocks on
    both sides, and symmetrically no run of 0-blocks of length >= p is
    enclosed by 1-blocks.  Runs touching either end of the sequence are
    not enclosed and never violate the condition.
    """
    bits = pattern(blocks)
    if p <= 0:
        raise ValueError("p must be positive")
    i, n = 0, len(bits)
    while i < n:
        j = i
        while j < n and bits[j] == bits[i]:
            j += 1
        if i > 0 and j < n and j - i >= p:
            return False
        i = j
    return True
