"""Derived quantities of an automatic sequence.

Everything here is computed exactly, by compiling a first-order formula
about positions of the sequence and inspecting the resulting automaton.
The constants can be astronomically large; they are returned as plain
integers and never materialised as unary objects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .automata import Dfao, canonical_dfa, enumerate_accepted, is_empty
from .errors import RankTwoError
from .logic import (
    CompileLimits,
    Const,
    add,
    and_,
    compile_formula,
    decide,
    exists,
    forall,
    gt,
    not_,
    seq_at,
    witness,
)
from . import predicates as P


@dataclass(frozen=True)
class AnalysisConstants:
    """Computable constants attached to a sequence.

    C bounds where every length-n factor first appears (within C*n
    positions), kappa = C + 1 is the recurrence constant, B is the power
    bound: any factor occurring with exponent >= B occurs with unbounded
    exponent.  p is the exponent threshold used downstream and equals B.
    """

    C: int
    kappa: int
    B: int
    p: int
    appearance_states: int
    power_states: int


def appearance_constant(seq: Dfao, limits: Optional[CompileLimits] = None) -> int:
    """Least-cover bound C with A(n) <= C*n for all n.

    The graph of n -> A(n) is recognised by an automaton with r0 states;
    an accepted pair with m > k^(r0+1) * n would contain a pumpable run
    of columns whose n-track digit is zero, contradicting that A is a
    function.  Hence C = k^(r0+1) is a valid bound.
    """
    a = compile_formula(P.appearance_formula("n", "m"), seq=seq, limits=limits)
    return seq.k ** (a.num_states + 1)


def power_bound(seq: Dfao, limits: Optional[CompileLimits] = None) -> tuple[int, int]:
    """(B, r): any factor with an exponent-B power has unbounded powers.

    r is the state count of the automaton for "the block at the first
    occurrence i repeats with period p across a window of length n"; a
    window longer than k^r * C * p pumps to windows of unbounded length.
    """
    a = compile_formula(
        P.unbounded_powers_formula("i", "n", "p"), seq=seq, limits=limits
    )
    r = a.num_states
    return seq.k ** r * appearance_constant(seq, limits=limits), r


def constants(seq: Dfao, limits: Optional[CompileLimits] = None) -> AnalysisConstants:
    ap = compile_formula(P.appearance_formula("n", "m"), seq=seq, limits=limits)
    C = seq.k ** (ap.num_states + 1)
    pw = compile_formula(
        P.unbounded_powers_formula("i", "n", "p"), seq=seq, limits=limits
    )
    B = seq.k ** pw.num_states * C
    return AnalysisConstants(
        C=C,
        kappa=C + 1,
        B=B,
        p=B,
        appearance_states=ap.num_states,
        power_states=pw.num_states,
    )


def unbounded_primitive_factors(
    seq: Dfao,
    limits: Optional[CompileLimits] = None,
    max_results: int = 4096,
) -> list[tuple[int, int, tuple[int, ...]]]:
    """All (i, p, word) with word = x[i..i+p) primitive, first occurring
    at i, and occurring with unbounded exponent.

    The set is finite for any automatic sequence, so an infinite language
    here means the surrounding computation is inconsistent and raises.
    """
    a = compile_formula(
        P.unbounded_primitive_factors_formula("i", "p"), seq=seq, limits=limits
    )
    assert a.var_order == ("i", "p") or is_empty(a)
    try:
        pairs = enumerate_accepted(a, limit=max_results)
    except RankTwoError as exc:
        raise RankTwoError(
            f"unbounded primitive factor set is not finite: {exc}"
        ) from exc
    out = []
    for i, p in sorted(pairs):
        pref = seq.prefix(i + p)
        word = tuple(pref[i:i + p])
        root = word[:_brute_root_len(word)]
        if len(root) != p:
            raise RankTwoError(
                f"imprimitive word {word} reported as unbounded primitive factor"
            )
        if any(tuple(pref[t:t + p]) == word for t in range(i)):
            raise RankTwoError(
                f"position {i} is not the first occurrence of {word}"
            )
        out.append((i, p, word))
    return out


def _brute_root_len(word) -> int:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(word) == tuple(word[:d]) * (n // d):
            return d
    return n


class SpecialExponent(enum.Enum):
    """Non-numeric outcomes of a largest-exponent query."""

    NOT_A_FACTOR = "not-a-factor"
    UNBOUNDED = "unbounded"

    def __repr__(self) -> str:  # cleaner in assertion output
        return f"SpecialExponent.{self.name}"


NOT_A_FACTOR = SpecialExponent.NOT_A_FACTOR
UNBOUNDED = SpecialExponent.UNBOUNDED


def max_exponent(seq: Dfao, z: Sequence[int], limits: Optional[CompileLimits] = None):
    """Largest e with z^e a factor, as a Fraction, or a SpecialExponent.

    Fractional powers count in the usual way: z^(m+r)/r is any window of
    length m + r with period r = |z| whose first r letters are z.
    """
    z = tuple(int(a) for a in z)
    if not z:
        raise ValueError("the empty word has no exponent")
    r = len(z)

    occurs = compile_formula(P.word_at("j", z), seq=seq, limits=limits)
    if is_empty(occurs):
        return NOT_A_FACTOR

    # x[j..j+m) = x[j+r..j+r+m) says the window of length m + r at j has
    # period r; with z at j, that window is a power of z
    j, n, m = "j", "n", "m"

    def window(length):
        return P.factoreq(j, add(j, r), length)

    unbounded = forall(
        m, exists((j, n), and_(gt(n, m), P.word_at(j, z), window(n)))
    )
    if decide(unbounded, seq=seq, limits=limits):
        return UNBOUNDED

    # the accepted m are downward closed; the least rejected one is the
    # successor of the maximum
    phi = exists(j, and_(P.word_at(j, z), window(m)))
    blocked = witness(not_(phi), seq=seq, limits=limits)
    assert blocked is not None, "bounded exponents must have a maximal window"
    m_max = blocked["m"] - 1
    assert m_max >= 0
    return Fraction(m_max + r, r)


def is_purely_periodic(seq: Dfao, limits: Optional[CompileLimits] = None) -> Optional[int]:
    """The least period if x is purely periodic, else None."""
    w = witness(P.pure_period_formula("p"), seq=seq, limits=limits)
    return w["p"] if w is not None else None


def is_ultimately_periodic(
    seq: Dfao, limits: Optional[CompileLimits] = None
) -> Optional[tuple[int, int]]:
    """Lexicographically least (preperiod, period), or None.

    Finding the least c first and then the least p for that c is what
    makes the answer lexicographic; a single shortest-witness query on
    the pair automaton would order by encoding length instead.
    """
    f = P.ultimate_period_formula("c", "p")
    wc = witness(exists("p", f), seq=seq, limits=limits)
    if wc is None:
        return None
    c = wc["c"]
    wp = witness(P.ultimate_period_formula(Const(c), "p"), seq=seq, limits=limits)
    assert wp is not None
    return (c, wp["p"])


def occurring_letters(seq: Dfao, limits: Optional[CompileLimits] = None) -> tuple[int, ...]:
    """The output letters that actually occur, in increasing order."""
    out = []
    for a in sorted(set(seq.alphabet)):
        if not is_empty(compile_formula(seq_at("n", a), seq=seq, limits=limits)):
            out.append(a)
    return tuple(out)


def shift_sequence(seq: Dfao, t: int, limits: Optional[CompileLimits] = None) -> Dfao:
    """The sequence n -> x[n + t], as an automaton in canonical form."""
    if t < 0:
        raise ValueError("shift must be nonnegative")
    if t == 0:
        return seq.canonical()
    letters = sorted(set(seq.alphabet))
    parts = [
        compile_formula(seq_at(add("n", t), a), seq=seq, limits=limits)
        for a in letters
    ]
    # run the per-letter acceptors in parallel; exactly one accepts any
    # given position, which names the output letter
    initial = tuple(p.initial for p in parts)
    states = {initial: 0}
    order = [initial]
    delta = []
    outputs = []
    for vec in order:
        row = []
        for d in range(seq.k):
            nxt = tuple(p.delta[q][d] for p, q in zip(parts, vec))
            if nxt not in states:
                states[nxt] = len(order)
                order.append(nxt)
            row.append(states[nxt])
        delta.append(row)
        hits = [a for a, p, q in zip(letters, parts, vec) if p.accepting[q]]
        if len(hits) != 1:
            raise RankTwoError("shifted sequence has an ill-defined output")
        outputs.append(hits[0])
    shifted = Dfao(
        k=seq.k,
        alphabet=tuple(letters),
        outputs=tuple(outputs),
        delta=tuple(tuple(r) for r in delta),
        initial=0,
    )
    return shifted.canonical()


def strip_max_power_prefix(
    seq: Dfao, u: Sequence[int], limits: Optional[CompileLimits] = None
) -> tuple[int, Dfao]:
    """(i_max, shifted): remove the longest u-power prefix u^{i_max}.

    Raises ValueError when x = u^omega, since then there is nothing left
    after stripping.
    """
    u = tuple(int(a) for a in u)
    if not u:
        raise ValueError("cannot strip powers of the empty word")
    blocked = witness(not_(P.u_power_prefix("m", u)), seq=seq, limits=limits)
    if blocked is None:
        raise ValueError("sequence is periodic under the given word")
    i_max = blocked["m"] - 1
    assert i_max >= 0
    return i_max, shift_sequence(seq, i_max * len(u), limits=limits)
