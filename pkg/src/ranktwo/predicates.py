"""Formula builders for positional comparisons inside a sequence.

All window arguments are half-open: a window argument n means the n
positions i, i+1, ..., i+n-1, so n = 0 windows are empty and every
builder is total.  Internal bound variables use a reserved "." prefix
chosen to avoid the variables free in the arguments, which keeps the
builders safe to nest and to call with any user variable names.
"""

from __future__ import annotations

from .logic import (
    Const,
    Formula,
    Term,
    add,
    and_,
    eq,
    exists,
    forall,
    ge,
    gt,
    implies,
    le,
    lt,
    mul,
    ne,
    not_,
    or_,
    seq_at,
    seq_eq,
    term,
    term_vars,
)


def _fresh(args, count: int) -> list[str]:
    used = set()
    for a in args:
        used |= term_vars(term(a))
    out: list[str] = []
    i = 0
    while len(out) < count:
        name = f".{i}"
        if name not in used:
            out.append(name)
        i += 1
    return out


def factoreq(i, j, n) -> Formula:
    """x[i..i+n) = x[j..j+n)."""
    i, j, n = term(i), term(j), term(n)
    (t,) = _fresh((i, j, n), 1)
    return forall(t, implies(lt(t, n), seq_eq(add(i, t), add(j, t))))


def period_f(i, n, p) -> Formula:
    """x[i..i+n) has period p (vacuously for n <= p)."""
    i, n, p = term(i), term(n), term(p)
    (d,) = _fresh((i, n, p), 1)
    return forall(d, implies(eq(add(d, p), n), factoreq(i, add(i, p), d)))


def match_f(i, j, m, r) -> Formula:
    """x[i..i+r) occurs at j and continues r-periodically for m more
    positions, i.e. x[j..j+m+r) is an (m+r)/r power of the block at i."""
    i, j, m, r = term(i), term(j), term(m), term(r)
    return and_(factoreq(i, j, r), factoreq(j, add(j, r), m))


def earliestfac(i, j, n) -> Formula:
    """The block x[j..j+n) occurs at i, and i is its first occurrence."""
    i, j, n = term(i), term(j), term(n)
    (t,) = _fresh((i, j, n), 1)
    return and_(factoreq(i, j, n), forall(t, implies(factoreq(t, j, n), ge(t, i))))


def prefx(i, j, x, y) -> Formula:
    """x[i..i+j) is a prefix of x[x..x+y)."""
    i, j, x, y = term(i), term(j), term(x), term(y)
    return and_(le(j, y), factoreq(i, x, j))


def suffx(i, j, x, y) -> Formula:
    """x[i..i+j) is a suffix of x[x..x+y)."""
    i, j, x, y = term(i), term(j), term(x), term(y)
    (w,) = _fresh((i, j, x, y), 1)
    return and_(
        le(j, y),
        exists(w, and_(eq(add(w, j), add(x, y)), factoreq(i, w, j))),
    )


def prim(i, n) -> Formula:
    """x[i..i+n) is primitive.

    A word is a proper power exactly when some shift j with 0 < j < n is
    a period and the length-j prefix equals the length-j suffix (the word
    equals a nontrivial rotation of itself).
    """
    i, n = term(i), term(n)
    j, d, w = _fresh((i, n), 3)
    rotation = and_(
        gt(j, 0),
        lt(j, n),
        exists(d, and_(eq(add(j, d), n), factoreq(i, add(i, j), d))),
        exists(w, and_(eq(add(w, j), add(i, n)), factoreq(i, w, j))),
    )
    return not_(exists(j, rotation))


def word_at(j, letters) -> Formula:
    """The concrete word appears at position j."""
    j = term(j)
    parts = [seq_at(add(j, Const(t)), int(a)) for t, a in enumerate(letters)]
    if not parts:
        return eq(j, j)
    return and_(*parts)


def congruent(t, c: int, ell: int) -> Formula:
    """t ≡ c (mod ell), for concrete c and ell >= 1."""
    if ell <= 0:
        raise ValueError("modulus must be positive")
    t = term(t)
    (q,) = _fresh((t,), 1)
    return exists(q, eq(t, add(mul(ell, q), Const(c % ell))))


def agrees_with_rotation(t_upper, letters, phase: int) -> Formula:
    """x[t] = w[(t + phase) mod |w|] for all t < t_upper, w concrete."""
    letters = tuple(int(a) for a in letters)
    ell = len(letters)
    if ell == 0:
        raise ValueError("empty word")
    t_upper = term(t_upper)
    (t,) = _fresh((t_upper,), 1)
    cases = [
        implies(congruent(t, c, ell), seq_at(t, letters[(c + phase) % ell]))
        for c in range(ell)
    ]
    return forall(t, implies(lt(t, t_upper), and_(*cases)))


def prefix_in_periodic_orbit(m, letters) -> Formula:
    """x[0..m) is a factor of the one-sided periodic word w^ω, w concrete."""
    phases = [agrees_with_rotation(m, letters, phase) for phase in range(len(letters))]
    return or_(*phases)


def is_power_of(r, letters) -> Formula:
    """x[0..r) equals w^e for some e >= 1, w concrete."""
    ell = len(letters)
    return and_(
        ge(term(r), ell),
        congruent(r, 0, ell),
        agrees_with_rotation(r, letters, 0),
    )


def u_power_prefix(m, letters) -> Formula:
    """w^m is a prefix, with m free and w concrete."""
    letters = tuple(int(a) for a in letters)
    ell = len(letters)
    if ell == 0:
        raise ValueError("empty word")
    m = term(m)
    (n,) = _fresh((m,), 1)
    return exists(n, and_(eq(n, mul(ell, m)), agrees_with_rotation(n, letters, 0)))


def unbounded_powers_formula(i, n, p) -> Formula:
    """Some block equal to x[i..i+p) (with i its first occurrence) has a
    p-periodic continuation of window length n; p = 0 is excluded."""
    i, n, p = term(i), term(n), term(p)
    (j,) = _fresh((i, n, p), 1)
    return and_(
        ge(p, 1),
        exists(j, and_(earliestfac(i, j, p), period_f(j, n, p))),
    )


def unbounded_primitive_factors_formula(i="i", p="p") -> Formula:
    """Free (i, p): x[i..i+p) is primitive, first occurs at i, and occurs
    with unbounded exponent."""
    i, p = term(i), term(p)
    m, j, n = _fresh((i, p), 3)
    return and_(
        ge(p, 1),
        prim(i, p),
        forall(
            m,
            exists(
                (j, n),
                and_(gt(n, m), earliestfac(i, j, p), period_f(j, n, p)),
            ),
        ),
    )


def covered(n, m) -> Formula:
    """Every length-n factor occurs inside the first m positions."""
    n, m = term(n), term(m)
    s, j = _fresh((n, m), 2)
    return forall(
        s,
        exists(j, and_(le(add(j, n), m), factoreq(j, s, n))),
    )


def appearance_formula(n="n", m="m") -> Formula:
    """Free (n, m): m is the least cover length for window size n."""
    n, m = term(n), term(m)
    (m2,) = _fresh((n, m), 1)
    return and_(
        covered(n, m),
        forall(m2, implies(lt(m2, m), not_(covered(n, m2)))),
    )


def pure_period_formula(p="p") -> Formula:
    """Free p: p >= 1 and x[t+p] = x[t] for all t."""
    p = term(p)
    (t,) = _fresh((p,), 1)
    return and_(ge(p, 1), forall(t, seq_eq(add(t, p), t)))


def ultimate_period_formula(c="c", p="p") -> Formula:
    """Free (c, p): p >= 1 and x[t+p] = x[t] for all t >= c."""
    c, p = term(c), term(p)
    (t,) = _fresh((c, p), 1)
    return and_(ge(p, 1), forall(t, implies(ge(t, c), seq_eq(add(t, p), t))))


def setup_formula(i: int, d: int, L: int, N: int, r_var: str = "r") -> Formula:
    """Free r: writing u = x[i..i+d) and v = x[0..r), asserts r >= N, u is
    neither a prefix nor a suffix of v, and x starts with
    v u^{e_1} v u^{e_2} ... v u^{e_L} for some exponents e_t >= 0.

    The block positions are threaded through a chain of existentials
    (P_t = P_{t-1} + r + run_t) so only a constant number of variables is
    ever live at once; each run is pinned to u-content by d-periodicity,
    a first-block match against position i, and divisibility by d.
    """
    if L < 1 or d < 1:
        raise ValueError("need L >= 1 and d >= 1")
    r = term(r_var)
    iC, dC = Const(i), Const(d)

    def run_at(base: Term, length: Term) -> Formula:
        (q,) = _fresh((r, base, length), 1)
        return and_(
            exists(q, eq(length, mul(d, q))),
            period_f(base, length, dC),
            implies(ge(length, dC), factoreq(base, iC, dC)),
        )

    def chain(t: int, prev: Term) -> Formula:
        # prev = start position of the t-th v block (0-based)
        if t == L - 1:
            (n,) = _fresh((r, prev), 1)
            return exists(n, run_at(add(prev, r), n))
        nxt, n = _fresh((r, prev), 2)
        body = and_(
            eq(add(prev, add(r, n)), nxt),
            run_at(add(prev, r), n),
            factoreq(Const(0), nxt, r),
            chain(t + 1, term(nxt)),
        )
        return exists((nxt, n), body)

    return and_(
        ge(r, N),
        not_(prefx(iC, dC, Const(0), r)),
        not_(suffx(iC, dC, Const(0), r)),
        chain(0, Const(0)),
    )


def setup2_formula(pattern, p: int) -> Formula:
    """Sentence: there exist blocks u0 = x[i..i+r), u1 = x[j..j+s), each
    nonempty, mutually neither prefix nor suffix of one another, neither
    occurring in x as a p-th power, such that the concatenation described
    by the bit pattern is a prefix of x.

    Block t starts at a_t·r + b_t·s where a_t, b_t count the zeros and
    ones before position t, which replaces the recursive position
    variables of the obvious encoding with closed-form terms.
    """
    bits = tuple(int(b) for b in pattern)
    if len(bits) < 2:
        raise ValueError("pattern needs length at least 2")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("pattern bits must be 0 or 1")
    if p < 2:
        raise ValueError("need p >= 2")

    i, j, r, s = "i", "j", "r", "s"
    blocks = []
    a = b = 0
    for bit in bits:
        pos = add(mul(a, r), mul(b, s))
        if bit == 0:
            blocks.append(factoreq(i, pos, r))
            a += 1
        else:
            blocks.append(factoreq(j, pos, s))
            b += 1

    def no_pth_power(start, length) -> Formula:
        (j2,) = _fresh((term(start), term(length)), 1)
        return not_(
            exists(
                j2,
                and_(factoreq(start, j2, length), period_f(j2, mul(p, length), length)),
            )
        )

    body = and_(
        ge(r, 1),
        ge(s, 1),
        not_(prefx(i, r, j, s)),
        not_(suffx(i, r, j, s)),
        not_(prefx(j, s, i, r)),
        not_(suffx(j, s, i, r)),
        *blocks,
        no_pth_power(i, r),
        no_pth_power(j, s),
    )
    return exists((i, j, r, s), body)
