"""First-order statements about naturals and sequence values, compiled
to automata.

Terms are built from variables, constants, addition, and multiplication
by constants.  Atoms compare two terms or look a term up in an automatic
sequence (x[t] = symbol, or x[s] = x[t]).  Formulas combine atoms with
the usual connectives and quantifiers over the naturals.

Compiling a formula yields a canonical Dfa over one digit track per free
variable, reading base-k digit columns most significant first: the
automaton accepts exactly the satisfying assignments.  Sentences compile
to zero-track automata and are decided by inspecting the initial state.
Every intermediate product and projection is minimized, so the automata
stay as small as the languages allow, and an optional state budget turns
runaway intermediates into BudgetExceededError instead of memory burn.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from . import automata as A
from .automata import Dfa, Dfao


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name or self.name.startswith("%"):
            raise ValueError("variable names must be nonempty and not start with '%'")


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("constants are naturals")


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class ConstMul:
    c: int
    arg: "Term"

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("coefficients are naturals")


Term = Union[Var, Const, Sum, ConstMul]


def term(x) -> Term:
    """Coerce a string (variable), int (constant), or Term."""
    if isinstance(x, (Var, Const, Sum, ConstMul)):
        return x
    if isinstance(x, str):
        return Var(x)
    if isinstance(x, int):
        return Const(x)
    raise TypeError(f"cannot interpret {x!r} as a term")


def add(a, b, *rest) -> Term:
    t = Sum(term(a), term(b))
    for r in rest:
        t = Sum(t, term(r))
    return t


def mul(c: int, a) -> Term:
    return ConstMul(c, term(a))


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, Sum):
        return term_vars(t.left) | term_vars(t.right)
    return term_vars(t.arg)


# ---------------------------------------------------------------------------
# formulas

class CmpOp(enum.Enum):
    EQ = "="
    LE = "<="
    LT = "<"


@dataclass(frozen=True)
class Cmp:
    op: CmpOp
    left: Term
    right: Term


@dataclass(frozen=True)
class SeqAt:
    index: Term
    symbol: int


@dataclass(frozen=True)
class SeqEq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Cmp, SeqAt, SeqEq, Not, And, Or, Implies, Exists, Forall]

TRUE = Cmp(CmpOp.EQ, Const(0), Const(0))
FALSE = Cmp(CmpOp.LT, Const(0), Const(0))


def eq(a, b) -> Formula:
    return Cmp(CmpOp.EQ, term(a), term(b))


def le(a, b) -> Formula:
    return Cmp(CmpOp.LE, term(a), term(b))


def lt(a, b) -> Formula:
    return Cmp(CmpOp.LT, term(a), term(b))


def ge(a, b) -> Formula:
    return Cmp(CmpOp.LE, term(b), term(a))


def gt(a, b) -> Formula:
    return Cmp(CmpOp.LT, term(b), term(a))


def ne(a, b) -> Formula:
    return Not(eq(a, b))


def seq_at(index, symbol: int) -> Formula:
    return SeqAt(term(index), symbol)


def seq_eq(a, b) -> Formula:
    return SeqEq(term(a), term(b))


def not_(f: Formula) -> Formula:
    return Not(f)


def and_(*fs) -> Formula:
    if not fs:
        return TRUE
    if len(fs) == 1:
        return fs[0]
    return And(tuple(fs))


def or_(*fs) -> Formula:
    if not fs:
        return FALSE
    if len(fs) == 1:
        return fs[0]
    return Or(tuple(fs))


def implies(a: Formula, b: Formula) -> Formula:
    return Implies(a, b)


def iff(a: Formula, b: Formula) -> Formula:
    return And((Implies(a, b), Implies(b, a)))


def _varnames(vs) -> tuple[str, ...]:
    if isinstance(vs, str):
        return (vs,)
    return tuple(vs)


def exists(vs, body: Formula) -> Formula:
    f = body
    for v in reversed(_varnames(vs)):
        f = Exists(v, f)
    return f


def forall(vs, body: Formula) -> Formula:
    f = body
    for v in reversed(_varnames(vs)):
        f = Forall(v, f)
    return f


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Cmp):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, SeqAt):
        return term_vars(f.index)
    if isinstance(f, SeqEq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# alpha renaming
#
# Bound variables are renamed to %b0, %b1, ... in traversal order before
# compilation.  This removes shadowing hazards and makes the renamed tree
# a deterministic function of the input, so compilations cache well.

def _rename_term(t: Term, env: dict[str, str]) -> Term:
    if isinstance(t, Var):
        new = env.get(t.name)
        if new is None:
            return t
        return _BoundVar(new)
    if isinstance(t, Const):
        return t
    if isinstance(t, Sum):
        return Sum(_rename_term(t.left, env), _rename_term(t.right, env))
    return ConstMul(t.c, _rename_term(t.arg, env))


class _BoundVar(Var):
    """Variable with a reserved name, constructible only internally."""

    def __post_init__(self):
        pass


def _rename(f: Formula, env: dict[str, str], counter: list[int]) -> Formula:
    if isinstance(f, Cmp):
        return Cmp(f.op, _rename_term(f.left, env), _rename_term(f.right, env))
    if isinstance(f, SeqAt):
        return SeqAt(_rename_term(f.index, env), f.symbol)
    if isinstance(f, SeqEq):
        return SeqEq(_rename_term(f.left, env), _rename_term(f.right, env))
    if isinstance(f, Not):
        return Not(_rename(f.body, env, counter))
    if isinstance(f, And):
        return And(tuple(_rename(p, env, counter) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_rename(p, env, counter) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_rename(f.left, env, counter), _rename(f.right, env, counter))
    if isinstance(f, (Exists, Forall)):
        fresh = f"%b{counter[0]}"
        counter[0] += 1
        inner = dict(env)
        inner[f.var] = fresh
        body = _rename(f.body, inner, counter)
        return type(f)(fresh, body)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# compilation

@dataclass(frozen=True)
class CompileLimits:
    """Caps applied during compilation; None means unlimited."""

    max_automaton_states: Optional[int] = None


class _Ctx:
    def __init__(self, k: int, seq: Optional[Dfao], limits: CompileLimits):
        self.k = k
        self.seq = seq
        self.cap = limits.max_automaton_states
        self.memo: dict = {}

    def meet(self, a: Dfa, b: Dfa) -> Dfa:
        return A.intersect(a, b, self.cap)

    def join(self, a: Dfa, b: Dfa) -> Dfa:
        return A.union(a, b, self.cap)


def _lower_term(t: Term, ctx: _Ctx, cons: list, temps: list) -> str:
    """Reduce a term to a variable, emitting defining relations for the
    intermediate values; helpers are existential and projected away as
    soon as the owning atom is assembled."""
    if isinstance(t, Var):
        return t.name
    name = f"%a{len(temps)}"
    temps.append(name)
    if isinstance(t, Const):
        cons.append(A.const_rel(ctx.k, name, t.value))
    elif isinstance(t, Sum):
        la = _lower_term(t.left, ctx, cons, temps)
        lb = _lower_term(t.right, ctx, cons, temps)
        cons.append(A.add_rel(ctx.k, la, lb, name))
    elif isinstance(t, ConstMul):
        la = _lower_term(t.arg, ctx, cons, temps)
        cons.append(A.const_mul_rel(ctx.k, t.c, la, name))
    else:
        raise TypeError(f"not a term: {t!r}")
    return name


_CMP_BUILDERS = {
    CmpOp.EQ: A.eq_rel,
    CmpOp.LE: A.leq_rel,
    CmpOp.LT: A.less_rel,
}


def _compile_atom(f, ctx: _Ctx) -> Dfa:
    cons: list[Dfa] = []
    temps: list[str] = []
    if isinstance(f, Cmp):
        va = _lower_term(f.left, ctx, cons, temps)
        vb = _lower_term(f.right, ctx, cons, temps)
        rel = _CMP_BUILDERS[f.op](ctx.k, va, vb)
    elif isinstance(f, SeqAt):
        if ctx.seq is None:
            raise ValueError("formula inspects sequence values but no sequence was given")
        va = _lower_term(f.index, ctx, cons, temps)
        rel = A.seq_at_dfa(ctx.seq, va, f.symbol)
    elif isinstance(f, SeqEq):
        if ctx.seq is None:
            raise ValueError("formula inspects sequence values but no sequence was given")
        va = _lower_term(f.left, ctx, cons, temps)
        vb = _lower_term(f.right, ctx, cons, temps)
        rel = A.seq_eq_dfa(ctx.seq, va, vb)
    else:
        raise TypeError(f"not an atom: {f!r}")
    for c in cons:
        rel = ctx.meet(rel, c)
    for name in reversed(temps):
        rel = A.project(rel, name, ctx.cap)
    return rel


def _compile(f: Formula, ctx: _Ctx) -> Dfa:
    hit = ctx.memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, (Cmp, SeqAt, SeqEq)):
        out = _compile_atom(f, ctx)
    elif isinstance(f, Not):
        out = A.complement(_compile(f.body, ctx))
    elif isinstance(f, And):
        parts = [_compile(p, ctx) for p in f.parts]
        out = parts[0]
        for p in parts[1:]:
            out = ctx.meet(out, p)
    elif isinstance(f, Or):
        parts = [_compile(p, ctx) for p in f.parts]
        out = parts[0]
        for p in parts[1:]:
            out = ctx.join(out, p)
    elif isinstance(f, Implies):
        out = ctx.join(A.complement(_compile(f.left, ctx)), _compile(f.right, ctx))
    elif isinstance(f, Exists):
        body = _compile(f.body, ctx)
        out = A.project(body, f.var, ctx.cap) if f.var in body.var_order else body
    elif isinstance(f, Forall):
        body = _compile(Not(Exists(f.var, Not(f.body))), ctx)
        out = body
    else:
        raise TypeError(f"not a formula: {f!r}")
    ctx.memo[f] = out
    return out


@lru_cache(maxsize=512)
def _compile_top(renamed: Formula, seq: Optional[Dfao], k: int, limits: CompileLimits) -> Dfa:
    ctx = _Ctx(k, seq, limits)
    return _compile(renamed, ctx)


def compile_formula(
    f: Formula,
    seq: Optional[Dfao] = None,
    k: Optional[int] = None,
    limits: Optional[CompileLimits] = None,
) -> Dfa:
    """Compile a formula to the canonical automaton of its satisfying
    assignments, one track per free variable in sorted order."""
    if k is None:
        k = seq.k if seq is not None else 2
    if seq is not None and seq.k != k:
        raise ValueError("base of the sequence disagrees with requested base")
    renamed = _rename(f, {}, [0])
    return _compile_top(renamed, seq, k, limits or CompileLimits())


def decide(
    f: Formula,
    seq: Optional[Dfao] = None,
    k: Optional[int] = None,
    limits: Optional[CompileLimits] = None,
) -> bool:
    """Truth value of a sentence."""
    a = compile_formula(f, seq, k, limits)
    if a.var_order:
        raise ValueError(f"not a sentence; free variables {', '.join(a.var_order)}")
    return a.accepting[a.initial]


def witness(
    f: Formula,
    seq: Optional[Dfao] = None,
    k: Optional[int] = None,
    limits: Optional[CompileLimits] = None,
) -> Optional[dict[str, int]]:
    """A satisfying assignment with the least digit encoding, or None.

    For formulas with a single free variable this is the least witness.
    """
    a = compile_formula(f, seq, k, limits)
    got = A.shortest_accepted(a)
    if got is None:
        return None
    return dict(zip(a.var_order, got))
