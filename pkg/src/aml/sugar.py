"""Sugared surface syntax: derived connectives, an infix grammar, resugaring.

Everything here expands into the four core constructors.  The canonical
falsum is ``mu X0 . X0``; negation, disjunction, conjunction, equivalence,
the universal quantifier and the greatest fixpoint are the usual
abbreviations on top of it.  The definedness notation (``ceil``, ``floor``,
``=``, ``in``) expands through the reserved constant ``def``.

Operator precedence, tightest first:

    application (juxtaposition, left assoc)
    !
    in
    =
    /\\            (left assoc)
    \\/            (left assoc)
    ->            (right assoc)
    <->           (no chaining)

Binders (``exists``, ``forall``, ``mu``, ``nu``) extend as far right as
possible.  The renderer emits minimal parentheses under the same table and
`parse`/`render` round-trip exactly in both modes.
"""

from __future__ import annotations

import re

from .substitution import VarRef, subst_free
from .syntax import (
    Appl,
    ArityError,
    Const,
    DEFINEDNESS,
    EVar,
    Exists,
    Imp,
    Malformed,
    Mu,
    Pattern,
    SVar,
    Signature,
    UnknownSymbol,
    parse_core,
    render_core,
)

__all__ = [
    "BOT",
    "TOP",
    "bot",
    "top",
    "neg",
    "or_",
    "and_",
    "iff",
    "forall",
    "nu",
    "ceil",
    "floor",
    "eq",
    "mem",
    "fold_conj",
    "fold_disj",
    "EmptyList",
    "is_bot_like",
    "match_neg",
    "match_or",
    "match_or_shape",
    "match_and",
    "match_iff",
    "match_forall",
    "match_nu",
    "match_ceil",
    "match_floor",
    "match_eq",
    "match_mem",
    "parse_sugar",
    "render_sugar",
    "parse",
    "render",
    "HOLE",
]


class EmptyList(ValueError):
    """Folding an empty list of conjuncts or disjuncts."""


BOT = Mu(0, SVar(0))
TOP = Imp(BOT, BOT)

# Sentinel constant the context module uses for `[]`; never a legal
# signature constant, so it cannot leak in from ordinary input.
HOLE = Const("[]")


def bot() -> Pattern:
    return BOT


def neg(p: Pattern) -> Pattern:
    return Imp(p, BOT)


def top() -> Pattern:
    return TOP


def or_(a: Pattern, b: Pattern) -> Pattern:
    return Imp(neg(a), b)


def and_(a: Pattern, b: Pattern) -> Pattern:
    return neg(or_(neg(a), neg(b)))


def iff(a: Pattern, b: Pattern) -> Pattern:
    return and_(Imp(a, b), Imp(b, a))


def forall(var: int, body: Pattern) -> Pattern:
    return neg(Exists(var, neg(body)))


def nu(var: int, body: Pattern) -> Pattern:
    # Greatest fixpoint by dualising mu.  Substituting !X for X never
    # captures, since X cannot occur free inside a mu that rebinds it.
    flipped = subst_free(body, VarRef.set(var), neg(SVar(var)))
    return neg(Mu(var, neg(flipped)))


def ceil(p: Pattern) -> Pattern:
    return Appl(Const(DEFINEDNESS), p)


def floor(p: Pattern) -> Pattern:
    return neg(ceil(neg(p)))


def eq(a: Pattern, b: Pattern) -> Pattern:
    return floor(iff(a, b))


def mem(var: int, p: Pattern) -> Pattern:
    return ceil(and_(EVar(var), p))


def fold_conj(parts: list) -> Pattern:
    """Left-nested conjunction of a nonempty list."""
    if not parts:
        raise EmptyList("no conjuncts")
    acc = parts[0]
    for p in parts[1:]:
        acc = and_(acc, p)
    return acc


def fold_disj(parts: list) -> Pattern:
    if not parts:
        raise EmptyList("no disjuncts")
    acc = parts[0]
    for p in parts[1:]:
        acc = or_(acc, p)
    return acc


def is_bot_like(p: Pattern) -> bool:
    """True for every pattern of the shape ``mu X . X``, canonical or not."""
    return isinstance(p, Mu) and p.body == SVar(p.var)


# ---------------------------------------------------------------------------
# Shape matchers.  All of them are strict about the canonical falsum; only
# the tautology skeleton is lenient, and that lives in the semantics module.


def match_neg(p: Pattern):
    if isinstance(p, Imp) and p.right == BOT:
        return p.left
    return None


def match_or(p: Pattern):
    if isinstance(p, Imp):
        inner = match_neg(p.left)
        if inner is not None and p.right != BOT:
            return inner, p.right
    return None


def match_or_shape(p: Pattern):
    """Structural disjunction match with no aesthetic exclusions; the
    renderer's `match_or` refuses a falsum right operand so that double
    negation prints as such, but axiom matching must not."""
    if isinstance(p, Imp):
        inner = match_neg(p.left)
        if inner is not None:
            return inner, p.right
    return None


_match_or_any = match_or_shape


def match_and(p: Pattern):
    body = match_neg(p)
    if body is None:
        return None
    m = _match_or_any(body)
    if m is None:
        return None
    na, nb = m
    a = match_neg(na)
    b = match_neg(nb)
    if a is None or b is None:
        return None
    return a, b


def match_iff(p: Pattern):
    m = match_and(p)
    if m is None:
        return None
    u, v = m
    if (
        isinstance(u, Imp)
        and isinstance(v, Imp)
        and u.left == v.right
        and u.right == v.left
    ):
        return u.left, u.right
    return None


def match_forall(p: Pattern):
    body = match_neg(p)
    if isinstance(body, Exists):
        inner = match_neg(body.body)
        if inner is not None:
            return body.var, inner
    return None


def _rewrite_subterm(p: Pattern, old: Pattern, new: Pattern) -> Pattern:
    if isinstance(p, (EVar, SVar, Const)):
        return new if p == old else p
    if isinstance(p, Appl):
        q = Appl(_rewrite_subterm(p.left, old, new), _rewrite_subterm(p.right, old, new))
    elif isinstance(p, Imp):
        q = Imp(_rewrite_subterm(p.left, old, new), _rewrite_subterm(p.right, old, new))
    elif isinstance(p, Exists):
        q = Exists(p.var, _rewrite_subterm(p.body, old, new))
    else:
        q = Mu(p.var, _rewrite_subterm(p.body, old, new))
    return new if q == old else q


def match_nu(p: Pattern):
    """Invert the greatest-fixpoint abbreviation, verifying by re-expansion."""
    outer = match_neg(p)
    if not isinstance(outer, Mu):
        return None
    inner = match_neg(outer.body)
    if inner is None:
        return None
    candidate = _rewrite_subterm(inner, neg(SVar(outer.var)), SVar(outer.var))
    if nu(outer.var, candidate) == p:
        return outer.var, candidate
    return None


def match_ceil(p: Pattern):
    if isinstance(p, Appl) and p.left == Const(DEFINEDNESS):
        return p.right
    return None


def match_floor(p: Pattern):
    body = match_neg(p)
    if body is None:
        return None
    arg = match_ceil(body)
    if arg is None:
        return None
    return match_neg(arg)


def match_eq(p: Pattern):
    body = match_floor(p)
    if body is None:
        return None
    return match_iff(body)


def match_mem(p: Pattern):
    arg = match_ceil(p)
    if arg is None:
        return None
    m = match_and(arg)
    if m is not None and isinstance(m[0], EVar):
        return m[0].index, m[1]
    return None


# ---------------------------------------------------------------------------
# Lexer and parser for the infix grammar.

_TOKEN = re.compile(r"<->|->|/\\|\\/|\[\]|[().!=]|[A-Za-z_][A-Za-z0-9_]*")
_WS = re.compile(r"\s*")
_EVAR = re.compile(r"\Ax([0-9]+)\Z")
_SVAR = re.compile(r"\AX([0-9]+)\Z")

_KEYWORDS = frozenset(
    {"bot", "top", "exists", "forall", "mu", "nu", "in", "ceil", "floor"}
)


def _lex(text: str) -> list[str]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        pos = _WS.match(text, pos).end()
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise Malformed(f"cannot read input at column {pos + 1}: {text[pos:pos + 10]!r}")
        out.append(m.group(0))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, toks: list[str], sig: Signature, allow_hole: bool):
        self.toks = toks
        self.sig = sig
        self.allow_hole = allow_hole
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise ArityError("input ended inside a pattern")
        self.pos += 1
        return t

    def expect(self, tok: str):
        t = self.take()
        if t != tok:
            raise Malformed(f"expected {tok!r}, got {t!r}")

    # grammar, loosest level first
    def pattern(self) -> Pattern:
        left = self.imp()
        if self.peek() == "<->":
            self.take()
            return iff(left, self.imp())
        return left

    def imp(self) -> Pattern:
        left = self.or_()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def or_(self) -> Pattern:
        acc = self.and_()
        while self.peek() == "\\/":
            self.take()
            acc = or_(acc, self.and_())
        return acc

    def and_(self) -> Pattern:
        acc = self.eq()
        while self.peek() == "/\\":
            self.take()
            acc = and_(acc, self.eq())
        return acc

    def eq(self) -> Pattern:
        left = self.mem()
        if self.peek() == "=":
            self.take()
            self._need_def("=")
            return eq(left, self.mem())
        return left

    def mem(self) -> Pattern:
        left = self.neg()
        if self.peek() == "in":
            self.take()
            if not isinstance(left, EVar):
                raise Malformed("left operand of 'in' must be an element variable")
            self._need_def("in")
            return mem(left.index, self.neg())
        return left

    def neg(self) -> Pattern:
        if self.peek() == "!":
            self.take()
            return neg(self.neg())
        return self.app()

    def app(self) -> Pattern:
        acc = self.atom()
        while self._starts_atom(self.peek()):
            acc = Appl(acc, self.atom())
        return acc

    def _starts_atom(self, t) -> bool:
        if t is None or t in (")", ".", "<->", "->", "\\/", "/\\", "=", "in", "!"):
            return False
        return True

    def atom(self) -> Pattern:
        t = self.take()
        if t == "(":
            p = self.pattern()
            self.expect(")")
            return p
        if t == "[]":
            if not self.allow_hole:
                raise Malformed("'[]' is only meaningful in a context")
            return HOLE
        if t == "bot":
            return BOT
        if t == "top":
            return TOP
        if t in ("exists", "forall"):
            var = self._binder_var(_EVAR, "an element variable", t)
            self.expect(".")
            body = self.pattern()
            return Exists(var, body) if t == "exists" else forall(var, body)
        if t in ("mu", "nu"):
            var = self._binder_var(_SVAR, "a set variable", t)
            self.expect(".")
            body = self.pattern()
            return Mu(var, body) if t == "mu" else nu(var, body)
        if t in ("ceil", "floor"):
            self._need_def(t)
            self.expect("(")
            p = self.pattern()
            self.expect(")")
            return ceil(p) if t == "ceil" else floor(p)
        m = _EVAR.match(t)
        if m:
            return EVar(int(m.group(1)))
        m = _SVAR.match(t)
        if m:
            return SVar(int(m.group(1)))
        if t in self.sig:
            return Const(t)
        if t in ("<->", "->", "\\/", "/\\", "in", "(", ")", ".", "=", "!"):
            raise Malformed(f"unexpected {t!r}")
        raise UnknownSymbol(
            f"{t!r} is not a variable, a keyword, or a declared constant"
        )

    def _binder_var(self, pat, what: str, kw: str) -> int:
        t = self.take()
        m = pat.match(t)
        if not m:
            raise Malformed(f"{kw} must bind {what}, got {t!r}")
        return int(m.group(1))

    def _need_def(self, what: str) -> None:
        if DEFINEDNESS not in self.sig:
            raise UnknownSymbol(
                f"{what!r} needs the constant 'def' in the signature"
            )


def parse_sugar(text: str, sig: Signature, allow_hole: bool = False) -> Pattern:
    toks = _lex(text)
    if not toks:
        raise Malformed("empty input")
    parser = _Parser(toks, sig, allow_hole)
    p = parser.pattern()
    if parser.pos != len(toks):
        raise Malformed(
            f"pattern complete but {len(toks) - parser.pos} token(s) remain, "
            f"starting at {toks[parser.pos]!r}"
        )
    return p


# ---------------------------------------------------------------------------
# Renderer.  Each node is classified into a display shape, then printed with
# parentheses driven by the precedence table.  Binders count as level 0 and
# are left bare exactly in trailing positions, where the grammar would give
# them maximal scope anyway.

_LVL_BINDER = 0
_LVL_IFF = 1
_LVL_IMP = 2
_LVL_OR = 3
_LVL_AND = 4
_LVL_EQ = 5
_LVL_MEM = 6
_LVL_NEG = 7
_LVL_APP = 8
_LVL_ATOM = 9


def _classify(p: Pattern):
    if p == BOT:
        return "bot", (), _LVL_ATOM
    if p == TOP:
        return "top", (), _LVL_ATOM
    if isinstance(p, EVar):
        return "evar", (p.index,), _LVL_ATOM
    if isinstance(p, SVar):
        return "svar", (p.index,), _LVL_ATOM
    if isinstance(p, Const):
        return "const", (p.name,), _LVL_ATOM
    if isinstance(p, Imp):
        m = match_eq(p)
        if m is not None:
            return "eq", m, _LVL_EQ
        if match_floor(p) is not None:
            return "floor", (match_floor(p),), _LVL_ATOM
        m = match_iff(p)
        if m is not None:
            return "iff", m, _LVL_IFF
        m = match_and(p)
        if m is not None:
            return "and", m, _LVL_AND
        m = match_forall(p)
        if m is not None:
            return "forall", m, _LVL_BINDER
        m = match_nu(p)
        if m is not None:
            return "nu", m, _LVL_BINDER
        inner = match_neg(p)
        if inner is not None:
            return "neg", (inner,), _LVL_NEG
        m = match_or(p)
        if m is not None:
            return "or", m, _LVL_OR
        return "imp", (p.left, p.right), _LVL_IMP
    if isinstance(p, Appl):
        m = match_mem(p)
        if m is not None:
            return "mem", m, _LVL_MEM
        if match_ceil(p) is not None:
            return "ceil", (match_ceil(p),), _LVL_ATOM
        return "app", (p.left, p.right), _LVL_APP
    if isinstance(p, Exists):
        return "exists", (p.var, p.body), _LVL_BINDER
    return "mu", (p.var, p.body), _LVL_BINDER


def render_sugar(p: Pattern) -> str:
    return _render(p, 0, True)


def _render(p: Pattern, require: int, tail: bool) -> str:
    kind, parts, level = _classify(p)
    if level == _LVL_BINDER:
        wrap = require > 0 and not tail
    else:
        wrap = level < require
    inner_tail = True if wrap else tail
    s = _emit(kind, parts, inner_tail)
    return f"({s})" if wrap else s


def _emit(kind: str, parts, tail: bool) -> str:
    if kind == "bot":
        return "bot"
    if kind == "top":
        return "top"
    if kind == "evar":
        return f"x{parts[0]}"
    if kind == "svar":
        return f"X{parts[0]}"
    if kind == "const":
        return parts[0]
    if kind == "iff":
        a, b = parts
        return f"{_render(a, _LVL_IMP, False)} <-> {_render(b, _LVL_IMP, tail)}"
    if kind == "imp":
        a, b = parts
        return f"{_render(a, _LVL_OR, False)} -> {_render(b, _LVL_IMP, tail)}"
    if kind == "or":
        a, b = parts
        return f"{_render(a, _LVL_OR, False)} \\/ {_render(b, _LVL_AND, tail)}"
    if kind == "and":
        a, b = parts
        return f"{_render(a, _LVL_AND, False)} /\\ {_render(b, _LVL_EQ, tail)}"
    if kind == "eq":
        a, b = parts
        return f"{_render(a, _LVL_MEM, False)} = {_render(b, _LVL_MEM, tail)}"
    if kind == "mem":
        var, b = parts
        return f"x{var} in {_render(b, _LVL_NEG, tail)}"
    if kind == "neg":
        return "!" + _render(parts[0], _LVL_NEG, tail)
    if kind == "app":
        a, b = parts
        return f"{_render(a, _LVL_APP, False)} {_render(b, _LVL_ATOM, False)}"
    if kind in ("exists", "forall"):
        var, body = parts
        return f"{kind} x{var} . {_render(body, 0, True)}"
    if kind in ("mu", "nu"):
        var, body = parts
        return f"{kind} X{var} . {_render(body, 0, True)}"
    if kind == "ceil":
        return f"ceil({_render(parts[0], 0, True)})"
    if kind == "floor":
        return f"floor({_render(parts[0], 0, True)})"
    raise AssertionError(kind)


# ---------------------------------------------------------------------------
# Mode dispatch, the package-level entry points.


def parse(text: str, sig: Signature, mode: str = "core") -> Pattern:
    """Parse ``text`` as a pattern in ``mode`` (``core`` or ``sugar``)."""
    if mode == "core":
        return parse_core(text, sig)
    if mode == "sugar":
        return parse_sugar(text, sig)
    raise ValueError(f"unknown mode {mode!r}")


def render(p: Pattern, mode: str = "core") -> str:
    """Render ``p`` in ``mode``; `parse` gives back the identical tree."""
    if mode == "core":
        return render_core(p)
    if mode == "sugar":
        return render_sugar(p)
    raise ValueError(f"unknown mode {mode!r}")
