"""Application contexts: patterns with a single hole along an application spine.

A context is a hole, or an application with the hole somewhere in one of its
operands.  Plugging substitutes a pattern for the hole; nothing is bound on
the way down, so plugging never captures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import sugar
from .syntax import Appl, EVar, Exists, Imp, Malformed, Mu, Pattern, Signature, free_vars

__all__ = [
    "Box",
    "ApplL",
    "ApplR",
    "Context",
    "plug",
    "context_fv",
    "parse_context",
    "render_context",
    "match_singleton",
]


@dataclass(frozen=True)
class Box:
    pass


@dataclass(frozen=True)
class ApplL:
    ctx: "Context"
    arg: Pattern


@dataclass(frozen=True)
class ApplR:
    arg: Pattern
    ctx: "Context"


Context = Union[Box, ApplL, ApplR]


def plug(ctx: Context, p: Pattern) -> Pattern:
    if isinstance(ctx, Box):
        return p
    if isinstance(ctx, ApplL):
        return Appl(plug(ctx.ctx, p), ctx.arg)
    return Appl(ctx.arg, plug(ctx.ctx, p))


def context_fv(ctx: Context) -> tuple[frozenset, frozenset]:
    """Free variables of the side patterns; the hole contributes nothing."""
    if isinstance(ctx, Box):
        return frozenset(), frozenset()
    inner_e, inner_s = context_fv(ctx.ctx)
    arg_e, arg_s = free_vars(ctx.arg)
    return inner_e | arg_e, inner_s | arg_s


def parse_context(text: str, sig: Signature) -> Context:
    """Parse sugared text with exactly one ``[]`` hole on an application spine."""
    p = sugar.parse_sugar(text, sig, allow_hole=True)
    holes = _hole_count(p)
    if holes == 0:
        raise Malformed("a context needs a '[]' hole")
    if holes > 1:
        raise Malformed("a context has exactly one '[]' hole")
    return _to_context(p)


def _hole_count(p: Pattern) -> int:
    if p == sugar.HOLE:
        return 1
    if isinstance(p, Appl):
        return _hole_count(p.left) + _hole_count(p.right)
    # Holes are only allowed along application spines; anything deeper is
    # counted so the error message can say so.
    if isinstance(p, Imp):
        n = _hole_count(p.left) + _hole_count(p.right)
    elif isinstance(p, (Exists, Mu)):
        n = _hole_count(p.body)
    else:
        n = 0
    return n


def _to_context(p: Pattern) -> Context:
    if p == sugar.HOLE:
        return Box()
    if isinstance(p, Appl):
        if _hole_count(p.left) == 1:
            return ApplL(_to_context(p.left), p.right)
        if _hole_count(p.right) == 1:
            return ApplR(p.left, _to_context(p.right))
    raise Malformed("the '[]' hole must sit under applications only")


def render_context(ctx: Context) -> str:
    return sugar.render_sugar(plug(ctx, sugar.HOLE))


def match_singleton(phi: Pattern, var: int, body: Pattern) -> list[tuple[Context, Context]]:
    """All context pairs (C1, C2) with
    ``phi == !(C1[x /\\ body] /\\ C2[x /\\ !body])`` for ``x = x<var>``.

    Decomposition walks application spines only, so the result is finite and
    complete; an empty list means ``phi`` is not an instance of the shape.
    """
    target1 = sugar.and_(EVar(var), body)
    target2 = sugar.and_(EVar(var), sugar.neg(body))
    inner = sugar.match_neg(phi)
    if inner is None:
        return []
    m = sugar.match_and(inner)
    if m is None:
        return []
    left, right = m
    return [
        (c1, c2)
        for c1 in _spine_contexts(left, target1)
        for c2 in _spine_contexts(right, target2)
    ]


def _spine_contexts(p: Pattern, target: Pattern) -> list[Context]:
    out: list[Context] = []
    if p == target:
        out.append(Box())
    if isinstance(p, Appl):
        out.extend(ApplL(c, p.right) for c in _spine_contexts(p.left, target))
        out.extend(ApplR(p.left, c) for c in _spine_contexts(p.right, target))
    return out
