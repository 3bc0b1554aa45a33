"""Substitution of patterns for free variables, with and without capture.

`subst_free` is the plain textual operation: it replaces free occurrences and
is allowed to capture.  `subst_bound` renames a bound variable wholesale.
`subst_capture_avoiding` composes the two, renaming clashing bound variables
to fresh indices first, so that the usual semantic substitution equations
hold without side conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .syntax import (
    Appl,
    Const,
    EVar,
    Exists,
    Imp,
    Mu,
    Pattern,
    SVar,
    all_variable_indices,
    bound_binder_indices,
    free_vars,
)

__all__ = [
    "KindMismatch",
    "VarRef",
    "is_free_for",
    "subst_free",
    "subst_bound",
    "fresh_variables",
    "subst_capture_avoiding",
]

Kind = Literal["element", "set"]


class KindMismatch(ValueError):
    """An element variable where a set variable is required, or vice versa."""


@dataclass(frozen=True)
class VarRef:
    """A variable named by kind and index, independent of any occurrence."""

    kind: Kind
    index: int

    @classmethod
    def element(cls, index: int) -> "VarRef":
        return cls("element", index)

    @classmethod
    def set(cls, index: int) -> "VarRef":
        return cls("set", index)

    def as_pattern(self) -> Pattern:
        return EVar(self.index) if self.kind == "element" else SVar(self.index)

    def token(self) -> str:
        return ("x" if self.kind == "element" else "X") + str(self.index)


def is_free_for(v: VarRef, delta: Pattern, phi: Pattern) -> bool:
    """No free occurrence of ``v`` in ``phi`` sits under a binder on a free
    variable of ``delta``; substituting ``delta`` there captures nothing."""
    de, ds = free_vars(delta)
    return _free_for(v, de, ds, phi)


def _free_for(v: VarRef, delta_e, delta_s, phi: Pattern) -> bool:
    if isinstance(phi, (EVar, SVar, Const)):
        return True
    if isinstance(phi, (Appl, Imp)):
        return _free_for(v, delta_e, delta_s, phi.left) and _free_for(
            v, delta_e, delta_s, phi.right
        )
    if isinstance(phi, Exists):
        if v.kind == "element" and v.index == phi.var:
            return True
        fe, fs = free_vars(phi)
        free_here = v.index in (fe if v.kind == "element" else fs)
        if not free_here:
            return True
        if phi.var in delta_e:
            return False
        return _free_for(v, delta_e, delta_s, phi.body)
    # Mu
    if v.kind == "set" and v.index == phi.var:
        return True
    fe, fs = free_vars(phi)
    free_here = v.index in (fe if v.kind == "element" else fs)
    if not free_here:
        return True
    if phi.var in delta_s:
        return False
    return _free_for(v, delta_e, delta_s, phi.body)


def subst_free(phi: Pattern, v: VarRef, delta: Pattern) -> Pattern:
    """Replace every free occurrence of ``v`` in ``phi`` by ``delta``.

    Purely textual; capture is permitted.
    """
    if isinstance(phi, EVar):
        return delta if v.kind == "element" and phi.index == v.index else phi
    if isinstance(phi, SVar):
        return delta if v.kind == "set" and phi.index == v.index else phi
    if isinstance(phi, Const):
        return phi
    if isinstance(phi, Appl):
        return Appl(subst_free(phi.left, v, delta), subst_free(phi.right, v, delta))
    if isinstance(phi, Imp):
        return Imp(subst_free(phi.left, v, delta), subst_free(phi.right, v, delta))
    if isinstance(phi, Exists):
        if v.kind == "element" and phi.var == v.index:
            return phi
        return Exists(phi.var, subst_free(phi.body, v, delta))
    if v.kind == "set" and phi.var == v.index:
        return phi
    return Mu(phi.var, subst_free(phi.body, v, delta))


def subst_bound(phi: Pattern, v: VarRef, w: VarRef) -> Pattern:
    """Rename the bound occurrences of ``v`` in ``phi`` to ``w``.

    Free occurrences are left alone.  Identity when ``v == w``.
    """
    if v.kind != w.kind:
        raise KindMismatch(f"cannot rename {v.token()} to {w.token()}")
    if v == w:
        return phi
    return _subb(phi, v, w)


def _subb(phi: Pattern, v: VarRef, w: VarRef) -> Pattern:
    if isinstance(phi, (EVar, SVar, Const)):
        return phi
    if isinstance(phi, Appl):
        return Appl(_subb(phi.left, v, w), _subb(phi.right, v, w))
    if isinstance(phi, Imp):
        return Imp(_subb(phi.left, v, w), _subb(phi.right, v, w))
    if isinstance(phi, Exists):
        if v.kind == "element" and phi.var == v.index:
            # Rename the binder itself, then redirect the occurrences it
            # used to bind.  Deeper binders on v were rewritten first.
            body = subst_free(_subb(phi.body, v, w), v, w.as_pattern())
            return Exists(w.index, body)
        return Exists(phi.var, _subb(phi.body, v, w))
    if v.kind == "set" and phi.var == v.index:
        body = subst_free(_subb(phi.body, v, w), v, w.as_pattern())
        return Mu(w.index, body)
    return Mu(phi.var, _subb(phi.body, v, w))


def fresh_variables(used_max: int, count: int, kind: Kind) -> list[VarRef]:
    """``count`` variables of ``kind`` indexed from ``used_max + 1`` upward.

    ``used_max`` is the highest index already in use, or -1 if none is.
    """
    return [VarRef(kind, used_max + 1 + i) for i in range(count)]


def _max_index(kind: Kind, *patterns: Pattern) -> int:
    top = -1
    for p in patterns:
        es, ss = all_variable_indices(p)
        pool = es if kind == "element" else ss
        if pool:
            top = max(top, max(pool))
    return top


def subst_capture_avoiding(phi: Pattern, v: VarRef, delta: Pattern) -> Pattern:
    """Substitute ``delta`` for free ``v`` in ``phi``, renaming first.

    When ``v`` is free for ``delta`` this is exactly `subst_free`.  Otherwise
    every variable bound in ``phi`` that also occurs in ``delta`` is renamed
    to a fresh index (above everything used by either input, per variable
    kind), element renamings innermost, and the plain substitution is applied
    to the renamed pattern.
    """
    if is_free_for(v, delta, phi):
        return subst_free(phi, v, delta)
    bound_e, bound_s = bound_binder_indices(phi)
    occ_e, occ_s = all_variable_indices(delta)
    clash_e = sorted(bound_e & occ_e)
    clash_s = sorted(bound_s & occ_s)
    fresh_e = fresh_variables(_max_index("element", phi, delta), len(clash_e), "element")
    fresh_s = fresh_variables(_max_index("set", phi, delta), len(clash_s), "set")
    theta = phi
    for old, new in reversed(list(zip(clash_e, fresh_e))):
        theta = subst_bound(theta, VarRef.element(old), new)
    for old, new in reversed(list(zip(clash_s, fresh_s))):
        theta = subst_bound(theta, VarRef.set(old), new)
    return subst_free(theta, v, delta)
