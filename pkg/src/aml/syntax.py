"""Core syntax of applicative matching logic patterns.

Patterns are built from indexed element variables (written ``x0``, ``x1``, ...),
indexed set variables (``X0``, ``X1``, ...), declared constants, two binary
forms (application and implication) and two binders: ``exists`` over an element
variable and ``mu`` over a set variable.

The canonical linear form is whitespace separated Polish notation with the
operator keywords ``appl``, ``imp``, ``exists``, ``mu``.  Polish form needs no
parentheses and is uniquely readable: a token string renders at most one
pattern, and no proper prefix of a pattern's token string is itself a pattern.
The positional analyses in this module (binder scopes, occurrence
classification, the left-implication counter used for polarity) all lean on
that property, and the test suite re-checks it against brute-force oracles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union

__all__ = [
    "ParseError",
    "UnknownSymbol",
    "Malformed",
    "ArityError",
    "NotABinder",
    "NotABinary",
    "OutOfRange",
    "Signature",
    "load_signature",
    "EVar",
    "SVar",
    "Const",
    "Appl",
    "Imp",
    "Exists",
    "Mu",
    "Pattern",
    "tokens",
    "token_len",
    "parse_core",
    "render_core",
    "subpatterns",
    "free_vars",
    "all_variable_indices",
    "bound_binder_indices",
    "binder_scope",
    "binary_scopes",
    "OccurrenceKind",
    "occurrence_kind",
    "occurrence_kinds",
    "n_left",
    "is_positive_in",
    "is_negative_in",
    "DEFINEDNESS",
]


class ParseError(ValueError):
    """Candidate pattern text was rejected."""


class UnknownSymbol(ParseError):
    """A token that is neither a variable, a keyword, nor a declared constant."""


class Malformed(ParseError):
    """The token sequence does not form exactly one pattern."""


class ArityError(ParseError):
    """An operator or binder ran out of operands."""


class NotABinder(ValueError):
    """The addressed token position does not start a binder."""


class NotABinary(ValueError):
    """The addressed token position does not start an application or implication."""


class OutOfRange(IndexError):
    """A token position outside the pattern."""


CORE_KEYWORDS = ("appl", "imp", "exists", "mu")
SUGAR_KEYWORDS = ("bot", "top", "forall", "nu", "in", "ceil", "floor")
RESERVED = frozenset(CORE_KEYWORDS) | frozenset(SUGAR_KEYWORDS)

# Constant reserved for the definedness instrumentation of a structure.  It is
# an ordinary signature constant as far as parsing goes, but models declaring
# it must satisfy the definedness law and the ceil/floor/equality/membership
# notation expands through it.
DEFINEDNESS = "def"

_EVAR_TOKEN = re.compile(r"\Ax([0-9]+)\Z")
_SVAR_TOKEN = re.compile(r"\AX([0-9]+)\Z")
_NAME = re.compile(r"\A[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Signature:
    """Declared constant symbols.

    Variables need no declaration: the token families ``x<n>`` and ``X<n>``
    are always available, which is also why those spellings are rejected as
    constant names.
    """

    constants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for name in self.constants:
            if (
                not _NAME.match(name)
                or name in RESERVED
                or _EVAR_TOKEN.match(name)
                or _SVAR_TOKEN.match(name)
            ):
                raise ValueError(f"illegal constant name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate constant {name!r}")
            seen.add(name)

    def __contains__(self, name: object) -> bool:
        return name in self.constants


def load_signature(path: str | Path) -> Signature:
    """Read a signature file: one constant name per line, ``#`` comments."""
    names = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            names.append(line)
    return Signature(tuple(names))


@dataclass(frozen=True)
class EVar:
    index: int


@dataclass(frozen=True)
class SVar:
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Appl:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Imp:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Pattern"


@dataclass(frozen=True)
class Mu:
    var: int
    body: "Pattern"


Pattern = Union[EVar, SVar, Const, Appl, Imp, Exists, Mu]


def tokens(p: Pattern) -> tuple[str, ...]:
    """Token string of ``p`` in Polish core form."""
    out: list[str] = []
    _emit(p, out)
    return tuple(out)


def _emit(p: Pattern, out: list[str]) -> None:
    if isinstance(p, EVar):
        out.append(f"x{p.index}")
    elif isinstance(p, SVar):
        out.append(f"X{p.index}")
    elif isinstance(p, Const):
        out.append(p.name)
    elif isinstance(p, Appl):
        out.append("appl")
        _emit(p.left, out)
        _emit(p.right, out)
    elif isinstance(p, Imp):
        out.append("imp")
        _emit(p.left, out)
        _emit(p.right, out)
    elif isinstance(p, Exists):
        out.append("exists")
        out.append(f"x{p.var}")
        _emit(p.body, out)
    elif isinstance(p, Mu):
        out.append("mu")
        out.append(f"X{p.var}")
        _emit(p.body, out)
    else:
        raise TypeError(f"not a pattern node: {p!r}")


def token_len(p: Pattern) -> int:
    if isinstance(p, (EVar, SVar, Const)):
        return 1
    if isinstance(p, (Appl, Imp)):
        return 1 + token_len(p.left) + token_len(p.right)
    return 2 + token_len(p.body)


def render_core(p: Pattern) -> str:
    return " ".join(tokens(p))


def parse_core(text: str, sig: Signature) -> Pattern:
    """Parse whitespace separated Polish core tokens against ``sig``."""
    toks = text.split()
    if not toks:
        raise Malformed("empty input")
    p, end = _parse_at(toks, 0, sig)
    if end != len(toks):
        raise Malformed(
            f"pattern complete at token {end} but {len(toks) - end} token(s) remain"
        )
    return p


def _parse_at(toks: list[str], i: int, sig: Signature) -> tuple[Pattern, int]:
    if i >= len(toks):
        raise ArityError("pattern truncated, operand missing")
    t = toks[i]
    if t in ("appl", "imp"):
        left, j = _parse_at(toks, i + 1, sig)
        right, k = _parse_at(toks, j, sig)
        node = Appl(left, right) if t == "appl" else Imp(left, right)
        return node, k
    if t == "exists":
        if i + 1 >= len(toks):
            raise ArityError("exists is missing its variable")
        m = _EVAR_TOKEN.match(toks[i + 1])
        if not m:
            raise Malformed(f"exists must bind an element variable, got {toks[i + 1]!r}")
        body, k = _parse_at(toks, i + 2, sig)
        return Exists(int(m.group(1)), body), k
    if t == "mu":
        if i + 1 >= len(toks):
            raise ArityError("mu is missing its variable")
        m = _SVAR_TOKEN.match(toks[i + 1])
        if not m:
            raise Malformed(f"mu must bind a set variable, got {toks[i + 1]!r}")
        body, k = _parse_at(toks, i + 2, sig)
        return Mu(int(m.group(1)), body), k
    m = _EVAR_TOKEN.match(t)
    if m:
        return EVar(int(m.group(1))), i + 1
    m = _SVAR_TOKEN.match(t)
    if m:
        return SVar(int(m.group(1))), i + 1
    if t in sig:
        return Const(t), i + 1
    raise UnknownSymbol(
        f"token {i}: {t!r} is not a variable, a keyword, or a declared constant"
    )


def subpatterns(p: Pattern) -> frozenset:
    out = {p}
    if isinstance(p, (Appl, Imp)):
        out |= subpatterns(p.left) | subpatterns(p.right)
    elif isinstance(p, (Exists, Mu)):
        out |= subpatterns(p.body)
    return frozenset(out)


def free_vars(p: Pattern) -> tuple[frozenset, frozenset]:
    """Free element and set variable indices, as a pair of frozensets."""
    if isinstance(p, EVar):
        return frozenset((p.index,)), frozenset()
    if isinstance(p, SVar):
        return frozenset(), frozenset((p.index,))
    if isinstance(p, Const):
        return frozenset(), frozenset()
    if isinstance(p, (Appl, Imp)):
        le, ls = free_vars(p.left)
        re_, rs = free_vars(p.right)
        return le | re_, ls | rs
    if isinstance(p, Exists):
        be, bs = free_vars(p.body)
        return be - {p.var}, bs
    be, bs = free_vars(p.body)
    return be, bs - {p.var}


def all_variable_indices(p: Pattern) -> tuple[frozenset, frozenset]:
    """Indices of every occurring variable, free or bound, binder heads included."""
    if isinstance(p, EVar):
        return frozenset((p.index,)), frozenset()
    if isinstance(p, SVar):
        return frozenset(), frozenset((p.index,))
    if isinstance(p, Const):
        return frozenset(), frozenset()
    if isinstance(p, (Appl, Imp)):
        le, ls = all_variable_indices(p.left)
        re_, rs = all_variable_indices(p.right)
        return le | re_, ls | rs
    be, bs = all_variable_indices(p.body)
    if isinstance(p, Exists):
        return be | {p.var}, bs
    return be, bs | {p.var}


def bound_binder_indices(p: Pattern) -> tuple[frozenset, frozenset]:
    """Variables with at least one bound occurrence, i.e. the binder heads."""
    if isinstance(p, (EVar, SVar, Const)):
        return frozenset(), frozenset()
    if isinstance(p, (Appl, Imp)):
        le, ls = bound_binder_indices(p.left)
        re_, rs = bound_binder_indices(p.right)
        return le | re_, ls | rs
    be, bs = bound_binder_indices(p.body)
    if isinstance(p, Exists):
        return be | {p.var}, bs
    return be, bs | {p.var}


def _node_at(p: Pattern, i: int):
    """The subpattern whose token string starts at position ``i``, else None.

    Binder head variable tokens are occurrences, not node starts.
    """
    if i == 0:
        return p
    if isinstance(p, (Appl, Imp)):
        ln = token_len(p.left)
        if 1 <= i <= ln:
            return _node_at(p.left, i - 1)
        return _node_at(p.right, i - 1 - ln)
    if isinstance(p, (Exists, Mu)):
        if i >= 2:
            return _node_at(p.body, i - 2)
        return None
    return None


def binder_scope(p: Pattern, i: int) -> int:
    """End position of the binder starting at token ``i``.

    Tokens ``i..j`` (binder keyword and head variable included) form the
    bound scope; ``j`` is returned.
    """
    n = token_len(p)
    if not 0 <= i < n:
        raise OutOfRange(f"position {i} outside pattern of length {n}")
    node = _node_at(p, i)
    if not isinstance(node, (Exists, Mu)):
        raise NotABinder(f"token {i} does not start a binder")
    return i + token_len(node) - 1


def binary_scopes(p: Pattern, i: int) -> tuple[int, int]:
    """Operand extents of the binary node at token ``i``.

    Returns ``(j, l)`` where tokens ``i+1..j`` are the first operand and
    ``j+1..l`` the second.
    """
    n = token_len(p)
    if not 0 <= i < n:
        raise OutOfRange(f"position {i} outside pattern of length {n}")
    node = _node_at(p, i)
    if not isinstance(node, (Appl, Imp)):
        raise NotABinary(f"token {i} does not start an application or implication")
    j = i + token_len(node.left)
    return j, i + token_len(node) - 1


class OccurrenceKind(Enum):
    FREE_ELEMENT = "free-element"
    BOUND_ELEMENT = "bound-element"
    FREE_SET = "free-set"
    BOUND_SET = "bound-set"
    NOT_A_VARIABLE = "not-a-variable"


def occurrence_kinds(p: Pattern) -> tuple[OccurrenceKind, ...]:
    """Classification of every token position in one pass."""
    out: list[OccurrenceKind] = []
    _occ_emit(p, frozenset(), frozenset(), out)
    return tuple(out)


def _occ_emit(p, bound_e, bound_s, out) -> None:
    if isinstance(p, EVar):
        out.append(
            OccurrenceKind.BOUND_ELEMENT
            if p.index in bound_e
            else OccurrenceKind.FREE_ELEMENT
        )
    elif isinstance(p, SVar):
        out.append(
            OccurrenceKind.BOUND_SET if p.index in bound_s else OccurrenceKind.FREE_SET
        )
    elif isinstance(p, Const):
        out.append(OccurrenceKind.NOT_A_VARIABLE)
    elif isinstance(p, (Appl, Imp)):
        out.append(OccurrenceKind.NOT_A_VARIABLE)
        _occ_emit(p.left, bound_e, bound_s, out)
        _occ_emit(p.right, bound_e, bound_s, out)
    elif isinstance(p, Exists):
        # The head variable token sits inside the binder's own scope, so it
        # is a bound occurrence.
        out.append(OccurrenceKind.NOT_A_VARIABLE)
        out.append(OccurrenceKind.BOUND_ELEMENT)
        _occ_emit(p.body, bound_e | {p.var}, bound_s, out)
    else:
        out.append(OccurrenceKind.NOT_A_VARIABLE)
        out.append(OccurrenceKind.BOUND_SET)
        _occ_emit(p.body, bound_e, bound_s | {p.var}, out)


def occurrence_kind(p: Pattern, k: int) -> OccurrenceKind:
    n = token_len(p)
    if not 0 <= k < n:
        raise OutOfRange(f"position {k} outside pattern of length {n}")
    return occurrence_kinds(p)[k]


def n_left(p: Pattern, set_index: int, k: int) -> int:
    """How many implication left operands enclose token position ``k``.

    The count restarts at zero below a ``mu`` binder on ``set_index`` itself
    (no free occurrence of that variable survives there), and positions
    outside the pattern count zero.  Parity of this number at the free
    occurrences of ``X<set_index>`` decides polarity.
    """
    if k < 0 or k >= token_len(p):
        return 0
    if isinstance(p, (EVar, SVar, Const)):
        return 0
    if isinstance(p, (Appl, Imp)):
        if k == 0:
            return 0
        ln = token_len(p.left)
        if k <= ln:
            inner = n_left(p.left, set_index, k - 1)
            return inner + 1 if isinstance(p, Imp) else inner
        return n_left(p.right, set_index, k - 1 - ln)
    if isinstance(p, Exists):
        return n_left(p.body, set_index, k - 2) if k >= 2 else 0
    if p.var == set_index:
        return 0
    return n_left(p.body, set_index, k - 2) if k >= 2 else 0


def _n_left_vector(p: Pattern, set_index: int) -> list[int]:
    if isinstance(p, (EVar, SVar, Const)):
        return [0]
    if isinstance(p, (Appl, Imp)):
        lv = _n_left_vector(p.left, set_index)
        rv = _n_left_vector(p.right, set_index)
        if isinstance(p, Imp):
            lv = [v + 1 for v in lv]
        return [0, *lv, *rv]
    if isinstance(p, Mu) and p.var == set_index:
        return [0] * token_len(p)
    return [0, 0, *_n_left_vector(p.body, set_index)]


def _free_set_positions(p: Pattern, set_index: int) -> list[int]:
    toks = tokens(p)
    kinds = occurrence_kinds(p)
    want = f"X{set_index}"
    return [
        k
        for k, (t, kind) in enumerate(zip(toks, kinds))
        if t == want and kind is OccurrenceKind.FREE_SET
    ]


def is_positive_in(p: Pattern, set_index: int) -> bool:
    """Every free occurrence of ``X<set_index>`` sits under an even number of
    implication left operands.  Vacuously true when the variable is not free."""
    vec = _n_left_vector(p, set_index)
    return all(vec[k] % 2 == 0 for k in _free_set_positions(p, set_index))


def is_negative_in(p: Pattern, set_index: int) -> bool:
    """Dual of :func:`is_positive_in`: every free occurrence under an odd count."""
    vec = _n_left_vector(p, set_index)
    return all(vec[k] % 2 == 1 for k in _free_set_positions(p, set_index))
