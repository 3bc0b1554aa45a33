"""Pattern semantics over finite structures, tautology and consequence checks.

Evaluation maps a pattern to the subset of the universe it stands for, given
a structure and a valuation.  Implication is relative complement, the
existential is a union over all reassignments of its variable, and ``mu`` is
the intersection of all closed sets of the induced operator (no positivity
is assumed at evaluation time; the fixpoint reading is only guaranteed for
positive bodies).

Consequence comes in three strengths and is always decided relative to an
explicit suite of finite structures, so a "holds" verdict is an
under-approximation of validity; counterexamples, on the other hand, are
definitive and replayable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from . import sugar
from .model import Structure, Valuation, apply_sets, subsets_of, _check_cap
from .syntax import (
    Appl,
    Const,
    DEFINEDNESS,
    EVar,
    Exists,
    Imp,
    Mu,
    Pattern,
    SVar,
    free_vars,
)

__all__ = [
    "UnassignedConstant",
    "SkeletonTooLarge",
    "NotADefinednessStructure",
    "MAX_SKELETON_ATOMS",
    "evaluate",
    "evaluate_nu_direct",
    "satisfies",
    "models",
    "is_predicate",
    "fv_assignments",
    "propositional_skeleton",
    "is_tautology",
    "ConsequenceKind",
    "Verdict",
    "consequence",
    "eval_definedness",
]


class UnassignedConstant(ValueError):
    """The pattern uses a constant the structure does not interpret."""


class SkeletonTooLarge(ValueError):
    """Too many distinct propositional atoms for a truth-table check."""


class NotADefinednessStructure(ValueError):
    """The structure does not interpret ``def``."""


MAX_SKELETON_ATOMS = 20


def evaluate(structure: Structure, valuation: Valuation, p: Pattern) -> frozenset:
    """The subset of the universe denoted by ``p``."""
    _check_cap(structure.universe)
    return _eval(structure, valuation, p)


def _eval(s: Structure, e: Valuation, p: Pattern) -> frozenset:
    if isinstance(p, EVar):
        return frozenset((e.element_of(p.index, s),))
    if isinstance(p, SVar):
        return e.set_of(p.index)
    if isinstance(p, Const):
        try:
            return s.constants[p.name]
        except KeyError:
            raise UnassignedConstant(f"constant {p.name!r} has no denotation") from None
    if isinstance(p, Appl):
        return apply_sets(s, _eval(s, e, p.left), _eval(s, e, p.right))
    if isinstance(p, Imp):
        left = _eval(s, e, p.left)
        right = _eval(s, e, p.right)
        return (s.carrier - left) | right
    if isinstance(p, Exists):
        out = set()
        for a in s.universe:
            out |= _eval(s, e.with_element(p.var, a), p.body)
        return frozenset(out)
    # Mu: intersection of all closed sets of the induced operator.
    acc = s.carrier
    for b in subsets_of(s.universe):
        if _eval(s, e.with_set(p.var, b), p.body) <= b:
            acc &= b
    return acc


def evaluate_nu_direct(
    structure: Structure, valuation: Valuation, var: int, body: Pattern
) -> frozenset:
    """Greatest fixpoint value computed directly: the union of all sets B
    contained in the operator applied to B.  Must agree with evaluating the
    negation-based expansion of ``nu``; the tests hold both against each
    other."""
    _check_cap(structure.universe)
    acc = frozenset()
    for b in subsets_of(structure.universe):
        if b <= _eval(structure, valuation.with_set(var, b), body):
            acc |= b
    return acc


def satisfies(structure: Structure, valuation: Valuation, p: Pattern) -> bool:
    """The pattern denotes the whole universe under this valuation."""
    return evaluate(structure, valuation, p) == structure.carrier


def fv_assignments(
    structure: Structure, patterns: Iterable[Pattern]
) -> Iterator[Valuation]:
    """Every assignment of the free variables of ``patterns``, in a fixed
    deterministic order.  Variables outside the domain keep their defaults."""
    evars: set = set()
    svars: set = set()
    for p in patterns:
        fe, fs = free_vars(p)
        evars |= fe
        svars |= fs
    e_list = sorted(evars)
    s_list = sorted(svars)
    subsets = list(subsets_of(structure.universe))
    for elems in itertools.product(structure.universe, repeat=len(e_list)):
        base = dict(zip(e_list, elems))
        for sets in itertools.product(subsets, repeat=len(s_list)):
            yield Valuation(base, dict(zip(s_list, sets)))


def models(structure: Structure, p: Pattern) -> bool:
    """Validity in the structure: satisfied under every assignment of the
    pattern's free variables."""
    return all(
        satisfies(structure, v, p) for v in fv_assignments(structure, [p])
    )


def is_predicate(structure: Structure, p: Pattern) -> bool:
    """The pattern denotes either nothing or everything, under every
    assignment of its free variables."""
    full = structure.carrier
    for v in fv_assignments(structure, [p]):
        val = evaluate(structure, v, p)
        if val and val != full:
            return False
    return True


# ---------------------------------------------------------------------------
# Tautology checking through the propositional skeleton.
#
# Evaluation sends falsum to the empty set and implication to relative
# complement, so for each single element a of the universe, "a is in the
# value" behaves exactly like a two-valued propositional assignment over the
# maximal non-implication subpatterns.  Conversely a one-element structure
# realises any two-valued assignment (its subsets are just false and true).
# Hence: a pattern denotes everything under every interpretation of its
# atoms if and only if its skeleton is a propositional tautology, which a
# truth table decides.  The acceptance suite cross-checks this against brute
# force over one- and two-element powerset algebras.


def propositional_skeleton(p: Pattern):
    """Implication tree over atom indices: ``("bot",)``, ``("imp", l, r)`` or
    ``("atom", i)``, plus the atom table.  Any ``mu X . X`` counts as falsum,
    canonical or not."""
    atoms: dict[Pattern, int] = {}

    def walk(q: Pattern):
        if sugar.is_bot_like(q):
            return ("bot",)
        if isinstance(q, Imp):
            left = walk(q.left)
            right = walk(q.right)
            return ("imp", left, right)
        index = atoms.setdefault(q, len(atoms))
        return ("atom", index)

    tree = walk(p)
    return tree, list(atoms)


def is_tautology(p: Pattern, max_atoms: int = MAX_SKELETON_ATOMS) -> bool:
    tree, atoms = propositional_skeleton(p)
    if len(atoms) > max_atoms:
        raise SkeletonTooLarge(
            f"{len(atoms)} distinct atoms exceed the limit of {max_atoms}"
        )

    def run(node, row) -> bool:
        if node[0] == "bot":
            return False
        if node[0] == "atom":
            return row[node[1]]
        return (not run(node[1], row)) or run(node[2], row)

    for row in itertools.product((False, True), repeat=len(atoms)):
        if not run(tree, row):
            return False
    return True


# ---------------------------------------------------------------------------
# Consequence relative to a model suite.


class ConsequenceKind(str, Enum):
    GLOBAL = "global"
    LOCAL = "local"
    STRONG = "strong"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a consequence check over a suite.

    ``holds`` means no counterexample was found in the suite.  Otherwise the
    structure, valuation and failing conclusion are enough to replay the
    violation with `evaluate`.
    """

    holds: bool
    kind: ConsequenceKind
    structures_checked: int
    structure: Structure | None = None
    valuation: Valuation | None = None
    pattern: Pattern | None = None
    note: str = ""


def consequence(
    kind: ConsequenceKind | str,
    gamma: Iterable[Pattern],
    delta: Iterable[Pattern],
    suite: Iterable[Structure],
) -> Verdict:
    """Decide whether every conclusion follows from ``gamma`` on every
    structure of the suite, in the requested sense.

    Global reads hypotheses as validities of the structure; local reads them
    pointwise per valuation; strong compares denotations by inclusion (with
    an empty ``gamma`` the intersection is the whole universe, so strong
    consequence from nothing is validity).
    """
    kind = ConsequenceKind(kind)
    gamma = list(gamma)
    delta = list(delta)
    checked = 0
    for s in suite:
        checked += 1
        if kind is ConsequenceKind.GLOBAL:
            if not all(models(s, g) for g in gamma):
                continue
            for p in delta:
                for v in fv_assignments(s, [p]):
                    if not satisfies(s, v, p):
                        return Verdict(
                            False, kind, checked, s, v, p,
                            "hypotheses are valid here but the conclusion is not",
                        )
        elif kind is ConsequenceKind.LOCAL:
            everything = gamma + delta
            for v in fv_assignments(s, everything):
                if not all(satisfies(s, v, g) for g in gamma):
                    continue
                for p in delta:
                    if not satisfies(s, v, p):
                        return Verdict(
                            False, kind, checked, s, v, p,
                            "hypotheses are satisfied here but the conclusion is not",
                        )
        else:
            everything = gamma + delta
            for v in fv_assignments(s, everything):
                common = s.carrier
                for g in gamma:
                    common &= evaluate(s, v, g)
                for p in delta:
                    if not common <= evaluate(s, v, p):
                        return Verdict(
                            False, kind, checked, s, v, p,
                            "the conclusion's value does not cover the "
                            "hypotheses' common value",
                        )
    return Verdict(True, kind, checked)


# ---------------------------------------------------------------------------
# Definedness operators.


def eval_definedness(
    structure: Structure,
    valuation: Valuation,
    op: str,
    args: Sequence,
) -> frozenset:
    """Evaluate ``ceil``/``floor``/``eq``/``mem`` on a definedness structure.

    The desugared pattern and the two-valued closed form are both computed;
    they provably agree on structures applying ``def`` totally, and the
    check is cheap, so disagreement raises immediately.
    """
    if DEFINEDNESS not in structure.constants:
        raise NotADefinednessStructure("the structure does not interpret 'def'")
    full = structure.carrier
    empty = frozenset()
    if op == "ceil":
        (phi,) = args
        desugared = sugar.ceil(phi)
        closed = full if evaluate(structure, valuation, phi) else empty
    elif op == "floor":
        (phi,) = args
        desugared = sugar.floor(phi)
        closed = (
            full if evaluate(structure, valuation, phi) == full else empty
        )
    elif op == "eq":
        phi, psi = args
        desugared = sugar.eq(phi, psi)
        closed = (
            full
            if evaluate(structure, valuation, phi)
            == evaluate(structure, valuation, psi)
            else empty
        )
    elif op == "mem":
        var, phi = args
        desugared = sugar.mem(var, phi)
        closed = (
            full
            if valuation.element_of(var, structure)
            in evaluate(structure, valuation, phi)
            else empty
        )
    else:
        raise ValueError(f"unknown definedness operator {op!r}")
    direct = evaluate(structure, valuation, desugared)
    if direct != closed:
        raise RuntimeError(
            f"definedness closed form for {op} disagrees with evaluation"
        )
    return direct
