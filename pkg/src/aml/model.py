"""Finite applicative structures, valuations, and set-function fixpoints.

A structure is a nonempty finite universe, a binary application map sending
each pair of elements to a subset, and a denotation subset per constant.
Universe elements are opaque strings; their order in the file fixes the
canonical printing order for subsets.

Structures declaring the reserved constant ``def`` are definedness
structures and must apply it totally: ``def`` applied to any singleton
yields the whole universe.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

from .syntax import DEFINEDNESS, Signature

__all__ = [
    "ENUMERATION_CAP",
    "ModelError",
    "EmptyUniverse",
    "DanglingElement",
    "MissingConstant",
    "DefinednessViolated",
    "UniverseTooLarge",
    "NonMonotoneDetected",
    "Structure",
    "Valuation",
    "apply_sets",
    "subsets_of",
    "kt_lfp",
    "kt_gfp",
    "exact_lfp",
    "exact_gfp",
    "kleene_lfp",
    "is_monotone",
    "validate_structure",
    "structure_to_doc",
    "load_structure",
    "save_structure",
    "valuation_from_doc",
    "valuation_to_doc",
    "load_valuation",
    "SuiteSpec",
    "enumerate_structures",
]

# Powerset walks are exponential in the universe; refuse beyond this size.
ENUMERATION_CAP = 12


class ModelError(ValueError):
    """A structure or valuation document is unusable."""


class EmptyUniverse(ModelError):
    pass


class DanglingElement(ModelError):
    """An element mentioned outside the declared universe."""


class MissingConstant(ModelError):
    """The signature demands a constant the structure does not interpret."""


class DefinednessViolated(ModelError):
    """A structure declares ``def`` but does not apply it totally."""


class UniverseTooLarge(ValueError):
    pass


class NonMonotoneDetected(ValueError):
    """Iteration decreased somewhere, so the operator is not monotone."""


@dataclass(frozen=True)
class Structure:
    universe: tuple[str, ...]
    app: Mapping[tuple[str, str], frozenset]
    constants: Mapping[str, frozenset]

    @property
    def carrier(self) -> frozenset:
        return frozenset(self.universe)

    def app_of(self, a: str, b: str) -> frozenset:
        return self.app.get((a, b), frozenset())

    def sort_key(self, element: str) -> int:
        return self.universe.index(element)

    def sorted_elements(self, subset) -> list[str]:
        return sorted(subset, key=self.universe.index)

    def format_subset(self, subset) -> str:
        return "{" + ", ".join(self.sorted_elements(subset)) + "}"


def subsets_of(universe: Sequence[str]) -> Iterator[frozenset]:
    """All subsets in bitmask order (element i of the universe is bit i)."""
    n = len(universe)
    for mask in range(1 << n):
        yield frozenset(universe[i] for i in range(n) if mask >> i & 1)


def apply_sets(structure: Structure, left, right) -> frozenset:
    """Pointwise application lifted to subsets: the union of all cell values."""
    out = set()
    for a in left:
        for b in right:
            out |= structure.app_of(a, b)
    return frozenset(out)


def _check_cap(universe: Sequence[str]) -> None:
    if len(universe) > ENUMERATION_CAP:
        raise UniverseTooLarge(
            f"universe of size {len(universe)} exceeds the enumeration cap "
            f"{ENUMERATION_CAP}"
        )


def kt_lfp(fn: Callable[[frozenset], frozenset], universe: Sequence[str]) -> frozenset:
    """Least fixpoint of a monotone set operator, by the intersection of all
    closed sets (sets B with fn(B) contained in B)."""
    _check_cap(universe)
    acc = frozenset(universe)
    for b in subsets_of(universe):
        if fn(b) <= b:
            acc &= b
    return acc


def kt_gfp(fn: Callable[[frozenset], frozenset], universe: Sequence[str]) -> frozenset:
    """Greatest fixpoint, by the union of all sets B contained in fn(B)."""
    _check_cap(universe)
    acc = frozenset()
    for b in subsets_of(universe):
        if b <= fn(b):
            acc |= b
    return acc


def exact_lfp(fn: Callable[[frozenset], frozenset], universe: Sequence[str]) -> frozenset:
    """Intersection of the exact fixpoints only; for monotone operators this
    coincides with `kt_lfp`, which the test suite exercises."""
    _check_cap(universe)
    acc = frozenset(universe)
    for b in subsets_of(universe):
        if fn(b) == b:
            acc &= b
    return acc


def exact_gfp(fn: Callable[[frozenset], frozenset], universe: Sequence[str]) -> frozenset:
    _check_cap(universe)
    acc = frozenset()
    for b in subsets_of(universe):
        if fn(b) == b:
            acc |= b
    return acc


def kleene_lfp(fn: Callable[[frozenset], frozenset], universe: Sequence[str]) -> frozenset:
    """Iterate fn from the empty set until stable.

    On a finite universe a monotone operator stabilises within |A| + 1 steps;
    a shrinking step means fn was not monotone after all.
    """
    _check_cap(universe)
    current = frozenset()
    for _ in range(len(universe) + 1):
        nxt = fn(current)
        if not current <= nxt:
            raise NonMonotoneDetected(
                f"iterate dropped from {sorted(current)} to {sorted(nxt)}"
            )
        if nxt == current:
            return current
        current = nxt
    nxt = fn(current)
    if nxt != current:
        raise NonMonotoneDetected("iteration failed to stabilise within |A|+1 steps")
    return current


def is_monotone(fn: Callable[[frozenset], frozenset], universe: Sequence[str]) -> bool:
    """Check fn(B) is contained in fn(C) for every B contained in C."""
    _check_cap(universe)
    subs = list(subsets_of(universe))
    values = {b: fn(b) for b in subs}
    for b, c in itertools.combinations(subs, 2):
        if b <= c and not values[b] <= values[c]:
            return False
        if c <= b and not values[c] <= values[b]:
            return False
    return True


# ---------------------------------------------------------------------------
# Serialization.


def validate_structure(doc: dict, sig: Signature | None = None) -> Structure:
    """Build a `Structure` from a JSON document, checking every invariant."""
    if not isinstance(doc, dict):
        raise ModelError("structure document must be a JSON object")
    universe = doc.get("universe")
    if not isinstance(universe, list) or not all(isinstance(u, str) for u in universe):
        raise ModelError("'universe' must be a list of strings")
    if not universe:
        raise EmptyUniverse("empty universe")
    if len(set(universe)) != len(universe):
        raise ModelError("universe elements must be distinct")
    known = set(universe)

    def check_element(e, where):
        if e not in known:
            raise DanglingElement(f"{where}: element {e!r} is not in the universe")

    app: dict[tuple[str, str], frozenset] = {}
    for row in doc.get("app", []):
        if not isinstance(row, dict) or set(row) - {"left", "right", "result"}:
            raise ModelError(f"bad app row {row!r}")
        a, b = row.get("left"), row.get("right")
        check_element(a, "app row")
        check_element(b, "app row")
        if (a, b) in app:
            raise ModelError(f"duplicate app row for ({a!r}, {b!r})")
        result = row.get("result", [])
        if not isinstance(result, list):
            raise ModelError(f"app result for ({a!r}, {b!r}) must be a list")
        for e in result:
            check_element(e, "app result")
        app[(a, b)] = frozenset(result)

    constants: dict[str, frozenset] = {}
    consts_doc = doc.get("constants", {})
    if not isinstance(consts_doc, dict):
        raise ModelError("'constants' must be an object")
    for name, val in consts_doc.items():
        if not isinstance(val, list):
            raise ModelError(f"constant {name!r} denotation must be a list")
        for e in val:
            check_element(e, f"constant {name!r}")
        constants[name] = frozenset(val)

    if sig is not None:
        for name in sig.constants:
            if name not in constants:
                raise MissingConstant(f"no denotation for constant {name!r}")

    s = Structure(tuple(universe), app, constants)
    if DEFINEDNESS in constants:
        d = constants[DEFINEDNESS]
        for a in universe:
            if apply_sets(s, d, frozenset((a,))) != s.carrier:
                raise DefinednessViolated(
                    f"def applied to {{{a}}} does not give the whole universe"
                )
    return s


def structure_to_doc(s: Structure) -> dict:
    rows = []
    for a in s.universe:
        for b in s.universe:
            val = s.app_of(a, b)
            if val:
                rows.append(
                    {"left": a, "right": b, "result": s.sorted_elements(val)}
                )
    return {
        "universe": list(s.universe),
        "app": rows,
        "constants": {
            name: s.sorted_elements(val) for name, val in sorted(s.constants.items())
        },
    }


def load_structure(path: str | Path, sig: Signature | None = None) -> Structure:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON ({exc})") from exc
    return validate_structure(doc, sig)


def save_structure(s: Structure, path: str | Path) -> None:
    Path(path).write_text(json.dumps(structure_to_doc(s), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class Valuation:
    """Assignment of universe elements to element variables and subsets to
    set variables.  Unlisted variables fall back to defaults: the first
    universe element, respectively the empty set."""

    element: Mapping[int, str] = field(default_factory=dict)
    sets: Mapping[int, frozenset] = field(default_factory=dict)

    def element_of(self, index: int, structure: Structure) -> str:
        return self.element.get(index, structure.universe[0])

    def set_of(self, index: int) -> frozenset:
        return self.sets.get(index, frozenset())

    def with_element(self, index: int, value: str) -> "Valuation":
        new = dict(self.element)
        new[index] = value
        return Valuation(new, self.sets)

    def with_set(self, index: int, value: frozenset) -> "Valuation":
        new = dict(self.sets)
        new[index] = value
        return Valuation(self.element, new)


_EVAR_KEY = "x"
_SVAR_KEY = "X"


def valuation_from_doc(doc: dict, structure: Structure) -> Valuation:
    if not isinstance(doc, dict) or set(doc) - {"element", "set"}:
        raise ModelError("valuation document must be {'element': ..., 'set': ...}")
    element: dict[int, str] = {}
    for key, val in doc.get("element", {}).items():
        index = _var_index(key, _EVAR_KEY)
        if val not in structure.carrier:
            raise DanglingElement(f"valuation of {key}: {val!r} not in the universe")
        element[index] = val
    sets: dict[int, frozenset] = {}
    for key, val in doc.get("set", {}).items():
        index = _var_index(key, _SVAR_KEY)
        if not isinstance(val, list):
            raise ModelError(f"valuation of {key} must be a list")
        for e in val:
            if e not in structure.carrier:
                raise DanglingElement(f"valuation of {key}: {e!r} not in the universe")
        sets[index] = frozenset(val)
    return Valuation(element, sets)


def _var_index(key: str, prefix: str) -> int:
    if isinstance(key, str) and key.startswith(prefix) and key[len(prefix):].isdigit():
        return int(key[len(prefix):])
    raise ModelError(f"bad variable key {key!r}")


def valuation_to_doc(v: Valuation, structure: Structure) -> dict:
    return {
        "element": {f"x{i}": v.element[i] for i in sorted(v.element)},
        "set": {
            f"X{i}": structure.sorted_elements(v.sets[i]) for i in sorted(v.sets)
        },
    }


def load_valuation(path: str | Path, structure: Structure) -> Valuation:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON ({exc})") from exc
    return valuation_from_doc(doc, structure)


# ---------------------------------------------------------------------------
# Deterministic structure streams.


@dataclass(frozen=True)
class SuiteSpec:
    """Recipe for a model suite: exhaustive small structures plus seeded
    samples.  The same recipe always yields the same stream."""

    sig: Signature
    max_size: int
    seed: int = 0
    samples: int = 0
    defined: bool = False

    def structures(self) -> Iterator[Structure]:
        return enumerate_structures(
            self.sig,
            self.max_size,
            seed=self.seed,
            samples=self.samples,
            defined=self.defined,
        )

    def describe(self) -> str:
        parts = [f"exhaustive |A|<={min(self.max_size, 2)}"]
        if self.samples and self.max_size >= 3:
            parts.append(
                f"{self.samples} sampled up to |A|={self.max_size} (seed {self.seed})"
            )
        if self.defined:
            parts.append("definedness")
        return ", ".join(parts)


def enumerate_structures(
    sig: Signature,
    max_size: int,
    *,
    seed: int = 0,
    samples: int = 0,
    defined: bool = False,
) -> Iterator[Structure]:
    """Stream structures over ``sig``: every structure of size at most two
    (over the full application/constant grid), then ``samples`` seeded random
    structures of sizes three to ``max_size``.

    With ``defined`` set, ``def`` is pinned to the first element and its
    application rows forced total, so every emitted structure satisfies the
    definedness law.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    _check_cap(range(max_size))
    names = list(sig.constants)
    if defined and DEFINEDNESS not in names:
        names = names + [DEFINEDNESS]
    for size in range(1, min(max_size, 2) + 1):
        yield from _exhaustive(size, names, defined)
    if samples and max_size >= 3:
        rng = random.Random(seed)
        for _ in range(samples):
            yield _sample(rng, rng.randint(3, max_size), names, defined)


def _universe(size: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(size))


def _exhaustive(size: int, names: list[str], defined: bool) -> Iterator[Structure]:
    universe = _universe(size)
    subsets = list(subsets_of(universe))
    cells = [(a, b) for a in universe for b in universe]
    free_cells = cells
    forced_app: dict[tuple[str, str], frozenset] = {}
    forced_consts: dict[str, frozenset] = {}
    free_names = names
    if defined:
        # Pin def to the first element and make its rows total; the rest of
        # the grid stays free.
        anchor = universe[0]
        forced_consts = {DEFINEDNESS: frozenset((anchor,))}
        forced_app = {(anchor, b): frozenset(universe) for b in universe}
        free_cells = [c for c in cells if c not in forced_app]
        free_names = [n for n in names if n != DEFINEDNESS]
    for app_choice in itertools.product(subsets, repeat=len(free_cells)):
        app = dict(forced_app)
        for cell, val in zip(free_cells, app_choice):
            if val:
                app[cell] = val
        app = {cell: val for cell, val in app.items() if val}
        for const_choice in itertools.product(subsets, repeat=len(free_names)):
            constants = dict(forced_consts)
            constants.update(zip(free_names, const_choice))
            yield Structure(universe, app, constants)


def _sample(rng: random.Random, size: int, names: list[str], defined: bool) -> Structure:
    universe = _universe(size)
    full = frozenset(universe)

    def random_subset() -> frozenset:
        mask = rng.getrandbits(size)
        return frozenset(universe[i] for i in range(size) if mask >> i & 1)

    app: dict[tuple[str, str], frozenset] = {}
    for a in universe:
        for b in universe:
            val = random_subset()
            if val:
                app[(a, b)] = val
    constants = {name: random_subset() for name in names}
    if defined:
        anchor = universe[0]
        extras = random_subset()
        constants[DEFINEDNESS] = frozenset((anchor,)) | extras
        for b in universe:
            app[(anchor, b)] = full
    return Structure(universe, app, constants)
