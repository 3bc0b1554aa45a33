"""Show that the three consequence relations genuinely differ.

Two examples drive the wedges: x0 \\/ x1 entails x0 /\\ x1 globally but not
locally, and x0 entails x1 locally but not strongly.  For each failing
relation the witness structure and valuation are printed in the same JSON
shapes the command line tools consume, so the counterexample can be
replayed with `aml eval`.
"""

import argparse
import json
import sys

from aml.model import SuiteSpec, structure_to_doc, valuation_to_doc
from aml.semantics import consequence
from aml.sugar import parse_sugar, render_sugar
from aml.syntax import Signature


def show(kind, gamma, delta, suite, sig):
    verdict = consequence(kind, gamma, delta, suite)
    left = ", ".join(render_sugar(p) for p in gamma)
    right = ", ".join(render_sugar(p) for p in delta)
    word = "holds" if verdict.holds else "fails"
    print(f"{left}  |=[{kind}]  {right}: {word} "
          f"({verdict.structures_checked} structure(s) checked)")
    if not verdict.holds:
        print(f"  offending pattern: {render_sugar(verdict.pattern)}")
        print(f"  structure: {json.dumps(structure_to_doc(verdict.structure), sort_keys=True)}")
        doc = valuation_to_doc(verdict.valuation, verdict.structure)
        print(f"  valuation: {json.dumps(doc, sort_keys=True)}")
        if verdict.note:
            print(f"  note: {verdict.note}")
    print()
    return verdict


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-size", type=int, default=2)
    args = ap.parse_args()

    sig = Signature(())
    suite = list(SuiteSpec(sig, max_size=args.max_size).structures())
    print(f"exhaustive suite, universes up to {args.max_size}: {len(suite)} structure(s)\n")

    disj = [parse_sugar("x0 \\/ x1", sig)]
    conj = [parse_sugar("x0 /\\ x1", sig)]
    a = show("global", disj, conj, suite, sig)
    b = show("local", disj, conj, suite, sig)
    c = show("local", [parse_sugar("x0", sig)], [parse_sugar("x1", sig)], suite, sig)
    d = show("strong", [parse_sugar("x0", sig)], [parse_sugar("x1", sig)], suite, sig)

    separated = a.holds and not b.holds and c.holds and not d.holds
    print("separation witnessed" if separated else "SEPARATION NOT WITNESSED")
    return 0 if separated else 1


if __name__ == "__main__":
    sys.exit(main())
