"""Command line front end.

Exit codes: 0 when the command succeeds and its verdict is positive, 1 when
a check comes back negative (not valid, not a tautology, consequence fails,
proof rejected, audit violation), 2 on usage or file-format errors.  Output
is deterministic for identical inputs and seeds; JSON output is sorted-key.

Every failing verdict is also written out as replayable counterexample
files under the ``--out`` directory, in the formats `eval` reads back.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .model import (
    ModelError,
    Structure,
    SuiteSpec,
    Valuation,
    load_structure,
    load_valuation,
    structure_to_doc,
    valuation_to_doc,
)
from .proof import (
    ProofSyntaxError,
    audit_soundness,
    check_proof,
    format_audit,
    format_report,
    parse_proof,
)
from .semantics import (
    consequence,
    evaluate,
    fv_assignments,
    is_tautology,
    satisfies,
)
from .sugar import parse as parse_pattern
from .sugar import render as render_pattern
from .syntax import (
    OccurrenceKind,
    ParseError,
    Pattern,
    Signature,
    free_vars,
    is_negative_in,
    is_positive_in,
    load_signature,
    occurrence_kinds,
    token_len,
    tokens,
)

__all__ = ["main"]


class CliError(Exception):
    """Usage or file-format problem; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Input loading.


def _load_sig(args, fallback: tuple[str, ...] = ()) -> Signature:
    if getattr(args, "sig", None):
        try:
            return load_signature(args.sig)
        except (OSError, ValueError) as exc:
            raise CliError(f"{args.sig}: {exc}") from exc
    try:
        return Signature(tuple(sorted(fallback)))
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _read_patterns(path: str, sig: Signature, mode: str) -> list[Pattern]:
    """A pattern file: one pattern per line, ``#`` comments."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(str(exc)) from exc
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_pattern(line, sig, mode))
        except ParseError as exc:
            raise CliError(f"{path}:{lineno}: {exc}") from exc
    if not out:
        raise CliError(f"{path}: no patterns")
    return out


def _load_model(path: str, sig: Signature | None) -> Structure:
    try:
        return load_structure(path, sig)
    except (OSError, json.JSONDecodeError, ModelError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_model_dir(path: str, sig: Signature | None) -> list[Structure]:
    files = sorted(Path(path).glob("*.json"))
    files = [f for f in files if f.name != "suite.json"]
    if not files:
        raise CliError(f"{path}: no structure files")
    return [_load_model(str(f), sig) for f in files]


def _suite(args, sig: Signature) -> tuple[list[Structure], str]:
    if getattr(args, "models", None):
        suite = _load_model_dir(args.models, None)
        return suite, f"directory {args.models}"
    spec = SuiteSpec(
        sig=sig,
        max_size=args.max_size,
        seed=args.seed,
        samples=args.samples,
        defined=args.defined,
    )
    return list(spec.structures()), spec.describe()


def _constants_of(structure: Structure) -> tuple[str, ...]:
    return tuple(sorted(structure.constants))


# ---------------------------------------------------------------------------
# Counterexample artifacts.


def _write_counterexample(
    outdir: Path,
    structure: Structure,
    valuation: Valuation | None,
    conclusion: Pattern,
    gamma: list[Pattern] | None = None,
) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "structure.json").write_text(
        json.dumps(structure_to_doc(structure), indent=2, sort_keys=True) + "\n"
    )
    if valuation is not None:
        (outdir / "valuation.json").write_text(
            json.dumps(valuation_to_doc(valuation, structure), indent=2, sort_keys=True)
            + "\n"
        )
    (outdir / "conclusion.pat").write_text(render_pattern(conclusion, "sugar") + "\n")
    if gamma:
        (outdir / "gamma.pat").write_text(
            "".join(render_pattern(g, "sugar") + "\n" for g in gamma)
        )
    replay = (
        "aml eval --mode sugar --model structure.json"
        + (" --valuation valuation.json" if valuation is not None else "")
        + " conclusion.pat\n"
    )
    (outdir / "replay.txt").write_text(replay)


def _verdict_lines(structure: Structure, valuation: Valuation | None, p: Pattern) -> list[str]:
    out = [f"  structure: universe {{{', '.join(structure.universe)}}}"]
    if valuation is not None:
        doc = valuation_to_doc(valuation, structure)
        out.append(f"  valuation: {json.dumps(doc, sort_keys=True)}")
    out.append(f"  pattern: {render_pattern(p, 'sugar')}")
    return out


# ---------------------------------------------------------------------------
# Commands.


def _cmd_parse(args) -> int:
    sig = _load_sig(args)
    pats = _read_patterns(args.pattern_file, sig, args.mode)
    if args.json:
        doc = {
            "patterns": [
                {
                    "core": render_pattern(p, "core"),
                    "sugar": render_pattern(p, "sugar"),
                    "tokens": token_len(p),
                }
                for p in pats
            ]
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    for p in pats:
        print(render_pattern(p, args.emit))
    return 0


def _fmt_vars(indices, prefix: str) -> str:
    if not indices:
        return "(none)"
    return " ".join(f"{prefix}{i}" for i in sorted(indices))


def _polarity_word(p: Pattern, index: int) -> str:
    if is_positive_in(p, index):
        return "positive"
    if is_negative_in(p, index):
        return "negative"
    return "neither"


def _cmd_analyze(args) -> int:
    sig = _load_sig(args)
    pats = _read_patterns(args.pattern_file, sig, args.mode)
    docs = []
    for n, p in enumerate(pats, start=1):
        fe, fs = free_vars(p)
        toks = tokens(p)
        kinds = occurrence_kinds(p)
        set_indices = sorted(fs)
        polarity = {i: _polarity_word(p, i) for i in set_indices}
        if args.json:
            docs.append(
                {
                    "core": render_pattern(p, "core"),
                    "sugar": render_pattern(p, "sugar"),
                    "free_element_vars": sorted(fe),
                    "free_set_vars": sorted(fs),
                    "occurrences": [
                        {"position": i, "token": t, "kind": k.value}
                        for i, (t, k) in enumerate(zip(toks, kinds))
                        if k is not OccurrenceKind.NOT_A_VARIABLE
                    ],
                    "set_polarity": {f"X{i}": w for i, w in polarity.items()},
                }
            )
            continue
        print(f"pattern {n}: {render_pattern(p, 'sugar')}")
        print(f"  core: {render_pattern(p, 'core')}")
        print(f"  free element variables: {_fmt_vars(fe, 'x')}")
        print(f"  free set variables: {_fmt_vars(fs, 'X')}")
        print("  occurrences:")
        for i, (t, k) in enumerate(zip(toks, kinds)):
            if k is not OccurrenceKind.NOT_A_VARIABLE:
                print(f"    {i:>3}  {t:<6} {k.value}")
        for i in set_indices:
            print(f"  X{i}: {polarity[i]}")
    if args.json:
        print(json.dumps({"patterns": docs}, indent=2, sort_keys=True))
    return 0


def _cmd_eval(args) -> int:
    structure = _load_model(args.model, None)
    sig = _load_sig(args, _constants_of(structure))
    pats = _read_patterns(args.pattern_file, sig, args.mode)
    if args.valuation:
        try:
            valuation = load_valuation(args.valuation, structure)
        except (OSError, json.JSONDecodeError, ModelError) as exc:
            raise CliError(f"{args.valuation}: {exc}") from exc
    else:
        valuation = Valuation()
    all_sat = True
    docs = []
    for p in pats:
        value = evaluate(structure, valuation, p)
        sat = value == structure.carrier
        all_sat = all_sat and sat
        if args.json:
            docs.append(
                {
                    "pattern": render_pattern(p, "sugar"),
                    "value": structure.sorted_elements(value),
                    "satisfied": sat,
                }
            )
        else:
            print(
                f"{render_pattern(p, 'sugar')}\n"
                f"  value: {structure.format_subset(value)}\n"
                f"  satisfied: {'yes' if sat else 'no'}"
            )
    if args.json:
        print(json.dumps({"results": docs, "all_satisfied": all_sat}, indent=2, sort_keys=True))
    return 0 if all_sat else 1


def _cmd_check(args) -> int:
    structure = _load_model(args.model, None)
    sig = _load_sig(args, _constants_of(structure))
    pats = _read_patterns(args.pattern_file, sig, args.mode)
    all_valid = True
    docs = []
    for p in pats:
        witness = None
        for valuation in fv_assignments(structure, [p]):
            if not satisfies(structure, valuation, p):
                witness = valuation
                break
        valid = witness is None
        all_valid = all_valid and valid
        if args.json:
            doc = {"pattern": render_pattern(p, "sugar"), "valid": valid}
            if witness is not None:
                doc["counter_valuation"] = valuation_to_doc(witness, structure)
            docs.append(doc)
            continue
        print(f"{render_pattern(p, 'sugar')}\n  valid: {'yes' if valid else 'no'}")
        if witness is not None:
            for line in _verdict_lines(structure, witness, p):
                print(line)
            _write_counterexample(Path(args.out), structure, witness, p)
            print(f"  counterexample written to {args.out}/")
    if args.json:
        print(json.dumps({"results": docs, "all_valid": all_valid}, indent=2, sort_keys=True))
    return 0 if all_valid else 1


def _cmd_taut(args) -> int:
    sig = _load_sig(args)
    pats = _read_patterns(args.pattern_file, sig, args.mode)
    all_taut = True
    docs = []
    for p in pats:
        taut = is_tautology(p)
        all_taut = all_taut and taut
        if args.json:
            docs.append({"pattern": render_pattern(p, "sugar"), "tautology": taut})
        else:
            print(f"{render_pattern(p, 'sugar')}\n  tautology: {'yes' if taut else 'no'}")
    if args.json:
        print(json.dumps({"results": docs, "all_tautologies": all_taut}, indent=2, sort_keys=True))
    return 0 if all_taut else 1


def _cmd_consequence(args) -> int:
    suite_sig_names: tuple[str, ...] = ()
    if args.models:
        probe = _load_model_dir(args.models, None)
        names = set()
        for s in probe:
            names |= set(s.constants)
        suite_sig_names = tuple(sorted(names))
    sig = _load_sig(args, suite_sig_names)
    if args.defined and "def" not in sig and not args.sig and not args.models:
        sig = Signature(tuple(sorted((*sig.constants, "def"))))
    gamma: list[Pattern] = []
    for path in args.gamma or []:
        gamma.extend(_read_patterns(path, sig, args.mode))
    delta = _read_patterns(args.pattern_file, sig, args.mode)
    suite, origin = _suite(args, sig)
    verdict = consequence(args.kind, gamma, delta, suite)
    if args.json:
        doc = {
            "kind": args.kind,
            "holds": verdict.holds,
            "structures_checked": verdict.structures_checked,
            "suite": origin,
        }
        if not verdict.holds:
            doc["counterexample"] = {
                "structure": structure_to_doc(verdict.structure),
                "valuation": valuation_to_doc(verdict.valuation, verdict.structure),
                "pattern": render_pattern(verdict.pattern, "sugar"),
                "note": verdict.note,
            }
            _write_counterexample(
                Path(args.out), verdict.structure, verdict.valuation, verdict.pattern, gamma
            )
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0 if verdict.holds else 1
    word = "holds" if verdict.holds else "fails"
    print(
        f"{args.kind} consequence over {verdict.structures_checked} structure(s) "
        f"({origin}): {word}"
    )
    if not verdict.holds:
        for line in _verdict_lines(verdict.structure, verdict.valuation, verdict.pattern):
            print(line)
        if verdict.note:
            print(f"  note: {verdict.note}")
        _write_counterexample(
            Path(args.out), verdict.structure, verdict.valuation, verdict.pattern, gamma
        )
        print(f"  counterexample written to {args.out}/")
    return 0 if verdict.holds else 1


def _cmd_proof(args) -> int:
    if args.action != "check":
        raise CliError(f"unknown proof action {args.action!r}")
    sig = _load_sig(args)
    try:
        text = Path(args.script).read_text()
    except OSError as exc:
        raise CliError(str(exc)) from exc
    try:
        script = parse_proof(text, sig)
    except ProofSyntaxError as exc:
        raise CliError(f"{args.script}: {exc}") from exc
    report = check_proof(script)
    audit = None
    if args.audit:
        suite, _ = _suite(args, sig)
        audit = audit_soundness(script, suite, report)
    if args.json:
        doc = {
            "lines": [
                {"number": v.number, "ok": v.ok, "code": v.code, "message": v.message}
                for v in report.verdicts
            ],
            "level": report.level,
            "result": "accepted" if report.ok else "rejected",
        }
        if audit is not None:
            doc["audit"] = {
                "structures": audit.structures,
                "lines_audited": audit.lines_audited,
                "violations": [
                    {"line": v.line, "pattern": render_pattern(v.pattern, "sugar")}
                    for v in audit.violations
                ],
            }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(format_report(report))
        if audit is not None:
            print(format_audit(audit))
    if audit is not None:
        for v in audit.violations:
            _write_counterexample(
                Path(args.out) / f"line-{v.line}",
                v.verdict.structure,
                v.verdict.valuation,
                v.verdict.pattern,
                list(script.hypotheses.values()),
            )
        if audit.violations and not args.json:
            print(f"counterexamples written under {args.out}/")
    ok = report.ok and (audit is None or audit.ok)
    return 0 if ok else 1


def _cmd_gen_models(args) -> int:
    sig = _load_sig(args)
    if args.defined and "def" not in sig:
        sig = Signature(tuple(sorted((*sig.constants, "def"))))
    spec = SuiteSpec(
        sig=sig,
        max_size=args.max_size,
        seed=args.seed,
        samples=args.samples,
        defined=args.defined,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    count = 0
    for i, s in enumerate(spec.structures()):
        path = outdir / f"structure-{i:04d}.json"
        path.write_text(json.dumps(structure_to_doc(s), indent=2, sort_keys=True) + "\n")
        count += 1
    manifest = {
        "constants": list(sig.constants),
        "max_size": spec.max_size,
        "seed": spec.seed,
        "samples": spec.samples,
        "defined": spec.defined,
        "count": count,
    }
    (outdir / "suite.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {count} structure(s) to {outdir}/ ({spec.describe()})")
    return 0


# ---------------------------------------------------------------------------
# Argument wiring.


def _add_mode(p) -> None:
    p.add_argument(
        "--mode",
        choices=("core", "sugar"),
        default="sugar",
        help="pattern syntax for input files (default sugar)",
    )


def _add_sig(p) -> None:
    p.add_argument("--sig", metavar="FILE", help="signature file, one constant per line")


def _add_json(p) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _add_suite(p) -> None:
    p.add_argument("--models", metavar="DIR", help="directory of structure JSON files")
    p.add_argument("--max-size", type=int, default=2, help="largest universe (default 2)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.add_argument(
        "--samples", type=int, default=100,
        help="sampled structures of size three and up (default 100)",
    )
    p.add_argument(
        "--defined", action="store_true",
        help="generate definedness structures (forces a total def constant)",
    )


def _add_out(p) -> None:
    p.add_argument(
        "--out", metavar="DIR", default="aml-out",
        help="directory for counterexample files (default aml-out)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aml",
        description="Workbench for applicative matching logic over finite structures.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a pattern file and re-emit it")
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    p.add_argument(
        "--emit", choices=("core", "sugar"), default="core",
        help="output syntax (default core)",
    )
    p.add_argument("pattern_file")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("analyze", help="variables, occurrence table, polarity")
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    p.add_argument("pattern_file")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("eval", help="evaluate patterns in one structure")
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    p.add_argument("--model", metavar="FILE", required=True)
    p.add_argument("--valuation", metavar="FILE")
    p.add_argument("pattern_file")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("check", help="validity in one structure (all assignments)")
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    _add_out(p)
    p.add_argument("--model", metavar="FILE", required=True)
    p.add_argument("pattern_file")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("taut", help="propositional tautology test")
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    p.add_argument("pattern_file")
    p.set_defaults(fn=_cmd_taut)

    p = sub.add_parser("consequence", help="decide a consequence relation over a suite")
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    _add_suite(p)
    _add_out(p)
    p.add_argument(
        "--kind", choices=("global", "local", "strong"), default="global",
        help="consequence relation (default global)",
    )
    p.add_argument(
        "--gamma", metavar="FILE", action="append",
        help="hypothesis pattern file; repeatable, files merge",
    )
    p.add_argument("pattern_file", help="conclusion patterns")
    p.set_defaults(fn=_cmd_consequence)

    p = sub.add_parser("proof", help="check a proof script")
    p.add_argument("action", choices=("check",))
    _add_mode(p)
    _add_sig(p)
    _add_json(p)
    _add_suite(p)
    _add_out(p)
    p.add_argument("--audit", action="store_true", help="replay accepted lines over a suite")
    p.add_argument("script")
    p.set_defaults(fn=_cmd_proof)

    p = sub.add_parser("gen-models", help="materialize a deterministic suite to files")
    _add_sig(p)
    _add_suite(p)
    p.add_argument("--out", metavar="DIR", required=True)
    p.set_defaults(fn=_cmd_gen_models)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, ModelError, ProofSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
