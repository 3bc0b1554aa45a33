"""Workbench for applicative matching logic over finite structures."""

from .syntax import (
    Appl,
    ArityError,
    Const,
    EVar,
    Exists,
    Imp,
    Malformed,
    Mu,
    OccurrenceKind,
    ParseError,
    Pattern,
    SVar,
    Signature,
    UnknownSymbol,
    binary_scopes,
    binder_scope,
    free_vars,
    is_negative_in,
    is_positive_in,
    load_signature,
    n_left,
    occurrence_kind,
    occurrence_kinds,
    parse_core,
    render_core,
    subpatterns,
    token_len,
    tokens,
)
from .substitution import (
    KindMismatch,
    VarRef,
    fresh_variables,
    is_free_for,
    subst_bound,
    subst_capture_avoiding,
    subst_free,
)
from .sugar import (
    BOT,
    TOP,
    and_,
    bot,
    ceil,
    eq,
    floor,
    fold_conj,
    fold_disj,
    forall,
    iff,
    mem,
    neg,
    nu,
    or_,
    parse,
    parse_sugar,
    render,
    render_sugar,
    top,
)
from .context import (
    ApplL,
    ApplR,
    Box,
    Context,
    context_fv,
    match_singleton,
    parse_context,
    plug,
    render_context,
)
from .model import (
    ENUMERATION_CAP,
    NonMonotoneDetected,
    Structure,
    SuiteSpec,
    UniverseTooLarge,
    Valuation,
    apply_sets,
    enumerate_structures,
    exact_gfp,
    exact_lfp,
    is_monotone,
    kleene_lfp,
    kt_gfp,
    kt_lfp,
    load_structure,
    load_valuation,
    save_structure,
    structure_to_doc,
    subsets_of,
    validate_structure,
)
from .semantics import (
    ConsequenceKind,
    SkeletonTooLarge,
    Verdict,
    consequence,
    eval_definedness,
    evaluate,
    evaluate_nu_direct,
    fv_assignments,
    is_predicate,
    is_tautology,
    models,
    propositional_skeleton,
    satisfies,
)
from .proof import (
    AuditReport,
    CheckReport,
    ForwardReference,
    Justification,
    LineVerdict,
    NotTautEquiv,
    ProofLine,
    ProofScript,
    ProofSyntaxError,
    UnknownHypothesis,
    audit_soundness,
    check_proof,
    derived_taut_equiv,
    format_audit,
    format_report,
    parse_proof,
)

__version__ = "0.1.0"
