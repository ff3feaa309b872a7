"""proviso: a defeasible rule engine.

Rules derive a head proposition from ALL/ANY conditions unless one of
their exceptions can be established; evaluation is goal-driven with
negation as failure, and the exploration order (exceptions first,
conditions first, or racing both) is an execution policy that never
changes the verdict.
"""

from .errors import (
    BadIdentifier,
    CyclicDependency,
    DegenerateParams,
    DuplicateEntry,
    DuplicateHead,
    EngineError,
    GuardTripped,
    NonPropositional,
    OrphanException,
    ParseError,
    SchemaError,
    SelfReference,
    TooManyLeaves,
    UnknownStrategy,
    UnsupportedShape,
)
from .model import (
    CaseQuery,
    FactBase,
    Operator,
    Rule,
    RuleBase,
    check_identifier,
    fact_base,
    find_cycles,
    leaves,
    make_rule,
    rule_base_from_rules,
)
from .loader import (
    Diagnostic,
    Severity,
    detect_cycles,
    has_errors,
    parse_fact_file,
    parse_rule_file,
    serialize_rule_base,
    validate,
)
from .reasoner import (
    DEFAULT_STRATEGY,
    EvalStats,
    NodeStatus,
    ProofNode,
    Strategy,
    TraceFormat,
    Verdict,
    evaluate,
    evaluate_case,
    explain,
    proof_to_dict,
)
from .lab import (
    DiffOutcome,
    DiffReport,
    GenParams,
    bench,
    differential_run,
    generate_rulebase,
    sample_facts,
    suggest_goal,
)
from .proleg import export_proleg, import_proleg, semantic_equivalence

__version__ = "0.1.0"
