"""Parsing, serialization, and static validation of rule and fact files.

A rule file is a UTF-8 JSON array of rule objects with exactly the keys
"p", "op", "conditions", "exceptions"; "op" is the case-sensitive string
"ALL" or "ANY", and both lists are mandatory even when empty. A fact file
is a UTF-8 JSON array of proposition identifier strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import ParseError, SchemaError
from .model import (
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

RULE_KEYS = ("p", "op", "conditions", "exceptions")


class Severity(Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"


_SEVERITY_RANK = {Severity.ERROR: 0, Severity.WARNING: 1, Severity.INFO: 2}


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. ERROR findings prevent producing a RuleBase."""

    severity: Severity
    code: str
    subject: str
    message: str

    def render(self) -> str:
        return f"{self.severity.value} {self.code} {self.subject}: {self.message}"


def has_errors(diagnostics: Sequence[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def _decode(content: bytes | str) -> str:
    if isinstance(content, bytes):
        try:
            return content.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"input is not valid UTF-8: {e}") from None
    return content


def _load_json(content: bytes | str):
    try:
        return json.loads(_decode(content))
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from None


def parse_rule_file(content: bytes | str) -> list[Rule]:
    """Parse a rule file, strictly.

    Unknown keys, missing keys, non-string list elements, and a lowercase
    or otherwise non-canonical "op" are all rejected with SchemaError;
    malformed JSON raises ParseError; invalid identifiers raise
    BadIdentifier.
    """
    data = _load_json(content)
    if not isinstance(data, list):
        raise SchemaError("a rule file must be a JSON array of rule objects")
    rules: list[Rule] = []
    for i, obj in enumerate(data):
        where = f"rule #{i}"
        if not isinstance(obj, dict):
            raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
        missing = [k for k in RULE_KEYS if k not in obj]
        extra = [k for k in obj if k not in RULE_KEYS]
        if missing:
            raise SchemaError(f"{where}: missing key(s) {missing}")
        if extra:
            raise SchemaError(f"{where}: unknown key(s) {extra}")
        if not isinstance(obj["p"], str):
            raise SchemaError(f"{where}: \"p\" must be a string")
        op = obj["op"]
        if op not in ("ALL", "ANY"):
            raise SchemaError(f"{where}: \"op\" must be exactly \"ALL\" or \"ANY\", got {op!r}")
        for key in ("conditions", "exceptions"):
            val = obj[key]
            if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
                raise SchemaError(f"{where}: \"{key}\" must be an array of strings")
        rules.append(make_rule(obj["p"], Operator[op], obj["conditions"], obj["exceptions"]))
    return rules


def parse_fact_file(content: bytes | str) -> tuple[FactBase, list[Diagnostic]]:
    """Parse a fact file.

    Duplicates are collapsed and reported as WARNING diagnostics rather
    than errors, hence the diagnostic list in the return value.
    """
    data = _load_json(content)
    if not isinstance(data, list):
        raise SchemaError("a fact file must be a JSON array of strings")
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    for x in data:
        if not isinstance(x, str):
            raise SchemaError(f"fact entries must be strings, got {type(x).__name__}")
        check_identifier(x)
        if x in seen:
            diagnostics.append(Diagnostic(
                Severity.WARNING, "DuplicateFact", x,
                "fact listed more than once; duplicates are collapsed"))
        seen.add(x)
    return fact_base(seen), diagnostics


def detect_cycles(rules: Sequence[Rule]) -> list[list[str]]:
    """Cycle paths in the reference graph of a rule list.

    Works on raw rule lists (before RuleBase construction), so duplicate
    heads are tolerated here: their references are merged. Empty result
    iff the graph is acyclic.
    """
    edges: dict[str, list[str]] = {}
    for r in rules:
        bucket = edges.setdefault(r.p, [])
        for q in r.referenced():
            if q not in bucket:
                bucket.append(q)
    return find_cycles(edges)


def validate(rules: Sequence[Rule],
             facts: FactBase | None = None) -> tuple[RuleBase | None, list[Diagnostic]]:
    """Static checks over a candidate rule base.

    Returns the RuleBase iff no ERROR diagnostic was emitted. WARNING and
    INFO findings never block. Diagnostics are sorted by severity, then
    subject, then code, so output is stable.
    """
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    duplicates: set[str] = set()
    for r in rules:
        if r.p in seen:
            duplicates.add(r.p)
        seen.add(r.p)
    for head in duplicates:
        diagnostics.append(Diagnostic(
            Severity.ERROR, "DuplicateHead", head,
            "more than one rule defines this proposition"))
    for cycle in detect_cycles(rules):
        diagnostics.append(Diagnostic(
            Severity.ERROR, "CyclicDependency", " -> ".join(cycle),
            "rules depend on each other in a cycle"))
    if facts is not None:
        for head in sorted(seen):
            if head in facts:
                diagnostics.append(Diagnostic(
                    Severity.WARNING, "FactShadowsRule", head,
                    "a fact asserts a rule head; fact-first lookup will bypass "
                    "the rule and its exceptions"))
    referenced: dict[str, None] = {}
    for r in rules:
        for q in r.referenced():
            referenced.setdefault(q)
    for q in referenced:
        if q not in seen:
            diagnostics.append(Diagnostic(
                Severity.INFO, "DanglingReference", q,
                "no rule derives this proposition; it can only be satisfied "
                "by a case fact"))
    diagnostics.sort(key=lambda d: (_SEVERITY_RANK[d.severity], d.subject, d.code))
    if has_errors(diagnostics):
        return None, diagnostics
    return rule_base_from_rules(list(rules)), diagnostics


def rule_to_obj(rule: Rule) -> dict:
    return {
        "p": rule.p,
        "op": rule.op.value,
        "conditions": list(rule.conditions),
        "exceptions": list(rule.exceptions),
    }


def serialize_rule_base(rb: RuleBase) -> bytes:
    """Serialize to the rule-file format: heads in sorted order, list order
    preserved. Reparsing the output reproduces the rule base."""
    objs = [rule_to_obj(rb.rules[p]) for p in sorted(rb.rules)]
    return (json.dumps(objs, indent=2) + "\n").encode("utf-8")


__all__ = [
    "Diagnostic",
    "Severity",
    "detect_cycles",
    "has_errors",
    "leaves",
    "parse_fact_file",
    "parse_rule_file",
    "rule_to_obj",
    "serialize_rule_base",
    "validate",
]
