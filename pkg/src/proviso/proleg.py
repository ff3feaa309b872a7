"""Bridge to propositional logic-programming clause text.

Grammar (one statement per line, `%` starts a comment, terminal period):

    head.                       unit clause      <-> ALL rule, no conditions
    head :- a, b, c.            multi-atom body  <-> ALL rule
    head :- a.  (repeated)      one-atom bodies  <-> one ANY rule per head
    exception(head, e).         defeater         <-> entry in the rule's exceptions

All atoms are arity-0. Arguments or variables anywhere raise
NonPropositional rather than translating lossily. An ANY rule with no
conditions is underivable and exports nothing at all (emitting only its
exception declarations would orphan them on re-import).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import (
    NonPropositional,
    OrphanException,
    ParseError,
    TooManyLeaves,
    UnsupportedShape,
)
from .loader import Diagnostic, validate
from .model import (
    IDENTIFIER_PATTERN,
    Operator,
    RuleBase,
    fact_base,
    leaves,
    make_rule,
)
from .reasoner import evaluate

_EXCEPTION_LINE = re.compile(r"^exception\((.*)\)$")
_ATOM_WITH_ARGS = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*\(")


@dataclass
class ClauseDoc:
    """Parsed clause text: plain clauses plus exception declarations."""

    clauses: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)
    exception_decls: list[tuple[str, str]] = field(default_factory=list)


def export_proleg(rb: RuleBase) -> bytes:
    """Render a rule base as clause text, heads sorted, list order preserved.

    ALL becomes a single clause (a unit clause when there are no
    conditions); ANY becomes one single-atom clause per condition; each
    exception becomes an `exception/2` declaration after its head's clauses.
    """
    lines: list[str] = []
    for head in sorted(rb.rules):
        rule = rb.rules[head]
        if rule.op is Operator.ALL:
            if rule.conditions:
                lines.append(f"{head} :- {', '.join(rule.conditions)}.")
            else:
                lines.append(f"{head}.")
        else:
            if not rule.conditions:
                continue  # underivable head: no clause, and no orphan exceptions
            for c in rule.conditions:
                lines.append(f"{head} :- {c}.")
        for e in rule.exceptions:
            lines.append(f"exception({head}, {e}).")
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")


def _check_atom(token: str, where: str) -> str:
    token = token.strip()
    if IDENTIFIER_PATTERN.match(token):
        return token
    if _ATOM_WITH_ARGS.match(token) or token[:1].isupper() or token[:1] == "_":
        raise NonPropositional(
            f"{where}: {token!r} carries arguments or variables; "
            "only arity-0 atoms are supported")
    raise ParseError(f"{where}: cannot read atom {token!r}")


def parse_clause_text(content: bytes | str) -> ClauseDoc:
    """Parse clause text into a ClauseDoc without interpreting it."""
    if isinstance(content, bytes):
        try:
            text = content.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"input is not valid UTF-8: {e}") from None
    else:
        text = content
    doc = ClauseDoc()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if not line.endswith("."):
            raise ParseError(f"{where}: missing terminal period")
        stmt = line[:-1].strip()
        m = _EXCEPTION_LINE.match(stmt)
        if m is not None:
            args = [a.strip() for a in m.group(1).split(",")]
            if len(args) != 2:
                raise ParseError(f"{where}: exception/2 takes exactly two atoms")
            head = _check_atom(args[0], where)
            exc = _check_atom(args[1], where)
            doc.exception_decls.append((head, exc))
            continue
        if ":-" in stmt:
            head_txt, body_txt = stmt.split(":-", 1)
            head = _check_atom(head_txt, where)
            body = tuple(_check_atom(a, where) for a in body_txt.split(","))
            if not body:
                raise ParseError(f"{where}: empty clause body")
            doc.clauses.append((head, body))
        else:
            head = _check_atom(stmt, where)
            doc.clauses.append((head, ()))
    return doc


def import_proleg(content: bytes | str) -> tuple[RuleBase | None, list[Diagnostic]]:
    """Rebuild rules from clause text.

    Folding: one-atom clauses sharing a head become a single ANY rule in
    order of appearance; a lone multi-atom clause becomes an ALL rule; a
    unit clause becomes an ALL rule with no conditions. A head mixing those
    shapes is outside the exporter's image and raises UnsupportedShape.
    The result goes through the standard validator, so diagnostics (and a
    None rule base on ERROR findings) follow the loader's conventions.
    """
    doc = parse_clause_text(content)
    by_head: dict[str, list[tuple[str, ...]]] = {}
    for head, body in doc.clauses:
        by_head.setdefault(head, []).append(body)
    exceptions: dict[str, list[str]] = {}
    for head, exc in doc.exception_decls:
        if head not in by_head:
            raise OrphanException(
                f"exception declared for {head!r}, which has no clause")
        bucket = exceptions.setdefault(head, [])
        if exc not in bucket:
            bucket.append(exc)
    rules = []
    for head, bodies in by_head.items():
        excs = exceptions.get(head, [])
        if len(bodies) == 1 and len(bodies[0]) != 1:
            # unit clause -> vacuous ALL; multi-atom body -> conjunction
            rules.append(make_rule(head, Operator.ALL, bodies[0], excs))
            continue
        if all(len(b) == 1 for b in bodies):
            seen: dict[str, None] = {}
            for b in bodies:
                seen.setdefault(b[0])
            rules.append(make_rule(head, Operator.ANY, tuple(seen), excs))
            continue
        raise UnsupportedShape(
            f"head {head!r} mixes multi-atom and other clause forms")
    return validate(rules)


def semantic_equivalence(rb1: RuleBase, rb2: RuleBase, goal: str,
                         max_leaves: int = 15) -> bool:
    """Exhaustively compare two rule bases on one goal.

    True iff for every subset S of the union of both leaf sets,
    evaluating the goal under S yields the same verdict in both bases.
    Refuses (TooManyLeaves) when the union exceeds `max_leaves`.
    """
    union = sorted(leaves(rb1) | leaves(rb2))
    if len(union) > max_leaves:
        raise TooManyLeaves(len(union), max_leaves)
    for r in range(len(union) + 1):
        for subset in itertools.combinations(union, r):
            facts = fact_base(subset)
            if evaluate(rb1, facts, goal).holds != evaluate(rb2, facts, goal).holds:
                return False
    return True
