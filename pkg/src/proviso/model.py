"""Core domain types: propositions, ALL/ANY rules with exception lists,
rule bases, and per-case fact bases.

Pure data, no I/O. Everything here is immutable after construction and
safe to share across concurrently running evaluations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .errors import (
    BadIdentifier,
    CyclicDependency,
    DuplicateEntry,
    DuplicateHead,
    SelfReference,
)

if TYPE_CHECKING:
    from .reasoner import Strategy

IDENTIFIER_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")


def check_identifier(value: str) -> str:
    """Return `value` unchanged if it is a valid proposition identifier.

    Identifiers are snake_case: one lowercase letter followed by lowercase
    letters, digits, or underscores. Anything else raises BadIdentifier.
    """
    if not isinstance(value, str) or not IDENTIFIER_PATTERN.match(value):
        raise BadIdentifier(f"not a valid proposition identifier: {value!r}")
    return value


class Operator(Enum):
    """How a rule combines its conditions: conjunctive ALL or disjunctive ANY."""

    ALL = "ALL"
    ANY = "ANY"


@dataclass(frozen=True)
class Rule:
    """One defeasible rule.

    `p` is derivable when `op` over `conditions` is satisfied, unless any
    proposition in `exceptions` can itself be derived, in which case `p`
    is defeated.

    Construction enforces the local invariants: valid identifiers, no
    duplicates within either list, and no direct self-reference.
    """

    p: str
    op: Operator
    conditions: tuple[str, ...]
    exceptions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "exceptions", tuple(self.exceptions))
        check_identifier(self.p)
        if not isinstance(self.op, Operator):
            raise TypeError(f"op must be an Operator, got {self.op!r}")
        for label, group in (("conditions", self.conditions),
                             ("exceptions", self.exceptions)):
            seen: set[str] = set()
            for q in group:
                check_identifier(q)
                if q == self.p:
                    raise SelfReference(
                        f"rule {self.p!r} references itself in its {label}")
                if q in seen:
                    raise DuplicateEntry(
                        f"duplicate identifier {q!r} in {label} of rule {self.p!r}")
                seen.add(q)

    def referenced(self) -> tuple[str, ...]:
        """All propositions this rule mentions, in order, deduplicated."""
        return tuple(dict.fromkeys(self.conditions + self.exceptions))


def make_rule(p: str, op: Operator, conditions: Sequence[str],
              exceptions: Sequence[str]) -> Rule:
    """Build a Rule, raising BadIdentifier / DuplicateEntry / SelfReference."""
    return Rule(p=p, op=op, conditions=tuple(conditions), exceptions=tuple(exceptions))


@dataclass(frozen=True)
class FactBase:
    """Propositions asserted true for one case.

    Set semantics; membership testing is the only query the engine performs.
    """

    facts: frozenset[str] = frozenset()

    def __contains__(self, p: str) -> bool:
        return p in self.facts

    def __iter__(self):
        return iter(sorted(self.facts))

    def __len__(self) -> int:
        return len(self.facts)


def fact_base(props: Iterable[str]) -> FactBase:
    """Build a FactBase, validating identifiers and collapsing duplicates."""
    return FactBase(frozenset(check_identifier(p) for p in props))


@dataclass(frozen=True)
class RuleBase:
    """Rules indexed by head, plus head -> referenced-proposition edges.

    Build through `rule_base_from_rules`, which rejects duplicate heads and
    cyclic dependencies. Direct construction performs no checks and exists
    for internal and test use only.
    """

    rules: dict[str, Rule] = field(default_factory=dict)
    graph: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def heads(self) -> frozenset[str]:
        return frozenset(self.rules)

    def referenced(self) -> frozenset[str]:
        return frozenset(q for refs in self.graph.values() for q in refs)

    def __len__(self) -> int:
        return len(self.rules)


def rule_base_from_rules(rules: Sequence[Rule]) -> RuleBase:
    """Index rules by head and build the dependency graph.

    Raises DuplicateHead if two rules share a head and CyclicDependency if
    the reference graph has a cycle (the first cycle found is reported).
    """
    index: dict[str, Rule] = {}
    for r in rules:
        if r.p in index:
            raise DuplicateHead(r.p)
        index[r.p] = r
    graph = {p: r.referenced() for p, r in index.items()}
    cycles = find_cycles(graph)
    if cycles:
        raise CyclicDependency(cycles[0])
    return RuleBase(rules=index, graph=graph)


def leaves(rb: RuleBase) -> frozenset[str]:
    """Propositions referenced by some rule but defined by none.

    These are the fact-level inputs of the rule base: they can only be
    established through a case's fact base.
    """
    return rb.referenced() - rb.heads()


def find_cycles(edges: Mapping[str, Sequence[str]]) -> list[list[str]]:
    """Depth-first search for cycles in a directed graph.

    Returns one path per back edge found, each starting and ending at the
    same node. The result is empty iff the graph is acyclic. Traversal
    order follows the mapping's iteration order, so output is deterministic
    for a given input.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    path: list[str] = []
    cycles: list[list[str]] = []

    def visit(u: str) -> None:
        color[u] = GRAY
        path.append(u)
        for v in edges.get(u, ()):
            state = color.get(v, WHITE)
            if state == GRAY:
                cycles.append(path[path.index(v):] + [v])
            elif state == WHITE:
                visit(v)
        path.pop()
        color[u] = BLACK

    for u in edges:
        if color.get(u, WHITE) == WHITE:
            visit(u)
    return cycles


@dataclass(frozen=True)
class CaseQuery:
    """One evaluation request: a goal, the case facts, and a strategy."""

    goal: str
    facts: FactBase
    strategy: "Strategy"

    def __post_init__(self):
        check_identifier(self.goal)
