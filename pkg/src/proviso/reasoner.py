"""Goal-driven evaluation of defeasible rules.

The verdict semantics for a proposition q are fixed and independent of the
evaluation strategy:

  1. q is in the fact base          -> q holds (ESTABLISHED_FACT)
  2. q has a rule R:
       - if any exception of R is derivable, q is DEFEATED (does not hold);
       - otherwise R.op over R.conditions decides: ALL requires every
         condition to hold (vacuously satisfied when the list is empty),
         ANY requires at least one (never satisfied when empty).
         The outcome is PROVED or FAILED.
  3. q has no rule and is not a fact -> NO_DERIVATION (negation as failure)

The strategy only picks the order in which the exception and condition
branches are explored -- or races them on two workers -- which changes the
trace shape and the amount of work done, never whether q holds.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from enum import Enum

from .errors import GuardTripped, UnknownStrategy
from .model import CaseQuery, FactBase, Operator, Rule, RuleBase, check_identifier


class Strategy(Enum):
    """Evaluation order: an execution policy, not part of the rule meaning."""

    EXCEPTION_FIRST = "EXCEPTION_FIRST"
    CONDITIONS_FIRST = "CONDITIONS_FIRST"
    RACING = "RACING"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        """Accepts enum names case-insensitively, with '-' or '_' separators."""
        if isinstance(name, Strategy):
            return name
        try:
            return cls[str(name).strip().upper().replace("-", "_")]
        except KeyError:
            raise UnknownStrategy(f"unknown strategy: {name!r}") from None


DEFAULT_STRATEGY = Strategy.EXCEPTION_FIRST


class NodeStatus(Enum):
    ESTABLISHED_FACT = "ESTABLISHED_FACT"
    PROVED = "PROVED"
    FAILED = "FAILED"
    DEFEATED = "DEFEATED"
    NO_DERIVATION = "NO_DERIVATION"
    CYCLE_GUARD = "CYCLE_GUARD"


HOLDING_STATUSES = frozenset({NodeStatus.ESTABLISHED_FACT, NodeStatus.PROVED})

VIA_FACT = "FACT"
VIA_NONE = "NONE"

ORDER_EXCEPTIONS_FIRST = "EXCEPTIONS_FIRST"
ORDER_CONDITIONS_FIRST = "CONDITIONS_FIRST"
ORDER_RACED = "RACED"
ORDER_CACHED = "CACHED"


def _via_rule(op: Operator) -> str:
    return f"RULE({op.value})"


def status_holds(status: NodeStatus) -> bool:
    return status in HOLDING_STATUSES


@dataclass
class ProofNode:
    """One step of the derivation trace.

    `via` records what resolved the proposition ("FACT", "RULE(ALL)",
    "RULE(ANY)", or "NONE"). `order_note` records which branch of a rule was
    explored first, "RACED" when the branches ran concurrently, or "CACHED"
    for a node answered from the per-query memo (cached nodes are stubs and
    carry no children).
    """

    proposition: str
    status: NodeStatus
    via: str
    order_note: str | None
    condition_children: list["ProofNode"] = field(default_factory=list)
    exception_children: list["ProofNode"] = field(default_factory=list)

    def holds(self) -> bool:
        return status_holds(self.status)

    def cached(self) -> bool:
        return self.order_note == ORDER_CACHED


@dataclass
class EvalStats:
    """Work counters for one evaluate() call; the platform-independent cost metric."""

    propositions_evaluated: int = 0
    rule_expansions: int = 0
    fact_lookups: int = 0
    strategy: Strategy = DEFAULT_STRATEGY


@dataclass
class Verdict:
    goal: str
    holds: bool
    root: ProofNode
    stats: EvalStats


class _Aborted(Exception):
    """Internal: a racing branch was cancelled by a decisive sibling result."""


class _Session:
    """State for one evaluate() call: memo table, counters, worker budget."""

    def __init__(self, rb: RuleBase, facts: FactBase, strategy: Strategy,
                 max_workers: int):
        self.rb = rb
        self.facts = facts
        self.strategy = strategy
        self.stats = EvalStats(strategy=strategy)
        self._memo: dict[str, ProofNode] = {}
        self._lock = threading.Lock()
        spare = max(0, max_workers - 1) if strategy is Strategy.RACING else 0
        self._spare_workers = threading.Semaphore(spare) if spare else None

    # -- core recursion ----------------------------------------------------

    def prove(self, p: str, path: tuple[str, ...],
              cancel: tuple[threading.Event, ...]) -> ProofNode:
        for ev in cancel:
            if ev.is_set():
                raise _Aborted
        with self._lock:
            done = self._memo.get(p)
        if done is not None:
            # Memo hits cost nothing and appear in the trace as marked stubs.
            return ProofNode(p, done.status, done.via, ORDER_CACHED)
        if p in path:
            node = ProofNode(p, NodeStatus.CYCLE_GUARD, VIA_NONE, None)
            raise GuardTripped(
                "cycle guard: " + " -> ".join(path + (p,)),
                proposition=p, path=path, node=node)
        with self._lock:
            self.stats.propositions_evaluated += 1
            self.stats.fact_lookups += 1
        if p in self.facts:
            # Fact lookup short-circuits before any rule for p is considered.
            node = ProofNode(p, NodeStatus.ESTABLISHED_FACT, VIA_FACT, None)
        else:
            rule = self.rb.rules.get(p)
            if rule is None:
                node = ProofNode(p, NodeStatus.NO_DERIVATION, VIA_NONE, None)
            else:
                with self._lock:
                    self.stats.rule_expansions += 1
                node = self._expand(rule, path + (p,), cancel)
        with self._lock:
            self._memo.setdefault(p, node)
        return node

    def _expand(self, rule: Rule, path: tuple[str, ...],
                cancel: tuple[threading.Event, ...]) -> ProofNode:
        if self.strategy is Strategy.CONDITIONS_FIRST:
            return self._conditions_first(rule, path, cancel)
        if (self.strategy is Strategy.RACING and rule.exceptions and rule.conditions
                and self._spare_workers is not None
                and self._spare_workers.acquire(blocking=False)):
            try:
                return self._raced(rule, path, cancel)
            finally:
                self._spare_workers.release()
        return self._exceptions_first(rule, path, cancel)

    def _exceptions_first(self, rule, path, cancel) -> ProofNode:
        via = _via_rule(rule.op)
        exc_children: list[ProofNode] = []
        for e in rule.exceptions:
            child = self.prove(e, path, cancel)
            exc_children.append(child)
            if child.holds():
                return ProofNode(rule.p, NodeStatus.DEFEATED, via,
                                 ORDER_EXCEPTIONS_FIRST,
                                 exception_children=exc_children)
        cond_children: list[ProofNode] = []
        satisfied = self._conditions_into(rule, path, cancel, cond_children)
        status = NodeStatus.PROVED if satisfied else NodeStatus.FAILED
        return ProofNode(rule.p, status, via, ORDER_EXCEPTIONS_FIRST,
                         cond_children, exc_children)

    def _conditions_first(self, rule, path, cancel) -> ProofNode:
        via = _via_rule(rule.op)
        cond_children: list[ProofNode] = []
        satisfied = self._conditions_into(rule, path, cancel, cond_children)
        if not satisfied:
            # Rule does not apply; the exception branch is never explored.
            return ProofNode(rule.p, NodeStatus.FAILED, via,
                             ORDER_CONDITIONS_FIRST, cond_children)
        exc_children: list[ProofNode] = []
        for e in rule.exceptions:
            child = self.prove(e, path, cancel)
            exc_children.append(child)
            if child.holds():
                return ProofNode(rule.p, NodeStatus.DEFEATED, via,
                                 ORDER_CONDITIONS_FIRST, cond_children,
                                 exc_children)
        return ProofNode(rule.p, NodeStatus.PROVED, via,
                         ORDER_CONDITIONS_FIRST, cond_children, exc_children)

    def _conditions_into(self, rule, path, cancel,
                         children: list[ProofNode]) -> bool:
        """Evaluate conditions under rule.op with short-circuiting.

        Appends into `children` so partial work survives a racing abort.
        """
        if rule.op is Operator.ALL:
            for c in rule.conditions:
                child = self.prove(c, path, cancel)
                children.append(child)
                if not child.holds():
                    return False
            return True
        for c in rule.conditions:
            child = self.prove(c, path, cancel)
            children.append(child)
            if child.holds():
                return True
        return False

    def _raced(self, rule, path, cancel) -> ProofNode:
        """Evaluate the exception and condition branches on two workers.

        Combination rule: the head holds iff the conditions are satisfied
        and no exception holds. A holding exception makes DEFEATED final
        without waiting for the conditions; failed conditions make FAILED
        final without waiting for the exceptions; PROVED requires both
        branches to complete. The verdict is deterministic, the trace and
        counters are not.
        """
        via = _via_rule(rule.op)
        decided = threading.Event()
        chain = cancel + (decided,)
        box: dict[str, object] = {"nodes": [], "found": None, "done": False}

        def scan_exceptions() -> None:
            nodes: list[ProofNode] = []
            box["nodes"] = nodes
            try:
                for e in rule.exceptions:
                    child = self.prove(e, path, chain)
                    nodes.append(child)
                    if child.holds():
                        box["found"] = True
                        box["done"] = True
                        decided.set()
                        return
                box["found"] = False
                box["done"] = True
            except _Aborted:
                pass
            except BaseException as err:  # surfaced in the combining thread
                box["error"] = err
                decided.set()

        worker = threading.Thread(target=scan_exceptions, daemon=True)
        worker.start()
        cond_children: list[ProofNode] = []
        cond_sat: bool | None
        try:
            cond_sat = self._conditions_into(rule, path, chain, cond_children)
        except _Aborted:
            cond_sat = None
        if cond_sat is False:
            decided.set()
        worker.join()
        err = box.get("error")
        if err is not None:
            raise err  # GuardTripped and friends from the worker thread
        for ev in cancel:
            if ev.is_set():  # an ancestor race already decided; unwind
                raise _Aborted
        exc_children = list(box["nodes"])  # type: ignore[arg-type]
        if box["found"] is True:
            return ProofNode(rule.p, NodeStatus.DEFEATED, via, ORDER_RACED,
                             cond_children, exc_children)
        if cond_sat is False:
            return ProofNode(rule.p, NodeStatus.FAILED, via, ORDER_RACED,
                             cond_children, exc_children)
        if cond_sat is True and box["found"] is False:
            return ProofNode(rule.p, NodeStatus.PROVED, via, ORDER_RACED,
                             cond_children, exc_children)
        raise RuntimeError("racing combiner reached an undecidable state")


def evaluate(rb: RuleBase, facts: FactBase, goal: str,
             strategy: Strategy | str = DEFAULT_STRATEGY, *,
             max_workers: int = 2) -> Verdict:
    """Evaluate `goal` against a rule base and case facts.

    The rule base must have passed validation (acyclic); a runtime guard
    raises GuardTripped if a cycle is encountered anyway. `strategy` may be
    given as a Strategy or its name. `max_workers` caps the total number of
    concurrent logical workers used by the RACING strategy.
    """
    strategy = Strategy.parse(strategy)
    check_identifier(goal)
    session = _Session(rb, facts, strategy, max_workers)
    root = session.prove(goal, (), ())
    return Verdict(goal=goal, holds=root.holds(), root=root, stats=session.stats)


def evaluate_case(rb: RuleBase, query: CaseQuery, *, max_workers: int = 2) -> Verdict:
    return evaluate(rb, query.facts, query.goal, query.strategy,
                    max_workers=max_workers)


# -- trace rendering -------------------------------------------------------


class TraceFormat(Enum):
    TEXT = "text"
    STRUCTURED = "structured"


def proof_to_dict(node: ProofNode) -> dict:
    """The structured trace document; keys are part of the wire contract."""
    return {
        "proposition": node.proposition,
        "status": node.status.value,
        "via": node.via,
        "order_note": node.order_note,
        "conditions": [proof_to_dict(c) for c in node.condition_children],
        "exceptions": [proof_to_dict(e) for e in node.exception_children],
    }


def structured_bytes(node: ProofNode) -> bytes:
    """Canonical serialization of the structured trace (shared by CLI and HTTP)."""
    return json.dumps(proof_to_dict(node), indent=2).encode("utf-8")


def explain(verdict: Verdict, fmt: TraceFormat = TraceFormat.TEXT) -> bytes:
    """Render the proof tree: TEXT as an indented tree with one
    `proposition [STATUS] (via)` line per node, STRUCTURED as JSON."""
    if fmt is TraceFormat.STRUCTURED:
        return structured_bytes(verdict.root)
    lines: list[str] = []
    _render_text(verdict.root, 0, lines)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _render_text(node: ProofNode, depth: int, lines: list[str]) -> None:
    marker = node.via + (", cached" if node.cached() else "")
    lines.append(f"{'  ' * depth}{node.proposition} [{node.status.value}] ({marker})")
    if node.order_note == ORDER_CONDITIONS_FIRST:
        ordered = node.condition_children + node.exception_children
    else:
        ordered = node.exception_children + node.condition_children
    for child in ordered:
        _render_text(child, depth + 1, lines)
