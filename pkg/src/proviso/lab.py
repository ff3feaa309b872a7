"""Random rule-base generation, differential strategy testing, and cost reports.

The generator builds layered DAGs: every proposition lives on a level,
leaves on level 0, and a rule only references strictly lower levels, so
acyclicity holds by construction instead of generate-and-reject.
"""

from __future__ import annotations

import csv
import random
import statistics
from dataclasses import dataclass, field, replace
from typing import IO, Iterable

from .errors import DegenerateParams
from .model import FactBase, Operator, RuleBase, fact_base, leaves, make_rule, rule_base_from_rules
from .reasoner import EvalStats, Strategy, evaluate

ALL_STRATEGIES = (Strategy.EXCEPTION_FIRST, Strategy.CONDITIONS_FIRST, Strategy.RACING)


@dataclass(frozen=True)
class GenParams:
    """Knobs for the rule-base generator. Deterministic in `seed`."""

    n_rules: int = 12
    max_conditions: int = 3
    max_exceptions: int = 2
    max_depth: int = 4
    p_any: float = 0.5
    p_fact: float = 0.4
    seed: int = 0

    def __post_init__(self):
        for name in ("n_rules", "max_conditions", "max_exceptions", "max_depth"):
            if getattr(self, name) < 0:
                raise DegenerateParams(f"{name} must be >= 0")
        for name in ("p_any", "p_fact"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DegenerateParams(f"{name} must be within [0, 1]")


def generate_rulebase(params: GenParams) -> RuleBase:
    """Generate an acyclic rule base; same params give a structurally
    identical result."""
    if params.n_rules == 0:
        return rule_base_from_rules([])
    rng = random.Random(params.seed)
    n_leaves = rng.randint(2, max(3, params.n_rules))
    leaf_pool = [f"f{i}" for i in range(n_leaves)]
    heads = [f"r{i}" for i in range(params.n_rules)]
    top = max(1, params.max_depth)
    level = {h: rng.randint(1, top) for h in heads}
    rules = []
    for h in heads:
        pool = leaf_pool + [g for g in heads if level[g] < level[h]]
        n_cond = min(rng.randint(0, params.max_conditions), len(pool))
        conditions = rng.sample(pool, n_cond)
        n_exc = min(rng.randint(0, params.max_exceptions), len(pool))
        exceptions = rng.sample(pool, n_exc)
        op = Operator.ANY if rng.random() < params.p_any else Operator.ALL
        rules.append(make_rule(h, op, conditions, exceptions))
    return rule_base_from_rules(rules)


def dependency_depth(rb: RuleBase, p: str, _memo: dict | None = None) -> int:
    """Longest reference chain from `p` down to a leaf (0 for leaves)."""
    memo = _memo if _memo is not None else {}
    if p in memo:
        return memo[p]
    refs = rb.graph.get(p, ())
    memo[p] = 1 + max((dependency_depth(rb, q, memo) for q in refs), default=-1) \
        if refs else 0
    return memo[p]


def suggest_goal(rb: RuleBase) -> str:
    """The topmost rule head: maximizes the reasoning depth a query exercises."""
    if not rb.rules:
        raise DegenerateParams("cannot pick a goal from an empty rule base")
    memo: dict[str, int] = {}
    return max(rb.rules, key=lambda h: (dependency_depth(rb, h, memo), h))


def sample_facts(rb: RuleBase, p_fact: float, seed: int) -> FactBase:
    """A random subset of the rule base's leaves; never includes a rule head."""
    rng = random.Random(seed)
    return fact_base(p for p in sorted(leaves(rb)) if rng.random() < p_fact)


@dataclass
class DiffOutcome:
    """Per-strategy results of one differential run."""

    goal: str
    holds: dict[Strategy, bool]
    stats: dict[Strategy, EvalStats]

    @property
    def mismatch(self) -> bool:
        return len(set(self.holds.values())) > 1


def differential_run(rb: RuleBase, facts: FactBase, goal: str) -> DiffOutcome:
    """Evaluate the goal under every strategy and compare the verdicts.

    Mismatches are data for the report, not exceptions: tests fail on them.
    """
    holds: dict[Strategy, bool] = {}
    stats: dict[Strategy, EvalStats] = {}
    for strategy in ALL_STRATEGIES:
        verdict = evaluate(rb, facts, goal, strategy)
        holds[strategy] = verdict.holds
        stats[strategy] = verdict.stats
    return DiffOutcome(goal=goal, holds=holds, stats=stats)


@dataclass(frozen=True)
class CostSummary:
    mean: float
    min: int
    max: int


@dataclass
class TrialRow:
    trial: int
    seed: int
    goal: str
    holds: bool
    counts: dict[Strategy, EvalStats]


@dataclass
class DiffReport:
    trials: int
    mismatches: list[tuple[int, str, dict[Strategy, bool]]] = field(default_factory=list)
    stats_by_strategy: dict[Strategy, CostSummary] = field(default_factory=dict)
    rows: list[TrialRow] = field(default_factory=list)


def _trial_seed(base: int, trial: int) -> int:
    return (base * 1_000_003 + trial) & 0x7FFF_FFFF_FFFF_FFFF


def bench(params: GenParams, trials: int) -> DiffReport:
    """Run `trials` generated (rule base, facts, goal) triples through
    differential_run and aggregate costs. Deterministic in params.seed for
    the non-RACING strategies."""
    if trials < 1:
        raise DegenerateParams("trials must be >= 1")
    report = DiffReport(trials=trials)
    for t in range(trials):
        seed = _trial_seed(params.seed, t)
        rb = generate_rulebase(replace(params, seed=seed))
        facts = sample_facts(rb, params.p_fact, _trial_seed(seed, 1))
        goal = suggest_goal(rb)
        outcome = differential_run(rb, facts, goal)
        if outcome.mismatch:
            report.mismatches.append((seed, goal, dict(outcome.holds)))
        report.rows.append(TrialRow(
            trial=t, seed=seed, goal=goal,
            holds=outcome.holds[Strategy.EXCEPTION_FIRST],
            counts=outcome.stats))
    for strategy in ALL_STRATEGIES:
        values = [row.counts[strategy].propositions_evaluated for row in report.rows]
        report.stats_by_strategy[strategy] = CostSummary(
            mean=statistics.fmean(values), min=min(values), max=max(values))
    return report


def _strategy_slug(strategy: Strategy) -> str:
    return strategy.value.lower()


def csv_header() -> list[str]:
    header = ["trial", "seed", "goal", "holds"]
    for strategy in ALL_STRATEGIES:
        slug = _strategy_slug(strategy)
        header += [f"{slug}_propositions_evaluated",
                   f"{slug}_rule_expansions",
                   f"{slug}_fact_lookups"]
    return header


def write_csv(report: DiffReport, out: IO[str]) -> None:
    """One row per trial: identity columns, then per-strategy cost counters."""
    writer = csv.writer(out)
    writer.writerow(csv_header())
    for row in report.rows:
        record: list = [row.trial, row.seed, row.goal, str(row.holds).lower()]
        for strategy in ALL_STRATEGIES:
            stats = row.counts[strategy]
            record += [stats.propositions_evaluated, stats.rule_expansions,
                       stats.fact_lookups]
        writer.writerow(record)


def mismatch_lines(report: DiffReport) -> Iterable[str]:
    for seed, goal, holds in report.mismatches:
        detail = ", ".join(f"{s.value}={v}" for s, v in holds.items())
        yield f"seed={seed} goal={goal}: {detail}"
