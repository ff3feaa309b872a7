"""Acceptance suite.

Each test exercises one release criterion end to end at its stated budget
and prints a PASS/FAIL line (run with `pytest -v -s tests/test_acceptance.py`
to watch them).
"""

from __future__ import annotations

import itertools
import json
import subprocess
import sys
import time

from fastapi.testclient import TestClient

from oracle_ref import reference_holds

from conftest import FIXTURES, load_facts, load_rule_base
from proviso.errors import GuardTripped
from proviso.lab import GenParams, differential_run, generate_rulebase, sample_facts, suggest_goal
from proviso.model import fact_base, leaves
from proviso.proleg import export_proleg, import_proleg, semantic_equivalence
from proviso.reasoner import NodeStatus, Strategy, TraceFormat, evaluate, explain
from proviso.service import create_app

CASES = FIXTURES / "cases"


def _report(name: str, ok: bool, detail: str = "") -> None:
    line = f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, f"{name} {detail}"


def test_contract_fixture_semantics():
    start = time.monotonic()
    rb = load_rule_base("contract.rules.json")
    goal = "contract_voidable"
    ok = True
    pinned = [
        (["minor"], True, None),
        (["incapable"], True, None),
        (["minor", "incapable"], True, None),
        (["minor", "for_necessities"], False, NodeStatus.DEFEATED),
        ([], False, NodeStatus.FAILED),
    ]
    for facts, expected_holds, expected_status in pinned:
        v = evaluate(rb, fact_base(facts), goal)
        ok &= v.holds == expected_holds
        if expected_status is not None:
            ok &= v.root.status is expected_status
    pool = sorted(leaves(rb))
    for r in range(len(pool) + 1):
        for subset in itertools.combinations(pool, r):
            expected = reference_holds(rb, frozenset(subset), goal)
            for strategy in Strategy:
                ok &= evaluate(rb, fact_base(subset), goal, strategy).holds == expected
    elapsed = time.monotonic() - start
    _report("contract fixture semantics", ok and elapsed < 1.0, f"{elapsed:.2f}s")


def test_gdpr_fixture_exhaustive():
    start = time.monotonic()
    rb = load_rule_base("gdpr.rules.json")
    goal = "art17_erasure_applicable"
    rule = rb.rules[goal]
    pool = sorted(rule.conditions + rule.exceptions)
    assert len(pool) == 9
    ok = True
    for r in range(len(pool) + 1):
        for subset in itertools.combinations(pool, r):
            facts = fact_base(subset)
            expected = reference_holds(rb, frozenset(subset), goal)
            ok &= evaluate(rb, facts, goal).holds == expected
            if set(subset) & set(rule.exceptions):
                ok &= expected is False
    elapsed = time.monotonic() - start
    _report("gdpr fixture exhaustive (2^9 subsets)", ok and elapsed < 1.0,
            f"{elapsed:.2f}s")


def test_strategy_equivalence_1000_instances():
    start = time.monotonic()
    mismatches = 0
    for i in range(1000):
        params = GenParams(n_rules=5 + i % 26, max_depth=2 + i % 5,
                           max_conditions=3, max_exceptions=2,
                           p_any=0.5, p_fact=0.4, seed=1_000 + i)
        rb = generate_rulebase(params)
        facts = sample_facts(rb, params.p_fact, params.seed ^ 0xBEEF)
        outcome = differential_run(rb, facts, suggest_goal(rb))
        if outcome.mismatch:
            mismatches += 1
    elapsed = time.monotonic() - start
    _report("strategy equivalence on 1000 generated instances",
            mismatches == 0 and elapsed < 30.0,
            f"{mismatches} mismatches, {elapsed:.1f}s")


def test_oracle_equivalence_200_rule_bases():
    start = time.monotonic()
    disagreements = 0
    for i in range(200):
        params = GenParams(n_rules=4 + i % 9, max_depth=4, seed=7_000 + i)
        rb = generate_rulebase(params)
        assert len(leaves(rb)) <= 12
        facts = sample_facts(rb, 0.45, params.seed + 13)
        frozen = frozenset(facts.facts)
        for goal in rb.rules:
            if evaluate(rb, facts, goal).holds != reference_holds(rb, frozen, goal):
                disagreements += 1
    elapsed = time.monotonic() - start
    _report("oracle equivalence on 200 generated rule bases",
            disagreements == 0 and elapsed < 60.0,
            f"{disagreements} disagreements, {elapsed:.1f}s")


def test_termination_fuzz_10000_instances():
    start = time.monotonic()
    guard_trips = 0
    slow = 0
    strategies = (Strategy.EXCEPTION_FIRST, Strategy.CONDITIONS_FIRST,
                  Strategy.RACING)
    for i in range(10_000):
        params = GenParams(n_rules=1 + i % 18, max_depth=1 + i % 6,
                           seed=50_000 + i)
        rb = generate_rulebase(params)
        facts = sample_facts(rb, (i % 11) / 10.0, params.seed + 1)
        goal = suggest_goal(rb)
        t0 = time.monotonic()
        try:
            evaluate(rb, facts, goal, strategies[i % 3])
        except GuardTripped:
            guard_trips += 1
        if time.monotonic() - t0 >= 1.0:
            slow += 1
    elapsed = time.monotonic() - start
    _report("termination fuzz (10000 instances, 1s budget each)",
            guard_trips == 0 and slow == 0,
            f"{guard_trips} guard trips, {slow} over budget, {elapsed:.1f}s total")


def test_proleg_round_trip_100_rule_bases():
    start = time.monotonic()
    rb = load_rule_base("contract.rules.json")
    golden = (FIXTURES / "golden" / "contract.pl").read_bytes()
    ok = export_proleg(rb) == golden
    failures = 0
    for i in range(100):
        params = GenParams(n_rules=4 + i % 5, max_depth=3, seed=90_000 + i)
        generated = generate_rulebase(params)
        assert len(leaves(generated)) <= 15
        reimported, _ = import_proleg(export_proleg(generated))
        if reimported is None:
            failures += 1
            continue
        for goal in generated.rules:
            if not semantic_equivalence(generated, reimported, goal):
                failures += 1
    elapsed = time.monotonic() - start
    _report("clause-text round-trip on 100 generated rule bases",
            ok and failures == 0 and elapsed < 60.0,
            f"{failures} failures, {elapsed:.1f}s")


def test_cost_ordering_fixtures():
    cheap = load_rule_base("cheap_exception.rules.json")
    cheap_facts = load_facts("cheap_exception.facts.json")
    outcomes = [differential_run(cheap, cheap_facts, "claim_established")
                for _ in range(3)]
    ef = [o.stats[Strategy.EXCEPTION_FIRST].propositions_evaluated for o in outcomes]
    cf = [o.stats[Strategy.CONDITIONS_FIRST].propositions_evaluated for o in outcomes]
    ok = all(a < b for a, b in zip(ef, cf))
    ok &= len(set(ef)) == 1 and len(set(cf)) == 1  # deterministic
    deep = load_rule_base("no_exceptions_deep.rules.json")
    deep_facts = load_facts("no_exceptions_deep.facts.json")
    outcome = differential_run(deep, deep_facts, "deep_1")
    ok &= (outcome.stats[Strategy.EXCEPTION_FIRST].propositions_evaluated
           == outcome.stats[Strategy.CONDITIONS_FIRST].propositions_evaluated)
    _report("cost ordering on designed fixtures", ok,
            f"cheap_exception {ef[0]} < {cf[0]}")


def _cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "proviso.cli", *args],
                          capture_output=True, text=True, timeout=120)


def test_cli_contract_golden_script(tmp_path):
    contract = str(FIXTURES / "contract.rules.json")
    script = [
        (("validate", contract), 0),
        (("validate", str(FIXTURES / "cyclic.rules.json")), 1),
        (("validate", str(tmp_path / "absent.json")), 2),
        (("eval", contract, str(CASES / "contract_minor.facts.json"),
          "contract_voidable"), 0),
        (("eval", contract,
          str(CASES / "contract_minor_for_necessities.facts.json"),
          "contract_voidable"), 3),
        (("eval", contract, str(CASES / "contract_none.facts.json"),
          "contract_voidable"), 3),
        (("eval", "--strategy", "sideways", contract,
          str(CASES / "contract_minor.facts.json"), "contract_voidable"), 2),
        (("bench", "--trials", "0", "--out", str(tmp_path / "r.csv")), 2),
        (("import-proleg", str(FIXTURES / "first_order.pl")), 1),
        (("export-proleg", contract), 0),
    ]
    failures = []
    for args, expected in script:
        result = _cli(*args)
        if result.returncode != expected:
            failures.append((args, expected, result.returncode))

    # CLI json output must byte-equal the HTTP proof field for the same inputs
    cli_result = _cli("--format", "json", "eval", contract,
                      str(CASES / "contract_minor_for_necessities.facts.json"),
                      "contract_voidable")
    client = TestClient(create_app())
    rb_id = client.post("/rulebases?name=contract",
                        content=(FIXTURES / "contract.rules.json").read_bytes()
                        ).json()["id"]
    resp = client.post("/evaluate", json={
        "rulebase_id": rb_id, "facts": ["minor", "for_necessities"],
        "goal": "contract_voidable", "strategy": "EXCEPTION_FIRST"})
    http_proof = json.dumps(resp.json()["proof"], indent=2).encode() + b"\n"
    byte_equal = cli_result.stdout.encode() == http_proof
    _report("cli exit-code contract and cli/http proof byte-equality",
            not failures and byte_equal,
            f"{len(failures)} exit-code deviations, byte_equal={byte_equal}")
