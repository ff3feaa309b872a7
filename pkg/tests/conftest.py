from __future__ import annotations

from pathlib import Path

import pytest

from proviso.loader import parse_fact_file, parse_rule_file, validate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_rule_base(name: str):
    rules = parse_rule_file((FIXTURES / name).read_bytes())
    rb, _ = validate(rules)
    assert rb is not None, f"fixture {name} failed validation"
    return rb


def load_facts(name: str):
    facts, _ = parse_fact_file((FIXTURES / "cases" / name).read_bytes())
    return facts


@pytest.fixture
def contract_rb():
    return load_rule_base("contract.rules.json")


@pytest.fixture
def gdpr_rb():
    return load_rule_base("gdpr.rules.json")


@pytest.fixture
def cheap_exception_rb():
    return load_rule_base("cheap_exception.rules.json")


@pytest.fixture
def no_exceptions_deep_rb():
    return load_rule_base("no_exceptions_deep.rules.json")
