"""Exception types shared across the package."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for every error this package raises deliberately."""


class BadIdentifier(EngineError):
    """A proposition identifier does not match ``^[a-z][a-z0-9_]*$``."""


class DuplicateEntry(EngineError):
    """The same identifier appears twice within one rule list."""


class SelfReference(EngineError):
    """A rule's head appears in its own conditions or exceptions."""


class DuplicateHead(EngineError):
    """Two rules define the same head proposition."""

    def __init__(self, head: str):
        super().__init__(f"more than one rule defines {head!r}")
        self.head = head


class CyclicDependency(EngineError):
    """The rule dependency graph contains a cycle."""

    def __init__(self, cycle):
        cycle = list(cycle)
        super().__init__("cyclic rule dependency: " + " -> ".join(cycle))
        self.cycle = cycle


class ParseError(EngineError):
    """Input document is not well-formed (bad encoding, bad syntax)."""


class SchemaError(EngineError):
    """Input document is well-formed but has the wrong shape or value kinds."""


class UnknownStrategy(EngineError):
    """A strategy name does not denote a supported evaluation strategy."""


class GuardTripped(EngineError):
    """Runtime cycle guard fired: a proposition was re-entered while still
    being evaluated. Indicates a rule base that bypassed validation."""

    def __init__(self, message: str, *, proposition: str | None = None,
                 path=(), node=None):
        super().__init__(message)
        self.proposition = proposition
        self.path = tuple(path)
        self.node = node


class DegenerateParams(EngineError):
    """Generator or benchmark parameters cannot produce the requested output."""


class NonPropositional(EngineError):
    """Clause text contains arguments or variables; only arity-0 atoms are supported."""


class UnsupportedShape(EngineError):
    """Clause text mixes shapes that have no rule-form equivalent."""


class OrphanException(EngineError):
    """An exception declaration names a head that has no clause."""


class TooManyLeaves(EngineError):
    """Exhaustive semantic comparison refused: the leaf union is too large."""

    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} leaves exceed the exhaustive-check limit of {limit}")
        self.count = count
        self.limit = limit
