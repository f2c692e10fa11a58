"""Reiter default theories: applicability, extensions, credulous and skeptical entailment."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable

from .logic import (
    TOP, Formula, Schema, entails, ground, is_consistent, substitute, to_text,
    variables_of,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 64


class DefaultLimitError(RuntimeError):
    """Raised when a grounded theory has more defaults than the enumeration cap."""


@dataclass(frozen=True)
class DefaultRule:
    id: str
    prerequisite: Formula
    justifications: tuple[Formula, ...]
    consequent: Formula

    def __post_init__(self):
        if not self.justifications:
            raise ValueError(f"default {self.id} needs at least one justification")

    @property
    def is_normal(self) -> bool:
        return self.justifications == (self.consequent,)

    def formulas(self) -> tuple[Formula, ...]:
        return (self.prerequisite, *self.justifications, self.consequent)

    def variables(self) -> tuple[str, ...]:
        vs: set[str] = set()
        for f in self.formulas():
            vs |= variables_of(f)
        return tuple(sorted(vs))

    def instances(self, domain: Iterable[str]) -> list[DefaultRule]:
        vs = self.variables()
        if not vs:
            return [self]
        out = []
        for values in _assignments(vs, domain):
            binding = dict(zip(vs, values))
            parts = [substitute(f, binding) for f in self.formulas()]
            out.append(DefaultRule(
                f"{self.id}({','.join(values)})", parts[0], tuple(parts[1:-1]), parts[-1],
            ))
        return out

    def __str__(self) -> str:
        pre = "" if self.prerequisite == TOP else to_text(self.prerequisite) + " "
        justs = ", ".join(to_text(j) for j in self.justifications)
        return f"{self.id}: {pre}: {justs} / {to_text(self.consequent)}"


def _assignments(vs, domain):
    dom = sorted(set(domain))
    if not dom:
        raise ValueError("rule schema needs a nonempty domain")
    return itertools.product(dom, repeat=len(vs))


@dataclass(frozen=True)
class DefaultTheory:
    facts: tuple[Formula, ...]
    defaults: tuple[DefaultRule, ...]
    domain: tuple[str, ...] = ()

    @property
    def is_ground(self) -> bool:
        return not any(variables_of(f) for f in self.facts) and not any(
            d.variables() for d in self.defaults
        )

    def grounded(self) -> DefaultTheory:
        if self.is_ground:
            return self
        facts: list[Formula] = []
        for f in self.facts:
            facts.extend(ground(Schema.of(f), self.domain) if variables_of(f) else [f])
        rules: list[DefaultRule] = []
        for d in self.defaults:
            rules.extend(d.instances(self.domain))
        return DefaultTheory(tuple(facts), tuple(rules), self.domain)


@dataclass(frozen=True)
class Extension:
    """An extension, identified by the ids of its generating defaults."""

    generating_defaults: tuple[str, ...]
    base: tuple[Formula, ...]
    conclusions: tuple[Formula, ...] = ()
    trivial: bool = field(default=False, compare=False)

    def entails(self, q: Formula) -> bool:
        return entails(self.base, q)


def applicable(d: DefaultRule, e_base: Iterable[Formula]) -> bool:
    e_base = frozenset(e_base)
    return entails(e_base, d.prerequisite) and all(
        is_consistent(e_base | {b}) for b in d.justifications
    )


def extensions(t: DefaultTheory, cap: int = DEFAULT_CAP) -> list[Extension]:
    """All Reiter extensions of ``t``, deduplicated and canonically ordered.

    Search branches on which applicable default to apply next.  A branch dies
    as soon as an applied default's justification becomes inconsistent with
    the growing base; since the base only grows, such a branch cannot recover.
    Every closed branch is then checked against the fixpoint conditions on its
    final base.
    """
    g = t.grounded()
    rules = g.defaults
    if len(rules) > cap:
        raise DefaultLimitError(
            f"theory has {len(rules)} ground defaults; the enumeration cap is {cap}"
        )
    facts = frozenset(g.facts)
    if not is_consistent(facts):
        log.warning("facts are inconsistent; the only extension is the trivial one")
        return [Extension((), _canonical(facts), (), trivial=True)]

    found: dict[frozenset[int], Extension] = {}
    seen: set[frozenset[int]] = set()
    stack: list[frozenset[int]] = [frozenset()]
    while stack:
        applied = stack.pop()
        if applied in seen:
            continue
        seen.add(applied)
        base = facts | {rules[i].consequent for i in applied}
        if any(not is_consistent(base | {b}) for i in applied for b in rules[i].justifications):
            continue
        nxt = [i for i in range(len(rules)) if i not in applied and applicable(rules[i], base)]
        if nxt:
            stack.extend(applied | {i} for i in reversed(nxt))
            continue
        ext = _as_extension(rules, facts, applied)
        if is_extension(g, ext):
            found[applied] = ext
    return sorted(found.values(), key=lambda e: e.generating_defaults)


def _canonical(fs) -> tuple[Formula, ...]:
    return tuple(sorted(set(fs), key=to_text))


def _as_extension(rules, facts, applied) -> Extension:
    chosen = sorted((rules[i] for i in applied), key=lambda d: d.id)
    conclusions = _canonical(d.consequent for d in chosen)
    return Extension(
        tuple(d.id for d in chosen), _canonical(facts | set(conclusions)), conclusions
    )


def is_extension(t: DefaultTheory, ext: Extension) -> bool:
    """Fixpoint check against the final base.

    Every generating default must be applicable to the base, no other
    default may be, and the generating defaults must be derivable in some
    well-founded order starting from the facts alone.
    """
    g = t.grounded()
    by_id = {d.id: d for d in g.defaults}
    generating = [by_id[i] for i in ext.generating_defaults]
    base = frozenset(g.facts) | {d.consequent for d in generating}
    if base != frozenset(ext.base):
        return False
    if not all(applicable(d, base) for d in generating):
        return False
    if any(applicable(d, base) for d in g.defaults if d.id not in ext.generating_defaults):
        return False
    # groundedness: fire prerequisites in rounds from the facts upward
    current = frozenset(g.facts)
    pending = list(generating)
    while pending:
        ready = [d for d in pending if entails(current, d.prerequisite)]
        if not ready:
            return False
        current = current | {d.consequent for d in ready}
        pending = [d for d in pending if d not in ready]
    return True


@dataclass(frozen=True)
class QueryResult:
    answer: bool
    mode: str
    witnesses: tuple[tuple[str, ...], ...]
    extension_count: int

    @property
    def vacuous(self) -> bool:
        return self.mode == "skeptical" and self.extension_count == 0


def query(t: DefaultTheory, q: Formula, mode: str = "skeptical", cap: int = DEFAULT_CAP) -> QueryResult:
    """Answer ``q`` credulously or skeptically, naming the extensions that decide it.

    For credulous queries the witnesses are the extensions entailing ``q``;
    for skeptical ones they are the counterexamples when the answer is false,
    and every extension when it is true.
    """
    if mode not in ("skeptical", "credulous"):
        raise ValueError(f"unknown query mode {mode!r}")
    exts = extensions(t, cap)
    hits = [e for e in exts if e.entails(q)]
    if mode == "credulous":
        return QueryResult(bool(hits), mode, tuple(e.generating_defaults for e in hits), len(exts))
    misses = [e for e in exts if e not in hits]
    witnesses = misses if misses else hits
    return QueryResult(not misses, mode, tuple(e.generating_defaults for e in witnesses), len(exts))


def credulous_entails(t: DefaultTheory, q: Formula) -> bool:
    return any(e.entails(q) for e in extensions(t))


def skeptical_entails(t: DefaultTheory, q: Formula) -> bool:
    """True iff every extension entails ``q``; vacuously true with no extensions."""
    return all(e.entails(q) for e in extensions(t))
