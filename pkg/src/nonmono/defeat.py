"""Defeasible warrant over a world model.

Pipeline: the statistical acceptance rule gives each candidate a prima facie
reason whose strength is a conditional probability; undercutters attack a
reason when extra evidence moves that probability; complementary candidates
rebut each other; minimal inconsistent sets of surviving candidates are
resolved by collective defeat.  One defeat pass is made and defeated
defeaters do not reinstate their targets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .logic import TOP, And, Formula, Not, entails, is_consistent, to_text
from .prob import (
    WorldModel, ZeroProbabilityError, as_fraction, classify_relevance, conditional, fmt,
    probability,
)

STATUSES = ("warranted", "rebutted", "undercut", "collectively_defeated", "below_threshold")
MAX_SET_CANDIDATES = 24


class SetLimitError(RuntimeError):
    """Too many candidates for minimal-inconsistent-set enumeration."""


@dataclass(frozen=True)
class EngineConfig:
    acceptance_threshold: Fraction = Fraction(1, 2)
    tie_epsilon: Fraction = Fraction(0)
    gate_mode: str = "off"  # off | on
    relevance_mode: str = "always"  # always | pollock

    def __post_init__(self):
        object.__setattr__(self, "acceptance_threshold", as_fraction(self.acceptance_threshold))
        object.__setattr__(self, "tie_epsilon", as_fraction(self.tie_epsilon))
        if not 0 < self.acceptance_threshold < 1:
            raise ValueError("acceptance threshold must lie in (0, 1)")
        if self.tie_epsilon < 0:
            raise ValueError("tie_epsilon must be nonnegative")
        if self.gate_mode not in ("off", "on"):
            raise ValueError(f"gate_mode must be 'off' or 'on', not {self.gate_mode!r}")
        if self.relevance_mode not in ("always", "pollock"):
            raise ValueError(f"relevance_mode must be 'always' or 'pollock', not {self.relevance_mode!r}")

    def to_json(self) -> dict:
        return {
            "acceptance_threshold": fmt(self.acceptance_threshold),
            "tie_epsilon": fmt(self.tie_epsilon),
            "gate_mode": self.gate_mode,
            "relevance_mode": self.relevance_mode,
        }


@dataclass(frozen=True)
class Reason:
    id: str
    conclusion: Formula
    evidence: Formula
    strength: Fraction
    kind: str = "prima_facie"  # prima_facie | deductive


@dataclass(frozen=True)
class Defeater:
    kind: str  # undercutting | rebutting
    target: str
    condition: Formula
    detail: tuple[Fraction, Fraction] | None = None  # (Pr(F|G&H), Pr(F|G))
    condition_probability: Fraction | None = None  # Pr(H|G)

    def to_json(self) -> dict:
        out = {"rule": "D1" if self.kind == "undercutting" else "rebut",
               "kind": self.kind, "target": self.target, "condition": to_text(self.condition)}
        if self.detail is not None:
            out["given_condition"] = fmt(self.detail[0])
            out["without_condition"] = fmt(self.detail[1])
        if self.condition_probability is not None:
            out["condition_probability"] = fmt(self.condition_probability)
        return out


@dataclass(frozen=True)
class CandidateStatus:
    formula: Formula
    status: str
    strength: Fraction | None
    provenance: tuple[dict, ...]
    reason: Reason | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {
            "formula": to_text(self.formula),
            "status": self.status,
            "strength": None if self.strength is None else fmt(self.strength),
            "provenance": list(self.provenance),
        }


@dataclass(frozen=True)
class WarrantReport:
    statuses: tuple[CandidateStatus, ...]
    minimal_sets: tuple[tuple[Formula, ...], ...]
    config: EngineConfig
    scenario: str = ""
    warnings: tuple[str, ...] = ()

    def status_of(self, f: Formula) -> str:
        return self[f].status

    def __getitem__(self, f: Formula) -> CandidateStatus:
        for s in self.statuses:
            if s.formula == f:
                return s
        raise KeyError(to_text(f))

    def with_status(self, status: str) -> list[Formula]:
        return [s.formula for s in self.statuses if s.status == status]

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": self.config.to_json(),
            "statuses": [s.to_json() for s in self.statuses],
            "minimal_inconsistent_sets": [[to_text(f) for f in s] for s in self.minimal_sets],
            "warnings": list(self.warnings),
        }


# -- acceptance and undercutting -------------------------------------------

def apply_a1(m: WorldModel, evidence: Formula, conclusion: Formula, config: EngineConfig = EngineConfig(),
             reason_id: str | None = None) -> Reason | None:
    """Prima facie reason for ``conclusion`` if ``Pr(conclusion | evidence)`` clears the threshold.

    The threshold is strict; projectibility is assumed.
    """
    r = conditional(m, conclusion, evidence)
    if r > config.acceptance_threshold:
        return Reason(reason_id or f"A1[{to_text(conclusion)}]", conclusion, evidence, r)
    return None


def conjuncts(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, And):
        return tuple(c for a in f.args for c in conjuncts(a))
    return (f,)


def find_undercutters(m: WorldModel, target: Reason, candidate_conditions: Sequence[Formula],
                      config: EngineConfig = EngineConfig(), candidates: Sequence[Formula] | None = None,
                      notes: list[str] | None = None) -> list[Defeater]:
    """Conditions ``H`` with ``Pr(F | G & H) != Pr(F | G)``.

    When ``candidates`` is given, ``H`` must be a conjunction of them.  With
    the gate on, ``H`` must also be acceptable itself: ``Pr(H | G)`` above
    the acceptance threshold.  Skipped conditions are explained in ``notes``.
    """
    if target.kind != "prima_facie":
        return []
    notes = notes if notes is not None else []
    tol = m.tolerance
    pool = set(candidates) if candidates is not None else None
    found = []
    base = conditional(m, target.conclusion, target.evidence)
    for h in candidate_conditions:
        label = to_text(h)
        if pool is not None and not set(conjuncts(h)) <= pool:
            notes.append(f"{label}: not a conjunction of candidate conclusions; skipped")
            continue
        joint = And((target.evidence, h))
        try:
            given = conditional(m, target.conclusion, joint)
        except ZeroProbabilityError:
            notes.append(f"{label}: Pr(evidence & condition) = 0; skipped")
            continue
        if abs(given - base) <= tol:
            continue
        gate_p = conditional(m, h, target.evidence)
        if config.gate_mode == "on" and not gate_p > config.acceptance_threshold:
            notes.append(
                f"{label}: gated, Pr(condition) = {fmt(gate_p)} is not above {fmt(config.acceptance_threshold)}"
            )
            continue
        found.append(Defeater("undercutting", target.id, h, (given, base), gate_p))
    return found


# -- inconsistency ----------------------------------------------------------

def minimal_inconsistent_sets(background: Iterable[Formula], candidates: Sequence[Formula]) -> list[tuple[Formula, ...]]:
    """Every subset-minimal subset of ``candidates`` inconsistent with ``background``.

    Level-wise search: a subset is examined only when all its one-smaller
    subsets are consistent, so whatever turns up inconsistent is minimal.
    Members keep the order of ``candidates``; sets come out by size, then
    position.
    """
    background = frozenset(background)
    if not is_consistent(background):
        raise ValueError("background is inconsistent")
    cands = list(dict.fromkeys(candidates))
    if len(cands) > MAX_SET_CANDIDATES:
        raise SetLimitError(f"too many candidates for set enumeration ({len(cands)} > {MAX_SET_CANDIDATES})")
    found: list[tuple[int, ...]] = []
    consistent: set[tuple[int, ...]] = {()}
    level: list[tuple[int, ...]] = [()]
    while level:
        nxt: list[tuple[int, ...]] = []
        for base in level:
            start = base[-1] + 1 if base else 0
            for i in range(start, len(cands)):
                s = base + (i,)
                if any(s[:k] + s[k + 1:] not in consistent for k in range(len(s) - 1)):
                    continue
                if is_consistent(background | {cands[j] for j in s}):
                    consistent.add(s)
                    nxt.append(s)
                else:
                    found.append(s)
        level = nxt
    found.sort(key=lambda s: (len(s), s))
    return [tuple(cands[i] for i in s) for s in found]


def is_minimal_inconsistent(background: Iterable[Formula], members: Sequence[Formula]) -> bool:
    background = frozenset(background)
    if is_consistent(background | set(members)):
        return False
    return all(
        is_consistent(background | (set(members) - {m})) for m in members
    )


# -- collective defeat ------------------------------------------------------

def _live(s: CandidateStatus) -> bool:
    return s.status == "warranted" and s.reason is not None and s.reason.kind == "prima_facie"


def _relevance_blocks(m: WorldModel, members: Sequence[Formula]) -> tuple[bool, list[dict]]:
    """Whether the set escapes collective defeat on relevance grounds.

    The set is blocked when some subfamily obtained by dropping one member
    (at least two left) is positively relevant; a two-member set is judged
    on itself.
    """
    families = [list(members)] if len(members) <= 2 else [
        [x for x in members if x != drop] for drop in members
    ]
    seen = []
    blocked = False
    for fam in families:
        rel = classify_relevance(m, fam)
        seen.append({"members": [to_text(f) for f in fam], "relevance": rel.kind})
        blocked = blocked or rel.kind == "positive"
    return blocked, seen


def collective_defeat(m: WorldModel, statuses: dict[Formula, CandidateStatus],
                      sets: Sequence[Sequence[Formula]], config: EngineConfig = EngineConfig()) -> dict[Formula, CandidateStatus]:
    """Resolve minimal inconsistent sets whose members all still stand.

    Within a set the weakest members (strengths within ``tie_epsilon`` of
    the minimum) fall; when all strengths tie the whole set falls.  Two or
    more tied weakest members are collectively defeated; a single weakest
    member is rebutted by the rest.  All sets are judged against the
    statuses as they were on entry, so the outcome does not depend on the
    order in which sets are visited.
    """
    before = dict(statuses)
    after = dict(statuses)
    for members in sets:
        if len(members) < 2 or not all(_live(before[f]) for f in members):
            continue
        set_label = [to_text(f) for f in members]
        entry: dict = {"rule": "collective", "set": set_label}
        if config.relevance_mode == "pollock":
            blocked, seen = _relevance_blocks(m, members)
            if blocked:
                continue
            entry["relevance"] = seen
        weakest = min(before[f].strength for f in members)
        tier = [f for f in members if before[f].strength <= weakest + config.tie_epsilon]
        status = "collectively_defeated" if len(tier) >= 2 else "rebutted"
        for f in tier:
            cur = after[f]
            after[f] = replace(cur, status=status, provenance=cur.provenance + (
                {**entry, "weakest_strength": fmt(weakest)},
            ))
    return after


# -- orchestration ----------------------------------------------------------

def compute_warrants(scenario, config: EngineConfig = EngineConfig()) -> WarrantReport:
    """Warrant status for each candidate of ``scenario``.

    ``scenario`` needs ``model``, ``background``, ``candidates``,
    ``undercut_conditions`` and ``undercut_targets`` (empty means every
    candidate); ``evidence`` defaults to the verum.
    """
    m: WorldModel = scenario.model
    if m is None:
        raise ValueError("warrant computation needs a world model")
    background = frozenset(scenario.background)
    evidence = getattr(scenario, "evidence", TOP) or TOP
    cands = list(dict.fromkeys(scenario.candidates))
    targets = set(scenario.undercut_targets) or set(cands)
    warnings: list[str] = []
    if probability(m, evidence) == 0:
        raise ZeroProbabilityError("evidence has probability zero")

    statuses: dict[Formula, CandidateStatus] = {}
    for i, f in enumerate(cands):
        if entails(background, f):
            r = Reason(f"deductive[{to_text(f)}]", f, evidence, Fraction(1), "deductive")
            statuses[f] = CandidateStatus(f, "warranted", Fraction(1), (
                {"rule": "deductive", "note": "entailed by the background"},), r)
            continue
        if entails(background, Not(f)):
            statuses[f] = CandidateStatus(f, "rebutted", None, (
                {"rule": "deductive", "note": "negation entailed by the background"},))
            continue
        strength = conditional(m, f, evidence)
        r = apply_a1(m, evidence, f, config, reason_id=f"A1[{to_text(f)}]")
        if r is None:
            statuses[f] = CandidateStatus(f, "below_threshold", strength, (
                {"rule": "A1", "note": f"strength {fmt(strength)} is not above {fmt(config.acceptance_threshold)}"},))
        else:
            statuses[f] = CandidateStatus(f, "warranted", r.strength, (
                {"rule": "A1", "evidence": to_text(evidence), "strength": fmt(r.strength)},), r)

    # undercutting
    for f in cands:
        s = statuses[f]
        if f not in targets or not _live(s) or not scenario.undercut_conditions:
            continue
        notes: list[str] = []
        found = find_undercutters(m, s.reason, scenario.undercut_conditions, config, cands, notes)
        warnings.extend(f"{to_text(f)}: {n}" for n in notes)
        gated = [n for n in notes if ": gated," in n]
        if gated:
            s = replace(s, provenance=s.provenance + (
                {"rule": "gate", "note": f"{len(gated)} undercutting condition(s) suppressed", "suppressed": gated},))
            statuses[f] = s
        if found:
            prov = [d.to_json() for d in found]
            # what the more specific evidence itself still supports
            residual = min(d.detail[0] for d in found)
            prov.append({
                "rule": "residual",
                "note": "strength of the conclusion under the defeating evidence",
                "strength": fmt(residual),
                "clears_threshold": residual > config.acceptance_threshold,
            })
            statuses[f] = replace(s, status="undercut", provenance=s.provenance + tuple(prov))

    # rebutting between complementary candidates
    for f in cands:
        g = Not(f)
        if g not in statuses or not (_live(statuses[f]) and _live(statuses[g])):
            continue
        sf, sg = statuses[f].strength, statuses[g].strength
        losers = [f, g] if abs(sf - sg) <= config.tie_epsilon else [f if sf < sg else g]
        for x in losers:
            other = g if x == f else f
            cur = statuses[x]
            statuses[x] = replace(cur, status="rebutted", provenance=cur.provenance + (
                Defeater("rebutting", cur.reason.id, other).to_json()
                | {"strength": fmt(statuses[other].strength)},))

    sets = minimal_inconsistent_sets(background, cands)
    statuses = collective_defeat(m, statuses, sets, config)
    return WarrantReport(
        tuple(statuses[f] for f in cands), tuple(tuple(s) for s in sets), config,
        getattr(scenario, "name", ""), tuple(warnings),
    )
