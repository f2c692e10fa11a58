"""Generators for the worked examples: Nixon, Tweety, lotteries, the preface and Korb's partition.

Each generator is deterministic.  The ``expectations`` dict records what the
construction is meant to show; tests recompute every entry with the engines
instead of trusting it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .defaults import DefaultRule, DefaultTheory
from .dsl import TheoryDocument, print_document
from .logic import (
    TOP, And, AtLeastOne, Atom, ExactlyOne, Formula, Iff, Implies, Not, Pred, conj, disj,
)
from .prob import LotteryizationParams, WorldModel, as_fraction, lotteryization_model, others

__all__ = [
    "Scenario", "make_nixon", "make_tweety", "make_fair_lottery", "make_unfair_lottery",
    "make_preface", "make_korb", "make_lotteryization", "REGISTRY", "build",
]


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict = field(default_factory=dict)
    theory: DefaultTheory | None = None
    model: WorldModel | None = None
    background: tuple[Formula, ...] = ()
    candidates: tuple[Formula, ...] = ()
    undercut_conditions: tuple[Formula, ...] = ()
    undercut_targets: tuple[Formula, ...] = ()
    evidence: Formula = TOP
    expectations: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theory is None and self.model is None:
            raise ValueError("a scenario needs a theory, a model or both")

    def to_document(self) -> TheoryDocument:
        doc = TheoryDocument()
        if self.theory is not None:
            doc.domain = tuple(sorted(self.theory.domain))
            doc.facts = list(self.theory.facts)
            doc.defaults = list(self.theory.defaults)
        else:
            doc.facts = list(self.background)
        if self.model is not None:
            doc.atoms = self.model.atoms
            doc.worlds = list(self.model.worlds)
        if self.evidence != TOP:
            doc.evidence = self.evidence
        doc.candidates = list(self.candidates)
        doc.undercut_targets = list(self.undercut_targets)
        doc.undercuts = list(self.undercut_conditions)
        return doc

    def dump(self) -> str:
        return print_document(self.to_document())

    @classmethod
    def from_document(cls, doc: TheoryDocument, name: str = "") -> Scenario:
        theory = doc.theory() if doc.defaults or doc.atoms is None else None
        return cls(
            name=name,
            theory=theory,
            model=doc.model(),
            background=tuple(doc.ground_facts()),
            candidates=tuple(doc.candidates),
            undercut_conditions=tuple(doc.undercuts),
            undercut_targets=tuple(doc.undercut_targets),
            evidence=doc.evidence if doc.evidence is not None else TOP,
        )


def _atoms(prefix: str, n: int) -> list[Atom]:
    return [Atom(f"{prefix}{i}") for i in range(1, n + 1)]


def make_nixon() -> Scenario:
    x = "X"
    quaker, republican, pacifist = (Pred(p, (x,)) for p in ("quaker", "republican", "pacifist"))
    theory = DefaultTheory(
        facts=(And((quaker, republican)),),
        defaults=(
            DefaultRule("d1", quaker, (pacifist,), pacifist),
            DefaultRule("d2", republican, (Not(pacifist),), Not(pacifist)),
        ),
        domain=("nixon",),
    )
    p = Atom("pacifist_nixon")
    return Scenario(
        "nixon", {}, theory,
        background=tuple(theory.grounded().facts),
        candidates=(p, Not(p)),
        expectations={"extensions": 2, "skeptical": {"pacifist_nixon": False, "~pacifist_nixon": False},
                      "credulous": {"pacifist_nixon": True, "~pacifist_nixon": True}},
    )


DEFAULT_KINDS = (
    ("emu", False, True),
    ("penguin", False, True),
    ("canary", True, True),
    ("sandpiper", True, True),
)


def make_tweety(kinds: Sequence[tuple[str, bool, bool]] = DEFAULT_KINDS) -> Scenario:
    """Tweety is a bird of exactly one kind; each exceptional kind has a default ruling it out."""
    kinds = list(kinds)
    names = [k[0] for k in kinds]
    if len(kinds) < 2 or len(set(names)) != len(names):
        raise ValueError("need at least two distinct bird kinds")
    if not any(exc for _, _, exc in kinds):
        raise ValueError("need at least one exceptional kind")
    x = "X"
    bird, flies = Pred("bird", (x,)), Pred("flies", (x,))
    kind_atoms = [Pred(k, (x,)) for k in names]
    facts = [Atom("bird_tweety"), Iff(bird, AtLeastOne(tuple(kind_atoms)))]
    facts += [Not(And((a, b))) for a, b in itertools.combinations(kind_atoms, 2)]
    facts += [Implies(a, flies if fl else Not(flies)) for a, (_, fl, _) in zip(kind_atoms, kinds)]
    defaults = [
        DefaultRule(f"not_{k}", bird, (Not(a),), Not(a))
        for a, (k, _, exc) in zip(kind_atoms, kinds) if exc
    ]
    theory = DefaultTheory(tuple(facts), tuple(defaults), ("tweety",))
    n_exc = len(defaults)
    return Scenario(
        "tweety", {"kinds": [list(k) for k in kinds]}, theory,
        background=tuple(theory.grounded().facts),
        candidates=tuple(Not(Atom(f"{k}_tweety")) for k in names),
        expectations={
            "extensions": n_exc if n_exc == len(kinds) else 1,
            "skeptical": {f"{names[0]}_tweety": False},
        },
    )


def make_fair_lottery(n: int) -> Scenario:
    if n < 2:
        raise ValueError("a lottery needs at least two tickets")
    ts = _atoms("t", n)
    w = ExactlyOne(tuple(ts))
    theory = DefaultTheory((w,), tuple(DefaultRule(f"d{i}", TOP, (Not(t),), Not(t)) for i, t in enumerate(ts, 1)))
    model = WorldModel.build([t.name for t in ts], [([j == i for j in range(n)], Fraction(1, n)) for i in range(n)])
    return Scenario(
        "fair_lottery", {"n": n}, theory, model,
        background=(w,),
        candidates=tuple(Not(t) for t in ts) + (disj(ts),),
        expectations={"extensions": n, "loser_probability": f"{n - 1}/{n}", "relevance": "negative",
                      "gate_on": "losers collectively defeated"},
    )


def _ticket_conditions(ts: Sequence[Atom]) -> tuple[Formula, ...]:
    losers = [Not(t) for t in ts]
    return tuple(others(losers, i) for i in range(len(ts)))


def make_unfair_lottery(n: int, fair_weight=Fraction(99, 100)) -> Scenario:
    """A lottery whose draw has no winner with probability ``1 - fair_weight``."""
    f = as_fraction(fair_weight)
    if n < 2:
        raise ValueError("a lottery needs at least two tickets")
    if not 0 < f < 1:
        raise ValueError("fair_weight must lie strictly between 0 and 1")
    ts = _atoms("t", n)
    rows = [([False] * n, 1 - f)] + [([j == i for j in range(n)], f / n) for i in range(n)]
    model = WorldModel.build([t.name for t in ts], rows)
    some = disj(ts)
    return Scenario(
        "unfair_lottery", {"n": n, "fair_weight": str(f)}, None, model,
        candidates=tuple(Not(t) for t in ts) + (some,),
        undercut_conditions=_ticket_conditions(ts),
        undercut_targets=(some,),
        expectations={"some_winner": str(f), "relevance": "negative", "gate_off": "losers warranted",
                      "gate_on": "disjunction warranted"},
    )


def make_preface(n: int, good_rate=Fraction(9, 10), p_good=Fraction(19, 20), p_bad=Fraction(1, 2)) -> Scenario:
    """Common-cause model: a latent ``competent`` atom drives each statement independently."""
    g, pg, pb = (as_fraction(v) for v in (good_rate, p_good, p_bad))
    if n < 1:
        raise ValueError("need at least one statement")
    if not all(0 < v < 1 for v in (g, pg, pb)):
        raise ValueError("rates must lie strictly between 0 and 1")
    if pg < pb:
        raise ValueError("p_good must not be below p_bad")
    ss = _atoms("s", n)
    rows = []
    for c in (True, False):
        prior, p = (g, pg) if c else (1 - g, pb)
        for bits in itertools.product((True, False), repeat=n):
            w = prior
            for b in bits:
                w *= p if b else 1 - p
            rows.append(((c, *bits), w))
    model = WorldModel.build(["competent"] + [s.name for s in ss], rows)
    error = disj([Not(s) for s in ss])
    return Scenario(
        "preface", {"n": n, "good_rate": str(g), "p_good": str(pg), "p_bad": str(pb)}, None, model,
        candidates=tuple(ss) + (error,),
        undercut_conditions=tuple(others(ss, i) for i in range(n)),
        undercut_targets=(error,),
        expectations={"relevance": "positive" if pg > pb else "independent", "defeater_holds": pg > pb},
    )


def make_korb(m: int, n: int, q=Fraction(1, 10), assume_p: bool = True) -> Scenario:
    """``P`` and its negation ``Q`` each split into equally likely disjuncts.

    With ``assume_p`` the background contains ``P`` itself, which is the
    situation in which the partition is argued to stop being minimal.
    """
    q = as_fraction(q)
    if m < 2 or n < 2:
        raise ValueError("both partitions need at least two cells")
    if not 0 < q < Fraction(1, 2):
        raise ValueError("q = Pr(Q) must lie in (0, 1/2)")
    big_p, big_q = Atom("p"), Atom("q")
    ps, qs = _atoms("p", m), _atoms("q", n)
    names = ["p", "q"] + [a.name for a in ps] + [a.name for a in qs]
    rows = []
    for i in range(m):
        rows.append(({"p", ps[i].name}, (1 - q) / m))
    for j in range(n):
        rows.append(({"q", qs[j].name}, q / n))
    model = WorldModel.from_true_sets(names, rows)
    background = [
        Iff(big_p, Not(big_q)),
        Iff(big_p, disj(ps)),
        Iff(big_q, disj(qs)),
        ExactlyOne(tuple(ps + qs)),
    ]
    if assume_p:
        background.append(big_p)
    return Scenario(
        "korb", {"m": m, "n": n, "q": str(q), "assume_p": assume_p}, None, model,
        background=tuple(background),
        candidates=tuple(Not(a) for a in ps) + tuple(Not(a) for a in qs) + (big_p,),
        expectations={"minimal_sets_avoid": [f"~{a.name}" for a in qs] if assume_p else []},
    )


def make_lotteryization(q=Fraction(1, 10), n: int = 5) -> Scenario:
    params = LotteryizationParams(q, n)
    model = lotteryization_model(params)
    ps = [Atom(a) for a in model.atoms]
    some = disj(ps)
    return Scenario(
        "lotteryization", {"q": str(params.q), "n": n}, None, model,
        candidates=tuple(Not(p) for p in ps) + (some,),
        undercut_conditions=_ticket_conditions(ps),
        undercut_targets=(some,),
    )


@dataclass(frozen=True)
class Entry:
    factory: Callable[..., Scenario]
    params: dict  # name -> default
    summary: str


REGISTRY: dict[str, Entry] = {
    "nixon": Entry(make_nixon, {}, "Quaker and Republican defaults with two extensions"),
    "tweety": Entry(make_tweety, {}, "bird kinds ruled out by defaults, one extension per escape"),
    "fair_lottery": Entry(make_fair_lottery, {"n": 5}, "exactly one of n tickets wins"),
    "unfair_lottery": Entry(make_unfair_lottery, {"n": 5, "fair_weight": "99/100"},
                            "some draws have no winner"),
    "preface": Entry(make_preface, {"n": 4, "good_rate": "9/10", "p_good": "19/20", "p_bad": "1/2"},
                     "statements sharing a latent common cause"),
    "korb": Entry(make_korb, {"m": 3, "n": 3, "q": "1/10"}, "a probable proposition and its negation, both partitioned"),
    "lotteryization": Entry(make_lotteryization, {"q": "1/10", "n": 5}, "a probable proposition split into n disjuncts"),
}


def build(name: str, **overrides) -> Scenario:
    """Instantiate a registered scenario, coercing string parameters."""
    entry = REGISTRY.get(name)
    if entry is None:
        raise KeyError(f"unknown scenario {name!r}; known: {', '.join(REGISTRY)}")
    unknown = set(overrides) - set(entry.params)
    if unknown:
        raise ValueError(f"scenario {name} takes no parameter(s) {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, default in entry.params.items():
        value = overrides.get(key, default)
        if value is None:
            value = default
        kwargs[key] = int(value) if isinstance(default, int) else as_fraction(value)
    return entry.factory(**kwargs)
