"""Exact probabilities over finite weighted world models.

Every quantity is a :class:`fractions.Fraction`.  Strict inequalities that
decide warrant are therefore decided exactly; a tolerance only enters when a
model was built from float weights.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .logic import TOP, And, Atom, Formula, Not, Or, atoms_of, conj, disj, evaluate, to_text

FLOAT_TOLERANCE = Fraction(1, 10**9)


class ZeroProbabilityError(ZeroDivisionError):
    """Conditioning on an event of probability zero."""


class UnknownAtomError(KeyError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class WorldModel:
    """Finite list of truth assignments with nonnegative weights.

    ``worlds`` holds ``(bits, weight)`` pairs where ``bits[i]`` is the value
    of ``atoms[i]``.  Probabilities are weight ratios, so the weights need
    not sum to one.
    """

    atoms: tuple[str, ...]
    worlds: tuple[tuple[tuple[bool, ...], Fraction], ...]
    inexact: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atom names in model")
        seen = set()
        for bits, w in self.worlds:
            if len(bits) != len(self.atoms):
                raise ValueError(f"world has {len(bits)} bits for {len(self.atoms)} atoms")
            if bits in seen:
                raise ValueError("duplicate world assignment")
            if w < 0:
                raise ValueError("negative world weight")
            seen.add(bits)
        if self.total <= 0:
            raise ValueError("total weight must be positive")

    @classmethod
    def build(cls, atoms: Sequence[str], worlds: Iterable[tuple[Iterable[bool], object]]) -> WorldModel:
        """Construct from any bit iterables and weights (ints, Fractions, strings or floats)."""
        inexact = False
        rows = []
        for bits, w in worlds:
            inexact = inexact or isinstance(w, float)
            rows.append((tuple(bool(b) for b in bits), as_fraction(w)))
        return cls(tuple(atoms), tuple(rows), inexact)

    @classmethod
    def from_true_sets(cls, atoms: Sequence[str], worlds: Iterable[tuple[Iterable[str], object]]) -> WorldModel:
        """Each world given as the set of atoms true in it."""
        rows = []
        for true, w in worlds:
            true = set(true)
            stray = true - set(atoms)
            if stray:
                raise UnknownAtomError(", ".join(sorted(stray)))
            rows.append(([a in true for a in atoms], w))
        return cls.build(atoms, rows)

    @property
    def total(self) -> Fraction:
        return sum((w for _, w in self.worlds), Fraction(0))

    @property
    def tolerance(self) -> Fraction:
        return FLOAT_TOLERANCE if self.inexact else Fraction(0)

    def assignments(self):
        for bits, w in self.worlds:
            yield dict(zip(self.atoms, bits)), w

    def normalized(self) -> WorldModel:
        t = self.total
        return WorldModel(self.atoms, tuple((b, w / t) for b, w in self.worlds), self.inexact)

    def to_json(self) -> dict:
        return {
            "atoms": list(self.atoms),
            "worlds": [
                {"bits": "".join("1" if b else "0" for b in bits), "weight": fmt(w)}
                for bits, w in self.worlds
            ],
        }

    @classmethod
    def from_json(cls, doc: dict | str) -> WorldModel:
        if isinstance(doc, str):
            doc = json.loads(doc)
        atoms = doc["atoms"]
        rows = []
        for row in doc["worlds"]:
            bits = row["bits"]
            if set(bits) - {"0", "1"}:
                raise ValueError(f"bad world bits {bits!r}")
            rows.append(([c == "1" for c in bits], as_fraction(row["weight"])))
        return cls.build(atoms, rows)


def fmt(x: Fraction) -> str:
    """Rational as ``p/q`` (integers without denominator)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _check_atoms(m: WorldModel, f: Formula) -> None:
    unknown = atoms_of(f) - set(m.atoms)
    if unknown:
        raise UnknownAtomError(f"atom(s) not in model: {', '.join(sorted(unknown))}")


def probability(m: WorldModel, f: Formula) -> Fraction:
    _check_atoms(m, f)
    hit = sum((w for world, w in m.assignments() if evaluate(f, world)), Fraction(0))
    return hit / m.total


def conditional(m: WorldModel, f: Formula, given: Formula) -> Fraction:
    """``Pr(f | given)``; raises :class:`ZeroProbabilityError` on a null condition."""
    den = probability(m, given)
    if den == 0:
        raise ZeroProbabilityError(f"Pr({to_text(given)}) = 0")
    return probability(m, And((f, given))) / den


def others(props: Sequence[Formula], i: int) -> Formula:
    """Conjunction of every proposition except the ``i``-th; verum if there are none."""
    rest = [p for j, p in enumerate(props) if j != i]
    return conj(rest) if rest else TOP


# -- relevance --------------------------------------------------------------

@dataclass(frozen=True)
class RelevanceClass:
    kind: str  # positive | negative | independent | mixed
    margins: tuple[Fraction | None, ...]

    def to_json(self) -> dict:
        return {"class": self.kind, "margins": [None if m is None else fmt(m) for m in self.margins]}


def classify_relevance(m: WorldModel, props: Sequence[Formula], tolerance=None) -> RelevanceClass:
    """Sign of ``Pr(s_i | all other s_j) - Pr(s_i)`` across the set.

    A margin whose conditioning event has probability zero is undefined,
    which makes the class ``mixed``.
    """
    if len(props) < 2:
        raise ValueError("relevance needs at least two propositions")
    tol = m.tolerance if tolerance is None else as_fraction(tolerance)
    margins: list[Fraction | None] = []
    for i, s in enumerate(props):
        try:
            margins.append(conditional(m, s, others(props, i)) - probability(m, s))
        except ZeroProbabilityError:
            margins.append(None)
    if any(x is None for x in margins):
        kind = "mixed"
    elif all(x > tol for x in margins):
        kind = "positive"
    elif all(x < -tol for x in margins):
        kind = "negative"
    elif all(abs(x) <= tol for x in margins):
        kind = "independent"
    else:
        kind = "mixed"
    return RelevanceClass(kind, tuple(margins))


# -- disjunction defeater checks -------------------------------------------

@dataclass(frozen=True)
class InequalityReport:
    """Per-index left-hand sides against a shared right-hand side, ``lhs_i < rhs``."""

    lhs: tuple[Fraction, ...]
    rhs: Fraction
    holds: bool
    relevance: RelevanceClass | None = None
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        out = {"lhs": [fmt(x) for x in self.lhs], "rhs": fmt(self.rhs), "holds": self.holds}
        if self.relevance is not None:
            out["relevance"] = self.relevance.to_json()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _disjunction_drop(m: WorldModel, disjunction: Formula, conditions: Sequence[Formula], tol) -> InequalityReport:
    rhs = probability(m, disjunction)
    lhs = tuple(conditional(m, disjunction, h) for h in conditions)
    return InequalityReport(lhs, rhs, all(x < rhs - tol for x in lhs))


def check_preface_defeater(m: WorldModel, statements: Sequence[Formula], tolerance=None) -> InequalityReport:
    """Does confirming all but one statement lower the probability of an error?

    Compares ``Pr(~s_1 | ... | ~s_N  given  all s_j, j != i)`` with the
    unconditional probability of the error disjunction, for every ``i``.
    """
    tol = m.tolerance if tolerance is None else as_fraction(tolerance)
    error = disj([Not(s) for s in statements]) if statements else Or(())
    conds = [others(statements, i) for i in range(len(statements))]
    rep = _disjunction_drop(m, error, conds, tol)
    notes = []
    relevance = None
    if len(statements) >= 2:
        relevance = classify_relevance(m, statements, tol)
        if relevance.kind != "positive":
            notes.append(f"statements are {relevance.kind}ly relevant, not positively")
    return InequalityReport(rep.lhs, rep.rhs, rep.holds, relevance, tuple(notes))


def check_unfair_lottery(m: WorldModel, tickets: Sequence[Formula], tolerance=None) -> InequalityReport:
    """Does learning that all other tickets lost lower the chance that some ticket won?

    Also reports the relevance class of the losing-ticket propositions,
    which is negative for any lottery with at most one winner.
    """
    tol = m.tolerance if tolerance is None else as_fraction(tolerance)
    losers = [Not(t) for t in tickets]
    conds = [others(losers, i) for i in range(len(tickets))]
    rep = _disjunction_drop(m, disj(tickets), conds, tol)
    relevance = classify_relevance(m, losers, tol) if len(tickets) >= 2 else None
    return InequalityReport(rep.lhs, rep.rhs, rep.holds, relevance)


# -- lotteryization ---------------------------------------------------------

@dataclass(frozen=True)
class LotteryizationParams:
    """``q`` is the probability that the lotteryized proposition is false."""

    q: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "q", as_fraction(self.q))
        if not 0 < self.q < 1:
            raise ValueError("q must lie strictly between 0 and 1")
        if self.n < 2:
            raise ValueError("N must be at least 2")


def lotteryization_value_printed(p: LotteryizationParams) -> Fraction:
    """Closed form as printed: ``1 - q / (q + 1/N)``."""
    return 1 - p.q / (p.q + Fraction(1, p.n))


def lotteryization_closed_form(p: LotteryizationParams) -> Fraction:
    """Corrected closed form ``1 - q / (q + (1 - q)/N)``."""
    return 1 - p.q / (p.q + (1 - p.q) / p.n)


def lotteryization_model(p: LotteryizationParams) -> WorldModel:
    """One world where every disjunct fails (weight ``q``) and ``N`` single-winner worlds."""
    atoms = tuple(f"p{i}" for i in range(1, p.n + 1))
    rows = [([False] * p.n, p.q)]
    for i in range(p.n):
        rows.append(([j == i for j in range(p.n)], (1 - p.q) / p.n))
    return WorldModel.build(atoms, rows)


def lotteryization_value_exact(p: LotteryizationParams, j: int = 0) -> Fraction:
    """``Pr(p_j | every other disjunct false)`` by enumeration over the explicit model."""
    m = lotteryization_model(p)
    ps = [Atom(a) for a in m.atoms]
    value = conditional(m, ps[j], others([Not(x) for x in ps], j))
    closed = lotteryization_closed_form(p)
    if value != closed:
        raise AssertionError(f"enumeration {value} disagrees with closed form {closed}")
    return value


def remaining_losers_probability(p: LotteryizationParams, j: int = 0) -> Fraction:
    """``Pr(all disjuncts but the j-th false)`` in the exact model, i.e. ``q + (1-q)/N``."""
    m = lotteryization_model(p)
    ps = [Atom(a) for a in m.atoms]
    return probability(m, others([Not(x) for x in ps], j))


@dataclass(frozen=True)
class Threshold:
    n: int
    value: Fraction
    mode: str
    printed_bound: int | None = None  # smallest N with N > ceil(1/q)


def warrant_threshold(q, mode: str = "paper", n_max: int = 10**6) -> Threshold:
    """Smallest ``N >= 2`` whose lotteryized value falls strictly below 1/2."""
    q = as_fraction(q)
    value_fn = {"paper": lotteryization_value_printed, "exact": lotteryization_closed_form}.get(mode)
    if value_fn is None:
        raise ValueError(f"mode must be 'paper' or 'exact', not {mode!r}")
    half = Fraction(1, 2)
    # both value functions are decreasing in N, so solve then confirm the boundary
    guess = math.floor(1 / q) if mode == "paper" else math.floor((1 - q) / q)
    n = max(2, guess - 1)
    while n <= n_max and value_fn(LotteryizationParams(q, n)) >= half:
        n += 1
    while n > 2 and value_fn(LotteryizationParams(q, n - 1)) < half:
        n -= 1
    printed = math.ceil(1 / q) + 1 if mode == "paper" else None
    return Threshold(n, value_fn(LotteryizationParams(q, n)), mode, printed)


@dataclass(frozen=True)
class DiscrepancyRow:
    q: Fraction
    n: int
    printed: Fraction
    exact: Fraction
    enumerated: Fraction

    @property
    def gap(self) -> Fraction:
        return self.printed - self.exact


def lotteryization_discrepancy(qs: Iterable, ns: Iterable[int]) -> list[DiscrepancyRow]:
    """Printed closed form against the enumerated exact value over a grid."""
    rows = []
    ns = list(ns)
    for q in qs:
        for n in ns:
            p = LotteryizationParams(q, n)
            rows.append(DiscrepancyRow(
                p.q, n, lotteryization_value_printed(p), lotteryization_closed_form(p),
                lotteryization_value_exact(p),
            ))
    return rows


def format_discrepancy(rows: Sequence[DiscrepancyRow]) -> str:
    """CSV table of the printed versus exact lotteryized values."""
    lines = ["q,n,printed,exact,enumerated,gap,gap_float"]
    for r in rows:
        lines.append(",".join((fmt(r.q), str(r.n), fmt(r.printed), fmt(r.exact), fmt(r.enumerated),
                               fmt(r.gap), f"{float(r.gap):.6g}")))
    return "\n".join(lines) + "\n"
