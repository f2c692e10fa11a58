"""Ground propositional language, clausal form and a small DPLL decision procedure.

Formulas are immutable trees.  ``And(())`` is the verum and ``Or(())`` the
falsum; ``TOP`` and ``BOTTOM`` name them.  Schematic atoms (``Pred``) carry
argument lists whose uppercase entries are variables; grounding turns each
``Pred`` into a plain ``Atom`` named ``pred_arg1_arg2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Formula", "Atom", "Pred", "Not", "And", "Or", "Implies", "Iff",
    "ExactlyOne", "AtLeastOne", "TOP", "BOTTOM", "Literal", "Clause", "ClauseSet",
    "Schema", "SchemaError", "atoms_of", "variables_of", "evaluate", "to_text",
    "conj", "disj", "neg", "to_nnf", "to_cnf", "is_consistent", "entails",
    "satisfiable_clauses", "ground", "is_variable",
]


class Formula:
    """Base class for formula nodes."""

    __slots__ = ()

    def __invert__(self) -> Formula:
        return Not(self)

    def __and__(self, other: Formula) -> Formula:
        return And((self, other))

    def __or__(self, other: Formula) -> Formula:
        return Or((self, other))

    def __rshift__(self, other: Formula) -> Formula:
        return Implies(self, other)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Pred(Formula):
    """Schematic atom ``name(args)``; only meaningful before grounding."""

    name: str
    args: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ExactlyOne(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class AtLeastOne(Formula):
    args: tuple[Formula, ...]


TOP: Formula = And(())
BOTTOM: Formula = Or(())

Literal = tuple[str, bool]
Clause = frozenset  # frozenset[Literal]
ClauseSet = frozenset  # frozenset[Clause]


def conj(fs: Iterable[Formula]) -> Formula:
    """Conjunction of ``fs``; a single conjunct is returned unwrapped."""
    fs = tuple(fs)
    return fs[0] if len(fs) == 1 else And(fs)


def disj(fs: Iterable[Formula]) -> Formula:
    fs = tuple(fs)
    return fs[0] if len(fs) == 1 else Or(fs)


def neg(f: Formula) -> Formula:
    """Negate, stripping a double negation instead of stacking one."""
    return f.arg if isinstance(f, Not) else Not(f)


def is_variable(token: str) -> bool:
    return token[:1].isupper()


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, Pred)):
        return ()
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    return f.args


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(_children(node))


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(n.name for n in _walk(f) if isinstance(n, Atom))


def variables_of(f: Formula) -> frozenset[str]:
    return frozenset(
        a for n in _walk(f) if isinstance(n, Pred) for a in n.args if is_variable(a)
    )


def evaluate(f: Formula, world: Mapping[str, bool]) -> bool:
    """Truth value of a ground formula under a total assignment."""
    if isinstance(f, Atom):
        return world[f.name]
    if isinstance(f, Not):
        return not evaluate(f.arg, world)
    if isinstance(f, And):
        return all(evaluate(a, world) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, world) for a in f.args)
    if isinstance(f, Implies):
        return (not evaluate(f.left, world)) or evaluate(f.right, world)
    if isinstance(f, Iff):
        return evaluate(f.left, world) == evaluate(f.right, world)
    if isinstance(f, ExactlyOne):
        return sum(evaluate(a, world) for a in f.args) == 1
    if isinstance(f, AtLeastOne):
        return any(evaluate(a, world) for a in f.args)
    raise TypeError(f"cannot evaluate schematic node {f!r}")


# -- printing ---------------------------------------------------------------

# binding strength: higher binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def to_text(f: Formula) -> str:
    """Render in the surface syntax accepted by :mod:`nonmono.dsl`."""
    return _show(f, 0)


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Pred):
        return f"{f.name}({', '.join(f.args)})"
    if isinstance(f, Not):
        return "~" + _show(f.arg, 5)
    if isinstance(f, (ExactlyOne, AtLeastOne)):
        head = "exactly_one" if isinstance(f, ExactlyOne) else "at_least_one"
        return f"{head}({', '.join(_show(a, 0) for a in f.args)})"
    if isinstance(f, (And, Or)) and not f.args:
        return "true" if isinstance(f, And) else "false"
    prec = _PREC[type(f)]
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        if len(f.args) == 1:
            # no surface form; prints as its only member
            return _show(f.args[0], ctx)
        # n-ary nodes are flat; nested same-type children need parentheses
        text = op.join(_show(a, prec + 1) for a in f.args)
    elif isinstance(f, Implies):
        # right associative
        text = f"{_show(f.left, prec + 1)} -> {_show(f.right, prec)}"
    else:
        text = f"{_show(f.left, prec + 1)} <-> {_show(f.right, prec + 1)}"
    return f"({text})" if prec < ctx else text


# -- normal forms -----------------------------------------------------------

def to_nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form over atoms, ``And`` and ``Or`` only.

    ``exactly_one``/``at_least_one`` are expanded into the standard
    at-least-one clause plus pairwise exclusions, which is equivalent.
    """
    if isinstance(f, Atom):
        return f if positive else Not(f)
    if isinstance(f, Pred):
        raise TypeError(f"schematic atom {to_text(f)} must be grounded first")
    if isinstance(f, Not):
        return to_nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = tuple(to_nnf(a, positive) for a in f.args)
        return And(parts) if positive else Or(parts)
    if isinstance(f, Or):
        parts = tuple(to_nnf(a, positive) for a in f.args)
        return Or(parts) if positive else And(parts)
    if isinstance(f, Implies):
        return to_nnf(Or((Not(f.left), f.right)), positive)
    if isinstance(f, Iff):
        if positive:
            return And((to_nnf(Implies(f.left, f.right)), to_nnf(Implies(f.right, f.left))))
        return Or((
            And((to_nnf(f.left), to_nnf(f.right, False))),
            And((to_nnf(f.left, False), to_nnf(f.right))),
        ))
    if isinstance(f, AtLeastOne):
        return to_nnf(Or(f.args), positive)
    if isinstance(f, ExactlyOne):
        exclusions = tuple(
            Not(And((a, b))) for a, b in itertools.combinations(f.args, 2)
        )
        return to_nnf(And((Or(f.args),) + exclusions), positive)
    raise TypeError(f"unknown formula node {f!r}")


AUX_PREFIX = "_aux"
_DISTRIBUTE_LIMIT = 64


def to_cnf(f: Formula | Iterable[Formula]) -> ClauseSet:
    """Clausal form of a formula (or of the conjunction of several).

    Disjunctions are distributed while the product stays small; past that,
    fresh ``_aux`` atoms name sub-conjunctions with one-directional
    definitions.  On a negation normal form input this keeps the satisfying
    assignments, projected onto the original atoms, unchanged.  Auxiliary
    names cannot be written in the surface syntax, so they never leak into
    queries.  Tautological clauses are dropped.
    """
    fs = (f,) if isinstance(f, Formula) else tuple(f)
    counter = itertools.count()
    clauses: set[Clause] = set()
    for g in fs:
        for c in _cnf(to_nnf(g), counter, clauses):
            clauses.add(c)
    return frozenset(c for c in clauses if not _tautological(c))


def _tautological(c: Clause) -> bool:
    return any((name, not pol) in c for name, pol in c)


def _cnf(f: Formula, counter, side: set[Clause]) -> list[Clause]:
    if isinstance(f, Atom):
        return [frozenset({(f.name, True)})]
    if isinstance(f, Not):
        return [frozenset({(f.arg.name, False)})]
    if isinstance(f, And):
        out: list[Clause] = []
        for a in f.args:
            out.extend(_cnf(a, counter, side))
        return out
    # Or
    parts = [[c for c in _cnf(a, counter, side) if not _tautological(c)] for a in f.args]
    if any(not p for p in parts):
        return []  # one disjunct is valid
    size = 1
    for p in parts:
        size *= len(p)
    if size > _DISTRIBUTE_LIMIT:
        renamed = []
        for p in parts:
            if len(p) == 1:
                renamed.append(p)
                continue
            aux = f"{AUX_PREFIX}{next(counter)}"
            for c in p:
                side.add(c | {(aux, False)})
            renamed.append([frozenset({(aux, True)})])
        parts = renamed
    return [frozenset().union(*combo) for combo in itertools.product(*parts)]


# -- satisfiability ---------------------------------------------------------

def satisfiable_clauses(clauses: ClauseSet) -> dict[str, bool] | None:
    """DPLL with unit propagation.  Returns a model or ``None``."""
    names = sorted({n for c in clauses for n, _ in c})
    index = {n: i + 1 for i, n in enumerate(names)}
    int_clauses = [[index[n] if p else -index[n] for n, p in c] for c in clauses]
    model = _dpll(int_clauses, {})
    if model is None:
        return None
    return {n: model.get(index[n], False) for n in names}


def _dpll(clauses: list[list[int]], assignment: dict[int, bool]) -> dict[int, bool] | None:
    assignment = dict(assignment)
    while True:
        simplified = []
        unit = None
        for c in clauses:
            rest = []
            sat = False
            for lit in c:
                val = assignment.get(abs(lit))
                if val is None:
                    rest.append(lit)
                elif val == (lit > 0):
                    sat = True
                    break
            if sat:
                continue
            if not rest:
                return None
            if len(rest) == 1 and unit is None:
                unit = rest[0]
            simplified.append(rest)
        clauses = simplified
        if unit is None:
            break
        assignment[abs(unit)] = unit > 0
    if not clauses:
        return assignment
    # branch on the most frequent variable
    counts: dict[int, int] = {}
    for c in clauses:
        for lit in c:
            counts[abs(lit)] = counts.get(abs(lit), 0) + 1
    var = max(sorted(counts), key=counts.__getitem__)
    for value in (True, False):
        found = _dpll(clauses, {**assignment, var: value})
        if found is not None:
            return found
    return None


@lru_cache(maxsize=65536)
def _consistent(fs: frozenset[Formula]) -> bool:
    return satisfiable_clauses(to_cnf(sorted(fs, key=to_text))) is not None


def is_consistent(fs: Iterable[Formula]) -> bool:
    """True iff some truth assignment satisfies every formula in ``fs``."""
    return _consistent(frozenset(fs))


def entails(kb: Iterable[Formula], q: Formula) -> bool:
    """Classical entailment, decided as inconsistency of ``kb`` plus the negated query."""
    return not is_consistent(frozenset(kb) | {Not(q)})


# -- schemata ---------------------------------------------------------------

class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Schema:
    """Formula template closed over the listed variables."""

    template: Formula
    variables: tuple[str, ...]

    @classmethod
    def of(cls, template: Formula) -> Schema:
        return cls(template, tuple(sorted(variables_of(template))))


def ground(s: Schema, domain: Iterable[str]) -> list[Formula]:
    """All instances of ``s`` over ``domain``, in canonical order."""
    domain = sorted(set(domain))
    if not domain:
        raise SchemaError("grounding needs a nonempty domain")
    stray = variables_of(s.template) - set(s.variables)
    if stray:
        raise SchemaError(f"schema uses unlisted variable(s) {', '.join(sorted(stray))}")
    out = []
    for values in itertools.product(domain, repeat=len(s.variables)):
        out.append(substitute(s.template, dict(zip(s.variables, values))))
    return out


def substitute(f: Formula, binding: Mapping[str, str]) -> Formula:
    """Replace variables by constants; fully constant ``Pred`` nodes become atoms."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Pred):
        args = tuple(binding.get(a, a) for a in f.args)
        if any(is_variable(a) for a in args):
            return Pred(f.name, args)
        return ground_atom(f.name, args)
    if isinstance(f, Not):
        return Not(substitute(f.arg, binding))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, binding), substitute(f.right, binding))
    if isinstance(f, Iff):
        return Iff(substitute(f.left, binding), substitute(f.right, binding))
    return type(f)(tuple(substitute(a, binding) for a in f.args))


def ground_atom(pred: str, args: Sequence[str]) -> Atom:
    return Atom("_".join((pred, *args)))
