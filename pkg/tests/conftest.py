import itertools
import random
import time
from contextlib import contextmanager

import pytest
from hypothesis import settings, strategies as st

from nonmono.logic import (
    And, AtLeastOne, Atom, ExactlyOne, Iff, Implies, Not, Or, atoms_of, evaluate,
)

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

ATOM_NAMES = ("a", "b", "c", "d", "e")


# -- brute-force oracles ------------------------------------------------------

def truth_table_models(formulas, names=None):
    """All assignments over ``names`` satisfying every formula."""
    formulas = list(formulas)
    if names is None:
        names = sorted(set().union(*(atoms_of(f) for f in formulas))) if formulas else []
    out = []
    for bits in itertools.product((False, True), repeat=len(names)):
        w = dict(zip(names, bits))
        if all(evaluate(f, w) for f in formulas):
            out.append(w)
    return out


def tt_consistent(formulas):
    return bool(truth_table_models(formulas))


def tt_entails(kb, q):
    names = sorted(set().union(atoms_of(q), *(atoms_of(f) for f in kb)))
    return all(evaluate(q, w) for w in truth_table_models(kb, names))


# -- seeded random formulas -------------------------------------------------

def random_formula(rng, names, depth):
    if depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(names))
    op = rng.choice("~&|>=x")
    if op == "~":
        return Not(random_formula(rng, names, depth - 1))
    if op in "&|x":
        kids = tuple(random_formula(rng, names, depth - 1) for _ in range(rng.randint(2, 4)))
        return {"&": And, "|": Or, "x": ExactlyOne}[op](kids)
    l, r = random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1)
    return Implies(l, r) if op == ">" else Iff(l, r)


def random_cases(seed=20240501, count=500, max_atoms=12):
    rng = random.Random(seed)
    for _ in range(count):
        names = [f"p{i}" for i in range(rng.randint(1, max_atoms))]
        kb = [random_formula(rng, names, 3) for _ in range(rng.randint(0, 4))]
        yield kb, random_formula(rng, names, 3)


# -- formula strategies -------------------------------------------------------

def formulas(names=ATOM_NAMES, max_leaves=8):
    leaves = st.sampled_from([Atom(n) for n in names])

    def extend(children):
        pairs = st.tuples(children, children)
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
            pairs.map(lambda p: Implies(*p)),
            pairs.map(lambda p: Iff(*p)),
            st.lists(children, min_size=1, max_size=3).map(lambda xs: ExactlyOne(tuple(xs))),
            st.lists(children, min_size=1, max_size=3).map(lambda xs: AtLeastOne(tuple(xs))),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_LOG: list[tuple[str, str, str, float]] = []


@pytest.fixture
def criterion():
    """Context manager that times a criterion and logs PASS/FAIL for the summary."""

    @contextmanager
    def run(number, title, limit_s):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException:
            ACCEPTANCE_LOG.append((str(number), title, "FAIL", time.perf_counter() - t0))
            raise
        elapsed = time.perf_counter() - t0
        ok = elapsed < limit_s
        ACCEPTANCE_LOG.append((str(number), title, "PASS" if ok else "FAIL (slow)", elapsed))
        assert ok, f"criterion {number} took {elapsed:.2f}s, limit {limit_s}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, elapsed in sorted(ACCEPTANCE_LOG, key=lambda r: int(r[0])):
        terminalreporter.write_line(f"[{verdict:>4}] criterion {number:>2}: {title} ({elapsed:.3f}s)")
