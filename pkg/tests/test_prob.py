import itertools
import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import formulas
from nonmono.logic import BOTTOM, TOP, And, Atom, Not, Or
from nonmono.prob import (
    LotteryizationParams, UnknownAtomError, WorldModel, ZeroProbabilityError, check_preface_defeater,
    check_unfair_lottery, classify_relevance, conditional, format_discrepancy, lotteryization_closed_form,
    lotteryization_discrepancy, lotteryization_model, lotteryization_value_exact,
    lotteryization_value_printed, probability, remaining_losers_probability, warrant_threshold,
)
from nonmono.scenarios import make_fair_lottery, make_preface, make_unfair_lottery

QS = [F(1, 1000), F(1, 100), F(1, 10), F(1, 2)]


def tickets(n):
    return [Atom(f"t{i}") for i in range(1, n + 1)]


@st.composite
def models(draw):
    names = ("a", "b", "c")
    rows = []
    for bits in itertools.product((False, True), repeat=3):
        w = draw(st.integers(0, 5))
        if w:
            rows.append((bits, F(w)))
    if not rows:
        rows = [((True, True, True), F(1))]
    return WorldModel.build(names, rows)


def common_cause_model(rng):
    n = rng.randint(2, 5)
    g = F(rng.randint(1, 19), 20)
    good = [F(rng.randint(1, 19), 20) for _ in range(n)]
    bad = [F(rng.randint(1, 19), 20) for _ in range(n)]
    rows = []
    for c in (True, False):
        for bits in itertools.product((False, True), repeat=n):
            w = g if c else 1 - g
            for s, pg, pb in zip(bits, good, bad):
                p = pg if c else pb
                w *= p if s else 1 - p
            rows.append(((c, *bits), w))
    return WorldModel.build(["c"] + [f"s{i}" for i in range(1, n + 1)], rows), \
        [Atom(f"s{i}") for i in range(1, n + 1)]


class TestBasics:
    def test_normalises_unnormalised_weights(self):
        m = WorldModel.build(["a"], [((True,), 3), ((False,), 1)])
        assert probability(m, Atom("a")) == F(3, 4)

    def test_zero_probability(self):
        m = WorldModel.build(["a"], [((True,), 1)])
        with pytest.raises(ZeroProbabilityError):
            conditional(m, Atom("a"), Not(Atom("a")))

    def test_unknown_atom(self):
        m = WorldModel.build(["a"], [((True,), 1)])
        with pytest.raises(UnknownAtomError):
            probability(m, Atom("z"))

    @pytest.mark.parametrize("rows", [
        [((True,), -1), ((False,), 2)],
        [((True,), 0)],
        [((True, False), 1)],
        [((True,), 1), ((True,), 1)],
    ])
    def test_invalid_models(self, rows):
        with pytest.raises(ValueError):
            WorldModel.build(["a"], rows)

    def test_float_weights_use_tolerance(self):
        m = WorldModel.build(["a"], [((True,), 0.1), ((False,), 0.2)])
        assert m.inexact and m.tolerance > 0
        assert not WorldModel.build(["a"], [((True,), 1)]).inexact

    def test_json_round_trip(self):
        m = make_unfair_lottery(4).model
        assert WorldModel.from_json(json.dumps(m.to_json())) == m

    @given(models(), formulas(("a", "b", "c"), 5), formulas(("a", "b", "c"), 5))
    def test_product_rule(self, m, f, g):
        pg = probability(m, g)
        if pg:
            assert conditional(m, f, g) * pg == probability(m, And((f, g)))

    @given(models(), formulas(("a", "b", "c"), 5))
    def test_complement(self, m, f):
        assert probability(m, f) + probability(m, Not(f)) == 1
        assert probability(m, TOP) == 1 and probability(m, BOTTOM) == 0


class TestRelevance:
    def test_fair_lottery_negative(self):
        m = make_fair_lottery(3).model
        rel = classify_relevance(m, [Not(t) for t in tickets(3)])
        assert rel.kind == "negative"
        # once the other two tickets lose, this one must win
        assert rel.margins == (F(-2, 3),) * 3

    def test_independent(self):
        rows = [(bits, 1) for bits in itertools.product((False, True), repeat=2)]
        m = WorldModel.build(["a", "b"], rows)
        assert classify_relevance(m, [Atom("a"), Atom("b")]).kind == "independent"

    def test_undefined_margin_is_mixed(self):
        m = WorldModel.build(["a", "b", "c"], [((True, False, True), 1), ((False, True, True), 1)])
        rel = classify_relevance(m, [Atom("a"), Atom("b"), Atom("c")])
        assert rel.kind == "mixed" and None in rel.margins

    def test_needs_two(self):
        with pytest.raises(ValueError):
            classify_relevance(make_fair_lottery(2).model, [Atom("t1")])


class TestDefeaterInequalities:
    def test_default_preface(self):
        sc = make_preface(4)
        rep = check_preface_defeater(sc.model, tickets_like(sc, "s", 4))
        assert rep.relevance.kind == "positive"
        assert rep.rhs == F(417111, 1600000)
        assert rep.lhs == (F(71731, 1254620),) * 4
        assert rep.holds

    def test_preface_single_statement(self):
        sc = make_preface(1)
        rep = check_preface_defeater(sc.model, [Atom("s1")])
        assert rep.relevance is None and not rep.holds

    def test_preface_independent_statements(self):
        sc = make_preface(3, p_good=F(1, 2), p_bad=F(1, 2))
        rep = check_preface_defeater(sc.model, tickets_like(sc, "s", 3))
        assert rep.relevance.kind == "independent"
        assert rep.notes
        # confirming the others still shrinks the error disjunction to one term
        assert rep.holds and rep.lhs == (F(1, 2),) * 3 and rep.rhs == F(7, 8)

    def test_unfair_lottery(self):
        m = make_unfair_lottery(5).model
        rep = check_unfair_lottery(m, tickets(5))
        assert rep.lhs == (F(99, 104),) * 5
        assert rep.rhs == F(99, 100)
        assert rep.holds
        assert rep.relevance.kind == "negative"

    def test_fair_lottery_has_no_drop(self):
        rep = check_unfair_lottery(make_fair_lottery(5).model, tickets(5))
        assert rep.lhs == (F(1),) * 5 and rep.rhs == 1 and not rep.holds

    def test_random_common_cause_models(self):
        rng = random.Random(1234)
        checked = 0
        while checked < 100:
            m, ss = common_cause_model(rng)
            rep = check_preface_defeater(m, ss)
            if rep.relevance.kind == "positive":
                assert rep.holds, (m, rep)
                checked += 1


def tickets_like(sc, prefix, n):
    return [Atom(f"{prefix}{i}") for i in range(1, n + 1)]


class TestLotteryization:
    def test_printed_values(self):
        assert lotteryization_value_printed(LotteryizationParams(F(1, 10), 5)) == F(2, 3)
        assert lotteryization_value_printed(LotteryizationParams(F(1, 10), 11)) == F(10, 21)

    def test_exact_value(self):
        assert lotteryization_value_exact(LotteryizationParams(F(1, 10), 5)) == F(9, 14)

    @pytest.mark.parametrize("q", QS)
    def test_closed_form_matches_enumeration(self, q):
        for n in range(2, 51):
            p = LotteryizationParams(q, n)
            m = lotteryization_model(p)
            ps = [Atom(a) for a in m.atoms]
            others_lose = And(tuple(Not(x) for x in ps[1:]))
            assert conditional(m, ps[0], others_lose) == lotteryization_closed_form(p)

    @pytest.mark.parametrize("q", QS)
    def test_strictly_decreasing(self, q):
        for fn in (lotteryization_value_printed, lotteryization_closed_form):
            vals = [fn(LotteryizationParams(q, n)) for n in range(2, 51)]
            assert all(x > y for x, y in zip(vals, vals[1:]))

    @given(st.fractions(min_value=F(1, 1000), max_value=F(999, 1000), max_denominator=1000),
           st.integers(2, 30), st.integers(0, 29))
    def test_remaining_losers(self, q, n, j):
        if not 0 < q < 1:
            return
        p = LotteryizationParams(q, n)
        assert remaining_losers_probability(p, j % n) == q + (1 - q) / n

    def test_model_is_normalised(self):
        assert lotteryization_model(LotteryizationParams(F(1, 7), 9)).total == 1

    @pytest.mark.parametrize("q,n", [(0, 3), (1, 3), (F(1, 2), 1)])
    def test_bad_params(self, q, n):
        with pytest.raises(ValueError):
            LotteryizationParams(q, n)

    def test_discrepancy_report(self):
        rows = lotteryization_discrepancy(QS, [2, 5, 11])
        assert all(r.gap > 0 for r in rows)
        text = format_discrepancy(rows)
        assert text.splitlines()[0].startswith("q,n,printed,exact")
        assert "1/10,5,2/3,9/14,9/14," in text


class TestThreshold:
    @pytest.mark.parametrize("q,printed,exact", [
        (F(1, 10), 11, 10), (F(1, 4), 5, 4), (F(1, 2), 3, 2), (F(1, 100), 101, 100),
    ])
    def test_thresholds(self, q, printed, exact):
        assert warrant_threshold(q, "paper").n == printed
        assert warrant_threshold(q, "exact").n == exact

    def test_boundary_value_counts_as_not_warranted(self):
        # q=1/10, N=10 gives exactly 1/2 under the printed form
        assert lotteryization_value_printed(LotteryizationParams(F(1, 10), 10)) == F(1, 2)
        assert warrant_threshold(F(1, 10)).n == 11

    def test_printed_bound_may_differ(self):
        t = warrant_threshold(F(3, 10), "paper")
        assert t.printed_bound == 5 and t.n == 4

    @given(st.fractions(min_value=F(1, 200), max_value=F(99, 100), max_denominator=200),
           st.sampled_from(["paper", "exact"]))
    def test_is_smallest_flip(self, q, mode):
        fn = lotteryization_value_printed if mode == "paper" else lotteryization_closed_form
        t = warrant_threshold(q, mode)
        assert fn(LotteryizationParams(q, t.n)) < F(1, 2)
        if t.n > 2:
            assert fn(LotteryizationParams(q, t.n - 1)) >= F(1, 2)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            warrant_threshold(F(1, 10), "fuzzy")
