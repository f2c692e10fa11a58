import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import formulas, tt_consistent
from nonmono.defeat import (
    CandidateStatus, EngineConfig, Reason, SetLimitError, apply_a1, collective_defeat,
    compute_warrants, find_undercutters, is_minimal_inconsistent, minimal_inconsistent_sets,
)
from nonmono.logic import TOP, And, Atom, ExactlyOne, Not, Or, disj
from nonmono.prob import WorldModel
from nonmono.scenarios import (
    make_fair_lottery, make_korb, make_lotteryization, make_preface, make_unfair_lottery,
)

GATE_ON = EngineConfig(gate_mode="on")
a, b = Atom("a"), Atom("b")


def brute_minimal_sets(background, candidates):
    bad = [frozenset(s) for k in range(1, len(candidates) + 1)
           for s in itertools.combinations(candidates, k)
           if not tt_consistent(list(background) + list(s))]
    return {s for s in bad if not any(o < s for o in bad)}


def two_atom_model(weights):
    return WorldModel.build(["a", "b"], zip(itertools.product((False, True), repeat=2), weights))


class TestAcceptance:
    def test_strict_threshold(self):
        m = two_atom_model([1, 1, 1, 1])
        assert apply_a1(m, TOP, a) is None  # exactly 1/2
        r = apply_a1(m, TOP, Or((a, b)))
        assert r.strength == F(3, 4) and r.kind == "prima_facie"

    def test_custom_threshold(self):
        m = two_atom_model([1, 1, 1, 1])
        assert apply_a1(m, TOP, a, EngineConfig(acceptance_threshold=F(1, 3))) is not None

    @pytest.mark.parametrize("kwargs", [
        {"acceptance_threshold": 0}, {"acceptance_threshold": 1}, {"tie_epsilon": -1},
        {"gate_mode": "maybe"}, {"relevance_mode": "never"},
    ])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            EngineConfig(**kwargs)


class TestUndercutters:
    def setup_method(self):
        self.sc = make_unfair_lottery(5)
        self.target = disj([Atom(f"t{i}") for i in range(1, 6)])
        self.reason = apply_a1(self.sc.model, TOP, self.target)

    def test_gate_off_finds_all(self):
        found = find_undercutters(self.sc.model, self.reason, self.sc.undercut_conditions)
        assert len(found) == 5
        assert all(d.detail == (F(99, 104), F(99, 100)) for d in found)

    def test_gate_on_suppresses(self):
        notes = []
        found = find_undercutters(self.sc.model, self.reason, self.sc.undercut_conditions, GATE_ON, notes=notes)
        assert found == [] and len(notes) == 5
        assert "26/125" in notes[0]

    def test_must_be_built_from_candidates(self):
        notes = []
        found = find_undercutters(self.sc.model, self.reason, self.sc.undercut_conditions,
                                  candidates=[self.target], notes=notes)
        assert found == [] and all("not a conjunction" in n for n in notes)

    def test_irrelevant_condition_ignored(self):
        m = two_atom_model([1, 1, 1, 1])
        r = Reason("r", Or((a, b)), TOP, F(3, 4))
        assert find_undercutters(m, r, [b]) != []  # a|b is certain given b
        r2 = apply_a1(two_atom_model([1, 2, 1, 2]), TOP, b)
        assert find_undercutters(two_atom_model([1, 2, 1, 2]), r2, [a]) == []  # a, b independent

    def test_zero_probability_condition_skipped(self):
        m = two_atom_model([0, 1, 1, 2])
        r = Reason("r", b, TOP, F(3, 4))
        notes = []
        assert find_undercutters(m, r, [And((Not(a), Not(b)))], notes=notes) == []
        assert "= 0" in notes[0]

    def test_deductive_reasons_are_not_undercut(self):
        m = two_atom_model([1, 1, 1, 1])
        assert find_undercutters(m, Reason("d", a, TOP, F(1), "deductive"), [b]) == []


class TestMinimalSets:
    def test_fair_lottery(self):
        ts = [Atom(f"t{i}") for i in range(1, 5)]
        cands = [Not(t) for t in ts]
        assert minimal_inconsistent_sets([ExactlyOne(tuple(ts))], cands) == [tuple(cands)]

    def test_korb(self):
        sc = make_korb(3, 3)
        sets = minimal_inconsistent_sets(sc.background, sc.candidates)
        assert sets == [(Not(Atom("p1")), Not(Atom("p2")), Not(Atom("p3")))]

    def test_korb_without_p(self):
        sc = make_korb(2, 2, assume_p=False)
        sets = minimal_inconsistent_sets(sc.background, sc.candidates)
        assert (Not(Atom("p1")), Not(Atom("p2")), Not(Atom("q1")), Not(Atom("q2"))) in sets

    def test_inconsistent_background(self):
        with pytest.raises(ValueError):
            minimal_inconsistent_sets([a, Not(a)], [b])

    def test_limit(self):
        with pytest.raises(SetLimitError):
            minimal_inconsistent_sets([], [Atom(f"x{i}") for i in range(25)])

    def test_self_contradictory_candidate(self):
        assert minimal_inconsistent_sets([], [And((a, Not(a))), b]) == [(And((a, Not(a))),)]

    @given(st.lists(formulas(("a", "b", "c"), 4), max_size=1),
           st.lists(formulas(("a", "b", "c"), 4), max_size=5, unique=True))
    def test_matches_power_set(self, background, cands):
        if not tt_consistent(background):
            return
        got = minimal_inconsistent_sets(background, cands)
        assert {frozenset(s) for s in got} == brute_minimal_sets(background, cands)
        assert all(is_minimal_inconsistent(background, s) for s in got)


class TestCollectiveDefeat:
    def status(self, f, s):
        return CandidateStatus(f, "warranted", s, (), Reason("r", f, TOP, s))

    def test_equal_strengths_all_fall(self):
        sc = make_fair_lottery(3)
        cands = sc.candidates[:3]
        st_ = {f: self.status(f, F(2, 3)) for f in cands}
        out = collective_defeat(sc.model, st_, [cands])
        assert {s.status for s in out.values()} == {"collectively_defeated"}

    def test_single_weakest_is_rebutted(self):
        m = two_atom_model([1, 1, 1, 1])
        st_ = {a: self.status(a, F(3, 5)), Not(a): self.status(Not(a), F(4, 5))}
        out = collective_defeat(m, st_, [(a, Not(a))])
        assert out[a].status == "rebutted" and out[Not(a)].status == "warranted"

    def test_tie_epsilon_widens_the_tier(self):
        m = two_atom_model([1, 1, 1, 1])
        st_ = {a: self.status(a, F(3, 5)), Not(a): self.status(Not(a), F(31, 50))}
        out = collective_defeat(m, st_, [(a, Not(a))], EngineConfig(tie_epsilon=F(1, 20)))
        assert {s.status for s in out.values()} == {"collectively_defeated"}

    def test_order_independent(self):
        sc = make_fair_lottery(4)
        cands = list(sc.candidates[:4])
        sets = [tuple(cands)]
        st_ = {f: self.status(f, F(3, 4)) for f in cands}
        assert collective_defeat(sc.model, st_, sets) == collective_defeat(sc.model, st_, list(reversed(sets)))


class TestComputeWarrants:
    def test_fair_lottery(self):
        rep = compute_warrants(make_fair_lottery(5))
        losers = [Not(Atom(f"t{i}")) for i in range(1, 6)]
        assert all(rep.status_of(f) == "collectively_defeated" for f in losers)
        assert rep[losers[0]].strength == F(4, 5)
        some = disj([Atom(f"t{i}") for i in range(1, 6)])
        assert rep.status_of(some) == "warranted" and rep[some].reason.kind == "deductive"

    def test_unfair_lottery_gate_off(self):
        rep = compute_warrants(make_unfair_lottery(5))
        some = disj([Atom(f"t{i}") for i in range(1, 6)])
        assert rep.status_of(some) == "undercut" and rep[some].strength == F(99, 100)
        assert rep.with_status("warranted") == [Not(Atom(f"t{i}")) for i in range(1, 6)]
        assert rep[Not(Atom("t1"))].strength == F(401, 500)

    def test_unfair_lottery_gate_on(self):
        rep = compute_warrants(make_unfair_lottery(5), GATE_ON)
        assert rep.with_status("warranted") == [disj([Atom(f"t{i}") for i in range(1, 6)])]
        assert len(rep.with_status("collectively_defeated")) == 5

    def test_lotteryization_residual_reported(self):
        rep = compute_warrants(make_lotteryization())
        some = disj([Atom(f"p{i}") for i in range(1, 6)])
        assert rep.status_of(some) == "undercut"
        residual = [p for p in rep[some].provenance if p.get("rule") == "residual"]
        assert residual and residual[0]["strength"] == "9/14" and residual[0]["clears_threshold"]

    def test_korb(self):
        rep = compute_warrants(make_korb(3, 3))
        assert rep.status_of(Atom("p")) == "warranted"
        assert all(rep.status_of(Not(Atom(f"p{i}"))) == "collectively_defeated" for i in (1, 2, 3))
        assert all(rep.status_of(Not(Atom(f"q{j}"))) == "warranted" for j in (1, 2, 3))

    def test_complement_rebuttal(self):
        sc = make_preface(2)
        from dataclasses import replace
        s1 = Atom("s1")
        sc2 = replace(sc, candidates=(s1, Not(s1)), undercut_conditions=(), undercut_targets=())
        rep = compute_warrants(sc2)
        assert rep.status_of(Not(s1)) == "below_threshold"
        assert rep.status_of(s1) == "warranted"

    def test_zero_probability_evidence(self):
        from dataclasses import replace
        sc = replace(make_fair_lottery(2), evidence=And((Atom("t1"), Atom("t2"))))
        with pytest.raises(ZeroDivisionError):
            compute_warrants(sc)

    def test_report_json(self):
        doc = compute_warrants(make_unfair_lottery(3)).to_json()
        assert doc["config"]["gate_mode"] == "off"
        assert {c["status"] for c in doc["statuses"]} <= {"warranted", "undercut"}


class TestInvariants:
    SCENARIOS = [
        make_fair_lottery(3), make_fair_lottery(6), make_unfair_lottery(4), make_preface(3),
        make_preface(5, p_good=F(3, 4)), make_korb(2, 3), make_korb(3, 2, assume_p=False),
        make_lotteryization(F(1, 4), 6),
    ]
    CONFIGS = [EngineConfig(gate_mode=g, relevance_mode=r) for g in ("off", "on") for r in ("always", "pollock")]

    @pytest.mark.parametrize("sc", SCENARIOS, ids=lambda s: f"{s.name}{s.params}")
    @pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: f"{c.gate_mode}-{c.relevance_mode}")
    def test_warranted_set_consistent_in_always_mode(self, sc, cfg):
        rep = compute_warrants(sc, cfg)
        warranted = rep.with_status("warranted")
        if cfg.relevance_mode == "always":
            assert tt_consistent(list(sc.background) + warranted)
        for f in warranted:
            assert Not(f) not in warranted

    @pytest.mark.parametrize("sc", SCENARIOS, ids=lambda s: f"{s.name}{s.params}")
    def test_gate_only_removes_undercutters(self, sc):
        off, on = compute_warrants(sc), compute_warrants(sc, GATE_ON)
        for f in sc.candidates:
            if on.status_of(f) == "undercut":
                assert off.status_of(f) == "undercut"

    @pytest.mark.parametrize("sc", SCENARIOS, ids=lambda s: f"{s.name}{s.params}")
    def test_reported_sets_are_minimal(self, sc):
        rep = compute_warrants(sc)
        for s in rep.minimal_sets:
            assert is_minimal_inconsistent(sc.background, s)

    def test_positive_sets_escape_in_pollock_mode(self):
        sc = make_preface(6, F(9, 10), F(3, 4), F(1, 2))
        rep = compute_warrants(sc, EngineConfig(gate_mode="on", relevance_mode="pollock"))
        assert all(rep.status_of(Atom(f"s{i}")) == "warranted" for i in range(1, 7))

    def test_two_ticket_lottery_has_no_reasons(self):
        rep = compute_warrants(make_fair_lottery(2))
        assert rep.with_status("below_threshold") == [Not(Atom("t1")), Not(Atom("t2"))]

    @pytest.mark.parametrize("n", range(3, 9))
    def test_fair_lottery_losers_always_fall(self, n):
        for cfg in self.CONFIGS:
            rep = compute_warrants(make_fair_lottery(n), cfg)
            assert all(rep.status_of(Not(Atom(f"t{i}"))) == "collectively_defeated" for i in range(1, n + 1))

    def test_paradoxical_preface_is_undercut_without_gate(self):
        sc = make_preface(6, F(9, 10), F(3, 4), F(1, 2))
        error = disj([Not(Atom(f"s{i}")) for i in range(1, 7)])
        rep = compute_warrants(sc, EngineConfig(relevance_mode="pollock"))
        assert rep.status_of(error) == "undercut"
        assert all(rep.status_of(Atom(f"s{i}")) == "warranted" for i in range(1, 7))
