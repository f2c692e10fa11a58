#!/usr/bin/env python3
"""Compare the fair lottery and a paradoxical preface with the acceptance gate off and on.

With the gate off the two come apart (lottery tickets fall, preface
statements stand); with it on they collapse into the same pattern.
"""
import argparse
import json
from fractions import Fraction

from nonmono.defeat import EngineConfig, compute_warrants
from nonmono.logic import Atom, Not, disj
from nonmono.scenarios import make_fair_lottery, make_preface


def outcome(report, statements, disjunction):
    return {"statements": sorted({report.status_of(s) for s in statements}),
            "disjunction": report.status_of(disjunction)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tickets", type=int, default=5)
    ap.add_argument("--statements", type=int, default=6)
    ap.add_argument("--good-rate", type=Fraction, default=Fraction(9, 10))
    ap.add_argument("--p-good", type=Fraction, default=Fraction(3, 4))
    ap.add_argument("--p-bad", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--relevance", choices=("always", "pollock"), default="always")
    args = ap.parse_args(argv)

    ts = [Atom(f"t{i}") for i in range(1, args.tickets + 1)]
    ss = [Atom(f"s{i}") for i in range(1, args.statements + 1)]
    cases = {
        "lottery": (make_fair_lottery(args.tickets), [Not(t) for t in ts], disj(ts)),
        "preface": (make_preface(args.statements, args.good_rate, args.p_good, args.p_bad),
                    ss, disj([Not(s) for s in ss])),
    }
    table = {}
    for gate in ("off", "on"):
        cfg = EngineConfig(gate_mode=gate, relevance_mode=args.relevance)
        table[gate] = {name: outcome(compute_warrants(sc, cfg), st, dj) for name, (sc, st, dj) in cases.items()}
        table[gate]["indistinguishable"] = table[gate]["lottery"] == table[gate]["preface"]
    print(json.dumps(table, indent=2))


if __name__ == "__main__":
    main()
