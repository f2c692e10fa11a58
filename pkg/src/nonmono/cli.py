"""Command-line front end.

    nonmono extensions FILE
    nonmono query FILE FORMULA --mode skeptical|credulous
    nonmono warrant SCENARIO-OR-FILE [--gate on|off] [--relevance always|pollock] [params]
    nonmono verify eq5|eq10|eq16|eq18 [--q Q] [--n N] [--mode paper|exact]
    nonmono scenario list | run NAME | dump NAME

Exit codes: 0 success, 1 query answered false, 2 input error, 3 internal limit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import scenarios
from .defaults import DefaultLimitError, extensions, query
from .defeat import EngineConfig, SetLimitError, compute_warrants
from .dsl import ParseError, parse, parse_formula
from .logic import Atom, to_text
from .prob import (
    LotteryizationParams, ZeroProbabilityError, as_fraction, check_preface_defeater,
    check_unfair_lottery, fmt, lotteryization_closed_form, lotteryization_value_exact,
    lotteryization_value_printed, warrant_threshold,
)

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3

SCENARIO_FLAGS = {
    "n": ("--n", int), "m": ("--m", int), "q": ("--q", str), "fair_weight": ("--fair-weight", str),
    "good_rate": ("--good-rate", str), "p_good": ("--p-good", str), "p_bad": ("--p-bad", str),
}


class InputError(Exception):
    pass


# -- rendering --------------------------------------------------------------

def approx(x) -> str:
    """``p/q (0.xxxxxx)`` for text output."""
    x = Fraction(x)
    return f"{fmt(x)} ({float(x):.6f})"


def _color(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") is not None or not stream.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


_STATUS_COLOR = {"warranted": "32", "below_threshold": "2"}


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def emit(result: dict, fmt_name: str, text_lines, csv_rows, out=None) -> None:
    out = out if out is not None else sys.stdout
    if fmt_name == "json":
        out.write(json.dumps(result, indent=2) + "\n")
    elif fmt_name == "csv":
        out.write(_csv(csv_rows()))
    else:
        out.write("\n".join(text_lines(out)) + "\n")


# -- loading ----------------------------------------------------------------

def load_document(path: str):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    try:
        return parse(p.read_text(encoding="utf-8"))
    except ParseError as e:
        raise InputError(f"{path}:{e}") from None


def _formula(text: str):
    try:
        return parse_formula(text)
    except ParseError as e:
        raise InputError(f"formula:{e}") from None


def _scenario_params(args) -> dict:
    return {k: getattr(args, k) for k in SCENARIO_FLAGS if getattr(args, k, None) is not None}


def build_scenario(name: str, args):
    entry = scenarios.REGISTRY.get(name)
    if entry is None:
        raise InputError(f"unknown scenario {name!r}; known: {', '.join(scenarios.REGISTRY)}")
    params = {k: v for k, v in _scenario_params(args).items() if k in entry.params}
    try:
        return scenarios.build(name, **params)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"scenario {name}: {e}") from None


# -- commands ---------------------------------------------------------------

def cmd_extensions(args) -> int:
    doc = load_document(args.file)
    exts = extensions(doc.theory(), cap=args.cap)
    result = {
        "file": args.file,
        "count": len(exts),
        "extensions": [
            {"generating_defaults": list(e.generating_defaults),
             "conclusions": [to_text(f) for f in e.conclusions],
             "trivial": e.trivial}
            for e in exts
        ],
    }

    def text(out):
        lines = [f"{len(exts)} extension(s)"]
        for i, e in enumerate(exts, 1):
            gens = ", ".join(e.generating_defaults) or "(none)"
            concl = ", ".join(to_text(f) for f in e.conclusions) or "(facts only)"
            lines.append(f"E{i}: defaults {gens}; concludes {concl}")
            if e.trivial:
                lines.append("    warning: facts are inconsistent; extension is trivial")
        return lines

    emit(result, args.format, text, lambda: [["extension", "generating_defaults", "conclusions"]] + [
        [i, ";".join(e.generating_defaults), ";".join(to_text(f) for f in e.conclusions)]
        for i, e in enumerate(exts, 1)
    ])
    return EXIT_OK


def cmd_query(args) -> int:
    doc = load_document(args.file)
    q = _formula(args.formula)
    res = query(doc.theory(), q, args.mode, cap=args.cap)
    result = {
        "query": to_text(q), "mode": args.mode, "answer": res.answer,
        "vacuous": res.vacuous, "extension_count": res.extension_count,
        "witnesses": [list(w) for w in res.witnesses],
    }

    def text(out):
        lines = [f"{args.mode} {to_text(q)}: {'true' if res.answer else 'false'}"]
        if res.vacuous:
            lines.append("note: the theory has no extensions; the answer is vacuous")
        label = "entailed in" if res.answer else "not entailed in"
        if args.mode == "credulous":
            label = "entailed in"
        for w in res.witnesses:
            lines.append(f"  {label} extension with defaults {', '.join(w) or '(none)'}")
        return lines

    emit(result, args.format, text, lambda: [["query", "mode", "answer", "vacuous", "witnesses"], [
        to_text(q), args.mode, str(res.answer).lower(), str(res.vacuous).lower(),
        "|".join(";".join(w) for w in res.witnesses)]])
    return EXIT_OK if res.answer else EXIT_FALSE


def _config(args, doc_config: dict | None = None) -> EngineConfig:
    values = dict(doc_config or {})
    for key, attr in (("gate_mode", "gate"), ("relevance_mode", "relevance"),
                      ("acceptance_threshold", "threshold"), ("tie_epsilon", "tie_epsilon")):
        if getattr(args, attr, None) is not None:
            values[key] = getattr(args, attr)
    try:
        return EngineConfig(**values)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"config: {e}") from None


def cmd_warrant(args) -> int:
    if Path(args.target).is_file():
        doc = load_document(args.target)
        scen = scenarios.Scenario.from_document(doc, Path(args.target).stem)
        cfg = _config(args, doc.config)
    else:
        scen = build_scenario(args.target, args)
        cfg = _config(args)
    if scen.model is None:
        raise InputError("warrant needs a world model (atoms and world statements)")
    report = compute_warrants(scen, cfg)
    result = report.to_json()

    def text(out):
        c = report.config
        lines = [f"scenario {report.scenario or '(file)'}: gate {c.gate_mode}, relevance {c.relevance_mode}, "
                 f"threshold {fmt(c.acceptance_threshold)}"]
        for s in report.statuses:
            strength = approx(s.strength) if s.strength is not None else "-"
            status = _color(s.status, _STATUS_COLOR.get(s.status, "31"), out)
            lines.append(f"  {to_text(s.formula)}: {status}  strength {strength}")
            for p in s.provenance:
                detail = ", ".join(f"{k}={v}" for k, v in p.items() if k not in ("rule", "relevance"))
                lines.append(f"      [{p['rule']}] {detail}")
        for ms in report.minimal_sets:
            lines.append(f"  minimal inconsistent set: {{{', '.join(to_text(f) for f in ms)}}}")
        lines += [f"  warning: {w}" for w in report.warnings]
        return lines

    emit(result, args.format, text, lambda: [["formula", "status", "strength", "rules"]] + [
        [to_text(s.formula), s.status, "" if s.strength is None else fmt(s.strength),
         ";".join(p["rule"] for p in s.provenance)] for s in report.statuses])
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise InputError(f"verify {args.equation} needs --{' --'.join(m.replace('_', '-') for m in missing)}")


def cmd_verify(args) -> int:
    eq = args.equation
    try:
        if eq == "eq5":
            scen = build_scenario("preface", args)
            ss = [Atom(f"s{i}") for i in range(1, scen.params["n"] + 1)]
            rep = check_preface_defeater(scen.model, ss)
            result = {"equation": eq, "params": scen.params, **rep.to_json(), "threshold": None}
        elif eq == "eq10":
            scen = build_scenario("unfair_lottery", args)
            ts = [Atom(f"t{i}") for i in range(1, scen.params["n"] + 1)]
            rep = check_unfair_lottery(scen.model, ts)
            result = {"equation": eq, "params": scen.params, **rep.to_json(), "threshold": None}
        elif eq == "eq16":
            _need(args, "q", "n")
            p = LotteryizationParams(as_fraction(args.q), args.n)
            value = lotteryization_value_printed(p) if args.mode == "paper" else lotteryization_value_exact(p)
            half = Fraction(1, 2)
            result = {"equation": eq, "mode": args.mode, "q": fmt(p.q), "n": p.n, "value": fmt(value),
                      "printed_value": fmt(lotteryization_value_printed(p)),
                      "exact_value": fmt(lotteryization_closed_form(p)),
                      "threshold": fmt(half), "holds": value > half,
                      "note": "holds = the value clears the acceptance threshold"}
        else:  # eq18
            _need(args, "q")
            th = warrant_threshold(as_fraction(args.q), args.mode)
            result = {"equation": eq, "mode": args.mode, "q": fmt(as_fraction(args.q)),
                      "threshold_n": th.n, "value": fmt(th.value), "threshold": "1/2", "holds": th.value < Fraction(1, 2),
                      "printed_bound": th.printed_bound}
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"verify {eq}: {e}") from None

    def text(out):
        lines = [f"{eq}"]
        for k, v in result.items():
            if k == "equation" or v is None:
                continue
            if isinstance(v, str) and "/" in v and k not in ("note",):
                v = approx(Fraction(v))
            elif isinstance(v, list) and v and isinstance(v[0], str) and "/" in v[0]:
                v = ", ".join(approx(Fraction(x)) for x in v)
            lines.append(f"  {k}: {v}")
        return lines

    def rows():
        out = [["key", "value"]]
        for k, v in result.items():
            if isinstance(v, list):
                v = ";".join(map(str, v))
            elif isinstance(v, dict):
                v = json.dumps(v, sort_keys=True)
            out.append([k, "" if v is None else v])
        return out

    emit(result, args.format, text, rows)
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.action == "list":
        result = {"scenarios": [
            {"name": k, "params": e.params, "summary": e.summary} for k, e in scenarios.REGISTRY.items()
        ]}
        emit(result, args.format,
             lambda out: [f"{k:16} {e.summary}" + (f"  [{', '.join(f'{p}={v}' for p, v in e.params.items())}]"
                                                   if e.params else "")
                          for k, e in scenarios.REGISTRY.items()],
             lambda: [["name", "params", "summary"]] + [
                 [k, ";".join(f"{p}={v}" for p, v in e.params.items()), e.summary]
                 for k, e in scenarios.REGISTRY.items()])
        return EXIT_OK
    if not args.name:
        raise InputError(f"scenario {args.action} needs a scenario name")
    scen = build_scenario(args.name, args)
    if args.action == "dump":
        result = {"name": scen.name, "params": scen.params, "dsl": scen.dump(),
                  "model": scen.model.to_json() if scen.model is not None else None}
        emit(result, args.format, lambda out: [scen.dump().rstrip("\n")],
             lambda: [["name", "dsl"], [scen.name, scen.dump()]])
        return EXIT_OK
    # run
    result: dict = {"name": scen.name, "params": scen.params}
    if scen.theory is not None:
        exts = extensions(scen.theory)
        result["extensions"] = [list(e.generating_defaults) for e in exts]
    if scen.model is not None:
        result["warrant"] = compute_warrants(scen, _config(args)).to_json()

    def text(out):
        lines = [f"scenario {scen.name} {scen.params}"]
        if "extensions" in result:
            lines.append(f"  {len(result['extensions'])} extension(s)")
        if "warrant" in result:
            for s in result["warrant"]["statuses"]:
                lines.append(f"  {s['formula']}: {s['status']}")
        return lines

    def rows():
        out = [["name", "item", "value"]]
        for ext in result.get("extensions", []):
            out.append([scen.name, "extension", ";".join(ext)])
        for s in result.get("warrant", {}).get("statuses", []):
            out.append([scen.name, s["formula"], s["status"]])
        return out

    emit(result, args.format, text, rows)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_scenario_flags(p):
    for key, (flag, typ) in SCENARIO_FLAGS.items():
        p.add_argument(flag, dest=key, type=typ, default=None)


def _add_config_flags(p):
    p.add_argument("--gate", choices=("on", "off"), default=None)
    p.add_argument("--relevance", choices=("always", "pollock"), default=None)
    p.add_argument("--threshold", default=None, help="acceptance threshold (rational)")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", default=None)


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    parser = _ArgParser(prog="nonmono", description="Default logic and defeasible warrant over exact world models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    p = sub.add_parser("extensions", parents=[common], help="list the extensions of a theory file")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=64)
    p.set_defaults(func=cmd_extensions)

    p = sub.add_parser("query", parents=[common], help="credulous or skeptical entailment")
    p.add_argument("file")
    p.add_argument("formula")
    p.add_argument("--mode", choices=("skeptical", "credulous"), default="skeptical")
    p.add_argument("--cap", type=int, default=64)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("warrant", parents=[common], help="warrant report for a scenario or file")
    p.add_argument("target", help="scenario name or .dt file")
    _add_scenario_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_warrant)

    p = sub.add_parser("verify", parents=[common], help="check one of the probabilistic claims")
    p.add_argument("equation", choices=("eq5", "eq10", "eq16", "eq18"))
    p.add_argument("--mode", choices=("paper", "exact"), default="paper")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scenario", parents=[common], help="list, run or dump built-in scenarios")
    p.add_argument("action", choices=("list", "run", "dump"))
    p.add_argument("name", nargs="?")
    _add_scenario_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (DefaultLimitError, SetLimitError) as e:
        print(f"limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except ZeroProbabilityError as e:
        print(f"error: conditioning on a null event: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RecursionError:
        print("limit: input too deeply nested", file=sys.stderr)
        return EXIT_LIMIT
    except Exception as e:  # keep tracebacks away from users
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
