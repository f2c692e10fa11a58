"""Reader and printer for ``.dt`` theory files.

A file is a sequence of statements, each ending in ``.``::

    % Nixon
    domain {nixon}.
    fact: quaker(X) & republican(X).
    default d1: quaker(X) : pacifist(X) / pacifist(X).
    atoms a, b.
    world 01 weight 1/4.
    world {a} weight 3/4.
    candidate: ~a.
    undercut_target: a | b.
    undercut: ~b.
    evidence: true.
    config gate_mode = on.

Formulas use ``~ & | -> <->``, ``exactly_one(...)``, ``at_least_one(...)``,
``true`` and ``false``.  Identifiers are lowercase; uppercase names are
variables and may only appear as predicate arguments.  ``%`` and ``#``
start comments.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .defaults import DefaultRule, DefaultTheory
from .logic import (
    BOTTOM, TOP, And, AtLeastOne, Atom, ExactlyOne, Formula, Iff, Implies, Not, Or, Pred,
    is_variable, to_text, variables_of, Schema, ground,
)
from .prob import WorldModel, fmt

CONFIG_KEYS = ("acceptance_threshold", "tie_epsilon", "gate_mode", "relevance_mode")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class TheoryDocument:
    domain: tuple[str, ...] = ()
    facts: list[Formula] = field(default_factory=list)
    defaults: list[DefaultRule] = field(default_factory=list)
    atoms: tuple[str, ...] | None = None
    worlds: list[tuple[tuple[bool, ...], Fraction]] = field(default_factory=list)
    evidence: Formula | None = None
    candidates: list[Formula] = field(default_factory=list)
    undercut_targets: list[Formula] = field(default_factory=list)
    undercuts: list[Formula] = field(default_factory=list)
    config: dict[str, str] = field(default_factory=dict)
    spans: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_empty(self) -> bool:
        return self == TheoryDocument()

    def ground_facts(self) -> list[Formula]:
        out: list[Formula] = []
        for f in self.facts:
            out.extend(ground(Schema.of(f), self.domain) if variables_of(f) else [f])
        return out

    def theory(self) -> DefaultTheory:
        return DefaultTheory(tuple(self.facts), tuple(self.defaults), self.domain)

    def model(self) -> WorldModel | None:
        if self.atoms is None:
            return None
        return WorldModel(tuple(self.atoms), tuple(self.worlds))


# -- tokens -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|[%\#][^\n]*)
  | (?P<nl>\n)
  | (?P<op><->|->|[~&|(){},.:/=])
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<minus>-)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def end_col(self) -> int:
        return self.col + len(self.text)


def tokenize(text: str) -> list[Token]:
    out = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        where = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message} (found {where})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            if text == "." and self.i > 0:
                prev = self.toks[self.i - 1]
                raise ParseError("expected '.' to end the statement", prev.line, prev.end_col)
            self.error(f"expected {text!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            self.error(f"expected {what}")
        return self.advance().text

    # formulas
    def formula(self) -> Formula:
        left = self.implication()
        while self.at("<->"):
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.at("|"):
            self.advance()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.at("&"):
            self.advance()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.at("~"):
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "var":
            self.error("variables may only appear as predicate arguments")
        if t.kind != "ident":
            self.error("expected a formula")
        name = self.advance().text
        if name == "true":
            return TOP
        if name == "false":
            return BOTTOM
        if name in ("exactly_one", "at_least_one"):
            self.expect("(")
            args = [self.formula()]
            while self.at(","):
                self.advance()
                args.append(self.formula())
            self.expect(")")
            return (ExactlyOne if name == "exactly_one" else AtLeastOne)(tuple(args))
        if self.at("("):
            self.advance()
            args = [self.term()]
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
            if any(is_variable(a) for a in args):
                return Pred(name, tuple(args))
            return Atom("_".join((name, *args)))
        return Atom(name)

    def term(self) -> str:
        if self.tok.kind not in ("ident", "var", "num"):
            self.error("expected a constant or variable")
        return self.advance().text

    def rational(self) -> Fraction:
        t = self.tok
        if t.kind == "minus" or t.kind != "num":
            raise ParseError("weight must be a nonnegative rational", t.line, t.col)
        self.advance()
        return Fraction(t.text)

    # statements
    def document(self) -> TheoryDocument:
        doc = TheoryDocument()
        while self.tok.kind != "eof":
            start = self.tok
            self.statement(doc, start)
        return doc

    def statement(self, doc: TheoryDocument, start: Token) -> None:
        kw = self.ident("a statement keyword")
        span = (start.line, start.col)
        if kw == "domain":
            self.expect("{")
            consts = [self.term()]
            while self.at(","):
                self.advance()
                consts.append(self.term())
            self.expect("}")
            doc.domain = tuple(sorted(set(doc.domain) | set(consts)))
        elif kw in ("fact", "candidate", "undercut", "undercut_target", "evidence"):
            self.expect(":")
            f = self.formula()
            if kw == "fact":
                doc.facts.append(f)
            elif kw == "candidate":
                doc.candidates.append(f)
            elif kw == "undercut":
                doc.undercuts.append(f)
            elif kw == "undercut_target":
                doc.undercut_targets.append(f)
            else:
                doc.evidence = f
        elif kw == "default":
            rid = self.ident("a default id")
            self.expect(":")
            pre = TOP if self.at(":") else self.formula()
            self.expect(":")
            justs = [self.formula()]
            while self.at(","):
                self.advance()
                justs.append(self.formula())
            self.expect("/")
            cons = self.formula()
            if any(d.id == rid for d in doc.defaults):
                raise ParseError(f"duplicate default id {rid!r}", start.line, start.col)
            doc.defaults.append(DefaultRule(rid, pre, tuple(justs), cons))
        elif kw == "atoms":
            names = [self.ident("an atom name")]
            while self.at(","):
                self.advance()
                names.append(self.ident("an atom name"))
            if len(set(names)) != len(names):
                raise ParseError("duplicate atom in atoms declaration", start.line, start.col)
            doc.atoms = tuple(names)
        elif kw == "world":
            doc.worlds.append(self.world(doc, start))
        elif kw == "config":
            key = self.ident("a config key")
            if key not in CONFIG_KEYS:
                raise ParseError(f"unknown config key {key!r}", start.line, start.col)
            self.expect("=")
            if self.tok.kind not in ("ident", "num"):
                self.error("expected a config value")
            doc.config[key] = self.advance().text
        else:
            raise ParseError(f"unknown statement {kw!r}", start.line, start.col)
        self.expect(".")
        doc.spans.setdefault(kw, []).append(span)

    def world(self, doc: TheoryDocument, start: Token) -> tuple[tuple[bool, ...], Fraction]:
        if doc.atoms is None:
            raise ParseError("world before any atoms declaration", start.line, start.col)
        t = self.tok
        if self.at("{"):
            self.advance()
            true: set[str] = set()
            while not self.at("}"):
                name_tok = self.tok
                name = self.ident("an atom name")
                if name not in doc.atoms:
                    raise ParseError(f"unknown atom {name!r} in world", name_tok.line, name_tok.col)
                true.add(name)
                if not self.at("}"):
                    self.expect(",")
            self.advance()
            bits = tuple(a in true for a in doc.atoms)
        elif t.kind == "num" and set(t.text) <= {"0", "1"}:
            self.advance()
            if len(t.text) != len(doc.atoms):
                raise ParseError(
                    f"world has {len(t.text)} bits but {len(doc.atoms)} atoms are declared", t.line, t.col)
            bits = tuple(c == "1" for c in t.text)
        else:
            self.error("expected world bits or a set of true atoms")
        if any(b == bits for b, _ in doc.worlds):
            raise ParseError("duplicate world", start.line, start.col)
        self.expect("weight")
        return bits, self.rational()


def parse(text: str) -> TheoryDocument:
    return _Parser(text).document()


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.error("trailing input after formula")
    return f


def print_document(doc: TheoryDocument) -> str:
    """Canonical text; statements grouped by kind in a fixed order."""
    lines = []
    if doc.domain:
        lines.append(f"domain {{{', '.join(doc.domain)}}}.")
    lines += [f"fact: {to_text(f)}." for f in doc.facts]
    for d in doc.defaults:
        pre = "" if d.prerequisite == TOP else to_text(d.prerequisite) + " "
        justs = ", ".join(to_text(j) for j in d.justifications)
        lines.append(f"default {d.id}: {pre}: {justs} / {to_text(d.consequent)}.")
    if doc.atoms is not None:
        lines.append(f"atoms {', '.join(doc.atoms)}.")
    for bits, w in doc.worlds:
        lines.append(f"world {''.join('1' if b else '0' for b in bits)} weight {fmt(w)}.")
    if doc.evidence is not None:
        lines.append(f"evidence: {to_text(doc.evidence)}.")
    lines += [f"candidate: {to_text(f)}." for f in doc.candidates]
    lines += [f"undercut_target: {to_text(f)}." for f in doc.undercut_targets]
    lines += [f"undercut: {to_text(f)}." for f in doc.undercuts]
    lines += [f"config {k} = {doc.config[k]}." for k in CONFIG_KEYS if k in doc.config]
    return "\n".join(lines) + ("\n" if lines else "")
