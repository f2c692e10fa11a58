"""Default logic extensions and defeasible warrant over exact finite world models."""
from .defaults import (
    DefaultLimitError, DefaultRule, DefaultTheory, Extension, applicable, credulous_entails,
    extensions, query, skeptical_entails,
)
from .defeat import EngineConfig, WarrantReport, compute_warrants, minimal_inconsistent_sets
from .dsl import ParseError, parse, parse_formula, print_document
from .logic import Atom, Formula, entails, is_consistent, to_cnf
from .prob import WorldModel, conditional, probability

__version__ = "0.1.0"
