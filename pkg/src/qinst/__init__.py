"""Miniature instantiation-based solver for quantified EUF with ML guidance."""

from .clausify import ClausalProblem, clausify
from .congruence import CongruenceState, cc_assert, eval_numeral_atom
from .ematch import Trigger, ematch, generate_triggers
from .enum_inst import EnumCursor, next_instantiation
from .features import FeatureVector, concat_context, formula_features, problem_features
from .gbdt import (GbdtModel, Hyperparams, TrainingSet, importance, predict,
                   select_model, train)
from .ground import GroundModel, solve_ground
from .guidance import AdmissionGate, RunLog, emit_training_file, ingest, label_run
from .smtparse import Problem, parse, parse_file
from .solver import SolveConfig, Verdict, run_with_gate, solve
from .termdb import TermDb, db_insert
from .terms import (Kind, Quantifier, Term, TermTable, kind_checksum, kind_count,
                    mk_inst_lemma, substitute)

__version__ = "0.1.0"
