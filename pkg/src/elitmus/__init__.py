"""Axiomatic checker for litmus tests with precise exceptions and software-generated interrupts."""

from .config import ConfigError, ModelConfig
from .enumerate import CandidateExecution, check_final, enumerate_candidates
from .harness import SuiteReport, Verdict, allowed_outcomes, check, run_suite
from .isa import BoundExceeded, ElaborationError, Event, ThreadGraph, dependencies, elaborate_thread
from .litmus import LitmusTest, ParseError, format_test, load_test, parse_test, validate_test
from .model import AxiomReport, DerivedRelations, consistent, derive
from .relation import BACKEND, EventSet, Relation

__all__ = [
    "AxiomReport", "BACKEND", "BoundExceeded", "CandidateExecution", "ConfigError", "DerivedRelations",
    "ElaborationError", "Event", "EventSet", "LitmusTest", "ModelConfig", "ParseError", "Relation",
    "SuiteReport", "ThreadGraph", "Verdict", "allowed_outcomes", "check", "check_final", "consistent",
    "dependencies", "derive", "elaborate_thread", "enumerate_candidates", "format_test", "load_test",
    "parse_test", "run_suite", "validate_test",
]
