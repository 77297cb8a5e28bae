# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Pipeline
#   run_refactor()      parse -> abstract -> compress -> apply -> verify
#   run_abstractions()  parse -> abstract -> export library
#   run_check()         parse both programs -> compare restricted models
#
# Shared by the command line (refactor.py) and the HTTP service.

import logging
from dataclasses import dataclass
from typing import Optional

from .abstractor import CandidatePool, build_candidate_pool
from .compressor import Assignment, apply_refactoring, build_cop, solve
from .evaluator import EquivalenceResult, check_equivalence
from .library import export_abstraction_library, library_signatures, parse_abstraction_library
from .parser import parse_program, parse_targets, print_program
from .program import Program, size
from .report import RefactorReport, build_report
from .universe import Universe
from .utils import Stopwatch, thread_count

logger = logging.getLogger(__name__)


@dataclass
class RefactorOutcome:
    program: Program
    refactored: Program
    text: str
    pool: CandidatePool
    assignment: Assignment
    report: RefactorReport
    verification: Optional[EquivalenceResult] = None


@dataclass
class AbstractionsOutcome:
    library: str
    pool: CandidatePool


def load_universe(path=None):
    """
    Universe from a description file, or the standard one
    """
    if path is None:
        return Universe.standard()
    return Universe.load(path)


def _with_targets(program, targets):
    if not targets:
        return program
    return program.with_targets(parse_targets(','.join(targets), program))


def run_refactor(text, config, source='<input>', universe=None):
    """
    Refactors first-order program text

    Arguments:
        text     - Program text
        config   - RunConfig
        source   - File name used in diagnostics
        universe - (Optional) Universe for verification; otherwise loaded
                   from config.universe_path
    """
    clock = Stopwatch()
    threads = thread_count()
    program = _with_targets(parse_program(text, allow_higher_order=False, source=source), config.targets)
    logger.info(f"Parsed {len(program.definitions)} definitions, size {size(program)}")

    pool = build_candidate_pool(program, config.max_ho_vars, config.keep_singletons, threads)
    model = build_cop(program, pool.abstractions, config.weights)
    solve_clock = Stopwatch()
    assignment = solve(model, config.timeout_secs, threads)
    solve_millis = solve_clock.millis
    refactored = apply_refactoring(program, pool.abstractions, assignment)
    report = build_report(program, refactored, pool, model, assignment, solve_millis)

    if config.size_optimum:
        if config.weights.penalty == 0:
            report.size_optimum = report.output_size
        else:
            unpenalised = solve(model.with_weights(config.weights.without_penalty()), config.timeout_secs, threads)
            report.size_optimum = unpenalised.breakdown.output_size
        logger.info(f"Size-only optimum: {report.size_optimum}")

    result = None
    if config.verify:
        universe = universe or load_universe(config.universe_path)
        result = check_equivalence(program, refactored, pool.abstractions, universe, program.targets, threads)
        report.verification = result.to_dict()

    report.total_millis = clock.millis
    logger.info(f"Refactored size {report.input_size} -> {report.output_size} in {report.total_millis} ms")
    return RefactorOutcome(program, refactored, print_program(refactored), pool, assignment, report, result)


def run_abstractions(text, config, source='<input>'):
    """
    Candidate pool of a program as abstraction library text
    """
    program = parse_program(text, allow_higher_order=False, source=source)
    pool = build_candidate_pool(program, config.max_ho_vars, config.keep_singletons, thread_count())
    return AbstractionsOutcome(export_abstraction_library(pool.abstractions), pool)


def run_check(input_text, refactored_text, config, library_text=None, universe=None,
              input_source='<input>', refactored_source='<refactored>', library_source='<library>'):
    """
    Compares the restricted semantics of a program and its refactoring

    Arguments:
        input_text      - Input program text
        refactored_text - Refactored program text; may call abstractions of
                          the library without defining them
        config          - RunConfig (targets, universe_path)
        library_text    - (Optional) Abstraction library text
        universe        - (Optional) Universe; otherwise loaded from config
    """
    abstractions = []
    if library_text:
        abstractions = parse_abstraction_library(library_text, library_source)
    signatures = library_signatures(abstractions)
    program = _with_targets(parse_program(input_text, source=input_source, signatures=signatures), config.targets)
    refactored = parse_program(refactored_text, source=refactored_source, signatures=signatures,
                               targets=program.targets)
    universe = universe or load_universe(config.universe_path)
    return check_equivalence(program, refactored, abstractions, universe, program.targets, thread_count())

