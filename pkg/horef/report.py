# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Refactoring report
#   RefactorReport
#   build_report()
#   emit_report()

import json
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from .program import size

logger = logging.getLogger(__name__)

ENUMERATION_NOTE = ('candidates_before_filter counts distinct canonical abstractions before the '
                    'single-definition filter; enumerated_candidates counts every (definition, '
                    'symbol subset) candidate before equal abstractions are merged')


@dataclass
class RefactorReport:
    input_size: int
    output_size: int
    objective_value: int
    objective_breakdown: dict
    proved_optimal: bool
    selected_abstractions: List[dict]
    assignments: dict
    candidates_before_filter: int
    candidates_after_filter: int
    enumerated_candidates: int
    verification: dict = field(default_factory=lambda: {'status': 'skipped'})
    solve_millis: int = 0
    total_millis: int = 0
    size_optimum: Optional[int] = None
    incumbents: List[dict] = field(default_factory=list)
    enumeration_note: str = ENUMERATION_NOTE

    @property
    def verified(self):
        return self.verification.get('status') != 'counterexample'


def build_report(program, refactored, pool, model, assignment, solve_millis=0):
    """
    Report of one compress stage run

    Arguments:
        program    - Input program
        refactored - Output of apply_refactoring
        pool       - CandidatePool the model was built from
        model      - CopModel
        assignment - Assignment returned by solve()
    """
    selected = []
    for definition in refactored.definitions:
        for a in sorted(assignment.selected):
            abstraction = pool.abstractions[a]
            if abstraction.symbol == definition.head_symbol:
                selected.append({
                    'name': abstraction.name,
                    'text': abstraction.text(),
                    'ho_vars': abstraction.ho_var_count,
                    'users': len(model.users(a)),
                    'uses': sum(1 for c in assignment.choices if c == a)
                })
    assignments = {}
    for symbol, choice in zip(model.definitions, assignment.choices):
        assignments[str(symbol)] = None if choice is None else model.abstraction_names[choice]
    return RefactorReport(
        input_size=size(program),
        output_size=size(refactored),
        objective_value=assignment.objective_value,
        objective_breakdown=assignment.breakdown.to_dict(),
        proved_optimal=assignment.proved_optimal,
        selected_abstractions=selected,
        assignments=assignments,
        candidates_before_filter=pool.raw_count,
        candidates_after_filter=len(pool.abstractions),
        enumerated_candidates=pool.enumerated,
        solve_millis=solve_millis,
        incumbents=[{'objective': o, 'millis': m} for o, m in assignment.incumbents])


def emit_report(report):
    """
    JSON text of a report, fields in declaration order
    """
    data = {
        'input_size': report.input_size,
        'output_size': report.output_size,
        'objective_value': report.objective_value,
        'objective_breakdown': report.objective_breakdown,
        'proved_optimal': report.proved_optimal,
        'selected_abstractions': report.selected_abstractions,
        'assignments': report.assignments,
        'candidates_before_filter': report.candidates_before_filter,
        'candidates_after_filter': report.candidates_after_filter,
        'enumerated_candidates': report.enumerated_candidates,
        'enumeration_note': report.enumeration_note,
        'verification': report.verification,
        'solve_millis': report.solve_millis,
        'total_millis': report.total_millis,
        'size_optimum': report.size_optimum,
        'incumbents': report.incumbents
    }
    return json.dumps(data, indent=4) + '\n'
