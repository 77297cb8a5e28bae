# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Abstraction Libraries
#   parse_abstraction_library()
#   export_abstraction_library()
#   library_signatures()
#
# A library file uses the program syntax; every definition in it must be
# higher-order, with its higher-order variables as the last head arguments:
#
#   ho_fold(A,B,P,Q) :- empty(A),P(B).
#   ho_fold(A,B,P,Q) :- head(A,C),tail(A,D),ho_fold(D,E,P,Q),Q(C,E,B).

import logging

from .abstractor import Abstraction, canonical_form
from .exceptions import AbstractionError, LibraryError
from .parser import ERROR, ParseDiagnostic, Signature, SourceSpan, parse_clauses, print_clauses
from .program import Variable, defs

logger = logging.getLogger(__name__)


def signature_of(abstraction):
    first = abstraction.first_order_arity
    positions = {first + i: arity for i, arity in enumerate(abstraction.ho_arities)}
    return Signature(abstraction.symbol.arity, positions)


def library_signatures(abstractions):
    """
    Map from abstraction name to Signature, for parsing programs that call
    abstractions defined outside the program text
    """
    return {a.name: signature_of(a) for a in abstractions}


def _line_of(text, name):
    for number, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith(name):
            return number
    return 1


def _trailing_ho_count(definition):
    counts = set()
    for clause in definition.clauses:
        count = 0
        for term in reversed(clause.head.args):
            if not (isinstance(term, Variable) and term.higher_order):
                break
            count += 1
        counts.add(count)
    return counts


def parse_abstraction_library(text, source='<library>'):
    """
    Parses an abstraction library

    The abstractions keep the names and argument order of the file; their
    canonical keys are computed so that equal candidates can be recognised.
    Raises LibraryError for a definition without higher-order head
    arguments.

    Arguments:
        text   - Library text
        source - File name used in diagnostics
    """
    clauses = parse_clauses(text, allow_higher_order=True, source=source)
    abstractions = []
    errors = []
    for definition in defs(clauses):
        counts = _trailing_ho_count(definition)
        count = counts.pop() if len(counts) == 1 else 0
        if count == 0:
            span = SourceSpan(source, _line_of(text, definition.head_symbol.name), 1)
            errors.append(ParseDiagnostic(span, ERROR, '{0} has no trailing higher-order head argument'.format(
                definition.head_symbol)))
            continue
        try:
            _, key, _ = canonical_form(definition, count)
        except AbstractionError as e:
            span = SourceSpan(source, _line_of(text, definition.head_symbol.name), 1)
            errors.append(ParseDiagnostic(span, ERROR, str(e)))
            continue
        abstractions.append(Abstraction(definition, count, key))
    if errors:
        raise LibraryError(errors)
    logger.debug(f"Loaded {len(abstractions)} abstractions from {source}")
    return abstractions


def export_abstraction_library(abstractions):
    """
    Library text for a list of abstractions

    Abstractions found in a program are preceded by a comment naming the
    definitions they were built from.
    """
    parts = []
    for abstraction in abstractions:
        if abstraction.origin:
            users = ', '.join('{0}({1})'.format(symbol.name, bindings)
                              for symbol, bindings in abstraction.origin)
            parts.append('% {0}: {1} higher-order variable(s), used by {2}\n'.format(
                abstraction.name, abstraction.ho_var_count, users))
        parts.append(print_clauses(abstraction.definition.clauses))
    return ''.join(parts)
