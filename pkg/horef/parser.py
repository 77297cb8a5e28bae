# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Program Parser and Printer
#   parse_program()
#   print_program()
#
# Surface syntax:
#   head :- b1, ..., bn.      (':-', '<-' and '←' are accepted)
#   head.                     (fact)
#   % comment to end of line
#
# Lower-case identifiers are predicate symbols and constants, upper-case
# identifiers are variables.  A variable in callee position is higher-order,
# and so is every variable passed in an argument position that a
# higher-order definition declares higher-order.  A lower-case identifier
# in such a position is a predicate reference.

import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, List

from arpeggio import Optional, ZeroOrMore, EOF, NoMatch, PTNodeVisitor, visit_parse_tree
from arpeggio import RegExMatch as _
from arpeggio import ParserPython

from .exceptions import ParseError
from .program import (Atom, Clause, Constant, Order, PredicateRef, PredicateSymbol,
                      Program, Variable)

logger = logging.getLogger(__name__)

ERROR = 'error'
WARNING = 'warning'


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return '{0}:{1}:{2}'.format(self.file, self.line, self.column)


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    severity: str
    message: str

    def __str__(self):
        return '{0}: {1}: {2}'.format(self.span, self.severity, self.message)


@dataclass
class Signature:
    """
    Declares which argument positions of a symbol take predicate symbols

    Arguments:
        arity        - Arity of the symbol
        ho_positions - Map from argument position to the arity of the
                       predicate expected there
    """
    arity: int
    ho_positions: Dict[int, int] = field(default_factory=dict)


# Grammar

def pl_comment():    return _(r'%.*')
def pl_variable():   return _(r'[A-Z][A-Za-z0-9_]*')
def pl_identifier(): return _(r'[a-z][A-Za-z0-9_]*')
def pl_number():     return _(r'-?[0-9]+')
def pl_argument():   return [pl_variable, pl_identifier, pl_number]
def pl_arguments():  return '(', Optional(pl_argument, ZeroOrMore(',', pl_argument)), ')'
def pl_atom():       return [pl_identifier, pl_variable], Optional(pl_arguments)
def pl_neck():       return [':-', '<-', '←']
def pl_body():       return pl_atom, ZeroOrMore(',', pl_atom)
def pl_clause():     return pl_atom, Optional(pl_neck, pl_body), '.'
def pl_program():    return ZeroOrMore(pl_clause), EOF

_parser = ParserPython(pl_program, pl_comment)

# the Arpeggio parser keeps per-parse state
_parser_lock = threading.Lock()


def _line_column(text, position):
    position = max(0, min(position, len(text.rstrip())))
    line = text.count('\n', 0, position) + 1
    return line, position - (text.rfind('\n', 0, position) + 1) + 1


# Raw syntax tree produced by the visitor

@dataclass
class _Token:
    kind: str
    text: str
    position: int


@dataclass
class _RawAtom:
    callee: _Token
    args: List[_Token]


@dataclass
class _RawClause:
    head: _RawAtom
    body: List[_RawAtom]
    position: int


def _tokens(children):
    return [c for c in children if isinstance(c, _Token)]


class _ClauseVisitor(PTNodeVisitor):
    def visit_pl_variable(self, node, children):   return _Token('var', node.value, node.position)
    def visit_pl_identifier(self, node, children): return _Token('ident', node.value, node.position)
    def visit_pl_number(self, node, children):     return _Token('number', node.value, node.position)
    def visit_pl_argument(self, node, children):   return _tokens(children)[0]
    def visit_pl_arguments(self, node, children):  return _tokens(children)
    def visit_pl_neck(self, node, children):       return None

    def visit_pl_atom(self, node, children):
        callee = _tokens(children)[0]
        args = []
        for child in children:
            if isinstance(child, list):
                args = child
        return _RawAtom(callee, args)

    def visit_pl_body(self, node, children):
        return [c for c in children if isinstance(c, _RawAtom)]

    def visit_pl_clause(self, node, children):
        atoms = [c for c in children if isinstance(c, _RawAtom)]
        body = []
        for child in children:
            if isinstance(child, list):
                body = child
        return _RawClause(atoms[0], body, node.position)

    def visit_pl_program(self, node, children):
        return [c for c in children if isinstance(c, _RawClause)]


def _read_clauses(text, source):
    if not text.strip():
        return []
    with _parser_lock:
        try:
            tree = _parser.parse(text)
        except NoMatch as e:
            line, column = _line_column(text, e.position)
            span = SourceSpan(source, line, column)
            raise ParseError([ParseDiagnostic(span, ERROR, 'syntax error, unterminated or malformed clause')])
        clauses = visit_parse_tree(tree, _ClauseVisitor())
    return list(clauses) if clauses else []


class _Classifier(object):
    """
    Decides the order of every variable and the kind of every lower-case
    argument, then builds the program model.
    """
    def __init__(self, text, raw, source, signatures, allow_higher_order):
        self.text = text
        self.raw = raw
        self.source = source
        self.allow_higher_order = allow_higher_order
        self.errors = []
        self.warnings = []
        self.arities = {}
        self.signatures = {}
        for name, signature in (signatures or {}).items():
            self.arities[name] = signature.arity
            self.signatures[name] = dict(signature.ho_positions)

    def span(self, position):
        line, column = _line_column(self.text, position)
        return SourceSpan(self.source, line, column)

    def error(self, position, message):
        self.errors.append(ParseDiagnostic(self.span(position), ERROR, message))

    def warn(self, position, message):
        self.warnings.append(ParseDiagnostic(self.span(position), WARNING, message))

    def check_arities(self):
        for clause in self.raw:
            for atom in [clause.head] + clause.body:
                if atom.callee.kind != 'ident':
                    continue
                name = atom.callee.text
                known = self.arities.setdefault(name, len(atom.args))
                if known != len(atom.args):
                    self.error(atom.callee.position,
                               'arity inconsistency: {0} used with {1} and {2} arguments'.format(
                                   name, known, len(atom.args)))

    def clause_ho_vars(self, clause):
        ho = {a.callee.text for a in clause.body if a.callee.kind == 'var'}
        for atom in [clause.head] + clause.body:
            positions = self.signatures.get(atom.callee.text, {}) if atom.callee.kind == 'ident' else {}
            for index, arg in enumerate(atom.args):
                if arg.kind == 'var' and index in positions:
                    ho.add(arg.text)
        return ho

    def infer_signatures(self):
        """
        Fixpoint over head positions that receive higher-order variables,
        and over the arity of the predicates expected in those positions.
        """
        changed = True
        while changed:
            changed = False
            for clause in self.raw:
                if clause.head.callee.kind != 'ident':
                    continue
                ho = self.clause_ho_vars(clause)
                arity_of = self.var_arities(clause)
                positions = self.signatures.setdefault(clause.head.callee.text, {})
                for index, arg in enumerate(clause.head.args):
                    if arg.kind != 'var' or arg.text not in ho:
                        continue
                    if index not in positions or (positions[index] is None and arity_of.get(arg.text) is not None):
                        positions[index] = arity_of.get(arg.text)
                        changed = True

    def var_arities(self, clause):
        arities = {}
        for atom in clause.body:
            if atom.callee.kind == 'var':
                arities.setdefault(atom.callee.text, len(atom.args))
        for atom in [clause.head] + clause.body:
            if atom.callee.kind != 'ident':
                continue
            positions = self.signatures.get(atom.callee.text, {})
            for index, arg in enumerate(atom.args):
                if arg.kind == 'var' and positions.get(index) is not None:
                    arities.setdefault(arg.text, positions[index])
        return arities

    def term(self, token, ho_vars, expected_arity):
        if token.kind == 'var':
            order = Order.HIGHER if token.text in ho_vars else Order.FIRST
            return Variable(token.text, order)
        if token.kind == 'ident' and expected_arity is not False:
            if not self.allow_higher_order:
                self.error(token.position, 'predicate argument {0} in a first-order program'.format(token.text))
                return Constant(token.text)
            if expected_arity is None:
                self.error(token.position, 'cannot determine the arity of predicate argument {0}'.format(token.text))
                return Constant(token.text)
            known = self.arities.setdefault(token.text, expected_arity)
            if known != expected_arity:
                self.error(token.position, 'arity inconsistency: {0} passed as a predicate of arity {1}, used with {2}'.format(
                    token.text, expected_arity, known))
            return PredicateRef(PredicateSymbol(token.text, expected_arity))
        return Constant(token.text)

    def atom(self, raw, ho_vars, var_arity):
        if raw.callee.kind == 'var':
            if not self.allow_higher_order:
                self.error(raw.callee.position, 'variable {0} in callee position'.format(raw.callee.text))
                return None
            if var_arity.setdefault(raw.callee.text, len(raw.args)) != len(raw.args):
                self.error(raw.callee.position, 'higher-order variable {0} used with different arities'.format(raw.callee.text))
            callee = Variable(raw.callee.text, Order.HIGHER)
            positions = {}
        else:
            callee = PredicateSymbol(raw.callee.text, len(raw.args))
            positions = self.signatures.get(raw.callee.text, {})
        args = tuple(self.term(arg, ho_vars, positions[i] if i in positions else False)
                     for i, arg in enumerate(raw.args))
        return Atom(callee, args)

    def clauses(self):
        self.check_arities()
        if self.errors:
            return []
        self.infer_signatures()
        result = []
        seen = set()
        for raw in self.raw:
            if raw.head.callee.kind == 'var':
                self.error(raw.head.callee.position, 'clause head must be a predicate symbol')
                continue
            ho_vars = self.clause_ho_vars(raw)
            var_arity = {}
            head = self.atom(raw.head, ho_vars, var_arity)
            body = [self.atom(a, ho_vars, var_arity) for a in raw.body]
            if head is None or None in body:
                continue
            clause = Clause(head, tuple(body))
            if clause in seen:
                self.warn(raw.position, 'duplicate clause {0}'.format(clause))
            seen.add(clause)
            result.append(clause)
        return result


def parse_clauses(text, allow_higher_order=True, signatures=None, source='<input>', warnings=None):
    """
    Parses text into a list of clauses

    Arguments:
        text               - Program text
        allow_higher_order - When False any higher-order construct is an error
        signatures         - (Optional) Map from symbol name to Signature for
                             higher-order symbols defined elsewhere
        source             - File name used in diagnostics
        warnings           - (Optional) List receiving warning diagnostics
    """
    classifier = _Classifier(text, _read_clauses(text, source), source, signatures, allow_higher_order)
    clauses = classifier.clauses()
    if classifier.errors:
        raise ParseError(classifier.errors)
    for diagnostic in classifier.warnings:
        logger.warning(str(diagnostic))
    if warnings is not None:
        warnings.extend(classifier.warnings)
    return clauses


def parse_program(text, allow_higher_order=True, targets=None, signatures=None,
                  source='<input>', warnings=None):
    """
    Parses program text into a Program

    Raises ParseError carrying the diagnostics when the text is malformed.

    Arguments:
        text               - Program text
        allow_higher_order - When False any higher-order construct is an error
        targets            - (Optional) Target predicate symbols
        signatures         - (Optional) Signatures of externally defined abstractions
        source             - File name used in diagnostics
        warnings           - (Optional) List receiving warning diagnostics
    """
    clauses = parse_clauses(text, allow_higher_order, signatures, source, warnings)
    program = Program.from_clauses(clauses, targets)
    logger.debug(f"Parsed {len(program.definitions)} definitions from {source}")
    return program


def parse_targets(spec, program):
    """
    Resolves a comma separated target list ('f/2,g' or 'f,g') against the
    head symbols of a program
    """
    heads = {}
    for symbol in program.head_symbols:
        heads.setdefault(symbol.name, []).append(symbol)
    targets = set()
    for item in [s.strip() for s in spec.split(',') if s.strip()]:
        column = spec.find(item) + 1
        if '/' in item:
            name, arity = item.split('/', 1)
            try:
                targets.add(PredicateSymbol(name.strip(), int(arity)))
            except ValueError:
                raise ParseError([ParseDiagnostic(SourceSpan('<targets>', 1, column), ERROR,
                                                  'malformed target {0}; expected name/arity'.format(item))])
        elif item in heads:
            targets.update(heads[item])
        else:
            raise ParseError([ParseDiagnostic(SourceSpan('<targets>', 1, column), ERROR,
                                              'unknown target {0}; give it as name/arity'.format(item))])
    return frozenset(targets)


def print_clauses(clauses):
    return ''.join('{0}\n'.format(c) for c in clauses)


def print_program(program):
    """
    Deterministic text for a program, one clause per line
    """
    return print_clauses(program.clauses)
