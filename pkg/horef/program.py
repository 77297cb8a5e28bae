# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Program Model
#
# Immutable representation of first-order and higher-order definite
# programs:
#   PredicateSymbol, Variable, Constant, PredicateRef  (terms)
#   Atom, Clause, Definition, Program
#
# together with size accounting (size), definition partitioning (defs)
# and the structural queries used by the later stages.

import re
import itertools
import logging
from enum import Enum
from functools import singledispatch
from dataclasses import dataclass
from typing import Tuple, Union

from .utils import variable_names

logger = logging.getLogger(__name__)

_SYMBOL_RE = re.compile(r'^[a-z][A-Za-z0-9_]*$')
_VARIABLE_RE = re.compile(r'^[A-Z][A-Za-z0-9_]*$')


class Order(Enum):
    FIRST = 'first-order'
    HIGHER = 'higher-order'


@dataclass(frozen=True, order=True)
class PredicateSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if not _SYMBOL_RE.match(self.name or ''):
            raise ValueError('Invalid predicate symbol name: {0!r}'.format(self.name))
        if self.arity < 0:
            raise ValueError('Negative arity for {0}'.format(self.name))

    def __str__(self):
        return '{0}/{1}'.format(self.name, self.arity)


@dataclass(frozen=True)
class Variable:
    name: str
    order: Order = Order.FIRST

    def __post_init__(self):
        if not _VARIABLE_RE.match(self.name or ''):
            raise ValueError('Invalid variable name: {0!r}'.format(self.name))

    @property
    def higher_order(self):
        return self.order is Order.HIGHER

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constant:
    value: str

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PredicateRef:
    """
    A predicate symbol passed as an argument to an abstraction
    """
    symbol: PredicateSymbol

    def __str__(self):
        return self.symbol.name


Term = Union[Constant, Variable, PredicateRef]


def is_higher_order_term(term):
    return isinstance(term, PredicateRef) or (isinstance(term, Variable) and term.higher_order)


@dataclass(frozen=True)
class Atom:
    callee: Union[PredicateSymbol, Variable]
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'args', tuple(self.args))
        if isinstance(self.callee, PredicateSymbol):
            if len(self.args) != self.callee.arity:
                raise ValueError('Atom {0} has {1} arguments'.format(self.callee, len(self.args)))
        elif not (isinstance(self.callee, Variable) and self.callee.higher_order):
            raise ValueError('Atom callee must be a predicate symbol or a higher-order variable')

    @property
    def is_higher_order(self):
        return isinstance(self.callee, Variable) or any(is_higher_order_term(t) for t in self.args)

    def variables(self):
        """
        Variables in order of occurrence, callee first
        """
        if isinstance(self.callee, Variable):
            yield self.callee
        for term in self.args:
            if isinstance(term, Variable):
                yield term

    def __str__(self):
        name = self.callee.name
        if not self.args:
            return name
        return '{0}({1})'.format(name, ','.join(str(t) for t in self.args))


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: Tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'body', tuple(self.body))
        if not isinstance(self.head.callee, PredicateSymbol):
            raise ValueError('Clause heads must be predicate symbols')

    @property
    def head_symbol(self):
        return self.head.callee

    def atoms(self):
        yield self.head
        for atom in self.body:
            yield atom

    def __str__(self):
        if not self.body:
            return '{0}.'.format(self.head)
        return '{0} :- {1}.'.format(self.head, ','.join(str(a) for a in self.body))


@dataclass(frozen=True)
class Definition:
    head_symbol: PredicateSymbol
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, 'clauses', tuple(self.clauses))
        if not self.clauses:
            raise ValueError('Definition {0} has no clauses'.format(self.head_symbol))
        for clause in self.clauses:
            if clause.head_symbol != self.head_symbol:
                raise ValueError('Clause {0} does not belong to {1}'.format(clause, self.head_symbol))


@dataclass(frozen=True)
class Program:
    definitions: Tuple[Definition, ...] = ()
    targets: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'definitions', tuple(self.definitions))
        object.__setattr__(self, 'targets', frozenset(self.targets))
        seen = set()
        for definition in self.definitions:
            if definition.head_symbol in seen:
                raise ValueError('Duplicate definition for {0}'.format(definition.head_symbol))
            seen.add(definition.head_symbol)

    @classmethod
    def from_clauses(cls, clauses, targets=None):
        """
        Builds a program by partitioning clauses into definitions

        Arguments:
            clauses - Clauses in source order
            targets - (Optional) Target predicate symbols; defaults to the
                      root definitions
        """
        definitions = defs(clauses)
        if targets is None:
            targets = root_symbols(definitions)
        program = cls(definitions, frozenset(targets))
        check_targets(program)
        return program

    @property
    def clauses(self):
        return tuple(c for d in self.definitions for c in d.clauses)

    @property
    def head_symbols(self):
        return tuple(d.head_symbol for d in self.definitions)

    def definition(self, symbol):
        for d in self.definitions:
            if d.head_symbol == symbol:
                return d
        raise KeyError(symbol)

    def with_targets(self, targets):
        program = Program(self.definitions, frozenset(targets))
        check_targets(program)
        return program


@singledispatch
def size(item):
    """
    Number of literals: every head and every body literal counts as 1
    """
    raise TypeError('size() does not support {0}'.format(type(item).__name__))


@size.register
def _(item: Clause):
    return 1 + len(item.body)


@size.register
def _(item: Definition):
    return sum(size(c) for c in item.clauses)


@size.register
def _(item: Program):
    return sum(size(d) for d in item.definitions)


def defs(source):
    """
    Partitions clauses by head predicate symbol.

    Definitions follow the first appearance of their head symbol and keep
    the original clause order.

    Arguments:
        source - A Program or an iterable of clauses
    """
    clauses = source.clauses if isinstance(source, Program) else source
    groups = {}
    for clause in clauses:
        groups.setdefault(clause.head_symbol, []).append(clause)
    return [Definition(symbol, tuple(group)) for symbol, group in groups.items()]


def called_symbols(definition):
    return {atom.callee for clause in definition.clauses for atom in clause.body
            if isinstance(atom.callee, PredicateSymbol)}


def symbol_names(item):
    """
    Names of every predicate symbol occurring in a program or definition:
    heads, body callees and predicate references
    """
    definitions = item.definitions if isinstance(item, Program) else [item]
    names = set()
    for definition in definitions:
        for clause in definition.clauses:
            for atom in clause.atoms():
                if isinstance(atom.callee, PredicateSymbol):
                    names.add(atom.callee.name)
                names.update(t.symbol.name for t in atom.args if isinstance(t, PredicateRef))
    return names


def is_recursive(definition):
    return definition.head_symbol in called_symbols(definition)


def root_symbols(definitions):
    """
    Head symbols never called from another definition's body
    """
    called = set()
    for definition in definitions:
        called.update(called_symbols(definition) - {definition.head_symbol})
    return frozenset(d.head_symbol for d in definitions if d.head_symbol not in called)


def check_targets(program):
    heads = set(program.head_symbols)
    for target in sorted(program.targets - heads):
        logger.warning(f"Target {target} is not the head of any definition")


def is_higher_order_clause(clause):
    return any(atom.is_higher_order for atom in clause.atoms())


def is_higher_order_definition(definition):
    return any(is_higher_order_clause(c) for c in definition.clauses)


def is_first_order(item):
    """
    True when no higher-order variable, predicate reference or variable
    callee occurs anywhere in the program or definition
    """
    definitions = item.definitions if isinstance(item, Program) else [item]
    return not any(is_higher_order_definition(d) for d in definitions)


def clause_shape(clause):
    """
    Rewrites a clause with variables numbered by first occurrence so that
    alpha-equivalent clauses have equal shapes
    """
    numbering = {}

    def term_shape(term):
        if isinstance(term, Variable):
            number = numbering.setdefault(term, len(numbering))
            return ('var', term.order.value, number)
        if isinstance(term, PredicateRef):
            return ('ref', term.symbol)
        return ('const', term.value)

    def atom_shape(atom):
        callee = term_shape(atom.callee) if isinstance(atom.callee, Variable) else atom.callee
        return (callee, tuple(term_shape(t) for t in atom.args))

    return tuple(atom_shape(a) for a in clause.atoms())


def alpha_equivalent(left, right):
    """
    Equality of clauses or definitions up to consistent renaming of the
    variables of each clause
    """
    if isinstance(left, Clause) and isinstance(right, Clause):
        return clause_shape(left) == clause_shape(right)
    if isinstance(left, Definition) and isinstance(right, Definition):
        return (left.head_symbol == right.head_symbol and
                len(left.clauses) == len(right.clauses) and
                all(alpha_equivalent(a, b) for a, b in zip(left.clauses, right.clauses)))
    return False


def fresh_head(symbol):
    """
    Atom for 'symbol' whose arguments are distinct fresh variables A, B, ...
    """
    names = itertools.islice(variable_names('A'), symbol.arity)
    return Atom(symbol, tuple(Variable(n) for n in names))


def rename_symbol(definition, old, new):
    """
    Replaces every occurrence of the callee 'old' (heads and bodies) by 'new'
    """
    def fix(atom):
        return Atom(new, atom.args) if atom.callee == old else atom

    clauses = tuple(Clause(fix(c.head), tuple(fix(a) for a in c.body)) for c in definition.clauses)
    head_symbol = new if definition.head_symbol == old else definition.head_symbol
    return Definition(head_symbol, clauses)


def unique_clauses(definition):
    """
    Clauses with duplicates removed, first occurrence kept
    """
    seen = set()
    result = []
    for clause in definition.clauses:
        if clause not in seen:
            seen.add(clause)
            result.append(clause)
    return tuple(result)
