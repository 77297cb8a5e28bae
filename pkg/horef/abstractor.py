# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Abstract stage
#   enumerate_abstractions()
#   canonicalize()
#   build_candidate_pool()
#   instantiate()
#
# A candidate abstraction is built from a definition by replacing every
# occurrence of a subset of its non-recursive body symbols with fresh
# higher-order variables, appending those variables to every head and to
# every recursive call, and renaming the head symbol to an invented one.

import logging
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Tuple

from .exceptions import AbstractionError
from .parser import print_clauses
from .program import (Atom, Clause, Definition, Order, PredicateRef, PredicateSymbol,
                      Variable, is_first_order, size, symbol_names)
from .utils import variable_names

logger = logging.getLogger(__name__)

# Head symbol of an abstraction in canonical form; ho1, ho2, ... when the
# abstraction body calls a predicate named ho
PLACEHOLDER = 'ho'

# Invented names of pool abstractions: ho_0, ho_1, ...
INVENTED_PREFIX = 'ho_'

DEFAULT_MAX_HO_VARS = 3


@dataclass(frozen=True)
class InstantiationTuple:
    bindings: Tuple[PredicateSymbol, ...]

    def __str__(self):
        return ','.join(b.name for b in self.bindings)


@dataclass(frozen=True)
class Abstraction:
    """
    A higher-order definition whose last ho_var_count head arguments are
    higher-order variables.

    origin maps the head symbol of every definition the abstraction was
    built from to the tuple of predicate symbols that instantiates it back
    to that definition.
    """
    definition: Definition
    ho_var_count: int
    canonical_key: str = ''
    origin: Tuple[Tuple[PredicateSymbol, InstantiationTuple], ...] = ()

    @property
    def symbol(self):
        return self.definition.head_symbol

    @property
    def name(self):
        return self.symbol.name

    @property
    def first_order_arity(self):
        return self.symbol.arity - self.ho_var_count

    @property
    def size(self):
        return size(self.definition)

    @property
    def sources(self):
        return tuple(symbol for symbol, _ in self.origin)

    def instantiation(self, symbol):
        for source, bindings in self.origin:
            if source == symbol:
                return bindings
        raise KeyError(symbol)

    @property
    def ho_arities(self):
        """
        Arity of the predicate expected by each higher-order argument
        """
        arities = [None] * self.ho_var_count
        for clause in self.definition.clauses:
            positions = _ho_positions(clause, self.ho_var_count)
            for atom in clause.body:
                if isinstance(atom.callee, Variable) and atom.callee in positions:
                    arities[positions[atom.callee]] = len(atom.args)
        return tuple(arities)

    def renamed(self, name):
        symbol = PredicateSymbol(name, self.symbol.arity)
        return replace(self, definition=_rename_head(self.definition, symbol))

    def text(self):
        return print_clauses(self.definition.clauses)


class CandidatePool(NamedTuple):
    """
    Result of the abstract stage

    Fields:
        abstractions - Kept candidates, named ho_0, ho_1, ...
        raw_count    - Distinct canonical candidates before the singleton filter
        enumerated   - Candidates enumerated over all definitions, before merging
    """
    abstractions: Tuple[Abstraction, ...]
    raw_count: int
    enumerated: int


def _ho_positions(clause, count):
    """
    Map from the higher-order variables in the head of 'clause' to their
    index among the trailing 'count' arguments
    """
    first = len(clause.head.args) - count
    positions = {}
    for index, term in enumerate(clause.head.args[first:]):
        if not (isinstance(term, Variable) and term.higher_order):
            raise AbstractionError('Head {0} lacks a trailing higher-order argument'.format(clause.head))
        positions.setdefault(term, index)
    return positions


def _placeholder(taken):
    names = itertools.chain([PLACEHOLDER], (PLACEHOLDER + str(i) for i in itertools.count(1)))
    return next(n for n in names if n not in taken)


def _foreign_names(definition):
    """
    Predicate names in 'definition' other than its own head symbol
    """
    names = set()
    for clause in definition.clauses:
        for atom in clause.body:
            if isinstance(atom.callee, PredicateSymbol) and atom.callee != definition.head_symbol:
                names.add(atom.callee.name)
        for atom in clause.atoms():
            names.update(t.symbol.name for t in atom.args if isinstance(t, PredicateRef))
    return names


def _rename_head(definition, symbol):
    old = definition.head_symbol

    def fix(atom):
        return Atom(symbol, atom.args) if atom.callee == old else atom

    clauses = tuple(Clause(fix(c.head), tuple(fix(a) for a in c.body)) for c in definition.clauses)
    return Definition(symbol, clauses)


def abstractable_symbols(definition):
    """
    Distinct non-recursive body symbols in order of first occurrence
    """
    found = []
    for clause in definition.clauses:
        for atom in clause.body:
            symbol = atom.callee
            if symbol != definition.head_symbol and symbol not in found:
                found.append(symbol)
    return found


def _abstract(definition, subset):
    """
    Raw abstraction of 'definition' over the symbols in 'subset'
    """
    ho_vars = tuple(Variable('H{0}'.format(i), Order.HIGHER) for i in range(len(subset)))
    replacement = dict(zip(subset, ho_vars))
    invented = PredicateSymbol(_placeholder(symbol_names(definition)), definition.head_symbol.arity + len(subset))

    def body_atom(atom):
        if atom.callee == definition.head_symbol:
            return Atom(invented, atom.args + ho_vars)
        if atom.callee in replacement:
            return Atom(replacement[atom.callee], atom.args)
        return atom

    clauses = tuple(Clause(Atom(invented, c.head.args + ho_vars), tuple(body_atom(a) for a in c.body))
                    for c in definition.clauses)
    origin = ((definition.head_symbol, InstantiationTuple(tuple(subset))),)
    return Abstraction(Definition(invented, clauses), len(subset), '', origin)


def _canonical_order(definition, count):
    """
    Order in which the higher-order head positions are first used, scanning
    clauses in order and bodies left to right; unused positions come last
    """
    order = []
    for clause in definition.clauses:
        positions = _ho_positions(clause, count)
        for atom in clause.body:
            for term in atom.variables():
                index = positions.get(term)
                if index is not None and index not in order:
                    order.append(index)
    order.extend(i for i in range(count) if i not in order)
    return order


def _canonical_clause(clause, head_symbol, placeholder, count, permutation, ho_names):
    positions = _ho_positions(clause, count)
    new_index = {old: new for new, old in enumerate(permutation)}
    ho_rename = {var: Variable(ho_names[new_index[index]], Order.HIGHER) for var, index in positions.items()}
    fo_names = variable_names('A', skip=set(ho_names))
    fo_rename = {}

    def term(t):
        if isinstance(t, Variable):
            if t.higher_order:
                if t not in ho_rename:
                    raise AbstractionError('Higher-order variable {0} is not a head argument'.format(t))
                return ho_rename[t]
            if t not in fo_rename:
                fo_rename[t] = Variable(next(fo_names))
            return fo_rename[t]
        return t

    def permuted(args):
        first = len(args) - count
        tail = args[first:]
        return args[:first] + tuple(tail[old] for old in permutation)

    def atom(a, is_head=False):
        callee = term(a.callee) if isinstance(a.callee, Variable) else a.callee
        args = a.args
        if is_head or a.callee == head_symbol:
            args = permuted(args)
            callee = placeholder
        return Atom(callee, tuple(term(t) for t in args))

    # first-order names follow first occurrence, head first
    head = atom(clause.head, is_head=True)
    body = tuple(atom(a) for a in clause.body)
    return Clause(head, body)


def canonical_form(definition, count):
    """
    Canonical rendering of a higher-order definition

    Returns the definition in canonical form (placeholder head symbol,
    first-order variables A, B, ... per clause, higher-order variables P, Q,
    ... in order of first use), its canonical key and the permutation
    mapping each canonical higher-order position to the original one.
    """
    permutation = _canonical_order(definition, count)
    ho_names = list(itertools.islice(variable_names('P'), count))
    placeholder = PredicateSymbol(_placeholder(_foreign_names(definition)), definition.head_symbol.arity)
    clauses = tuple(_canonical_clause(c, definition.head_symbol, placeholder, count, permutation, ho_names)
                    for c in definition.clauses)
    canonical = Definition(placeholder, clauses)
    return canonical, print_clauses(clauses), permutation


def canonicalize(abstraction):
    """
    Renames variables and the head symbol of an abstraction into canonical
    form and reorders the instantiation tuples of its origins to match.

    Two abstractions are the same candidate iff their canonical keys are
    equal.
    """
    definition, key, permutation = canonical_form(abstraction.definition, abstraction.ho_var_count)
    origin = tuple((symbol, InstantiationTuple(tuple(t.bindings[old] for old in permutation)))
                   for symbol, t in abstraction.origin)
    return Abstraction(definition, abstraction.ho_var_count, key, origin)


def enumerate_abstractions(definition, max_ho_vars=DEFAULT_MAX_HO_VARS):
    """
    Candidate abstractions of one definition

    Returns a list of (Abstraction, InstantiationTuple) pairs, one per
    non-empty subset of the abstractable symbols with at most max_ho_vars
    members, each abstraction in canonical form.

    Arguments:
        definition  - First-order definition
        max_ho_vars - Maximum number of symbols abstracted at once
    """
    if max_ho_vars < 1:
        raise AbstractionError('max_ho_vars must be at least 1')
    if not is_first_order(definition):
        raise AbstractionError('Definition {0} is not first-order'.format(definition.head_symbol))
    symbols = abstractable_symbols(definition)
    result = []
    for k in range(1, min(len(symbols), max_ho_vars) + 1):
        for subset in itertools.combinations(symbols, k):
            abstraction = canonicalize(_abstract(definition, subset))
            result.append((abstraction, abstraction.instantiation(definition.head_symbol)))
    logger.debug(f"{definition.head_symbol}: {len(symbols)} abstractable symbols, {len(result)} candidates")
    return result


def build_candidate_pool(program, max_ho_vars=DEFAULT_MAX_HO_VARS, keep_singletons=False, threads=1):
    """
    Runs the abstract stage over a whole program

    Candidates with equal canonical keys are merged and their origins
    accumulated; candidates usable by a single definition are dropped
    unless keep_singletons is set.  Kept candidates are named ho_0, ho_1,
    ... in order of first appearance.

    Arguments:
        program         - First-order program
        max_ho_vars     - Maximum number of higher-order variables
        keep_singletons - Keep candidates with a single origin
        threads         - Worker threads for per-definition enumeration
    """
    if not is_first_order(program):
        raise AbstractionError('The abstract stage needs a first-order program')

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            enumerations = list(executor.map(lambda d: enumerate_abstractions(d, max_ho_vars),
                                             program.definitions))
    else:
        enumerations = [enumerate_abstractions(d, max_ho_vars) for d in program.definitions]

    merged = {}
    enumerated = 0
    for candidates in enumerations:
        for abstraction, _ in candidates:
            enumerated += 1
            entry = merged.setdefault(abstraction.canonical_key, (abstraction, {}))
            for symbol, bindings in abstraction.origin:
                entry[1].setdefault(symbol, bindings)

    minimum = 1 if keep_singletons else 2
    taken = symbol_names(program)
    names = (INVENTED_PREFIX + str(i) for i in itertools.count())
    pool = []
    for key, (abstraction, origins) in merged.items():
        if len(origins) < minimum:
            continue
        name = next(n for n in names if n not in taken)
        kept = replace(abstraction, origin=tuple(origins.items())).renamed(name)
        pool.append(kept)

    logger.info(f"Abstract stage: {enumerated} enumerated, {len(merged)} distinct, {len(pool)} kept")
    return CandidatePool(tuple(pool), len(merged), enumerated)


def instantiate(abstraction, bindings, head_symbol):
    """
    Substitutes 'bindings' for the higher-order variables of 'abstraction'
    and renames it to 'head_symbol', giving back a first-order definition

    Arguments:
        abstraction - Abstraction to instantiate
        bindings    - InstantiationTuple, one symbol per higher-order variable
        head_symbol - Symbol of the resulting definition
    """
    count = abstraction.ho_var_count
    if len(bindings.bindings) != count:
        raise AbstractionError('{0} expects {1} predicate arguments'.format(abstraction.name, count))
    clauses = []
    for clause in abstraction.definition.clauses:
        positions = _ho_positions(clause, count)
        value = {var: bindings.bindings[index] for var, index in positions.items()}
        own_tail = clause.head.args[len(clause.head.args) - count:]

        def term(t):
            if isinstance(t, Variable) and t in value:
                return PredicateRef(value[t])
            return t

        body = []
        for atom in clause.body:
            if isinstance(atom.callee, Variable):
                symbol = value[atom.callee]
                if symbol.arity != len(atom.args):
                    raise AbstractionError('{0} bound to {1} but called with {2} arguments'.format(
                        atom.callee, symbol, len(atom.args)))
                body.append(Atom(symbol, tuple(term(t) for t in atom.args)))
            elif atom.callee == abstraction.symbol:
                first = len(atom.args) - count
                if atom.args[first:] != own_tail:
                    raise AbstractionError('Recursive call in {0} changes its predicate arguments'.format(abstraction.name))
                body.append(Atom(head_symbol, atom.args[:first]))
            else:
                body.append(Atom(atom.callee, tuple(term(t) for t in atom.args)))
        head = Atom(head_symbol, clause.head.args[:len(clause.head.args) - count])
        clauses.append(Clause(head, tuple(body)))
    return Definition(head_symbol, tuple(clauses))
