# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Bounded semantics
#   specialize()
#   restricted_model()
#   check_equivalence()
#
# Refactored programs are compared with their input by computing the least
# Herbrand model of both over a finite Universe and keeping the facts of
# the target predicates.  Higher-order calls are first specialised away:
# every (abstraction, predicate tuple) pair gets a first-order copy.

import logging
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

from .exceptions import SpecializationError, UnresolvedSymbolError
from .program import (Atom, Clause, Constant, Definition, PredicateRef, PredicateSymbol, Program, Variable,
                      is_first_order, symbol_names, unique_clauses)
from .universe import parse_value, render_value, value_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundAtom:
    symbol: PredicateSymbol
    args: Tuple = ()

    def sort_key(self):
        return (self.symbol.name, self.symbol.arity, tuple(value_key(v) for v in self.args))

    def __str__(self):
        if not self.args:
            return self.symbol.name
        return '{0}({1})'.format(self.symbol.name, ','.join(render_value(v) for v in self.args))


@dataclass(frozen=True)
class RestrictedModel:
    """
    Facts of the least model whose predicate symbol is a target

    sizes records the number of derived facts after every iteration of
    the fixpoint.
    """
    facts: frozenset
    targets: frozenset
    sizes: Tuple[int, ...] = ()

    def __len__(self):
        return len(self.facts)

    def __contains__(self, atom):
        return atom in self.facts

    def sorted_facts(self):
        return sorted(self.facts, key=GroundAtom.sort_key)


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    counterexample: Optional[GroundAtom] = None
    derived_by: Optional[str] = None
    input_facts: int = 0
    refactored_facts: int = 0

    def describe(self):
        if self.equivalent:
            return 'equivalent ({0} target facts)'.format(self.input_facts)
        return 'counterexample: {0} is derived only by the {1} program'.format(self.counterexample, self.derived_by)

    def to_dict(self):
        if self.equivalent:
            return {'status': 'equivalent', 'facts': self.input_facts}
        return {'status': 'counterexample', 'atom': str(self.counterexample), 'derived_by': self.derived_by}


def _ho_head_positions(definition):
    positions = set()
    for clause in definition.clauses:
        for index, term in enumerate(clause.head.args):
            if isinstance(term, Variable) and term.higher_order:
                positions.add(index)
    return tuple(sorted(positions))


class _Specializer(object):
    def __init__(self, program, pool):
        self.templates = {}
        for abstraction in pool:
            self.templates[abstraction.symbol] = abstraction.definition
        self.first_order = []
        for definition in program.definitions:
            if _ho_head_positions(definition):
                self.templates[definition.head_symbol] = definition
            else:
                self.first_order.append(definition)
        self.positions = {s: _ho_head_positions(d) for s, d in self.templates.items()}
        self.taken = symbol_names(program) | {s.name for s in self.templates}
        for definition in self.templates.values():
            self.taken |= symbol_names(definition)
        self.copies = {}
        self.pending = []
        self.emitted = []

    def mangle(self, symbol, bindings):
        base = '{0}__{1}'.format(symbol.name, '_'.join(b.name for b in bindings))
        name = base
        for n in itertools.count(1):
            if name not in self.taken:
                break
            name = '{0}_{1}'.format(base, n)
        self.taken.add(name)
        return name

    def request(self, symbol, bindings):
        key = (symbol, bindings)
        if key not in self.copies:
            arity = symbol.arity - len(bindings)
            self.copies[key] = PredicateSymbol(self.mangle(symbol, bindings), arity)
            self.pending.append(key)
        return self.copies[key]

    def term(self, term, env, where):
        if isinstance(term, Variable) and term.higher_order:
            if term not in env:
                raise SpecializationError('Higher-order variable {0} has no binding in {1}'.format(term, where))
            return PredicateRef(env[term])
        return term

    def atom(self, atom, env, where):
        args = tuple(self.term(t, env, where) for t in atom.args)
        callee = atom.callee
        if isinstance(callee, Variable):
            if callee not in env:
                raise SpecializationError('Higher-order variable {0} has no binding in {1}'.format(callee, where))
            callee = env[callee]
            if callee.arity != len(args):
                raise SpecializationError('{0} is bound to {1} but called with {2} arguments in {3}'.format(
                    atom.callee, callee, len(args), where))
        if callee in self.templates:
            positions = self.positions[callee]
            bindings = []
            for index in positions:
                if not isinstance(args[index], PredicateRef):
                    raise SpecializationError('Call to {0} in {1} does not bind argument {2} to a predicate'.format(
                        callee, where, index + 1))
                bindings.append(args[index].symbol)
            first_order = tuple(a for i, a in enumerate(args) if i not in positions)
            return Atom(self.request(callee, tuple(bindings)), first_order)
        if any(isinstance(a, PredicateRef) for a in args):
            raise SpecializationError('{0} in {1} receives a predicate argument but is not an abstraction'.format(
                callee, where))
        return Atom(callee, args)

    def clause(self, clause, head, env):
        where = str(clause.head_symbol)
        return Clause(head, tuple(self.atom(a, env, where) for a in clause.body))

    def specialize_copy(self, key):
        symbol, bindings = key
        definition = self.templates[symbol]
        positions = self.positions[symbol]
        clauses = []
        for clause in definition.clauses:
            env = {}
            for index, value in zip(positions, bindings):
                term = clause.head.args[index]
                if isinstance(term, Variable):
                    env[term] = value
            head_args = tuple(t for i, t in enumerate(clause.head.args) if i not in positions)
            clauses.append(self.clause(clause, Atom(self.copies[key], head_args), env))
        return Definition(self.copies[key], tuple(clauses))

    def run(self, targets):
        definitions = []
        for definition in self.first_order:
            clauses = tuple(self.clause(c, c.head, {}) for c in definition.clauses)
            definitions.append(Definition(definition.head_symbol, clauses))
        while self.pending:
            key = self.pending.pop(0)
            definitions.append(self.specialize_copy(key))
        return Program(tuple(definitions), targets)


def specialize(program, pool=()):
    """
    First-order program with the same restricted semantics as 'program'

    Every call to an abstraction (a definition of the program or of 'pool'
    with higher-order head arguments) is replaced by a call to a copy of
    the abstraction specialised to the predicates of the call, e.g.
    ho_0(A,zero) becomes ho_0__zero(A).  Call sites in every first-order
    definition are specialised.

    Arguments:
        program - Program, possibly higher-order
        pool    - Abstractions the program may call without defining
    """
    symbols = {s for s in program.head_symbols}
    called = {a.callee for d in program.definitions for c in d.clauses for a in c.body}
    if is_first_order(program) and not any(a.symbol in called and a.symbol not in symbols for a in pool):
        return program
    specializer = _Specializer(program, pool)
    result = specializer.run(program.targets)
    logger.debug(f"Specialised {len(specializer.copies)} abstraction calls")
    return result


def _value(term):
    return parse_value(term.value) if isinstance(term, Constant) else term


class _Relations(object):
    """
    Tuples per predicate symbol with lazily built indexes on bound positions
    """
    def __init__(self):
        self.tuples = {}
        self.indexes = {}

    def get(self, symbol):
        return self.tuples.get(symbol, ())

    def add(self, symbol, rows):
        self.tuples.setdefault(symbol, set()).update(rows)
        self.indexes = {k: v for k, v in self.indexes.items() if k[0] != symbol}

    def lookup(self, symbol, positions, values):
        if not positions:
            return self.get(symbol)
        key = (symbol, positions)
        if key not in self.indexes:
            index = {}
            for row in self.get(symbol):
                index.setdefault(tuple(row[p] for p in positions), []).append(row)
            self.indexes[key] = index
        return self.indexes[key].get(values, ())


def _bound(atom, binding):
    return sum(1 for t in atom.args if not isinstance(t, Variable) or t in binding)


def _match(atom, row, binding):
    extended = dict(binding)
    for term, value in zip(atom.args, row):
        if isinstance(term, Variable):
            if extended.setdefault(term, value) != value:
                return None
        elif _value(term) != value:
            return None
    return extended


def _candidates(atom, relation, binding):
    positions, values = [], []
    for index, term in enumerate(atom.args):
        if isinstance(term, Variable):
            if term in binding:
                positions.append(index)
                values.append(binding[term])
        else:
            positions.append(index)
            values.append(_value(term))
    return relation.lookup(atom.callee, tuple(positions), tuple(values))


def _join(atoms, sources, binding):
    """
    Bindings satisfying every atom; sources[i] is the relation store of
    atoms[i].  The next atom is the one with most bound arguments.
    """
    if not atoms:
        yield binding
        return
    best = max(range(len(atoms)), key=lambda i: (_bound(atoms[i], binding), -i))
    atom, source = atoms[best], sources[best]
    rest = atoms[:best] + atoms[best + 1:]
    rest_sources = sources[:best] + sources[best + 1:]
    for row in _candidates(atom, source, binding):
        extended = _match(atom, row, binding)
        if extended is not None:
            yield from _join(rest, rest_sources, extended)


def _heads(clause, binding, constants):
    free = []
    for term in clause.head.args:
        if isinstance(term, Variable) and term not in binding and term not in free:
            free.append(term)
    for values in itertools.product(constants, repeat=len(free)):
        full = dict(binding)
        full.update(zip(free, values))
        yield tuple(full[t] if isinstance(t, Variable) else _value(t) for t in clause.head.args)


def restricted_model(program, universe, targets=None):
    """
    Least Herbrand model of a first-order program over 'universe',
    restricted to the target predicates

    The fixpoint is computed semi-naively: after the first round only rule
    instances using at least one fact derived in the previous round are
    evaluated.  Head variables not bound by the body range over all
    constants of the universe.

    Arguments:
        program  - First-order Program
        universe - Universe supplying constants and builtins
        targets  - (Optional) Target symbols; defaults to program.targets
    """
    targets = frozenset(program.targets if targets is None else targets)
    if not is_first_order(program):
        raise SpecializationError('restricted_model needs a first-order program; specialize it first')

    idb = set(program.head_symbols)
    unresolved = set()
    for clause in program.clauses:
        for atom in clause.body:
            if atom.callee not in idb and atom.callee not in universe.builtins:
                unresolved.add(atom.callee)
    if unresolved:
        raise UnresolvedSymbolError(unresolved)

    rules = [c for d in program.definitions for c in unique_clauses(d)]
    constants = universe.sorted_constants()
    full = _Relations()
    for symbol, relation in universe.builtins.items():
        if symbol not in idb:
            full.add(symbol, relation)

    derived = {}
    for clause in rules:
        for binding in _join(clause.body, [full] * len(clause.body), {}):
            derived.setdefault(clause.head_symbol, set()).update(_heads(clause, binding, constants))
    delta = _Relations()
    for symbol, rows in derived.items():
        full.add(symbol, rows)
        delta.add(symbol, rows)
    sizes = [sum(len(full.get(s)) for s in idb)]

    while any(delta.get(s) for s in idb):
        derived = {}
        for clause in rules:
            for i, atom in enumerate(clause.body):
                if atom.callee not in idb or not delta.get(atom.callee):
                    continue
                sources = [full] * len(clause.body)
                sources[i] = delta
                for binding in _join(clause.body, sources, {}):
                    for row in _heads(clause, binding, constants):
                        if row not in full.get(clause.head_symbol):
                            derived.setdefault(clause.head_symbol, set()).add(row)
        delta = _Relations()
        for symbol, rows in derived.items():
            full.add(symbol, rows)
            delta.add(symbol, rows)
        sizes.append(sum(len(full.get(s)) for s in idb))
        logger.debug(f"Fixpoint iteration {len(sizes)}: {sizes[-1]} facts")

    facts = frozenset(GroundAtom(symbol, row) for symbol in idb & targets for row in full.get(symbol))
    return RestrictedModel(facts, targets, tuple(sizes))


def check_equivalence(program, refactored, pool, universe, targets=None, threads=1):
    """
    Compares the restricted models of 'program' and 'refactored'

    The first atom of the symmetric difference in GroundAtom.sort_key
    order is reported as the counterexample.

    Arguments:
        program    - Input program
        refactored - Refactored program, possibly higher-order
        pool       - Abstractions 'refactored' may call without defining
        universe   - Universe for both models
        targets    - (Optional) Target symbols; defaults to program.targets
        threads    - Compute both models concurrently when above 1
    """
    targets = frozenset(program.targets if targets is None else targets)
    left = specialize(program, pool)
    right = specialize(refactored, pool)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=2) as executor:
            futures = [executor.submit(restricted_model, p, universe, targets) for p in (left, right)]
            left_model, right_model = [f.result() for f in futures]
    else:
        left_model = restricted_model(left, universe, targets)
        right_model = restricted_model(right, universe, targets)

    difference = left_model.facts ^ right_model.facts
    if not difference:
        result = EquivalenceResult(True, input_facts=len(left_model), refactored_facts=len(right_model))
    else:
        first = min(difference, key=GroundAtom.sort_key)
        side = 'input' if first in left_model.facts else 'refactored'
        result = EquivalenceResult(False, first, side, len(left_model), len(right_model))
    logger.info(f"Verification: {result.describe()}")
    return result
