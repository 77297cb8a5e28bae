#!/usr/bin/env python3
#
# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Python unittests for horef
#
#   python -m unittest unittests
#
# Set HOREF_SLOW_TESTS=1 to include the scalability run.

import os
import io
import json
import random
import logging
import tempfile
import unittest
import itertools
import contextlib

import refactor
from horef.abstractor import (InstantiationTuple, build_candidate_pool, canonical_form, canonicalize,
                              enumerate_abstractions, instantiate)
from horef.compressor import (Assignment, CopModel, Weights, apply_refactoring, build_cop, solve)
from horef.config import RunConfig, from_dict, load_config
from horef.evaluator import GroundAtom, check_equivalence, restricted_model, specialize
from horef.exceptions import (AbstractionError, ConfigurationError, LibraryError, ModelError, ParseError,
                              RefactoringError, SpecializationError, UnresolvedSymbolError, UniverseError)
from horef.library import export_abstraction_library, library_signatures, parse_abstraction_library
from horef.parser import parse_clauses, parse_program, parse_targets, print_program
from horef.pipeline import run_refactor
from horef.program import (Atom, Clause, Definition, Order, PredicateRef, PredicateSymbol, Program, Variable,
                           alpha_equivalent, called_symbols, defs, is_first_order, is_recursive, rename_symbol,
                           root_symbols, size)
from horef.report import emit_report
from horef.universe import Universe, parse_value, render_value, value_key
from horef.workloads import example_text, random_program, templated_program

logging.disable(logging.CRITICAL)

UNITTEST_DATA = 'unittest_data'


def data_path(name):
    return os.path.join(UNITTEST_DATA, name)


def read_data(name):
    with open(data_path(name), 'r') as f:
        return f.read()


def read_text(path):
    with open(path, 'r') as f:
        return f.read()


def load_program(name, allow_higher_order=False, **kwargs):
    return parse_program(read_data(name), allow_higher_order=allow_higher_order, source=name, **kwargs)


def sym(name, arity):
    return PredicateSymbol(name, arity)


def keys_of(abstractions):
    return {a.canonical_key for a in abstractions}


def small_universe(elements, length):
    return Universe.from_config({'ELEMENTS': elements, 'MAX_LIST_LENGTH': length,
                                 'INT_RANGE': [min(elements), max(elements)], 'CHARS': []})


def exhaustive_objective(model):
    """
    Minimum objective over every abstraction subset, each definition taking
    its cheapest option
    """
    w = model.weights
    best = None
    for count in range(model.s_variable_count + 1):
        for subset in itertools.combinations(range(model.s_variable_count), count):
            chosen = set(subset)
            cost = sum(model.abstraction_cost(a) for a in chosen)
            for d, options in enumerate(model.candidates):
                keep = w.unabstracted * model.definition_sizes[d]
                if chosen.intersection(options):
                    keep = min(keep, 2 * w.refactored)
                cost += keep
            best = cost if best is None else min(best, cost)
    return best


def lists_run(weights=None, threads=1):
    program = load_program('lists_input.pl')
    pool = build_candidate_pool(program)
    model = build_cop(program, pool.abstractions, weights or Weights())
    assignment = solve(model, threads=threads)
    return program, pool, model, assignment


class TestProgram(unittest.TestCase):
    def test_lists_size_and_definitions(self):
        program = load_program('lists_input.pl')
        self.assertEqual(size(program), 65)
        self.assertEqual([d.head_symbol.name for d in program.definitions],
                         ['memberzero', 'mapaddone', 'memberodd', 'allnegative',
                          'chartoint', 'membereven', 'mapcube', 'inttobin'])
        self.assertEqual([size(d) for d in program.definitions], [6, 10, 6, 7, 10, 6, 10, 10])

    def test_size_of_clause_and_fact(self):
        clauses = parse_clauses('p(A) :- q(A),r(A).\nq(a).\n')
        self.assertEqual(size(clauses[0]), 3)
        self.assertEqual(size(clauses[1]), 1)
        self.assertEqual(size(Program()), 0)

    def test_defs_keeps_first_appearance_and_clause_order(self):
        clauses = parse_clauses('g(A) :- h(A).\nf(A) :- g(A).\ng(A) :- k(A).\n')
        groups = defs(clauses)
        self.assertEqual([d.head_symbol.name for d in groups], ['g', 'f'])
        self.assertEqual([str(c) for c in groups[0].clauses], ['g(A) :- h(A).', 'g(A) :- k(A).'])

    def test_recursion_and_roots(self):
        program = load_program('lists_input.pl')
        self.assertTrue(all(is_recursive(d) for d in program.definitions))
        chain = parse_program('f(A) :- g(A).\ng(A) :- h(A).\n')
        self.assertFalse(is_recursive(chain.definitions[0]))
        self.assertEqual(called_symbols(chain.definitions[0]), {sym('g', 1)})
        self.assertEqual(root_symbols(chain.definitions), {sym('f', 1)})
        self.assertEqual(chain.targets, {sym('f', 1)})
        facts = parse_program('p(a).\np(b).\n')
        self.assertFalse(is_recursive(facts.definitions[0]))

    def test_first_order_detection(self):
        self.assertTrue(is_first_order(load_program('lists_input.pl')))
        self.assertFalse(is_first_order(load_program('lists_output.pl', allow_higher_order=True)))

    def test_alpha_equivalence(self):
        left = parse_clauses('p(A,B) :- q(A,C),r(C,B).')[0]
        right = parse_clauses('p(X,Y) :- q(X,Z),r(Z,Y).')[0]
        other = parse_clauses('p(X,Y) :- q(Y,Z),r(Z,X).')[0]
        self.assertTrue(alpha_equivalent(left, right))
        self.assertFalse(alpha_equivalent(left, other))

    def test_unknown_target_is_kept(self):
        program = parse_program('f(A) :- g(A).\n', targets={sym('nothere', 1)})
        self.assertIn(sym('nothere', 1), program.targets)

    def test_invalid_terms(self):
        with self.assertRaises(ValueError):
            PredicateSymbol('Upper', 1)
        with self.assertRaises(ValueError):
            Atom(sym('p', 2), (Variable('A'),))
        with self.assertRaises(ValueError):
            Definition(sym('p', 1), ())


class TestParser(unittest.TestCase):
    def test_neck_variants_and_comments(self):
        a = parse_program('% comment\nf(A) :- g(A).\n')
        b = parse_program('f(A) <- g(A). % trailing\n')
        c = parse_program('f(A) ← g(A).\n')
        self.assertEqual(a, b)
        self.assertEqual(a, c)
        self.assertEqual(print_program(c), 'f(A) :- g(A).\n')

    def test_empty_program(self):
        self.assertEqual(parse_program('').definitions, ())
        self.assertEqual(print_program(parse_program('% nothing\n')), '')

    def test_round_trip_of_fixtures(self):
        for name in ('lists_input.pl', 'uppercase_increment.pl', 'filter.pl', 'fold.pl', 'element.pl'):
            program = load_program(name)
            text = print_program(program)
            self.assertEqual(parse_program(text), program, name)
            self.assertEqual(print_program(parse_program(text)), text, name)

    def test_round_trip_of_random_programs(self):
        for seed in range(25):
            program = random_program(random.Random(seed), 6)
            text = print_program(program)
            self.assertEqual(parse_program(text, allow_higher_order=False), program)
            self.assertEqual(print_program(program), text)

    def test_higher_order_program(self):
        program = load_program('lists_output.pl', allow_higher_order=True)
        clause = program.definition(sym('memberzero', 1)).clauses[0]
        self.assertEqual(str(clause), 'memberzero(A) :- ho3(A,zero).')
        self.assertEqual(clause.body[0].args[1], PredicateRef(sym('zero', 1)))
        ho3 = program.definition(sym('ho3', 2))
        self.assertEqual(ho3.clauses[0].head.args[1], Variable('P', Order.HIGHER))
        self.assertEqual(size(program), 37)

    def test_first_order_mode_rejects_higher_order(self):
        with self.assertRaises(ParseError):
            parse_program('f(A) :- P(A).\n', allow_higher_order=False)

    def test_syntax_error_span_inside_text(self):
        text = 'f(A) :- g(A).\nf(A) :- g(A\n'
        with self.assertRaises(ParseError) as cm:
            parse_program(text, source='broken.pl')
        span = cm.exception.diagnostics[0].span
        self.assertEqual(span.file, 'broken.pl')
        self.assertTrue(1 <= span.line <= len(text.splitlines()))
        self.assertIn('broken.pl:', str(cm.exception))

    def test_arity_inconsistency(self):
        with self.assertRaises(ParseError) as cm:
            parse_program('f(A) :- g(A).\nh(A) :- g(A,A).\n')
        self.assertIn('arity inconsistency', str(cm.exception))
        self.assertEqual(cm.exception.diagnostics[0].span.line, 2)

    def test_duplicate_clause_warning(self):
        warnings = []
        program = parse_program('f(A) :- g(A).\nf(A) :- g(A).\n', warnings=warnings)
        self.assertEqual(len(program.clauses), 2)
        self.assertEqual(len(warnings), 1)

    def test_targets(self):
        program = load_program('lists_input.pl')
        self.assertEqual(parse_targets('memberzero,mapcube/2', program), {sym('memberzero', 1), sym('mapcube', 2)})
        with self.assertRaises(ParseError):
            parse_targets('nothere', program)

    def test_malformed_targets(self):
        program = load_program('lists_input.pl')
        for spec, column in (('memberzero,f/x', 12), ('Foo/1', 1), ('f/-1', 1)):
            with self.assertRaises(ParseError) as cm:
                parse_targets(spec, program)
            span = cm.exception.diagnostics[0].span
            self.assertEqual((span.file, span.line, span.column), ('<targets>', 1, column))


class TestLibrary(unittest.TestCase):
    def test_candidate_library(self):
        abstractions = parse_abstraction_library(read_data('candidates.pl'))
        self.assertEqual(len(abstractions), 11)
        self.assertEqual(len(keys_of(abstractions)), 11)
        self.assertEqual(abstractions[0].name, 'ho3')
        self.assertEqual([a.ho_var_count for a in abstractions], [1, 2, 2, 3, 1, 2, 2, 2, 3, 3, 3])

    def test_empty_library(self):
        self.assertEqual(parse_abstraction_library(''), [])
        self.assertEqual(export_abstraction_library([]), '')

    def test_export_normalizes(self):
        abstractions = parse_abstraction_library(read_data('fold_library.pl'))
        self.assertEqual(export_abstraction_library(abstractions),
                         'ho_fold(A,B,P,Q) :- empty(A),P(B).\n'
                         'ho_fold(A,B,P,Q) :- head(A,C),tail(A,D),ho_fold(D,E,P,Q),Q(C,E,B).\n')
        self.assertEqual(library_signatures(abstractions)['ho_fold'].ho_positions, {2: 1, 3: 3})

    def test_rejects_first_order_definition(self):
        with self.assertRaises(LibraryError) as cm:
            parse_abstraction_library('ho_0(A,P) :- head(A,B),P(B).\nplain(A) :- head(A,B).\n')
        self.assertEqual(cm.exception.diagnostics[0].span.line, 2)

    def test_export_of_pool_reparses(self):
        pool = build_candidate_pool(load_program('lists_input.pl'))
        text = export_abstraction_library(pool.abstractions)
        self.assertIn('% ho_0: 1 higher-order variable(s), used by memberzero(zero)', text)
        reparsed = parse_abstraction_library(text)
        self.assertEqual(keys_of(reparsed), keys_of(pool.abstractions))


class TestAbstractor(unittest.TestCase):
    def assertSameAbstractions(self, produced, expected_text):
        expected = parse_abstraction_library(expected_text)
        self.assertEqual(keys_of(produced), keys_of(expected))
        self.assertEqual(len(produced), len(expected))

    def test_non_recursive_definition(self):
        definition = load_program('third_element.pl').definitions[0]
        pairs = enumerate_abstractions(definition, 2)
        self.assertSameAbstractions([a for a, _ in pairs],
                                    'ho1(A,B,P) :- P(A,C),P(C,D),head(D,B).\n'
                                    'ho2(A,B,P) :- tail(A,C),tail(C,D),P(D,B).\n'
                                    'ho3(A,B,P,Q) :- P(A,C),P(C,D),Q(D,B).\n')

    def test_recursive_definition(self):
        definition = load_program('element.pl').definitions[0]
        pairs = enumerate_abstractions(definition, 2)
        self.assertSameAbstractions([a for a, _ in pairs],
                                    'ho1(A,B,P) :- P(A,B).\nho1(A,B,P) :- tail(A,C),ho1(C,B,P).\n'
                                    'ho2(A,B,P) :- head(A,B).\nho2(A,B,P) :- P(A,C),ho2(C,B,P).\n'
                                    'ho3(A,B,P,Q) :- P(A,B).\nho3(A,B,P,Q) :- Q(A,C),ho3(C,B,P,Q).\n')
        for abstraction, bindings in pairs:
            self.assertNotIn(sym('f', 2), bindings.bindings)

    def test_max_ho_vars_bounds_subsets(self):
        definition = load_program('lists_input.pl').definition(sym('mapaddone', 2))
        self.assertEqual(len(enumerate_abstractions(definition, 1)), 4)
        self.assertEqual(len(enumerate_abstractions(definition, 3)), 14)
        with self.assertRaises(AbstractionError):
            enumerate_abstractions(definition, 0)

    def test_higher_order_input_rejected(self):
        program = load_program('lists_output.pl', allow_higher_order=True)
        with self.assertRaises(AbstractionError):
            enumerate_abstractions(program.definition(sym('ho3', 2)))
        with self.assertRaises(AbstractionError):
            build_candidate_pool(program)

    def test_lists_pool(self):
        program = load_program('lists_input.pl')
        pool = build_candidate_pool(program)
        self.assertEqual(pool.enumerated, 91)
        self.assertEqual(pool.raw_count, 62)
        self.assertEqual(len(pool.abstractions), 11)
        expected = parse_abstraction_library(read_data('candidates.pl'))
        self.assertEqual(keys_of(pool.abstractions), keys_of(expected))
        for abstraction in pool.abstractions:
            self.assertGreaterEqual(len(abstraction.sources), 2)
            self.assertTrue(abstraction.name.startswith('ho_'))

    def test_pool_instantiation_tuples(self):
        pool = build_candidate_pool(load_program('lists_input.pl'))
        member = next(a for a in pool.abstractions if a.ho_var_count == 1 and a.first_order_arity == 1)
        self.assertEqual(member.sources, (sym('memberzero', 1), sym('memberodd', 1), sym('membereven', 1)))
        self.assertEqual(str(member.instantiation(sym('memberodd', 1))), 'odd')
        mapper = next(a for a in pool.abstractions if a.ho_var_count == 1 and a.first_order_arity == 2)
        self.assertEqual(len(mapper.sources), 4)
        self.assertEqual(str(mapper.instantiation(sym('chartoint', 2))), 'ord')

    def test_keep_singletons(self):
        program = load_program('third_element.pl')
        self.assertEqual(len(build_candidate_pool(program, 2).abstractions), 0)
        pool = build_candidate_pool(program, 2, keep_singletons=True)
        self.assertEqual(len(pool.abstractions), 3)
        self.assertEqual(pool.raw_count, 3)

    def test_substitution_inverse(self):
        program = load_program('lists_input.pl')
        pool = build_candidate_pool(program, keep_singletons=True)
        for abstraction in pool.abstractions:
            for symbol, bindings in abstraction.origin:
                rebuilt = instantiate(abstraction, bindings, symbol)
                self.assertTrue(alpha_equivalent(rebuilt, program.definition(symbol)),
                                '{0} from {1}'.format(symbol, abstraction.name))

    def test_canonical_order_of_filter_and_fold(self):
        pool = build_candidate_pool(load_program('filter.pl'))
        two = [a for a in pool.abstractions if a.ho_var_count == 2 and a.first_order_arity == 2
               and str(a.instantiation(sym('filterodd', 2))) == 'odd,even']
        self.assertEqual(len(two), 1)
        self.assertEqual(str(two[0].instantiation(sym('filterpos', 2))), 'pos,neg')

        pool = build_candidate_pool(load_program('fold.pl'))
        fold = [a for a in pool.abstractions if a.ho_var_count == 2 and
                str(a.instantiation(sym('multlist', 2))) == 'one,mult']
        self.assertEqual(len(fold), 1)
        self.assertEqual(str(fold[0].instantiation(sym('maxlist', 2))), 'zero,max')
        library = parse_abstraction_library(read_data('fold_library.pl'))
        self.assertEqual(fold[0].canonical_key, library[0].canonical_key)

    def test_canonical_form_is_renaming_invariant(self):
        left = parse_abstraction_library('ho_a(A,P,Q) :- Q(A,B),P(B).\n')[0]
        right = parse_abstraction_library('ho_b(X,R,S) :- S(X,Y),R(Y).\n')[0]
        self.assertEqual(left.canonical_key, right.canonical_key)
        canonical, key, permutation = canonical_form(left.definition, 2)
        self.assertEqual(key, 'ho(A,P,Q) :- P(A,B),Q(B).\n')
        self.assertEqual(permutation, [1, 0])

    def test_instantiate_checks_arity(self):
        abstraction = parse_abstraction_library('ho_0(A,P) :- head(A,B),P(B).\n')[0]
        with self.assertRaises(AbstractionError):
            instantiate(abstraction, InstantiationTuple((sym('sum', 3),)), sym('f', 1))
        with self.assertRaises(AbstractionError):
            instantiate(abstraction, InstantiationTuple(()), sym('f', 1))

    def test_canonicalize_is_idempotent(self):
        pool = build_candidate_pool(load_program('lists_input.pl'), keep_singletons=True)
        for abstraction in pool.abstractions:
            once = canonicalize(abstraction)
            self.assertEqual(canonicalize(once), once)
            self.assertEqual(once.canonical_key, abstraction.canonical_key)

    def test_abstracted_symbols_leave_no_occurrence(self):
        program = load_program('lists_input.pl')
        for definition in program.definitions:
            for abstraction, bindings in enumerate_abstractions(definition):
                called = called_symbols(abstraction.definition)
                for symbol in bindings.bindings:
                    self.assertNotIn(symbol, called, '{0} in {1}'.format(symbol, abstraction.text()))

    def test_recursion_is_preserved(self):
        for name in ('lists_input.pl', 'third_element.pl'):
            program = load_program(name)
            pool = build_candidate_pool(program, 2, keep_singletons=True)
            for abstraction in pool.abstractions:
                for source in abstraction.sources:
                    self.assertEqual(is_recursive(abstraction.definition), is_recursive(program.definition(source)))
                count = abstraction.ho_var_count
                for clause in abstraction.definition.clauses:
                    tail = clause.head.args[-count:]
                    for atom in clause.body:
                        if atom.callee == abstraction.symbol:
                            self.assertEqual(atom.args[-count:], tail)

    def test_invented_names_avoid_called_predicates(self):
        for step in ('ho', 'ho_0'):
            text = ''.join('{0}(A) :- {1}(A,B),{1}(B,C),{1}(C,D),{2}(D).\n'.format(head, step, check)
                           for head, check in (('fa', 'zero'), ('fb', 'odd'), ('fc', 'even')))
            program = parse_program(text)
            pool = build_candidate_pool(program)
            single = [a for a in pool.abstractions if a.ho_var_count == 1 and a.first_order_arity == 1
                      and str(a.instantiation(sym('fa', 1))) == 'zero']
            self.assertEqual(len(single), 1, step)
            self.assertIn(sym(step, 2), called_symbols(single[0].definition))
            for abstraction in pool.abstractions:
                self.assertNotEqual(abstraction.name, step)
                self.assertFalse(is_recursive(abstraction.definition), abstraction.text())

            universe = Universe.from_config({'ELEMENTS': [0], 'MAX_LIST_LENGTH': 0, 'INT_RANGE': [0, 5],
                                             'CHARS': [], 'BUILTINS': ['zero', 'odd', 'even'],
                                             'RELATIONS': {step: [[5, 4], [4, 3], [3, 2], [2, 1], [1, 0]]}})
            assignment = solve(build_cop(program, pool.abstractions))
            refactored = apply_refactoring(program, pool.abstractions, assignment)
            self.assertLess(size(refactored), size(program))
            result = check_equivalence(program, refactored, pool.abstractions, universe)
            self.assertTrue(result.equivalent, result.describe())
            self.assertGreater(result.input_facts, 0)


class TestCompressor(unittest.TestCase):
    def test_weights(self):
        self.assertEqual(Weights.parse('1,2,3,0').as_tuple(), (1, 2, 3, 0))
        for bad in ('1,1,1', '1,1,1,-1', 'a,b,c,d'):
            with self.assertRaises(ConfigurationError):
                Weights.parse(bad)

    def test_model_counts(self):
        program = load_program('lists_input.pl')
        pool = build_candidate_pool(program)
        model = build_cop(program, pool.abstractions)
        self.assertEqual(model.n_variable_count, 8)
        self.assertEqual(model.s_variable_count, 11)
        self.assertEqual(model.r_variable_count, sum(len(a.sources) for a in pool.abstractions))
        self.assertEqual(len(model.candidates[3]), 0)

    def test_unknown_definition(self):
        program = load_program('lists_input.pl')
        pool = build_candidate_pool(program)
        other = Program(program.definitions[:2], program.targets & set(program.head_symbols[:2]))
        with self.assertRaises(ModelError):
            build_cop(other, pool.abstractions)

    def test_empty_pool(self):
        program = load_program('element.pl')
        model = build_cop(program, ())
        assignment = solve(model)
        self.assertEqual(assignment.choices, (None,))
        self.assertEqual(assignment.objective_value, size(program))
        self.assertTrue(assignment.proved_optimal)
        self.assertEqual(print_program(apply_refactoring(program, (), assignment)), read_data('element.pl'))

    def test_single_shared_abstraction(self):
        model = CopModel((sym('d1', 1), sym('d2', 1)), (6, 6), ((0,), (0,)), ('a',), (6,), (1,), ('key',))
        assignment = solve(model)
        self.assertEqual(assignment.choices, (0, 0))
        self.assertEqual(assignment.objective_value, 11)
        self.assertTrue(assignment.is_feasible(model))

    def test_lists_optimum(self):
        program, pool, model, assignment = lists_run()
        self.assertTrue(assignment.proved_optimal)
        self.assertEqual(assignment.objective_value, 39)
        breakdown = assignment.breakdown
        self.assertEqual((breakdown.unabstracted_size, breakdown.abstraction_size,
                          breakdown.refactored_size, breakdown.penalty), (7, 16, 14, 2))
        self.assertEqual(breakdown.objective(model.weights), assignment.objective_value)
        self.assertIsNone(assignment.choices[3])
        expected = parse_abstraction_library(read_data('candidates.pl'))
        selected = {pool.abstractions[a].canonical_key for a in assignment.selected}
        self.assertEqual(selected, {expected[0].canonical_key, expected[4].canonical_key})
        self.assertTrue(assignment.is_feasible(model))

    def test_lists_optimum_without_penalty(self):
        _, _, _, penalised = lists_run()
        _, _, model, plain = lists_run(Weights(1, 1, 1, 0))
        self.assertEqual(plain.selected, penalised.selected)
        self.assertEqual(plain.objective_value, 37)

    def test_lists_output_structure(self):
        program, pool, model, assignment = lists_run()
        refactored = apply_refactoring(program, pool.abstractions, assignment)
        self.assertEqual(size(refactored), 37)
        expected = load_program('lists_output.pl', allow_higher_order=True)
        for old in (sym('ho3', 2), sym('ho8', 3)):
            definition = expected.definition(old)
            _, key, _ = canonical_form(definition, 1)
            new = next(pool.abstractions[a].symbol for a in assignment.selected
                       if pool.abstractions[a].canonical_key == key)
            renamed = [rename_symbol(d, old, new) for d in expected.definitions]
            expected = Program(renamed, expected.targets)
        self.assertEqual(len(refactored.definitions), len(expected.definitions))
        for produced, wanted in zip(refactored.definitions, expected.definitions):
            self.assertTrue(alpha_equivalent(produced, wanted), str(produced.head_symbol))

    def test_refactored_clause_text(self):
        program, pool, model, assignment = lists_run()
        text = print_program(apply_refactoring(program, pool.abstractions, assignment))
        name = pool.abstractions[assignment.choices[0]].name
        self.assertIn('memberzero(A) :- {0}(A,zero).\n'.format(name), text)

    def test_all_none_is_identity(self):
        program = load_program('lists_input.pl')
        pool = build_candidate_pool(program)
        model = build_cop(program, pool.abstractions)
        none = Assignment(tuple(None for _ in program.definitions), frozenset(), 65, True,
                          model.breakdown(tuple(None for _ in program.definitions)))
        self.assertTrue(none.is_feasible(model))
        self.assertEqual(apply_refactoring(program, pool.abstractions, none), program)

    def test_missing_origin(self):
        program, pool, model, assignment = lists_run()
        choices = list(assignment.choices)
        choices[0] = assignment.choices[1]
        wrong = Assignment(tuple(choices), assignment.selected, 0, True, assignment.breakdown)
        self.assertFalse(wrong.is_feasible(model))
        with self.assertRaises(RefactoringError):
            apply_refactoring(program, pool.abstractions, wrong)

    def test_uppercase_increment_program(self):
        program = load_program('uppercase_increment.pl')
        self.assertEqual(size(program), 20)
        pool = build_candidate_pool(program)
        assignment = solve(build_cop(program, pool.abstractions))
        refactored = apply_refactoring(program, pool.abstractions, assignment)
        self.assertEqual(size(refactored), 14)
        self.assertEqual(len(assignment.selected), 1)
        abstraction = pool.abstractions[next(iter(assignment.selected))]
        self.assertEqual(abstraction.ho_var_count, 1)
        self.assertEqual(str(abstraction.instantiation(sym('f', 2))), 'uppercase')

    def test_optimality_oracle(self):
        checked = 0
        for seed in range(500):
            program = random_program(random.Random(seed), 5)
            pool = build_candidate_pool(program)
            if len(pool.abstractions) > 12 or len(program.definitions) > 10:
                continue
            model = build_cop(program, pool.abstractions)
            assignment = solve(model)
            self.assertTrue(assignment.proved_optimal)
            self.assertTrue(assignment.is_feasible(model))
            self.assertEqual(assignment.objective_value, exhaustive_objective(model), 'seed {0}'.format(seed))
            checked += 1
            if checked == 20:
                break
        self.assertEqual(checked, 20)

    def test_compression_safety(self):
        for seed in range(40):
            program = random_program(random.Random(seed), 6)
            pool = build_candidate_pool(program)
            model = build_cop(program, pool.abstractions)
            assignment = solve(model)
            refactored = apply_refactoring(program, pool.abstractions, assignment)
            self.assertLessEqual(size(refactored), size(program))
            self.assertEqual(size(refactored), assignment.breakdown.output_size)
            if not pool.abstractions:
                self.assertEqual(assignment.selected, frozenset())

    def test_incumbents_strictly_decrease(self):
        for seed in range(10):
            program = random_program(random.Random(seed), 6)
            pool = build_candidate_pool(program)
            assignment = solve(build_cop(program, pool.abstractions))
            objectives = [o for o, _ in assignment.incumbents]
            self.assertEqual(objectives, sorted(set(objectives), reverse=True))
            self.assertEqual(objectives[-1], assignment.objective_value)

    def test_parallel_matches_sequential(self):
        _, _, _, sequential = lists_run()
        _, _, _, parallel = lists_run(threads=4)
        self.assertEqual(parallel.choices, sequential.choices)
        self.assertEqual(parallel.objective_value, sequential.objective_value)

    def test_expired_timeout(self):
        program = load_program('lists_input.pl')
        pool = build_candidate_pool(program)
        model = build_cop(program, pool.abstractions)
        assignment = solve(model, timeout=-1)
        self.assertFalse(assignment.proved_optimal)
        self.assertTrue(assignment.is_feasible(model))
        self.assertLessEqual(assignment.objective_value, 65)


class TestUniverse(unittest.TestCase):
    def test_standard_universe(self):
        universe = Universe.standard()
        lists = [c for c in universe.constants if isinstance(c, tuple)]
        self.assertEqual(len(lists), 1 + 3 + 9 + 27 + 81)
        self.assertIn((sym('increment', 2)), universe.builtins)
        self.assertIn(((0, 1), 0), universe.relation(sym('head', 2)))
        self.assertIn(((0, 1), (1,)), universe.relation(sym('tail', 2)))
        self.assertIn((4, 5), universe.relation(sym('increment', 2)))
        self.assertNotIn((5, 6), universe.relation(sym('increment', 2)))
        self.assertIn(('a', 'A'), universe.relation(sym('uppercase', 2)))
        self.assertEqual(universe.relation(sym('ord', 2)), frozenset())
        self.assertEqual(universe.relation(sym('cube', 2)), {(0, 0), (1, 1)})

    def test_every_builtin_tuple_is_a_constant(self):
        universe = Universe.standard()
        for relation in universe.builtins.values():
            for row in relation:
                for value in row:
                    self.assertIn(value, universe.constants)

    def test_load_description(self):
        universe = Universe.load(data_path('small_universe.json'))
        self.assertIn(('ann', 'bob'), universe.relation(sym('parent', 2)))
        self.assertIn('ann', universe.constants)
        self.assertNotIn(sym('sum', 3), universe.builtins)

    def test_malformed_descriptions(self):
        for config in ({'BUILTINS': ['nosuch']}, {'COLOURS': []}, {'INT_RANGE': [3, 1]},
                       {'RELATIONS': {'r': [[1], [1, 2]]}}, {'RELATIONS': {'r': [1]}}):
            with self.assertRaises(UniverseError):
                Universe.from_config(config)

    def test_values(self):
        self.assertEqual(parse_value('-1'), -1)
        self.assertEqual(parse_value('a'), 'a')
        self.assertEqual(parse_value('[0,[1,2],[]]'), (0, (1, 2), ()))
        self.assertEqual(render_value((0, (1, 2), ())), '[0,[1,2],[]]')
        ordered = sorted([(1,), 'a', (0, 0), 3, (0,), ()], key=value_key)
        self.assertEqual(ordered, [3, 'a', (), (0,), (0, 0), (1,)])


class TestEvaluator(unittest.TestCase):
    def test_memberzero_model(self):
        program = parse_program('memberzero(A) :- head(A,B),zero(B).\nmemberzero(A) :- tail(A,B),memberzero(B).\n')
        model = restricted_model(program, small_universe([0, 1], 2), {sym('memberzero', 1)})
        self.assertEqual([str(f) for f in model.sorted_facts()],
                         ['memberzero([0])', 'memberzero([0,0])', 'memberzero([0,1])', 'memberzero([1,0])'])

    def test_allnegative_model(self):
        program = parse_program('allnegative(A) :- empty(A).\n'
                                'allnegative(A) :- head(A,B),tail(A,C),negative(B),allnegative(C).\n')
        model = restricted_model(program, small_universe([-1, 1], 2))
        self.assertEqual([str(f) for f in model.sorted_facts()],
                         ['allnegative([])', 'allnegative([-1])', 'allnegative([-1,-1])'])

    def test_empty_targets(self):
        program = load_program('lists_input.pl')
        self.assertEqual(len(restricted_model(program, Universe.standard(), set())), 0)

    def test_fixpoint_is_monotone_and_filter_commutes(self):
        program = load_program('lists_input.pl')
        universe = small_universe([0, 1], 3)
        everything = restricted_model(program, universe, set(program.head_symbols))
        sizes = list(everything.sizes)
        self.assertEqual(sizes, sorted(sizes))
        self.assertEqual(sizes[-1], len(everything))
        only = {sym('memberzero', 1)}
        filtered = restricted_model(program, universe, only)
        self.assertEqual(filtered.facts, {f for f in everything.facts if f.symbol in only})

    def test_unbound_head_variable_ranges_over_constants(self):
        program = parse_program('p(A,B) :- zero(A).\n')
        universe = small_universe([0, 1], 1)
        model = restricted_model(program, universe)
        self.assertEqual(len(model), len(universe.constants))

    def test_unresolved_symbols(self):
        program = parse_program('f(A) :- nosuch(A),zero(A).\n')
        with self.assertRaises(UnresolvedSymbolError) as cm:
            restricted_model(program, Universe.standard())
        self.assertEqual(cm.exception.symbols, [sym('nosuch', 1)])
        self.assertIn('nosuch/1', str(cm.exception))

    def test_specialize_first_order_unchanged(self):
        program = load_program('lists_input.pl')
        self.assertIs(specialize(program, ()), program)

    def test_specialize_lists_output(self):
        original = load_program('lists_input.pl')
        output = load_program('lists_output.pl', allow_higher_order=True)
        first_order = specialize(output)
        self.assertTrue(is_first_order(first_order))
        copy = first_order.definition(sym('ho3__zero', 1))
        unfolded = rename_symbol(copy, copy.head_symbol, sym('memberzero', 1))
        self.assertTrue(alpha_equivalent(unfolded, original.definition(sym('memberzero', 1))))
        self.assertEqual(first_order.definition(sym('memberzero', 1)).clauses[0].body[0].callee, copy.head_symbol)

    def test_specialize_uppercase_call(self):
        source = load_program('uppercase_increment.pl')
        pool = build_candidate_pool(source)
        mapper = next(a for a in pool.abstractions if a.ho_var_count == 1)
        program = parse_program('f(A,B) :- {0}(A,B,uppercase).\n'.format(mapper.name),
                                signatures=library_signatures(pool.abstractions))
        first_order = specialize(program, pool.abstractions)
        self.assertTrue(is_first_order(first_order))
        copy = next(d for d in first_order.definitions if d.head_symbol.name.endswith('uppercase'))
        unfolded = rename_symbol(copy, copy.head_symbol, sym('f', 2))
        self.assertTrue(alpha_equivalent(unfolded, source.definition(sym('f', 2))))

    def test_specialize_mangled_names_avoid_collisions(self):
        program = parse_program('ho_0__zero(A) :- zero(A).\n'
                                'ho_0(A,P) :- head(A,B),P(B).\n'
                                'f(A) :- ho_0(A,zero).\n')
        first_order = specialize(program)
        names = [d.head_symbol.name for d in first_order.definitions]
        self.assertEqual(len(names), len(set(names)))
        self.assertIn('ho_0__zero_1', names)

    def test_mangled_names_avoid_called_predicates(self):
        program = parse_program('ho_0(A,P) :- head(A,B),P(B).\n'
                                'f(A) :- ho_0(A,zero).\n'
                                'g(A) :- ho_0__zero(A).\n')
        first_order = specialize(program)
        copy = first_order.definition(sym('f', 1)).clauses[0].body[0].callee
        self.assertEqual(copy, sym('ho_0__zero_1', 1))
        self.assertEqual(first_order.definition(sym('g', 1)).clauses[0].body[0].callee, sym('ho_0__zero', 1))

    def test_model_independent_of_abstraction_names_and_order(self):
        program, pool, _, assignment = lists_run()
        refactored = apply_refactoring(program, pool.abstractions, assignment)
        renamed = list(refactored.definitions)
        for index in assignment.selected:
            old = pool.abstractions[index].symbol
            renamed = [rename_symbol(d, old, PredicateSymbol('zz_' + old.name, old.arity)) for d in renamed]
        shuffled = Program(tuple(reversed(renamed)), refactored.targets)
        self.assertNotEqual(print_program(shuffled), print_program(refactored))
        universe = Universe.standard()
        expected = restricted_model(specialize(refactored), universe).facts
        self.assertEqual(restricted_model(specialize(shuffled), universe).facts, expected)
        self.assertEqual(restricted_model(program, universe).facts, expected)

    def test_unbound_higher_order_variable(self):
        head = Atom(sym('f', 1), (Variable('A'),))
        call = Atom(Variable('P', Order.HIGHER), (Variable('A'),))
        program = Program((Definition(sym('f', 1), (Clause(head, (call,)),)),), {sym('f', 1)})
        with self.assertRaises(SpecializationError):
            specialize(program)

    def test_lists_equivalent(self):
        original = load_program('lists_input.pl')
        output = load_program('lists_output.pl', allow_higher_order=True)
        result = check_equivalence(original, output, (), Universe.standard())
        self.assertTrue(result.equivalent)
        self.assertGreater(result.input_facts, 0)
        self.assertEqual(check_equivalence(original, original, (), Universe.standard(), threads=2).equivalent, True)

    def test_swapped_binding_counterexample(self):
        original = load_program('lists_input.pl')
        swapped = load_program('lists_output_swapped.pl', allow_higher_order=True)
        result = check_equivalence(original, swapped, (), Universe.standard())
        self.assertFalse(result.equivalent)
        self.assertEqual(result.counterexample, GroundAtom(sym('memberzero', 1), ((0,),)))
        self.assertEqual(result.derived_by, 'input')
        self.assertIn('memberzero([0])', result.describe())

    def test_semantics_preserved_on_random_programs(self):
        universe = Universe.standard()
        for seed in range(50):
            program = random_program(random.Random(1000 + seed), 5)
            pool = build_candidate_pool(program)
            assignment = solve(build_cop(program, pool.abstractions))
            refactored = apply_refactoring(program, pool.abstractions, assignment)
            result = check_equivalence(program, refactored, pool.abstractions, universe)
            self.assertTrue(result.equivalent, 'seed {0}: {1}'.format(seed, result.describe()))


class TestWorkloads(unittest.TestCase):
    def test_templated_program(self):
        program = templated_program()
        self.assertEqual(len(program.definitions), 38)
        self.assertEqual(size(program), 305)
        self.assertGreaterEqual(size(program), 300)
        self.assertEqual(size(templated_program(30)), 240)
        self.assertTrue(is_first_order(program))
        self.assertEqual(program.definitions[8].head_symbol.name, 'memberzero_8')

    def test_example_text(self):
        self.assertEqual(parse_program(example_text()).head_symbols, load_program('lists_input.pl').head_symbols)
        self.assertEqual(size(parse_program(example_text())), 65)

    def test_random_program_is_deterministic(self):
        first = random_program(random.Random(7), 6)
        second = random_program(random.Random(7), 6)
        self.assertEqual(first, second)
        self.assertTrue(2 <= len(first.definitions) <= 6)


class TestReport(unittest.TestCase):
    def test_lists_report(self):
        outcome = run_refactor(read_data('lists_input.pl'), RunConfig())
        data = json.loads(emit_report(outcome.report))
        self.assertEqual(data['input_size'], 65)
        self.assertEqual(data['output_size'], 37)
        self.assertEqual(data['objective_value'], 39)
        self.assertTrue(data['proved_optimal'])
        self.assertEqual(data['candidates_before_filter'], 62)
        self.assertEqual(data['candidates_after_filter'], 11)
        self.assertEqual(data['enumerated_candidates'], 91)
        self.assertEqual(data['verification']['status'], 'equivalent')
        self.assertIsNone(data['assignments']['allnegative/1'])
        self.assertEqual(sorted(s['uses'] for s in data['selected_abstractions']), [3, 4])
        self.assertEqual([s['ho_vars'] for s in data['selected_abstractions']], [1, 1])
        self.assertIn('solve_millis', data)

    def test_identity_report(self):
        outcome = run_refactor(read_data('element.pl'), RunConfig(verify=False))
        self.assertEqual(outcome.report.output_size, outcome.report.input_size)
        self.assertEqual(set(outcome.report.assignments.values()), {None})
        self.assertEqual(outcome.report.selected_abstractions, [])
        self.assertEqual(outcome.report.verification, {'status': 'skipped'})

    def test_size_optimum(self):
        outcome = run_refactor(read_data('lists_input.pl'), RunConfig(verify=False, size_optimum=True))
        self.assertEqual(outcome.report.size_optimum, 37)

    def test_pipeline_matches_manual_composition(self):
        outcome = run_refactor(read_data('uppercase_increment.pl'), RunConfig(verify=False))
        program = load_program('uppercase_increment.pl')
        pool = build_candidate_pool(program)
        assignment = solve(build_cop(program, pool.abstractions))
        refactored = apply_refactoring(program, pool.abstractions, assignment)
        self.assertEqual(outcome.refactored, refactored)
        self.assertEqual(outcome.text, print_program(refactored))

    def test_deterministic_output(self):
        config = RunConfig(verify=False)
        first = run_refactor(read_data('filter.pl'), config)
        second = run_refactor(read_data('filter.pl'), config)
        self.assertEqual(first.text, second.text)
        strip = ('solve_millis', 'total_millis', 'incumbents')
        left = {k: v for k, v in json.loads(emit_report(first.report)).items() if k not in strip}
        right = {k: v for k, v in json.loads(emit_report(second.report)).items() if k not in strip}
        self.assertEqual(left, right)


class TestConfig(unittest.TestCase):
    def test_repository_config(self):
        config = load_config()
        self.assertEqual(config.max_ho_vars, 3)
        self.assertEqual(config.weights, Weights())
        self.assertEqual(config.timeout_secs, 3600)
        self.assertTrue(config.verify)

    def test_invalid_values(self):
        for config in ({'MAX_HO_VARS': 0}, {'TIMEOUT_SECS': 0}, {'VERIFY': 'yes'}, {'WEIGHTS': [1, 1]}):
            with self.assertRaises(ConfigurationError):
                from_dict(config)
        with self.assertRaises(ConfigurationError):
            load_config('no-such-config.json')

    def test_override(self):
        config = RunConfig().override(max_ho_vars=2, verify=False, targets=None)
        self.assertEqual(config.max_ho_vars, 2)
        self.assertFalse(config.verify)
        self.assertIsNone(config.targets)


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, text):
        with open(self.path(name), 'w') as f:
            f.write(text)
        return self.path(name)

    def main(self, *argv):
        with contextlib.redirect_stdout(io.StringIO()) as out, contextlib.redirect_stderr(io.StringIO()):
            status = refactor.main(list(argv))
        return status, out.getvalue()

    def test_refactor_lists(self):
        status, _ = self.main('refactor', data_path('lists_input.pl'),
                              '--out', self.path('out.pl'), '--report', self.path('report.json'))
        self.assertEqual(status, 0)
        with open(self.path('report.json')) as f:
            report = json.load(f)
        self.assertEqual((report['input_size'], report['output_size']), (65, 37))
        output = parse_program(read_text(self.path('out.pl')))
        self.assertEqual(size(output), 37)

    def test_refactor_single_definition_is_identity(self):
        status, _ = self.main('refactor', data_path('element.pl'), '--out', self.path('out.pl'))
        self.assertEqual(status, 0)
        self.assertEqual(read_text(self.path('out.pl')), read_data('element.pl'))

    def test_refactor_with_flags(self):
        status, out = self.main('refactor', data_path('lists_input.pl'), '--weights', '1,1,1,0',
                                '--max-ho-vars', '2', '--no-verify', '--targets', 'memberzero,mapcube',
                                '--timeout-secs', '60')
        self.assertEqual(status, 0)
        self.assertEqual(size(parse_program(out)), 37)

    def test_abstractions(self):
        status, _ = self.main('abstractions', data_path('lists_input.pl'), '--out', self.path('lib.pl'))
        self.assertEqual(status, 0)
        library = parse_abstraction_library(read_text(self.path('lib.pl')))
        expected = parse_abstraction_library(read_data('candidates.pl'))
        self.assertEqual(keys_of(library), keys_of(expected))

    def test_abstractions_of_empty_program(self):
        status, out = self.main('abstractions', self.write('empty.pl', '% nothing here\n'))
        self.assertEqual(status, 0)
        self.assertEqual(out, '')

    def test_abstractions_single_definition(self):
        status, _ = self.main('abstractions', data_path('third_element.pl'), '--max-ho-vars', '2',
                              '--keep-singletons', '--out', self.path('lib.pl'))
        self.assertEqual(status, 0)
        self.assertEqual(len(parse_abstraction_library(read_text(self.path('lib.pl')))), 3)

    def test_check(self):
        status, out = self.main('check', data_path('lists_input.pl'), data_path('lists_output.pl'))
        self.assertEqual(status, 0)
        self.assertIn('equivalent', out)
        status, _ = self.main('check', data_path('lists_input.pl'), data_path('lists_input.pl'))
        self.assertEqual(status, 0)

    def test_check_counterexample(self):
        status, out = self.main('check', data_path('lists_input.pl'), data_path('lists_output_swapped.pl'))
        self.assertEqual(status, 3)
        self.assertIn('memberzero([0])', out)

    def test_check_with_library(self):
        status, _ = self.main('check', data_path('fold.pl'), data_path('fold_refactored.pl'),
                              '--library', data_path('fold_library.pl'))
        self.assertEqual(status, 0)

    def test_exit_statuses(self):
        broken = self.write('broken.pl', 'f(A) :- g(A\n')
        self.assertEqual(self.main('refactor', broken)[0], 1)
        unresolved = self.write('unresolved.pl', 'memberzero(A) :- nosuch(A).\n')
        self.assertEqual(self.main('check', data_path('lists_input.pl'), unresolved)[0], 2)
        self.assertEqual(self.main('refactor', self.path('missing.pl'))[0], 4)
        self.assertEqual(self.main('refactor', data_path('element.pl'), '--config', self.path('none.json'))[0], 4)
        self.assertEqual(self.main('refactor', data_path('element.pl'), '--weights', '1,1')[0], 4)
        self.assertEqual(self.main('refactor', data_path('element.pl'), '--targets', 'f/x')[0], 1)

    def test_universe_flag(self):
        status, _ = self.main('check', data_path('lists_input.pl'), data_path('lists_output.pl'),
                              '--universe', data_path('small_universe.json'))
        self.assertEqual(status, 0)

class TestService(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        from horef.service import attach_resources
        cls.client = attach_resources().test_client()

    def post(self, path, body):
        r = self.client.post('/horef/v1/' + path, data=json.dumps(body), content_type='application/json')
        return r.status_code, json.loads(r.get_data(as_text=True))

    def test_service_root(self):
        r = self.client.get('/horef/v1/')
        self.assertEqual(r.status_code, 200)
        data = json.loads(r.get_data(as_text=True))
        self.assertEqual(data['Defaults']['max_ho_vars'], 3)

    def test_refactor(self):
        status, data = self.post('refactor', {'program': read_data('fold.pl')})
        self.assertEqual(status, 200)
        self.assertEqual(data['report']['verification']['status'], 'equivalent')
        self.assertLess(data['report']['output_size'], data['report']['input_size'])

    def test_refactor_errors(self):
        self.assertEqual(self.post('refactor', {'program': 'f(A) :- g(A'})[0], 400)
        self.assertEqual(self.post('refactor', {'nothing': 1})[0], 400)
        self.assertEqual(self.post('refactor', {'program': read_data('fold.pl'), 'weights': [1]})[0], 400)

    def test_abstractions(self):
        status, data = self.post('abstractions', {'program': read_data('lists_input.pl')})
        self.assertEqual(status, 200)
        self.assertEqual((data['enumerated'], data['candidates_before_filter'], data['candidates_after_filter']),
                         (91, 62, 11))

    def test_check(self):
        status, data = self.post('check', {'program': read_data('lists_input.pl'),
                                           'refactored': read_data('lists_output_swapped.pl')})
        self.assertEqual(status, 200)
        self.assertFalse(data['equivalent'])
        self.assertEqual(data['counterexample'], 'memberzero([0])')
        status, data = self.post('check', {'program': read_data('fold.pl'),
                                           'refactored': read_data('fold_refactored.pl'),
                                           'library': read_data('fold_library.pl')})
        self.assertEqual(status, 200)
        self.assertTrue(data['equivalent'])

    def test_check_unresolved(self):
        status, _ = self.post('check', {'program': read_data('fold.pl'), 'refactored': 'multlist(A,B) :- nosuch(A,B).\n'})
        self.assertEqual(status, 422)


@unittest.skipUnless(os.getenv('HOREF_SLOW_TESTS'), 'set HOREF_SLOW_TESTS to run')
class TestScalability(unittest.TestCase):
    def test_templated_program_is_solved_to_optimality(self):
        program = templated_program()
        self.assertGreaterEqual(size(program), 300)
        pool = build_candidate_pool(program)
        assignment = solve(build_cop(program, pool.abstractions), timeout=20 * 60)
        self.assertTrue(assignment.proved_optimal)
        refactored = apply_refactoring(program, pool.abstractions, assignment)
        self.assertLess(size(refactored), size(program))


if __name__ == '__main__':
    unittest.main()
