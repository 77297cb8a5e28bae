# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Program generators
#   random_program()     random list-processing programs over the standard builtins
#   templated_program()  families of the eight list definitions with fresh symbols
#
# Both build program text and parse it, so generated programs go through
# the same checks as files.

import logging

from .parser import parse_program

logger = logging.getLogger(__name__)

UNARY_TESTS = ('zero', 'one', 'even', 'odd', 'positive', 'negative')
FUNCTIONS = ('increment', 'decrement', 'cube', 'bin', 'succ')
COMPLEMENTS = (('even', 'odd'), ('odd', 'even'), ('zero', 'positive'), ('positive', 'zero'))
COMBINERS = ('sum', 'mult', 'max')

# Clause templates by shape; {name} is the head symbol and {p}, {q} the
# background predicates the shape is parameterised by.
SHAPES = {
    'member': ('{name}(A) :- head(A,B),{p}(B).',
               '{name}(A) :- tail(A,B),{name}(B).'),
    'map': ('{name}(A,B) :- empty(A),empty(B).',
            '{name}(A,B) :- head(A,C),tail(A,D),head(B,E),tail(B,F),{p}(C,E),{name}(D,F).'),
    'all': ('{name}(A) :- empty(A).',
            '{name}(A) :- head(A,B),tail(A,C),{p}(B),{name}(C).'),
    'filter': ('{name}(A,B) :- empty(A),empty(B).',
               '{name}(A,B) :- head(A,C),tail(A,D),{p}(C),head(B,C),tail(B,E),{name}(D,E).',
               '{name}(A,B) :- head(A,C),tail(A,D),{q}(C),{name}(D,B).'),
    'fold': ('{name}(A,B) :- empty(A),{p}(B).',
             '{name}(A,B) :- head(A,C),tail(A,D),{name}(D,E),{q}(C,E,B).'),
    'chain': ('{name}(A,B) :- {p}(A,C),{q}(C,B).',),
}

# Eight list definitions sharing member-like and map-like structure
EXAMPLE_FAMILY = (
    ('memberzero', 'member', 'zero'),
    ('mapaddone', 'map', 'increment'),
    ('memberodd', 'member', 'odd'),
    ('allnegative', 'all', 'negative'),
    ('chartoint', 'map', 'ord'),
    ('membereven', 'member', 'even'),
    ('mapcube', 'map', 'cube'),
    ('inttobin', 'map', 'bin'),
)


def _parameters(rng, shape):
    if shape in ('member', 'all'):
        return rng.choice(UNARY_TESTS), None
    if shape == 'map':
        return rng.choice(FUNCTIONS), None
    if shape == 'filter':
        return rng.choice(COMPLEMENTS)
    if shape == 'fold':
        return rng.choice(('zero', 'one')), rng.choice(COMBINERS)
    return rng.choice(FUNCTIONS), rng.choice(FUNCTIONS)


def _definition_text(shape, name, p, q=None):
    return ''.join(clause.format(name=name, p=p, q=q) + '\n' for clause in SHAPES[shape])


def random_program(rng, max_definitions=6, shapes=None):
    """
    Random first-order program of 2..max_definitions definitions

    Arguments:
        rng             - random.Random instance
        max_definitions - Upper bound on the number of definitions
        shapes          - (Optional) Shapes to draw from; defaults to all
    """
    shapes = sorted(shapes or SHAPES)
    count = rng.randint(2, max(2, max_definitions))
    parts = []
    for index in range(count):
        shape = rng.choice(shapes)
        p, q = _parameters(rng, shape)
        parts.append(_definition_text(shape, '{0}{1}'.format(shape, index), p, q))
    return parse_program(''.join(parts), allow_higher_order=False, source='<random>')


def example_text():
    """
    Text of the eight list definitions
    """
    return ''.join(_definition_text(shape, name, p) for name, shape, p in EXAMPLE_FAMILY)


def templated_program(families=38):
    """
    Family k instantiates list definition k mod 8 with a fresh
    head symbol and a fresh background predicate, e.g. memberzero_8 calling
    zero_8
    """
    parts = []
    for k in range(families):
        name, shape, p = EXAMPLE_FAMILY[k % len(EXAMPLE_FAMILY)]
        parts.append(_definition_text(shape, '{0}_{1}'.format(name, k), '{0}_{1}'.format(p, k)))
    program = parse_program(''.join(parts), allow_higher_order=False, source='<templated>')
    logger.debug(f"Templated program of {families} families")
    return program
