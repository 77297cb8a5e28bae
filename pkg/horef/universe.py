# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Finite Universes
#
# A Universe is the finite domain over which restricted models are
# computed: a set of ground constants and the background relations
# (builtins) the programs call.  Constants are Python values:
#   int   - integers
#   str   - other scalar constants (characters, symbols)
#   tuple - lists
#
# Universe description file (JSON, every key optional):
#   {
#       "ELEMENTS": [0, 1, 2],
#       "MAX_LIST_LENGTH": 4,
#       "INT_RANGE": [0, 5],
#       "CHARS": ["a", "b"],
#       "BUILTINS": ["head", "tail", "empty", ...],
#       "RELATIONS": {"parent": [["ann", "bob"], ["bob", "cy"]]}
#   }

import re
import json
import logging
import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .exceptions import UniverseError
from .program import PredicateSymbol

logger = logging.getLogger(__name__)

_INT_RE = re.compile(r'^-?[0-9]+$')

DEFAULT_ELEMENTS = (0, 1, 2)
DEFAULT_MAX_LIST_LENGTH = 4
DEFAULT_INT_RANGE = (0, 5)
DEFAULT_CHARS = ('a', 'b')


def value_key(value):
    """
    Structural order on constants: integers, then strings, then lists
    (element-wise, a prefix before its extensions)
    """
    if isinstance(value, bool):
        raise UniverseError('Boolean constants are not supported: {0}'.format(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    return (2, tuple(value_key(v) for v in value))


def parse_value(text):
    """
    Constant from its textual form: '3', '-1', 'a', '[0,1]', '[]'
    """
    text = text.strip()
    if text.startswith('['):
        if not text.endswith(']'):
            raise UniverseError('Malformed list constant: {0}'.format(text))
        inner = text[1:-1].strip()
        if not inner:
            return ()
        items, depth, start = [], 0, 0
        for i, ch in enumerate(inner):
            if ch == '[':
                depth += 1
            elif ch == ']':
                depth -= 1
            elif ch == ',' and depth == 0:
                items.append(inner[start:i])
                start = i + 1
        items.append(inner[start:])
        return tuple(parse_value(item) for item in items)
    if _INT_RE.match(text):
        return int(text)
    return text


def render_value(value):
    if isinstance(value, tuple):
        return '[{0}]'.format(','.join(render_value(v) for v in value))
    return str(value)


def from_json_value(value):
    if isinstance(value, bool) or value is None or isinstance(value, (float, dict)):
        raise UniverseError('Unsupported constant in universe description: {0!r}'.format(value))
    if isinstance(value, list):
        return tuple(from_json_value(v) for v in value)
    return value


def _ints(scalars):
    return sorted(v for v in scalars if isinstance(v, int))


def _chars(scalars):
    return sorted(v for v in scalars if isinstance(v, str) and len(v) == 1 and v.isalpha())


def _unary(test):
    return lambda scalars, lists: {(x,) for x in _ints(scalars) if test(x)}


def _function(fn):
    def generate(scalars, lists):
        ints = set(_ints(scalars))
        return {(x, fn(x)) for x in ints if fn(x) in ints}
    return generate


def _binary(fn):
    def generate(scalars, lists):
        ints = set(_ints(scalars))
        return {(x, y, fn(x, y)) for x in ints for y in ints if fn(x, y) in ints}
    return generate


def _head(scalars, lists):
    return {(l, l[0]) for l in lists if l}


def _tail(scalars, lists):
    return {(l, l[1:]) for l in lists if l}


def _empty(scalars, lists):
    return {((),)}


def _geq(scalars, lists):
    ints = _ints(scalars)
    return {(x, y) for x in ints for y in ints if x >= y}


def _eq(scalars, lists):
    return {(v, v) for v in itertools.chain(scalars, lists)}


def _ord(scalars, lists):
    ints = set(_ints(scalars))
    return {(c, ord(c)) for c in _chars(scalars) if ord(c) in ints}


def _bin(scalars, lists):
    ints = set(_ints(scalars))
    return {(x, int(format(x, 'b'))) for x in ints if x >= 0 and int(format(x, 'b')) in ints}


def _uppercase(scalars, lists):
    return {(c, c.upper()) for c in _chars(scalars) if c.islower() and c.upper() in scalars}


def _lowercase(scalars, lists):
    return {(c, c.lower()) for c in _chars(scalars) if c.isupper() and c.lower() in scalars}


GENERATORS = {
    'head': (2, _head),
    'tail': (2, _tail),
    'empty': (1, _empty),
    'zero': (1, _unary(lambda x: x == 0)),
    'one': (1, _unary(lambda x: x == 1)),
    'even': (1, _unary(lambda x: x % 2 == 0)),
    'odd': (1, _unary(lambda x: x % 2 == 1)),
    'positive': (1, _unary(lambda x: x > 0)),
    'pos': (1, _unary(lambda x: x > 0)),
    'negative': (1, _unary(lambda x: x < 0)),
    'neg': (1, _unary(lambda x: x < 0)),
    'increment': (2, _function(lambda x: x + 1)),
    'succ': (2, _function(lambda x: x + 1)),
    'decrement': (2, _function(lambda x: x - 1)),
    'cube': (2, _function(lambda x: x ** 3)),
    'sum': (3, _binary(lambda x, y: x + y)),
    'mult': (3, _binary(lambda x, y: x * y)),
    'max': (3, _binary(max)),
    'geq': (2, _geq),
    'eq': (2, _eq),
    'ord': (2, _ord),
    'bin': (2, _bin),
    'uppercase': (2, _uppercase),
    'lowercase': (2, _lowercase),
}

STANDARD_BUILTINS = tuple(GENERATORS)

_KEYS = ('ELEMENTS', 'MAX_LIST_LENGTH', 'INT_RANGE', 'CHARS', 'BUILTINS', 'RELATIONS')


@dataclass(frozen=True)
class Universe:
    """
    Finite constants and background relations

    builtins maps a PredicateSymbol to its relation, a frozenset of tuples
    of constants.
    """
    constants: frozenset
    builtins: Mapping = field(default_factory=dict)

    def relation(self, symbol):
        return self.builtins.get(symbol, frozenset())

    def sorted_constants(self):
        return sorted(self.constants, key=value_key)

    @classmethod
    def standard(cls):
        """
        Lists up to length 4 over {0,1,2}, integers 0..5, the characters
        a and b, and every named builtin
        """
        return cls.from_config({})

    @classmethod
    def from_config(cls, config):
        """
        Builds a universe from a description dictionary

        Arguments:
            config - Dictionary with the upper-case keys of the universe
                     description file; missing keys take standard values
        """
        unknown = sorted(set(config) - set(_KEYS))
        if unknown:
            raise UniverseError('Unknown universe keys: {0}'.format(', '.join(unknown)))
        try:
            elements = [from_json_value(v) for v in config.get('ELEMENTS', DEFAULT_ELEMENTS)]
            max_length = int(config.get('MAX_LIST_LENGTH', DEFAULT_MAX_LIST_LENGTH))
            low, high = (int(v) for v in config.get('INT_RANGE', DEFAULT_INT_RANGE))
            chars = [str(c) for c in config.get('CHARS', DEFAULT_CHARS)]
            names = list(config.get('BUILTINS', STANDARD_BUILTINS))
            relations = dict(config.get('RELATIONS', {}))
        except (TypeError, ValueError) as e:
            raise UniverseError('Malformed universe description: {0}'.format(e))
        if max_length < 0 or low > high:
            raise UniverseError('Empty list length or integer range in universe description')

        scalars = set(range(low, high + 1)) | set(elements) | set(chars) | {c.upper() for c in chars}
        lists = set()
        for length in range(max_length + 1):
            lists.update(itertools.product(elements, repeat=length))
        constants = set(scalars) | lists

        builtins = {}
        for name in names:
            if name not in GENERATORS:
                raise UniverseError('Unknown builtin generator: {0}'.format(name))
            arity, generate = GENERATORS[name]
            relation = {t for t in generate(scalars, lists) if all(v in constants for v in t)}
            builtins[PredicateSymbol(name, arity)] = frozenset(relation)

        for name, rows in relations.items():
            tuples = []
            for row in rows:
                if not isinstance(row, list):
                    raise UniverseError('Relation {0}: tuples must be lists, got {1!r}'.format(name, row))
                tuples.append(tuple(from_json_value(v) for v in row))
            arities = {len(t) for t in tuples}
            if len(arities) > 1:
                raise UniverseError('Relation {0} mixes arities {1}'.format(name, sorted(arities)))
            try:
                symbol = PredicateSymbol(name, arities.pop() if arities else 0)
            except ValueError as e:
                raise UniverseError(str(e))
            for t in tuples:
                constants.update(t)
            builtins[symbol] = builtins.get(symbol, frozenset()) | frozenset(tuples)

        logger.debug(f"Universe: {len(constants)} constants, {len(builtins)} builtin relations")
        return cls(frozenset(constants), builtins)

    @classmethod
    def load(cls, path):
        """
        Reads a universe description file
        """
        try:
            with open(path) as f:
                config = json.load(f)
        except json.JSONDecodeError as e:
            raise UniverseError('{0}: {1}'.format(path, e))
        if not isinstance(config, dict):
            raise UniverseError('{0}: expected a JSON object'.format(path))
        logger.info(f"Loaded universe description {path}")
        return cls.from_config(config)
