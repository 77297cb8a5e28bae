# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Compress stage
#   build_cop()
#   solve()
#   apply_refactoring()
#
# Decision variables of the constraint optimisation problem:
#   r[d][a] - definition d is refactored with abstraction a (a in A(d))
#   n[d]    - definition d is kept as it is
#   s[a]    - abstraction a is part of the output
# Constraints:
#   sum_a r[d][a] + n[d] = 1            for every definition d
#   s[a] <-> OR_d r[d][a]               for every abstraction a
# Objective (weights w1..w4):
#   w1 * sum_d size(d) n[d] + w2 * sum_a size(a) s[a]
#   + w3 * sum_{d,a} 2 r[d][a] + w4 * sum_a ho_vars(a) s[a]
#
# The solver is an exact branch-and-bound over the s[a] variables.  Once the
# selected set is fixed every definition independently takes its cheapest
# option, so only the selection is searched.  The bound charges every
# definition the cheaper of its current option and, for each undecided
# abstraction it could use, the refactored size plus an even share of that
# abstraction's cost.

import math
import time
import logging
import threading
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

from .exceptions import ConfigurationError, ModelError, RefactoringError
from .program import Atom, Clause, Definition, PredicateRef, Program, fresh_head, size
from .utils import Stopwatch

logger = logging.getLogger(__name__)

# A refactored definition is one clause with one body literal
REFACTORED_SIZE = 2


@dataclass(frozen=True)
class Weights:
    unabstracted: int = 1
    abstraction: int = 1
    refactored: int = 1
    penalty: int = 1

    def __post_init__(self):
        for value in self.as_tuple():
            if not isinstance(value, int) or value < 0:
                raise ConfigurationError('Weights must be non-negative integers, got {0}'.format(self.as_tuple()))

    @classmethod
    def parse(cls, text):
        """
        Weights from 'w1,w2,w3,w4'
        """
        try:
            values = [int(v) for v in str(text).split(',')]
        except ValueError:
            raise ConfigurationError('Weights must be integers: {0}'.format(text))
        if len(values) != 4:
            raise ConfigurationError('Expected four weights w1,w2,w3,w4, got {0}'.format(text))
        return cls(*values)

    def as_tuple(self):
        return (self.unabstracted, self.abstraction, self.refactored, self.penalty)

    def without_penalty(self):
        return Weights(self.unabstracted, self.abstraction, self.refactored, 0)

    def __str__(self):
        return ','.join(str(w) for w in self.as_tuple())


@dataclass(frozen=True)
class ObjectiveBreakdown:
    unabstracted_size: int
    abstraction_size: int
    refactored_size: int
    penalty: int

    def objective(self, weights):
        return (weights.unabstracted * self.unabstracted_size +
                weights.abstraction * self.abstraction_size +
                weights.refactored * self.refactored_size +
                weights.penalty * self.penalty)

    @property
    def output_size(self):
        return self.unabstracted_size + self.abstraction_size + self.refactored_size

    def to_dict(self):
        return {
            'unabstracted_size': self.unabstracted_size,
            'abstraction_size': self.abstraction_size,
            'refactored_size': self.refactored_size,
            'penalty': self.penalty
        }


@dataclass(frozen=True)
class CopModel:
    """
    Coefficient tables of the refactoring COP

    Definitions and abstractions are referred to by index; candidates[i]
    lists the abstractions in A(d_i).
    """
    definitions: Tuple
    definition_sizes: Tuple[int, ...]
    candidates: Tuple[Tuple[int, ...], ...]
    abstraction_names: Tuple[str, ...]
    abstraction_sizes: Tuple[int, ...]
    abstraction_ho_vars: Tuple[int, ...]
    abstraction_keys: Tuple[str, ...]
    weights: Weights = Weights()

    @property
    def r_variable_count(self):
        return sum(len(c) for c in self.candidates)

    @property
    def n_variable_count(self):
        return len(self.definitions)

    @property
    def s_variable_count(self):
        return len(self.abstraction_names)

    def users(self, abstraction):
        """
        D(a): indices of the definitions that can use an abstraction
        """
        return tuple(d for d, options in enumerate(self.candidates) if abstraction in options)

    def abstraction_cost(self, abstraction):
        return (self.weights.abstraction * self.abstraction_sizes[abstraction] +
                self.weights.penalty * self.abstraction_ho_vars[abstraction])

    def breakdown(self, choices):
        used = sorted({a for a in choices if a is not None})
        return ObjectiveBreakdown(
            sum(s for s, a in zip(self.definition_sizes, choices) if a is None),
            sum(self.abstraction_sizes[a] for a in used),
            REFACTORED_SIZE * sum(1 for a in choices if a is not None),
            sum(self.abstraction_ho_vars[a] for a in used))

    def rank(self, choices):
        """
        Total order used to compare assignments: objective, then number of
        selected abstractions, then their canonical keys
        """
        used = {a for a in choices if a is not None}
        objective = self.breakdown(choices).objective(self.weights)
        return (objective, len(used), tuple(sorted(self.abstraction_keys[a] for a in used)))

    def with_weights(self, weights):
        return CopModel(self.definitions, self.definition_sizes, self.candidates, self.abstraction_names,
                        self.abstraction_sizes, self.abstraction_ho_vars, self.abstraction_keys, weights)


@dataclass(frozen=True)
class Assignment:
    """
    Solver result

    choices[i] is the index of the abstraction refactoring definition i,
    or None when the definition is kept (n_d = 1).
    """
    choices: Tuple[Optional[int], ...]
    selected: frozenset
    objective_value: int
    proved_optimal: bool
    breakdown: ObjectiveBreakdown
    incumbents: Tuple[Tuple[int, int], ...] = ()
    nodes: int = 0

    def is_feasible(self, model):
        if len(self.choices) != len(model.definitions):
            return False
        for d, choice in enumerate(self.choices):
            # exactly one of r[d][a] (a in A(d)) and n[d]
            if choice is not None and choice not in model.candidates[d]:
                return False
        used = {a for a in self.choices if a is not None}
        return set(self.selected) == used


def build_cop(program, pool, weights=None):
    """
    Builds the COP for refactoring 'program' with the abstractions in 'pool'

    Arguments:
        program - First-order program the pool was built from
        pool    - Sequence of Abstraction
        weights - (Optional) Weights; defaults to 1,1,1,1
    """
    weights = weights or Weights()
    index = {symbol: i for i, symbol in enumerate(program.head_symbols)}
    candidates = [[] for _ in program.definitions]
    for a, abstraction in enumerate(pool):
        for symbol in abstraction.sources:
            if symbol not in index:
                raise ModelError('{0} refers to unknown definition {1}'.format(abstraction.name, symbol))
            candidates[index[symbol]].append(a)
        if len(abstraction.sources) < 2:
            logger.debug(f"{abstraction.name} has a single user")
    model = CopModel(
        tuple(program.head_symbols),
        tuple(size(d) for d in program.definitions),
        tuple(tuple(c) for c in candidates),
        tuple(a.name for a in pool),
        tuple(a.size for a in pool),
        tuple(a.ho_var_count for a in pool),
        tuple(a.canonical_key for a in pool),
        weights)
    logger.debug(f"COP: {model.r_variable_count} r, {model.n_variable_count} n, {model.s_variable_count} s variables")
    return model


class _Timeout(Exception):
    pass


class _Search(object):
    """
    Branch-and-bound over the abstraction-selection variables
    """
    def __init__(self, model, deadline, clock):
        self.model = model
        self.deadline = deadline
        self.clock = clock
        self.lock = threading.Lock()
        self.nodes = 0
        self.timed_out = False

        w = model.weights
        self.keep_cost = [w.unabstracted * s for s in model.definition_sizes]
        self.refactor_cost = w.refactored * REFACTORED_SIZE
        self.users = [model.users(a) for a in range(model.s_variable_count)]

        # abstractions no definition would profit from are never selected
        useful = [a for a in range(model.s_variable_count)
                  if any(self.refactor_cost < self.keep_cost[d] for d in self.users[a])]
        self.order = sorted(useful, key=lambda a: (-self.potential(a), model.abstraction_keys[a]))
        self.position = {a: i for i, a in enumerate(self.order)}

        self.scale = 1
        for a in self.order:
            self.scale = math.lcm(self.scale, len(self.users[a]))
        self.share = {a: self.scale * self.refactor_cost + (self.scale * model.abstraction_cost(a)) // len(self.users[a])
                      for a in self.order}

        none = tuple(None for _ in model.definitions)
        self.best = none
        self.best_rank = model.rank(none)
        self.incumbents = [(self.best_rank[0], clock.millis)]

    def potential(self, a):
        saving = sum(max(0, self.keep_cost[d] - self.refactor_cost) for d in self.users[a])
        return saving - self.model.abstraction_cost(a)

    def leaf(self, included):
        choices = []
        for d, options in enumerate(self.model.candidates):
            usable = [a for a in options if a in included]
            if usable and self.refactor_cost < self.keep_cost[d]:
                choices.append(min(usable, key=lambda a: self.model.abstraction_keys[a]))
            else:
                choices.append(None)
        choices = tuple(choices)
        rank = self.model.rank(choices)
        with self.lock:
            if rank < self.best_rank:
                if rank[0] < self.best_rank[0]:
                    self.incumbents.append((rank[0], self.clock.millis))
                    logger.debug(f"Incumbent {rank[0]} after {self.nodes} nodes")
                self.best_rank = rank
                self.best = choices

    def bound(self, depth, included):
        """
        Lower bound on the objective of every completion, scaled by
        self.scale
        """
        total = self.scale * sum(self.model.abstraction_cost(a) for a in included)
        for d, options in enumerate(self.model.candidates):
            best = self.scale * self.keep_cost[d]
            for a in options:
                if a in included:
                    best = min(best, self.scale * self.refactor_cost)
                elif a in self.position and self.position[a] >= depth:
                    best = min(best, self.share[a])
            total += best
        return total

    def search(self, depth, included):
        self.nodes += 1
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Timeout()
        if self.bound(depth, included) > self.scale * self.best_rank[0]:
            return
        if depth == len(self.order):
            self.leaf(included)
            return
        a = self.order[depth]
        self.search(depth + 1, included | {a})
        self.search(depth + 1, included)

    def run(self, threads):
        try:
            if threads <= 1 or len(self.order) < 2:
                self.search(0, frozenset())
            else:
                split = min(len(self.order), max(1, math.ceil(math.log2(threads)) + 1))
                prefixes = []
                for pattern in itertools.product((True, False), repeat=split):
                    prefixes.append(frozenset(a for a, take in zip(self.order, pattern) if take))
                with ThreadPoolExecutor(max_workers=threads) as executor:
                    futures = [executor.submit(self.search, split, prefix) for prefix in prefixes]
                    for future in futures:
                        future.result()
        except _Timeout:
            self.timed_out = True
            logger.warning(f"Solver timed out after {self.nodes} nodes; returning the best refactoring found")


def solve(model, timeout=None, threads=1):
    """
    Finds an assignment minimising the objective

    The all-none assignment is the first incumbent, so a result always
    exists.  proved_optimal is False when the timeout interrupted the
    search.

    Arguments:
        model   - CopModel
        timeout - (Optional) Seconds before the best incumbent is returned
        threads - Worker threads exploring independent subtrees
    """
    clock = Stopwatch()
    deadline = None if timeout is None else time.monotonic() + timeout
    search = _Search(model, deadline, clock)
    search.run(threads)
    choices = search.best
    breakdown = model.breakdown(choices)
    assignment = Assignment(
        choices,
        frozenset(a for a in choices if a is not None),
        breakdown.objective(model.weights),
        not search.timed_out,
        breakdown,
        tuple(search.incumbents),
        search.nodes)
    logger.info(f"Compress stage: objective {assignment.objective_value}, "
                f"{len(assignment.selected)} abstractions selected, optimal={assignment.proved_optimal}, "
                f"{search.nodes} nodes in {clock.millis} ms")
    return assignment


def apply_refactoring(program, pool, assignment):
    """
    Rewrites 'program' according to 'assignment'

    Every refactored definition becomes a single clause calling its
    abstraction with the instantiation tuple; each selected abstraction is
    emitted once, before the definitions it refactors.  Kept definitions
    follow in their original order.

    Arguments:
        program    - First-order program
        pool       - Sequence of Abstraction the assignment refers to
        assignment - Assignment for build_cop(program, pool)
    """
    groups = {}
    kept = []
    for definition, choice in zip(program.definitions, assignment.choices):
        if choice is None:
            kept.append(definition)
            continue
        abstraction = pool[choice]
        try:
            bindings = abstraction.instantiation(definition.head_symbol)
        except KeyError:
            raise RefactoringError('{0} was not built from {1}'.format(abstraction.name, definition.head_symbol))
        head = fresh_head(definition.head_symbol)
        call = Atom(abstraction.symbol, head.args + tuple(PredicateRef(b) for b in bindings.bindings))
        groups.setdefault(choice, []).append(Definition(definition.head_symbol, (Clause(head, (call,)),)))

    definitions = []
    for choice, refactored in groups.items():
        definitions.append(pool[choice].definition)
        definitions.extend(refactored)
    definitions.extend(kept)
    return Program(tuple(definitions), program.targets)
