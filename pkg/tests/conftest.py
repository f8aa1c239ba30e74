"""Shared fixtures: worked-example problems, a seeded random-problem
generator, and small brute-force helpers used by several test modules."""

from __future__ import annotations

import itertools
import random
from typing import Dict, Iterable, Iterator, List, Sequence, Set, Tuple

import pytest

from kplan import (
    ConformantProblem,
    Literal,
    Merge,
    Plan,
    action,
    apply,
    conformant_problem,
    make_spec,
    neg,
    pos,
    restrict,
    rule,
    run_plan,
)
from kplan.model import ClassicalProblem, State
from kplan.verify import initial_states


# --- tiny worked example ------------------------------------------------------

def build_tiny() -> ConformantProblem:
    """Three fluents, one known; the two-step plan works, the one-step
    prefix does not (it deletes p on the branch where p starts true)."""
    return conformant_problem(
        ["p", "q", "r"],
        [[pos("q")]],
        [
            action("a", rules=[rule([pos("q")], pos("r")),
                               rule([pos("p")], neg("p"))]),
            action("b", rules=[rule([pos("q")], pos("p"))]),
        ],
        [pos("p"), pos("r")])


@pytest.fixture
def tiny() -> ConformantProblem:
    return build_tiny()


TINY_PLAN = ("a", "b")
TINY_BAD = ("a",)


# --- pick/drop worked example ---------------------------------------------------

def build_pickdrop():
    """One-hand robot among three locations; item location unknown between
    l1 and l2.  Returns the problem plus the two-tag spec used by the
    translation walk-through tests."""
    acts = []
    for l in ("l1", "l2", "l3"):
        acts.append(action(f"pick-{l}", rules=[
            rule([neg("hold"), pos(f"at-{l}")], pos("hold")),
            rule([neg("hold"), pos(f"at-{l}")], neg(f"at-{l}")),
            rule([pos("hold")], neg("hold")),
            rule([pos("hold")], pos(f"at-{l}")),
        ]))
        acts.append(action(f"drop-{l}", rules=[
            rule([pos("hold")], neg("hold")),
            rule([pos("hold")], pos(f"at-{l}")),
        ]))
    problem = conformant_problem(
        ["hold", "at-l1", "at-l2", "at-l3"],
        [[neg("hold")], [pos("at-l1"), pos("at-l2")],
         [neg("at-l1"), neg("at-l2")], [neg("at-l3")]],
        acts, [pos("at-l3")])
    t1 = frozenset([pos("at-l1")])
    t2 = frozenset([pos("at-l2")])
    tags = frozenset([t1, t2])
    spec = make_spec([t1, t2],
                     [Merge(tags, pos("hold")), Merge(tags, pos("at-l3"))],
                     "manual", trusted=True)
    return problem, spec, t1, t2


@pytest.fixture
def pickdrop():
    return build_pickdrop()


# --- seeded random problem suite ------------------------------------------------

def random_problem(rng: random.Random, max_fluents: int = 6,
                   max_actions: int = 5) -> ConformantProblem:
    """A small consistent conformant problem.

    Within one action all rule heads are on distinct fluents, so applying
    an action can never add a complementary pair; this keeps progression
    total and keeps the basic translation in step with the weak semantics.
    """
    n = rng.randint(3, max_fluents)
    fluents = [f"f{i}" for i in range(1, n + 1)]
    k_units = rng.randint(1, 2)
    unit_fs = rng.sample(fluents, k_units)
    init: List[List[Literal]] = [[Literal(f, rng.random() < 0.7)]
                                 for f in unit_fs]
    rest = [f for f in fluents if f not in unit_fs]
    for _ in range(rng.randint(0, min(2, 4 - k_units))):
        if len(rest) < 2:
            break
        size = rng.randint(2, min(3, len(rest)))
        init.append([Literal(f, rng.random() < 0.6)
                     for f in rng.sample(rest, size)])
    actions = []
    for ai in range(rng.randint(1, max_actions)):
        heads = rng.sample(fluents, rng.randint(1, min(3, n)))
        rules = []
        for hf in heads:
            head = Literal(hf, rng.random() < 0.5)
            others = [f for f in fluents if f != hf]
            cond_fs = rng.sample(others, min(rng.randint(0, 2), len(others)))
            rules.append(rule([Literal(f, rng.random() < 0.5)
                               for f in cond_fs], head))
        pre = []
        if rng.random() < 0.3:
            pre = [Literal(rng.choice(fluents), rng.random() < 0.5)]
        actions.append(action(f"a{ai}", pre, rules))
    goal = [Literal(f, rng.random() < 0.6)
            for f in rng.sample(fluents, rng.randint(1, 2))]
    return conformant_problem(fluents, init, actions, goal)


def random_suite(seed: int, count: int, **kwargs) -> List[ConformantProblem]:
    rng = random.Random(seed)
    return [random_problem(rng, **kwargs) for _ in range(count)]


# --- brute-force helpers --------------------------------------------------------

def all_sequences(names: Sequence[str], max_len: int
                  ) -> Iterator[Tuple[str, ...]]:
    """Every action-name sequence of length 0..max_len."""
    for length in range(max_len + 1):
        yield from itertools.product(names, repeat=length)


def classical_accepts(K: ClassicalProblem, steps: Iterable[str]) -> bool:
    result = run_plan(K, Plan.for_problem(steps, K))
    return result.applicable and result.achieved_goal


def reachable_source_states(problem: ConformantProblem,
                            max_states: int = 10_000) -> Set[State]:
    """All states reachable from some possible initial state by applicable
    deterministic actions (exhaustive closure)."""
    frontier = list(initial_states(problem))
    seen: Set[State] = set(frontier)
    while frontier:
        s = frontier.pop()
        for a in problem.actions:
            if not a.preconditions <= s:
                continue
            nxt = apply(s, a)
            if nxt not in seen:
                if len(seen) >= max_states:
                    raise RuntimeError("state-space cap exceeded")
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def reachable_classical_states(K: ClassicalProblem,
                               max_states: int = 20_000) -> Set[State]:
    """All complete states reachable in a classical problem."""
    start = K.initial_state()
    frontier = [start]
    seen: Set[State] = {start}
    while frontier:
        s = frontier.pop()
        for a in K.actions:
            if not a.preconditions <= s:
                continue
            nxt = apply(s, a)
            if nxt not in seen:
                if len(seen) >= max_states:
                    raise RuntimeError("state-space cap exceeded")
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def is_conformant(problem: ConformantProblem, steps: Iterable[str]) -> bool:
    steps = tuple(steps)
    plan = Plan(steps)
    for s in initial_states(problem):
        result = run_plan(restrict(problem, s), plan)
        if not (result.applicable and result.achieved_goal):
            return False
    return True
