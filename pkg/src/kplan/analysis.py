"""Structural analysis of conformant problems.

Covers four services used by the translations and the validators:

* conformant relevance between literals (a fixpoint over the action rules),
* extraction of the uncertainty clauses relevant to a target literal,
* covers / satisfaction / conformant width,
* literal mutexes and the problem consistency check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import InconsistentInit, WidthSearchCap
from .model import (
    Action,
    ClassicalProblem,
    Clause,
    ConformantProblem,
    Literal,
    neg,
    pos,
    sorted_lits,
)
from .pi import PICNF, prime_implicates


def all_literals(fluents: Iterable[str]) -> List[Literal]:
    out: List[Literal] = []
    for f in sorted(fluents):
        out.append(neg(f))
        out.append(pos(f))
    return out


class RelevanceGraph:
    """Reachability structure realizing "L is relevant to L'" (written L -> L')."""

    def __init__(self, reach: Dict[Literal, FrozenSet[Literal]]):
        self._reach = reach
        inverse: Dict[Literal, Set[Literal]] = {l: set() for l in reach}
        for src, targets in reach.items():
            for dst in targets:
                inverse.setdefault(dst, set()).add(src)
        self._inverse = {k: frozenset(v) for k, v in inverse.items()}

    def relevant(self, L: Literal, to: Literal) -> bool:
        return to in self._reach.get(L, frozenset())

    def reachable_from(self, L: Literal) -> FrozenSet[Literal]:
        return self._reach.get(L, frozenset())

    def relevant_to(self, target: Literal) -> FrozenSet[Literal]:
        """All literals L with L -> target."""
        return self._inverse.get(target, frozenset())


def relevance(problem: ConformantProblem, rule4: str = "standard") -> RelevanceGraph:
    """Least fixpoint of the relevance rules.

    1. L -> L;
    2. L -> L' for every rule C -> L' with L in C;
    3. L -> L' and L' -> L'' imply L -> L'';
    4. L -> L' if L -> ~L'' and L'' -> ~L' for some L''.

    Action preconditions do not induce relevance.  ``rule4="contrapositive"``
    swaps rule 4 for the variant "L -> L' if ~L -> ~L'", used only to
    cross-check the two formulations empirically.
    """
    if rule4 not in ("standard", "contrapositive"):
        raise ValueError(rule4)
    lits = all_literals(problem.fluents)
    reach: Dict[Literal, Set[Literal]] = {l: {l} for l in lits}
    for a in problem.actions:
        for r in a.rules:
            for c in r.condition:
                reach[c].add(r.effect)
    changed = True
    while changed:
        changed = False
        for L in lits:
            cur = reach[L]
            new = set(cur)
            for X in cur:
                new |= reach[X]  # rule 3
            if rule4 == "standard":
                for X in cur:
                    # X = ~L'' for L'' = ~X; L'' -> ~L' gives L -> L'
                    for Z in reach[X.negate()]:
                        new.add(Z.negate())
            else:
                for Z in reach[L.negate()]:
                    new.add(Z.negate())
            if new != cur:
                reach[L] = new
                changed = True
    return RelevanceGraph({l: frozenset(s) for l, s in reach.items()})


# --- relevant clauses, covers, width ---------------------------------------

def c_i(pi: PICNF) -> Tuple[Clause, ...]:
    """The uncertainty of I: its non-unit prime implicates plus a tautology
    p | ~p for every fluent with neither polarity entailed."""
    clauses = set(pi.nonunit_clauses)
    for f in pi.unknown_fluents():
        clauses.add(frozenset((pos(f), neg(f))))
    return tuple(sorted(clauses, key=sorted_lits))


@dataclass(frozen=True)
class RelevantClauseSet:
    target: Literal
    clauses: Tuple[Clause, ...]       # C_I(L)
    extended: Tuple[Clause, ...]      # C_I*(L)


def relevant_clauses(ci: Iterable[Clause], L: Literal,
                     rel: RelevanceGraph) -> RelevantClauseSet:
    incoming = rel.relevant_to(L)
    core = tuple(sorted((c for c in ci if c <= incoming), key=sorted_lits))
    extended = set(core)
    for c in core:
        for lit in c:
            extended.add(frozenset((pos(lit.fluent), neg(lit.fluent))))
    return RelevantClauseSet(L, core, tuple(sorted(extended, key=sorted_lits)))


def cover(C: Iterable[Clause], pi: PICNF) -> Tuple[FrozenSet[Literal], ...]:
    """All minimal I-consistent literal sets hitting every clause of C."""
    clauses = sorted({frozenset(c) for c in C}, key=sorted_lits)
    found: Set[FrozenSet[Literal]] = set()

    def walk(i: int, S: Set[Literal]):
        if i == len(clauses):
            found.add(frozenset(S))
            return
        c = clauses[i]
        if S & c:
            walk(i + 1, S)
            return
        for lit in sorted(c):
            if lit.negate() in S:
                continue
            S.add(lit)
            if pi.tag_consistent(frozenset(S)):
                walk(i + 1, S)
            S.discard(lit)

    walk(0, set())
    minimal = [s for s in found
               if not any(o < s for o in found)]
    return tuple(sorted(minimal, key=sorted_lits))


def satisfies(tags: Iterable[FrozenSet[Literal]], C: Iterable[Clause],
              pi: PICNF) -> bool:
    """Every tag's closure intersects every clause of C."""
    C = list(C)
    return all(all(pi.closure(t) & c for c in C) for t in tags)


def width_of_literal(ci: Iterable[Clause], L: Literal, rel: RelevanceGraph,
                     pi: PICNF, cap: Optional[int] = None
                     ) -> Tuple[int, Tuple[Clause, ...]]:
    """Smallest |C|, C subset of C_I*(L), whose cover satisfies C_I(L).

    Sizes are searched in increasing order and, within a size, candidate
    subsets in lexicographic order of the canonically sorted clause list,
    so the returned witness is the lexicographically least minimal one.
    """
    rcs = relevant_clauses(ci, L, rel)
    if not rcs.clauses:
        return 0, ()
    if cap is None:
        cap = len(pi.unknown_fluents())
    pool = rcs.extended
    for size in range(1, min(cap, len(pool)) + 1):
        for C in itertools.combinations(pool, size):
            if satisfies(cover(C, pi), rcs.clauses, pi):
                return size, C
    raise WidthSearchCap(
        f"no witness of size <= {cap} for literal {L}")


def target_literals(problem: ConformantProblem,
                    include_all: bool = False) -> Tuple[Literal, ...]:
    """Precondition and goal literals (the width/merge targets), or every
    literal when ``include_all`` (used by the nondeterministic pipeline)."""
    if include_all:
        return tuple(all_literals(problem.fluents))
    lits: Set[Literal] = set(problem.goal)
    for c in problem.goal_clauses:
        lits |= c
    for a in problem.actions:
        lits |= a.preconditions
    return tuple(sorted(lits))


def width(problem: ConformantProblem, pi: Optional[PICNF] = None,
          cap: Optional[int] = None) -> int:
    if pi is None:
        pi = prime_implicates(problem.init, problem.fluents)
    rel = relevance(problem)
    ci_clauses = c_i(pi)
    widths = [width_of_literal(ci_clauses, L, rel, pi, cap)[0]
              for L in target_literals(problem)]
    return max(widths, default=0)


# --- mutexes and consistency ------------------------------------------------

def _pushed_rules(problem) -> List[Tuple[FrozenSet[Literal], Literal]]:
    """Per-action rule lists with preconditions pushed into conditions.

    Returns a flat list of (action_index, condition, effect); grouping by
    action index recovers the per-action structure.
    """
    out = []
    for idx, a in enumerate(problem.actions):
        for r in a.rules:
            out.append((idx, frozenset(a.preconditions | r.condition), r.effect))
    return out


class MutexSet:
    def __init__(self, pairs: FrozenSet[FrozenSet[Literal]]):
        self.pairs = pairs

    def mutex(self, L: Literal, Lp: Literal) -> bool:
        return frozenset((L, Lp)) in self.pairs

    def set_mutex(self, S: Iterable[Literal]) -> bool:
        S = list(S)
        return any(frozenset((a, b)) in self.pairs
                   for a, b in itertools.combinations(S, 2))

    def mutex_with(self, L: Literal) -> FrozenSet[Literal]:
        out = set()
        for p in self.pairs:
            if L in p:
                other = p - {L}
                out.add(next(iter(other)) if other else L)
        return frozenset(out)

    def __len__(self):
        return len(self.pairs)


def _initially_cosatisfiable(pi: PICNF, L: Literal, Lp: Literal) -> bool:
    """Is there a possible initial state with both L and L' true?"""
    if Lp == L.negate():
        return False
    blocking = frozenset((L.negate(), Lp.negate()))
    # I |= ~L | ~L' iff that clause is subsumed by a prime implicate
    for c in pi.clauses:
        if c <= blocking:
            return False
    return True


def mutex_set(problem: ConformantProblem, pi: Optional[PICNF] = None,
              strengthened: bool = False) -> MutexSet:
    """Greatest fixpoint of the mutex conditions.

    Start from every literal pair that is not jointly true in any possible
    initial state, then delete pairs until the two propagation conditions
    hold for all surviving pairs:

    * for two rules C -> L and C' -> L' of one action, C u C' is mutex;
    * for a rule C -> L and the partner literal L', either L' = ~L, or
      C u {L'} is mutex, or C implies the body of some rule C' -> ~L' of
      the same action ("implies" = mutex with the complement of every
      literal of C' \\ C).  The strengthened variant checks the implication
      from C u {L'} instead of C.
    """
    if pi is None:
        pi = prime_implicates(problem.init, problem.fluents)
    lits = all_literals(problem.fluents)
    rules = _pushed_rules(problem)
    by_action: Dict[int, List[Tuple[FrozenSet[Literal], Literal]]] = {}
    for idx, cond, eff in rules:
        by_action.setdefault(idx, []).append((cond, eff))

    pairs: Set[FrozenSet[Literal]] = set()
    for a, b in itertools.combinations(lits, 2):
        if not _initially_cosatisfiable(pi, a, b):
            pairs.add(frozenset((a, b)))

    def set_mutex(S) -> bool:
        return any(frozenset(p) in pairs
                   for p in itertools.combinations(set(S), 2))

    def implies(S: FrozenSet[Literal], target: FrozenSet[Literal]) -> bool:
        for lit in target - S:
            if not set_mutex(S | {lit.negate()}):
                return False
        return True

    def pair_ok(pair: FrozenSet[Literal]) -> bool:
        two = sorted(pair)
        L, Lp = (two[0], two[1]) if len(two) == 2 else (two[0], two[0])
        for a_rules in by_action.values():
            # condition on simultaneous addition
            for (c1, e1), (c2, e2) in itertools.permutations(a_rules, 2):
                if e1 == L and e2 == Lp and not set_mutex(c1 | c2):
                    return False
            # condition on addition next to persistence
            for head, other in ((L, Lp), (Lp, L)):
                for cond, eff in a_rules:
                    if eff != head:
                        continue
                    if other == head.negate():
                        continue
                    if set_mutex(cond | {other}):
                        continue
                    base = cond | {other} if strengthened else cond
                    if any(eff2 == other.negate() and implies(base, cond2)
                           for cond2, eff2 in a_rules):
                        continue
                    return False
        return True

    changed = True
    while changed:
        changed = False
        for pair in sorted(pairs, key=sorted_lits):
            if pair not in pairs:
                continue
            if not pair_ok(pair):
                pairs.discard(pair)
                changed = True
    return MutexSet(frozenset(pairs))


def consistency_check(problem: ConformantProblem,
                      pi: Optional[PICNF] = None,
                      strengthened: bool = False) -> bool:
    """True iff I is satisfiable and every complementary pair is mutex."""
    try:
        if pi is None:
            pi = prime_implicates(problem.init, problem.fluents)
    except InconsistentInit:
        return False
    mx = mutex_set(problem, pi, strengthened)
    return all(mx.mutex(pos(f), neg(f)) for f in problem.fluents)


# --- bundled analysis context ----------------------------------------------

@dataclass
class Context:
    """Everything the translations need, computed once per problem."""

    problem: ConformantProblem
    pi: PICNF
    rel: RelevanceGraph
    ci: Tuple[Clause, ...]
    _mutexes: Optional[MutexSet] = field(default=None, repr=False)
    strengthened_mutex: bool = False

    @property
    def mutexes(self) -> MutexSet:
        if self._mutexes is None:
            self._mutexes = mutex_set(self.problem, self.pi,
                                      self.strengthened_mutex)
        return self._mutexes

    def relevant_clause_set(self, L: Literal) -> RelevantClauseSet:
        return relevant_clauses(self.ci, L, self.rel)


def build_context(problem: ConformantProblem,
                  pi: Optional[PICNF] = None,
                  pi_cap: Optional[int] = None,
                  strengthened_mutex: bool = False) -> Context:
    if pi is None:
        kwargs = {} if pi_cap is None else {"cap": pi_cap}
        pi = prime_implicates(problem.init, problem.fluents, **kwargs)
    rel = relevance(problem)
    return Context(problem, pi, rel, c_i(pi),
                   strengthened_mutex=strengthened_mutex)
