"""Prime-implicate form of the initial clause set and entailment services.

Once the clause set is in prime-implicate (PI) form, entailment of a
literal under a tag reduces to a subsumption test, which keeps every
query downstream (closures, tag consistency, relevant clauses)
polynomial.  Normalization uses Tison's method: resolve variable by
variable in a fixed order with eager subsumption.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from .errors import InconsistentInit, PiBlowup, ValidityUndecidedAtCap
from .model import Clause, Literal, is_tautology, lits_consistent, neg, pos, sorted_lits

DEFAULT_PI_CLAUSE_CAP = 5000
DEFAULT_MODEL_CAP = 4096

Tag = FrozenSet[Literal]
EMPTY_TAG: Tag = frozenset()


@dataclass(frozen=True)
class Merge:
    """A non-empty tag collection standing for a DNF, aimed at a literal."""

    tags: FrozenSet[Tag]
    target: Literal

    def __post_init__(self):
        if not self.tags:
            raise ValueError("merge needs at least one tag")

    def sort_key(self):
        return (self.target, tuple(sorted(sorted_lits(t) for t in self.tags)))


def _reduce_subsumed(clauses: Iterable[Clause]) -> Set[Clause]:
    """Keep only clauses not subsumed by another (shorter-first scan)."""
    kept: List[Clause] = []
    for c in sorted(set(clauses), key=len):
        if not any(k <= c for k in kept):
            kept.append(c)
    return set(kept)


class PICNF:
    """Clause set in prime-implicate form over a fixed fluent universe."""

    def __init__(self, clauses: Iterable[Clause], fluents: Iterable[str]):
        self.clauses: FrozenSet[Clause] = frozenset(clauses)
        self.fluents: Tuple[str, ...] = tuple(sorted(set(fluents)))
        self.units: FrozenSet[Literal] = frozenset(
            next(iter(c)) for c in self.clauses if len(c) == 1)
        # literal -> clauses containing it, for subsumption lookups
        index: Dict[Literal, List[Clause]] = {}
        for c in self.clauses:
            for l in c:
                index.setdefault(l, []).append(c)
        self._index = index
        self._closure_cache: Dict[Tag, FrozenSet[Literal]] = {}

    @property
    def nonunit_clauses(self) -> FrozenSet[Clause]:
        return frozenset(c for c in self.clauses if len(c) > 1)

    def unknown_fluents(self) -> Tuple[str, ...]:
        """Fluents with neither polarity entailed as a unit."""
        known = {l.fluent for l in self.units}
        return tuple(f for f in self.fluents if f not in known)

    def entails_literal(self, t: Tag, L: Literal) -> bool:
        """I, t |= L  iff  the clause (~t | L) is a tautology or subsumed."""
        if L in t:
            return True
        target = frozenset(l.negate() for l in t) | {L}
        if is_tautology(target):
            return True
        # subsumed by some clause of I containing one of target's literals
        candidates = self._index.get(L, [])
        if any(c <= target for c in candidates):
            return True
        for l in target:
            if l is L:
                continue
            if any(c <= target for c in self._index.get(l, [])):
                return True
        return False

    def closure(self, t: Tag) -> FrozenSet[Literal]:
        """t* = all literals entailed by I together with t."""
        t = frozenset(t)
        cached = self._closure_cache.get(t)
        if cached is not None:
            return cached
        out = set()
        universe = set(self.fluents) | {l.fluent for l in t}
        for f in sorted(universe):
            for lit in (pos(f), neg(f)):
                if self.entails_literal(t, lit):
                    out.add(lit)
        result = frozenset(out)
        self._closure_cache[t] = result
        return result

    def tag_consistent(self, t: Tag) -> bool:
        return lits_consistent(self.closure(t))

    def models(self, variables: Iterable[str],
               extra: Iterable[Clause] = (),
               forced: Iterable[Literal] = (),
               cap: Optional[int] = DEFAULT_MODEL_CAP) -> Iterator[FrozenSet[Literal]]:
        """Enumerate complete assignments over ``variables`` satisfying the
        clauses of I that only mention those variables, plus ``extra``
        clauses and ``forced`` unit literals.

        Clauses of I mentioning variables outside the given set are ignored
        (the caller picks a variable set closed enough for its purpose).
        Raises ValidityUndecidedAtCap past ``cap`` models.
        """
        variables = tuple(sorted(set(variables)))
        varset = set(variables)
        constraints = [c for c in self.clauses
                       if {l.fluent for l in c} <= varset]
        constraints += [frozenset(c) for c in extra]
        forced = list(forced)
        if not lits_consistent(forced):
            return
        count = 0
        assignment: Dict[str, bool] = {l.fluent: l.positive for l in forced
                                       if l.fluent in varset}
        if len(assignment) < sum(1 for l in forced if l.fluent in varset):
            return  # conflicting forced literals on the same fluent

        def consistent_so_far() -> bool:
            for c in constraints:
                undecided = False
                satisfied = False
                for l in c:
                    v = assignment.get(l.fluent)
                    if v is None:
                        undecided = True
                    elif v == l.positive:
                        satisfied = True
                        break
                if not satisfied and not undecided:
                    return False
            return True

        order = [v for v in variables if v not in assignment]

        def walk(i: int) -> Iterator[FrozenSet[Literal]]:
            nonlocal count
            if not consistent_so_far():
                return
            if i == len(order):
                count += 1
                if cap is not None and count > cap:
                    raise ValidityUndecidedAtCap(
                        f"model enumeration exceeded cap {cap}")
                yield frozenset(Literal(f, v) for f, v in assignment.items())
                return
            v = order[i]
            for value in (False, True):
                assignment[v] = value
                yield from walk(i + 1)
            del assignment[v]

        if not consistent_so_far():
            return
        yield from walk(0)

    def merge_valid(self, m: Merge, cap: int = DEFAULT_MODEL_CAP) -> bool:
        """Check I |= V_{t in m} t by model enumeration.

        Enumerates models of I restricted to the variables of the merge and
        every clause of I touching them (transitively), and requires each
        model to satisfy some tag.  Exact at desk scale; the cap guards the
        inherently hard general case.
        """
        merge_vars = {l.fluent for t in m.tags for l in t}
        # close under I-neighborhood so that ignoring outside clauses is sound
        vars_closed = set(merge_vars)
        changed = True
        while changed:
            changed = False
            for c in self.clauses:
                cv = {l.fluent for l in c}
                if cv & vars_closed and not cv <= vars_closed:
                    vars_closed |= cv
                    changed = True
        for model in self.models(vars_closed, cap=cap):
            model_map = {l.fluent: l.positive for l in model}
            if not any(all(model_map.get(l.fluent, l.positive) == l.positive
                           for l in t) for t in m.tags):
                return False
        return True


def prime_implicates(clauses: Iterable[Clause], fluents: Iterable[str],
                     cap: int = DEFAULT_PI_CLAUSE_CAP) -> PICNF:
    """Tison's algorithm: per-variable resolution with eager subsumption."""
    fluents = tuple(sorted(set(fluents)))
    current: Set[Clause] = {frozenset(c) for c in clauses if not is_tautology(c)}
    if frozenset() in current:
        raise InconsistentInit("explicit empty clause in input")
    current = _reduce_subsumed(current)
    for f in fluents:
        p, n = pos(f), neg(f)
        pos_side = [c for c in current if p in c]
        neg_side = [c for c in current if n in c]
        resolvents: Set[Clause] = set()
        for c1, c2 in itertools.product(pos_side, neg_side):
            r = (c1 - {p}) | (c2 - {n})
            if not is_tautology(r):
                resolvents.add(r)
        if resolvents:
            current = _reduce_subsumed(current | resolvents)
        if frozenset() in current:
            raise InconsistentInit("initial clause set is unsatisfiable")
        if len(current) > cap:
            raise PiBlowup(
                f"prime implicate computation exceeded {cap} clauses")
    return PICNF(current, fluents)
