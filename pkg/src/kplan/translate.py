"""The tag/merge translation family from conformant to classical planning.

A translation is driven by a set of tags (assumption contexts: consistent
literal sets over initially-unknown fluents) and a set of merges (valid
tag collections that license reasoning by cases).  Each conditional
effect C -> L of the source problem becomes, per tag t, a support rule
KC/t -> KL/t and a cancellation rule ~K~C/t -> ~K~L/t; each merge (m, L)
becomes an action that concludes KL once KL/t holds for every t in m.

The module provides the concrete schemes (empty-tag only; all possible
initial states; models of the relevant clauses; bounded clause subsets),
the rewriting optimizations, CNF-goal compilation, and the
nondeterministic-effect front-end.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from . import analysis
from .analysis import Context, build_context, cover, satisfies, target_literals
from .errors import InvalidSpec, TooManyInitialStates, TooManyModels, UnsupportedFeature, ValidityUndecidedAtCap
from .model import (
    Action,
    ClassicalProblem,
    Clause,
    ConformantProblem,
    Literal,
    NondetRule,
    Rule,
    conformant_problem,
    neg,
    pos,
    sorted_lits,
)
from .pi import EMPTY_TAG, Merge, PICNF, Tag

DEFAULT_S0_CAP = 4096
DEFAULT_MODELS_CAP = 4096

SEPARATOR = "__"
MERGE_PREFIX = "merge" + SEPARATOR
# the static-disjunction deduction action is internal like the merges, so
# its name carries the merge prefix and is stripped from reported plans
STATIC_ACTION_NAME = MERGE_PREFIX + "static-disjunctions"


@dataclass(frozen=True)
class TaggedAtom:
    """The classical fluent KL/t.  KL/empty prints as KL."""

    base: Literal
    tag: Tag = EMPTY_TAG

    @property
    def name(self) -> str:
        if not self.tag:
            return "K" + self.base.token
        suffix = SEPARATOR.join(l.token for l in sorted(self.tag))
        return "K" + self.base.token + SEPARATOR + suffix


def atom_name(base: Literal, tag: Tag = EMPTY_TAG) -> str:
    return TaggedAtom(base, tag).name


def tag_digest(tags: Iterable[Tag]) -> str:
    text = "|".join(",".join(l.token for l in sorted(t)) for t in
                    sorted(tags, key=sorted_lits))
    return hashlib.sha1(text.encode()).hexdigest()[:8]


def merge_action_name(m: Merge) -> str:
    return MERGE_PREFIX + m.target.token + SEPARATOR + tag_digest(m.tags)


@dataclass(frozen=True)
class TranslationSpec:
    """Tags and merges driving a translation, plus their provenance."""

    tags: Tuple[Tag, ...]
    merges: Tuple[Merge, ...]
    scheme: str
    trusted: bool = False  # merges constructed validity-preserving

    def __post_init__(self):
        if EMPTY_TAG not in self.tags:
            raise InvalidSpec("the empty tag must be among the tags")

    def merges_for(self, L: Literal) -> Tuple[Merge, ...]:
        return tuple(m for m in self.merges if m.target == L)


def make_spec(tags: Iterable[Tag], merges: Iterable[Merge], scheme: str,
              trusted: bool = False) -> TranslationSpec:
    all_tags = {EMPTY_TAG} | {frozenset(t) for t in tags}
    merges = tuple(sorted(set(merges), key=Merge.sort_key))
    for m in merges:
        all_tags |= set(m.tags)
    return TranslationSpec(tuple(sorted(all_tags, key=sorted_lits)),
                           merges, scheme, trusted)


# --- spec builders ----------------------------------------------------------

def spec_k0() -> TranslationSpec:
    return make_spec((), (), "k0", trusted=True)


def spec_ks0(ctx: Context, cap: int = DEFAULT_S0_CAP,
             include_all: bool = False) -> TranslationSpec:
    """Tags = the possible initial states (restricted to unknown fluents)."""
    unknown = set(ctx.pi.unknown_fluents())
    try:
        states = list(ctx.pi.models(ctx.problem.fluents, cap=cap))
    except ValidityUndecidedAtCap as exc:
        raise TooManyInitialStates(str(exc)) from exc
    tags = {frozenset(l for l in s if l.fluent in unknown) for s in states}
    tagset = frozenset(tags)
    merges = [Merge(tagset, L)
              for L in target_literals(ctx.problem, include_all)]
    return make_spec(tags, merges, "ks0", trusted=True)


def spec_kmodels(ctx: Context, cap: int = DEFAULT_MODELS_CAP,
                 include_all: bool = False) -> TranslationSpec:
    """One merge per target literal: the models of its relevant clauses."""
    merges = []
    for L in target_literals(ctx.problem, include_all):
        rcs = ctx.relevant_clause_set(L)
        if not rcs.clauses:
            continue
        variables = sorted({l.fluent for c in rcs.clauses for l in c})
        try:
            models = [m for m in ctx.pi.models(variables, extra=rcs.clauses,
                                               cap=cap)
                      if ctx.pi.tag_consistent(m)]
        except ValidityUndecidedAtCap as exc:
            raise TooManyModels(f"literal {L}: {exc}") from exc
        if models:
            merges.append(Merge(frozenset(models), L))
    return make_spec((), merges, "kmodels", trusted=True)


def spec_ki(ctx: Context, i: int, include_all: bool = False) -> TranslationSpec:
    """Bounded-width scheme: per target literal, the cover of the least
    clause subset of size <= i that satisfies its relevant clauses; when no
    such subset exists, one cover per size-i subset (sound but possibly
    incomplete)."""
    if i < 0:
        raise ValueError("i must be >= 0")
    merges: List[Merge] = []
    for L in target_literals(ctx.problem, include_all):
        rcs = ctx.relevant_clause_set(L)
        if not rcs.extended or not rcs.clauses:
            continue
        chosen: Optional[Tuple[FrozenSet[Literal], ...]] = None
        for size in range(0, i + 1):
            for C in itertools.combinations(rcs.extended, size):
                cov = cover(C, ctx.pi)
                if cov and satisfies(cov, rcs.clauses, ctx.pi):
                    chosen = cov
                    break
            if chosen:
                break
        if chosen:
            merges.append(Merge(frozenset(chosen), L))
        elif i > 0:
            for C in itertools.combinations(rcs.extended, i):
                cov = cover(C, ctx.pi)
                if cov and frozenset(cov) != frozenset((EMPTY_TAG,)):
                    merges.append(Merge(frozenset(cov), L))
    return make_spec((), merges, f"k{i}", trusted=True)


# --- the core builder -------------------------------------------------------

def _relevant_fluents(ctx: Context, L: Literal) -> FrozenSet[str]:
    return frozenset(l.fluent for l in ctx.rel.relevant_to(L))


def ktm(problem: ConformantProblem, spec: TranslationSpec,
        ctx: Optional[Context] = None, optimized: bool = False,
        validate: Optional[bool] = None) -> ClassicalProblem:
    """Build the classical problem induced by a tag/merge spec.

    With ``optimized`` the builder applies, in order: (1) tagged atoms
    whose tag closure carries nothing relevant to their literal collapse
    onto the untagged atom; (2) support/cancellation rules are dropped at
    tags through which nothing relevant to their head is merged; (3)
    support and cancellation collapse into one rule where the tag decides
    every fluent relevant to the head; (4) effects C,~L -> L of actions
    that never delete L yield the extra deduction rule KC -> KL; (5) each
    static disjunction yields case-elimination rules K~L_j (j != i) -> KL_i
    on a dedicated action.
    """
    if problem.goal_clauses:
        raise UnsupportedFeature("compile clause goals away first")
    if not problem.deterministic:
        raise UnsupportedFeature("compile nondeterministic effects away first")
    if ctx is None:
        ctx = build_context(problem)
    pi = ctx.pi
    if validate is None:
        validate = not spec.trusted
    if validate:
        for t in spec.tags:
            if not pi.tag_consistent(t):
                raise InvalidSpec(f"inconsistent tag {sorted_lits(t)}")
        for m in spec.merges:
            if not pi.merge_valid(m):
                raise InvalidSpec(f"invalid merge for {m.target}")

    lits = analysis.all_literals(problem.fluents)
    rel = ctx.rel

    def collapses(L: Literal, t: Tag) -> bool:
        return bool(t) and not (pi.closure(t) & rel.relevant_to(L))

    def atom(L: Literal, t: Tag) -> str:
        if optimized and collapses(L, t):
            return atom_name(L, EMPTY_TAG)
        return atom_name(L, t)

    # which literals get merged through each tag (for rule dropping)
    merged_through: Dict[Tag, Set[Literal]] = {}
    for m in spec.merges:
        for t in m.tags:
            merged_through.setdefault(t, set()).add(m.target)

    def useful(L: Literal, t: Tag) -> bool:
        if not optimized or not t:
            return True
        targets = merged_through.get(t, ())
        return any(rel.relevant(L, tgt) for tgt in targets)

    fluents: Set[str] = set()
    for L in lits:
        for t in spec.tags:
            fluents.add(atom(L, t))

    init: Set[Literal] = set()
    for t in spec.tags:
        for L in pi.closure(t):
            if L.fluent in problem.fluents:
                init.add(pos(atom(L, t)))

    goal = frozenset(pos(atom(L, EMPTY_TAG)) for L in problem.goal)

    def decided(L: Literal, t: Tag) -> bool:
        cl = pi.closure(t)
        for f in _relevant_fluents(ctx, L):
            if pos(f) not in cl and neg(f) not in cl:
                return False
        return True

    actions: List[Action] = []
    for a in problem.actions:
        rules: Set[Rule] = set()
        for r in a.rules:
            L = r.effect
            for t in spec.tags:
                head_support = not (optimized and collapses(L, t) and t)
                head_cancel = not (optimized and collapses(L.negate(), t) and t)
                emit_support = head_support and useful(L, t)
                emit_cancel = head_cancel and useful(L.negate(), t)
                if not emit_support and not emit_cancel:
                    continue
                support_cond = frozenset(pos(atom(c, t)) for c in r.condition)
                if optimized and decided(L, t):
                    # grouped support + cancellation
                    rules.add(Rule(support_cond, pos(atom(L, t))))
                    rules.add(Rule(support_cond,
                                   Literal(atom(L.negate(), t), False)))
                    continue
                if emit_support:
                    rules.add(Rule(support_cond, pos(atom(L, t))))
                if emit_cancel:
                    cancel_cond = frozenset(
                        Literal(atom(c.negate(), t), False)
                        for c in r.condition)
                    rules.add(Rule(cancel_cond,
                                   Literal(atom(L.negate(), t), False)))
        if optimized:
            # extra deduction: a: C,~L -> L with no a-rule deleting L
            heads = {r.effect for r in a.rules}
            for r in a.rules:
                L = r.effect
                if L.negate() in r.condition and L.negate() not in heads:
                    cond = frozenset(pos(atom(c, EMPTY_TAG))
                                     for c in r.condition if c != L.negate())
                    rules.add(Rule(cond, pos(atom(L, EMPTY_TAG))))
        precs = frozenset(pos(atom(L, EMPTY_TAG)) for L in a.preconditions)
        actions.append(Action(a.name, precs,
                              tuple(sorted(rules, key=Rule.sort_key))))

    merge_names: Set[str] = set()
    if optimized:
        static_rules: Set[Rule] = set()
        heads_anywhere = {r.effect for act in problem.actions for r in act.rules}
        for c in pi.nonunit_clauses:
            if any(l.negate() in heads_anywhere for l in c):
                continue  # some literal of the clause can be deleted
            for l in c:
                cond = frozenset(pos(atom(o.negate(), EMPTY_TAG))
                                 for o in c if o != l)
                static_rules.add(Rule(cond, pos(atom(l, EMPTY_TAG))))
        if static_rules:
            # pure deduction: bookkeeping like a merge, stripped from plans
            actions.append(Action(STATIC_ACTION_NAME, frozenset(),
                                  tuple(sorted(static_rules,
                                               key=Rule.sort_key))))
            merge_names.add(STATIC_ACTION_NAME)

    for m in spec.merges:
        name = merge_action_name(m)
        if name in merge_names:
            continue
        merge_names.add(name)
        cond = frozenset(pos(atom(m.target, t)) for t in m.tags)
        effects = [Rule(cond, pos(atom(m.target, EMPTY_TAG)))]
        for other in sorted(ctx.mutexes.mutex_with(m.target)):
            if other == m.target.negate():
                continue
            effects.append(Rule(cond, pos(atom(other.negate(), EMPTY_TAG))))
        actions.append(Action(name, frozenset(), tuple(effects)))

    actions.sort(key=lambda a: a.name)
    return ClassicalProblem(frozenset(fluents), frozenset(init),
                            tuple(actions), goal, frozenset(merge_names))


# --- scheme entry points ----------------------------------------------------

def k0(problem: ConformantProblem, ctx: Optional[Context] = None) -> ClassicalProblem:
    return ktm(problem, spec_k0(), ctx)


def ks0(problem: ConformantProblem, cap: int = DEFAULT_S0_CAP,
        ctx: Optional[Context] = None) -> ClassicalProblem:
    ctx = ctx or build_context(problem)
    return ktm(problem, spec_ks0(ctx, cap), ctx)


def kmodels(problem: ConformantProblem, cap: int = DEFAULT_MODELS_CAP,
            ctx: Optional[Context] = None) -> ClassicalProblem:
    ctx = ctx or build_context(problem)
    return ktm(problem, spec_kmodels(ctx, cap), ctx)


def ki(problem: ConformantProblem, i: int,
       ctx: Optional[Context] = None) -> ClassicalProblem:
    ctx = ctx or build_context(problem)
    return ktm(problem, spec_ki(ctx, i), ctx)


def optimize(K: ClassicalProblem, problem: ConformantProblem,
             spec: TranslationSpec,
             ctx: Optional[Context] = None) -> ClassicalProblem:
    """Optimized variant of the translation that produced K.

    The rewrites are defined on the (problem, spec) pair, so this simply
    rebuilds with the optimizing builder; K itself only documents which
    translation is being optimized.
    """
    ctx = ctx or build_context(problem)
    return ktm(problem, spec, ctx, optimized=True, validate=False)


# --- CNF goal compilation -----------------------------------------------

def cnf_goal_compile(problem: ConformantProblem) -> ConformantProblem:
    """Replace clause goals by fresh goal atoms set by once-executable
    evaluation actions (one per clause, gated by a consumed enabler)."""
    if not problem.goal_clauses:
        return problem
    fluents = set(problem.fluents)
    init = list(problem.init)
    actions = list(problem.actions)
    goal = set(problem.goal)
    clauses = sorted(problem.goal_clauses, key=sorted_lits)
    for idx, c in enumerate(clauses):
        gatom = f"goal-c{idx}"
        enabler = f"goal-e{idx}"
        fluents |= {gatom, enabler}
        init.append(frozenset((neg(gatom),)))
        init.append(frozenset((pos(enabler),)))
        rules = [Rule(frozenset(), neg(enabler))]
        rules += [Rule(frozenset((l,)), pos(gatom)) for l in sorted(c)]
        actions.append(Action(f"eval-goal-c{idx}", frozenset((pos(enabler),)),
                              tuple(rules)))
        goal.add(pos(gatom))
    return conformant_problem(fluents, init, actions, goal)


# --- nondeterministic front-end -------------------------------------------

@dataclass(frozen=True)
class NondetInfo:
    """Reset bookkeeping: reset action name -> its copy's hidden fluents."""

    resets: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    copies: int = 1

    def reset_map(self) -> Dict[str, Tuple[str, ...]]:
        return dict(self.resets)


def nondet_compile(problem: ConformantProblem,
                   copies: int = 1) -> Tuple[ConformantProblem, NondetInfo]:
    """Determinize oneof effects with hidden outcome-selector fluents.

    Each nondeterministic action yields ``copies`` single-use deterministic
    copies: copy k resolves every oneof through fresh hidden fluents
    constrained by a oneof clause in I, is gated by an ``enabled`` fluent it
    consumes, and gets a reset action that re-enables it.  The reset's
    knowledge-erasing conditional effects live at the classical level and
    are injected after translation (see inject_reset_effects).
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    if problem.deterministic:
        return problem, NondetInfo((), copies)
    fluents = set(problem.fluents)
    init = list(problem.init)
    actions: List[Action] = []
    resets: List[Tuple[str, Tuple[str, ...]]] = []
    for a in sorted(problem.actions, key=lambda x: x.name):
        if a.deterministic:
            actions.append(a)
            continue
        for k in range(1, copies + 1):
            name = f"{a.name}-c{k}"
            enabler = f"enabled-{name}"
            fluents.add(enabler)
            init.append(frozenset((pos(enabler),)))
            rules = list(a.rules)
            rules.append(Rule(frozenset(), neg(enabler)))
            hidden_all: List[str] = []
            for ridx, nr in enumerate(a.nondet_rules):
                hidden = [f"h-{name}-r{ridx}-o{o}"
                          for o in range(len(nr.outcomes))]
                hidden_all += hidden
                fluents |= set(hidden)
                init.append(frozenset(pos(h) for h in hidden))
                for h1, h2 in itertools.combinations(hidden, 2):
                    init.append(frozenset((neg(h1), neg(h2))))
                for h, outcome in zip(hidden, nr.outcomes):
                    for lit in sorted(outcome):
                        rules.append(Rule(nr.condition | {pos(h)}, lit))
            actions.append(Action(name, a.preconditions | {pos(enabler)},
                                  tuple(rules)))
            reset_name = f"reset-{name}"
            actions.append(Action(reset_name, frozenset(),
                                  (Rule(frozenset(), pos(enabler)),)))
            resets.append((reset_name, tuple(hidden_all)))
    compiled = conformant_problem(fluents, init, actions, problem.goal,
                                  problem.goal_clauses)
    return compiled, NondetInfo(tuple(resets), copies)


def inject_reset_effects(K: ClassicalProblem, compiled: ConformantProblem,
                         spec: TranslationSpec,
                         info: NondetInfo) -> ClassicalProblem:
    """Add the knowledge-erasing effects to each reset action: for every
    tag t mentioning the copy's hidden fluents and every literal L,
    KL -> KL/t and ~KL -> ~KL/t (assumption-dependent knowledge is reset
    to the unconditional knowledge)."""
    reset_map = info.reset_map()
    if not reset_map:
        return K
    lits = analysis.all_literals(compiled.fluents)
    new_actions = []
    for a in K.actions:
        hidden = reset_map.get(a.name)
        if hidden is None:
            new_actions.append(a)
            continue
        hidden_set = set(hidden)
        rules = set(a.rules)
        for t in spec.tags:
            if not any(l.fluent in hidden_set for l in t):
                continue
            for L in lits:
                if L.fluent in hidden_set:
                    # assumption-internal knowledge (what the hidden
                    # selectors themselves look like under the tag) is
                    # static and must survive the reset
                    continue
                tagged = atom_name(L, t)
                plain = atom_name(L, EMPTY_TAG)
                if tagged not in K.fluents or tagged == plain:
                    continue
                rules.add(Rule(frozenset((pos(plain),)), pos(tagged)))
                rules.add(Rule(frozenset((Literal(plain, False),)),
                               Literal(tagged, False)))
        new_actions.append(Action(a.name, a.preconditions,
                                  tuple(sorted(rules, key=Rule.sort_key))))
    return replace(K, actions=tuple(new_actions))
