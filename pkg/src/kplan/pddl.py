"""PDDL-subset front end and classical PDDL emission.

Input language: typed STRIPS schemas with conditional effects (and /
when / not / forall, plus oneof effects for nondeterministic actions) and
an :init accepting literals, (or ...), (oneof ...) and (unknown f).
Output: standard classical PDDL with conditional effects, with tagged
atoms serialized as flat predicate names.

Grounding is deliberately plain: instantiate schemas over typed objects,
name ground atoms and actions by joining the pieces with "-", and prune
instances whose conditions are internally contradictory.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .errors import GroundingBlowup, PddlSyntaxError, UnsupportedFeature
from .model import (
    Action,
    ClassicalProblem,
    Clause,
    ConformantProblem,
    Literal,
    NondetRule,
    Rule,
    conformant_problem,
    lits_consistent,
    neg,
    pos,
    sorted_lits,
)

DEFAULT_RULE_CAP = 1_000_000


# --- s-expressions -----------------------------------------------------------

class Sym(str):
    """An atom token that remembers where it came from."""

    line: int
    column: int

    def __new__(cls, text: str, line: int, column: int):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.column = column
        return obj


SExpr = Union[Sym, List["SExpr"]]


def _tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield Sym(ch, line, col)
            col += 1
            i += 1
        else:
            start, start_col = i, col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            yield Sym(text[start:i], line, start_col)


def parse_sexprs(text: str) -> List[SExpr]:
    stack: List[List[SExpr]] = [[]]
    opens: List[Sym] = []
    for tok in _tokenize(text):
        if tok == "(":
            stack.append([])
            opens.append(tok)
        elif tok == ")":
            if len(stack) == 1:
                raise PddlSyntaxError("unbalanced ')'", tok.line, tok.column)
            done = stack.pop()
            opens.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        o = opens[-1]
        raise PddlSyntaxError("unclosed '('", o.line, o.column)
    return stack[0]


def _err(node: SExpr, message: str) -> PddlSyntaxError:
    while isinstance(node, list) and node:
        node = node[0]
    if isinstance(node, Sym):
        return PddlSyntaxError(message, node.line, node.column)
    return PddlSyntaxError(message)


def _head(node: SExpr) -> str:
    if isinstance(node, list) and node and isinstance(node[0], Sym):
        return str(node[0])
    return ""


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class AtomTemplate:
    predicate: str
    args: Tuple[str, ...]  # variables (?x) or constants


@dataclass(frozen=True)
class LiteralTemplate:
    atom: AtomTemplate
    positive: bool = True


# effect tree nodes
@dataclass(frozen=True)
class EffLit:
    literal: LiteralTemplate


@dataclass(frozen=True)
class EffAnd:
    parts: Tuple["EffNode", ...]


@dataclass(frozen=True)
class EffWhen:
    condition: Tuple[LiteralTemplate, ...]
    effect: "EffNode"


@dataclass(frozen=True)
class EffForall:
    variable: str
    type: str
    body: "EffNode"


@dataclass(frozen=True)
class EffOneof:
    outcomes: Tuple["EffNode", ...]


EffNode = Union[EffLit, EffAnd, EffWhen, EffForall, EffOneof]


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: Tuple[Tuple[str, str], ...]  # (variable, type)
    precondition: Tuple[LiteralTemplate, ...]
    effect: EffNode


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: Tuple[str, ...]
    types: Dict[str, str]               # type -> parent
    constants: Tuple[Tuple[str, str], ...]
    predicates: Dict[str, Tuple[str, ...]]  # name -> parameter types
    actions: Tuple[ActionSchema, ...]


@dataclass(frozen=True)
class InitEntry:
    kind: str  # "lit" | "or" | "oneof" | "unknown"
    literals: Tuple[LiteralTemplate, ...]


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: Tuple[Tuple[str, str], ...]
    init: Tuple[InitEntry, ...]
    goal_literals: Tuple[LiteralTemplate, ...]
    goal_clauses: Tuple[Tuple[LiteralTemplate, ...], ...]


# --- parsing -----------------------------------------------------------------

def _parse_typed_list(items: Sequence[SExpr], default_type: str = "object"
                      ) -> Tuple[Tuple[str, str], ...]:
    """Parse "a b - t c d - t2 e" into ((a,t),(b,t),(c,t2),(d,t2),(e,object))."""
    out: List[Tuple[str, str]] = []
    pending: List[str] = []
    i = 0
    while i < len(items):
        item = items[i]
        if not isinstance(item, Sym):
            raise _err(item, "expected a name in typed list")
        if item == "-":
            if i + 1 >= len(items) or not isinstance(items[i + 1], Sym):
                raise _err(item, "expected a type after '-'")
            t = str(items[i + 1])
            out += [(name, t) for name in pending]
            pending = []
            i += 2
        else:
            pending.append(str(item))
            i += 1
    out += [(name, default_type) for name in pending]
    return tuple(out)


def _parse_atom(node: SExpr) -> AtomTemplate:
    if not isinstance(node, list) or not node or \
            not all(isinstance(x, Sym) for x in node):
        raise _err(node, "expected an atom (predicate arguments...)")
    return AtomTemplate(str(node[0]), tuple(str(x) for x in node[1:]))


def _parse_literal(node: SExpr) -> LiteralTemplate:
    if _head(node) == "not":
        if len(node) != 2:
            raise _err(node, "'not' takes exactly one atom")
        return LiteralTemplate(_parse_atom(node[1]), False)
    return LiteralTemplate(_parse_atom(node), True)


def _parse_literal_conjunction(node: SExpr) -> Tuple[LiteralTemplate, ...]:
    if isinstance(node, list) and not node:
        return ()
    if _head(node) == "and":
        out: List[LiteralTemplate] = []
        for sub in node[1:]:
            out.extend(_parse_literal_conjunction(sub))
        return tuple(out)
    return (_parse_literal(node),)


def _parse_effect(node: SExpr) -> EffNode:
    head = _head(node)
    if head == "and":
        return EffAnd(tuple(_parse_effect(sub) for sub in node[1:]))
    if head == "when":
        if len(node) != 3:
            raise _err(node, "'when' takes a condition and an effect")
        return EffWhen(_parse_literal_conjunction(node[1]),
                       _parse_effect(node[2]))
    if head == "forall":
        if len(node) != 3:
            raise _err(node, "'forall' takes a variable list and an effect")
        typed = _parse_typed_list(node[1])
        if len(typed) != 1:
            raise _err(node, "one variable per 'forall' is supported")
        var, typ = typed[0]
        return EffForall(var, typ, _parse_effect(node[2]))
    if head == "oneof":
        if len(node) < 3:
            raise _err(node, "'oneof' needs at least two outcomes")
        return EffOneof(tuple(_parse_effect(sub) for sub in node[1:]))
    if head in ("increase", "decrease", "assign", "scale-up", "scale-down"):
        raise UnsupportedFeature(f"numeric effect '{head}' is not supported")
    return EffLit(_parse_literal(node))


def _sections(body: Sequence[SExpr]) -> List[List[SExpr]]:
    return [item for item in body if isinstance(item, list)]


def _parse_domain(sexpr: SExpr) -> DomainAst:
    if _head(sexpr) != "define" or _head(sexpr[1]) != "domain":
        raise _err(sexpr, "expected (define (domain ...) ...)")
    name = str(sexpr[1][1])
    requirements: Tuple[str, ...] = ()
    types: Dict[str, str] = {}
    constants: Tuple[Tuple[str, str], ...] = ()
    predicates: Dict[str, Tuple[str, ...]] = {}
    actions: List[ActionSchema] = []
    for section in _sections(sexpr[2:]):
        key = _head(section)
        if key == ":requirements":
            requirements = tuple(str(x) for x in section[1:])
        elif key == ":types":
            for t, parent in _parse_typed_list(section[1:]):
                types[t] = parent
        elif key == ":constants":
            constants = constants + _parse_typed_list(section[1:])
        elif key == ":predicates":
            for p in section[1:]:
                if not isinstance(p, list) or not p:
                    raise _err(p, "expected a predicate declaration")
                pname = str(p[0])
                ptypes = tuple(t for _, t in _parse_typed_list(p[1:]))
                predicates[pname] = ptypes
        elif key == ":action":
            actions.append(_parse_action(section))
        elif key in (":functions", ":derived", ":constraints"):
            raise UnsupportedFeature(f"section '{key}' is not supported")
        else:
            raise _err(section, f"unknown domain section '{key}'")
    return DomainAst(name, requirements, types, constants, predicates,
                     tuple(actions))


def _parse_action(section: Sequence[SExpr]) -> ActionSchema:
    if len(section) < 2 or not isinstance(section[1], Sym):
        raise _err(section, "expected an action name")
    name = str(section[1])
    params: Tuple[Tuple[str, str], ...] = ()
    precondition: Tuple[LiteralTemplate, ...] = ()
    effect: Optional[EffNode] = None
    i = 2
    while i < len(section):
        key = section[i]
        if not isinstance(key, Sym) or not key.startswith(":"):
            raise _err(key, "expected an action keyword")
        if i + 1 >= len(section):
            raise _err(key, f"'{key}' needs a value")
        value = section[i + 1]
        if key == ":parameters":
            if not isinstance(value, list):
                raise _err(value, ":parameters needs a list")
            params = _parse_typed_list(value)
        elif key == ":precondition":
            precondition = _parse_literal_conjunction(value)
        elif key == ":effect":
            effect = _parse_effect(value)
        else:
            raise UnsupportedFeature(f"action keyword '{key}' is not supported")
        i += 2
    if effect is None:
        effect = EffAnd(())
    return ActionSchema(name, params, precondition, effect)


def _parse_problem(sexpr: SExpr) -> ProblemAst:
    if _head(sexpr) != "define" or _head(sexpr[1]) != "problem":
        raise _err(sexpr, "expected (define (problem ...) ...)")
    name = str(sexpr[1][1])
    domain_name = ""
    objects: Tuple[Tuple[str, str], ...] = ()
    init: List[InitEntry] = []
    goal_literals: List[LiteralTemplate] = []
    goal_clauses: List[Tuple[LiteralTemplate, ...]] = []
    for section in _sections(sexpr[2:]):
        key = _head(section)
        if key == ":domain":
            domain_name = str(section[1])
        elif key == ":objects":
            objects = objects + _parse_typed_list(section[1:])
        elif key == ":init":
            for entry in section[1:]:
                head = _head(entry)
                if head == "or":
                    init.append(InitEntry(
                        "or", tuple(_parse_literal(x) for x in entry[1:])))
                elif head == "oneof":
                    lits = tuple(_parse_literal(x) for x in entry[1:])
                    if len(lits) < 2:
                        raise _err(entry, "'oneof' needs at least two members")
                    init.append(InitEntry("oneof", lits))
                elif head == "unknown":
                    if len(entry) != 2:
                        raise _err(entry, "'unknown' takes one atom")
                    init.append(InitEntry(
                        "unknown", (LiteralTemplate(_parse_atom(entry[1])),)))
                else:
                    init.append(InitEntry("lit", (_parse_literal(entry),)))
        elif key == ":goal":
            goal = section[1]
            for part in ([goal] if _head(goal) != "and" else goal[1:]):
                if _head(part) == "or":
                    goal_clauses.append(
                        tuple(_parse_literal(x) for x in part[1:]))
                else:
                    goal_literals.append(_parse_literal(part))
        else:
            raise _err(section, f"unknown problem section '{key}'")
    return ProblemAst(name, domain_name, objects, tuple(init),
                      tuple(goal_literals), tuple(goal_clauses))


def parse(domain_text: str, problem_text: str) -> Tuple[DomainAst, ProblemAst]:
    domains = parse_sexprs(domain_text)
    problems = parse_sexprs(problem_text)
    if len(domains) != 1:
        raise PddlSyntaxError("expected exactly one (define ...) in the domain")
    if len(problems) != 1:
        raise PddlSyntaxError("expected exactly one (define ...) in the problem")
    return _parse_domain(domains[0]), _parse_problem(problems[0])


# --- grounding ---------------------------------------------------------------

def _objects_by_type(domain: DomainAst, problem: ProblemAst
                     ) -> Dict[str, List[str]]:
    everything = list(domain.constants) + list(problem.objects)

    def subtypes(t: str) -> Set[str]:
        out = {t}
        changed = True
        while changed:
            changed = False
            for child, parent in domain.types.items():
                if parent in out and child not in out:
                    out.add(child)
                    changed = True
        return out

    all_types = {"object"} | set(domain.types) | set(domain.types.values()) \
        | {t for _, t in everything}
    table: Dict[str, List[str]] = {}
    for t in all_types:
        if t == "object":
            members = [o for o, _ in everything]
        else:
            sub = subtypes(t)
            members = [o for o, ot in everything if ot in sub]
        table[t] = sorted(set(members))
    return table


def ground_atom_name(predicate: str, args: Sequence[str]) -> str:
    return "-".join([predicate, *args]) if args else predicate


def ground_action_name(schema: str, args: Sequence[str]) -> str:
    return "-".join([schema, *args]) if args else schema


class _Grounder:
    def __init__(self, domain: DomainAst, problem: ProblemAst, rule_cap: int):
        self.domain = domain
        self.problem = problem
        self.rule_cap = rule_cap
        self.rule_count = 0
        self.objects = _objects_by_type(domain, problem)
        self.fluents = self._fluent_universe()

    def _tick(self, n: int = 1):
        self.rule_count += n
        if self.rule_count > self.rule_cap:
            raise GroundingBlowup(
                f"grounding exceeded {self.rule_cap} rule instances")

    def _fluent_universe(self) -> Set[str]:
        out: Set[str] = set()
        for pname, ptypes in self.domain.predicates.items():
            pools = [self.objects.get(t, []) for t in ptypes]
            count = 1
            for p in pools:
                count *= len(p)
            self._tick(count if ptypes else 1)
            for combo in itertools.product(*pools):
                out.add(ground_atom_name(pname, combo))
        return out

    def _ground_atom(self, t: AtomTemplate, binding: Dict[str, str],
                     where: str) -> str:
        if t.predicate not in self.domain.predicates:
            raise PddlSyntaxError(
                f"undeclared predicate '{t.predicate}' in {where}")
        args = []
        for a in t.args:
            if a.startswith("?"):
                if a not in binding:
                    raise PddlSyntaxError(
                        f"unbound variable '{a}' in {where}")
                args.append(binding[a])
            else:
                args.append(a)
        name = ground_atom_name(t.predicate, args)
        if name not in self.fluents:
            raise PddlSyntaxError(
                f"atom '{name}' uses objects of the wrong type in {where}")
        return name

    def _ground_literal(self, t: LiteralTemplate, binding, where) -> Literal:
        return Literal(self._ground_atom(t.atom, binding, where), t.positive)

    def _walk_effect(self, node: EffNode, binding: Dict[str, str],
                     condition: FrozenSet[Literal], where: str,
                     rules: List[Rule], nondet: List[NondetRule]):
        if isinstance(node, EffLit):
            self._tick()
            rules.append(Rule(condition,
                              self._ground_literal(node.literal, binding,
                                                   where)))
        elif isinstance(node, EffAnd):
            for part in node.parts:
                self._walk_effect(part, binding, condition, where, rules,
                                  nondet)
        elif isinstance(node, EffWhen):
            extra = frozenset(self._ground_literal(l, binding, where)
                              for l in node.condition)
            merged = condition | extra
            if not lits_consistent(merged):
                return  # condition can never hold
            self._walk_effect(node.effect, binding, merged, where, rules,
                              nondet)
        elif isinstance(node, EffForall):
            for obj in self.objects.get(node.type, []):
                inner = dict(binding)
                inner[node.variable] = obj
                self._walk_effect(node.body, inner, condition, where, rules,
                                  nondet)
        elif isinstance(node, EffOneof):
            outcomes = []
            for out_node in node.outcomes:
                out_rules: List[Rule] = []
                out_nondet: List[NondetRule] = []
                self._walk_effect(out_node, binding, frozenset(), where,
                                  out_rules, out_nondet)
                if out_nondet or any(r.condition for r in out_rules):
                    raise UnsupportedFeature(
                        f"nested conditions inside 'oneof' in {where}")
                outcomes.append(frozenset(r.effect for r in out_rules))
            nondet.append(NondetRule(condition, tuple(outcomes)))
        else:  # pragma: no cover
            raise UnsupportedFeature(f"effect node {node!r}")

    def ground_actions(self) -> List[Action]:
        out: List[Action] = []
        for schema in self.domain.actions:
            pools = [self.objects.get(t, []) for _, t in schema.params]
            for combo in itertools.product(*pools):
                binding = {var: obj
                           for (var, _), obj in zip(schema.params, combo)}
                name = ground_action_name(schema.name, combo)
                where = f"action {name}"
                pre = frozenset(self._ground_literal(l, binding, where)
                                for l in schema.precondition)
                if not lits_consistent(pre):
                    continue  # never applicable
                rules: List[Rule] = []
                nondet: List[NondetRule] = []
                self._walk_effect(schema.effect, binding, frozenset(), where,
                                  rules, nondet)
                out.append(Action(name, pre, tuple(rules), tuple(nondet)))
        return out

    def ground_init(self) -> List[Clause]:
        clauses: List[Clause] = []
        for entry in self.problem.init:
            lits = [self._ground_literal(l, {}, ":init")
                    for l in entry.literals]
            if entry.kind == "lit":
                clauses.append(frozenset(lits))
            elif entry.kind == "or":
                clauses.append(frozenset(lits))
            elif entry.kind == "oneof":
                clauses.append(frozenset(lits))
                for a, b in itertools.combinations(lits, 2):
                    clauses.append(frozenset((a.negate(), b.negate())))
            elif entry.kind == "unknown":
                (lit,) = lits
                clauses.append(frozenset((lit, lit.negate())))
        return clauses

    def ground_goal(self) -> Tuple[FrozenSet[Literal], Tuple[Clause, ...]]:
        lits = frozenset(self._ground_literal(l, {}, ":goal")
                         for l in self.problem.goal_literals)
        clauses = tuple(frozenset(self._ground_literal(l, {}, ":goal")
                                  for l in c)
                        for c in self.problem.goal_clauses)
        return lits, clauses


def ground(domain: DomainAst, problem: ProblemAst,
           rule_cap: int = DEFAULT_RULE_CAP) -> ConformantProblem:
    g = _Grounder(domain, problem, rule_cap)
    actions = g.ground_actions()
    init = g.ground_init()
    goal, goal_clauses = g.ground_goal()
    return conformant_problem(g.fluents, init, actions, goal, goal_clauses)


def load(domain_text: str, problem_text: str,
         rule_cap: int = DEFAULT_RULE_CAP) -> ConformantProblem:
    d, p = parse(domain_text, problem_text)
    return ground(d, p, rule_cap)


# --- classical emission ------------------------------------------------------

def _emit_literal(l: Literal) -> str:
    return f"({l.fluent})" if l.positive else f"(not ({l.fluent}))"


def _emit_condition(cond: Iterable[Literal]) -> str:
    lits = sorted_lits(cond)
    if len(lits) == 1:
        return _emit_literal(lits[0])
    return "(and " + " ".join(_emit_literal(l) for l in lits) + ")" \
        if lits else "(and)"


def emit_classical(K: ClassicalProblem,
                   domain_name: str = "kplan-classical",
                   problem_name: str = "kplan-classical-1"
                   ) -> Tuple[str, str]:
    """Serialize a translated problem as classical PDDL text.

    Every atom becomes a nullary predicate, so parsing and grounding the
    emission reproduces the problem exactly (see load_classical).
    """
    lines = [
        f"(define (domain {domain_name})",
        "  (:requirements :strips :negative-preconditions"
        " :conditional-effects)",
        "  (:predicates",
    ]
    for a in sorted(K.fluents):
        lines.append(f"    ({a})")
    lines.append("  )")
    for action in sorted(K.actions, key=lambda a: a.name):
        lines.append(f"  (:action {action.name}")
        lines.append("    :parameters ()")
        lines.append(f"    :precondition {_emit_condition(action.preconditions)}")
        effects = []
        for r in sorted(action.rules, key=Rule.sort_key):
            if r.condition:
                effects.append(
                    f"(when {_emit_condition(r.condition)} "
                    f"{_emit_literal(r.effect)})")
            else:
                effects.append(_emit_literal(r.effect))
        body = "(and " + " ".join(effects) + ")" if effects else "(and)"
        lines.append(f"    :effect {body}")
        lines.append("  )")
    lines.append(")")
    domain_text = "\n".join(lines) + "\n"

    plines = [
        f"(define (problem {problem_name})",
        f"  (:domain {domain_name})",
        "  (:init",
    ]
    for l in sorted_lits(K.init):
        if l.positive:
            plines.append(f"    ({l.fluent})")
    plines.append("  )")
    goal = " ".join(_emit_literal(l) for l in sorted_lits(K.goal))
    plines.append(f"  (:goal (and {goal}))")
    plines.append(")")
    problem_text = "\n".join(plines) + "\n"
    return domain_text, problem_text


def load_classical(domain_text: str, problem_text: str) -> ClassicalProblem:
    """Parse classical PDDL as produced by emit_classical."""
    from .translate import MERGE_PREFIX
    p = load(domain_text, problem_text)
    if not p.deterministic:
        raise UnsupportedFeature("classical input cannot contain 'oneof'")
    init: Set[Literal] = set()
    for c in p.init:
        if len(c) != 1 or not next(iter(c)).positive:
            raise UnsupportedFeature(
                "classical :init must list positive ground atoms")
        init |= c
    if p.goal_clauses:
        raise UnsupportedFeature("classical goals must be literal conjunctions")
    merges = frozenset(a.name for a in p.actions
                       if a.name.startswith(MERGE_PREFIX))
    return ClassicalProblem(p.fluents, frozenset(init), p.actions, p.goal,
                            merges)


# --- plan files --------------------------------------------------------------

def parse_plan_text(text: str) -> Tuple[str, ...]:
    """One action per line; surrounding parentheses and ';' comments allowed."""
    steps: List[str] = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("(") and line.endswith(")"):
            line = line[1:-1].strip()
        if " " in line:
            raise PddlSyntaxError(f"plan steps must be single names: {line!r}")
        steps.append(line)
    return tuple(steps)


def emit_plan_text(steps: Iterable[str]) -> str:
    return "".join(f"({s})\n" for s in steps)
