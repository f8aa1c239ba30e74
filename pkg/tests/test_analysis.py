"""Relevance, relevant clauses, covers, width, mutexes, consistency."""

import pytest

from kplan import (
    build_context,
    c_i,
    consistency_check,
    cover,
    mutex_set,
    neg,
    pos,
    prime_implicates,
    relevance,
    relevant_clauses,
    satisfies,
    width,
    width_of_literal,
)
from kplan.analysis import all_literals, target_literals
from kplan.errors import WidthSearchCap
from kplan.model import action, conformant_problem, rule

from conftest import build_tiny, random_suite, reachable_source_states


def test_relevance_direct_and_transitive(tiny):
    rel = relevance(tiny)
    # condition literal -> effect
    assert rel.relevant(pos("q"), pos("r"))
    assert rel.relevant(pos("q"), pos("p"))
    assert rel.relevant(pos("p"), neg("p"))
    # closed by the negation rule: ~p -> p because p -> ~p
    assert rel.relevant(neg("p"), pos("p"))
    # and reflexive
    assert rel.relevant(pos("r"), pos("r"))
    # nothing makes r relevant to q
    assert not rel.relevant(pos("r"), pos("q"))


def test_relevance_contrapositive_variant(tiny):
    rel = relevance(tiny, rule4="contrapositive")
    assert rel.relevant(neg("q"), neg("r"))  # from q -> r
    with pytest.raises(ValueError):
        relevance(tiny, rule4="bogus")


def test_ci_unknowns_and_relevant_clauses(tiny):
    ctx = build_context(tiny)
    # p and r are unknown; q is a known unit
    assert set(ctx.ci) == {frozenset([pos("p"), neg("p")]),
                           frozenset([pos("r"), neg("r")])}
    rcs = relevant_clauses(ctx.ci, pos("p"), ctx.rel)
    assert set(rcs.clauses) == {frozenset([pos("p"), neg("p")])}
    # nothing makes ~r relevant to r, so r's tautology clause is excluded
    rcs_r = relevant_clauses(ctx.ci, pos("r"), ctx.rel)
    assert rcs_r.clauses == ()


def test_cover_minimal_hitting_sets():
    pi = prime_implicates([frozenset([pos("q")]),
                           frozenset([pos("p"), pos("r")])],
                          ["p", "q", "r"])
    covers = cover([frozenset([pos("p"), pos("r")])], pi)
    assert set(covers) == {frozenset([pos("p")]), frozenset([pos("r")])}
    # I-inconsistent selections are pruned: ~q cannot appear in a cover
    covers2 = cover([frozenset([pos("p"), neg("q")])], pi)
    assert set(covers2) == {frozenset([pos("p")])}


def test_satisfies_uses_closures():
    pi = prime_implicates([frozenset([pos("p"), pos("r")])], ["p", "r"])
    C = [frozenset([pos("p"), pos("r")])]
    assert satisfies([frozenset([pos("p")]), frozenset([pos("r")])], C, pi)
    # the closure of ~p entails r, so even the "other" tag hits the clause
    assert satisfies([frozenset([neg("p")])], C, pi)
    assert not satisfies([frozenset()], C, pi)


def test_width_of_literal_and_problem(tiny):
    ctx = build_context(tiny)
    w, witness = width_of_literal(ctx.ci, pos("p"), ctx.rel, ctx.pi)
    assert w == 1
    assert witness == (frozenset([neg("p"), pos("p")]),)
    assert width(tiny) == 1
    with pytest.raises(WidthSearchCap):
        width_of_literal(ctx.ci, pos("p"), ctx.rel, ctx.pi, cap=0)


def test_width_zero_for_classical_input():
    problem = conformant_problem(
        ["p", "g"], [[pos("p")], [neg("g")]],
        [action("a", rules=[rule([pos("p")], pos("g"))])], [pos("g")])
    assert width(problem) == 0


def test_target_literals(tiny):
    assert set(target_literals(tiny)) == {pos("p"), pos("r")}
    assert set(target_literals(tiny, include_all=True)) == set(
        all_literals(tiny.fluents))


def test_mutex_complementary_pairs(tiny):
    mx = mutex_set(tiny)
    for f in tiny.fluents:
        assert mx.mutex(pos(f), neg(f))
    assert consistency_check(tiny)


def test_mutex_soundness_on_random_suite():
    """No exhaustively reachable state may contain a mutex pair."""
    for problem in random_suite(101, 25):
        mx = mutex_set(problem)
        for s in reachable_source_states(problem):
            for pair in mx.pairs:
                assert not pair <= s, (problem, sorted(pair))


def test_strengthened_mutex_is_superset_on_random_suite():
    for problem in random_suite(202, 10):
        base = mutex_set(problem)
        strong = mutex_set(problem, strengthened=True)
        assert base.pairs <= strong.pairs


def test_consistency_check_rejects_unsat_init():
    problem = conformant_problem(
        ["p"], [[pos("p")], [neg("p")]], [action("a")], [pos("p")])
    assert not consistency_check(problem)


def test_ci_of_fully_known_init_is_empty():
    pi = prime_implicates([frozenset([pos("p")]), frozenset([neg("q")])],
                          ["p", "q"])
    assert c_i(pi) == ()
