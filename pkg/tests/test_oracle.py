import dataclasses
import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcrepair.flowgraph import SystemParams, attach_collector, build_initial, canonical_worst_case
from bcrepair.oracle import (
    BudgetExceeded,
    PatternSearch,
    _unit_caps,
    canonical_value,
    collector_choices,
    failure_patterns,
    full_graph,
    max_flow,
    oracle_alpha_star,
    pattern_notes,
    worst_case_mincut,
)
from bcrepair.tradeoff import bound_sum
from bcrepair.xrational import xmin, xr

HALF = Fraction(1, 2)
SAMPLES = [(Fraction(2, 5), Fraction(1, 5)), (Fraction(1), Fraction(1)), (Fraction(1), Fraction(1, 10)),
           (Fraction(1, 3), Fraction(1, 2)), (Fraction(3, 7), Fraction(2, 9))]


@pytest.mark.parametrize("alpha,beta", SAMPLES)
def test_one_round_graph_value(alpha, beta):
    p = SystemParams.make(4, 2, 2, HALF)
    a1 = alpha * p.rho
    assert max_flow(canonical_worst_case(p, alpha, beta)).value == xmin(2 * a1 + 2 * beta, 2 * alpha)


@pytest.mark.parametrize("alpha,beta", SAMPLES)
def test_two_round_graph_value(alpha, beta):
    p = SystemParams.make(4, 3, 2, HALF)
    a1 = alpha * p.rho
    expected = xmin(3 * a1 + 2 * beta, 2 * alpha + a1)
    assert max_flow(canonical_worst_case(p, alpha, beta)).value == expected
    assert worst_case_mincut(p, alpha, beta).value == expected


def test_single_path():
    g = attach_collector(build_initial(SystemParams.make(2, 1, 1), Fraction(5, 3)), [1])
    report = max_flow(g)
    assert report.value == Fraction(5, 3)
    assert len(report.cut_edges) == 1


def test_no_collector_is_an_error():
    with pytest.raises(ValueError):
        max_flow(build_initial(SystemParams.make(2, 1, 1), 1))


def test_cut_report_is_a_real_cut():
    p = SystemParams.make(5, 3, 1, Fraction(1, 4))
    g = full_graph(p, Fraction(1, 2), Fraction(1, 6), (frozenset({1}), frozenset({2}), frozenset({1})), (1, 2, 3))
    report = max_flow(g)
    assert sum((e.capacity for e in report.cut_edges), xr(0)) == report.value
    removed = set(report.cut_edges)
    reach, stack = {g.source}, [g.source]
    while stack:
        v = stack.pop()
        for e in g.edges:
            if e.tail == v and e not in removed and e.head not in reach:
                reach.add(e.head)
                stack.append(e.head)
    assert g.collector not in reach
    assert g.source in report.source_side()
    parsed = json.loads(report.to_json())
    assert parsed["value"] == str(report.value)
    assert len(parsed["cut_edges"]) == len(report.cut_edges)


def test_vertex_order_does_not_matter():
    p = SystemParams.make(5, 4, 2, Fraction(1, 3))
    g = canonical_worst_case(p, Fraction(2, 7), Fraction(1, 9))
    shuffled = dataclasses.replace(g, vertices=tuple(reversed(g.vertices)), edges=tuple(reversed(g.edges)))
    assert max_flow(shuffled).value == max_flow(g).value


@pytest.mark.parametrize("n,k,r", [(4, 3, 2), (5, 3, 2), (4, 2, 1), (5, 2, 2)])
def test_compact_network_matches_full_graph(n, k, r):
    rho, alpha, beta = Fraction(1, 3), Fraction(1, 2), Fraction(1, 5)
    p = SystemParams.make(n, k, r, rho)
    search = PatternSearch(n, k, r, symmetric=False)
    ints, scale = _unit_caps(alpha, rho, beta)
    for pattern, dc, comp in search.entries[::7]:
        value = Fraction(comp.solve(ints)[0], scale)
        assert max_flow(full_graph(p, alpha, beta, pattern, dc)).value == value
        assert max_flow(full_graph(p, alpha, beta, pattern, dc, with_failed=False)).value == value


@pytest.mark.parametrize("n,k,r", [(4, 3, 2), (5, 3, 1), (5, 4, 2), (6, 3, 2)])
def test_symmetric_enumeration_finds_same_worst_case(n, k, r):
    rho = Fraction(1, 4)
    full = PatternSearch(n, k, r, symmetric=False)
    reduced = PatternSearch(n, k, r, symmetric=True)
    assert len(reduced) < len(full)
    for alpha, beta in SAMPLES[:3]:
        assert full.evaluate(alpha, rho, beta)[0] == reduced.evaluate(alpha, rho, beta)[0]


def test_enumeration_sizes():
    # patterns of length 0 and 1
    assert len(list(failure_patterns(4, 2, 1, symmetric=False))) == 1 + 6
    assert list(failure_patterns(4, 2, 1)) == [(), (frozenset({1, 2}),)]
    # {3, 4} avoids the last round and is already covered by the empty pattern
    assert len(list(collector_choices(4, 2, (frozenset({1, 2}),), symmetric=False))) == 5


def test_small_instance_canonical_equals_exhaustive():
    p = SystemParams.make(4, 2, 2, HALF)
    for a in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        report = worst_case_mincut(p, a, a)
        assert report.value == report.canonical_value


CLOSED_FORM_REGIME = [(n, k, r) for n in range(2, 7) for k in range(1, n) for r in range(1, k + 1)
                      if k % r == 0 and r <= n - k]


@pytest.mark.parametrize("n,k,r", CLOSED_FORM_REGIME)
def test_canonical_graph_is_worst_when_r_divides_k(n, k, r):
    for rho in (Fraction(0), HALF):
        p = SystemParams.make(n, k, r, rho)
        for alpha, beta in SAMPLES:
            assert worst_case_mincut(p, alpha, beta).value == canonical_value(p, alpha, beta)


def test_canonical_graph_not_worst_with_more_failures_than_survivors():
    # the collector can read a helper together with the newcomer it fed
    p = SystemParams.make(3, 2, 2, HALF)
    report = worst_case_mincut(p, Fraction(1, 2), Fraction(1))
    assert report.value < report.canonical_value
    assert any("outside proof regime" in note for note in report.notes)


def test_bound_sum_matches_oracle():
    p = SystemParams.make(6, 4, 2, HALF)
    for alpha, beta in product([Fraction(1, 5), Fraction(1, 3), Fraction(1)], [Fraction(1, 12), Fraction(1, 4), 1]):
        assert worst_case_mincut(p, alpha, beta).value == bound_sum(p, alpha, beta)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_nothing_lost_means_k_alpha(k):
    p = SystemParams.make(4, k, 1, 1)
    for alpha, beta in SAMPLES:
        assert worst_case_mincut(p, alpha, beta).value == k * alpha


@settings(max_examples=25, deadline=None)
@given(st.fractions(Fraction(1, 10), 2, max_denominator=12), st.fractions(0, 2, max_denominator=12),
       st.fractions(0, 1, max_denominator=12))
def test_worst_case_monotone_in_alpha_and_beta(alpha, beta, step):
    p = SystemParams.make(5, 3, 2, Fraction(1, 3))
    base = worst_case_mincut(p, alpha, beta).value
    assert worst_case_mincut(p, alpha + step, beta).value >= base
    assert worst_case_mincut(p, alpha, beta + step).value >= base


def test_oracle_threshold_examples():
    assert oracle_alpha_star(SystemParams.make(4, 3, 2, HALF), Fraction(2, 5)) == Fraction(2, 5)
    assert oracle_alpha_star(SystemParams.make(4, 2, 1, HALF), Fraction(3, 8)) == HALF
    assert oracle_alpha_star(SystemParams.make(5, 3, 1, 0), 10 ** 6) == Fraction(1, 3)


def test_oracle_infeasible_without_bandwidth():
    assert oracle_alpha_star(SystemParams.make(4, 2, 1, 0), 0).is_infinite


def test_oracle_rejects_bad_gamma():
    with pytest.raises(ValueError):
        oracle_alpha_star(SystemParams.make(4, 2, 1, 0), -1)


def test_pattern_notes():
    p = SystemParams.make(5, 2, 1, 0)
    assert pattern_notes(p, (frozenset({1}), frozenset({2}))) == ()
    notes = pattern_notes(p, (frozenset({1}), frozenset({1})))
    assert notes and "re-failure" in notes[0]


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        PatternSearch(6, 4, 2, budget=10)
