import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adcmine import build_evidence, from_cells
from adcmine.approx import ApproxFunction, FnKind, greedy_f3_accept
from adcmine.enumeration import adc_enum, enumerate_dcs, mmcs
from adcmine.evidence import uncovered_mask
from adcmine.predicates import generate_predicate_space
from adcmine.sampling import Estimate, accept_on_sample

from conftest import (
    brute_adc_metrics,
    brute_minimal_hitting_sets,
    make_toys,
    minimal_adcs_from_metrics,
)


# ---------------------------------------------------------------------------
# exact minimal hitting sets

def test_mmcs_empty_family():
    assert mmcs(4, []) == [frozenset()]


def test_mmcs_family_with_empty_set():
    assert mmcs(3, [set(), {0, 1}]) == []


def test_mmcs_simple():
    got = set(mmcs(3, [{0, 1}, {1, 2}]))
    assert got == {frozenset({1}), frozenset({0, 2})}


def test_mmcs_duplicate_sets():
    got = set(mmcs(2, [{0}, {0}, {0, 1}]))
    assert got == {frozenset({0})}


def test_mmcs_against_brute_fixed_seeds():
    rng = np.random.default_rng(99)
    for _ in range(60):
        universe = int(rng.integers(1, 9))
        n_sets = int(rng.integers(0, 9))
        family = [set(rng.choice(universe, size=rng.integers(1, universe + 1),
                                 replace=False).tolist())
                  for _ in range(n_sets)]
        got = mmcs(universe, family)
        assert len(got) == len(set(got)), "duplicate output"
        assert set(got) == brute_minimal_hitting_sets(universe, family)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7), st.lists(
    st.sets(st.integers(0, 6), min_size=1, max_size=6), max_size=7))
def test_mmcs_against_brute_property(universe, raw_family):
    family = [ {e % universe for e in F} for F in raw_family ]
    got = mmcs(universe, family)
    assert len(got) == len(set(got))
    assert set(got) == brute_minimal_hitting_sets(universe, family)


# ---------------------------------------------------------------------------
# approximate enumeration vs the constrained subset oracle

def _enum_sets(e, space, fn, eps, **kw):
    found, stats = enumerate_dcs(e, space, fn, eps, **kw)
    return {frozenset(dc.hitting_set) for dc in found}, found, stats


def test_adc_enum_matches_oracle_spot():
    for d in make_toys(12, seed=1234):
        space = generate_predicate_space(d, 0.3)
        if len(space) == 0:
            continue
        e, v = build_evidence(d, space, with_vios=True)
        metrics = brute_adc_metrics(d, space)
        for kind in ("f1", "f2"):
            fn = (ApproxFunction.f1(d.n_rows) if kind == "f1"
                  else ApproxFunction.f2(v, d.n_rows))
            for eps in (0.0, 0.05, 0.25):
                got, found, stats = _enum_sets(e, space, fn, eps)
                want, empty_ok = minimal_adcs_from_metrics(metrics, d.n_rows, kind, eps)
                assert got == want, (kind, eps, d.n_rows, sorted(got), sorted(want))
                assert stats.empty_dc_accepted == empty_ok


def test_eps_zero_equals_filtered_mmcs():
    for d in make_toys(10, seed=55):
        space = generate_predicate_space(d, 0.3)
        if len(space) == 0:
            continue
        e, _ = build_evidence(d, space, with_vios=False)
        family = [set(np.nonzero(e.sets[s])[0].tolist()) for s in range(e.n_distinct)]
        exact = mmcs(len(space), family)
        # enumeration never takes two operators over one attribute pair,
        # so drop such hitting sets before comparing
        filtered = {h for h in exact
                    if len({space.group_of(p) for p in h}) == len(h)}
        got, _, _ = _enum_sets(e, space, ApproxFunction.f1(d.n_rows), 0.0)
        assert got == filtered


def test_emission_order_is_deterministic(table1):
    space = generate_predicate_space(table1)
    e, _ = build_evidence(table1, space, with_vios=False)
    fn = ApproxFunction.f1(table1.n_rows)
    runs = []
    for _ in range(2):
        found, _ = enumerate_dcs(e, space, fn, 2 / 210)
        runs.append([dc.hitting_set for dc in found])
    assert runs[0] == runs[1]
    assert len(runs[0]) == len(set(runs[0]))


def test_sorted_output_is_by_size_then_ids(table1):
    space = generate_predicate_space(table1)
    e, _ = build_evidence(table1, space, with_vios=False)
    found, _ = enumerate_dcs(e, space, ApproxFunction.f1(table1.n_rows),
                             16 / 210, sort_output=True)
    keys = [(len(dc.hitting_set), dc.hitting_set) for dc in found]
    assert keys == sorted(keys)


def test_empty_dc_flag_and_no_emissions(table1):
    space = generate_predicate_space(table1)
    e, _ = build_evidence(table1, space, with_vios=False)
    found, stats = enumerate_dcs(e, space, ApproxFunction.f1(table1.n_rows), 1.0)
    assert stats.empty_dc_accepted
    assert found == []


def test_unhittable_class_blocks_everything():
    # a pair satisfying nothing cannot be hit: no DC is ever valid at eps=0
    d = from_cells(["a", "b"], [["", ""], ["1", "x"], ["2", "y"]])
    space = generate_predicate_space(d, 0.0)
    e, _ = build_evidence(d, space, with_vios=False)
    found, stats = enumerate_dcs(e, space, ApproxFunction.f1(d.n_rows), 0.0)
    assert found == []
    # with a budget the empty classes fit inside, constraints reappear
    # (0.7 of 6 pairs floors to a 4-pair allowance)
    found2, _ = enumerate_dcs(e, space, ApproxFunction.f1(d.n_rows), 0.7)
    assert found2


def test_greedy_enumeration_self_consistent(table1):
    space = generate_predicate_space(table1)
    e, v = build_evidence(table1, space, with_vios=True)
    fn = ApproxFunction.f3_greedy(v, table1.n_rows)
    eps = 0.07
    found, stats = enumerate_dcs(e, space, fn, eps)
    assert found
    seen = set()
    for dc in found:
        h = frozenset(dc.hitting_set)
        assert h not in seen
        seen.add(h)
        ok, r = greedy_f3_accept(table1.n_rows, e, v, list(h), eps)
        assert ok
        assert dc.score == 1 - r / table1.n_rows
        for p in h:
            ok_sub, _ = greedy_f3_accept(table1.n_rows, e, v,
                                         list(h - {p}), eps)
            assert not ok_sub


def test_sampled_acceptance_self_consistent(table1):
    space = generate_predicate_space(table1)
    e, _ = build_evidence(table1, space, with_vios=False)
    fn = ApproxFunction.f1(table1.n_rows)
    alpha = 0.1
    eps = 40 / 210
    found, stats = enumerate_dcs(e, space, fn, eps, sample_alpha=alpha)
    assert found
    for dc in found:
        assert dc.sampled is not None and dc.sampled["accept"]
        est = Estimate(dc.violations / e.pair_universe, e.pair_universe)
        assert accept_on_sample(est, eps, alpha)
        assert dc.sampled["p_hat"] == est.p_hat


def test_sampled_stricter_than_plain(table1):
    space = generate_predicate_space(table1)
    e, _ = build_evidence(table1, space, with_vios=False)
    fn = ApproxFunction.f1(table1.n_rows)
    eps = 30 / 210
    sampled, _ = enumerate_dcs(e, space, fn, eps, sample_alpha=0.05)
    for dc in sampled:
        # anything accepted under the margin is in budget on its face
        assert dc.violations <= eps * e.pair_universe


def test_stats_counters(table1):
    space = generate_predicate_space(table1)
    e, _ = build_evidence(table1, space, with_vios=False)
    found, stats = enumerate_dcs(e, space, ApproxFunction.f1(table1.n_rows), 2 / 210)
    assert stats.emitted == len(found)
    assert stats.nodes > len(found)


def test_rejects_bad_arguments(table1):
    space = generate_predicate_space(table1)
    e, v = build_evidence(table1, space, with_vios=True)
    with pytest.raises(ValueError):
        enumerate_dcs(e, space, ApproxFunction.f1(table1.n_rows), -0.01)
    with pytest.raises(ValueError):
        enumerate_dcs(e, space, ApproxFunction.f2(v, table1.n_rows), 0.1,
                      sample_alpha=0.05)
