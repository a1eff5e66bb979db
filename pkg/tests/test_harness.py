"""Verification harness: class generation, trace verdicts, cost model."""

from fractions import Fraction

import numpy as np
import pytest

from oblivjoin.baseline import nested_loop_join
from oblivjoin.harness import (
    SHAPES,
    CostBreakdown,
    InfeasibleShapeError,
    bench,
    bench_csv,
    cost_report,
    gen_test_class,
    placement_uniformity,
    verify_trace_class,
)


@pytest.mark.parametrize("shape", SHAPES)
def test_gen_class_invariants(shape):
    tc = gen_test_class(12, 15, shape, seed=3, instances=6)
    assert tc.shape == shape
    assert len(tc.instances) == 6
    for t1, t2 in tc.instances:
        assert t1.shape == (12, 2)
        assert t2.shape == (15, 2)
        # every instance realizes the class's public m
        assert len(nested_loop_join(t1, t2)) == tc.m


def test_gen_class_is_reproducible():
    a = gen_test_class(10, 10, "power-law", seed=7, instances=3)
    b = gen_test_class(10, 10, "power-law", seed=7, instances=3)
    for (x1, x2), (y1, y2) in zip(a.instances, b.instances):
        assert np.array_equal(x1, y1)
        assert np.array_equal(x2, y2)
    c = gen_test_class(10, 10, "power-law", seed=8, instances=3)
    assert not all(np.array_equal(x[0], y[0])
                   for x, y in zip(a.instances, c.instances))


def test_gen_class_instances_differ_but_share_m():
    tc = gen_test_class(20, 20, "mixed", seed=1, instances=8)
    ms = {len(nested_loop_join(t1, t2)) for t1, t2 in tc.instances}
    assert ms == {tc.m}
    firsts = {t1.tobytes() for t1, _ in tc.instances}
    assert len(firsts) > 1


def test_infeasible_shape_raises():
    with pytest.raises(InfeasibleShapeError):
        gen_test_class(0, 5, "single-1xn", seed=0, instances=2)
    with pytest.raises(InfeasibleShapeError):
        gen_test_class(2, 2, "mixed", seed=0, instances=2)


@pytest.mark.parametrize("shape", SHAPES)
def test_verify_trace_class_passes(shape):
    tc = gen_test_class(9, 11, shape, seed=5, instances=5)
    v = verify_trace_class(tc)
    assert v.passed
    assert v.first_divergence is None
    assert len(set(v.digests)) == 1


def test_verify_trace_class_catches_divergence():
    # splice an instance with a different m into the class: its trace must
    # diverge and be reported
    tc = gen_test_class(6, 6, "all-1x1", seed=2, instances=3)
    rogue = gen_test_class(6, 6, "disjoint", seed=2, instances=1)
    tc.instances[2] = rogue.instances[0]
    v = verify_trace_class(tc)
    assert not v.passed
    assert v.first_divergence == (0, 2)


# -- cost model ---------------------------------------------------------------

def test_cost_report_structure():
    cb = cost_report(32, 32, 32)
    assert isinstance(cb, CostBreakdown)
    assert cb.total_events > 0
    # network phases decompose into 4-event operations
    for ph in ("initial_sorts", "distribute_sort", "distribute_route",
               "align_sort"):
        assert cb.ops(ph) > 0


def test_cost_exact_counts_at_powers_of_two():
    # comparator counts are the classical closed forms at powers of two
    cb = cost_report(32, 32, 32)
    # initial sorts: two sorts of n = 64 -> 2 * 64*6*7/4, model n lg^2 n / 2
    assert cb.ops("initial_sorts") == 2 * (64 * 6 * 7) // 4
    # distribute sorts: one length-32 sort per table
    assert cb.ops("distribute_sort") == 2 * (32 * 5 * 6) // 4
    # route: two length-32 routings, sum over hops of (m - j)
    assert cb.ops("distribute_route") == 2 * sum(32 - j for j in (16, 8, 4, 2, 1))
    # align: one length-32 sort
    assert cb.ops("align_sort") == (32 * 5 * 6) // 4


def test_cost_deviation_is_exact_fraction_at_pow2():
    cb = cost_report(32, 32, 32)
    dev = cb.deviation("align_sort")
    assert isinstance(dev, Fraction)
    # measured 32*5*6/4 vs model 32*25/4: |6/5 - 1| = 1/5
    assert dev == Fraction(1, 5)


def test_cost_report_defaults():
    cb = cost_report(16)
    assert (cb.n1, cb.n2, cb.m) == (16, 16, 16)


def test_cost_summary_lines_render():
    lines = cost_report(8).summary_lines()
    assert any("initial_sorts" in ln for ln in lines)
    assert lines[0].startswith("n1=8")


def test_cost_shares_sum_to_one():
    cb = cost_report(16, 16, 8)
    assert abs(sum(cb.shares().values()) - 1.0) < 1e-9


# -- bench --------------------------------------------------------------------

def test_bench_rows_and_csv():
    rows = bench([64, 128], reps=1)
    assert [r.n for r in rows] == [64, 128]
    assert all(r.oblivious_s > 0 and r.sortmerge_s > 0 for r in rows)
    assert rows[0].events > 0
    csv = bench_csv(rows)
    lines = csv.strip().split("\n")
    assert lines[0] == "n,m,oblivious_s,sortmerge_s,events"
    assert len(lines) == 3


# -- randomized placement -----------------------------------------------------

def test_placement_uniformity_returns_counts_and_pvalue():
    counts, p = placement_uniformity(4, 16, n_seeds=40)
    assert counts.sum() == 4 * 40
    assert 0.0 <= p <= 1.0
