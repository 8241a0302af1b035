import random

import pytest
from hypothesis import given, settings, strategies as st

from upcap.ringalloc import (
    AllocationInstance,
    InstanceTooLarge,
    brute_force_oracle,
    compute_fg,
    format_instance,
    greedy_algo,
    parse_instance,
    rsum_closed_form,
    rsum_max,
    rsum_naive,
    rsum_sweep,
)

def instances(max_n=8, max_entry=12):
    return st.integers(2, max_n).flatmap(
        lambda n: st.builds(
            AllocationInstance,
            st.lists(st.integers(0, max_entry), min_size=n, max_size=n),
            st.lists(st.integers(0, max_entry), min_size=n, max_size=n),
        )
    )


def test_worked_vector_n3():
    inst = AllocationInstance((2, 0, 2), (2, 2, 0))
    assert rsum_naive(inst) == [4, 3, 2]
    res = greedy_algo(inst, 0)
    res.check_feasible(inst)
    assert res.total == 4
    assert rsum_max(inst) == (0, 4)


def test_worked_vector_n2():
    inst = AllocationInstance((2, 0), (3, 1))
    assert rsum_naive(inst) == [1, 2, 2]
    prof = rsum_closed_form(inst)
    assert (prof.x1, prof.x2, prof.d1, prof.d2) == (1, 2, 0, 0)
    assert prof.expand() == [1, 2, 2]
    assert rsum_max(inst) == (1, 2)


def test_closed_form_vector_n3():
    inst = AllocationInstance((2, 0, 2), (2, 2, 0))
    prof = rsum_closed_form(inst)
    assert (prof.x1, prof.x2, prof.d1, prof.d2) == (0, 0, 0, 0)
    assert prof.expand() == [4, 3, 2]


def test_saturated_symmetric_ring():
    inst = AllocationInstance((5, 5, 5), (5, 5, 5))
    for x in range(6):
        assert greedy_algo(inst, x).total == 15


def test_oracle_simple_cases():
    inst = AllocationInstance((2, 0), (3, 1))
    assert brute_force_oracle(inst, 1) == 2
    zero = AllocationInstance((0, 0, 0), (3, 3, 3))
    assert brute_force_oracle(zero, 0) == 0
    assert rsum_max(zero) == (0, 0)


def test_oracle_guard():
    big = AllocationInstance((100,) * 6, (100,) * 6)
    with pytest.raises(InstanceTooLarge):
        brute_force_oracle(big, 0)


def test_greedy_x_out_of_range():
    inst = AllocationInstance((2, 0), (3, 1))
    with pytest.raises(ValueError):
        greedy_algo(inst, 3)


def test_n1_rejected():
    with pytest.raises(ValueError):
        AllocationInstance((5,), (5,))


@settings(max_examples=150, deadline=None)
@given(instances(max_n=4, max_entry=4), st.data())
def test_greedy_matches_oracle(inst, data):
    x = data.draw(st.integers(0, inst.xmax))
    res = greedy_algo(inst, x)
    res.check_feasible(inst)
    assert res.own[0] == x
    assert res.total == brute_force_oracle(inst, x)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_algorithms_agree(inst):
    naive = rsum_naive(inst)
    assert rsum_sweep(inst) == naive
    assert rsum_closed_form(inst).expand() == naive


@settings(max_examples=150, deadline=None)
@given(instances())
def test_rsum_shape_rise_plateau_fall(inst):
    table = rsum_naive(inst)
    diffs = [b - a for a, b in zip(table, table[1:])]
    assert all(d in (-1, 0, 1) for d in diffs)
    assert diffs == sorted(diffs, reverse=True)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_fg_pointwise_matches_recurrence(inst):
    fs, gs = compute_fg(inst)
    n, xmax = inst.n, inst.xmax
    for x in range(xmax + 1):
        f = [0] * n
        g = [0] * n
        f[0] = x
        for i in range(1, n):
            g[i] = min(inst.s[i - 1] - f[i - 1], inst.p[i])
            f[i] = min(inst.p[i] - g[i], inst.s[i])
        g[0] = min(inst.s[n - 1] - f[n - 1], inst.p[0] - x)
        for i in range(n):
            assert fs[i].value(x) == f[i]
            assert gs[i].value(x) == g[i]


def test_parse_format_roundtrip():
    inst = AllocationInstance((1, 2, 3), (4, 5, 6))
    assert parse_instance(format_instance(inst)) == inst
    assert parse_instance("P: 4, 5, 6\n# comment\nS: 1 2 3") == inst


def test_parse_rejects_malformed():
    with pytest.raises(ValueError):
        parse_instance("S: 1 2 3")
    with pytest.raises(ValueError):
        parse_instance("Q: 1 2\nP: 1 2")


def test_large_instance_all_algorithms_agree():
    rng = random.Random(42)
    inst = AllocationInstance(
        tuple(rng.randint(0, 200) for _ in range(300)),
        tuple(rng.randint(0, 200) for _ in range(300)),
    )
    naive = rsum_naive(inst)
    assert rsum_sweep(inst) == naive
    assert rsum_closed_form(inst).expand() == naive
