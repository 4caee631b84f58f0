import pytest
from hypothesis import given
from hypothesis import strategies as st

from collatz_family.dynamics import (
    CollatzT,
    Domain,
    DomainError,
    FamilyF,
    MapParam,
    StopReason,
    canonical_cycle,
    classify,
    f_orbit,
    f_step,
    iterate,
    run_until,
    same_cycle,
    stopping_time,
    t_orbit,
    t_step,
)

from .oracles import f_orbit_ref, f_ref, t_orbit_ref, t_ref

ints = st.integers(min_value=-(10**30), max_value=10**30)
indices = st.integers(min_value=-10**6, max_value=10**6)


@pytest.mark.parametrize("x, expected", [(15, 23), (2, 1), (-5, -7), (1, 2), (80, 40)])
def test_t_step_examples(x, expected):
    assert t_step(x) == expected


def test_t_step_rejects_zero():
    with pytest.raises(DomainError):
        t_step(0)
    with pytest.raises(DomainError):
        t_orbit(0, 3)


@pytest.mark.parametrize(
    "n, p, expected",
    [(3, 34, 48), (1, 4, 5), (1, 5, 4), (0, 7, 4), (-2, 24, 38)],
)
def test_f_step_examples(n, p, expected):
    assert f_step(n, p) == expected


@given(ints.filter(lambda x: x != 0))
def test_t_step_matches_rational_formula(x):
    assert t_step(x) == t_ref(x)


@given(indices, ints)
def test_f_step_matches_rational_formula(n, p):
    assert f_step(n, p) == f_ref(n, p)


def test_map_param_points():
    for n in range(-50, 51):
        param = MapParam(n)
        assert param.shift % 2 == 1
        assert param.anchor == param.shift + 1
        assert param.partner == param.shift + 2


@given(indices)
def test_stable_pair(n):
    assert f_step(n, 2 * n + 2) == 2 * n + 3
    assert f_step(n, 2 * n + 3) == 2 * n + 2


def test_domain_partition():
    for n in (-3, 0, 4):
        for p in range(2 * n - 5, 2 * n + 8):
            assert (classify(n, p) is Domain.D) == (p >= 2 * n + 2)


def test_iterate_examples():
    assert iterate(CollatzT(), 15, 5).terms == (15, 23, 35, 53, 80, 40)
    assert iterate(FamilyF.of(0), 16, 5).terms == (16, 24, 36, 54, 81, 41)
    assert iterate(CollatzT(), 9, 0).terms == (9,)
    assert iterate(FamilyF.of(-7), -100, 0).terms == (-100,)


@given(st.integers(1, 10**12), st.integers(0, 40))
def test_t_orbit_matches_reference(x, k):
    assert t_orbit(x, k) == t_orbit_ref(x, k)


@given(st.integers(-60, 60), st.integers(-(10**9), 10**9), st.integers(0, 40))
def test_f_orbit_matches_reference(n, p, k):
    assert f_orbit(n, p, k) == f_orbit_ref(n, p, k)


@given(st.integers(-30, 30), st.integers(1, 5000), st.integers(0, 30))
def test_iterate_is_consecutive_steps(n, N, k):
    kind = FamilyF.of(n)
    traj = iterate(kind, N + 2 * n + 1, k)
    assert len(traj.terms) == k + 1
    assert all(kind.step(a) == b for a, b in zip(traj.terms, traj.terms[1:]))


@given(st.integers(-30, 30), st.integers(0, 3000), st.integers(0, 60))
def test_orbits_started_in_domain_stay_in_domain(n, offset, k):
    floor = 2 * n + 2
    assert min(f_orbit(n, floor + offset, k)) >= floor


def test_run_until_reaches_anchor():
    traj = run_until(FamilyF.of(0), 7, 100)
    assert traj.stop is StopReason.REACHED_ANCHOR
    assert traj.steps == 6
    assert traj.terms == (7, 4, 6, 9, 5, 3, 2)


def test_run_until_anchor_at_step_zero():
    assert run_until(FamilyF.of(4), 10, 5).steps == 0
    assert run_until(CollatzT(), 1, 5).stop is StopReason.REACHED_ANCHOR


@pytest.mark.parametrize(
    "kind, start, cycle",
    [
        (FamilyF.of(3), 2, (2, 0, -3)),
        (CollatzT(), -5, (-5, -7, -10)),
        (FamilyF.of(3), 6, (6,)),
        (FamilyF.of(3), 7, (7,)),
        (CollatzT(), -1, (-1,)),
    ],
)
def test_run_until_cycles(kind, start, cycle):
    traj = run_until(kind, start, 100)
    assert traj.stop is StopReason.CYCLE_DETECTED
    assert traj.cycle == cycle


def test_cycle_is_minimal_and_closed():
    for start in range(-40, 0):
        traj = run_until(CollatzT(), start, 1000)
        cyc = traj.cycle
        assert traj.stop is StopReason.CYCLE_DETECTED
        assert len(set(cyc)) == len(cyc)
        assert all(t_step(cyc[i]) == cyc[(i + 1) % len(cyc)] for i in range(len(cyc)))


def test_canonical_rotation():
    assert canonical_cycle((2, 0, -3)) == (-3, 2, 0)
    assert same_cycle((-7, -10, -5), (-5, -7, -10))
    assert not same_cycle((1, 2), (2, 3))


def test_run_until_budget_exhausted_is_a_result():
    traj = run_until(CollatzT(), 27, 10)
    assert traj.stop is StopReason.BUDGET_EXHAUSTED
    assert traj.steps == 10


def test_run_until_never_finds_foreign_cycle_in_domain():
    for n in (-4, 0, 5):
        kind = FamilyF.of(n)
        for p in range(2 * n + 2, 2 * n + 400):
            assert run_until(kind, p, 10_000).stop is StopReason.REACHED_ANCHOR


def test_stopping_time_agrees_with_run_until():
    for n in (-2, 1):
        kind = FamilyF.of(n)
        for p in range(2 * n + 2, 2 * n + 200):
            assert stopping_time(kind, p) == run_until(kind, p).steps
    assert stopping_time(CollatzT(), 27) == run_until(CollatzT(), 27).steps
    assert stopping_time(CollatzT(), 27, 5) is None


def test_determinism():
    a = run_until(FamilyF.of(-3), 97, 500)
    b = run_until(FamilyF.of(-3), 97, 500)
    assert a == b
