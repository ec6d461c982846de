from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pascalwalk import (
    TrapTrajectory,
    alternating_phi,
    check_sym_domination,
    evolve_survival,
    hit_mass,
    lazy_walk,
    moreau_engine,
    range_via_hits,
    random_phi,
    simple_random_walk,
    uniform_three,
    verify_decomposition,
    verify_pascal,
    verify_w_recursion,
)
from pascalwalk.engine import range_via_hits
from pascalwalk.errors import ValidationError
from pascalwalk.montecarlo import enumerate_range
from pascalwalk.perturb import InsertionPath

from conftest import (
    enumerate_two_trap_mass,
    fraction_dp_two_trap,
    random_insertion_path,
    random_trap_trajectory,
)


def test_origin_trap_first_values(srw1):
    series = hit_mass(evolve_survival(srw1, TrapTrajectory.zero(1), 4))
    # only the origin is trapped at every step: W(0) = 1, then each step
    # adds the mass of surviving walkers stepping onto 0
    assert series.values[0] == 1
    assert series.values[1] == 2
    assert all(b >= a for a, b in zip(series.values, series.values[1:]))


def test_engine_matches_fraction_dp(srw1):
    for phi_seed in (0, 1, 2):
        traj = random_phi(phi_seed, 8, srw1)
        got = hit_mass(evolve_survival(srw1, traj, 6)).values
        want = fraction_dp_two_trap(srw1, traj, 6)
        assert list(got) == want


def test_engine_matches_fraction_dp_d2(srw2):
    traj = random_phi(4, 6, srw2)
    got = hit_mass(evolve_survival(srw2, traj, 5)).values
    want = fraction_dp_two_trap(srw2, traj, 5)
    assert list(got) == want


def test_engine_matches_path_enumeration(srw1):
    # full 2^n path sweep from every reachable start; independent of any DP
    traj = alternating_phi(8)
    got = hit_mass(evolve_survival(srw1, traj, 5)).values
    want = enumerate_two_trap_mass(srw1, traj, 5)
    assert list(got) == want


def test_engine_matches_path_enumeration_uniform3():
    pmf = uniform_three()
    traj = random_trap_trajectory(9, 1, 6)
    got = hit_mass(evolve_survival(pmf, traj, 4)).values
    want = enumerate_two_trap_mass(pmf, traj, 4)
    assert list(got) == want


@given(seed=st.integers(min_value=0, max_value=30))
@settings(max_examples=15, deadline=None)
def test_hit_mass_monotone(seed, srw1):
    traj = random_phi(seed, 12, srw1)
    series = hit_mass(evolve_survival(srw1, traj, 10))
    for inc in series.increments():
        assert inc >= 0


def test_survival_field_in_unit_interval(srw1):
    result = evolve_survival(srw1, alternating_phi(12), 8)
    for f in result.fields:
        for x in f.num:
            v = f.value(x)
            assert 0 <= v <= 1


def test_killed_mass_accounts_increments(srw1):
    result = evolve_survival(srw1, alternating_phi(12), 8)
    series = hit_mass(result)
    for n in range(1, 9):
        killed = sum(result.killed[n].values(), Fraction(0))
        assert series.values[n] - series.values[n - 1] == killed


def test_pascal_margins_nonnegative(srw1):
    traj = random_phi(3, 12, srw1)
    report = verify_pascal(srw1, traj, 10)
    assert report.passed
    assert all(m >= 0 for m in report.margins)
    assert not report.unproved_regime


def test_pascal_gate_on_unproved():
    from pascalwalk import IncrementPmf

    pmf = IncrementPmf(1, {(2,): Fraction(1, 2), (-2,): Fraction(1, 2)})
    with pytest.raises(ValidationError, match="unproved"):
        verify_pascal(pmf, TrapTrajectory.zero(1), 4)
    report = verify_pascal(pmf, TrapTrajectory.zero(1), 4, allow_unproved=True)
    assert report.unproved_regime


def test_two_trap_dominates_single_trap(srw1):
    # the two-trap caught mass is at least the single-trap caught mass
    traj = random_phi(11, 12, srw1)
    two = hit_mass(evolve_survival(srw1, traj, 10))
    one = moreau_engine(srw1, traj, 10)
    for a, b in zip(two.values, one.values):
        assert a >= b


def test_sym_domination_srw(srw1):
    traj = random_phi(2, 12, srw1)
    rp = evolve_survival(srw1, traj, 10)
    r0 = evolve_survival(srw1, TrapTrajectory.zero(1), 10)
    for n in range(11):
        rep = check_sym_domination(rp.fields[n], r0.fields[n])
        assert rep.passed, (n, rep.witness)
        assert rep.min_slack >= 0


def test_sym_domination_rejects_d2(srw2):
    r = evolve_survival(srw2, TrapTrajectory.zero(2), 2)
    with pytest.raises(ValidationError):
        check_sym_domination(r.fields[0], r.fields[0])


def test_decomposition_residuals_zero(srw1):
    traj = random_phi(6, 10, srw1)
    rep = verify_decomposition(srw1, traj, 8)
    assert rep.passed
    assert all(r == 0 for r in rep.residuals)


def test_decomposition_time_zero_target(srw1):
    # at n = 0 only the endpoint constraint contributes
    rep = verify_decomposition(srw1, TrapTrajectory.zero(1), 0)
    assert rep.residuals == (0,)


def test_w_recursion_slacks(srw1):
    traj = random_phi(8, 10, srw1)
    rep = verify_w_recursion(srw1, traj, 8)
    assert rep.passed
    assert all(s >= 0 for s in rep.slacks)
    assert not rep.unproved_regime


def test_w_recursion_gate():
    # heavy mass at distance 2 breaks the paired-kernel center condition
    from pascalwalk import IncrementPmf

    pmf = IncrementPmf(
        1,
        {
            (1,): Fraction(1, 8),
            (-1,): Fraction(1, 8),
            (2,): Fraction(3, 8),
            (-2,): Fraction(3, 8),
        },
    )
    from pascalwalk import check_mono_conditions

    assert not check_mono_conditions(pmf, 4, mode="exact").holds
    with pytest.raises(ValidationError):
        verify_w_recursion(pmf, TrapTrajectory.zero(1), 4)


def test_range_via_hits_unperturbed(srw1):
    # expected range of the held walk: |R_4| for 2 SRW steps is 5/2... the
    # value is pinned by the enumeration oracle rather than quoted
    f = InsertionPath.zero(1, 4)
    assert range_via_hits(srw1, f, 4) == enumerate_range(srw1, f, 4)


@given(
    seed=st.integers(min_value=0, max_value=20),
    horizon=st.integers(min_value=0, max_value=9),
)
@settings(max_examples=25, deadline=None)
def test_range_via_hits_matches_enumeration(seed, horizon, srw1):
    f = random_insertion_path(seed, 1, horizon)
    assert range_via_hits(srw1, f, horizon) == enumerate_range(srw1, f, horizon)


def test_range_monotone_in_perturbation(srw1):
    # perturbing never shrinks the expected range
    for seed in range(5):
        f = random_insertion_path(seed, 1, 9)
        zero = InsertionPath.zero(1, 9)
        assert range_via_hits(srw1, f, 9) >= range_via_hits(srw1, zero, 9)


def test_float_mode_tracks_exact(srw1):
    traj = random_phi(1, 10, srw1)
    exact = hit_mass(evolve_survival(srw1, traj, 8, "exact"))
    approx = hit_mass(evolve_survival(srw1, traj, 8, "float"))
    for a, b in zip(exact.values, approx.values):
        assert abs(float(a) - b) < 1e-12
