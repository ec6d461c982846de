"""Acceptance suite: one test per release criterion.

Each test prints a single CRITERION line so the verdicts survive in the
captured output of a full run.  Tolerances are pinned here, not imported,
so a library change that moves a tolerance fails loudly.
"""

import math
from fractions import Fraction
from itertools import product

import pytest

from pascalwalk import (
    IncrementPmf,
    InsertionPath,
    TrapTrajectory,
    check_mono_conditions,
    check_moreau_conditions,
    evolve_survival,
    fourier_crosscheck,
    hit_mass,
    lazy_walk,
    n_step_kernel,
    random_phi,
    range_via_hits,
    simple_random_walk,
    uniform_three,
    verify_decomposition,
    verify_pascal,
    verify_w_recursion,
)
from pascalwalk.coupling import (
    exhaustive_coupling_oracle,
    run_coupling,
    verify_pnxodd_exact,
)
from pascalwalk.engine import check_sym_domination
from pascalwalk.kernels import convolve_int
from pascalwalk.montecarlo import counterexample_ratio, enumerate_range, mc_range
from pascalwalk.trapsim import (
    HoldingLaw,
    ParticleTrajectory,
    TrapSimConfig,
    simulate_trap_field,
    survival_via_identity,
    zigzag_particle,
)

from conftest import random_insertion_path


def _verdict(num, ok, detail=""):
    line = f"CRITERION {num}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)


def _box_law(d):
    """Uniform law on {-1, 0, 1}^d \\ constraints: the fuzzing step law."""
    cells = list(product((-1, 0, 1), repeat=d))
    return IncrementPmf(d, {c: Fraction(1, len(cells)) for c in cells})


def test_criterion_1_exact_pascal_suite():
    horizon = 24
    laws = [simple_random_walk(1), simple_random_walk(2), uniform_three()]
    worst = None
    ok = True
    for pmf in laws:
        step_law = _box_law(pmf.dim)
        for seed in range(100):
            traj = random_phi(seed, horizon + 1, step_law)
            report = verify_pascal(pmf, traj, horizon)
            ok &= report.passed
            m = min(report.margins)
            if worst is None or m < worst:
                worst = m
            assert all(isinstance(x, (int, Fraction)) for x in report.margins)
    _verdict(1, ok, f"min margin {worst} over 300 runs, horizon {horizon}")
    assert ok
    assert worst >= 0


def test_criterion_2_domination_induction():
    horizon = 20
    ok = True
    worst = None
    for pmf in (simple_random_walk(1), uniform_three()):
        origin = evolve_survival(pmf, TrapTrajectory.zero(1), horizon)
        for seed in range(50):
            traj = random_phi(seed, horizon + 1, _box_law(1))
            run = evolve_survival(pmf, traj, horizon)
            for n in range(horizon + 1):
                rep = check_sym_domination(run.fields[n], origin.fields[n])
                ok &= rep.passed
                if worst is None or rep.min_slack < worst:
                    worst = rep.min_slack
    _verdict(2, ok, f"min slack {worst}, 100 trajectories x 21 times")
    assert ok
    assert worst >= 0


def test_criterion_3_conditions_suite():
    ok = True
    for d in (1, 2, 3):
        rep = check_mono_conditions(simple_random_walk(d), 16, mode="exact")
        ok &= rep.holds and rep.min_slack >= 0
    rep4 = check_mono_conditions(simple_random_walk(4), 16, mode="float", tol=1e-12)
    ok &= rep4.holds and rep4.min_slack >= -1e-12

    for d in (1, 2):
        rep = check_moreau_conditions(lazy_walk(d), 16, mode="exact")
        ok &= rep.holds

    fail = check_moreau_conditions(simple_random_walk(1), 16, mode="exact")
    witnessed = (not fail.holds) and any(n == 1 for _, n, _ in fail.failures)
    ok &= witnessed
    _verdict(3, ok, f"srw d=1 single-kernel witness at n=1: {witnessed}")
    assert ok


def test_criterion_4_decomposition_identities():
    horizon = 12
    ok = True
    worst_slack = None
    for d in (1, 2):
        pmf = simple_random_walk(d)
        for seed in range(20):
            traj = random_phi(seed, horizon + 2, _box_law(d))
            dec = verify_decomposition(pmf, traj, horizon)
            ok &= dec.passed and all(r == 0 for r in dec.residuals)
            rec = verify_w_recursion(pmf, traj, horizon)
            ok &= rec.passed
            m = min(rec.slacks)
            if worst_slack is None or m < worst_slack:
                worst_slack = m
    _verdict(4, ok, f"residuals all 0; min recursion slack {worst_slack}")
    assert ok
    assert worst_slack >= 0


def test_criterion_5_coupling_suite():
    ok = True
    for x, n_max in (((3,), 9), ((2, 1), 7), ((1, 1, 1), 7)):
        for n in range(1, n_max + 1, 2):
            rep = exhaustive_coupling_oracle(x, n)
            ok &= rep.implication_holds and rep.shadow_law_uniform
            ok &= rep.invariant_violations == 0
    run = run_coupling((2, 1), 7, reps=100_000, seed=11)
    ok &= run.implication_violations == 0
    pnx = True
    for d in (1, 2):
        for n in (1, 3, 5, 7, 9):
            r = verify_pnxodd_exact(d, n, radius=n + 2)
            pnx &= r.passed
    ok &= pnx
    _verdict(5, ok, "exhaustive + 1e5 randomized + odd-site kernel bound")
    assert ok


def test_criterion_6_counterexample_ratio():
    rep = counterexample_ratio(horizon=10_000, reps=1_000, seed=0)
    ok = rep.all_visited_sites_even and 0.45 <= rep.mean_ratio <= 0.55
    _verdict(
        6, ok,
        f"mean ratio {rep.mean_ratio:.4f} +- {rep.stderr:.4f}, parity "
        f"{rep.all_visited_sites_even}",
    )
    assert rep.all_visited_sites_even
    assert 0.45 <= rep.mean_ratio <= 0.55


def test_criterion_7_oracle_equivalence():
    pmf = simple_random_walk(1)
    ok = True
    for seed in range(10):
        f = random_insertion_path(seed, 1, 12)
        for n in (0, 3, 7, 12):
            ok &= range_via_hits(pmf, f, n) == enumerate_range(pmf, f, n)
    f = random_insertion_path(3, 1, 12)
    exact = float(range_via_hits(pmf, f, 12))
    est = mc_range(pmf, f, 12, reps=100_000, seed=42)
    mc_ok = abs(est.mean - exact) <= 3 * est.stderr
    ok &= mc_ok
    _verdict(
        7, ok,
        f"exact match on 10 paths x 4 horizons; mc |{est.mean:.4f}-{exact:.4f}|"
        f" <= 3x{est.stderr:.4f}",
    )
    assert ok


def _one_jump_particle():
    return ParticleTrajectory(((0.0, (0,)), (2.5, (1,))))


def test_criterion_8_continuous_time_pascal():
    pmf = simple_random_walk(1)
    particles = {
        "static": ParticleTrajectory.static(1),
        "one-jump": _one_jump_particle(),
        "zigzag": zigzag_particle(1, horizon=5.0, period=1.0),
    }
    laws = {
        "exponential": HoldingLaw.exponential(1.0),
        "pareto": HoldingLaw.pareto(0.8, scale=1.0),
    }
    ok = True
    details = []
    for law_name, law in laws.items():
        for part_name, particle in particles.items():
            cfg = TrapSimConfig(
                dim=1, window=60, pmf=pmf, holding=law, horizon=5.0,
                particle=particle, reps=10_000, seed=2024,
            )
            rep = simulate_trap_field(cfg)
            margin = rep.moving.estimate - rep.origin.estimate
            bound = 3 * math.hypot(rep.moving.stderr, rep.origin.stderr)
            good = margin <= bound
            ok &= good
            details.append(f"{law_name}/{part_name}: {margin:+.4f}<= {bound:.4f}")

    # cross-estimator agreement, exponential / static
    cfg = TrapSimConfig(
        dim=1, window=60, pmf=pmf, holding=laws["exponential"], horizon=5.0,
        particle=particles["static"], reps=10_000, seed=2024,
    )
    direct = simulate_trap_field(cfg)
    ident = survival_via_identity(cfg, reps_per_site=3_000)
    gap = abs(direct.moving.estimate - ident.moving.estimate)
    sigma = math.hypot(direct.moving.stderr, ident.moving.stderr)
    ok &= gap <= 3 * sigma

    # horizon zero pins the Poisson void probability
    cfg0 = TrapSimConfig(
        dim=1, window=60, pmf=pmf, holding=laws["exponential"], horizon=0.0,
        particle=particles["static"], reps=10_000, seed=7,
    )
    rep0 = simulate_trap_field(cfg0)
    void_ok = abs(rep0.origin.estimate - math.exp(-1)) <= 3 * rep0.origin.stderr
    ok &= void_ok
    _verdict(
        8, ok,
        "; ".join(details) + f"; estimators gap {gap:.4f} <= 3x{sigma:.4f}; "
        f"t=0 {rep0.origin.estimate:.4f} vs e^-1 {math.exp(-1):.4f}",
    )
    assert ok


def test_criterion_9_kernel_crosschecks():
    ok = True
    worst = 0.0
    for d, grid in ((1, 32), (2, 32), (3, 32)):
        pmf = simple_random_walk(d)
        for n in (0, 1, 4, 9, 12):
            err = fourier_crosscheck(pmf, n, grid)
            worst = max(worst, err)
    ok &= worst <= 1e-10

    pmf = simple_random_walk(1)
    for m in range(0, 7):
        for n in range(0, 13 - m):
            km, kn, kmn = (
                n_step_kernel(pmf, m),
                n_step_kernel(pmf, n),
                n_step_kernel(pmf, m + n),
            )
            conv = convolve_int(km.num, kn.num)
            exact = all(
                Fraction(v, km.den * kn.den) == Fraction(kmn.num.get(x, 0), kmn.den)
                for x, v in conv.items()
            ) and set(conv) == set(kmn.num)
            ok &= exact

    for d in (1, 2):
        for n in (1, 3, 5, 7, 9, 11):
            ok &= n_step_kernel(simple_random_walk(d), n).prob((0,) * d) == 0
    _verdict(9, ok, f"max torus-transform error {worst:.2e}; semigroup exact")
    assert ok
