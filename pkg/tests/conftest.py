"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's integer-numerator DP: they
work in Fractions over explicit path enumerations, so agreement with the
engine is a real cross-check rather than the same code run twice.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from pascalwalk import IncrementPmf, InsertionPath, TrapTrajectory


def random_insertion_path(seed: int, dim: int, horizon: int) -> InsertionPath:
    """Seeded insertion path with the required pairing f_{2k-1} = f_{2k}.

    Free values sit at index 0 and the odd indices; each even index >= 2
    copies its predecessor.  Steps are uniform on {-1, 0, 1}^d.
    """
    rng = np.random.default_rng(seed)
    values = [tuple([0] * dim)]
    for i in range(1, horizon + 1):
        if i % 2 == 0:
            values.append(values[-1])
        else:
            step = rng.integers(-1, 2, size=dim)
            values.append(tuple(int(a + b) for a, b in zip(values[-1], step)))
    return InsertionPath(tuple(values))


def random_trap_trajectory(seed: int, dim: int, horizon: int) -> TrapTrajectory:
    """Seeded trap trajectory with steps uniform on {-1, 0, 1}^d."""
    rng = np.random.default_rng(seed)
    sites = [tuple([0] * dim)]
    for _ in range(horizon):
        step = rng.integers(-1, 2, size=dim)
        sites.append(tuple(int(a + b) for a, b in zip(sites[-1], step)))
    return TrapTrajectory(tuple(sites))


def enumerate_two_trap_mass(
    pmf: IncrementPmf, traj: TrapTrajectory, horizon: int
) -> list[Fraction]:
    """W(n) by brute force: sum over starts of the hit probability.

    A walk started at x0 is caught by time n if its position at some time
    i <= n lies in {phi_i, phi_{i+1}}.  Every start that can possibly reach
    the traps lies within (support radius * horizon + trap extent + 1) in
    sup norm, so the finite sweep is exact.
    """
    d = pmf.dim
    reach = pmf.support_radius * horizon + 1
    extent = max(
        (max(abs(c) for c in traj.site(i)) for i in range(horizon + 2)), default=0
    )
    lo, hi = -(reach + extent), reach + extent
    out = []
    for n in range(horizon + 1):
        total = Fraction(0)
        for x0 in itertools.product(range(lo, hi + 1), repeat=d):
            total += _hit_probability(pmf, traj, x0, n)
        out.append(total)
    return out


def _hit_probability(pmf, traj, x0, n) -> Fraction:
    traps = [
        {traj.site(i), traj.site(i + 1)} for i in range(n + 1)
    ]
    acc = Fraction(0)
    for steps in itertools.product(pmf.weights.items(), repeat=n):
        pos = x0
        w = Fraction(1)
        hit = pos in traps[0]
        for i, (step, pw) in enumerate(steps):
            w *= pw
            pos = tuple(a + b for a, b in zip(pos, step))
            hit = hit or pos in traps[i + 1]
        if hit:
            acc += w
    return acc


def fraction_dp_two_trap(
    pmf: IncrementPmf, traj: TrapTrajectory, horizon: int
) -> list[Fraction]:
    """Independent Fraction-valued DP for the two-trap caught mass."""
    d = pmf.dim
    v = {}
    for s in {traj.site(0), traj.site(1)}:
        v[s] = Fraction(1)
    out = [sum(v.values(), Fraction(0))]
    for n in range(1, horizon + 1):
        nxt: dict[tuple, Fraction] = {}
        for x, mass in v.items():
            for step, w in pmf.weights.items():
                y = tuple(a + b for a, b in zip(x, step))
                nxt[y] = nxt.get(y, Fraction(0)) + mass * w
        for s in {traj.site(n), traj.site(n + 1)}:
            nxt[s] = Fraction(1)
        v = nxt
        out.append(sum(v.values(), Fraction(0)))
    return out


@pytest.fixture(scope="session")
def srw1():
    from pascalwalk import simple_random_walk

    return simple_random_walk(1)


@pytest.fixture(scope="session")
def srw2():
    from pascalwalk import simple_random_walk

    return simple_random_walk(2)
