"""Monte Carlo and brute-force estimators for the perturbed-walk range.

The simulated walk jumps at even times and holds at odd times; the insertion
path is added on top.  Replica randomness is split deterministically from the
master seed by replica index, so estimates are independent of any batching.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceBudgetError, ValidationError
from .perturb import InsertionPath, alternating_phi
from .pmf import IncrementPmf, simple_random_walk

ENUMERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class RangeEstimate:
    mean: float
    stderr: float
    reps: int


def _perturbed_path_sites(walk_positions, path_values, horizon):
    """Distinct sites of (held walk + insertion path) over times 0..horizon."""
    seen = set()
    for t in range(horizon + 1):
        w = walk_positions[t // 2]
        f = path_values[t]
        seen.add(tuple(a + b for a, b in zip(w, f)))
    return seen


def mc_range(
    pmf: IncrementPmf,
    path: InsertionPath,
    horizon: int,
    reps: int,
    seed: int,
) -> RangeEstimate:
    """Sample mean and standard error of the perturbed range cardinality."""
    if reps < 1:
        raise ValidationError(f"reps must be >= 1, got {reps}")
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    path = path.extended(horizon)
    n_steps = horizon // 2
    support = np.array(pmf.support, dtype=np.int64)
    probs = np.array([float(w) for w in pmf.weights.values()])
    probs /= probs.sum()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    idx = rng.choice(len(support), size=(reps, n_steps), p=probs)
    steps = support[idx]  # (reps, n_steps, d)
    positions = np.zeros((reps, n_steps + 1, pmf.dim), dtype=np.int64)
    if n_steps:
        positions[:, 1:, :] = np.cumsum(steps, axis=1)
    counts = np.empty(reps)
    values = path.values[: horizon + 1]
    for r in range(reps):
        counts[r] = len(_perturbed_path_sites(positions[r], values, horizon))
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
    return RangeEstimate(mean, stderr, reps)


def enumerate_range(pmf: IncrementPmf, path: InsertionPath, horizon: int) -> Fraction:
    """Exact expected perturbed range by full enumeration of walk paths."""
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    path = path.extended(horizon)
    n_steps = horizon // 2
    total_paths = len(pmf.support) ** n_steps
    if total_paths > ENUMERATION_BUDGET:
        raise ResourceBudgetError(
            f"{total_paths} walk paths exceed the enumeration budget"
        )
    weights = pmf.integer_weights()
    den = pmf.denominator ** n_steps
    values = path.values[: horizon + 1]
    origin = tuple([0] * pmf.dim)
    acc = 0
    for combo in itertools.product(weights.items(), repeat=n_steps):
        pos = [origin]
        w = 1
        for step, step_w in combo:
            pos.append(tuple(a + b for a, b in zip(pos[-1], step)))
            w *= step_w
        acc += w * len(_perturbed_path_sites(pos, values, horizon))
    return Fraction(acc, den)


@dataclass(frozen=True)
class CounterexampleReport:
    mean_ratio: float
    stderr: float
    reps: int
    horizon: int
    all_visited_sites_even: bool


def counterexample_ratio(horizon: int, reps: int, seed: int) -> CounterexampleReport:
    """Additive perturbation of the 1-d simple walk by the alternating 0/1 path.

    The shifted walk can only occupy even sites, so its range covers about
    half the sites of the unperturbed walk; the report carries the mean
    ratio of the two range cardinalities and a hard parity assertion.
    """
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    if reps < 1:
        raise ValidationError(f"reps must be >= 1, got {reps}")
    phi = np.array([i % 2 for i in range(horizon + 1)], dtype=np.int64)
    ratios = np.empty(reps)
    all_even = True
    for r in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        steps = rng.integers(0, 2, size=horizon) * 2 - 1
        walk = np.zeros(horizon + 1, dtype=np.int64)
        np.cumsum(steps, out=walk[1:])
        shifted = walk - phi
        if (shifted % 2 != 0).any():
            all_even = False
        base_range = len(np.unique(walk))
        shifted_range = len(np.unique(shifted))
        ratios[r] = shifted_range / base_range
    mean = float(ratios.mean())
    stderr = float(ratios.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
    return CounterexampleReport(mean, stderr, reps, horizon, all_even)
