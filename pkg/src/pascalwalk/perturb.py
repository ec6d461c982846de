"""Insertion paths, their contraction to trap trajectories, and generators.

An insertion path holds the deterministic jumps spliced into the walk at odd
times (the walk itself jumps at even times, so the path value must repeat
across each [odd, even] slot).  Contracting those slots yields the trap
trajectory driving the two-trap discrete-time model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import HorizonError, ValidationError
from .pmf import IncrementPmf, Site, _as_site

Vector = Site


def _as_path(values, dim: int | None = None) -> tuple[Vector, ...]:
    out = tuple(_as_site(v, dim) for v in values)
    if not out:
        raise ValidationError("a path needs at least one value")
    dims = {len(v) for v in out}
    if len(dims) != 1:
        raise ValidationError(f"mixed dimensions in path: {sorted(dims)}")
    return out


@dataclass(frozen=True)
class InsertionPath:
    """Deterministic perturbation f_0, ..., f_N with f_{2k-1} = f_{2k}."""

    values: tuple[Vector, ...]

    def __post_init__(self):
        values = _as_path(self.values)
        for k in range(1, (len(values) + 1) // 2):
            if 2 * k < len(values) and values[2 * k - 1] != values[2 * k]:
                raise ValidationError(
                    f"insertion path must repeat across odd/even slots: "
                    f"value {values[2 * k - 1]} at index {2 * k - 1} != "
                    f"{values[2 * k]} at index {2 * k}"
                )
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return len(self.values[0])

    def __len__(self) -> int:
        return len(self.values)

    def extended(self, horizon: int) -> "InsertionPath":
        """Cover times 0..horizon by holding the last value (no new insertions)."""
        if horizon < len(self.values) - 1:
            return self
        tail = (self.values[-1],) * (horizon + 1 - len(self.values))
        return InsertionPath(self.values + tail)

    @staticmethod
    def zero(dim: int, horizon: int) -> "InsertionPath":
        return InsertionPath(((0,) * dim,) * (horizon + 1))


@dataclass(frozen=True)
class TrapTrajectory:
    """Arbitrary deterministic lattice path followed by the trap pair."""

    values: tuple[Vector, ...]
    extent: int = field(init=False)

    def __post_init__(self):
        values = _as_path(self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "extent", max(max(abs(c) for c in v) for v in values)
        )

    @property
    def dim(self) -> int:
        return len(self.values[0])

    def __len__(self) -> int:
        return len(self.values)

    def site(self, i: int) -> Vector:
        """Position at time i; held at the last stored value past the end."""
        return self.values[min(i, len(self.values) - 1)]

    @staticmethod
    def zero(dim: int, horizon: int = 0) -> "TrapTrajectory":
        return TrapTrajectory(((0,) * dim,) * (horizon + 1))


def contract(path: InsertionPath) -> TrapTrajectory:
    """Collapse each [2k, 2k+1] time slot; trap position i is -f_{2i}.

    Odd-length inputs contract directly; even-length inputs are first
    extended by one repeated value so the final slot is complete.
    """
    values = path.values
    if len(values) % 2 == 0:
        values = values + (values[-1],)
    contracted = tuple(
        tuple(-c for c in values[2 * i]) for i in range((len(values) + 1) // 2)
    )
    return TrapTrajectory(contracted)


def contracted_horizon(n: int) -> int:
    """Map an original horizon to the two-trap model's horizon.

    Odd n maps to (n - 1) // 2; even n is first pushed to n + 1 (holding the
    path), which leaves the range unchanged.
    """
    if n < 0:
        raise ValidationError(f"horizon must be >= 0, got {n}")
    return (n - 1) // 2 if n % 2 == 1 else n // 2


def trap_field(traj: TrapTrajectory, n: int) -> list[frozenset[Vector]]:
    """Active trap sites {phi_i, phi_{i+1}} for each time 0..n."""
    if n + 1 > len(traj) - 1:
        raise HorizonError(
            f"trajectory of length {len(traj)} only supports horizons <= {len(traj) - 2}"
        )
    return [frozenset((traj.values[i], traj.values[i + 1])) for i in range(n + 1)]


def alternating_phi(horizon: int) -> TrapTrajectory:
    """One-dimensional trajectory alternating between sites 0 and 1."""
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    return TrapTrajectory(tuple((i % 2,) for i in range(horizon + 1)))


def random_phi(seed: int, horizon: int, step_law: IncrementPmf) -> TrapTrajectory:
    """Seeded fuzzing trajectory: start at 0, i.i.d. increments from step_law."""
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    rng = np.random.default_rng(seed)
    support = step_law.support
    probs = np.array([float(w) for w in step_law.weights.values()])
    probs /= probs.sum()
    idx = rng.choice(len(support), size=horizon, p=probs)
    pos = [0] * step_law.dim
    values = [tuple(pos)]
    for i in idx:
        pos = [a + b for a, b in zip(pos, support[i])]
        values.append(tuple(pos))
    return TrapTrajectory(tuple(values))


def load_trajectory(path: str) -> TrapTrajectory:
    """Read a trajectory file: one time step per line, d integers per line."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(tuple(int(c) for c in line.split()))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
    if not values:
        raise ValidationError(f"{path}: no trajectory values")
    return TrapTrajectory(tuple(values))


def load_insertion_path(path: str) -> InsertionPath:
    traj = load_trajectory(path)
    return InsertionPath(traj.values)


def parse_phi_spec(spec: str, dim: int, step_law: IncrementPmf | None = None) -> TrapTrajectory:
    """Resolve "alternating:N", "random:SEED:N", or "file:PATH"."""
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name == "alternating":
        if dim != 1:
            raise ValidationError("alternating trajectory is one-dimensional")
        return alternating_phi(_parse_int(rest, spec))
    if name == "random":
        seed_s, _, n_s = rest.partition(":")
        if step_law is None:
            from .pmf import simple_random_walk

            step_law = simple_random_walk(dim)
        return random_phi(_parse_int(seed_s, spec), _parse_int(n_s, spec), step_law)
    if name == "file":
        return load_trajectory(rest)
    raise ValidationError(f"unknown trajectory spec {spec!r}")


def _parse_int(s: str, spec: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ValidationError(f"bad integer in spec {spec!r}") from None
