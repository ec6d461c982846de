"""Exact n-step transition kernels and the monotonicity-condition checkers.

Kernels are stored as integer numerators over den = D^n, where D is the
pmf's common denominator.  Iterated convolution keeps everything in machine
integers (arbitrary precision if needed), so every comparison below is exact
unless the float fallback is explicitly requested.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import AliasingError, DimensionError, ResourceBudgetError, ValidationError
from .pmf import IncrementPmf, Site, _as_site

DEFAULT_CELL_BUDGET = 5_000_000


@dataclass(frozen=True)
class StepKernel:
    """Distribution of the walk after n steps; n = -1 is the zero kernel."""

    n: int
    num: Mapping[Site, int]
    den: int

    def prob(self, x) -> Fraction:
        return Fraction(self.num.get(_as_site(x), 0), self.den)

    @property
    def support(self) -> tuple[Site, ...]:
        return tuple(self.num)

    def total(self) -> Fraction:
        return Fraction(sum(self.num.values()), self.den)


def convolve_int(values: dict[Site, int], weights: dict[Site, int]) -> dict[Site, int]:
    """Sparse convolution of integer-numerator tables."""
    out: dict[Site, int] = {}
    for y, v in values.items():
        for dx, w in weights.items():
            x = tuple(a + b for a, b in zip(y, dx))
            out[x] = out.get(x, 0) + v * w
    return out


def kernel_table(
    pmf: IncrementPmf, n_max: int, cell_budget: int = DEFAULT_CELL_BUDGET
) -> dict[int, StepKernel]:
    """Kernels for every -1 <= n <= n_max, computed in one convolution sweep."""
    if n_max < -1:
        raise ValidationError(f"n_max must be >= -1, got {n_max}")
    origin = tuple([0] * pmf.dim)
    table = {-1: StepKernel(-1, {}, 1)}
    if n_max >= 0:
        table[0] = StepKernel(0, {origin: 1}, 1)
    weights = pmf.integer_weights()
    big_d = pmf.denominator
    cur = {origin: 1}
    den = 1
    for n in range(1, n_max + 1):
        cur = convolve_int(cur, weights)
        den *= big_d
        if len(cur) > cell_budget:
            raise ResourceBudgetError(
                f"kernel support {len(cur)} cells at n={n} exceeds budget {cell_budget}"
            )
        table[n] = StepKernel(n, dict(cur), den)
    return table


def n_step_kernel(
    pmf: IncrementPmf, n: int, cell_budget: int = DEFAULT_CELL_BUDGET
) -> StepKernel:
    if n < -1:
        raise ValidationError(f"n must be >= -1, got {n}")
    return kernel_table(pmf, n, cell_budget)[n]


def paired_kernel(pmf: IncrementPmf, n: int, x) -> Fraction:
    """p_n(x) + p_{n+1}(x)."""
    table = kernel_table(pmf, n + 1)
    return table[n].prob(x) + table[n + 1].prob(x)


@dataclass(frozen=True)
class ConditionReport:
    """Result of sweeping a pair of kernel inequalities up to a horizon."""

    mode: str  # "exact" or "float"
    holds: bool
    min_slack: Fraction | float
    witness: tuple[str, int, Site | None]  # (condition label, n, argmin site)
    failures: tuple[tuple[str, int, Site | None], ...]


def check_mono_conditions(
    pmf: IncrementPmf,
    n_max: int,
    mode: str = "auto",
    cell_budget: int = DEFAULT_CELL_BUDGET,
    tol: float = 1e-12,
) -> ConditionReport:
    """Check the paired-kernel inequalities up to horizon n_max.

    decay:  p_{n,n+1}(0) >= p_{n+1,n+2}(0)   for -1 <= n <= n_max
    center: p_{n,n+1}(0) >= p_{n,n+1}(x)     for -1 <= n <= n_max, all x
    """
    if n_max < 0:
        raise ValidationError(f"horizon must be >= 0, got {n_max}")
    if _resolve_mode(mode, pmf, n_max) == "float":
        return _check_paired_float(pmf, n_max, tol)
    table = kernel_table(pmf, n_max + 2, cell_budget)
    zero = tuple([0] * pmf.dim)
    failures = []
    min_slack = None
    witness = None
    for n in range(-1, n_max + 1):
        kn, kn1, kn2 = table[n], table[n + 1], table[n + 2]
        # common denominator kn2.den for the decay comparison
        s1 = kn2.den // kn.den
        s2 = kn2.den // kn1.den
        lhs = kn.num.get(zero, 0) * s1 + kn1.num.get(zero, 0) * s2
        rhs = kn1.num.get(zero, 0) * s2 + kn2.num.get(zero, 0)
        slack = Fraction(lhs - rhs, kn2.den)
        if min_slack is None or slack < min_slack:
            min_slack, witness = slack, ("decay", n, None)
        if slack < 0:
            failures.append(("decay", n, None))
        # center comparison at common denominator kn1.den
        scale = kn1.den // kn.den
        center_num = kn.num.get(zero, 0) * scale + kn1.num.get(zero, 0)
        sites = set(kn.num) | set(kn1.num)
        sites.discard(zero)
        worst_num, worst_site = None, None
        for x in sites:
            v = kn.num.get(x, 0) * scale + kn1.num.get(x, 0)
            if worst_num is None or v > worst_num:
                worst_num, worst_site = v, x
        if worst_num is not None:
            slack = Fraction(center_num - worst_num, kn1.den)
            if slack < min_slack:
                min_slack, witness = slack, ("center", n, worst_site)
            if slack < 0:
                failures.append(("center", n, worst_site))
    return ConditionReport("exact", not failures, min_slack, witness, tuple(failures))


def check_moreau_conditions(
    pmf: IncrementPmf,
    n_max: int,
    mode: str = "auto",
    cell_budget: int = DEFAULT_CELL_BUDGET,
    tol: float = 1e-12,
) -> ConditionReport:
    """Check the single-kernel (additive-model) inequalities up to n_max.

    decay:  p_n(0) >= p_{n+1}(0)   for 0 <= n <= n_max
    center: p_n(0) >= p_n(x)       for 0 <= n <= n_max, all x
    """
    if n_max < 0:
        raise ValidationError(f"horizon must be >= 0, got {n_max}")
    if _resolve_mode(mode, pmf, n_max) == "float":
        return _check_single_float(pmf, n_max, tol)
    table = kernel_table(pmf, n_max + 1, cell_budget)
    zero = tuple([0] * pmf.dim)
    failures = []
    min_slack = None
    witness = None
    for n in range(0, n_max + 1):
        kn, kn1 = table[n], table[n + 1]
        scale = kn1.den // kn.den
        slack = Fraction(kn.num.get(zero, 0) * scale - kn1.num.get(zero, 0), kn1.den)
        if min_slack is None or slack < min_slack:
            min_slack, witness = slack, ("decay", n, None)
        if slack < 0:
            failures.append(("decay", n, None))
        center = kn.num.get(zero, 0)
        worst_num, worst_site = None, None
        for x, v in kn.num.items():
            if x == zero:
                continue
            if worst_num is None or v > worst_num:
                worst_num, worst_site = v, x
        if worst_num is not None:
            slack = Fraction(center - worst_num, kn.den)
            if slack < min_slack:
                min_slack, witness = slack, ("center", n, worst_site)
            if slack < 0:
                failures.append(("center", n, worst_site))
    return ConditionReport("exact", not failures, min_slack, witness, tuple(failures))


def _resolve_mode(mode: str, pmf: IncrementPmf, n_max: int) -> str:
    if mode in ("exact", "float"):
        return mode
    if mode != "auto":
        raise ValidationError(f"unknown mode {mode!r}")
    # exact rationals by default; dense floats once the window gets large
    window_cells = (2 * (n_max + 2) * pmf.support_radius + 1) ** pmf.dim
    return "exact" if pmf.dim <= 2 or window_cells <= 100_000 else "float"


def dense_kernels_float(pmf: IncrementPmf, n_max: int) -> list[np.ndarray]:
    """p_0 .. p_{n_max} as dense float arrays over [-R, R]^d, R = n_max * radius.

    Arrays are indexed by x + R per axis; no wrap-around (padded shifts).
    """
    radius = max(1, n_max * pmf.support_radius)
    shape = (2 * radius + 1,) * pmf.dim
    cur = np.zeros(shape)
    cur[(radius,) * pmf.dim] = 1.0
    out = [cur]
    weights = pmf.float_weights()
    for _ in range(n_max):
        nxt = np.zeros(shape)
        for dx, w in weights.items():
            src = []
            dst = []
            for axis, step in enumerate(dx):
                n_ax = shape[axis]
                if step >= 0:
                    dst.append(slice(step, n_ax))
                    src.append(slice(0, n_ax - step))
                else:
                    dst.append(slice(0, n_ax + step))
                    src.append(slice(-step, n_ax))
            nxt[tuple(dst)] += w * cur[tuple(src)]
        out.append(nxt)
        cur = nxt
    return out


def _check_paired_float(pmf: IncrementPmf, n_max: int, tol: float) -> ConditionReport:
    kernels = dense_kernels_float(pmf, n_max + 2)
    radius = (kernels[0].shape[0] - 1) // 2
    center_idx = (radius,) * pmf.dim
    zeros = np.zeros_like(kernels[0])
    seq = [zeros] + kernels  # index shift: seq[n + 1] = p_n
    failures = []
    min_slack, witness = None, None
    for n in range(-1, n_max + 1):
        paired = seq[n + 1] + seq[n + 2]
        paired_next = seq[n + 2] + seq[n + 3]
        c = paired[center_idx]
        slack = c - paired_next[center_idx]
        if min_slack is None or slack < min_slack:
            min_slack, witness = slack, ("decay", n, None)
        if slack < -tol:
            failures.append(("decay", n, None))
        flat = paired.copy()
        flat[center_idx] = -np.inf
        arg = np.unravel_index(np.argmax(flat), flat.shape)
        slack = c - flat[arg]
        site = tuple(int(a) - radius for a in arg)
        if slack < min_slack:
            min_slack, witness = slack, ("center", n, site)
        if slack < -tol:
            failures.append(("center", n, site))
    return ConditionReport("float", not failures, float(min_slack), witness, tuple(failures))


def _check_single_float(pmf: IncrementPmf, n_max: int, tol: float) -> ConditionReport:
    kernels = dense_kernels_float(pmf, n_max + 1)
    radius = (kernels[0].shape[0] - 1) // 2
    center_idx = (radius,) * pmf.dim
    failures = []
    min_slack, witness = None, None
    for n in range(0, n_max + 1):
        c = kernels[n][center_idx]
        slack = c - kernels[n + 1][center_idx]
        if min_slack is None or slack < min_slack:
            min_slack, witness = slack, ("decay", n, None)
        if slack < -tol:
            failures.append(("decay", n, None))
        flat = kernels[n].copy()
        flat[center_idx] = -np.inf
        arg = np.unravel_index(np.argmax(flat), flat.shape)
        slack = c - flat[arg]
        site = tuple(int(a) - radius for a in arg)
        if slack < min_slack:
            min_slack, witness = slack, ("center", n, site)
        if slack < -tol:
            failures.append(("center", n, site))
    return ConditionReport("float", not failures, float(min_slack), witness, tuple(failures))


@dataclass(frozen=True)
class TailSum:
    """Table of half-line tail sums of the increment law, d = 1 only.

    table[z] is the mass of jumps landing at distance >= k from -z, i.e.
    sum of p(y) over |y + z| >= k.
    """

    k: int
    table: Mapping[int, Fraction]
    monotone_on_claimed_range: bool


def tail_sum(pmf: IncrementPmf, k: int, z_range: tuple[int, int] | None = None) -> TailSum:
    if pmf.dim != 1:
        raise DimensionError("tail sums are only defined in dimension 1")
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    if z_range is None:
        z_range = (-(pmf.support_radius + k + 1), pmf.support_radius + k + 1)
    lo, hi = z_range
    table = {}
    for z in range(lo, hi + 1):
        table[z] = sum(
            (w for (y,), w in pmf.weights.items() if abs(y + z) >= k), Fraction(0)
        )
    # claimed monotone range: z >= 1 for k = 1, z >= 0 for k >= 2 (vacuous for k = 0)
    start = 1 if k == 1 else 0
    mono = True
    if k >= 1:
        zs = sorted(z for z in table if z >= start)
        mono = all(table[a] <= table[b] for a, b in zip(zs, zs[1:]))
    return TailSum(k, table, mono)


def fourier_crosscheck(
    pmf: IncrementPmf, n: int, grid_size: int, cell_budget: int = DEFAULT_CELL_BUDGET
) -> float:
    """Max abs discrepancy between the exact kernel and its torus FFT evaluation.

    The characteristic function is raised to the n-th power on a discrete
    torus of side grid_size; the grid must be large enough that the kernel's
    support does not wrap around.
    """
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    needed = 2 * n * pmf.support_radius + 1
    if grid_size <= needed:
        raise AliasingError(
            f"torus side {grid_size} too small: need > {needed} to avoid wrap-around"
        )
    shape = (grid_size,) * pmf.dim
    base = np.zeros(shape)
    for x, w in pmf.weights.items():
        base[tuple(c % grid_size for c in x)] += float(w)
    spectrum = np.fft.fftn(base) ** n
    torus = np.fft.ifftn(spectrum).real
    exact = n_step_kernel(pmf, n, cell_budget)
    err = 0.0
    seen = np.zeros(shape, dtype=bool)
    for x, num in exact.num.items():
        idx = tuple(c % grid_size for c in x)
        err = max(err, abs(torus[idx] - num / exact.den))
        seen[idx] = True
    # off-support torus mass must also vanish
    off = np.abs(np.where(seen, 0.0, torus)).max()
    return max(err, float(off))
