"""Exact dynamic programming for the killed-particle field.

One particle starts at every lattice site and is killed on contact with the
moving trap pair.  The field tracked here is the caught mass
v_n(x) = P_x(first trap contact by time n, ending at x is irrelevant);
concretely v_n(x) = 1 - (expected number alive at x at time n).  It has
finite support, grows by at most one pmf support radius per step, and is
stored as integer numerators over den = D^n (D = pmf common denominator),
so every inequality checked below is exact.  A float mode with tolerance
1e-12 is available for windows where exact arithmetic is impractical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InvariantViolation, ResourceBudgetError, ValidationError
from .kernels import DEFAULT_CELL_BUDGET, convolve_int, kernel_table
from .perturb import InsertionPath, TrapTrajectory, contract, contracted_horizon
from .pmf import IncrementPmf, Site, validate_class

FLOAT_TOL = 1e-12

TWO_TRAP = "two-trap"
SINGLE_TRAP = "single-trap"


@dataclass(frozen=True)
class SurvivalField:
    """Caught-mass field at a fixed time: x -> v_n(x), finite support."""

    n: int
    num: Mapping[Site, int]
    den: int  # 1.0 in float mode, D^n in exact mode

    def value(self, x) -> Fraction:
        return Fraction(self.num.get(tuple(x), 0), self.den)

    def total(self):
        return _ratio(sum(self.num.values()), self.den)


@dataclass(frozen=True)
class HitSeries:
    """Cumulative killed mass W(n) = sum_x v_n(x), n = 0..N; W(-1) = 0."""

    values: tuple
    model: str

    def increments(self):
        prev = 0
        out = []
        for v in self.values:
            out.append(v - prev)
            prev = v
        return tuple(out)


@dataclass(frozen=True)
class EvolveResult:
    fields: tuple[SurvivalField, ...]
    killed: tuple[Mapping[Site, Fraction], ...]  # per time: trap site -> first-kill mass
    model: str
    trajectory: TrapTrajectory


def _ratio(num, den):
    if isinstance(den, int):
        return Fraction(num, den)
    return num / den


def _traps_at(traj: TrapTrajectory, i: int, model: str) -> tuple[Site, ...]:
    if model == SINGLE_TRAP:
        return (traj.site(i),)
    a, b = traj.site(i), traj.site(i + 1)
    return (a,) if a == b else (a, b)


def _evolve(
    pmf: IncrementPmf,
    traj: TrapTrajectory,
    horizon: int,
    model: str,
    mode: str,
    cell_budget: int,
) -> EvolveResult:
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    if traj.dim != pmf.dim:
        raise ValidationError(
            f"trajectory dimension {traj.dim} != pmf dimension {pmf.dim}"
        )
    exact = mode == "exact"
    if exact:
        weights = pmf.integer_weights()
        step_den = pmf.denominator
        den = 1
    else:
        weights = pmf.float_weights()
        step_den = 1.0
        den = 1.0

    traps0 = _traps_at(traj, 0, model)
    values = {s: den for s in traps0}
    killed = [{s: Fraction(1) if exact else 1.0 for s in traps0}]
    fields = [SurvivalField(0, dict(values), den)]

    for n in range(horizon):
        nxt = convolve_int(values, weights)
        den_next = den * step_den
        traps = _traps_at(traj, n + 1, model)
        killed.append({s: _ratio(den_next - nxt.get(s, 0), den_next) for s in traps})
        for s in traps:
            nxt[s] = den_next
        if len(nxt) > cell_budget:
            raise ResourceBudgetError(
                f"field support {len(nxt)} cells at step {n + 1} "
                f"exceeds budget {cell_budget}"
            )
        lo = 0 if exact else -FLOAT_TOL
        hi = den_next if exact else den_next + FLOAT_TOL
        for x, v in nxt.items():
            if v < lo or v > hi:
                raise InvariantViolation(
                    f"caught mass out of [0, 1] at step {n + 1}, site {x}: "
                    f"{_ratio(v, den_next)}"
                )
        values, den = nxt, den_next
        fields.append(SurvivalField(n + 1, dict(values), den))

    return EvolveResult(tuple(fields), tuple(killed), model, traj)


def evolve_survival(
    pmf: IncrementPmf,
    traj: TrapTrajectory,
    horizon: int,
    mode: str = "exact",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> EvolveResult:
    """Run the two-trap DP up to the horizon, recording first-kill masses."""
    return _evolve(pmf, traj, horizon, TWO_TRAP, mode, cell_budget)


def moreau_engine(
    pmf: IncrementPmf,
    traj: TrapTrajectory,
    horizon: int,
    mode: str = "exact",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> HitSeries:
    """Single-trap (additive-model) DP; returns its cumulative hit series."""
    result = _evolve(pmf, traj, horizon, SINGLE_TRAP, mode, cell_budget)
    return hit_mass(result)


def hit_mass(result: EvolveResult) -> HitSeries:
    """W(n) = sum_x v_n(x), exact."""
    return HitSeries(
        tuple(f.total() for f in result.fields), result.model
    )


@dataclass(frozen=True)
class PascalReport:
    margins: tuple  # W_phi(n) - W_0(n) for each n
    passed: bool
    unproved_regime: bool
    series_perturbed: HitSeries
    series_origin: HitSeries


def verify_pascal(
    pmf: IncrementPmf,
    traj: TrapTrajectory,
    horizon: int,
    mode: str = "exact",
    cell_budget: int = DEFAULT_CELL_BUDGET,
    allow_unproved: bool = False,
) -> PascalReport:
    """Margins of the two-trap killed-mass comparison against the origin trap."""
    walk_class = validate_class(pmf)
    unproved = not walk_class.proved
    if unproved and not allow_unproved:
        raise ValidationError(
            "pmf is outside the proved classes; pass allow_unproved=True to "
            "run in the unproved regime"
        )
    w_phi = hit_mass(evolve_survival(pmf, traj, horizon, mode, cell_budget))
    origin = TrapTrajectory.zero(pmf.dim)
    w_0 = hit_mass(evolve_survival(pmf, origin, horizon, mode, cell_budget))
    margins = tuple(a - b for a, b in zip(w_phi.values, w_0.values))
    floor = 0 if mode == "exact" else -FLOAT_TOL
    passed = all(m >= floor for m in margins)
    return PascalReport(margins, passed, unproved, w_phi, w_0)


@dataclass(frozen=True)
class DominationReport:
    passed: bool
    min_slack: Fraction
    witness: tuple[int, int]  # (k, x0) attaining the minimal slack
    k_max: int
    x_max: int


def check_sym_domination(
    field_perturbed: SurvivalField, field_origin: SurvivalField
) -> DominationReport:
    """Symmetric-domination check between two caught-mass fields, d = 1.

    Verifies sum_{|x| >= k} v0(x) <= sum_{|x| >= k} vphi(x0 + x) for all
    0 <= k <= K and |x0| <= 2K, K one past both support radii.  Beyond that
    window each shifted tail equals the full mass of vphi, which dominates
    every tail of v0 once the k = 0 check passes, so the finite sweep is
    sufficient.
    """
    for f in (field_perturbed, field_origin):
        for x in f.num:
            if len(x) != 1:
                raise ValidationError("symmetric domination is only defined for d = 1")
    if field_perturbed.n != field_origin.n:
        raise ValidationError(
            f"fields at different times: {field_perturbed.n} vs {field_origin.n}"
        )
    # scale both to a common denominator so comparisons stay in integers
    dp, do = field_perturbed.den, field_origin.den
    if isinstance(dp, int) and isinstance(do, int):
        import math

        common = dp * do // math.gcd(dp, do)
    else:
        common = 1.0
    sp = common // dp if isinstance(common, int) else 1.0
    so = common // do if isinstance(common, int) else 1.0
    vp = {x[0]: v * sp for x, v in field_perturbed.num.items()}
    vo = {x[0]: v * so for x, v in field_origin.num.items()}

    radius = max([abs(x) for x in vp] + [abs(x) for x in vo] + [0])
    k_max = radius + 1
    x_max = 2 * k_max
    lo, hi = -(x_max + k_max + 1), x_max + k_max + 1

    total_p = sum(vp.values())
    prefix = {lo - 1: 0}
    acc = 0
    for x in range(lo, hi + 1):
        acc += vp.get(x, 0)
        prefix[x] = acc

    tail0 = []
    for k in range(k_max + 1):
        tail0.append(sum(v for x, v in vo.items() if abs(x) >= k))

    min_slack_num = None
    witness = (0, 0)
    for x0 in range(-x_max, x_max + 1):
        for k in range(k_max + 1):
            interior = prefix[x0 + k - 1] - prefix[x0 - k] if k > 0 else 0
            slack = (total_p - interior) - tail0[k]
            if min_slack_num is None or slack < min_slack_num:
                min_slack_num, witness = slack, (k, x0)
    min_slack = _ratio(min_slack_num, common)
    floor = 0 if isinstance(common, int) else -FLOAT_TOL
    return DominationReport(min_slack_num >= floor, min_slack, witness, k_max, x_max)


@dataclass(frozen=True)
class DecompositionReport:
    residuals: tuple  # identity residual per n (target 2 for n >= 1, 1 for n = 0)
    passed: bool


def verify_decomposition(
    pmf: IncrementPmf,
    traj: TrapTrajectory,
    horizon: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> DecompositionReport:
    """First-passage decomposition identity against the recorded kill masses.

    For n >= 1 the pinned-endpoint mass through the trap pair sums to exactly
    2 (one unit per pinning constraint); at n = 0 only the time-n constraint
    exists and the target is 1.
    """
    result = evolve_survival(pmf, traj, horizon, "exact", cell_budget)
    table = kernel_table(pmf, horizon, cell_budget)
    residuals = []
    for n in range(horizon + 1):
        target_site = traj.site(n)
        acc = Fraction(0)
        for i in range(n + 1):
            for s, h in result.killed[i].items():
                diff = tuple(a - b for a, b in zip(target_site, s))
                acc += h * (table[n - 1 - i].prob(diff) + table[n - i].prob(diff))
        target = 2 if n >= 1 else 1
        residuals.append(acc - target)
    return DecompositionReport(tuple(residuals), all(r == 0 for r in residuals))


@dataclass(frozen=True)
class RecursionReport:
    slacks: tuple
    passed: bool
    unproved_regime: bool


def verify_w_recursion(
    pmf: IncrementPmf,
    traj: TrapTrajectory,
    horizon: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    allow_unproved: bool = False,
) -> RecursionReport:
    """Slack of the telescoped margin recursion derived from the decomposition.

    slack(n) = dW(n) - sum_{i<n} (c(n-i-2) - c(n-i-1)) dW(i) with
    dW(i) the Pascal margin and c(j) the paired kernel at the origin.
    """
    from .kernels import check_mono_conditions

    cond = check_mono_conditions(pmf, horizon, mode="exact", cell_budget=cell_budget)
    if not cond.holds and not allow_unproved:
        raise ValidationError(
            "pmf fails the paired-kernel conditions; pass allow_unproved=True "
            "to run in the unproved regime"
        )
    report = verify_pascal(
        pmf, traj, horizon, "exact", cell_budget, allow_unproved=True
    )
    margins = report.margins
    table = kernel_table(pmf, horizon + 1, cell_budget)
    zero = tuple([0] * pmf.dim)

    def center(j: int) -> Fraction:
        return table[j].prob(zero) + table[j + 1].prob(zero)

    slacks = []
    for n in range(horizon + 1):
        bound = sum(
            (center(n - i - 2) - center(n - i - 1)) * margins[i] for i in range(n)
        )
        slacks.append(margins[n] - bound)
    return RecursionReport(tuple(slacks), all(s >= 0 for s in slacks), not cond.holds)


def range_via_hits(
    pmf: IncrementPmf,
    path: InsertionPath,
    horizon: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> Fraction:
    """Exact expected number of distinct sites visited by the perturbed walk.

    Computed as the killed mass of the contracted two-trap problem: the
    perturbed walk's range equals the number of starting sites from which a
    walk meets the negated insertion path by the matching contracted time.
    """
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    if path.dim != pmf.dim:
        raise ValidationError(f"path dimension {path.dim} != pmf dimension {pmf.dim}")
    m = contracted_horizon(horizon)
    # only values up to the horizon matter; an even horizon is pushed to the
    # odd case by repeating the final value (the walk holds there anyway)
    values = path.extended(horizon).values[: horizon + 1]
    if horizon % 2 == 0:
        values = values + (values[-1],)
    traj = contract(InsertionPath(values))
    series = hit_mass(evolve_survival(pmf, traj, m, "exact", cell_budget))
    return series.values[m]
