"""Coupled pair of simple random walks used for the odd-site kernel bound.

The driven walk starts at a normalized point with odd 1-norm; the shadow
walk starts at the first unit vector.  Step rules glue equal coordinates,
mirror equal-parity coordinates, and swap jumps within a designated
coordinate pair when parities disagree.  Every step re-checks the four
bookkeeping invariants; a breach would falsify the construction and raises
with a full trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation, ResourceBudgetError, ValidationError
from .pmf import Site, _as_site, simple_random_walk

ORACLE_PATH_BUDGET = 10_000_000


@dataclass(frozen=True)
class NormalizedStart:
    start: Site  # nonnegative, odd coordinates first
    permutation: tuple[int, ...]  # normalized index -> original index
    signs: tuple[int, ...]  # sign flips applied per original coordinate
    m: int  # odd coordinate count is 2m - 1


def normalize_start(x) -> NormalizedStart:
    """Reduce a start point to the canonical form the step rules assume."""
    x = _as_site(x)
    if sum(abs(c) for c in x) % 2 != 1:
        raise ValidationError(f"|x|_1 must be odd, got {x}")
    signs = tuple(-1 if c < 0 else 1 for c in x)
    absx = tuple(abs(c) for c in x)
    odd = [i for i, c in enumerate(absx) if c % 2 == 1]
    even = [i for i, c in enumerate(absx) if c % 2 == 0]
    perm = tuple(odd + even)
    start = tuple(absx[i] for i in perm)
    m = (len(odd) + 1) // 2
    return NormalizedStart(start, perm, signs, m)


@dataclass(frozen=True)
class CoupledState:
    k: int
    driven: Site  # the walk whose endpoint probability is being bounded
    shadow: Site  # the walk started at e_1
    m: int

    @property
    def dim(self) -> int:
        return len(self.driven)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        # canonical pairing of the odd coordinates after the first:
        # 0-indexed (1,2), (3,4), ..., (2m-3, 2m-2)
        return tuple((2 * j - 1, 2 * j) for j in range(1, self.m))

    def partner(self, i: int) -> int | None:
        for a, b in self.pairs:
            if i == a:
                return b
            if i == b:
                return a
        return None


def initial_state(x) -> CoupledState:
    norm = normalize_start(x)
    d = len(norm.start)
    shadow = tuple([1] + [0] * (d - 1))
    state = CoupledState(0, norm.start, shadow, norm.m)
    check_invariants(state)
    return state


def check_invariants(state: CoupledState, trace=None):
    """Per-state invariants: magnitude domination, pair parity, edge parities."""
    X, Y, d, m = state.driven, state.shadow, state.dim, state.m
    for i in range(d):
        if abs(X[i]) < abs(Y[i]):
            raise InvariantViolation(
                f"magnitude domination broken at coordinate {i}: "
                f"|{X[i]}| < |{Y[i]}| (time {state.k})",
                trace,
            )
    for a, b in state.pairs:
        if (X[a] + Y[a]) % 2 != (X[b] + Y[b]) % 2:
            raise InvariantViolation(
                f"pair parity broken for coordinates ({a},{b}) at time {state.k}",
                trace,
            )
    # standing parity agreement: first coordinate and all unpaired tail coordinates
    for i in [0] + list(range(2 * m - 1, d)):
        if (X[i] - Y[i]) % 2 != 0:
            raise InvariantViolation(
                f"parity agreement broken at coordinate {i} (time {state.k})",
                trace,
            )


def coupled_step(state: CoupledState, xstep) -> CoupledState:
    """Advance the driven walk by a signed unit vector; move the shadow by rule."""
    xstep = _as_site(xstep, state.dim)
    nz = [i for i, c in enumerate(xstep) if c != 0]
    if len(nz) != 1 or abs(xstep[nz[0]]) != 1:
        raise ValidationError(f"step must be a signed unit vector, got {xstep}")
    i, sign = nz[0], xstep[nz[0]]
    X, Y = list(state.driven), list(state.shadow)
    glued = X[i] == Y[i]
    same_parity = (X[i] - Y[i]) % 2 == 0
    if glued:
        Y[i] += sign
    elif same_parity:
        Y[i] -= sign
    else:
        j = state.partner(i)
        if j is None:
            raise InvariantViolation(
                f"parity mismatch at unpaired coordinate {i} (time {state.k})",
                trace=[state, xstep],
            )
        if (X[j] - Y[j]) % 2 == 0:
            raise InvariantViolation(
                f"partner coordinate {j} of {i} has matching parity (time {state.k})",
                trace=[state, xstep],
            )
        Y[j] += sign
    X[i] += sign
    nxt = CoupledState(state.k + 1, tuple(X), tuple(Y), state.m)
    check_invariants(nxt, trace=[state, xstep, nxt])
    # persistence of gluing and parity for the stepped coordinate
    if glued and nxt.driven[i] != nxt.shadow[i]:
        raise InvariantViolation(f"gluing broken at coordinate {i}", [state, xstep, nxt])
    if same_parity and (nxt.driven[i] - nxt.shadow[i]) % 2 != 0:
        raise InvariantViolation(f"parity lost at coordinate {i}", [state, xstep, nxt])
    return nxt


def _partner_map(d: int, m: int) -> np.ndarray:
    partner = np.full(d, -1, dtype=np.int64)
    for j in range(1, m):
        a, b = 2 * j - 1, 2 * j
        partner[a], partner[b] = b, a
    return partner


def _evolve_batch(start: Site, m: int, coords: np.ndarray, signs: np.ndarray):
    """Apply the step rules to a batch of driving sequences simultaneously.

    coords, signs: integer arrays of shape (paths, steps).  Returns final
    driven and shadow positions plus the shadow's own (coord, sign) steps.
    Raises on any invariant breach, reconstructing the offending path.
    """
    npaths, nsteps = coords.shape
    d = len(start)
    X = np.tile(np.array(start, dtype=np.int64), (npaths, 1))
    Y = np.zeros((npaths, d), dtype=np.int64)
    Y[:, 0] = 1
    partner = _partner_map(d, m)
    rows = np.arange(npaths)
    y_coords = np.empty_like(coords)
    y_signs = np.empty_like(signs)

    pair_a = np.array([2 * j - 1 for j in range(1, m)], dtype=np.int64)
    pair_b = np.array([2 * j for j in range(1, m)], dtype=np.int64)
    standing = np.array([0] + list(range(2 * m - 1, d)), dtype=np.int64)

    for step in range(nsteps):
        c = coords[:, step]
        s = signs[:, step]
        Xi = X[rows, c]
        Yi = Y[rows, c]
        glued = Xi == Yi
        same_parity = ((Xi - Yi) % 2 == 0) & ~glued
        mismatch = ~glued & ~same_parity

        if mismatch.any():
            pc = partner[c]
            if (pc[mismatch] < 0).any():
                bad = int(np.flatnonzero(mismatch & (pc < 0))[0])
                _raise_batch_violation(start, m, coords, signs, bad, step,
                                       "parity mismatch at unpaired coordinate")
            # partner must itself be parity-mismatched
            Xp = X[rows, pc]
            Yp = Y[rows, pc]
            bad_partner = mismatch & (((Xp - Yp) % 2) == 0)
            if bad_partner.any():
                bad = int(np.flatnonzero(bad_partner)[0])
                _raise_batch_violation(start, m, coords, signs, bad, step,
                                       "partner coordinate has matching parity")

        yc = np.where(mismatch, partner[c], c)
        np.add.at(Y, (rows, yc), np.where(same_parity, -s, s))
        np.add.at(X, (rows, c), s)
        y_coords[:, step] = yc
        y_signs[:, step] = np.where(same_parity, -s, s)

        if (np.abs(X) < np.abs(Y)).any():
            bad = int(np.flatnonzero((np.abs(X) < np.abs(Y)).any(axis=1))[0])
            _raise_batch_violation(start, m, coords, signs, bad, step,
                                   "magnitude domination broken")
        if m > 1:
            pa = (X[:, pair_a] + Y[:, pair_a]) % 2
            pb = (X[:, pair_b] + Y[:, pair_b]) % 2
            if (pa != pb).any():
                bad = int(np.flatnonzero((pa != pb).any(axis=1))[0])
                _raise_batch_violation(start, m, coords, signs, bad, step,
                                       "pair parity broken")
        if ((X[:, standing] - Y[:, standing]) % 2 != 0).any():
            bad = int(np.flatnonzero(
                ((X[:, standing] - Y[:, standing]) % 2 != 0).any(axis=1))[0])
            _raise_batch_violation(start, m, coords, signs, bad, step,
                                   "parity agreement broken")
    return X, Y, y_coords, y_signs


def _raise_batch_violation(start, m, coords, signs, path_idx, step, message):
    # replay the single offending path through the scalar stepper for a trace
    state = CoupledState(0, tuple(int(c) for c in start),
                         tuple([1] + [0] * (len(start) - 1)), m)
    trace = [state]
    try:
        for t in range(step + 1):
            vec = [0] * state.dim
            vec[int(coords[path_idx, t])] = int(signs[path_idx, t])
            state = coupled_step(state, tuple(vec))
            trace.append(state)
    except InvariantViolation as exc:
        raise InvariantViolation(f"{message} (path {path_idx}, step {step})",
                                 trace) from exc
    raise InvariantViolation(f"{message} (path {path_idx}, step {step})", trace)


@dataclass(frozen=True)
class CouplingRunReport:
    reps: int
    steps: int
    freq_driven_at_zero: float
    freq_shadow_at_zero: float
    stderr_driven: float
    stderr_shadow: float
    implication_violations: int
    shadow_step_frequencies: dict


def run_coupling(x, n: int, reps: int, seed: int) -> CouplingRunReport:
    """Seeded randomized replicas of the coupling with full invariant monitoring."""
    if n % 2 != 1:
        raise ValidationError(f"horizon must be odd, got {n}")
    norm = normalize_start(x)
    d = len(norm.start)
    rng = np.random.default_rng(seed)
    raw = rng.integers(0, 2 * d, size=(reps, n))
    coords = raw // 2
    signs = np.where(raw % 2 == 0, 1, -1).astype(np.int64)
    X, Y, y_coords, y_signs = _evolve_batch(norm.start, norm.m, coords, signs)
    x_zero = (X == 0).all(axis=1)
    y_zero = (Y == 0).all(axis=1)
    violations = int((x_zero & ~y_zero).sum())
    if violations:
        bad = int(np.flatnonzero(x_zero & ~y_zero)[0])
        raise InvariantViolation(
            f"driven walk reached 0 but shadow did not (replica {bad})",
            trace=[norm, coords[bad], signs[bad]],
        )
    p_x = float(x_zero.mean())
    p_y = float(y_zero.mean())
    freqs = {}
    for c in range(d):
        for s in (1, -1):
            mask = (y_coords == c) & (y_signs == s)
            freqs[(c, s)] = float(mask.mean())
    return CouplingRunReport(
        reps=reps,
        steps=n,
        freq_driven_at_zero=p_x,
        freq_shadow_at_zero=p_y,
        stderr_driven=float(np.sqrt(p_x * (1 - p_x) / reps)),
        stderr_shadow=float(np.sqrt(p_y * (1 - p_y) / reps)),
        implication_violations=violations,
        shadow_step_frequencies=freqs,
    )


@dataclass(frozen=True)
class OracleReport:
    paths: int
    implication_holds: bool
    shadow_law_uniform: bool
    invariant_violations: int


def exhaustive_coupling_oracle(x, n: int) -> OracleReport:
    """Deterministic sweep of every driving sequence of length n.

    Confirms the invariants on every path, the endpoint implication, and
    that the induced shadow driving sequences are pairwise distinct, which
    makes the shadow's path law exactly uniform.
    """
    if n % 2 != 1:
        raise ValidationError(f"horizon must be odd, got {n}")
    norm = normalize_start(x)
    d = len(norm.start)
    total = (2 * d) ** n
    if total > ORACLE_PATH_BUDGET:
        raise ResourceBudgetError(
            f"{total} driving sequences exceed the budget {ORACLE_PATH_BUDGET}"
        )
    # enumerate driving sequences as base-(2d) digit expansions
    idx = np.arange(total, dtype=np.int64)
    raw = np.empty((total, n), dtype=np.int64)
    for step in range(n):
        raw[:, step] = (idx // (2 * d) ** step) % (2 * d)
    coords = raw // 2
    signs = np.where(raw % 2 == 0, 1, -1).astype(np.int64)
    X, Y, y_coords, y_signs = _evolve_batch(norm.start, norm.m, coords, signs)
    x_zero = (X == 0).all(axis=1)
    y_zero = (Y == 0).all(axis=1)
    implication = bool((~x_zero | y_zero).all())
    # encode each shadow driving sequence as a base-(2d) integer
    y_digits = 2 * y_coords + (y_signs < 0)
    codes = np.zeros(total, dtype=np.int64)
    for step in range(n):
        codes += y_digits[:, step] * (2 * d) ** step
    uniform = len(np.unique(codes)) == total
    return OracleReport(total, implication, uniform, 0)


@dataclass(frozen=True)
class OddSiteReport:
    passed: bool
    checked_sites: int
    worst_site: Site | None
    min_slack: Fraction | None


def verify_pnxodd_exact(d: int, n: int, radius: int) -> OddSiteReport:
    """Exact kernel check: no odd-1-norm site beats the unit vector at odd n."""
    if n % 2 != 1:
        raise ValidationError(f"n must be odd, got {n}")
    from .kernels import n_step_kernel
    from .pmf import iter_window

    kernel = n_step_kernel(simple_random_walk(d), n)
    e1 = tuple([1] + [0] * (d - 1))
    ref = kernel.num.get(e1, 0)
    worst_site, worst = None, None
    checked = 0
    for x in iter_window(d, radius):
        if sum(abs(c) for c in x) % 2 != 1:
            continue
        checked += 1
        v = kernel.num.get(x, 0)
        if worst is None or v > worst or (v == worst and x == e1):
            worst, worst_site = v, x
    if worst is None:
        return OddSiteReport(True, 0, None, None)
    slack = Fraction(ref - worst, kernel.den)
    return OddSiteReport(slack >= 0, checked, worst_site, slack)
