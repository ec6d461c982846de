"""Finite-support symmetric increment distributions on the integer lattice.

Weights are exact rationals.  A pmf is immutable after construction and all
derived quantities (support radius, common denominator) are precomputed, so
instances are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DimensionError, ValidationError

Site = tuple[int, ...]

CLASS_ONE = "ClassI"
SIMPLE_SYMMETRIC = "SimpleSymmetric"
LAZY_HALF = "LazyHalf"
UNCLASSIFIED = "Unclassified"

# Precedence when a pmf satisfies several classes at once.
_PRECEDENCE = (SIMPLE_SYMMETRIC, CLASS_ONE, LAZY_HALF)


def _as_site(x, dim: int | None = None) -> Site:
    if isinstance(x, int):
        x = (x,)
    x = tuple(int(c) for c in x)
    if dim is not None and len(x) != dim:
        raise DimensionError(f"site {x} has dimension {len(x)}, expected {dim}")
    return x


def _neg(x: Site) -> Site:
    return tuple(-c for c in x)


@dataclass(frozen=True)
class IncrementPmf:
    """Symmetric, finitely supported single-step jump law on Z^d."""

    dim: int
    weights: Mapping[Site, Fraction]
    support_radius: int = field(init=False)
    denominator: int = field(init=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.dim}")
        cleaned: dict[Site, Fraction] = {}
        for raw, w in self.weights.items():
            x = _as_site(raw, self.dim)
            w = Fraction(w)
            if w <= 0:
                raise ValidationError(f"weight at {x} must be strictly positive, got {w}")
            if x in cleaned:
                raise ValidationError(f"duplicate support point {x}")
            cleaned[x] = w
        if not cleaned:
            raise ValidationError("empty support")
        total = sum(cleaned.values())
        if total != 1:
            raise ValidationError(f"weights sum to {total}, expected exactly 1")
        for x, w in cleaned.items():
            if cleaned.get(_neg(x)) != w:
                raise ValidationError(
                    f"asymmetric weight at site {x}: "
                    f"p({x})={w} but p({_neg(x)})={cleaned.get(_neg(x), 0)}"
                )
        object.__setattr__(self, "weights", cleaned)
        radius = max(max(abs(c) for c in x) for x in cleaned)
        object.__setattr__(self, "support_radius", radius)
        den = 1
        for w in cleaned.values():
            den = den * w.denominator // math.gcd(den, w.denominator)
        object.__setattr__(self, "denominator", den)

    def prob(self, x) -> Fraction:
        return self.weights.get(_as_site(x, self.dim), Fraction(0))

    def integer_weights(self) -> dict[Site, int]:
        """Weights scaled to integers over the common denominator."""
        d = self.denominator
        return {x: int(w * d) for x, w in self.weights.items()}

    def float_weights(self) -> dict[Site, float]:
        return {x: float(w) for x, w in self.weights.items()}

    @property
    def support(self) -> tuple[Site, ...]:
        return tuple(self.weights)

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.weights.items()))))


@dataclass(frozen=True)
class WalkClass:
    """Classification of an increment law for the proved monotonicity regimes."""

    tag: str
    dim: int
    all_tags: tuple[str, ...] = ()

    @property
    def proved(self) -> bool:
        return self.tag != UNCLASSIFIED


def simple_random_walk(dim: int) -> IncrementPmf:
    """Uniform jumps over the 2d signed unit vectors."""
    w = Fraction(1, 2 * dim)
    weights = {}
    for i in range(dim):
        for s in (1, -1):
            e = [0] * dim
            e[i] = s
            weights[tuple(e)] = w
    return IncrementPmf(dim, weights)


def lazy_walk(dim: int) -> IncrementPmf:
    """Hold with probability 1/2, otherwise jump to a uniform neighbour."""
    weights = {tuple([0] * dim): Fraction(1, 2)}
    w = Fraction(1, 4 * dim)
    for i in range(dim):
        for s in (1, -1):
            e = [0] * dim
            e[i] = s
            weights[tuple(e)] = w
    return IncrementPmf(dim, weights)


def uniform_three() -> IncrementPmf:
    """Uniform on {-1, 0, 1} in one dimension."""
    t = Fraction(1, 3)
    return IncrementPmf(1, {(-1,): t, (0,): t, (1,): t})


def point_mass(dim: int = 1) -> IncrementPmf:
    return IncrementPmf(dim, {tuple([0] * dim): Fraction(1)})


def validate_class(pmf: IncrementPmf) -> WalkClass:
    """Return the most specific proved class the pmf falls into.

    All satisfied tags are reported; precedence is
    SimpleSymmetric > ClassI > LazyHalf.
    """
    tags = []
    if pmf == simple_random_walk(pmf.dim):
        tags.append(SIMPLE_SYMMETRIC)
    if pmf.dim == 1 and _is_class_one(pmf):
        tags.append(CLASS_ONE)
    if pmf.prob(tuple([0] * pmf.dim)) >= Fraction(1, 2):
        tags.append(LAZY_HALF)
    ordered = tuple(t for t in _PRECEDENCE if t in tags)
    if not ordered:
        return WalkClass(UNCLASSIFIED, pmf.dim, ())
    return WalkClass(ordered[0], pmf.dim, ordered)


def _is_class_one(pmf: IncrementPmf) -> bool:
    # monotone tail: p(k) >= p(k+1) for all k >= 1, plus p(0) >= p(3)
    for k in range(1, pmf.support_radius + 1):
        if pmf.prob(k) < pmf.prob(k + 1):
            return False
    return pmf.prob(0) >= pmf.prob(3)


def parse_pmf_spec(spec: str) -> IncrementPmf:
    """Resolve a pmf spec string: "srw:d", "lazy:d", "uniform3:1", "file:PATH"."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "srw":
        return simple_random_walk(_parse_dim(arg, spec))
    if name == "lazy":
        return lazy_walk(_parse_dim(arg, spec))
    if name == "uniform3":
        if arg and arg != "1":
            raise ValidationError(f"uniform3 is one-dimensional, got {spec!r}")
        return uniform_three()
    if name == "file":
        return load_pmf(arg)
    raise ValidationError(f"unknown pmf spec {spec!r}")


def _parse_dim(arg: str, spec: str) -> int:
    try:
        d = int(arg)
    except ValueError:
        raise ValidationError(f"bad dimension in pmf spec {spec!r}") from None
    if d < 1:
        raise ValidationError(f"dimension must be >= 1 in pmf spec {spec!r}")
    return d


def load_pmf(path: str) -> IncrementPmf:
    """Load a pmf from text: one support point per line, "x_1 ... x_d num/den"."""
    weights: dict[Site, Fraction] = {}
    dim = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValidationError(f"{path}:{lineno}: need coordinates and a weight")
            try:
                coords = tuple(int(c) for c in parts[:-1])
                w = Fraction(parts[-1])
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
            if dim is None:
                dim = len(coords)
            elif len(coords) != dim:
                raise ValidationError(
                    f"{path}:{lineno}: dimension {len(coords)} != {dim}"
                )
            if coords in weights:
                raise ValidationError(f"{path}:{lineno}: duplicate site {coords}")
            weights[coords] = w
    if dim is None:
        raise ValidationError(f"{path}: no support points")
    return IncrementPmf(dim, weights)


def iter_window(dim: int, radius: int) -> Iterable[Site]:
    """All lattice sites with sup-norm at most radius."""
    import itertools

    return itertools.product(range(-radius, radius + 1), repeat=dim)
