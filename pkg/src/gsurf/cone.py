"""Equivariant symplectic-cone arithmetic at desk scale.

Cone membership for a rational class is tested by positivity of the square
and positivity of the area of every exceptional class; the test is exact
for N <= 8 (complete enumeration) and necessary-only for N >= 9, where the
enumeration is degree-capped.  The rank-2 slice spanned by the canonical
class and a fiber class is parametrized by the gap coordinate delta in
[omega] = -K + delta*F after scaling the fiber area to 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .errors import InvariantViolation, LatticeError
from .exceptional import enumerate_exceptional
from .lattice import (
    CohClass,
    SymplecticClass,
    canonical_class,
    pairing,
    rational_to_json,
)

FULL = "full"
PARTIAL_POSITIVE = "partial-positive"
OUTSIDE = "outside"

DEFAULT_PARTIAL_DEGREE = 5


def is_in_cone(w: SymplecticClass, max_degree: int = DEFAULT_PARTIAL_DEGREE) -> str:
    """Positivity of the square and of every exceptional area.

    Returns ``full`` (N <= 8, all checks pass), ``partial-positive``
    (N >= 9, degree-capped checks pass, necessary conditions only), or
    ``outside``.
    """
    if w.square() <= 0:
        return OUTSIDE
    n = w.n
    exc = enumerate_exceptional(n) if n <= 8 \
        else enumerate_exceptional(n, max_degree=max_degree)
    for e in exc:
        if w.area(e) <= 0:
            return OUTSIDE
    return FULL if exc.complete else PARTIAL_POSITIVE


def span2_coefficients(w: SymplecticClass, u: CohClass, v: CohClass):
    """Exact (x, y) with w = x*u + y*v, or None if w is outside the span."""
    raw = w.raw()
    gm = [[u.square(), pairing(u, v)], [pairing(u, v), v.square()]]
    rhs = [pairing(w, u), pairing(w, v)]
    det = gm[0][0] * gm[1][1] - gm[0][1] * gm[1][0]
    if det == 0:
        raise LatticeError("degenerate span basis")
    x = Fraction(rhs[0] * gm[1][1] - rhs[1] * gm[0][1], det)
    y = Fraction(gm[0][0] * rhs[1] - gm[1][0] * rhs[0], det)
    if all(Fraction(c) == x * a + y * b
           for c, a, b in zip(raw, u.coords, v.coords)):
        return x, y
    return None


def _fiber_for(k0: CohClass) -> CohClass:
    coords = [0] * (k0.n + 1)
    coords[0], coords[1] = 1, -1
    return CohClass(tuple(coords))


def canonical_sign(w: SymplecticClass, k0: CohClass,
                   fiber: Optional[CohClass] = None) -> int:
    """The sign s making s*w a positive multiple of -K0 + b*F with b > -1.

    The class must lie in the rational span of K0 and F and have positive
    square; the square condition pins the sign and already forces
    4b > N - 9, hence b >= -1 in the bundle range N >= 5.
    """
    if fiber is None:
        fiber = _fiber_for(k0)
    if w.square() <= 0:
        raise LatticeError("positive square required")
    xy = span2_coefficients(w, k0, fiber)
    if xy is None:
        raise LatticeError("class is outside the rank-2 span")
    x, y = xy
    if x == 0:
        raise LatticeError("class is a fiber multiple, square is not positive")
    sign = -1 if x > 0 else 1
    b = (sign * y) / (-(sign * x))
    if 4 * b <= w.n - 9:  # pragma: no cover - equivalent to square > 0
        raise InvariantViolation("sign normalization lost positivity")
    return sign


def fiber_pairs(n: int) -> Tuple[int, ...]:
    """Admissible a with a second fiber class F' = -a*K - F.

    Solves K.F' = -2, F'.F' = 0, F.F' = 2a >= 0 exactly over the standard
    model; the equations force a*(9 - N) = 4, so solutions exist only for
    N = 5, 7, 8 with a = 1, 2, 4.
    """
    if n < 2:
        raise LatticeError("need at least two blowups")
    k = canonical_class(n)
    f = _fiber_for(k)
    out = []
    for a in range(1, 9):
        fp = -a * k - f
        if fp.square() == 0 and pairing(k, fp) == -2 and pairing(f, fp) == 2 * a:
            out.append(a)
    return tuple(out)


def blowdown_obstruction(n: int, a_min: int) -> Tuple[Tuple[int, int], ...]:
    """Pairs (a, m) with m = -a^2 K^2 / (2a - 1) a positive integer.

    Such a pair would allow an invariant union of m disjoint (-1)-spheres
    in the class a*K + b*F; the divisibility gcd(a^2, 2a-1) = 1 kills every
    case except N = 6, a = -1.
    """
    if a_min > -1:
        raise LatticeError("a_min must be at most -1")
    ksq = 9 - n
    out = []
    for a in range(a_min, 0):
        num = -(a * a * ksq)
        den = 2 * a - 1
        if num % den == 0:
            m = num // den
            if m > 0:
                out.append((a, m))
    return tuple(out)


def delta(w: SymplecticClass, fiber: CohClass, k0: CohClass) -> Fraction:
    """Gap coordinate: scale w so w(F) = 2 and write it as -K0 + delta*F."""
    area = w.area(fiber)
    if area <= 0:
        raise LatticeError("fiber area must be positive")
    if span2_coefficients(w, k0, fiber) is None:
        raise LatticeError("class is outside the rank-2 span")
    scaled = w.scale(Fraction(2, area))
    x2, y2 = span2_coefficients(scaled, k0, fiber)
    if x2 != -1:  # pragma: no cover - forced by (-K0).F = 2
        raise InvariantViolation("fiber normalization failed")
    return Fraction(y2)


@dataclass(frozen=True)
class FiberReport:
    """Fiber-class candidates of a rank-2 invariant lattice.

    ``unique_expected`` records when a single fiber class is forced: nine
    or more blowups, or a declared nontrivial lattice-trivial core.  The
    numeric candidates can still come in a pair summing to -aK; with a
    declared core the bundle fiber is the preferred one and its partner is
    listed as excluded.  Which of a symmetric pair is realized cannot be
    decided from lattice data alone.
    """

    rank: int
    candidates: tuple
    unique_expected: bool
    effective: tuple
    excluded_by_core: tuple

    @property
    def consistent(self) -> bool:
        return not self.unique_expected or len(self.effective) == 1


def fiber_report(group_or_gens, g0_order: int = 1,
                 preferred: Optional[CohClass] = None) -> FiberReport:
    """Apply the core-uniqueness rule to the dichotomy's fiber candidates."""
    from .weyl import minimality_rank_dichotomy

    if g0_order < 1:
        raise LatticeError("core order must be at least 1")
    dich = minimality_rank_dichotomy(group_or_gens)
    cands = dich.fiber_candidates
    n = cands[0].n if cands else None
    unique = g0_order > 1 or (n is not None and n >= 9)
    if not unique or len(cands) <= 1:
        return FiberReport(dich.rank, cands, unique, cands, ())
    if preferred is None:
        default = _fiber_for(canonical_class(n))
        preferred = default if default in cands else cands[0]
    if preferred not in cands:
        raise LatticeError("preferred fiber class is not a candidate")
    rest = tuple(c for c in cands if c != preferred)
    return FiberReport(dich.rank, cands, unique, (preferred,), rest)


@dataclass(frozen=True)
class ConeSlice:
    """Membership samples of -K0 + delta*F along a grid of gap values.

    Membership is monotone nondecreasing in delta; the observed threshold
    is reported as a bracketing pair (largest non-member, smallest member),
    never as an exact infimum.
    """

    k0: CohClass
    fiber: CohClass
    samples: tuple
    last_outside: Optional[Fraction]
    first_member: Optional[Fraction]

    def __post_init__(self):
        if pairing(self.k0, self.fiber) != -2 or self.fiber.square() != 0:
            raise LatticeError("fiber class must satisfy F.F = 0, K.F = -2")

    def to_json(self):
        return {
            "samples": [[rational_to_json(d), member] for d, member in self.samples],
            "bracket": [None if self.last_outside is None
                        else rational_to_json(self.last_outside),
                        None if self.first_member is None
                        else rational_to_json(self.first_member)],
        }


def slice_point(k0: CohClass, fiber: CohClass, d) -> SymplecticClass:
    """The class -K0 + delta*F as a symplectic candidate."""
    d = Fraction(d)
    raw = tuple(-k + d * f for k, f in zip(k0.coords, fiber.coords))
    return SymplecticClass.from_raw(raw)


def slice_scan(n: int, fiber: CohClass, k0: CohClass,
               delta_grid: Sequence, max_degree: int = DEFAULT_PARTIAL_DEGREE,
               threads: int = 1) -> ConeSlice:
    """Evaluate cone membership on a delta grid and assert monotonicity.

    A monotonicity violation would contradict F.e >= 0 over the exceptional
    classes and is reported as an internal error.  The grid is evaluated
    pointwise (optionally across worker threads) and merged in grid order.
    """
    if fiber.n != n or k0.n != n:
        raise LatticeError("dimension mismatch")
    grid = sorted(Fraction(d) for d in delta_grid)
    if len(set(grid)) != len(grid):
        raise LatticeError("duplicate grid values")

    def member(d):
        return is_in_cone(slice_point(k0, fiber, d), max_degree=max_degree) != OUTSIDE

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flags = list(pool.map(member, grid))
    else:
        flags = [member(d) for d in grid]
    for (d1, f1), (d2, f2) in zip(zip(grid, flags), zip(grid[1:], flags[1:])):
        if f1 and not f2:
            raise InvariantViolation(
                f"membership dropped between delta = {d1} and {d2}")
    last_out = None
    first_in = None
    for d, flag in zip(grid, flags):
        if flag and first_in is None:
            first_in = d
        if not flag:
            last_out = d
    return ConeSlice(k0, fiber, tuple(zip(grid, flags)), last_out, first_in)
