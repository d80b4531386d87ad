"""Exceptional classes, Cremona reflections, and degree reduction.

An exceptional class satisfies e.e = -1 and K.e = -1.  In the form
e = a*H - sum_s bs*Es the two equations read

    sum bs   = 3a - 1,
    sum bs^2 = a^2 + 1.

Cauchy-Schwarz gives (3a-1)^2 <= N*(a^2+1) for any integer solution, which
bounds the degree a whenever N <= 8; the solution set is then finite.  For
N >= 9 the caller must supply a degree cap and the result is flagged partial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterable, Optional, Tuple

from .errors import LatticeError, LimitExceeded
from .lattice import (
    CohClass,
    Isometry,
    SymplecticClass,
    canonical_class,
    is_monotone,
    is_reduced_class,
    pairing,
    permutation_isometry,
)


def is_exceptional(e: CohClass) -> bool:
    return e.square() == -1 and pairing(canonical_class(e.n), e) == -1


def h_ijk(n: int, i: int, j: int, k: int) -> CohClass:
    """The (-2)-class H - Ei - Ej - Ek."""
    if not (1 <= i < j < k <= n):
        raise LatticeError(f"need 1 <= i < j < k <= {n}, got ({i},{j},{k})")
    coords = [0] * (n + 1)
    coords[0] = 1
    coords[i] = coords[j] = coords[k] = -1
    return CohClass(tuple(coords))


def h_ij(n: int, i: int, j: int) -> CohClass:
    """The exceptional class H - Ei - Ej."""
    if not (1 <= i < j <= n):
        raise LatticeError(f"need 1 <= i < j <= {n}, got ({i},{j})")
    coords = [0] * (n + 1)
    coords[0] = 1
    coords[i] = coords[j] = -1
    return CohClass(tuple(coords))


@dataclass(frozen=True)
class ExceptionalSet:
    """Enumeration result; ``complete`` is False for degree-capped N >= 9."""

    n: int
    classes: tuple
    complete: bool
    max_degree: int

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)

    def __contains__(self, e):
        return e in self.classes


def _degree_feasible(n: int, a: int) -> bool:
    return (3 * a - 1) ** 2 <= n * (a * a + 1)


def _degree_range(n: int) -> Tuple[int, int]:
    """Closed interval of degrees allowed by Cauchy-Schwarz, N <= 8 only."""
    lo = 0
    while _degree_feasible(n, lo - 1):
        lo -= 1
    hi = 0
    while _degree_feasible(n, hi + 1):
        hi += 1
    return lo, hi


def _solutions_for_degree(n: int, a: int):
    """Integer b-vectors with sum 3a-1 and square sum a^2+1, as multisets.

    Enumerates non-increasing vectors with Cauchy-Schwarz pruning on the
    remaining tail, then expands distinct permutations.
    """
    target_s = 3 * a - 1
    target_q = a * a + 1
    found = []

    def rec(pos, prev, s, q, prefix):
        if pos == n:
            if s == 0 and q == 0:
                found.append(tuple(prefix))
            return
        rem = n - pos - 1
        hi = min(prev, isqrt(q))
        for b in range(hi, -isqrt(q) - 1, -1):
            s2, q2 = s - b, q - b * b
            if q2 < 0:
                continue
            if rem == 0:
                if s2 == 0 and q2 == 0:
                    found.append(tuple(prefix + [b]))
                continue
            if s2 * s2 > rem * q2:
                continue
            if s2 > rem * b:  # remaining entries are <= b
                continue
            prefix.append(b)
            rec(pos + 1, b, s2, q2, prefix)
            prefix.pop()

    rec(0, isqrt(target_q), target_s, target_q, [])
    out = []
    for multiset in found:
        for perm in set(itertools.permutations(multiset)):
            out.append(CohClass((a,) + tuple(-b for b in perm)))
    return out


@lru_cache(maxsize=None)
def enumerate_exceptional(n: int, max_degree: Optional[int] = None) -> ExceptionalSet:
    """All classes with e.e = -1, K.e = -1 up to the degree bound.

    Complete for N <= 8; for N >= 9 ``max_degree`` is required and the
    result is flagged partial.  Results are cached and immutable.
    """
    if n < 1:
        raise LatticeError("need at least one blowup")
    if n <= 8:
        lo, hi = _degree_range(n)
        if max_degree is not None:
            hi = min(hi, max_degree)
        complete = max_degree is None or max_degree >= _degree_range(n)[1]
    else:
        if max_degree is None:
            raise LatticeError(f"max_degree is required for N = {n} >= 9")
        lo, hi = -1, max_degree
        complete = False
    classes = []
    for a in range(lo, hi + 1):
        if not _degree_feasible(n, a):
            continue
        classes.extend(_solutions_for_degree(n, a))
    classes.sort(key=lambda e: e.coords)
    return ExceptionalSet(n, tuple(classes), complete, hi)


def cremona_reflect(x, indices):
    """Reflection in H - Ei - Ej - Ek: x + (x . Hijk) * Hijk.

    Fixes the canonical class, is involutive, preserves the pairing, and
    accepts either an integer or a symplectic class.
    """
    i, j, k = indices
    n = x.n
    h = h_ijk(n, i, j, k)
    p = pairing(x, h)
    if isinstance(x, CohClass):
        return x + p * h
    if isinstance(x, SymplecticClass):
        raw = x.raw()
        return SymplecticClass.from_raw(
            tuple(r + p * c for r, c in zip(raw, h.coords)))
    raise LatticeError("CohClass or SymplecticClass expected")


def cremona_isometry(n: int, indices) -> Isometry:
    """The reflection of ``cremona_reflect`` as a matrix."""
    cols = []
    for col in range(n + 1):
        e = CohClass(tuple(1 if t == col else 0 for t in range(n + 1)))
        cols.append(cremona_reflect(e, indices).coords)
    return Isometry.from_columns(cols)


@dataclass(frozen=True)
class ReductionTrace:
    """Steps of the degree-descent on an exceptional class.

    Each step records (indices (i,j,k), class before, class after); the
    degree strictly decreases along the steps and the final class is E_l.
    """

    start: CohClass
    steps: tuple
    final: CohClass
    final_index: int

    def degrees(self) -> tuple:
        return (self.start.degree,) + tuple(after.degree for _, _, after in self.steps)


def _largest_three(bs) -> Tuple[int, int, int]:
    """Indices (1-based, i<j<k) of the three largest b-coefficients.

    Ties break toward the smallest index, which makes traces reproducible.
    """
    order = sorted(range(len(bs)), key=lambda t: (-bs[t], t))
    return tuple(sorted(t + 1 for t in order[:3]))


def reduce_exceptional(e: CohClass) -> ReductionTrace:
    """Apply Cremona reflections on the three largest bs until degree 0."""
    if e.n < 3:
        raise LatticeError("reduction needs at least three blowups")
    if not is_exceptional(e):
        raise LatticeError(f"{e} is not exceptional")
    steps = []
    cur = e
    while cur.degree > 0:
        ijk = _largest_three(cur.b_vector())
        nxt = cremona_reflect(cur, ijk)
        if nxt.degree >= cur.degree:
            raise LatticeError(f"degree did not drop at {cur}")
        steps.append((ijk, cur, nxt))
        cur = nxt
    if cur.degree != 0:
        raise LatticeError(f"descent stalled at {cur}")
    bs = cur.b_vector()
    nonzero = [t + 1 for t, b in enumerate(bs) if b != 0]
    if len(nonzero) != 1 or bs[nonzero[0] - 1] != -1:
        raise LatticeError(f"descent did not end at a basis class: {cur}")
    return ReductionTrace(e, tuple(steps), cur, nonzero[0])


def reduce_symplectic(w: SymplecticClass, max_iters: int = 10_000):
    """Sort areas and apply Cremona steps until the class is in reduced form.

    Returns (reduced class, isometry); the isometry maps the input to the
    output and fixes the canonical class.  Descent on a class of positive
    square is expected to terminate; the cap makes a stall loud.
    """
    if w.n < 3:
        raise LatticeError("reduction needs at least three blowups")
    if w.square() <= 0:
        raise LatticeError("positive square required")
    n = w.n
    iso = Isometry.identity(n)
    cur = w
    for _ in range(max_iters):
        lams = cur.lambdas
        order = sorted(range(n), key=lambda t: (-lams[t], t))
        if order != list(range(n)):
            perm = permutation_isometry(n, {src + 1: dst + 1
                                            for dst, src in enumerate(order)})
            cur = perm.apply(cur)
            iso = perm @ iso
        if cur.nu - sum(cur.lambdas[:3]) < 0:
            step = cremona_isometry(n, (1, 2, 3))
            cur = cremona_reflect(cur, (1, 2, 3))
            iso = step @ iso
        else:
            return cur, iso
    raise LimitExceeded(f"no reduced form after {max_iters} iterations")


# ---------------------------------------------------------------------------
# Shape of a reduced symplectic class
# ---------------------------------------------------------------------------

MONOTONE = "monotone"
SMALL_FIBER = "small-fiber"
OTHER = "other"


def structure_test(w: SymplecticClass, basis_reduced: bool = True):
    """Classify a reduced class as monotone, small-fiber shaped, or other.

    Small fiber shape means lam1 > lam2 = ... = lamN with nu - lam1 = 2*lam2;
    the returned candidate set then collects the classes of minimal area,
    {Ej, H - E1 - Ej : j > 1}.  ``basis_reduced`` records the caller's
    claim; the reduced-form inequalities are verified either way.
    """
    if w.n < 3:
        raise LatticeError("need at least three blowups")
    if not is_reduced_class(w):
        raise LatticeError(f"{w} is not in reduced form")
    del basis_reduced
    if is_monotone(w):
        return MONOTONE, None
    lams = w.lambdas
    if lams[0] > lams[1] and all(l == lams[1] for l in lams[2:]) \
            and w.nu - lams[0] == 2 * lams[1]:
        n = w.n
        cands = []
        for j in range(2, n + 1):
            e = [0] * (n + 1)
            e[j] = 1
            cands.append(CohClass(tuple(e)))
            cands.append(h_ij(n, 1, j))
        return SMALL_FIBER, tuple(sorted(cands, key=lambda c: c.coords))
    return OTHER, None


def positive_area_classes(w: SymplecticClass, classes: Iterable[CohClass]):
    """Filter for area > 0; enumeration itself is kept area-independent."""
    return tuple(e for e in classes if w.area(e) > 0)


def is_reduced_by_minimal_areas(w: SymplecticClass) -> bool:
    """Area-minimality form of reducedness, against the full enumeration.

    The standard basis is reduced for w when E_N has minimal area among
    the positive-area exceptional classes and, walking down, each E_i has
    minimal area among those orthogonal to E_(i+1), ..., E_N.  Needs the
    complete enumeration, so N <= 8.

    Pointwise this is strictly stronger than the coefficient inequalities
    of ``is_reduced_class``: area-minimality forces area(H-Ei-Ej) >=
    area(Ej) for i < j on top of the sorted areas and the leading triple
    inequality.  (26/3; 13/4, 11/4, 5/2, 9/4, 5/4) passes the coefficient
    test but fails here at E2.  The descent normal forms (3+b; 1+b, 1...)
    satisfy both.
    """
    n = w.n
    if n < 3 or n > 8:
        raise LatticeError("area-minimality test needs 3 <= N <= 8")
    pool = positive_area_classes(w, enumerate_exceptional(n))
    for i in range(n, 0, -1):
        sub = [e for e in pool
               if all(e.coords[j] == 0 for j in range(i + 1, n + 1))]
        ei = CohClass(tuple(1 if t == i else 0 for t in range(n + 1)))
        if ei not in sub:
            return False
        if any(w.area(e) < w.area(ei) for e in sub):
            return False
    return True
