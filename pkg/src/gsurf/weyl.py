"""Root systems, Weyl groups as lattice isometry groups, invariant lattices.

The orthogonal complement of the canonical class K in the degree-2 lattice
is a root lattice (A2+A1, A4, D5, E6, E7, E8 for N = 3..8); its roots are
the integer classes with r.r = -2 and K.r = 0.  Finite isometry groups are
handled two ways: breadth-first closure of the generators (with the full
element set materialized) and a stabilizer chain over the faithful action
on the root set (order only, feasible for the largest Weyl group).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvariantViolation, LatticeError, LimitExceeded
from .lattice import CohClass, Isometry, canonical_class, pairing

ROOT_SYSTEM_TYPES = {3: "A2+A1", 4: "A4", 5: "D5", 6: "E6", 7: "E7", 8: "E8"}


def root_system_type(n: int) -> str:
    if n not in ROOT_SYSTEM_TYPES:
        raise LatticeError(f"root system defined for 3 <= N <= 8, got {n}")
    return ROOT_SYSTEM_TYPES[n]


def simple_roots(n: int) -> Tuple[CohClass, ...]:
    """H - E1 - E2 - E3 followed by Ei - E(i+1) for i < N."""
    root_system_type(n)
    first = [0] * (n + 1)
    first[0], first[1], first[2], first[3] = 1, -1, -1, -1
    out = [CohClass(tuple(first))]
    for i in range(1, n):
        r = [0] * (n + 1)
        r[i], r[i + 1] = 1, -1
        out.append(CohClass(tuple(r)))
    return tuple(out)


@lru_cache(maxsize=None)
def all_roots(n: int) -> Tuple[CohClass, ...]:
    """All integer r with r.r = -2 and K.r = 0, sorted.

    In the form a*H - sum bs*Es the equations are sum b = 3a and
    sum b^2 = a^2 + 2, so 9a^2 <= N(a^2+2) bounds the degree.
    """
    root_system_type(n)
    amax = isqrt(2 * n // (9 - n)) + 1
    found: List[CohClass] = []
    for a in range(-amax, amax + 1):
        if 9 * a * a > n * (a * a + 2):
            continue
        target_s, target_q = 3 * a, a * a + 2

        def rec(pos, s, q, prefix):
            rem = n - pos - 1
            lim = isqrt(q)
            for b in range(-lim, lim + 1):
                s2, q2 = s - b, q - b * b
                if q2 < 0:
                    continue
                if rem == 0:
                    if s2 == 0 and q2 == 0:
                        found.append(CohClass((a,) + tuple(-x for x in prefix + [b])))
                    continue
                if s2 * s2 > rem * q2:
                    continue
                prefix.append(b)
                rec(pos + 1, s2, q2, prefix)
                prefix.pop()

        rec(0, target_s, target_q, [])
    found.sort(key=lambda r: r.coords)
    return tuple(found)


def reflection(alpha: CohClass) -> Isometry:
    """x -> x + (x.alpha)*alpha for a (-2)-class alpha.

    Involutive, negates alpha, and fixes every class orthogonal to alpha;
    in particular it fixes K exactly when K.alpha = 0 (true for roots).
    """
    if alpha.square() != -2:
        raise LatticeError(f"reflection needs alpha^2 = -2, got {alpha.square()}")
    dim = alpha.n + 1
    cols = []
    for j in range(dim):
        e = CohClass(tuple(1 if t == j else 0 for t in range(dim)))
        cols.append((e + pairing(e, alpha) * alpha).coords)
    return Isometry.from_columns(cols)


def simple_reflections(n: int) -> Tuple[Isometry, ...]:
    return tuple(reflection(a) for a in simple_roots(n))


# ---------------------------------------------------------------------------
# Breadth-first closure
# ---------------------------------------------------------------------------

@dataclass
class FiniteIsometryGroup:
    """A finite group of lattice isometries with its full element set.

    ``elements`` is an (order, dim, dim) integer array in lexicographic
    row-major order, so reports are reproducible.  Completed groups are
    immutable in practice and safe to share.
    """

    generators: tuple
    dim: int
    order: int
    elements: Optional[np.ndarray]

    @property
    def n(self) -> int:
        return self.dim - 1

    def __len__(self) -> int:
        return self.order

    def element_array(self) -> np.ndarray:
        if self.elements is None:
            raise LatticeError("element set was not stored for this group")
        return self.elements

    def __iter__(self):
        arr = self.element_array()
        for row in arr:
            yield Isometry(tuple(tuple(int(v) for v in r) for r in row))

    def trace_vector(self) -> np.ndarray:
        """Trace of every element on the full degree-2 lattice."""
        arr = self.element_array().astype(np.int64)
        return np.einsum("kii->k", arr)


def generate_group(gens: Sequence[Isometry], limit: int = 10_000_000,
                   chunk_size: int = 32768) -> FiniteIsometryGroup:
    """Breadth-first closure of the generators with exact deduplication.

    Raises LimitExceeded when more than ``limit`` elements are reached.
    The element set is schedule-independent: it is sorted before storing.
    Matrix entries are kept in 16-bit range; the finite groups of interest
    here stay within single digits.
    """
    gens = list(gens)
    if not gens:
        raise LatticeError("at least one generator required")
    dim = gens[0].dim
    if any(g.dim != dim for g in gens):
        raise LatticeError("generators act on different lattices")
    dd = dim * dim
    row_bytes = dd * 2
    # float64 products are exact here: |entry| <= dim * 32767^2 < 2^53.
    gen_mats = [np.array(g.mat, dtype=np.float64) for g in gens]

    ident = np.eye(dim, dtype=np.int16).reshape(1, dd)
    seen = {ident.tobytes()}
    chunks = [ident]
    frontier = ident
    while frontier.shape[0]:
        new_parts = []
        for start in range(0, frontier.shape[0], chunk_size):
            blk = frontier[start:start + chunk_size].astype(np.float64)
            blk = blk.reshape(-1, dim)
            for gm in gen_mats:
                prod = (blk @ gm).reshape(-1, dd)
                if prod.size and float(np.abs(prod).max()) > 32767:
                    raise LimitExceeded("matrix entries exceeded supported range")
                flat = np.ascontiguousarray(prod.astype(np.int16))
                raw = flat.tobytes()
                fresh = []
                pos = 0
                add = seen.add
                for r in range(flat.shape[0]):
                    key = raw[pos:pos + row_bytes]
                    pos += row_bytes
                    if key not in seen:
                        add(key)
                        fresh.append(r)
                if fresh:
                    new_parts.append(flat[fresh])
            if len(seen) > limit:
                raise LimitExceeded(f"group closure exceeded limit {limit}")
        if new_parts:
            frontier = np.concatenate(new_parts)
            chunks.append(frontier)
        else:
            frontier = np.empty((0, dd), dtype=np.int16)

    order = len(seen)
    seen.clear()
    elements = np.concatenate(chunks)
    del chunks, frontier
    elements = _sort_rows(elements)
    dup = np.any(np.all(elements[1:] == elements[:-1], axis=1)) \
        if elements.shape[0] > 1 else False
    if elements.shape[0] != order or dup:  # pragma: no cover
        raise InvariantViolation("closure bookkeeping mismatch")
    if int(np.abs(elements).max()) <= 127:
        elements = elements.astype(np.int8)
    return FiniteIsometryGroup(tuple(gens), dim, order,
                               elements.reshape(order, dim, dim))


def _sort_rows(arr: np.ndarray) -> np.ndarray:
    """Rows in row-major value order, via packed multi-column keys."""
    if arr.shape[0] < 2:
        return arr
    # int16 value order equals uint16 order after flipping the sign bit
    biased = arr.view(np.uint16) ^ np.uint16(0x8000)
    keys = []
    for c0 in range(0, arr.shape[1], 4):
        packed = np.zeros(arr.shape[0], dtype=np.uint64)
        for j in range(c0, min(c0 + 4, arr.shape[1])):
            packed <<= np.uint64(16)
            packed |= biased[:, j].astype(np.uint64)
        keys.append(packed)
    order = np.lexsort(tuple(reversed(keys)))
    return arr[order]


def trivial_group(n: int) -> FiniteIsometryGroup:
    return generate_group([Isometry.identity(n)])


def weyl_group(n: int, limit: int = 10_000_000) -> FiniteIsometryGroup:
    return generate_group(simple_reflections(n), limit=limit)


# ---------------------------------------------------------------------------
# Stabilizer chain over the root action
# ---------------------------------------------------------------------------

def _pcompose(p: tuple, q: tuple) -> tuple:
    """Product acting as q first, then p."""
    return tuple(p[i] for i in q)


def _pinv(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, pi in enumerate(p):
        inv[pi] = i
    return tuple(inv)


def _is_id(p: tuple) -> bool:
    return all(i == v for i, v in enumerate(p))


class StabilizerChain:
    """Deterministic Schreier-Sims over a faithful permutation action.

    Level i stores the strong generators whose first moved base point is
    base[i]; the generating set effective at level i is the union over all
    levels >= i, since deeper generators also stabilize the prefix.
    """

    def __init__(self, degree: int):
        self.degree = degree
        self.base: List[int] = []
        self.assigned: List[List[tuple]] = []
        self.transversals: List[dict] = []
        self._done: List[set] = []
        self._id = tuple(range(degree))

    def order(self) -> int:
        o = 1
        for t in self.transversals:
            o *= len(t)
        return o

    def add(self, perm: tuple) -> None:
        if len(perm) != self.degree:
            raise LatticeError("permutation degree mismatch")
        residue, at = self._strip(0, perm)
        if _is_id(residue):
            return
        self._assign(at, residue)
        for i in range(at, -1, -1):
            self._complete(i)

    def contains(self, perm: tuple) -> bool:
        residue, _ = self._strip(0, perm)
        return _is_id(residue)

    def _strip(self, start: int, p: tuple):
        for i in range(start, len(self.base)):
            img = p[self.base[i]]
            u = self.transversals[i].get(img)
            if u is None:
                return p, i
            p = _pcompose(_pinv(u), p)
        return p, len(self.base)

    def _assign(self, at: int, gen: tuple) -> None:
        if at == len(self.base):
            beta = next(i for i, v in enumerate(gen) if v != i)
            self.base.append(beta)
            self.assigned.append([])
            self.transversals.append({beta: self._id})
            self._done.append(set())
        if gen not in self.assigned[at]:
            self.assigned[at].append(gen)

    def _effective(self, i: int):
        for j in range(i, len(self.base)):
            for idx, g in enumerate(self.assigned[j]):
                yield j, idx, g

    def _extend_orbit(self, i: int) -> None:
        trans = self.transversals[i]
        gens = [g for _, _, g in self._effective(i)]
        queue = list(trans)
        while queue:
            pt = queue.pop(0)
            upt = trans[pt]
            for g in gens:
                img = g[pt]
                if img not in trans:
                    trans[img] = _pcompose(g, upt)
                    queue.append(img)

    def _complete(self, i: int) -> None:
        """Process Schreier generators until level i verifies.

        Assumes deeper levels are complete on entry and re-completes any
        level it adds generators to, so the invariant holds on exit.
        """
        while True:
            self._extend_orbit(i)
            trans = self.transversals[i]
            progressed = False
            for j, idx, g in list(self._effective(i)):
                for pt in list(trans):
                    mark = (pt, j, idx)
                    if mark in self._done[i]:
                        continue
                    self._done[i].add(mark)
                    s = _pcompose(_pinv(trans[g[pt]]), _pcompose(g, trans[pt]))
                    if _is_id(s):
                        continue
                    residue, at = self._strip(i + 1, s)
                    if _is_id(residue):
                        continue
                    self._assign(at, residue)
                    for jj in range(at, i, -1):
                        self._complete(jj)
                    progressed = True
            if not progressed:
                return


def _rank_of_rows(rows: List[List[int]]) -> int:
    """Rank over the rationals by fraction-free elimination."""
    mat = [list(r) for r in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][c] != 0:
                a, b = mat[rank][c], mat[r][c]
                mat[r] = [a * x - b * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def perm_action(gens: Sequence[Isometry], points: Sequence[CohClass]):
    """Permutations induced on ``points``; error if a point leaves the set."""
    index = {p.coords: i for i, p in enumerate(points)}
    if len(index) != len(points):
        raise LatticeError("duplicate points")
    perms = []
    for g in gens:
        images = []
        for p in points:
            q = g.apply(p)
            if q.coords not in index:
                raise LatticeError(f"generator moves {p} off the point set")
            images.append(index[q.coords])
        if sorted(images) != list(range(len(points))):
            raise LatticeError("generator does not permute the point set")
        perms.append(tuple(images))
    return perms


def _certify_faithful(gens: Sequence[Isometry], points: Sequence[CohClass]):
    """The action on ``points`` determines the matrix, hence is faithful.

    Sufficient conditions, checked exactly: the points span the ambient
    rational space, or they span a hyperplane and every generator fixes K
    with K outside that hyperplane.
    """
    dim = gens[0].dim
    rows = [list(p.coords) for p in points]
    r = _rank_of_rows(rows)
    if r == dim:
        return
    k = canonical_class(dim - 1)
    if r == dim - 1 and all(g.fixes(k) for g in gens):
        if _rank_of_rows(rows + [list(k.coords)]) == dim:
            return
    raise LatticeError("action on the point set cannot be certified faithful")


def stabilizer_chain(gens: Sequence[Isometry],
                     points: Optional[Sequence[CohClass]] = None) -> StabilizerChain:
    gens = list(gens)
    if not gens:
        raise LatticeError("at least one generator required")
    if points is None:
        points = all_roots(gens[0].n)
    points = list(points)
    _certify_faithful(gens, points)
    perms = perm_action(gens, points)
    for g, p in zip(gens, perms):
        if _is_id(p) and not g.is_identity():
            raise LatticeError("unfaithful action: non-identity generator acts trivially")
    chain = StabilizerChain(len(points))
    for p in perms:
        chain.add(p)
    return chain


def group_order_via_chain(gens: Sequence[Isometry],
                          points: Optional[Sequence[CohClass]] = None) -> int:
    """Exact group order from a stabilizer chain over the root action."""
    return stabilizer_chain(gens, points).order()


# ---------------------------------------------------------------------------
# Invariant lattice and the trace condition
# ---------------------------------------------------------------------------

def integer_kernel(rows: Sequence[Sequence[int]], dim: int) -> List[tuple]:
    """Primitive basis of {x in Z^dim : A x = 0}, by unimodular column ops.

    The returned vectors form a basis of the full integer kernel (the
    kernel of a unimodular change of coordinates is saturated).
    """
    ncols = dim
    acols = [[rows[r][c] for r in range(len(rows))] for c in range(ncols)]
    ucols = [[1 if i == c else 0 for i in range(ncols)] for c in range(ncols)]
    active = list(range(ncols))
    for r in range(len(rows)):
        live = [c for c in active if acols[c][r] != 0]
        while len(live) > 1:
            live.sort(key=lambda c: (abs(acols[c][r]), c))
            piv = live[0]
            pval = acols[piv][r]
            for c in live[1:]:
                q = acols[c][r] // pval
                if q:
                    acols[c] = [x - q * y for x, y in zip(acols[c], acols[piv])]
                    ucols[c] = [x - q * y for x, y in zip(ucols[c], ucols[piv])]
            live = [c for c in live if acols[c][r] != 0]
        if live:
            active.remove(live[0])
    kernel = []
    for c in active:
        v = ucols[c]
        if any(v):
            if next(x for x in v if x) < 0:
                v = [-x for x in v]
            kernel.append(tuple(v))
    kernel.sort()
    return kernel


def _generators_of(group_or_gens) -> List[Isometry]:
    if isinstance(group_or_gens, FiniteIsometryGroup):
        return list(group_or_gens.generators)
    return list(group_or_gens)


def invariant_lattice(group_or_gens):
    """(rank, primitive basis) of the sublattice fixed by every generator."""
    gens = _generators_of(group_or_gens)
    if not gens:
        raise LatticeError("at least one generator required")
    dim = gens[0].dim
    rows = []
    for g in gens:
        for i in range(dim):
            row = [g.mat[i][j] - (1 if i == j else 0) for j in range(dim)]
            rows.append(row)
    kernel = integer_kernel(rows, dim)
    return len(kernel), tuple(CohClass(v) for v in kernel)


def trace_sum_condition(group: FiniteIsometryGroup):
    """(sum of traces on the root lattice over all elements, sum == 0).

    Every generator must fix K, so each element restricts to the root
    lattice and tr(g|R) = tr(g|H2) - 1.  The sum always equals
    |G| * rank(R^G); a mismatch would be an internal error.
    """
    k = canonical_class(group.n)
    for g in group.generators:
        if not g.fixes(k):
            raise LatticeError(f"generator moves the canonical class:\n{g}")
    total = int(group.trace_vector().sum()) - group.order
    rank, _ = invariant_lattice(group)
    if total != group.order * (rank - 1):  # pragma: no cover
        raise InvariantViolation("trace sum disagrees with fixed-lattice rank")
    return total, total == 0


# ---------------------------------------------------------------------------
# Rank dichotomy and fiber-class candidates
# ---------------------------------------------------------------------------

RANK1 = "rank1"
RANK2 = "rank2"
NEITHER = "neither"


@dataclass(frozen=True)
class Dichotomy:
    kind: str
    rank: int
    basis: tuple
    fiber_candidates: tuple


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return (g, y, x - (a // b) * y)


def _isqrt_exact(m: int):
    if m < 0:
        return None
    r = isqrt(m)
    return r if r * r == m else None


def fiber_class_candidates(basis: Sequence[CohClass]) -> Tuple[CohClass, ...]:
    """Primitive F = x*u + y*v with F.F = 0 and K.F = -2 in a rank-2 lattice."""
    u, v = basis
    k = canonical_class(u.n)
    alpha, beta = pairing(k, u), pairing(k, v)
    g, x0, y0 = _ext_gcd(alpha, beta)
    if g == 0 or (-2) % g != 0:
        return ()
    t0 = (-2) // g
    f0 = (x0 * t0) * u + (y0 * t0) * v
    w = (-beta // g) * u + (alpha // g) * v
    a2, a1, a0 = w.square(), pairing(f0, w), f0.square()
    ts = []
    if a2 != 0:
        disc = a1 * a1 - a2 * a0
        root = _isqrt_exact(disc)
        if root is not None:
            for num in (-a1 + root, -a1 - root):
                if num % a2 == 0:
                    ts.append(num // a2)
    elif a1 != 0:
        if a0 % (2 * a1) == 0:
            ts.append(-a0 // (2 * a1))
    else:
        if a0 == 0:  # pragma: no cover - impossible in signature (1, N)
            raise InvariantViolation("degenerate isotropic pencil")
    out = []
    for t in sorted(set(ts)):
        f = f0 + t * w
        if f.is_primitive() and f.square() == 0 and pairing(k, f) == -2:
            out.append(f)
    out.sort(key=lambda c: c.coords)
    return tuple(out)


def minimality_rank_dichotomy(group_or_gens) -> Dichotomy:
    """Classify by the rank of the invariant lattice (1, 2, or neither).

    In the rank-2 case the primitive invariant classes with F.F = 0 and
    K.F = -2 are returned as fiber-class candidates (there are at most two).
    """
    gens = _generators_of(group_or_gens)
    k = canonical_class(gens[0].n)
    for g in gens:
        if not g.fixes(k):
            raise LatticeError("generators must fix the canonical class")
    rank, basis = invariant_lattice(gens)
    if rank == 1:
        return Dichotomy(RANK1, rank, basis, ())
    if rank == 2:
        return Dichotomy(RANK2, rank, basis, fiber_class_candidates(basis))
    return Dichotomy(NEITHER, rank, basis, ())
