"""Exact arithmetic in the degree-2 lattice of a multiply blown-up plane.

The lattice has basis (H, E1, ..., EN) with Gram matrix diag(1, -1, ..., -1).
Two storage conventions coexist, both of length N+1:

* integer classes (``CohClass``) are stored raw as (c0, c1, ..., cN),
  meaning c0*H + sum_i ci*Ei; the classical form a*H - sum_s bs*Es is
  recovered through accessors (a = c0, bs = -cs);
* symplectic classes (``SymplecticClass``) are stored as (nu; lam1..lamN),
  meaning nu*H - sum_i lami*Ei, so that the area of Ei is lami.

Everything is exact: integers and ``fractions.Fraction``, never floats.
All values are immutable and all operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import LatticeError

Rational = Union[int, Fraction]


def _norm_rat(x: Rational) -> Rational:
    """Collapse integer-valued Fractions to int; reject floats."""
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise LatticeError(f"exact coordinate expected, got {type(x).__name__}")
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def raw_pairing(x: Sequence[Rational], y: Sequence[Rational]) -> Rational:
    """Pairing of raw coordinate vectors: x0*y0 - sum_i xi*yi."""
    if len(x) != len(y):
        raise LatticeError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return _norm_rat(x[0] * y[0] - sum(a * b for a, b in zip(x[1:], y[1:])))


@dataclass(frozen=True)
class CohClass:
    """Integer degree-2 class, raw coordinates (c0, c1, ..., cN)."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) < 2:
            raise LatticeError("need at least the H and one E coordinate")
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in coords):
            raise LatticeError("CohClass coordinates must be integers")
        object.__setattr__(self, "coords", coords)

    # -- accessors -------------------------------------------------------

    @property
    def n(self) -> int:
        """Number of blowups N (vector length minus one)."""
        return len(self.coords) - 1

    @property
    def degree(self) -> int:
        """Coefficient a of H in the form a*H - sum bs*Es."""
        return self.coords[0]

    def b(self, s: int) -> int:
        """Coefficient bs in the form a*H - sum bs*Es (1 <= s <= N)."""
        if not 1 <= s <= self.n:
            raise LatticeError(f"index {s} out of range 1..{self.n}")
        return -self.coords[s]

    def b_vector(self) -> tuple:
        return tuple(-c for c in self.coords[1:])

    def raw(self) -> tuple:
        return self.coords

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "CohClass") -> "CohClass":
        if self.n != other.n:
            raise LatticeError("dimension mismatch")
        return CohClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "CohClass") -> "CohClass":
        if self.n != other.n:
            raise LatticeError("dimension mismatch")
        return CohClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "CohClass":
        return CohClass(tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> "CohClass":
        if not isinstance(k, int):
            raise LatticeError("integer scalar expected")
        return CohClass(tuple(k * a for a in self.coords))

    def square(self) -> int:
        return raw_pairing(self.coords, self.coords)

    def dot(self, other) -> Rational:
        return pairing(self, other)

    def is_primitive(self) -> bool:
        g = 0
        for c in self.coords:
            g = _gcd(g, c)
        return g == 1

    def __str__(self):
        return "[" + ",".join(str(c) for c in self.coords) + "]"


@dataclass(frozen=True)
class SymplecticClass:
    """Rational class stored as (nu; lam1..lamN) meaning nu*H - sum lami*Ei."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(_norm_rat(Fraction(c) if isinstance(c, int) else c)
                       for c in self.coords)
        if len(coords) < 2:
            raise LatticeError("need at least the H and one E coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_raw(cls, raw: Sequence[Rational]) -> "SymplecticClass":
        return cls((raw[0],) + tuple(-c for c in raw[1:]))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def nu(self) -> Rational:
        return self.coords[0]

    @property
    def lambdas(self) -> tuple:
        return self.coords[1:]

    def raw(self) -> tuple:
        """Raw coordinates (nu, -lam1, ..., -lamN)."""
        return (self.coords[0],) + tuple(-c for c in self.coords[1:])

    def square(self) -> Rational:
        r = self.raw()
        return raw_pairing(r, r)

    def area(self, e) -> Rational:
        """Symplectic area pairing(self, e)."""
        return pairing(self, e)

    def __neg__(self) -> "SymplecticClass":
        return SymplecticClass(tuple(-c for c in self.coords))

    def scale(self, t: Rational) -> "SymplecticClass":
        return SymplecticClass(tuple(_norm_rat(Fraction(t) * c) for c in self.coords))

    def __str__(self):
        return "(" + str(self.coords[0]) + "; " + \
            ",".join(str(c) for c in self.coords[1:]) + ")"


LatticeVector = Union[CohClass, SymplecticClass, Sequence[Rational]]


def _raw(x: LatticeVector) -> Sequence[Rational]:
    if isinstance(x, (CohClass, SymplecticClass)):
        return x.raw()
    return tuple(x)


def pairing(x: LatticeVector, y: LatticeVector) -> Rational:
    """Intersection pairing; symmetric and bilinear over the rationals."""
    return raw_pairing(_raw(x), _raw(y))


def _gcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class PicardLattice:
    """The degree-2 lattice of the plane blown up at N points."""

    n_blowups: int

    def __post_init__(self):
        if self.n_blowups < 1:
            raise LatticeError("need at least one blowup")

    @property
    def dim(self) -> int:
        return self.n_blowups + 1

    def H(self) -> CohClass:
        return CohClass((1,) + (0,) * self.n_blowups)

    def E(self, i: int) -> CohClass:
        if not 1 <= i <= self.n_blowups:
            raise LatticeError(f"index {i} out of range 1..{self.n_blowups}")
        return CohClass(tuple(1 if j == i else 0 for j in range(self.dim)))

    def basis(self) -> tuple:
        return (self.H(),) + tuple(self.E(i) for i in range(1, self.n_blowups + 1))

    def gram(self) -> tuple:
        b = self.basis()
        return tuple(tuple(pairing(x, y) for y in b) for x in b)

    def canonical(self) -> CohClass:
        return canonical_class(self.n_blowups)


def canonical_class(n: int) -> CohClass:
    """The class -3H + E1 + ... + EN; its square is 9 - N."""
    if n < 1:
        raise LatticeError("need at least one blowup")
    return CohClass((-3,) + (1,) * n)


def is_characteristic(e: CohClass) -> bool:
    """Whether pairing(e, x) == pairing(x, x) mod 2 for every x.

    Checking the basis vectors suffices by bilinearity: the condition is
    c0 odd and every ci odd.
    """
    return all(c % 2 == 1 for c in e.coords)


def is_reduced_class(w: SymplecticClass) -> bool:
    """Sorted positive areas with nu >= lam1 + lam2 + lam3 (non-strict)."""
    if w.n < 3:
        raise LatticeError("reduced form needs at least three blowups")
    lams = w.lambdas
    if any(lams[i] < lams[i + 1] for i in range(len(lams) - 1)):
        return False
    if lams[-1] <= 0:
        return False
    return w.nu >= lams[0] + lams[1] + lams[2]


def monotone_scalar(w: SymplecticClass):
    """The negative rational c with w = c*K, or None if w is not monotone."""
    k = canonical_class(w.n)
    raw = w.raw()
    # c is fixed by the H coordinate; the remaining coordinates must agree.
    c = Fraction(raw[0], k.coords[0])
    if all(Fraction(r) == c * kc for r, kc in zip(raw, k.coords)) and c < 0:
        return _norm_rat(c)
    return None


def is_monotone(w: SymplecticClass) -> bool:
    """Whether w is a negative rational multiple of the canonical class."""
    return monotone_scalar(w) is not None


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------

def _gram_diag(dim: int) -> tuple:
    return (1,) + (-1,) * (dim - 1)


@dataclass(frozen=True)
class Isometry:
    """Integer matrix acting on raw coordinates and preserving the pairing."""

    mat: tuple

    def __post_init__(self):
        mat = tuple(tuple(row) for row in self.mat)
        dim = len(mat)
        if dim < 2 or any(len(row) != dim for row in mat):
            raise LatticeError("square matrix of size >= 2 expected")
        for row in mat:
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise LatticeError("integer matrix expected")
        object.__setattr__(self, "mat", mat)
        w = self._pairing_witness()
        if w is not None:
            i, j, got, want = w
            raise LatticeError(
                f"matrix does not preserve the pairing:"
                f" (M e{i}).(M e{j}) = {got}, expected {want}")

    def _pairing_witness(self):
        """First basis pair whose pairing the matrix breaks, or None."""
        dim = self.dim
        q = _gram_diag(dim)
        cols = tuple(tuple(self.mat[r][c] for r in range(dim)) for c in range(dim))
        for i in range(dim):
            for j in range(i, dim):
                want = q[i] if i == j else 0
                got = raw_pairing(cols[i], cols[j])
                if got != want:
                    return (i, j, got, want)
        return None

    # -- structure -------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.mat)

    @property
    def n(self) -> int:
        return self.dim - 1

    @classmethod
    def identity(cls, n: int) -> "Isometry":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n + 1))
                         for i in range(n + 1)))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]]) -> "Isometry":
        dim = len(cols)
        return cls(tuple(tuple(cols[j][i] for j in range(dim)) for i in range(dim)))

    def is_identity(self) -> bool:
        return all(self.mat[i][j] == (1 if i == j else 0)
                   for i in range(self.dim) for j in range(self.dim))

    # -- action ----------------------------------------------------------

    def apply_raw(self, vec: Sequence[Rational]) -> tuple:
        if len(vec) != self.dim:
            raise LatticeError("dimension mismatch")
        return tuple(_norm_rat(sum(row[j] * vec[j] for j in range(self.dim)))
                     for row in self.mat)

    def apply(self, x: LatticeVector):
        if isinstance(x, CohClass):
            return CohClass(self.apply_raw(x.coords))
        if isinstance(x, SymplecticClass):
            return SymplecticClass.from_raw(self.apply_raw(x.raw()))
        return self.apply_raw(tuple(x))

    def fixes(self, x: LatticeVector) -> bool:
        return self.apply_raw(_raw(x)) == tuple(_raw(x))

    # -- group operations --------------------------------------------------

    def __matmul__(self, other: "Isometry") -> "Isometry":
        """Composition: (self @ other) acts by self after other."""
        a, b, dim = self.mat, other.mat, self.dim
        if other.dim != dim:
            raise LatticeError("dimension mismatch")
        return Isometry(tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(dim)) for j in range(dim))
            for i in range(dim)))

    def inverse(self) -> "Isometry":
        # M^T Q M = Q with Q = Q^-1 diagonal gives M^-1 = Q M^T Q.
        q = _gram_diag(self.dim)
        return Isometry(tuple(
            tuple(q[i] * self.mat[j][i] * q[j] for j in range(self.dim))
            for i in range(self.dim)))

    def order(self, cap: int = 10_000) -> int:
        acc = self
        for k in range(1, cap + 1):
            if acc.is_identity():
                return k
            acc = acc @ self
        raise LatticeError(f"element order exceeds cap {cap}")

    def key(self) -> tuple:
        return tuple(itertools.chain.from_iterable(self.mat))

    def __str__(self):
        return "\n".join(" ".join(f"{v:3d}" for v in row) for row in self.mat)


def permutation_isometry(n: int, images: dict) -> Isometry:
    """Isometry permuting the Ei coordinates: Ei -> E_images[i], fixing H.

    ``images`` maps a subset of 1..N bijectively; omitted indices are fixed.
    """
    perm = {i: images.get(i, i) for i in range(1, n + 1)}
    if sorted(perm.values()) != list(range(1, n + 1)):
        raise LatticeError("not a permutation of 1..N")
    cols = [[0] * (n + 1) for _ in range(n + 1)]
    cols[0][0] = 1
    for i in range(1, n + 1):
        cols[i][perm[i]] = 1
    return Isometry.from_columns(cols)


# ---------------------------------------------------------------------------
# JSON serialization: integer/rational arrays, rationals as "p/q" strings
# ---------------------------------------------------------------------------

def rational_to_json(x: Rational):
    x = _norm_rat(x)
    if isinstance(x, int):
        return x
    return f"{x.numerator}/{x.denominator}"


def rational_from_json(v) -> Rational:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, str):
        try:
            return _norm_rat(Fraction(v))
        except (ValueError, ZeroDivisionError) as exc:
            raise LatticeError(f"bad rational {v!r}") from exc
    raise LatticeError(f"bad rational {v!r}")


def coords_to_json(x: LatticeVector) -> list:
    return [rational_to_json(c) for c in _raw(x)]


def coh_from_json(v) -> CohClass:
    if not isinstance(v, (list, tuple)):
        raise LatticeError("coordinate array expected")
    vals = [rational_from_json(c) for c in v]
    if not all(isinstance(c, int) for c in vals):
        raise LatticeError("integer class expected")
    return CohClass(tuple(vals))


def symplectic_from_json(v) -> SymplecticClass:
    if not isinstance(v, (list, tuple)):
        raise LatticeError("coordinate array expected")
    return SymplecticClass.from_raw([rational_from_json(c) for c in v])
