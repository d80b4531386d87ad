"""The three-blowup calculus: hexagon of exceptional spheres, rotation
numbers, torus kernels, and the imprimitive monomial groups.

With three blowups the six exceptional classes form a hexagon: consecutive
classes pair to 1 and the rest to 0.  The cyclic edge order is forced by
those intersection numbers; the orientation is fixed so that H-E1-E3 comes
immediately before E1 and H-E1-E2 immediately after.  A finite map acting
trivially on the lattice is pinned down by its pair of rotation weights at
the first vertex (the corner of H-E1-E3 and E1); the weights at the other
five vertices follow by propagation around the hexagon.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Tuple

from .errors import InvariantViolation, LatticeError
from .lattice import CohClass, pairing

ORIENTATION_CCW = "counter-clockwise"


def _coh(*coords) -> CohClass:
    return CohClass(tuple(coords))


HEX_EDGES: Tuple[CohClass, ...] = (
    _coh(0, 1, 0, 0),    # E1
    _coh(1, -1, -1, 0),  # H - E1 - E2
    _coh(0, 0, 1, 0),    # E2
    _coh(1, 0, -1, -1),  # H - E2 - E3
    _coh(0, 0, 0, 1),    # E3
    _coh(1, -1, 0, -1),  # H - E1 - E3
)


@dataclass(frozen=True)
class HexagonModel:
    """The cyclic configuration of the six exceptional classes, N = 3.

    ``first_vertex`` is the intersection of the last and first edges
    (H - E1 - E3 and E1); vertices are numbered from it counter-clockwise.
    """

    edges: tuple = HEX_EDGES
    orientation: str = ORIENTATION_CCW

    def __post_init__(self):
        edges = tuple(self.edges)
        if len(edges) != 6:
            raise LatticeError("a hexagon has six edges")
        for i, e in enumerate(edges):
            for j in range(i + 1, 6):
                want = 1 if (j - i == 1 or (i, j) == (0, 5)) else 0
                if pairing(e, edges[j]) != want:
                    raise LatticeError(
                        f"edges {i} and {j} pair to {pairing(e, edges[j])},"
                        f" expected {want}")
        object.__setattr__(self, "edges", edges)

    @property
    def first_vertex(self) -> tuple:
        return (self.edges[5], self.edges[0])

    def vertex_edges(self, idx: int) -> tuple:
        """The two edges meeting at vertex idx (edge before, edge after)."""
        return (self.edges[(idx - 1) % 6], self.edges[idx % 6])


def propagate_rotation(pair) -> list:
    """Rotation pairs at the six vertices from the pair at the first vertex.

    Works with any exact ring elements (integers or Fractions); no modular
    reduction is applied here.
    """
    a, b = pair
    return [(a, b), (a + b, -a), (b, -a - b), (-a, -b), (-a - b, a), (-b, a + b)]


def other_fixed_point(pair):
    """Weights (-a, a+b) at the second fixed point on the same sphere."""
    a, b = pair
    if a == 0:
        raise LatticeError(
            "tangentially trivial weight: the sphere is fixed, there is no"
            " second isolated fixed point")
    return (-a, a + b)


def reduce_pair(pair, n: int) -> tuple:
    return (pair[0] % n, pair[1] % n)


# ---------------------------------------------------------------------------
# Torus elements: the subgroup acting trivially on the lattice
# ---------------------------------------------------------------------------

def _angle(x) -> Fraction:
    f = Fraction(x)
    return f - (f.numerator // f.denominator)


@dataclass(frozen=True)
class TorusElement:
    """Element of the two-torus, recorded by its first-vertex angles.

    Angles live in Q/Z as Fractions in [0, 1); composition adds them.  For
    an element of order n the rotation numbers (a, b) are the angles times
    n, reduced mod n.
    """

    angles: tuple

    def __post_init__(self):
        t, u = self.angles
        object.__setattr__(self, "angles", (_angle(t), _angle(u)))

    @classmethod
    def from_rotation(cls, a: int, b: int, n: int) -> "TorusElement":
        if n < 1:
            raise LatticeError("order must be positive")
        return cls((Fraction(a, n), Fraction(b, n)))

    @classmethod
    def identity(cls) -> "TorusElement":
        return cls((Fraction(0), Fraction(0)))

    @property
    def order(self) -> int:
        t, u = self.angles
        return t.denominator * u.denominator // gcd(t.denominator, u.denominator)

    def rotation_numbers(self, n: Optional[int] = None) -> tuple:
        n = self.order if n is None else n
        t, u = self.angles
        a, b = t * n, u * n
        if a.denominator != 1 or b.denominator != 1:
            raise LatticeError(f"element order does not divide {n}")
        return (int(a) % n, int(b) % n)

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        return TorusElement((self.angles[0] + other.angles[0],
                             self.angles[1] + other.angles[1]))

    def inverse(self) -> "TorusElement":
        return TorusElement((-self.angles[0], -self.angles[1]))

    def __pow__(self, k: int) -> "TorusElement":
        return TorusElement((k * self.angles[0], k * self.angles[1]))

    def is_identity(self) -> bool:
        return self.angles == (0, 0)

    def vertex_angles(self) -> list:
        return [(_angle(x), _angle(y)) for x, y in propagate_rotation(self.angles)]

    def conjugate_by_rotation(self, steps: int = 1) -> "TorusElement":
        """Conjugation by the 60-degree hexagon rotation, ``steps`` times.

        Rotating the hexagon shifts the vertex weight list; the conjugate
        is anchored at whatever weights land on the first vertex.
        """
        return TorusElement(self.vertex_angles()[(-steps) % 6])

    def sort_key(self):
        return self.angles


def g3_conjugation_check(h: TorusElement) -> bool:
    """Conjugation by the 180-degree rotation inverts every torus element.

    Verified as stated: the vertex weight list rotated by three positions
    equals the vertex weight list of the inverse.
    """
    rotated = h.vertex_angles()
    rotated = rotated[3:] + rotated[:3]
    return rotated == h.inverse().vertex_angles()


def _solve_congruence(k: int, c: int, n: int) -> Optional[int]:
    """Least nonnegative v with k*v = c (mod n), or None."""
    g = gcd(k, n)
    if c % g:
        return None
    k2, c2, n2 = k // g, (c % n) // g, n // g
    return (c2 * pow(k2, -1, n2)) % n2 if n2 > 1 else 0


def build_gamma(n: int, k: int, b: int) -> tuple:
    """The torus kernel generated by weights (0, 1) of order n/k and (1, b).

    Requires k | n and b^2 + b + 1 = 0 (mod k); the group has order n^2/k
    and is the additive closure of the two generators in Q/Z x Q/Z.
    """
    if n < 1 or k < 1 or n % k:
        raise LatticeError(f"k = {k} must divide n = {n}")
    if (b * b + b + 1) % k:
        raise LatticeError(f"b^2 + b + 1 = {b*b+b+1} is not 0 mod k = {k}")
    h1 = TorusElement((Fraction(0), Fraction(k, n)))
    ht1 = TorusElement((Fraction(1, n), Fraction(b % n, n)))
    seen = {TorusElement.identity()}
    frontier = [TorusElement.identity()]
    while frontier:
        new = []
        for x in frontier:
            for g in (h1, ht1):
                y = x * g
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    if len(seen) != n * n // k:  # pragma: no cover
        raise InvariantViolation("torus kernel has unexpected order")
    return tuple(sorted(seen, key=TorusElement.sort_key))


def gamma_generators(n: int, k: int, b: int) -> tuple:
    h1 = TorusElement((Fraction(0), Fraction(k, n)))
    ht1 = TorusElement((Fraction(1, n), Fraction(b % n, n)))
    return h1, ht1


def g2_action_check(n: int, k: int, b: int) -> bool:
    """Verify the 120-degree conjugation relations on the kernel generators.

    With h1 = (0,1) of order n/k and ht1 = (1,b) of order n the relations

        g^2 h1 g^-2 = ht1^-k h1^b,    g^2 ht1 g^-2 = ht1^(-b-1) h1^v

    hold for the least v with k*v = b^2 + b + 1 (mod n); no valid v means
    the triple (n, k, b) is inconsistent.
    """
    if n < 1 or k < 1 or n % k:
        raise LatticeError(f"k = {k} must divide n = {n}")
    v = _solve_congruence(k, b * b + b + 1, n)
    if v is None:
        raise LatticeError(f"no v with {k}*v = b^2+b+1 mod {n}")
    h1, ht1 = gamma_generators(n, k, b)
    lhs1 = h1.conjugate_by_rotation(2)
    rhs1 = (ht1 ** (-k)) * (h1 ** b)
    lhs2 = ht1.conjugate_by_rotation(2)
    rhs2 = (ht1 ** (-b - 1)) * (h1 ** v)
    return lhs1 == rhs1 and lhs2 == rhs2


def involution_nontrivial_conjugation() -> bool:
    """The 60-degree rotation conjugates every involution nontrivially.

    Both involution weight types, (1,0) and (1,1) mod 2, are propagated
    around the hexagon; a one-step rotation of either list differs from
    the original modulo 2.
    """
    for a, b in ((1, 0), (1, 1)):
        lst = propagate_rotation((a, b))
        rotated = lst[-1:] + lst[:-1]
        same = all((x1 - x2) % 2 == 0 and (y1 - y2) % 2 == 0
                   for (x1, y1), (x2, y2) in zip(lst, rotated))
        if same:
            return False
    return True


# ---------------------------------------------------------------------------
# Monomial subgroups of the rank-3 projective linear group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialGroupElement:
    """[mu^c0 z_sigma(0), mu^c1 z_sigma(1), mu^c2 z_sigma(2)] mod diagonal.

    Scalars are residues mod ``modulus`` canonicalized by subtracting c0,
    so the diagonal subgroup is killed and closure hashing is exact.
    """

    perm: tuple
    scalars: tuple
    modulus: int

    def __post_init__(self):
        if sorted(self.perm) != [0, 1, 2]:
            raise LatticeError("perm must be a permutation of (0, 1, 2)")
        if self.modulus < 1:
            raise LatticeError("modulus must be positive")
        c0 = self.scalars[0]
        canon = tuple((c - c0) % self.modulus for c in self.scalars)
        object.__setattr__(self, "scalars", canon)
        object.__setattr__(self, "perm", tuple(self.perm))

    @classmethod
    def identity(cls, n: int) -> "MonomialGroupElement":
        return cls((0, 1, 2), (0, 0, 0), n)

    @classmethod
    def scalar(cls, n: int, c0: int, c1: int, c2: int) -> "MonomialGroupElement":
        return cls((0, 1, 2), (c0, c1, c2), n)

    def __mul__(self, other: "MonomialGroupElement") -> "MonomialGroupElement":
        """self applied after other."""
        if self.modulus != other.modulus:
            raise LatticeError("modulus mismatch")
        perm = tuple(other.perm[self.perm[i]] for i in range(3))
        scal = tuple(self.scalars[i] + other.scalars[self.perm[i]]
                     for i in range(3))
        return MonomialGroupElement(perm, scal, self.modulus)

    def inverse(self) -> "MonomialGroupElement":
        inv = [0, 0, 0]
        for i, p in enumerate(self.perm):
            inv[p] = i
        scal = tuple(-self.scalars[inv[i]] for i in range(3))
        return MonomialGroupElement(tuple(inv), scal, self.modulus)

    def __pow__(self, k: int) -> "MonomialGroupElement":
        if k < 0:
            return self.inverse() ** (-k)
        acc = MonomialGroupElement.identity(self.modulus)
        for _ in range(k):
            acc = acc * self
        return acc

    def is_identity(self) -> bool:
        return self.perm == (0, 1, 2) and self.scalars == (0, 0, 0)

    def sort_key(self):
        return (self.perm, self.scalars)


CYCLE = (2, 0, 1)        # [z2, z0, z1]
SWAP_12 = (0, 2, 1)      # [z0, z2, z1]
SWAP_01 = (1, 0, 2)      # [z1, z0, z2]

KIND_GN = "Gn"
KIND_GTN = "Gtn"
KIND_GNKS = "Gnks"
KIND_GTN32 = "Gtn32"


@dataclass(frozen=True)
class MonomialGroup:
    kind: str
    n: int
    k: int
    s: int
    generators: tuple
    elements: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def _imprimitive_generators(kind: str, n: int, k: Optional[int], s: Optional[int]):
    if n < 1:
        raise LatticeError("n must be positive")
    if kind == KIND_GN:
        return (MonomialGroupElement.scalar(n, 1, 0, 0),
                MonomialGroupElement.scalar(n, 0, 1, 0),
                MonomialGroupElement(CYCLE, (0, 0, 0), n)), 3 * n * n, 1, 0
    if kind == KIND_GTN:
        return (MonomialGroupElement.scalar(n, 1, 0, 0),
                MonomialGroupElement.scalar(n, 0, 1, 0),
                MonomialGroupElement(SWAP_12, (0, 0, 0), n),
                MonomialGroupElement(CYCLE, (0, 0, 0), n)), 6 * n * n, 1, 0
    if kind == KIND_GNKS:
        if k is None or s is None:
            raise LatticeError("kind Gnks needs k and s")
        if k <= 1 or n % k:
            raise LatticeError(f"need k > 1 dividing n, got k = {k}, n = {n}")
        if (s * s - s + 1) % k:
            raise LatticeError(f"s^2 - s + 1 = {s*s-s+1} is not 0 mod k = {k}")
        return (MonomialGroupElement.scalar(n, k, 0, 0),
                MonomialGroupElement.scalar(n, s, 1, 0),
                MonomialGroupElement(CYCLE, (0, 0, 0), n)), 3 * n * n // k, k, s
    if kind == KIND_GTN32:
        if n % 3:
            raise LatticeError(f"kind Gtn32 needs 3 | n, got n = {n}")
        return (MonomialGroupElement.scalar(n, 3, 0, 0),
                MonomialGroupElement.scalar(n, 2, 1, 0),
                MonomialGroupElement(SWAP_12, (0, 0, 0), n),
                MonomialGroupElement(SWAP_01, (0, 0, 0), n)), 2 * n * n, 3, 2
    raise LatticeError(f"unknown kind {kind!r}")


def make_imprimitive(kind: str, n: int, k: Optional[int] = None,
                     s: Optional[int] = None) -> MonomialGroup:
    """Closure of the listed generators; the order matches the semidirect
    product description (3n^2, 6n^2, 3n^2/k, 2n^2 by kind)."""
    gens, expected, k_eff, s_eff = _imprimitive_generators(kind, n, k, s)
    seen = {MonomialGroupElement.identity(n)}
    frontier = list(seen)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    if len(seen) != expected:  # pragma: no cover
        raise InvariantViolation(
            f"{kind} closure has order {len(seen)}, expected {expected}")
    elements = tuple(sorted(seen, key=MonomialGroupElement.sort_key))
    return MonomialGroup(kind, n, k_eff, s_eff, gens, elements)


def presentation_check(n: int, k: int, s: int) -> bool:
    """Verify the 120-degree conjugation relations on t1, t2 by exact
    multiplication in the monomial group.

    t1 = [mu_(n/k) z0, z1, z2], t2 = [mu_n^s z0, mu_n z1, z2] and the cycle
    g^2 satisfy g^2 t1 g^-2 = t2^k t1^-s and g^2 t2 g^-2 = t2^(s-1) t1^-v,
    where k*v = s^2 - s + 1 (mod n).
    """
    if n < 1 or k < 1 or n % k:
        raise LatticeError(f"k = {k} must divide n = {n}")
    v = _solve_congruence(k, s * s - s + 1, n)
    if v is None:
        raise LatticeError(f"no v with {k}*v = s^2-s+1 mod {n}")
    t1 = MonomialGroupElement.scalar(n, k, 0, 0)
    t2 = MonomialGroupElement.scalar(n, s, 1, 0)
    g2 = MonomialGroupElement(CYCLE, (0, 0, 0), n)
    g2i = g2.inverse()
    rel1 = (g2 * t1 * g2i) == (t2 ** k) * (t1 ** (-s))
    rel2 = (g2 * t2 * g2i) == (t2 ** (s - 1)) * (t1 ** (-v))
    return rel1 and rel2


# ---------------------------------------------------------------------------
# Transitive subgroups of the hexagon symmetry group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HexagonSubgroup:
    order: int
    cyclic: bool
    vertex_perms: tuple


def _hexagon_symmetries() -> list:
    rots = [tuple((i + r) % 6 for i in range(6)) for r in range(6)]
    refls = [tuple((c - i) % 6 for i in range(6)) for c in range(6)]
    return rots + refls


def _edge_perm(vp: tuple) -> tuple:
    out = []
    for i in range(6):
        a, b = vp[i], vp[(i + 1) % 6]
        out.append(a if (a + 1) % 6 == b else b)
    return tuple(out)


def _orbit(perms, start) -> set:
    orb = {start}
    frontier = [start]
    while frontier:
        x = frontier.pop()
        for p in perms:
            if p[x] not in orb:
                orb.add(p[x])
                frontier.append(p[x])
    return orb


def transitive_hexagon_subgroups() -> tuple:
    """Subgroups of the full hexagon symmetry group acting transitively.

    Transitive on the hexagon means transitive on the six edges and on the
    six vertices: the configuration consists of the spheres and their
    intersection points, and a symmetry permutes both.  Exactly two
    subgroups qualify: the rotation subgroup of order 6 and the full
    group of order 12.
    """
    elems = _hexagon_symmetries()
    ident = tuple(range(6))

    def compose(p, q):
        return tuple(p[q[i]] for i in range(6))

    subgroups = set()
    pool = [()] + [(g,) for g in elems] + list(itertools.combinations(elems, 2))
    for gens in pool:
        group = {ident}
        frontier = [ident]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = compose(x, g)
                    if y not in group:
                        group.add(y)
                        new.append(y)
            frontier = new
        subgroups.add(frozenset(group))

    out = []
    for sg in subgroups:
        perms = sorted(sg)
        if len(_orbit(perms, 0)) != 6:
            continue
        eperms = [_edge_perm(p) for p in perms]
        if len(_orbit(eperms, 0)) != 6:
            continue
        out.append(HexagonSubgroup(len(perms), _is_cyclic(perms), tuple(perms)))
    out.sort(key=lambda s: (s.order, s.vertex_perms))
    return tuple(out)


def _is_cyclic(perms) -> bool:
    n = len(perms)

    def compose(p, q):
        return tuple(p[q[i]] for i in range(6))

    for p in perms:
        acc = p
        k = 1
        while acc != tuple(range(6)):
            acc = compose(acc, p)
            k += 1
            if k > n:
                break
        if k == n:
            return True
    return False
