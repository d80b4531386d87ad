"""Combinatorics of conic-bundle group actions on the degree-2 lattice.

The standard bundle model on N blowups has fiber class F = H - E1 and
N - 1 singular fibers, each a pair of exceptional classes (Ej, H - E1 - Ej)
summing to F.  A bundle-preserving isometry fixes F and K and permutes the
pairs; it is encoded by a permutation pi of the fiber labels together with
swap flags eps (eps = -1 sends the chosen sphere of a fiber to the other
component of its image fiber).  Conversely (pi, eps) determines the matrix,
and an integral lift exists precisely when the number of swapped fibers is
even.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .errors import InvariantViolation, LatticeError
from .lattice import CohClass, Isometry, canonical_class, pairing
from .weyl import FiniteIsometryGroup

CASE_CYCLIC_CORE = "cyclic-core"
CASE_INVOLUTION = "involution"
CASE_KLEIN = "klein-four"
CASE_NON_MINIMAL = "non-minimal"


def _unit(n: int, i: int) -> CohClass:
    return CohClass(tuple(1 if t == i else 0 for t in range(n + 1)))


def fiber_class(n: int) -> CohClass:
    """H - E1."""
    coords = [0] * (n + 1)
    coords[0], coords[1] = 1, -1
    return CohClass(tuple(coords))


@dataclass(frozen=True)
class ConicBundleModel:
    """Fiber class H - E1 with one chosen sphere class per singular fiber.

    The default choice is (E2, ..., EN); a relabeled model may pick the
    other component of a fiber or permute the fibers, as long as the set
    of unordered pairs {e, F - e} is the standard one.
    """

    n_blowups: int
    sphere_classes: tuple = None

    def __post_init__(self):
        n = self.n_blowups
        if n < 3:
            raise LatticeError("a conic bundle model needs at least 3 blowups")
        if self.sphere_classes is None:
            spheres = tuple(_unit(n, j) for j in range(2, n + 1))
        else:
            spheres = tuple(self.sphere_classes)
        object.__setattr__(self, "sphere_classes", spheres)
        f = fiber_class(n)
        k = canonical_class(n)
        std = {frozenset((_unit(n, j).coords, (f - _unit(n, j)).coords))
               for j in range(2, n + 1)}
        got = set()
        for e in spheres:
            if e.n != n:
                raise LatticeError("sphere class of wrong dimension")
            if e.square() != -1 or pairing(k, e) != -1 or pairing(f, e) != 0:
                raise LatticeError(f"{e} is not a vertical sphere class")
            got.add(frozenset((e.coords, (f - e).coords)))
        if got != std or len(spheres) != n - 1:
            raise LatticeError("sphere classes do not label the standard fibers")

    @property
    def fiber(self) -> CohClass:
        return fiber_class(self.n_blowups)

    @property
    def canonical(self) -> CohClass:
        return canonical_class(self.n_blowups)

    def pairs(self) -> tuple:
        f = self.fiber
        return tuple((e, f - e) for e in self.sphere_classes)

    def labels(self) -> range:
        """Fiber labels j = 2..N; label j names sphere_classes[j-2]."""
        return range(2, self.n_blowups + 1)


@dataclass(frozen=True)
class FiberAction:
    """Permutation-with-swap-flags data of a bundle-preserving isometry.

    ``pi[j-2]`` is the image fiber label of fiber j and ``eps[j-2]`` is +1
    when the chosen sphere goes to the chosen sphere, -1 when it goes to
    the other component.
    """

    pi: tuple
    eps: tuple

    def __post_init__(self):
        if sorted(self.pi) != list(range(2, 2 + len(self.pi))):
            raise LatticeError("pi is not a permutation of the fiber labels")
        if len(self.eps) != len(self.pi) or any(e not in (1, -1) for e in self.eps):
            raise LatticeError("eps must consist of +1/-1 flags")

    @property
    def size(self) -> int:
        return len(self.pi)

    def is_base_trivial(self) -> bool:
        return all(self.pi[t] == t + 2 for t in range(self.size))

    def swap_count(self) -> int:
        return sum(1 for e in self.eps if e == -1)

    def sigma(self) -> tuple:
        """Fiber labels whose pair is preserved componentwise."""
        return tuple(j for t, j in enumerate(range(2, 2 + self.size))
                     if self.pi[t] == j and self.eps[t] == 1)

    def compose(self, other: "FiberAction") -> "FiberAction":
        """Action of g @ h given self = action(g), other = action(h)."""
        if self.size != other.size:
            raise LatticeError("size mismatch")
        pi = tuple(self.pi[other.pi[t] - 2] for t in range(self.size))
        eps = tuple(self.eps[other.pi[t] - 2] * other.eps[t]
                    for t in range(self.size))
        return FiberAction(pi, eps)


def fiber_action(g: Isometry, model: ConicBundleModel) -> FiberAction:
    """Extract (pi, eps) from a matrix, or fail if it breaks the bundle."""
    n = model.n_blowups
    if g.n != n:
        raise LatticeError("dimension mismatch")
    f, k = model.fiber, model.canonical
    if not g.fixes(f):
        raise LatticeError("isometry does not fix the fiber class")
    if not g.fixes(k):
        raise LatticeError("isometry does not fix the canonical class")
    plus = {e.coords: j for j, e in zip(model.labels(), model.sphere_classes)}
    minus = {(f - e).coords: j for j, e in zip(model.labels(), model.sphere_classes)}
    pi: List[int] = []
    eps: List[int] = []
    for e in model.sphere_classes:
        img = g.apply(e).coords
        if img in plus:
            pi.append(plus[img])
            eps.append(1)
        elif img in minus:
            pi.append(minus[img])
            eps.append(-1)
        else:
            raise LatticeError(f"isometry moves {e} out of the singular fibers")
    return FiberAction(tuple(pi), tuple(eps))


def matrix_from_fiber_action(pi: Sequence[int], eps: Sequence[int],
                             n: int) -> Isometry:
    """Integral isometry realizing (pi, eps) on the standard model.

    Fixing F and K forces E1 -> (sum of the Ej images - K - 3F) / 2, so an
    integral lift exists iff the number of swapped fibers is even.
    """
    action = FiberAction(tuple(pi), tuple(eps))
    if action.size != n - 1:
        raise LatticeError("wrong number of fiber labels")
    if action.swap_count() % 2:
        raise LatticeError(
            "no integral lift: the number of swapped fibers must be even")
    f, k = fiber_class(n), canonical_class(n)
    images = {}
    total = CohClass((0,) * (n + 1))
    for t, j in enumerate(range(2, n + 1)):
        img = _unit(n, action.pi[t]) if action.eps[t] == 1 \
            else f - _unit(n, action.pi[t])
        images[j] = img
        total = total + img
    num = total - k - 3 * f
    if any(c % 2 for c in num.coords):  # pragma: no cover - parity checked above
        raise InvariantViolation("parity bookkeeping failed")
    e1_img = CohClass(tuple(c // 2 for c in num.coords))
    h_img = f + e1_img
    cols = [h_img.coords, e1_img.coords] + [images[j].coords for j in range(2, n + 1)]
    return Isometry.from_columns(cols)


def full_swap(n: int) -> Isometry:
    """The involution sending every Ej to H - E1 - Ej (N must be odd)."""
    return matrix_from_fiber_action(tuple(range(2, n + 1)), (-1,) * (n - 1), n)


def is_minimal_bundle(group: Iterable[Isometry], model: ConicBundleModel) -> bool:
    """Every fiber is switched by some element fixing that fiber."""
    needed = set(model.labels())
    for g in _iter_isometries(group):
        act = fiber_action(g, model)
        for t, j in enumerate(model.labels()):
            if act.pi[t] == j and act.eps[t] == -1:
                needed.discard(j)
        if not needed:
            return True
    return not needed


def _iter_isometries(group) -> Iterable[Isometry]:
    if isinstance(group, FiniteIsometryGroup):
        return iter(group)
    return iter(group)


def _as_isometry_list(group) -> List[Isometry]:
    return list(_iter_isometries(group))


@dataclass(frozen=True)
class GroupDecomposition:
    """The (base-trivial subgroup, declared core, base action) data.

    ``q_elements`` is the image of Q in the isometry group: the elements
    acting trivially on the base.  The subgroup acting trivially on the
    whole lattice is invisible here, so its order m is declared by the
    caller.  ``case_tag`` follows the classification of minimal bundles:
    ``cyclic-core`` (m > 1), ``involution`` / ``klein-four`` (m = 1), or
    ``non-minimal``.
    """

    q_elements: tuple
    g0_size: int
    p_structure: tuple
    case_tag: str
    minimal: bool
    q_image: str
    q_abstract: tuple
    sigma_sets: Optional[tuple]
    sigma_sizes: Optional[tuple]
    parity_ok: Optional[bool]


def decompose(group, model: ConicBundleModel, g0_order: int = 1) -> GroupDecomposition:
    """Split a closed isometry group along the bundle and classify it.

    Structures incompatible with the classification of minimal bundles are
    reported as InvariantViolation: they cannot arise from a group action
    on the surface, only from adversarial lattice data.
    """
    if g0_order < 1:
        raise LatticeError("the declared core order must be at least 1")
    elements = _as_isometry_list(group)
    n = model.n_blowups
    actions = [(g, fiber_action(g, model)) for g in elements]
    if len(elements) <= 200:
        keys = {g.key() for g in elements}
        for g in elements:
            for h in elements:
                if (g @ h).key() not in keys:
                    raise LatticeError("input group is not closed under products")
    q = tuple(g for g, a in actions if a.is_base_trivial())
    q_actions = [a for _, a in actions if a.is_base_trivial()]
    p_structure = tuple(sorted({a.pi for _, a in actions}))
    minimal = is_minimal_bundle(elements, model)
    m = g0_order

    nontrivial = [(g, a) for g, a in zip(q, q_actions) if not g.is_identity()]
    for g, _ in nontrivial:
        if not (g @ g).is_identity():  # pragma: no cover - forced by the model
            raise InvariantViolation("base-trivial element is not an involution")

    sigma_sets = sigma_sizes = parity = None
    q_abstract: tuple

    if m > 1:
        if n % 2 == 0:
            raise LatticeError("a nontrivial core forces an odd number of blowups")
        q_image = _q_image_name(len(q))
        full = all(e == -1 for _, a in nontrivial for e in a.eps)
        shape_ok = len(nontrivial) <= 1 and full
        if shape_ok and nontrivial:
            q_abstract = (f"D{2 * m}",)
        elif shape_ok:
            q_abstract = (f"Z{m}",) if m % 2 == 0 else ()
        else:
            q_abstract = ()
        if minimal:
            if not shape_ok:
                raise InvariantViolation(
                    "nontrivial core with a base-trivial image outside {id, full swap}")
            if not nontrivial and m % 2:
                raise InvariantViolation(
                    "core-only base kernel needs an even core order")
            tag = CASE_CYCLIC_CORE
        else:
            tag = CASE_NON_MINIMAL
    else:
        q_image = _q_image_name(len(q))
        if len(q) == 2:
            tag = CASE_INVOLUTION if minimal else CASE_NON_MINIMAL
            q_abstract = ("Z2",)
            tau = next(a for _, a in nontrivial)
            sig = tau.sigma()
            sigma_sets = (sig,)
            sigma_sizes = (len(sig),)
            parity = len(sig) % 2 == (n - 1) % 2
        elif len(q) == 4:
            tag = CASE_KLEIN if minimal else CASE_NON_MINIMAL
            q_abstract = ("Z2xZ2",)
            s1, s2, s3, parity = sigma_partition([g for g, _ in nontrivial], model)
            sigma_sets = (s1, s2, s3)
            sigma_sizes = (len(s1), len(s2), len(s3))
        elif minimal:
            raise InvariantViolation(
                f"minimal bundle with base-trivial image of order {len(q)}")
        else:
            tag = CASE_NON_MINIMAL
            q_abstract = ()

    return GroupDecomposition(
        q_elements=q,
        g0_size=m,
        p_structure=p_structure,
        case_tag=tag,
        minimal=minimal,
        q_image=q_image,
        q_abstract=q_abstract,
        sigma_sets=sigma_sets,
        sigma_sizes=sigma_sizes,
        parity_ok=parity,
    )


def _q_image_name(size: int) -> str:
    return {1: "trivial", 2: "Z2", 4: "Z2xZ2"}.get(size, f"elementary-2 of order {size}")


def sigma_partition(involutions: Sequence[Isometry], model: ConicBundleModel):
    """The fiber partition cut out by the three involutions of a Klein four.

    Sigma_i collects the fibers whose two spheres tau_i preserves; the sets
    must be pairwise disjoint and each size must be congruent to N - 1
    modulo 2.  Overlap means the data admits no group action on the
    surface and raises InvariantViolation.
    """
    taus = [g for g in involutions if not g.is_identity()]
    if len(taus) != 3 or len({g.key() for g in taus}) != 3:
        raise LatticeError("exactly three distinct involutions expected")
    acts = [fiber_action(g, model) for g in taus]
    for g, a in zip(taus, acts):
        if not a.is_base_trivial():
            raise LatticeError("involutions must act trivially on the base")
        if not (g @ g).is_identity():
            raise LatticeError("non-involution in the base-trivial subgroup")
    if (taus[0] @ taus[1]).key() not in {taus[2].key()}:
        raise LatticeError("the involutions do not form a Klein four group")
    sigmas = [set(a.sigma()) for a in acts]
    for i in range(3):
        for j in range(i + 1, 3):
            common = sigmas[i] & sigmas[j]
            if common:
                raise InvariantViolation(
                    f"fibers {sorted(common)} are preserved componentwise by"
                    f" two distinct involutions")
    if set().union(*sigmas) != set(model.labels()):
        raise InvariantViolation("fiber partition does not cover all fibers")
    n = model.n_blowups
    parity_ok = all(len(s) % 2 == (n - 1) % 2 for s in sigmas)
    out = tuple(tuple(sorted(s)) for s in sigmas)
    return out[0], out[1], out[2], parity_ok


# ---------------------------------------------------------------------------
# Section classes and the counting identities
# ---------------------------------------------------------------------------

def section_class(n: int, c: int, marks: Sequence[int]) -> CohClass:
    """E1 + c*F + sum of Et over t in marks (the section normal form)."""
    coords = [0] * (n + 1)
    coords[0] = c
    coords[1] = 1 - c
    for t in marks:
        if not 2 <= t <= n:
            raise LatticeError(f"mark {t} out of range 2..{n}")
        coords[t] += 1
    return CohClass(tuple(coords))


def section_classes(n: int, c_min: int = -2, c_max: int = 2):
    """All section normal forms with c in [c_min, c_max]."""
    labels = list(range(2, n + 1))
    for c in range(c_min, c_max + 1):
        for r in range(len(labels) + 1):
            for marks in itertools.combinations(labels, r):
                yield section_class(n, c, marks)


def parse_section_class(e: CohClass):
    """Recover (c, marks) from a section normal form, or fail."""
    c = e.coords[0]
    if e.coords[1] != 1 - c:
        raise LatticeError(f"{e} is not in section normal form")
    marks = []
    for t in range(2, e.n + 1):
        ct = e.coords[t]
        if ct not in (0, 1):
            raise LatticeError(f"{e} is not in section normal form")
        if ct:
            marks.append(t)
    return c, tuple(marks)


@dataclass(frozen=True)
class SectionIdentity:
    r: int
    m: int
    m_prime: int
    product: int
    holds: bool


def section_identity(e: CohClass, e_prime: CohClass,
                     model: ConicBundleModel) -> SectionIdentity:
    """Evaluate N - 1 = r + m + m' + 2 e.e' for two distinct sections.

    r counts the fibers where the two sections meet the same component,
    m and m' are the negated self-intersections.
    """
    n = model.n_blowups
    if e.n != n or e_prime.n != n:
        raise LatticeError("dimension mismatch")
    if e == e_prime:
        raise LatticeError("two distinct sections are required")
    _, marks = parse_section_class(e)
    _, marks_p = parse_section_class(e_prime)
    set_a, set_b = set(marks), set(marks_p)
    r = sum(1 for t in model.labels() if (t in set_a) == (t in set_b))
    m, m_p = -e.square(), -e_prime.square()
    prod = pairing(e, e_prime)
    return SectionIdentity(r, m, m_p, prod,
                           n - 1 == r + m + m_p + 2 * prod)


def max_swap_closed_section(n: int) -> int:
    """Largest self-intersection defect -m consistent with the swap counting.

    A section of self-intersection -m and its image under a component swap
    satisfy N - 1 = r + 2m + 2x with r, x >= 0.  When that forces
    (r, x) = (1, 0) the pair is disjoint and shares exactly one fiber;
    bringing in the swap image of the shared fiber adds the constraint
    r1 + r2 = N - 2 with both pair identities, which is then checked for
    integer feasibility.  The result never exceeds (N - 4) / 2.
    """
    if n % 2 or n < 6:
        raise LatticeError("even N >= 6 required")
    for m in range((n - 1) // 2, 0, -1):
        sols = [(r, x) for x in range(n) for r in range(n)
                if r + 2 * m + 2 * x == n - 1]
        if not sols:
            continue
        if sols == [(1, 0)]:
            triple = [
                (r1, x1, r2, x2)
                for r1 in range(n - 1) for x1 in range(n)
                if r1 + 2 * m + 2 * x1 == n - 1
                for r2 in [n - 2 - r1] if r2 >= 0
                for x2 in range(n)
                if r2 + 2 * m + 2 * x2 == n - 1
            ]
            if not triple:
                continue
        witness = section_class(n, 0, tuple(range(2, m + 1)))
        if witness.square() != -m:  # pragma: no cover
            raise InvariantViolation("section witness bookkeeping failed")
        return m
    raise InvariantViolation("no feasible section self-intersection")  # pragma: no cover


# ---------------------------------------------------------------------------
# Vertical decompositions
# ---------------------------------------------------------------------------

def vertical_decompositions(target: CohClass, model: ConicBundleModel) -> tuple:
    """Nonnegative integer combinations of {Ej, H-E1-Ej, H-E1} hitting target.

    Returns every solution as a sorted (class, multiplicity) tuple; the
    empty tuple of solutions means the class has no vertical representation.
    """
    n = model.n_blowups
    if target.n != n:
        raise LatticeError("dimension mismatch")
    t = target.coords
    s_total = t[0]
    if s_total < 0 or t[1] != -s_total:
        return ()
    f = model.fiber
    labels = list(model.labels())
    lower = [max(0, -t[j]) for j in labels]
    if sum(lower) > s_total:
        return ()
    out = []

    def rec(idx, budget, qs):
        if idx == len(labels):
            u = budget
            combo = []
            for j, q in zip(labels, qs):
                p = t[j] + q
                if p < 0:
                    return
                if p:
                    combo.append((_unit(n, j), p))
                if q:
                    combo.append((f - _unit(n, j), q))
            if u:
                combo.append((f, u))
            out.append(tuple(sorted(combo, key=lambda cm: cm[0].coords)))
            return
        j = labels[idx]
        for q in range(lower[idx], budget - sum(lower[idx + 1:]) + 1):
            rec(idx + 1, budget - q, qs + [q])

    rec(0, s_total, [])
    uniq = {tuple((cls.coords, mult) for cls, mult in dec): dec for dec in out}
    return tuple(uniq[k] for k in sorted(uniq))


def invariant_exceptional_n6() -> CohClass:
    """The class 2H - E2 - ... - E6 on six blowups, equal to -K - F.

    Exceptional, and invariant under any bundle-preserving group since both
    K and F are.
    """
    n = 6
    c = CohClass((2, 0, -1, -1, -1, -1, -1))
    k, f = canonical_class(n), fiber_class(n)
    if c.square() != -1 or pairing(k, c) != -1 or c != -1 * k - 1 * f:
        raise InvariantViolation("invariant exceptional class bookkeeping failed")
    return c


# ---------------------------------------------------------------------------
# Independence of Q from the adapted basis
# ---------------------------------------------------------------------------

def q_subgroup(group, model: ConicBundleModel) -> tuple:
    """Elements leaving each singular fiber invariant (pi = identity)."""
    return tuple(g for g in _iter_isometries(group)
                 if fiber_action(g, model).is_base_trivial())


def q_invariance_check(model: ConicBundleModel, model_prime: ConicBundleModel,
                       group) -> bool:
    """Q computed from either adapted labeling is the same subset.

    The primed model must label the same fibers: each primed sphere class
    lies in one of the standard pairs (this is enforced by the model
    constructor, which also pins F and K).
    """
    if model.n_blowups != model_prime.n_blowups:
        raise LatticeError("models live on different lattices")
    elements = _as_isometry_list(group)
    q1 = {g.key() for g in q_subgroup(elements, model)}
    q2 = {g.key() for g in q_subgroup(elements, model_prime)}
    return q1 == q2
