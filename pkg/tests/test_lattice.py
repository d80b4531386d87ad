import random
from fractions import Fraction

import pytest

from gsurf.errors import LatticeError
from gsurf.lattice import (
    CohClass,
    Isometry,
    PicardLattice,
    SymplecticClass,
    canonical_class,
    coh_from_json,
    coords_to_json,
    is_characteristic,
    is_monotone,
    is_reduced_class,
    monotone_scalar,
    pairing,
    permutation_isometry,
    rational_from_json,
    rational_to_json,
    symplectic_from_json,
)

L3 = PicardLattice(3)
H, E1, E2, E3 = L3.basis()


def test_pairing_basis_values():
    assert pairing(H, H) == 1
    assert pairing(E1, E2) == 0
    assert pairing(E1, H - E1 - E2) == 1
    assert pairing(E1, E1) == -1


def test_gram_matrix_is_standard():
    for n in (1, 2, 5, 9):
        gram = PicardLattice(n).gram()
        for i, row in enumerate(gram):
            for j, v in enumerate(row):
                want = 0 if i != j else (1 if i == 0 else -1)
                assert v == want


def test_pairing_symmetric_bilinear():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 6)
        x, y, z = (tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                         for _ in range(n + 1)) for _ in range(3))
        a = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        assert pairing(x, y) == pairing(y, x)
        lhs = pairing(tuple(a * xi + yi for xi, yi in zip(x, y)), z)
        assert lhs == a * pairing(x, z) + pairing(y, z)


def test_pairing_dimension_mismatch():
    with pytest.raises(LatticeError):
        pairing(H, canonical_class(5))


def test_canonical_class_square():
    assert canonical_class(5).square() == 4
    assert canonical_class(8).square() == 1
    assert canonical_class(9).square() == 0
    assert canonical_class(3).coords == (-3, 1, 1, 1)


def test_characteristic_elements():
    assert is_characteristic(CohClass((1, -1, -1)))
    assert not is_characteristic(CohClass((0, 1, 0)))
    # cross-check the parity definition against all basis vectors
    for cls in (CohClass((3, -1, -1, -1, -1, -1)), CohClass((2, -1, 0, 1)),
                CohClass((1, -1, -1))):
        lat = PicardLattice(cls.n)
        by_def = all(pairing(cls, x) % 2 == pairing(x, x) % 2
                     for x in lat.basis())
        assert is_characteristic(cls) == by_def


def test_reduced_class():
    for b in (0, 1, 7):
        assert is_reduced_class(SymplecticClass((3 + b, 1 + b, 1, 1)))
    assert is_reduced_class(SymplecticClass((3, 1, 1, 1)))
    assert not is_reduced_class(SymplecticClass((1, 1, 1, 1)))
    assert not is_reduced_class(SymplecticClass((3, 1, 2, 1)))  # unsorted
    assert not is_reduced_class(SymplecticClass((2, 1, 0, 0)))  # zero area
    with pytest.raises(LatticeError):
        is_reduced_class(SymplecticClass((3, 1, 1)))


def test_reduced_implies_positive_areas():
    w = SymplecticClass((5, 2, 2, 1, 1, 1))
    n = w.n
    assert is_reduced_class(w)
    for i in range(1, n + 1):
        e = [0] * (n + 1)
        e[i] = 1
        assert w.area(CohClass(tuple(e))) > 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            e = [0] * (n + 1)
            e[0], e[i], e[j] = 1, -1, -1
            assert w.area(CohClass(tuple(e))) >= 0


def test_monotone():
    assert is_monotone(SymplecticClass((3, 1, 1, 1)))
    assert monotone_scalar(SymplecticClass((3, 1, 1, 1))) == -1
    third = Fraction(1, 3)
    assert monotone_scalar(SymplecticClass((1, third, third, third))) == \
        Fraction(-1, 3)
    assert not is_monotone(SymplecticClass((4, 2, 1, 1)))
    # K itself is a positive multiple, not monotone
    assert not is_monotone(SymplecticClass.from_raw((-3, 1, 1, 1)))


def test_symplectic_storage_convention():
    w = SymplecticClass((3, 1, 1, 1))
    assert w.raw() == (3, -1, -1, -1)
    assert w.nu == 3 and w.lambdas == (1, 1, 1)
    assert w.area(E1) == 1
    assert w.square() == 6
    assert SymplecticClass.from_raw((3, -1, -1, -1)) == w


def test_coh_accessors():
    e = CohClass((2, 0, -1, -1))
    assert e.degree == 2
    assert e.b(2) == 1 and e.b(1) == 0
    assert e.b_vector() == (0, 1, 1)
    assert 2 * e == CohClass((4, 0, -2, -2))
    assert (-e).coords == (-2, 0, 1, 1)


def test_rejects_inexact_coordinates():
    with pytest.raises(LatticeError):
        CohClass((1.0, 0, 0))
    with pytest.raises(LatticeError):
        SymplecticClass((1.5, 1, 1))


class TestIsometry:
    def test_identity_and_apply(self):
        ident = Isometry.identity(3)
        assert ident.is_identity()
        assert ident.apply(E1) == E1
        w = SymplecticClass((3, 1, 1, 1))
        assert ident.apply(w) == w

    def test_rejects_non_isometry_with_witness(self):
        bad = [[2, 0, 0], [0, 1, 0], [0, 0, 1]]
        with pytest.raises(LatticeError, match="does not preserve"):
            Isometry(tuple(tuple(r) for r in bad))

    def test_inverse_and_compose(self):
        s = permutation_isometry(3, {1: 2, 2: 3, 3: 1})
        assert (s @ s.inverse()).is_identity()
        assert s.apply(E1) == E2
        assert s.order() == 3

    def test_permutation_isometry_fixes_canonical(self):
        s = permutation_isometry(4, {1: 2, 2: 1})
        assert s.fixes(canonical_class(4))
        with pytest.raises(LatticeError):
            permutation_isometry(3, {1: 2})


def test_json_round_trip():
    e = CohClass((2, 0, -1, -1))
    assert coords_to_json(e) == [2, 0, -1, -1]
    assert coh_from_json(coords_to_json(e)) == e
    w = SymplecticClass((Fraction(7, 2), 1, 1, Fraction(1, 3)))
    enc = coords_to_json(w)
    assert enc == ["7/2", -1, -1, "-1/3"]
    assert symplectic_from_json(enc) == w
    assert rational_to_json(Fraction(4, 2)) == 2
    assert rational_from_json("3/4") == Fraction(3, 4)
    with pytest.raises(LatticeError):
        rational_from_json("x")
    with pytest.raises(LatticeError):
        coh_from_json([1, "1/2"])
