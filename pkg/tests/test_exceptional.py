import random

import pytest

from gsurf.errors import LatticeError, LimitExceeded
from gsurf.exceptional import (
    MONOTONE,
    OTHER,
    SMALL_FIBER,
    cremona_isometry,
    cremona_reflect,
    enumerate_exceptional,
    h_ij,
    h_ijk,
    is_exceptional,
    positive_area_classes,
    reduce_exceptional,
    reduce_symplectic,
    structure_test,
)
from gsurf.lattice import CohClass, SymplecticClass, canonical_class, pairing

import oracles

FROZEN_COUNTS = {2: 3, 3: 6, 4: 10, 5: 16, 6: 27, 7: 56, 8: 240}


@pytest.mark.parametrize("n", range(2, 9))
def test_counts_match_oracle(n):
    got = {c.coords for c in enumerate_exceptional(n)}
    want = set(oracles.exc_classes_oracle(n))
    assert got == want
    assert len(got) == FROZEN_COUNTS[n]


def test_small_sets_explicit():
    two = {c.coords for c in enumerate_exceptional(2)}
    assert two == {(0, 1, 0), (0, 0, 1), (1, -1, -1)}
    three = {c.coords for c in enumerate_exceptional(3)}
    assert three == {(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
                     (1, -1, -1, 0), (1, -1, 0, -1), (1, 0, -1, -1)}


def test_defining_equations():
    for n in range(2, 9):
        k = canonical_class(n)
        for e in enumerate_exceptional(n):
            assert e.square() == -1
            assert pairing(k, e) == -1


def test_large_n_needs_degree_cap():
    with pytest.raises(LatticeError):
        enumerate_exceptional(9)
    capped = enumerate_exceptional(9, max_degree=2)
    assert not capped.complete
    assert all(e.degree <= 2 for e in capped)
    # degree cap below the full range also flags incompleteness for small n
    assert not enumerate_exceptional(8, max_degree=3).complete


def test_positive_degree_coefficient_shape():
    """b >= 0 and b_i <= a < b_i + b_j + b_k for the three largest."""
    for n in range(3, 9):
        for e in enumerate_exceptional(n):
            a = e.degree
            if a <= 0:
                continue
            bs = sorted(e.b_vector(), reverse=True)
            assert all(b >= 0 for b in bs)
            assert bs[0] <= a < bs[0] + bs[1] + bs[2]


def test_fiber_pairs_nonnegative():
    """F.e >= 0 for F = H - E1 over the whole enumeration."""
    for n in range(2, 9):
        coords = [0] * (n + 1)
        coords[0], coords[1] = 1, -1
        f = CohClass(tuple(coords))
        assert all(pairing(f, e) >= 0 for e in enumerate_exceptional(n))


class TestCremona:
    def test_basic_images(self):
        e1 = CohClass((0, 1, 0, 0))
        assert cremona_reflect(e1, (1, 2, 3)) == CohClass((1, 0, -1, -1))
        k = canonical_class(6)
        assert cremona_reflect(k, (2, 4, 6)) == k

    def test_involutive_on_random_classes(self):
        rng = random.Random(3)
        for _ in range(40):
            n = rng.randint(3, 8)
            x = CohClass(tuple(rng.randint(-4, 4) for _ in range(n + 1)))
            ijk = tuple(sorted(rng.sample(range(1, n + 1), 3)))
            assert cremona_reflect(cremona_reflect(x, ijk), ijk) == x

    def test_matrix_form_is_isometry(self):
        iso = cremona_isometry(5, (1, 2, 3))
        assert (iso @ iso).is_identity()
        assert iso.fixes(canonical_class(5))

    def test_permutes_enumeration(self):
        for n in (4, 6):
            classes = set(enumerate_exceptional(n))
            image = {cremona_reflect(e, (1, 3, 4)) for e in classes}
            assert image == classes

    def test_index_validation(self):
        with pytest.raises(LatticeError):
            h_ijk(5, 3, 3, 4)
        with pytest.raises(LatticeError):
            h_ijk(5, 0, 1, 2)
        with pytest.raises(LatticeError):
            h_ij(5, 2, 2)


class TestReduceExceptional:
    def test_one_step(self):
        trace = reduce_exceptional(h_ij(3, 1, 2))
        assert trace.final_index == 3
        assert len(trace.steps) == 1
        assert trace.steps[0][0] == (1, 2, 3)

    def test_degree_zero_identity_trace(self):
        e5 = CohClass((0, 0, 0, 0, 0, 1))
        trace = reduce_exceptional(e5)
        assert trace.steps == ()
        assert trace.final_index == 5

    def test_high_degree_class(self):
        e = CohClass((6, -3, -2, -2, -2, -2, -2, -2, -2))
        assert is_exceptional(e)
        trace = reduce_exceptional(e)
        degs = trace.degrees()
        assert all(d2 < d1 for d1, d2 in zip(degs, degs[1:]))
        assert len(trace.steps) <= e.degree
        assert trace.final.coords.count(1) == 1

    def test_rejects_non_exceptional(self):
        with pytest.raises(LatticeError):
            reduce_exceptional(CohClass((1, 0, 0, 0)))

    def test_tie_breaking_smallest_indices(self):
        # all b equal: the first three indices must be chosen
        e = CohClass((2, -1, -1, -1, -1, -1))
        assert is_exceptional(e)
        trace = reduce_exceptional(e)
        assert trace.steps[0][0] == (1, 2, 3)

    def test_areas_non_increasing_for_reduced_form(self):
        w = SymplecticClass((4, 2, 1, 1, 1, 1))
        for e in enumerate_exceptional(5):
            trace = reduce_exceptional(e)
            for _, before, after in trace.steps:
                assert w.area(after) <= w.area(before)


class TestReduceSymplectic:
    def test_already_reduced(self):
        w = SymplecticClass((3, 1, 1, 1))
        red, iso = reduce_symplectic(w)
        assert red == w
        assert iso.is_identity()

    def test_descent_to_degenerate_class(self):
        w = SymplecticClass((3, 2, 1, 1))
        red, iso = reduce_symplectic(w)
        assert red == SymplecticClass((2, 1, 0, 0))
        assert iso.apply(w) == red
        assert iso.fixes(canonical_class(3))
        from gsurf.lattice import is_reduced_class
        assert not is_reduced_class(red)  # zero areas flag non-symplectic

    def test_descent_n5(self):
        w = SymplecticClass((4, 2, 1, 1, 1, 1))
        red, iso = reduce_symplectic(w)
        assert all(lam > 0 for lam in red.lambdas)
        assert iso.apply(w) == red

    def test_sorting_is_recorded_in_isometry(self):
        w = SymplecticClass((4, 1, 1, 1, 1, 2))
        red, iso = reduce_symplectic(w)
        assert red == SymplecticClass((4, 2, 1, 1, 1, 1))
        assert iso.apply(w) == red

    def test_iteration_cap(self):
        with pytest.raises(LimitExceeded):
            reduce_symplectic(SymplecticClass((3, 2, 1, 1)), max_iters=1)

    def test_requires_positive_square(self):
        with pytest.raises(LatticeError):
            reduce_symplectic(SymplecticClass((1, 1, 1, 1)))


class TestStructure:
    def test_monotone(self):
        kind, cands = structure_test(SymplecticClass((3, 1, 1, 1)))
        assert kind == MONOTONE and cands is None

    def test_small_fiber_with_candidates(self):
        kind, cands = structure_test(SymplecticClass((4, 2, 1, 1, 1, 1)))
        assert kind == SMALL_FIBER
        want = set()
        for j in range(2, 6):
            e = [0] * 6
            e[j] = 1
            want.add(CohClass(tuple(e)))
            want.add(h_ij(5, 1, j))
        assert set(cands) == want
        w = SymplecticClass((4, 2, 1, 1, 1, 1))
        areas = {w.area(c) for c in cands}
        assert areas == {1}  # candidates all have the minimal area

    def test_other(self):
        kind, cands = structure_test(SymplecticClass((5, 2, 2, 1, 1, 1)))
        assert kind == OTHER and cands is None

    def test_rejects_unreduced(self):
        with pytest.raises(LatticeError):
            structure_test(SymplecticClass((1, 1, 1, 1)))


class TestReducedByAreas:
    """Cross-check of the two reducedness routes on in-cone classes.

    Area-minimality implies the coefficient inequalities but not the other
    way around; the counterexample below pins the strictness.
    """

    def test_area_reduced_implies_coefficient_reduced(self):
        from gsurf.cone import FULL, is_in_cone
        from gsurf.exceptional import is_reduced_by_minimal_areas
        from gsurf.lattice import is_reduced_class
        from fractions import Fraction
        rng = random.Random(17)
        checked = area_reduced = 0
        while checked < 200:
            n = rng.choice((3, 4, 5, 6))
            lams = [Fraction(rng.randint(4, 14), 4) for _ in range(n)]
            if rng.random() < 0.7:
                lams.sort(reverse=True)
            top = sorted(lams, reverse=True)
            nu = sum(top[:2]) + Fraction(rng.randint(0, 10), 3)
            w = SymplecticClass((nu, *lams))
            if is_in_cone(w) != FULL:
                continue
            checked += 1
            if is_reduced_by_minimal_areas(w):
                area_reduced += 1
                assert is_reduced_class(w), w
            if not is_reduced_class(w):
                assert not is_reduced_by_minimal_areas(w), w
        assert area_reduced > 10  # the sweep hits both outcomes

    def test_coefficient_reduced_is_strictly_weaker(self):
        from gsurf.cone import FULL, is_in_cone
        from gsurf.exceptional import is_reduced_by_minimal_areas
        from gsurf.lattice import is_reduced_class
        from fractions import Fraction
        w = SymplecticClass((Fraction(26, 3), Fraction(13, 4), Fraction(11, 4),
                             Fraction(5, 2), Fraction(9, 4), Fraction(5, 4)))
        assert is_in_cone(w) == FULL
        assert is_reduced_class(w)
        # E2 is beaten by H - E1 - E2: 26/3 - 6 < 11/4
        assert not is_reduced_by_minimal_areas(w)

    def test_descent_normal_forms_pass_both(self):
        from gsurf.exceptional import is_reduced_by_minimal_areas
        from gsurf.lattice import is_reduced_class
        for n in (3, 5):
            for b in (0, 1, 2):
                w = SymplecticClass((3 + b, 1 + b) + (1,) * (n - 1))
                assert is_reduced_class(w)
                assert is_reduced_by_minimal_areas(w)
        assert not is_reduced_by_minimal_areas(SymplecticClass((3, 1, 2, 1)))

    def test_needs_complete_enumeration(self):
        from gsurf.exceptional import is_reduced_by_minimal_areas
        with pytest.raises(LatticeError):
            is_reduced_by_minimal_areas(SymplecticClass((4,) + (1,) * 9))


def test_positive_area_filter():
    w = SymplecticClass((3, 2, 1, 1))
    kept = positive_area_classes(w, enumerate_exceptional(3))
    # H - E1 - E2 and H - E1 - E3 both have zero area for this class
    assert h_ij(3, 1, 2) not in kept
    assert h_ij(3, 1, 3) not in kept
    assert len(kept) == 4
