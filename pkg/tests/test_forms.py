import math
from fractions import Fraction

import pytest

from troplab import (
    FlatTorus,
    ModeMixError,
    NotPositiveDefiniteError,
    PreconditionError,
    QuadraticForm,
    covering_radius,
    covering_radius_sq,
    is_equivalent,
    is_homothetic,
    jacobi_decompose,
    join_path,
    lll_reduce,
    product,
    rescale_to_diameter_one,
    shortest_vector,
)

from helpers import (
    brute_equivalent,
    grid_gap,
    random_pd_form,
    random_unimodular,
    sampled_covering_radius,
    seeded,
)

F = Fraction
I2 = QuadraticForm([[1, 0], [0, 1]])
I3 = QuadraticForm([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


class TestQuadraticForm:
    def test_rejects_asymmetric(self):
        with pytest.raises(PreconditionError):
            QuadraticForm([[1, 1], [0, 1]])

    def test_rejects_indefinite_with_minor_index(self):
        with pytest.raises(NotPositiveDefiniteError) as info:
            QuadraticForm([[1, 2], [2, 1]])
        assert info.value.minor_index == 2

    def test_rejects_nonpositive_diagonal(self):
        with pytest.raises(NotPositiveDefiniteError) as info:
            QuadraticForm([[0]])
        assert info.value.minor_index == 1

    def test_mode_mixing_rejected(self):
        with pytest.raises(ModeMixError):
            QuadraticForm([[1.5]], "exact")

    def test_mode_inference(self):
        assert QuadraticForm([[1]]).mode == "exact"
        assert QuadraticForm([[1.0]]).mode == "float"

    def test_evaluate_and_det(self):
        f = QuadraticForm([[2, 1], [1, 2]])
        assert f.evaluate([1, -1]) == 2
        assert f.det() == 3

    def test_transform_is_congruence(self):
        f = QuadraticForm([[1, 0], [0, 1]])
        u = [[1, 1], [0, 1]]
        assert f.transform(u) == QuadraticForm([[1, 1], [1, 2]])

    def test_json_round_trip(self):
        f = QuadraticForm([[F(1, 3), F(1, 7)], [F(1, 7), F(2)]])
        doc = f.to_json_dict()
        assert QuadraticForm.from_json_dict(doc) == f


class TestJacobi:
    def test_recompose_identity_exact(self):
        rng = seeded(11)
        for _ in range(25):
            n = rng.randint(1, 4)
            f = random_pd_form(rng, n)
            dec = jacobi_decompose(f)
            assert dec.recompose() == f

    def test_unit_upper_triangular_factor(self):
        f = QuadraticForm([[2, 1], [1, 2]])
        dec = jacobi_decompose(f)
        assert dec.b[0][0] == 1 and dec.b[1][1] == 1
        assert dec.b[1][0] == 0
        assert all(d > 0 for d in dec.d)


class TestLLL:
    def test_witness_is_congruence(self):
        rng = seeded(12)
        for _ in range(20):
            f = random_pd_form(rng, rng.randint(1, 4))
            reduced, u = lll_reduce(f)
            assert f.transform(u) == reduced

    def test_first_vector_short(self):
        # a badly skewed basis of the square lattice comes back to norm 1
        f = QuadraticForm([[1, 7], [7, 50]])
        reduced, _ = lll_reduce(f)
        assert reduced.entries[0][0] == 1


class TestShortestVector:
    def test_known_minima(self):
        assert shortest_vector(I2)[1] == 1
        assert shortest_vector(QuadraticForm([[2, 1], [1, 2]]))[1] == 2
        v, norm = shortest_vector(QuadraticForm([[1, 7], [7, 50]]))
        assert norm == 1

    def test_vector_achieves_norm(self):
        rng = seeded(13)
        for _ in range(15):
            f = random_pd_form(rng, rng.randint(1, 3))
            v, norm = shortest_vector(f)
            assert f.evaluate(v) == norm
            assert any(c != 0 for c in v)


class TestCoveringRadius:
    # circle of circumference sqrt(q): half of it is the farthest point
    def test_circle(self):
        assert covering_radius_sq(QuadraticForm([[4]])) == 1
        assert covering_radius_sq(QuadraticForm([[9]])) == F(9, 4)

    def test_square_lattice(self):
        assert covering_radius_sq(I2) == F(1, 2)

    def test_rectangular(self):
        assert covering_radius_sq(QuadraticForm([[1, 0], [0, 2]])) == F(3, 4)

    def test_hexagonal(self):
        assert covering_radius_sq(QuadraticForm([[2, 1], [1, 2]])) == F(2, 3)

    def test_skewed_unimodular(self):
        f = QuadraticForm([[1, F(1, 2)], [F(1, 2), F(5, 4)]])
        assert covering_radius_sq(f) == F(25, 64)

    def test_equivalent_to_square(self):
        assert covering_radius_sq(QuadraticForm([[1, 1], [1, 2]])) == F(1, 2)

    def test_cubic_lattice_sampled_path(self):
        # three orthogonal blocks would be exact; force one 3-d block
        mu = covering_radius(I3, tol=1e-4, decompose=False)
        assert abs(mu - math.sqrt(3) / 2) <= 1e-3

    def test_cubic_lattice_decomposed_is_exact(self):
        assert covering_radius_sq(I3) == F(3, 4)

    def test_grid_oracle_sandwich(self):
        rng = seeded(14)
        forms = [I2.rows, [[1, 0], [0, 2]], [[2, 1], [1, 2]]]
        for _ in range(5):
            forms.append(random_pd_form(rng, 2).rows)
        for rows in forms:
            mu = covering_radius(QuadraticForm(rows), tol=1e-9)
            lower = sampled_covering_radius(rows, steps=24)
            assert lower <= mu + 1e-9
            assert mu <= lower + grid_gap(rows, 24)

    def test_unimodular_invariance(self):
        rng = seeded(15)
        for _ in range(20):
            n = rng.randint(1, 3)
            f = random_pd_form(rng, n)
            u = random_unimodular(rng, n)
            assert covering_radius_sq(f.transform(u)) == covering_radius_sq(f)

    def test_scaling_law_exact(self):
        rng = seeded(16)
        for _ in range(10):
            f = random_pd_form(rng, rng.randint(1, 2))
            c = F(rng.randint(1, 5), rng.randint(1, 5))
            assert covering_radius_sq(f.scale(c * c)) == c * c * covering_radius_sq(f)


class TestEquivalence:
    def test_known_witness(self):
        u = is_equivalent(I2, QuadraticForm([[1, 1], [1, 2]]))
        assert u is not None
        assert I2.transform(u) == QuadraticForm([[1, 1], [1, 2]])

    def test_certified_absence(self):
        assert is_equivalent(I2, QuadraticForm([[1, 0], [0, 2]])) is None
        assert is_equivalent(I2, QuadraticForm([[2, 1], [1, 2]])) is None

    def test_rank_mismatch_rejected(self):
        with pytest.raises(PreconditionError):
            is_equivalent(I2, QuadraticForm([[1]]))

    def test_float_mode_needs_tol(self):
        with pytest.raises(ModeMixError):
            is_equivalent(I2.to_float(), I2.to_float())
        assert is_equivalent(I2.to_float(), I2.to_float(), tol=1e-9) is not None

    def test_agrees_with_bounded_brute_force(self):
        rng = seeded(17)
        pairs = [
            (I2, QuadraticForm([[1, 1], [1, 2]])),
            (I2, QuadraticForm([[1, 0], [0, 2]])),
            (QuadraticForm([[1, 0], [0, 2]]), QuadraticForm([[1, 0], [0, 3]])),
            (QuadraticForm([[2, 1], [1, 2]]), QuadraticForm([[2, -1], [-1, 2]])),
        ]
        for _ in range(6):
            f = random_pd_form(rng, 2)
            u = random_unimodular(rng, 2, steps=2)
            pairs.append((f, f.transform(u)))
        for f1, f2 in pairs:
            mine = is_equivalent(f1, f2)
            brute = brute_equivalent(f1, f2, bound=3)
            assert (mine is None) == (brute is None)
            if mine is not None:
                assert f1.transform(mine) == f2

    def test_equivalence_relation_on_random_sample(self):
        # reflexive, symmetric, transitive with explicit witnesses
        rng = seeded(18)
        for _ in range(50):
            n = rng.randint(1, 3)
            f = random_pd_form(rng, n)
            u1 = random_unimodular(rng, n)
            u2 = random_unimodular(rng, n)
            g = f.transform(u1)
            h = g.transform(u2)
            assert is_equivalent(f, f) is not None
            w = is_equivalent(f, g)
            assert w is not None and f.transform(w) == g
            wb = is_equivalent(g, f)
            assert wb is not None and g.transform(wb) == f
            wt = is_equivalent(f, h)
            assert wt is not None and f.transform(wt) == h


class TestHomothety:
    def test_scale_recovered_exactly(self):
        got = is_homothetic(QuadraticForm([[2, 0], [0, 2]]), I2)
        assert got is not None
        c, u = got
        assert c == F(1, 2)
        assert QuadraticForm([[2, 0], [0, 2]]).scale(c).transform(u) == I2

    def test_no_scale_makes_them_match(self):
        assert is_homothetic(I2, QuadraticForm([[1, 0], [0, 2]])) is None

    def test_irrational_ratio_falls_back_to_float(self):
        # det ratio 2 is not a perfect square; scaled copies still match
        f = QuadraticForm([[1, 0], [0, 2]])
        got = is_homothetic(f, f.scale(F(3, 7)))
        assert got is not None
        assert got[0] == F(3, 7)
        loose = is_homothetic(I2, QuadraticForm([[1, 0], [0, 2]]), tol=1e-6)
        assert loose is None


class TestTorus:
    def test_diameter_is_covering_radius(self):
        t = FlatTorus(QuadraticForm([[4]]))
        assert t.diameter() == pytest.approx(1.0)

    def test_rescale_exact_and_idempotent(self):
        t = rescale_to_diameter_one(QuadraticForm([[1]]))
        assert t.gram == QuadraticForm([[4]])
        again = rescale_to_diameter_one(t.gram)
        assert again.gram == t.gram

    def test_rescale_scale_invariant_at_gram_level(self):
        rng = seeded(19)
        for _ in range(10):
            f = random_pd_form(rng, 2)
            c = F(rng.randint(1, 9), rng.randint(1, 9))
            a = rescale_to_diameter_one(f)
            b = rescale_to_diameter_one(f.scale(c))
            assert a.gram == b.gram

    def test_rescale_orthogonal_blocks_stay_exact(self):
        t = rescale_to_diameter_one(I3, tol=1e-6)
        assert t.gram == I3.scale(F(4, 3))

    def test_rescale_indecomposable_three_dim_goes_float(self):
        chain = QuadraticForm([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
        t = rescale_to_diameter_one(chain, tol=1e-6)
        assert t.gram.mode == "float"
        assert t.diameter(1e-6) == pytest.approx(1.0, abs=1e-5)

    def test_product_pythagorean_diameter(self):
        rng = seeded(20)
        tol = 1e-6
        for _ in range(12):
            t1 = FlatTorus(random_pd_form(rng, rng.randint(1, 2)))
            t2 = FlatTorus(random_pd_form(rng, rng.randint(1, 2)))
            d = product(t1, t2).diameter(tol)
            expect = math.hypot(t1.diameter(tol), t2.diameter(tol))
            assert abs(d - expect) <= 2 * tol

    def test_product_mode_mix_rejected(self):
        with pytest.raises(ModeMixError):
            product(FlatTorus(I2), FlatTorus(I2.to_float()))


class TestJoinPath:
    def test_endpoints(self):
        x = FlatTorus(QuadraticForm([[1, 0], [0, 2]]))
        start = join_path(x, 0)
        assert start.gram == rescale_to_diameter_one(x).gram
        end = join_path(x, 1)
        assert end.gram == QuadraticForm([[4]])

    def test_midpoint_gram(self):
        # blockdiag((1/4) X, [1/4]) for the unit square torus
        x = FlatTorus(I2)
        mid = join_path(x, F(1, 2))
        raw = QuadraticForm(
            [[F(1, 4), 0, 0], [0, F(1, 4), 0], [0, 0, F(1, 4)]]
        )
        assert mid.gram == rescale_to_diameter_one(raw).gram

    def test_parameter_range(self):
        with pytest.raises(PreconditionError):
            join_path(FlatTorus(I2), 2)

    def test_diameter_one_along_path(self):
        x = FlatTorus(QuadraticForm([[3, 1], [1, 2]]))
        for t in (F(1, 10), F(1, 3), F(9, 10)):
            assert join_path(x, t).diameter(1e-6) == pytest.approx(1.0, abs=1e-5)
