from fractions import Fraction

import pytest

from troplab import (
    FlatTorus,
    MonomialEntry,
    PreconditionError,
    QuadraticForm,
    SiegelPoint,
    SymbolicSiegelPath,
    classify_collapse_numeric,
    classify_collapse_symbolic,
    fixed_injrad_limit,
    fixed_volume_limit,
    is_homothetic,
    product_collapse_reduce,
    rescale_to_diameter_one,
)

F = Fraction


def mono(c, e=0):
    return MonomialEntry(F(c), F(e))


def diag_path(*entries):
    return SymbolicSiegelPath.diagonal([mono(c, e) for c, e in entries])


def sample_points(path, exponents_of_ten=range(1, 9)):
    return [path.point_at(F(10) ** k) for k in exponents_of_ten]


class TestMonomialEntry:
    def test_zero_normalizes_exponent(self):
        assert MonomialEntry(0, 5).exponent == 0

    def test_limit_values(self):
        assert mono(3, -2).limit() == 0
        assert mono(3, 0).limit() == 3
        with pytest.raises(PreconditionError):
            mono(3, 1).limit()

    def test_reparametrize_scales_exponent(self):
        assert mono(2, F(1, 2)).reparametrized(4) == mono(2, 2)

    def test_json_round_trip_both_conventions(self):
        m = mono(F(3, 2), F(-1, 3))
        doc = m.to_json_dict()
        assert MonomialEntry.from_json_dict(doc) == m
        flipped = MonomialEntry.from_json_dict(doc, t_convention=True)
        assert flipped.exponent == -m.exponent


class TestPathValidation:
    def test_diagonal_exponents_must_be_sorted(self):
        path = diag_path((1, 2), (1, 1))
        with pytest.raises(PreconditionError):
            classify_collapse_symbolic(path)

    def test_diverging_frame_rejected(self):
        x = [[mono(1, 1)]]
        b = [[mono(1, 0)]]
        d = [mono(1, 1)]
        path = SymbolicSiegelPath(x, b, d)
        with pytest.raises(PreconditionError):
            classify_collapse_symbolic(path)

    def test_nonpositive_diagonal_rejected(self):
        with pytest.raises(PreconditionError):
            SymbolicSiegelPath.diagonal([MonomialEntry(F(-1), F(1))])


class TestSymbolicCollapse:
    def test_single_growing_direction(self):
        res = classify_collapse_symbolic(diag_path((1, 1)))
        assert res.collapsed
        assert res.r == 0
        assert res.profile == (F(1),)
        assert res.limit.gram == QuadraticForm([[4]])

    def test_lagging_direction_collapses(self):
        res = classify_collapse_symbolic(diag_path((2, 0), (1, 1)))
        assert res.r == 1
        assert res.profile == (F(1),)
        assert res.limit.gram == QuadraticForm([[4]])

    def test_equal_rate_raises_dimension(self):
        res = classify_collapse_symbolic(diag_path((1, 1), (2, 1)))
        assert res.r == 0
        assert res.profile == (F(1, 2), F(1))
        expect = rescale_to_diameter_one(
            QuadraticForm([[F(1, 2), 0], [0, 1]])
        )
        assert res.limit.gram == expect.gram

    def test_bounded_path_keeps_full_torus(self):
        res = classify_collapse_symbolic(diag_path((1, 0), (2, 0)))
        assert not res.collapsed
        assert res.r == 0
        assert res.limit.gram.n == 4

    def test_reparametrization_invariance(self):
        for path in (
            diag_path((1, 1)),
            diag_path((2, 0), (1, 1)),
            diag_path((1, 1), (3, 2)),
        ):
            base = classify_collapse_symbolic(path)
            for k in (2, 3):
                again = classify_collapse_symbolic(path.reparametrized(k))
                assert again.r == base.r
                assert again.profile == base.profile
                assert again.limit.gram == base.limit.gram

    def test_abelian_block_does_not_change_class(self):
        small = classify_collapse_symbolic(diag_path((1, 0), (1, 1)))
        padded = classify_collapse_symbolic(diag_path((1, 0), (1, 0), (1, 1)))
        assert small.limit.gram == padded.limit.gram


class TestNumericCollapse:
    def test_needs_eight_samples(self):
        path = diag_path((1, 1))
        with pytest.raises(PreconditionError):
            classify_collapse_numeric(sample_points(path, range(1, 5)))

    def test_membership_enforced(self):
        bad = SiegelPoint([[3]], QuadraticForm([[1]]))
        with pytest.raises(PreconditionError):
            classify_collapse_numeric([bad] * 8)

    def test_agrees_with_symbolic(self):
        cases = [
            diag_path((1, 1)),
            diag_path((2, 0), (1, 1)),
            diag_path((1, 1), (2, 1)),
        ]
        for path in cases:
            sym = classify_collapse_symbolic(path)
            num = classify_collapse_numeric(sample_points(path))
            assert num.r == sym.r
            assert num.collapsed == sym.collapsed
            got = is_homothetic(
                num.limit.gram.to_float(), sym.limit.gram.to_float(), tol=1e-3
            )
            assert got is not None

    def test_bounded_samples_report_no_divergence(self):
        path = diag_path((1, 0), (2, 0))
        num = classify_collapse_numeric(sample_points(path))
        assert not num.collapsed
        assert num.report is not None
        assert not num.report.diverging

    def test_report_shape(self):
        path = diag_path((2, 0), (1, 1))
        num = classify_collapse_numeric(sample_points(path))
        rep = num.report
        assert rep.diverging
        assert rep.collapsed_directions == (1,)
        assert len(rep.d_top) == 8
        assert set(rep.ratios) == {1, 2}


class TestFixedVolume:
    def test_split_two_dim_path(self):
        space = fixed_volume_limit(diag_path((2, 0), (1, 1)))
        assert space.circle_circumferences == ()
        assert space.euclidean_rank == 1
        expect = QuadraticForm([[F(1, 2), 0], [0, 2]])
        assert space.torus_part.gram == expect

    def test_everything_diverges(self):
        space = fixed_volume_limit(diag_path((1, 1), (1, 2)))
        assert space.torus_part is None
        assert space.euclidean_rank == 2

    def test_nothing_diverges(self):
        space = fixed_volume_limit(diag_path((3, 0)))
        assert space.euclidean_rank == 0
        assert space.torus_part.gram.n == 2


class TestFixedInjrad:
    def test_genus_one_circle(self):
        space = fixed_injrad_limit([F(1)], 0)
        assert space.circle_circumferences == (F(1),)
        assert space.euclidean_rank == 1
        assert space.torus_part is None

    def test_circumference_ratios(self):
        space = fixed_injrad_limit([F(1), F(2), F(6)], 1)
        assert space.circle_circumferences == (F(3), F(1))
        assert space.euclidean_rank == 4

    def test_rank_range(self):
        with pytest.raises(PreconditionError):
            fixed_injrad_limit([F(1)], 1)

    def test_profile_ordering_enforced(self):
        with pytest.raises(PreconditionError):
            fixed_injrad_limit([F(8), F(1)], 0, u0=2)

    def test_only_split_frame_supported(self):
        with pytest.raises(PreconditionError) as info:
            fixed_injrad_limit([F(1), F(2)], 0, x=[[0, 1], [1, 0]])
        assert info.value.invariant == "simplified-case"

    def test_trivial_frame_arguments_accepted(self):
        space = fixed_injrad_limit(
            [F(1), F(2)], 0, x=[[0, 0], [0, 0]], b=[[1, 0], [0, 1]]
        )
        assert space.circle_circumferences == (F(2), F(1))


class TestProductCollapse:
    def test_dominant_block_wins(self):
        a = FlatTorus(QuadraticForm([[1, 0], [0, 3]]))
        b = FlatTorus(QuadraticForm([[2, 1], [1, 2]]))
        out = product_collapse_reduce([(a, F(0)), (b, F(1))])
        assert out.gram == rescale_to_diameter_one(b.gram).gram

    def test_tie_is_rejected(self):
        a = FlatTorus(QuadraticForm([[1]]))
        b = FlatTorus(QuadraticForm([[2]]))
        with pytest.raises(PreconditionError):
            product_collapse_reduce([(a, F(1)), (b, F(1))])

    def test_empty_rejected(self):
        with pytest.raises(PreconditionError):
            product_collapse_reduce([])
