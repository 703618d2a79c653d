import math
from fractions import Fraction as F

import pytest

from lienorm.defsets import (
    BoundaryFn,
    CallableBoundary,
    Compose,
    DefSet,
    DegenerateSetError,
    Linear,
    Min,
    Power,
    UnsupportedShapeError,
    boundary_from_dict,
    contains,
    convolve,
    defset_of_exponential,
    defset_of_product,
    downset_hull,
    is_idempotent_on_grid,
    tangent_slope_at_origin,
)


def grid(n=40, S=1.0):
    return [((i + 1) * S / n, (j + 1) * S / n) for i in range(n) for j in range(n)]


class TestContains:
    def test_cone(self):
        A = DefSet.cone(2)
        assert A.contains(1, 0.4)
        assert not A.contains(1, 0.6)

    def test_square_map_set(self):
        A = DefSet.square_map()
        assert A.contains(0.25, 0.4)
        assert not A.contains(0.25, 0.55)

    def test_translation_set(self):
        A = DefSet.translation(0.3)
        assert not A.contains(1, 0.8)
        assert A.contains(1, 0.65)

    def test_closed_diagonal_includes_boundary(self):
        D = DefSet.closed_subdiagonal()
        assert D.contains(0.5, 0.5)
        assert not D.contains(0.4, 0.5)

    def test_open_diagonal_excludes_boundary(self):
        assert not DefSet.open_diagonal().contains(0.5, 0.5)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            DefSet.cone(2).contains(1.5, 0.1)
        with pytest.raises(ValueError):
            DefSet.cone(2).contains(0.5, 0)


class TestConvolve:
    def test_cones_multiply(self):
        got = convolve(DefSet.cone(F(3, 2)), DefSet.cone(F(4, 3)))
        assert got.boundary == Linear(F(1, 2), 0)

    def test_closed_diagonal_is_unit(self):
        A = DefSet.cone(3)
        assert convolve(A, DefSet.closed_subdiagonal()).boundary == A.boundary
        assert convolve(DefSet.closed_subdiagonal(), A).boundary == A.boundary

    def test_square_roots_compose(self):
        got = convolve(DefSet.square_map(), DefSet.square_map())
        assert got.boundary == Power(1, F(1, 4))

    def test_matches_pointwise_semantics(self):
        # (t, r) in A*B iff exists s: (t,s) in A and (s,r) in B
        A = DefSet(Linear(F(1, 2), 0))
        B = DefSet(Power(1, F(1, 2)))
        C = convolve(A, B)
        for t, r in grid(25):
            if abs(r - C.boundary(t)) < 1e-9:
                continue  # float ties exactly on the boundary are moot
            direct = C.contains(t, r)
            witness = any(
                A.contains(t, s) and B.contains(s, r)
                for s in [k / 4000 for k in range(1, 4000)]
            )
            assert direct == witness, (t, r)

    def test_associativity_on_grid(self):
        A = DefSet(Linear(F(2, 3), 0))
        B = DefSet(Power(1, F(1, 2)))
        C = DefSet(Linear(1, F(-1, 10)))
        left = convolve(convolve(A, B), C)
        right = convolve(A, convolve(B, C))
        for t, s in grid(30):
            assert left.contains(t, s) == right.contains(t, s)

    def test_pseudo_inverse_scaling_pair(self):
        # boundaries t/alpha and alpha t convolve to the identity boundary
        alpha = F(5, 2)
        A = DefSet(Linear(1 / alpha, 0))
        B = DefSet(Linear(alpha, 0))
        assert convolve(A, B).boundary == Linear(F(1), 0)
        assert convolve(B, A).boundary == Linear(F(1), 0)


class TestIdempotents:
    def test_open_diagonal(self):
        assert is_idempotent_on_grid(DefSet.open_diagonal(), grid())

    def test_closed_diagonal(self):
        assert is_idempotent_on_grid(DefSet.closed_subdiagonal(), grid())

    def test_cone_is_not(self):
        assert not is_idempotent_on_grid(DefSet.cone(2), grid())

    def test_boundary_fixed_points_are_idempotent(self):
        # f(f(t)) = f(t) on the grid makes the upset-style set idempotent
        half = DefSet(Min(Linear(1, 0), CallableBoundary(lambda t: min(t, 0.5))))
        pts = grid(20)
        f = half.boundary
        assert all(abs(f(f(t)) - f(t)) < 1e-15 for t, _ in pts)
        assert is_idempotent_on_grid(half, pts)


class TestExponentialSets:
    def test_translation_norm(self):
        lam = 0.1
        A = defset_of_exponential(math.e * lam)
        assert A.boundary == Linear(1, -math.e * lam)
        assert A.contains(0.9, 0.5)
        assert not A.contains(0.9, 0.7)

    def test_linear_slope_norm(self):
        A = defset_of_exponential((0, F(1, 4)))
        assert A.boundary == Linear(F(3, 4), 0)

    def test_zero_norm_gives_diagonal(self):
        A = defset_of_exponential(0)
        assert A.boundary == Linear(1, 0)

    def test_callable_norm(self):
        A = defset_of_exponential(lambda t: 0.5 * t * t)
        assert A.contains(0.5, 0.3)
        assert not A.contains(1.0, 0.6)

    def test_slope_one_degenerate(self):
        with pytest.raises(DegenerateSetError):
            defset_of_exponential((0, 1))


class TestProductSets:
    def test_single_factor(self):
        assert defset_of_product([F(1, 4)]).boundary == Linear(F(3, 4), 0)

    def test_two_halves(self):
        assert defset_of_product([F(1, 2), F(1, 2)]).boundary == Linear(F(1, 4), 0)

    def test_empty_is_diagonal(self):
        assert defset_of_product([]).boundary == Linear(F(1), 0)

    def test_factor_at_one_rejected(self):
        with pytest.raises(DegenerateSetError):
            defset_of_product([F(1, 2), 1])


class TestDownsetHull:
    def test_cone_unchanged(self):
        A = DefSet.cone(F(7, 3))
        assert downset_hull(A).boundary == A.boundary

    def test_diagonal_unchanged(self):
        assert downset_hull(DefSet.open_diagonal()).boundary == Linear(1, 0)

    def test_out_of_grammar_rejected(self):
        with pytest.raises(UnsupportedShapeError):
            downset_hull(("point", (0.5, 0.25)))
        with pytest.raises(UnsupportedShapeError):
            contains({"pts": [(1, 1)]}, 0.5, 0.25)


class TestTangentSlope:
    def test_linear_boundaries(self):
        got = convolve(DefSet(Linear(0.5, 0)), DefSet(Linear(0.75, 0)))
        assert tangent_slope_at_origin(got) == pytest.approx(0.375, abs=1e-9)

    def test_curved_boundaries(self):
        alpha, beta = 0.6, 0.7
        A = DefSet(CallableBoundary(lambda t: alpha * t + 0.8 * t * t))
        B = DefSet(CallableBoundary(lambda t: beta * t + 0.3 * t * t))
        got = tangent_slope_at_origin(convolve(A, B))
        assert got == pytest.approx(alpha * beta, abs=1e-6)


class TestSerialization:
    def test_linear_round_trip(self):
        A = DefSet(Linear(F(1, 3), F(-1, 8)))
        back = DefSet.from_dict(A.to_dict())
        assert back.boundary == A.boundary

    def test_composed_round_trip(self):
        A = DefSet(Compose(Power(1, F(1, 2)), Linear(2, 0)))
        back = DefSet.from_dict(A.to_dict())
        for t in (0.1, 0.4, 0.9):
            assert back.boundary(t) == A.boundary(t)

    def test_closed_diagonal_round_trip(self):
        D = DefSet.closed_subdiagonal()
        assert DefSet.from_dict(D.to_dict()).closed_diagonal

    def test_callable_does_not_serialize(self):
        with pytest.raises(UnsupportedShapeError):
            DefSet(CallableBoundary(lambda t: t)).to_dict()

    def test_unknown_op_rejected(self):
        with pytest.raises(UnsupportedShapeError):
            boundary_from_dict({"op": "spiral"})
