from fractions import Fraction
import random

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from pybilin.bilinearization import (
    Augmentation,
    base_id,
    bilinear_differential,
    bilinearize,
    build_cylinder,
    candidate_grid,
    capping_weight,
    check_cylinder_inclusions,
    cylinder_context,
    project,
    search_augmentations_bounded,
    stab,
    validate_augmentation,
)
from pybilin.errors import AugmentationError, ConsistencyError, SearchLimitError
from pybilin.graded_algebra import (
    CdgaPresentation,
    Generator,
    GradingSpec,
    Polynomial,
    apply_differential,
)
from pybilin.random_models import random_cylinder_presentation, random_instance

Z = GradingSpec.integer()
SEEDS = st.integers(min_value=0, max_value=10 ** 6)
PLUS = Augmentation({'x': 1}, name='a')
MINUS = Augmentation({'x': -1}, name='b')


def intro(constant=-1):
    ctx = CdgaPresentation(Z, [Generator('x', 0), Generator('y', 1)])
    return ctx.with_differential({
        'y': Polynomial.from_word(['x', 'x'], ctx) + Polynomial.constant(constant),
    })


def closed_counterexample():
    # u appears in a product but is not closed
    ctx = CdgaPresentation(Z, [Generator('s', 0), Generator('u', -1)])
    return ctx.with_differential({'s': Polynomial.from_word(['u', 's'], ctx)})


def linear_pair():
    ctx = CdgaPresentation(Z, [Generator('x', 0), Generator('v', -1)])
    return ctx.with_differential({'x': Polynomial.generator('v')})


class TestDerivedIds:
    def test_base_id(self):
        assert base_id('x.h') == ('x', '.h')
        assert base_id('x1.l') == ('x1', '.l')

    def test_not_derived(self):
        with pytest.raises(ValueError) as excinfo:
            base_id('x')
        assert 'not a derived' in str(excinfo.value)


class TestAugmentation:
    def test_zero_values_are_dropped(self):
        assert Augmentation({'x': 0, 'y': '1/2'}).values == {'y': Fraction(1, 2)}

    def test_missing_ids_map_to_zero(self):
        assert PLUS('y') == 0
        assert PLUS('x') == 1

    def test_equality_ignores_name(self):
        assert Augmentation({'x': 1}) == PLUS
        assert len({PLUS, Augmentation({'x': 1})}) == 1

    def test_valid(self):
        assert validate_augmentation(intro(), PLUS).valid
        assert validate_augmentation(intro(), MINUS).valid

    def test_differential_not_killed(self):
        report = validate_augmentation(intro(), Augmentation({'x': 2}))
        assert report.items('differential') == ['y']
        assert report.violations[0].detail == 'eps(d y) = 3'

    def test_nonzero_degree(self):
        report = validate_augmentation(intro(), Augmentation({'y': 1}))
        assert report.items('degree') == ['y']

    def test_unknown_generator(self):
        report = validate_augmentation(intro(), Augmentation({'q': 1}))
        assert report.items() == ['q']


class TestSearch:
    def test_candidate_grid(self):
        assert candidate_grid(1, 2) == [
            Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1),
        ]

    def test_finds_both_roots(self):
        found = search_augmentations_bounded(intro(), [-1, 0, 1])
        assert found == [MINUS, PLUS]

    def test_no_augmentation(self):
        assert search_augmentations_bounded(intro(constant=1), candidate_grid(4, 4)) == []

    def test_cap(self):
        with pytest.raises(SearchLimitError) as excinfo:
            search_augmentations_bounded(intro(), range(10), cap=5)
        assert 'exceed the search cap 5' in str(excinfo.value)


class TestStab:
    def test_generator(self):
        A = intro()
        assert stab(Polynomial.generator('y'), A) == Polynomial.generator('y.h')

    def test_constant(self):
        assert not stab(Polynomial.one(), intro())

    def test_square(self):
        A = intro()
        cyl = cylinder_context(A)
        expected = Polynomial.from_word(['x.h', 'x.l'], cyl) + \
            Polynomial.from_word(['x.h', 'x.r'], cyl)
        assert stab(Polynomial.from_word(['x', 'x'], A), A, cyl) == expected

    @settings(max_examples=15, deadline=None)
    @given(SEEDS)
    def test_grouped_enumeration_matches_literal(self, seed):
        A = random_cylinder_presentation(random.Random(seed), max_generators=4)
        cyl = cylinder_context(A)
        for gid in A.ids:
            assert stab(A.d(gid), A, cyl, literal_bound=0) == stab(A.d(gid), A, cyl)


class TestCylinder:
    def test_intro_squares_to_zero(self):
        cylinder = build_cylinder(intro())
        for gid in cylinder.algebra.ids:
            assert not apply_differential(cylinder.d(gid), cylinder.algebra)

    def test_hat_differential(self):
        cylinder = build_cylinder(intro())
        cyl = cylinder.algebra
        expected = Polynomial.from_word(['x.h', 'x.l'], cyl) \
            + Polynomial.from_word(['x.h', 'x.r'], cyl) \
            + Polynomial.generator('y.l') - Polynomial.generator('y.r')
        assert cylinder.d('y.h') == expected
        assert cylinder.d('x.h') == Polynomial.generator('x.l') - Polynomial.generator('x.r')

    def test_inclusions(self):
        assert check_cylinder_inclusions(build_cylinder(intro())) == {'l': True, 'r': True}

    def test_outside_closed_factor_class(self):
        with pytest.raises(ConsistencyError) as excinfo:
            build_cylinder(closed_counterexample())
        assert 'cylinder differential fails' in str(excinfo.value)

    @settings(max_examples=30, deadline=None)
    @given(SEEDS, st.booleans())
    def test_random_cylinders(self, seed, cyclic):
        cylinder = build_cylinder(random_cylinder_presentation(random.Random(seed), cyclic=cyclic))
        assert check_cylinder_inclusions(cylinder) == {'l': True, 'r': True}


class TestCappingWeight:
    def test_empty(self):
        assert capping_weight([], PLUS, MINUS) == 1

    def test_opposite_values_cancel(self):
        assert capping_weight(['x'], PLUS, MINUS) == 0

    def test_one_sided(self):
        assert capping_weight(['x', 'x'], PLUS, Augmentation()) == Fraction(1, 3)

    def test_equal_sides(self):
        assert capping_weight(['x', 'x'], PLUS, PLUS) == 1


class TestBilinearDifferential:
    def test_intro_opposite(self):
        differential = bilinear_differential(intro(), PLUS, MINUS)
        assert differential['x'] == Polynomial.constant(2)
        assert not differential['y']

    def test_intro_equal(self):
        differential = bilinear_differential(intro(), PLUS, PLUS)
        assert not differential['x']
        assert differential['y'] == Polynomial.generator('x.h', 2)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            bilinear_differential(intro(), PLUS, PLUS, method='fast')

    def test_project(self):
        cyl = cylinder_context(intro())
        p = Polynomial.from_word(['x.h', 'x.l'], cyl) + Polynomial.from_word(['x.r', 'x.r'], cyl)
        assert project(p, PLUS, MINUS) == Polynomial.generator('x.h') + Polynomial.one()

    @settings(max_examples=25, deadline=None)
    @given(SEEDS)
    def test_methods_agree(self, seed):
        A, left, right = random_instance(random.Random(seed), max_generators=4)
        assert bilinear_differential(A, left, right, 'literal') == \
            bilinear_differential(A, left, right, 'grouped')


class TestBilinearize:
    def test_fundamental_functional(self):
        package = bilinearize(intro(), PLUS, MINUS)
        assert package.hat_ids == ('x.h', 'y.h')
        assert package.fundamental_functional == {'x.h': 2}
        assert package.d0('y.h') == 0
        assert not package.d1('y.h')
        assert package.degree('x.h') == 1

    def test_module_differential(self):
        package = bilinearize(intro(), PLUS, PLUS)
        assert package.fundamental_functional == {}
        assert package.d1('y.h') == Polynomial.generator('x.h', 2)
        assert package.d('y.h') == package.d1('y.h')

    def test_invalid_augmentation(self):
        with pytest.raises(AugmentationError) as excinfo:
            bilinearize(intro(), PLUS, Augmentation({'x': 2}, name='bad'))
        assert 'differential at y' in str(excinfo.value)

    def test_constant_and_linear(self):
        package = bilinearize(linear_pair(), Augmentation({'x': 1}), Augmentation())
        assert package.d('x.h') == Polynomial.generator('v.h') + Polynomial.one()
        assert package.functional_row().shape == (1, 2)

    @settings(max_examples=25, deadline=None)
    @given(SEEDS)
    def test_invariants(self, seed):
        A, left, right = random_instance(random.Random(seed))
        assert bilinearize(A, left, right).check_invariants()
