from fractions import Fraction
import random

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from pybilin import SerialBackend
from pybilin.bilinearization import Augmentation, bilinearize, build_cylinder
from pybilin.errors import AugmentationError, ConsistencyError, PresentationError
from pybilin.graded_algebra import CdgaPresentation, Generator, GradingSpec, Polynomial
from pybilin.homology import (
    GradedChainComplex,
    HomologyEngine,
    HomotopyCertificate,
    check_homotopy,
    complex_from_maps,
    homotopy_row,
    linear_complex,
    monomials_up_to,
    series_totals,
    shift_augmentation,
    symmetric_series,
)
from pybilin.linalg import SparseMatrix
from pybilin.random_models import random_homotopy_instance, random_instance

Z = GradingSpec.integer()
SEEDS = st.integers(min_value=0, max_value=10 ** 6)
PLUS = Augmentation({'x': 1}, name='a')
MINUS = Augmentation({'x': -1}, name='b')
ZERO = Augmentation()


def intro():
    ctx = CdgaPresentation(Z, [Generator('x', 0), Generator('y', 1)])
    return ctx.with_differential({
        'y': Polynomial.from_word(['x', 'x'], ctx) - Polynomial.one(),
    })


def closed_point():
    return CdgaPresentation(Z, [Generator('x', 0)])


def linear_pair():
    ctx = CdgaPresentation(Z, [Generator('x', 0), Generator('v', -1)])
    return ctx.with_differential({'x': Polynomial.generator('v')})


@pytest.fixture
def engine():
    return HomologyEngine(SerialBackend())


class TestGradedChainComplex:
    def test_shape_is_checked(self):
        with pytest.raises(ValueError) as excinfo:
            GradedChainComplex(Z, {0: ['a'], 1: ['b']}, {1: SparseMatrix({}, (2, 1))})
        assert 'expected (1, 1)' in str(excinfo.value)

    def test_d_squared(self):
        one = SparseMatrix({0: {0: 1}}, (1, 1))
        complex_ = GradedChainComplex(Z, {0: ['a'], 1: ['b'], 2: ['c']}, {1: one, 2: one})
        with pytest.raises(ConsistencyError) as excinfo:
            complex_.check()
        assert 'd^2 != 0 starting in degree 2' in str(excinfo.value)

    def test_leaving_the_complex(self):
        with pytest.raises(ConsistencyError) as excinfo:
            complex_from_maps(Z, {1: ['b']}, lambda label: {'a': 1})
        assert 'leaves the complex' in str(excinfo.value)


class TestHomology:
    def test_dims_and_representatives(self, engine):
        complex_ = complex_from_maps(
            Z, {0: ['a'], 1: ['b', 'c']},
            lambda label: {'a': 1} if label != 'a' else {},
        )
        summary = engine.homology(complex_)
        assert summary.dims == {0: 0, 1: 1}
        assert summary.nonzero_dims() == {1: 1}
        assert summary.representatives[1] == [{'b': Fraction(-1), 'c': Fraction(1)}]
        assert summary.boundaries[0] == [{'a': Fraction(1)}]
        assert summary.total() == 1

    def test_cyclic_grading(self, engine):
        grading = GradingSpec.cyclic(2)
        complex_ = complex_from_maps(grading, {0: ['a'], 1: ['b']}, lambda label: {})
        assert engine.homology(complex_).dims == {0: 1, 1: 1}

    def test_linear_complex(self, engine):
        assert engine.homology(linear_complex(linear_pair())).nonzero_dims() == {}
        with pytest.raises(PresentationError):
            linear_complex(intro())

    def test_cylinder_linear_dims(self, engine):
        assert engine.cylinder_linear_dims(build_cylinder(closed_point())) == \
            ({0: 1}, {0: 1})


class TestSymmetricSeries:
    def test_odd_class(self):
        assert symmetric_series({1: 1}, 4, Z) == {0: {0: 1}, 1: {1: 1}}

    def test_even_class(self):
        assert symmetric_series({2: 1}, 3, Z) == {
            0: {0: 1}, 1: {2: 1}, 2: {4: 1}, 3: {6: 1},
        }

    def test_degree_zero_class(self):
        assert series_totals(symmetric_series({0: 1}, 2, Z)) == {0: 3}

    def test_cyclic(self):
        series = symmetric_series({1: 2}, 4, GradingSpec.cyclic(2))
        assert series == {0: {0: 1}, 1: {1: 2}, 2: {0: 1}}

    def test_no_classes(self):
        assert series_totals(symmetric_series({1: 0, 2: 0}, 4, Z)) == {0: 1}


class TestMonomials:
    def test_count(self):
        monomials = monomials_up_to(intro(), ['x', 'y'], 2)
        assert [str(m) for m in monomials] == ['1', 'x', 'x*y', 'x^2', 'y']


class TestHomotopy:
    def test_row(self):
        row = homotopy_row(intro().d('y'), intro(), PLUS, PLUS, degree=0)
        assert row == {'x': 2}

    def test_solve(self, engine):
        certificate = engine.solve_homotopy(linear_pair(), PLUS, ZERO)
        assert certificate == HomotopyCertificate({'v': Fraction(1)})
        assert check_homotopy(linear_pair(), PLUS, ZERO, certificate)

    def test_no_homotopy(self, engine):
        assert engine.solve_homotopy(intro(), PLUS, MINUS) is None

    def test_trivial_homotopy(self, engine):
        assert engine.solve_homotopy(intro(), PLUS, PLUS).is_zero()

    def test_shift(self):
        shifted = shift_augmentation(linear_pair(), ZERO, HomotopyCertificate({'v': 2}))
        assert shifted == Augmentation({'x': 2})


class TestCriterion:
    def test_intro_vanishes(self, engine):
        verdict = engine.decide_criterion(intro(), PLUS, MINUS)
        assert not verdict.nonvanishing
        assert verdict.sub_results == (False, False, False, False)
        assert verdict.class_witness == (1, {'x.h': Fraction(1)}, Fraction(2))
        assert verdict.certificate is None

    def test_intro_same_augmentation(self, engine):
        verdict = engine.decide_criterion(intro(), PLUS, PLUS)
        assert verdict.nonvanishing
        assert verdict.sub_results == (True, True, True, True)
        assert {k: v for k, v in verdict.algebra_dims.items() if v} == {0: 1}
        assert verdict.bilin_augmentation == Augmentation()

    def test_closed_point(self, engine):
        aug = Augmentation({'x': 1})
        verdict = engine.decide_criterion(closed_point(), aug, aug)
        assert verdict.nonvanishing
        assert verdict.module_dims == {1: 1}
        assert {k: v for k, v in verdict.algebra_dims.items() if v} == {0: 1, 1: 1}
        assert verdict.series_dims == {0: 1, 1: 1}

    def test_homotopic_through_v(self, engine):
        verdict = engine.decide_criterion(linear_pair(), PLUS, ZERO)
        assert verdict.nonvanishing
        assert verdict.certificate.values == {'v': 1}
        assert verdict.bilin_augmentation == Augmentation({'v.h': -1})
        assert {k: v for k, v in verdict.algebra_dims.items() if v} == {0: 1}

    def test_unit_exactness(self, engine):
        assert engine.unit_is_exact(bilinearize(intro(), PLUS, MINUS))
        assert not engine.unit_is_exact(bilinearize(intro(), PLUS, PLUS))

    def test_word_bound(self, engine):
        with pytest.raises(ValueError):
            engine.decide_criterion(intro(), PLUS, PLUS, word_bound=0)

    @settings(max_examples=25, deadline=None)
    @given(SEEDS)
    def test_sub_results_agree(self, seed):
        engine = HomologyEngine(SerialBackend())
        A, left, right = random_instance(random.Random(seed), max_generators=4)
        verdict = engine.decide_criterion(A, left, right, word_bound=3)
        assert len(set(verdict.sub_results)) == 1


class TestTransport:
    def test_constant_seed(self, engine):
        certificate = HomotopyCertificate({'v': Fraction(2)})
        left1 = Augmentation({'x': 2})
        transport = engine.homotopy_transport(linear_pair(), ZERO, left1, certificate, ZERO)
        assert transport.constant == {'v.h': -2}
        assert transport.linear == SparseMatrix.identity(2)
        assert not transport.is_identity()
        assert transport.images['v.h'] == Polynomial.generator('v.h') - Polynomial.constant(2)
        assert transport.dims_before == transport.dims_after

    def test_identity(self, engine):
        transport = engine.homotopy_transport(
            intro(), PLUS, PLUS, HomotopyCertificate(), MINUS
        )
        assert transport.is_identity()

    def test_not_a_homotopy(self, engine):
        with pytest.raises(AugmentationError):
            engine.homotopy_transport(
                linear_pair(), ZERO, Augmentation({'x': 3}),
                HomotopyCertificate({'v': 2}), ZERO,
            )

    @settings(max_examples=20, deadline=None)
    @given(SEEDS)
    def test_random_transport(self, seed):
        engine = HomologyEngine(SerialBackend())
        instance = random_homotopy_instance(random.Random(seed), max_generators=4)
        transport = engine.homotopy_transport(
            instance.presentation, instance.left, instance.left1,
            instance.certificate, instance.right,
        )
        assert transport.linear.det()
