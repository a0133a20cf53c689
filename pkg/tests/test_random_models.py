import random

from hypothesis import given, settings
from hypothesis import strategies as st

from pybilin.bilinearization import validate_augmentation
from pybilin.graded_algebra import GradingSpec, validate_presentation
from pybilin.homology import check_homotopy
from pybilin.model_geometry import cz_index
from pybilin.random_models import (
    AUGMENTATION_GRID,
    augmented_presentation,
    presentation_inventory,
    random_block_path,
    random_cylinder_presentation,
    random_homotopy_instance,
    random_instance,
    random_inventory,
    random_orbit,
    random_presentation,
    random_presentation_inventory,
)

SEEDS = st.integers(min_value=0, max_value=10 ** 6)


def differentials(A):
    return [A.d(gid) for gid in A.ids]


def has_open_factor(A):
    """
    Whether some differential has a product monomial with a factor whose
    own differential is nonzero.
    """
    return any(
        monomial.word_length >= 2 and any(A.d(factor) for factor in monomial.ids())
        for gid in A.ids for monomial in A.d(gid).terms
    )


class TestPresentations:
    def test_seeded(self):
        first = random_presentation(random.Random(7))
        second = random_presentation(random.Random(7))
        assert first.ids == second.ids
        assert differentials(first) == differentials(second)

    def test_cyclic(self):
        A = random_presentation(random.Random(1), cyclic=True)
        assert A.grading == GradingSpec.cyclic(2)

    @settings(deadline=None)
    @given(SEEDS, st.booleans())
    def test_valid(self, seed, cyclic):
        A = random_presentation(random.Random(seed), cyclic=cyclic)
        assert validate_presentation(A).valid
        assert 1 <= len(A.ids) <= 5

    def test_reaches_products_of_open_generators(self):
        assert any(has_open_factor(random_presentation(random.Random(seed)))
                   for seed in range(500))


class TestCylinderPresentations:
    @settings(deadline=None)
    @given(SEEDS, st.booleans())
    def test_valid_with_closed_factors(self, seed, cyclic):
        A = random_cylinder_presentation(random.Random(seed), cyclic=cyclic)
        assert validate_presentation(A).valid
        assert not has_open_factor(A)


class TestInstances:
    @settings(max_examples=50, deadline=None)
    @given(SEEDS)
    def test_augmentations_are_valid(self, seed):
        A, left, right = random_instance(random.Random(seed))
        assert validate_augmentation(A, left).valid
        assert validate_augmentation(A, right).valid

    @settings(max_examples=30, deadline=None)
    @given(SEEDS)
    def test_search_covers_the_grid(self, seed):
        A, found = augmented_presentation(random.Random(seed), max_generators=4)
        assert found
        for augmentation in found:
            assert validate_augmentation(A, augmentation).valid
            assert all(augmentation(gid) in AUGMENTATION_GRID for gid in A.ids_of_degree(0))

    @settings(max_examples=30, deadline=None)
    @given(SEEDS)
    def test_shifted_augmentation_is_homotopic(self, seed):
        instance = random_homotopy_instance(random.Random(seed), max_generators=4)
        A = instance.presentation
        assert validate_augmentation(A, instance.left1).valid
        assert check_homotopy(A, instance.left1, instance.left, instance.certificate)

    def test_distinct_pairs_occur(self):
        instances = [random_homotopy_instance(random.Random(seed), max_generators=4)
                     for seed in range(80)]
        assert any(i.left1.values != i.left.values for i in instances)


class TestGeometry:
    @given(SEEDS)
    def test_orbits(self, seed):
        orbit = random_orbit(random.Random(seed))
        assert orbit.multiplicity >= 1
        assert isinstance(cz_index(orbit.path, orbit.multiplicity), int)

    def test_block_path_seeded(self):
        assert random_block_path(random.Random(3)) == random_block_path(random.Random(3))

    @settings(max_examples=30, deadline=None)
    @given(SEEDS)
    def test_inventories_check(self, seed):
        inventory = random_inventory(random.Random(seed))
        assert inventory.check() is inventory

    @settings(max_examples=30, deadline=None)
    @given(SEEDS)
    def test_presentation_inventory_reads_back(self, seed):
        rng = random.Random(seed)
        A, found = augmented_presentation(rng, max_generators=4, cyclic=False)
        plus, minus = rng.choice(found), rng.choice(found)
        inventory = presentation_inventory(rng, A, plus, minus).check()
        assert differentials(inventory.presentation()) == differentials(A)
        got_plus, got_minus = inventory.augmentations()
        for gid in A.ids:
            assert got_plus(gid) == plus(gid)
            assert got_minus(gid) == minus(gid)

    def test_presentation_inventories_seeded(self):
        first = random_presentation_inventory(random.Random(5))
        second = random_presentation_inventory(random.Random(5))
        assert first.curves == second.curves
        assert first.planes == second.planes
