import os

import pytest

from pybilin import SerialBackend, ThreadPoolBackend
from pybilin.bilinearization import Augmentation
from pybilin.errors import AugmentationError, GeometryError
from pybilin.graded_algebra import CdgaPresentation, Generator, GradingSpec, Polynomial
from pybilin.serialization import load_json, surface_from_dict
from pybilin.surface_doubles import (
    OVERTWISTED,
    TIGHT,
    DividingCircle,
    RegionSide,
    SurfaceConfig,
    SurfaceDoubles,
    SymmetricDoubleSpec,
    cover_id,
    enumerate_surface_configs,
    exterior_series,
    giroux_tightness,
    surface_cdga,
)

DATA = os.path.join(os.path.dirname(__file__), '..', 'pybilin', 'data')
DISK = RegionSide(disk=True, chi=1)


def load_surface(name):
    return surface_from_dict(load_json(os.path.join(DATA, name)))


def torus_with_disk():
    return SurfaceConfig(1, (DividingCircle(DISK, RegionSide(disk=False, chi=-1)),))


def intro():
    ctx = CdgaPresentation(GradingSpec.integer(), [Generator('x', 0), Generator('y', 1)])
    return ctx.with_differential({
        'y': Polynomial.from_word(['x', 'x'], ctx) - Polynomial.one(),
    })


@pytest.fixture
def surfaces():
    return SurfaceDoubles(SerialBackend())


class TestSurfaceConfig:
    def test_examples_are_consistent(self):
        for name in ('sphere_one_circle.json', 'sphere_two_circles.json',
                     'torus_annuli.json'):
            assert load_surface(name).consistency_report().valid

    def test_shared_region(self):
        cfg = load_surface('sphere_two_circles.json')
        assert sorted(cfg.regions()) == ['annulus', 'c1+', 'c2+']

    def test_euler_characteristic(self):
        side = RegionSide(disk=False, chi=0)
        report = SurfaceConfig(0, (DividingCircle(side, side),)).consistency_report()
        assert 'euler' in [v.kind for v in report.violations]
        assert 'total' in [v.kind for v in report.violations]

    def test_disk_flag(self):
        wrong = RegionSide(disk=True, chi=0)
        report = SurfaceConfig(1, (DividingCircle(wrong, RegionSide(False, 0)),)) \
            .consistency_report()
        assert report.items('disk') == ['c1+']

    def test_check_raises(self):
        with pytest.raises(GeometryError) as excinfo:
            SurfaceConfig(0, ()).check()
        assert 'at least one dividing circle' in str(excinfo.value)

    def test_region_on_both_sides(self):
        side = RegionSide(disk=False, chi=0, region='R')
        report = SurfaceConfig(1, (DividingCircle(side, side),)).consistency_report()
        assert report.items('sides') == ['R']


class TestTightness:
    def test_sphere(self):
        assert giroux_tightness(load_surface('sphere_one_circle.json')) == TIGHT
        assert giroux_tightness(load_surface('sphere_two_circles.json')) == OVERTWISTED

    def test_higher_genus(self):
        assert giroux_tightness(load_surface('torus_annuli.json')) == TIGHT
        assert giroux_tightness(torus_with_disk()) == OVERTWISTED


class TestSurfaceCdga:
    def test_generators_and_augmentations(self):
        A, plus, minus = surface_cdga(load_surface('sphere_two_circles.json'), 2)
        assert A.ids == ('g1_1', 'g1_2', 'g2_1', 'g2_2')
        assert A.grading == GradingSpec.cyclic(2)
        assert all(plus(gid) == 1 for gid in A.ids)
        assert not minus.values

    def test_cover_id(self):
        assert cover_id(0, 3) == 'g1_3'

    def test_max_cover(self):
        with pytest.raises(ValueError):
            surface_cdga(load_surface('sphere_one_circle.json'), 0)

    def test_exterior_series(self):
        assert exterior_series(2, 4) == {0: 2, 1: 2}


class TestChSurface:
    def test_tight_sphere(self, surfaces):
        result = surfaces.ch_surface(load_surface('sphere_one_circle.json'), 2)
        assert result.tightness == TIGHT
        assert not result.vanishing
        assert result.generators == ['g1_1', 'g1_2']
        assert result.series == {0: 2, 1: 2}
        assert result.verdict.nonvanishing

    def test_overtwisted_sphere(self, surfaces):
        result = surfaces.ch_surface(load_surface('sphere_two_circles.json'), 2)
        assert result.vanishing
        assert result.generators == []
        assert not result.verdict.nonvanishing

    def test_torus(self, surfaces):
        assert not surfaces.ch_surface(load_surface('torus_annuli.json'), 1).vanishing
        assert surfaces.ch_surface(torus_with_disk(), 1).vanishing

    def test_sweep_on_threads(self):
        surfaces = SurfaceDoubles(ThreadPoolBackend(workers=2))
        configs = enumerate_surface_configs(0, 2)
        results = surfaces.sweep(configs, max_cover=1)
        assert [r.tightness for r in results] == [giroux_tightness(c) for c in configs]


class TestEnumeration:
    def test_sphere(self):
        configs = enumerate_surface_configs(0, 2)
        assert len(configs) == 3
        assert sum(giroux_tightness(c) == TIGHT for c in configs) == 1

    def test_every_config_is_consistent(self):
        for genus in (1, 2):
            for cfg in enumerate_surface_configs(genus, 2):
                assert cfg.consistency_report().valid
                assert cfg.genus == genus


class TestSymmetricDouble:
    def test_nonvanishing(self, surfaces):
        spec = SymmetricDoubleSpec(intro(), Augmentation({'x': 1}))
        result = surfaces.symmetric_double(spec)
        assert result.verdict.nonvanishing
        assert result.series == {0: {0: 1}}

    def test_invalid_augmentation(self, surfaces):
        spec = SymmetricDoubleSpec(intro(), Augmentation({'x': 2}))
        with pytest.raises(AugmentationError):
            surfaces.symmetric_double(spec)
