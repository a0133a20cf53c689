"""
Convex surfaces in contact 3-manifolds and symmetric doubles.

A surface configuration lists the dividing circles and, for each side of
each circle, the region it bounds. The contact homology of the
neighborhood is computed from the dividing-set algebra (all generators
closed, degree 0 in Z/2 so the hatted generators have degree 1) with the
plane-count augmentations on the two sides.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
from typing import List, Optional, Tuple

from .base_component import BaseComponent
from .bilinearization import Augmentation, validate_augmentation
from .config import DEFAULT_MAX_COVER, DEFAULT_WORD_BOUND
from .errors import AugmentationError, ConsistencyError, GeometryError
from .graded_algebra import (
    CdgaPresentation,
    Generator,
    GradingSpec,
    ValidationReport,
)
from .homology import HomologyEngine, series_totals, symmetric_series

logger = logging.getLogger(__name__)

TIGHT = 'tight'
OVERTWISTED = 'overtwisted'


@dataclass(frozen=True)
class RegionSide:
    disk: bool
    chi: int
    region: Optional[str] = None


@dataclass(frozen=True)
class DividingCircle:
    plus: RegionSide
    minus: RegionSide


@dataclass(frozen=True)
class SurfaceConfig:
    genus: int
    circles: Tuple[DividingCircle, ...]

    def sides(self):
        for i, circle in enumerate(self.circles):
            yield i, '+', circle.plus
            yield i, '-', circle.minus

    def regions(self):
        """
        Regions keyed by their id; sides without an id are their own region.
        """
        grouped = {}
        for i, sign, side in self.sides():
            key = side.region or 'c{}{}'.format(i + 1, sign)
            grouped.setdefault(key, []).append((i, sign, side))
        return grouped

    def consistency_report(self):
        report = ValidationReport('surface configuration')
        if self.genus < 0:
            report.add('genus', 'surface', 'negative genus')
        if not self.circles:
            report.add('circles', 'surface', 'at least one dividing circle needed')
            return report
        total = 0
        adjacency = {}
        for key, members in sorted(self.regions().items()):
            signs = {sign for _, sign, _ in members}
            if len(signs) > 1:
                report.add('sides', key, 'region lies on both sides')
            flags = {(side.disk, side.chi) for _, _, side in members}
            if len(flags) > 1:
                report.add('region', key, 'sides disagree on disk/chi')
                continue
            disk, chi = flags.pop()
            b = len(members)
            if disk != (chi == 1 and b == 1):
                report.add('disk', key, 'disk flag needs chi = 1 and one boundary')
            if (2 - b - chi) % 2 or 2 - b - chi < 0:
                report.add('euler', key, 'chi {} impossible with {} boundaries'.format(chi, b))
            total += chi
            for i, _, _ in members:
                adjacency.setdefault(key, set()).add(i)
        if total != 2 - 2 * self.genus:
            report.add('total', 'surface', 'regions sum to chi {}, surface has {}'.format(
                total, 2 - 2 * self.genus))
        if not _connected(adjacency):
            report.add('connected', 'surface', 'regions do not glue to a connected surface')
        return report

    def check(self):
        self.consistency_report().raise_for_status(GeometryError)
        return self


def _connected(adjacency):
    keys = list(adjacency)
    if not keys:
        return False
    by_circle = {}
    for key, circles in adjacency.items():
        for i in circles:
            by_circle.setdefault(i, set()).add(key)
    seen = {keys[0]}
    stack = [keys[0]]
    while stack:
        key = stack.pop()
        for i in adjacency[key]:
            for other in by_circle[i]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
    return len(seen) == len(keys)


@dataclass
class SymmetricDoubleSpec:
    base: CdgaPresentation
    augmentation: Augmentation

    def check(self):
        validate_augmentation(self.base, self.augmentation).raise_for_status(
            AugmentationError
        )
        return self


@dataclass
class SurfaceHomology:
    tightness: str
    vanishing: bool
    generators: List[str]
    verdict: object
    series: dict = field(default_factory=dict)


@dataclass
class DoubleResult:
    verdict: object
    series: dict


def giroux_tightness(cfg):
    """
    Sphere: tight iff there is one dividing circle. Otherwise tight iff no
    region is a disk.
    """
    cfg.check()
    if cfg.genus == 0:
        return TIGHT if len(cfg.circles) == 1 else OVERTWISTED
    if any(side.disk for _, _, side in cfg.sides()):
        return OVERTWISTED
    return TIGHT


def cover_id(index, multiplicity):
    return 'g{}_{}'.format(index + 1, multiplicity)


def surface_cdga(cfg, max_cover=DEFAULT_MAX_COVER):
    """
    Dividing-set algebra on gamma_i^m, 1 <= m <= M, closed, degree 0 in Z/2.
    eps+(gamma_i^m) = 1 when the plus region of circle i is a disk, else 0;
    likewise eps-.
    :return: (presentation, eps+, eps-).
    """
    if max_cover < 1:
        raise ValueError('max_cover must be at least 1.')
    cfg.check()
    grading = GradingSpec.cyclic(2)
    generators = []
    plus, minus = {}, {}
    for i, circle in enumerate(cfg.circles):
        for m in range(1, max_cover + 1):
            gid = cover_id(i, m)
            generators.append(Generator(gid, 0))
            if circle.plus.disk:
                plus[gid] = Fraction(1)
            if circle.minus.disk:
                minus[gid] = Fraction(1)
    A = CdgaPresentation(grading, generators)
    return A, Augmentation(plus, name='plus'), Augmentation(minus, name='minus')


def exterior_series(count, word_bound):
    return series_totals(
        symmetric_series({1: count}, word_bound, GradingSpec.cyclic(2))
    )


def _region_key_permutations(r):
    return itertools.permutations(range(r))


def enumerate_surface_configs(genus, max_circles):
    """
    Every consistent configuration on the closed surface of the given genus
    with 1..max_circles dividing circles, one per isomorphism class of the
    region graph with region genera.
    """
    seen = set()
    configs = []
    for c in range(1, max_circles + 1):
        for r in range(2, c + 2):
            for sides in itertools.product('+-', repeat=r):
                plus = [i for i in range(r) if sides[i] == '+']
                minus = [i for i in range(r) if sides[i] == '-']
                if not plus or not minus:
                    continue
                pairs = [(p, q) for p in plus for q in minus]
                for edges in itertools.combinations_with_replacement(pairs, c):
                    degree = [0] * r
                    for p, q in edges:
                        degree[p] += 1
                        degree[q] += 1
                    if 0 in degree:
                        continue
                    extra = genus - (c - r + 1)
                    if extra < 0:
                        continue
                    for genera in _compositions(extra, r):
                        key = min(
                            (
                                tuple(sides[perm.index(k)] for k in range(r)),
                                tuple(sorted((perm[p], perm[q]) for p, q in edges)),
                                tuple(genera[perm.index(k)] for k in range(r)),
                            )
                            for perm in _region_key_permutations(r)
                        )
                        if key in seen:
                            continue
                        seen.add(key)
                        config = _build_config(genus, edges, degree, genera)
                        if config.consistency_report().valid:
                            configs.append(config)
    logger.info('enumerated %d configurations of genus %d', len(configs), genus)
    return configs


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _build_config(genus, edges, degree, genera):
    def side(k):
        chi = 2 - 2 * genera[k] - degree[k]
        return RegionSide(disk=(chi == 1 and degree[k] == 1), chi=chi,
                          region='R{}'.format(k + 1))

    return SurfaceConfig(
        genus, tuple(DividingCircle(side(p), side(q)) for p, q in edges)
    )


class SurfaceDoubles(BaseComponent):
    """
    Contact homology of surface neighborhoods and symmetric doubles, each
    cross-checked against the vanishing criterion.

    Examples:
    >>> from pybilin import SerialBackend
    >>> surfaces = SurfaceDoubles(SerialBackend())
    >>> surfaces.ch_surface(sphere_one_circle, 2).generators
    ['g1_1', 'g1_2']
    """
    def __init__(self, backend, name='surfaces', homology=None):
        super().__init__(backend, name)
        self.homology = homology or HomologyEngine(backend)

    def ch_surface(self, cfg, max_cover=DEFAULT_MAX_COVER,
                   word_bound=DEFAULT_WORD_BOUND):
        """
        Zero when the configuration is overtwisted, else the exterior
        algebra on the gamma_i^m. Always cross-checked by the criterion.

        :raise ConsistencyError: if the criterion disagrees.
        """
        tightness = giroux_tightness(cfg)
        A, plus, minus = surface_cdga(cfg, max_cover)
        verdict = self.homology.decide_criterion(A, plus, minus, word_bound)
        vanishing = tightness == OVERTWISTED
        if verdict.nonvanishing == vanishing:
            raise ConsistencyError(
                'criterion says {} for a {} configuration.'.format(
                    'nonvanishing' if verdict.nonvanishing else 'vanishing', tightness
                ),
                item=cfg,
            )
        series = {}
        generators = []
        if not vanishing:
            generators = list(A.ids)
            series = exterior_series(len(generators), word_bound)
            if {k: v for k, v in verdict.algebra_dims.items() if v} != series:
                raise ConsistencyError(
                    'homology {} is not the exterior algebra {}.'.format(
                        verdict.algebra_dims, series
                    ),
                    item=cfg,
                )
        logger.info('%d circles: %s', len(cfg.circles), tightness)
        return SurfaceHomology(tightness, vanishing, generators, verdict, series)

    def sweep(self, configs, max_cover=DEFAULT_MAX_COVER,
              word_bound=DEFAULT_WORD_BOUND):
        return self.backend.map(
            lambda cfg: self.ch_surface(cfg, max_cover, word_bound), configs
        )

    def symmetric_double(self, spec, word_bound=DEFAULT_WORD_BOUND):
        """
        Bilinearize with the same augmentation on both sides; the result is
        always nonvanishing and its homology is the symmetric algebra on
        the linearized homology.

        :raise ConsistencyError: if the verdict is vanishing.
        """
        spec.check()
        verdict = self.homology.decide_criterion(
            spec.base, spec.augmentation, spec.augmentation, word_bound
        )
        if not verdict.nonvanishing:
            raise ConsistencyError('symmetric double reported vanishing.', item=spec)
        series = symmetric_series(verdict.module_dims, word_bound, spec.base.grading)
        return DoubleResult(verdict, series)
