"""
The property suite as a runnable report: each check draws seeded random
inputs (or sweeps a finite family) and records whether every instance
passed.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
import random
import time

from .backends import SerialBackend
from .bilinearization import (
    Augmentation,
    build_cylinder,
    candidate_grid,
    search_augmentations_bounded,
    validate_augmentation,
)
from .config import DEFAULT_SEED
from .engine import Engine
from .errors import PybilinError
from .gluing_oracle import (
    RigidCurveDatum,
    branch_family,
    one_curve_shape,
    solve_branch,
)
from .graded_algebra import CdgaPresentation, Generator, GradingSpec, Polynomial
from .model_geometry import SpectrumQuery, cz_index, cz_parity_check, normal_spectrum
from .random_models import (
    random_block_path,
    random_cancellation_family,
    random_cylinder_presentation,
    random_homotopy_instance,
    random_instance,
    random_inventory,
    random_orbit,
    random_presentation_inventory,
)
from .surface_doubles import enumerate_surface_configs

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    instances: int
    seconds: float
    detail: str = ''


@dataclass
class SelftestReport:
    seed: int
    scale: float
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def to_dict(self):
        return {
            'seed': self.seed,
            'scale': self.scale,
            'passed': self.passed,
            'checks': [
                {'name': c.name, 'passed': c.passed, 'instances': c.instances,
                 'seconds': round(c.seconds, 3), 'detail': c.detail}
                for c in self.checks
            ],
        }


def intro_no_augmentation():
    """
    |x| = 0, |y| = 1, d y = 1 + x^2.
    """
    ctx = CdgaPresentation(GradingSpec.integer(), [Generator('x', 0), Generator('y', 1)])
    return ctx.with_differential({
        'y': Polynomial.one() + Polynomial.from_word(['x', 'x'], ctx),
    })


def check_cylinders(engine, rng, count):
    for i in range(count):
        build_cylinder(random_cylinder_presentation(rng, cyclic=i % 2 == 1))
    return count


def check_criterion(engine, rng, count, tally):
    for _ in range(count):
        A, left, right = random_instance(rng)
        verdict = engine.homology.decide_criterion(A, left, right)
        tally['nonvanishing'] += verdict.nonvanishing
    return count


def check_intro_example(engine, rng, count):
    A = intro_no_augmentation()
    grid = candidate_grid(16, 8)
    if search_augmentations_bounded(A, grid):
        raise AssertionError('found an augmentation of d y = 1 + x^2.')
    for value in grid:
        if validate_augmentation(A, Augmentation({'x': value})).valid:
            raise AssertionError('x = {} was accepted.'.format(value))
    return len(grid)


def check_surfaces(engine, rng, count, tally, max_circles=3, max_cover=3):
    checked = 0
    for genus in (0, 1, 2):
        configs = enumerate_surface_configs(genus, max_circles)
        for result in engine.surfaces.sweep(configs, max_cover):
            tally['nonvanishing'] += not result.vanishing
            checked += 1
    return checked


def check_homotopy_invariance(engine, rng, count):
    for _ in range(count):
        instance = random_homotopy_instance(rng)
        engine.homology.homotopy_transport(
            instance.presentation, instance.left, instance.left1,
            instance.certificate, instance.right,
        )
    return count


def check_gluing(engine, rng, count):
    for i in range(count):
        inventory = random_presentation_inventory(rng) if i % 2 else random_inventory(rng)
        engine.gluing.aggregate_differential(inventory).raise_for_status()
    return count


def check_branch_table(engine, rng, count):
    """
    Three negative ends: every uncapped end and every choice of plane sides
    on the others, over every branch, against the rank condition; then
    again with resampled coefficients and eps_sigma.
    """
    checked = 0
    for uncapped in range(3):
        others = [p for p in range(3) if p != uncapped]
        for sides in itertools.product('+-', repeat=2):
            planes = {p: RigidCurveDatum.plane('a', side) for p, side in zip(others, sides)}
            curve = RigidCurveDatum.curve('g', ['a', 'a', 'a'])
            for eps in (Fraction(1), Fraction(rng.randint(1, 9), rng.randint(1, 9))):
                values = sorted(rng.sample(range(1, 50), 3))
                shape = one_curve_shape(curve, uncapped, planes, eps)
                for branch in branch_family(3, values):
                    expected = all(
                        (branch.ranks[p] < branch.ranks[uncapped]) == (planes[p].side == '-')
                        for p in others
                    )
                    found = solve_branch(shape, branch) is not None
                    if found != expected:
                        raise AssertionError(
                            'branch {} with sides {} solved={}'.format(
                                branch.ranks, sides, found)
                        )
                    checked += 1
    return checked


def check_cancellation(engine, rng, count):
    engine.gluing.verify_cancellation(
        [random_cancellation_family(rng) for _ in range(count)]
    )
    return count


def check_cz(engine, rng, count):
    for _ in range(count):
        orbit = random_orbit(rng)
        if not cz_parity_check(orbit.path, orbit.multiplicity):
            raise AssertionError('parity identity fails for {}.'.format(orbit))
        p, q = random_block_path(rng), random_block_path(rng)
        if cz_index(p.concat(q)) != cz_index(p) + cz_index(q):
            raise AssertionError('index is not additive.')
    for _ in range(max(1, count // 50)):
        query = SpectrumQuery(
            eps_tau=Fraction(rng.randint(11, 30), 10),
            eps_sigma=Fraction(rng.randint(1, 9), 10),
            action=Fraction(1, rng.randint(1, 2)),
            cutoff=1,
            assume_gap=True,
        )
        values = normal_spectrum(query).values()
        if -query.eps_sigma not in values or query.eps_tau not in values:
            raise AssertionError('distinguished eigenvalues missing.')
    return count


def run_selftest(seed=DEFAULT_SEED, scale=1.0, backend=None):
    """
    Run the ten checks. `scale` multiplies the random instance counts and,
    below one half, shrinks the surface sweep.
    """
    if not 0 < scale <= 1:
        raise ValueError('scale must lie in (0, 1].')
    engine = Engine(backend or SerialBackend())
    tally = {'nonvanishing': 0}

    def sized(n):
        return max(1, int(n * scale))

    small = scale < 0.5
    plan = [
        ('cylinder squares to zero', check_cylinders, sized(200), ()),
        ('criterion agreement', check_criterion, sized(100), (tally,)),
        ('no augmentation of d y = 1 + x^2', check_intro_example, 1, ()),
        ('surface sweep', check_surfaces, 0,
         (tally, 2 if small else 3, 2 if small else 3)),
        ('homotopy invariance', check_homotopy_invariance, sized(50), ()),
        ('gluing oracle', check_gluing, sized(100), ()),
        ('branch table', check_branch_table, 1, ()),
        ('cancellation', check_cancellation, sized(50), ()),
        ('index identities', check_cz, sized(500), ()),
    ]
    report = SelftestReport(seed, scale)
    for index, (name, check, count, extra) in enumerate(plan):
        rng = random.Random('{}:{}'.format(seed, index))
        start = time.perf_counter()
        try:
            instances = check(engine, rng, count, *extra)
            result = CheckResult(name, True, instances, time.perf_counter() - start)
        except (PybilinError, AssertionError) as error:
            logger.warning('check %r failed: %s', name, error)
            result = CheckResult(name, False, count, time.perf_counter() - start,
                                 str(error))
        logger.info('%s: %s in %.2fs', name, 'ok' if result.passed else 'FAILED',
                    result.seconds)
        report.checks.append(result)
    # the symmetric-algebra comparison runs inside every nonvanishing verdict
    report.checks.append(CheckResult(
        'symmetric algebra structure',
        report.checks[1].passed and report.checks[3].passed,
        tally['nonvanishing'], 0.0,
    ))
    return report
