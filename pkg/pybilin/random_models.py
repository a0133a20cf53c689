"""
Seeded random inputs for the property suite: general presentations with
searched augmentations, presentations whose cylinder squares to zero,
homotopy instances, block paths, rigid-curve inventories and cancellation
families.

Every generator takes a `random.Random` so runs are reproducible.
"""
from dataclasses import dataclass
from fractions import Fraction
import itertools
import logging

from .bilinearization import (
    Augmentation,
    search_augmentations_bounded,
    validate_augmentation,
)
from .gluing_oracle import Edge, Inventory, RigidCurveDatum, Tree, Vertex
from .graded_algebra import (
    CdgaPresentation,
    Generator,
    GradingSpec,
    Polynomial,
    UNIT,
    apply_differential,
)
from .homology import (
    HomotopyCertificate,
    check_homotopy,
    monomials_up_to,
    shift_augmentation,
    solve_homotopy,
)
from .linalg import SparseMatrix
from .model_geometry import (
    BlockPath,
    Hyperbolic,
    NegHyperbolicPair,
    OrbitModel,
    SmallRotation,
)

logger = logging.getLogger(__name__)

INTEGER_DEGREES = (-1, 0, 0, 1, 1, 2)
CYCLIC_DEGREES = (0, 1)
COEFFICIENTS = (-2, -1, 1, 2)
AUGMENTATION_GRID = (Fraction(-1), Fraction(0), Fraction(1), Fraction(2))
MAX_PAIRS = 12
MAX_ENDS = 6


def _random_generators(rng, max_generators, cyclic):
    grading = GradingSpec.cyclic(2) if cyclic else GradingSpec.integer()
    pool = CYCLIC_DEGREES if cyclic else INTEGER_DEGREES
    count = rng.randint(1, max_generators)
    generators = [Generator('x{}'.format(i + 1), rng.choice(pool)) for i in range(count)]
    return CdgaPresentation(grading, generators)


def _random_cycle(rng, ctx, differential, earlier, target, max_word):
    """
    A random cycle of degree `target` among the monomials in `earlier`.
    """
    partial = ctx.with_differential(differential)
    monomials = [m for m in monomials_up_to(ctx, earlier, max_word)
                 if ctx.monomial_degree(m) == target]
    if not monomials:
        return Polynomial()
    rows = {}
    columns = []
    for monomial in monomials:
        image = apply_differential(Polynomial({monomial: 1}), partial)
        columns.append({rows.setdefault(m, len(rows)): c for m, c in image.terms.items()})
    kernel = SparseMatrix.from_columns(columns, len(rows)).nullspace()
    result = Polynomial()
    for vector in rng.sample(kernel, min(len(kernel), rng.randint(1, 3))):
        weight = rng.choice(COEFFICIENTS)
        for j, value in vector.items():
            result = result + Polynomial({monomials[j]: value * weight})
    return result


def random_presentation(rng, max_generators=5, max_word=3, cyclic=False):
    """
    A presentation whose differentials are random cycles: d x is drawn from
    the kernel of d on the monomials of the right degree in the earlier
    generators, so d^2 = 0 holds with no restriction on which generators
    appear in products.
    """
    ctx = _random_generators(rng, max_generators, cyclic)
    differential = {}
    earlier = []
    for generator in ctx.generators:
        if earlier and rng.random() < 0.75:
            target = ctx.grading.shift(generator.degree, -1)
            d = _random_cycle(rng, ctx, differential, earlier, target, max_word)
            if d:
                differential[generator.id] = d
        earlier.append(generator.id)
    return ctx.with_differential(differential)


def _closed_part(rng, ctx, closed, target, max_word):
    terms = {}
    for monomial in monomials_up_to(ctx, closed, max_word):
        if ctx.monomial_degree(monomial) != target:
            continue
        chance = 0.15 if monomial == UNIT else 0.4
        if rng.random() < chance:
            terms[monomial] = rng.choice(COEFFICIENTS)
    return Polynomial(terms)


def _linear_cycle(rng, ctx, differential, candidates):
    """
    A random combination of the candidates whose differentials cancel.
    """
    if not candidates:
        return Polynomial()
    rows = {}
    columns = []
    for gid in candidates:
        column = {}
        for monomial, c in differential[gid].terms.items():
            column[rows.setdefault(monomial, len(rows))] = c
        columns.append(column)
    kernel = SparseMatrix.from_columns(columns, len(rows)).nullspace()
    result = Polynomial()
    for vector in kernel:
        weight = rng.choice((0,) + COEFFICIENTS)
        for j, value in vector.items():
            result = result + Polynomial.generator(candidates[j], value * weight)
    return result


def random_cylinder_presentation(rng, max_generators=6, max_word=3, cyclic=False):
    """
    A presentation in which every generator occurring in a differential
    monomial of word length >= 2 is closed: each differential is a cycle in
    earlier non-closed generators plus a polynomial in closed ones. These
    are the presentations whose cylinder squares to zero.
    """
    ctx = _random_generators(rng, max_generators, cyclic)
    grading = ctx.grading
    differential = {}
    closed = []
    for generator in ctx.generators:
        if rng.random() < 0.5:
            closed.append(generator.id)
            continue
        target = grading.shift(generator.degree, -1)
        candidates = [gid for gid in differential if ctx.degree(gid) == target]
        d = _linear_cycle(rng, ctx, differential, candidates) + \
            _closed_part(rng, ctx, closed, target, max_word)
        if d:
            differential[generator.id] = d
        else:
            closed.append(generator.id)
    return ctx.with_differential(differential)


def _named(augmentation, name):
    return Augmentation(augmentation.values, name=name)


def augmented_presentation(rng, max_generators=5, max_word=3, cyclic=None, attempts=50):
    """
    A random presentation with every augmentation valued in
    AUGMENTATION_GRID, drawn until at least one exists.

    :return: (A, list of augmentations).
    """
    for _ in range(attempts):
        use_cyclic = rng.random() < 0.5 if cyclic is None else cyclic
        A = random_presentation(rng, max_generators, max_word, use_cyclic)
        found = search_augmentations_bounded(A, AUGMENTATION_GRID)
        if found:
            return A, found
    raise RuntimeError('no augmented presentation in {} attempts.'.format(attempts))


def random_instance(rng, max_generators=5, max_word=3, cyclic=None, attempts=50):
    """
    (A, left, right) with both augmentations valid; the two may coincide.
    """
    A, found = augmented_presentation(rng, max_generators, max_word, cyclic, attempts)
    return A, _named(rng.choice(found), 'left'), _named(rng.choice(found), 'right')


@dataclass
class HomotopyInstance:
    presentation: CdgaPresentation
    left: Augmentation
    left1: Augmentation
    certificate: HomotopyCertificate
    right: Augmentation


def _homotopic_pair(rng, A, found):
    for _ in range(MAX_PAIRS if len(found) > 1 else 0):
        later, earlier = rng.sample(found, 2)
        certificate = solve_homotopy(A, later, earlier)
        if certificate is not None:
            return earlier, later, certificate
    for earlier in rng.sample(found, min(len(found), MAX_PAIRS)):
        certificate = HomotopyCertificate({
            gid: Fraction(rng.choice(COEFFICIENTS)) for gid in A.ids_of_degree(-1)
        })
        later = shift_augmentation(A, earlier, certificate)
        if later != earlier and validate_augmentation(A, later).valid \
                and check_homotopy(A, later, earlier, certificate):
            return earlier, later, certificate
    return None


def random_homotopy_instance(rng, attempts=20, **kwargs):
    """
    Two distinct homotopic augmentations with a certificate K satisfying
    K o d = left1 - left, found among the searched augmentations or by
    shifting one of them. Falls back to left1 = left when no attempt
    yields a distinct pair.
    """
    fallback = None
    for _ in range(attempts):
        A, found = augmented_presentation(rng, **kwargs)
        pair = _homotopic_pair(rng, A, found)
        right = _named(rng.choice(found), 'right')
        if pair is not None:
            left, left1, certificate = pair
            return HomotopyInstance(A, _named(left, 'left'), _named(left1, 'shifted'),
                                    certificate, right)
        if fallback is None:
            fallback = HomotopyInstance(A, _named(found[0], 'left'),
                                        _named(found[0], 'shifted'),
                                        HomotopyCertificate(), right)
    logger.info('no distinct homotopic pair; using a constant homotopy')
    return fallback


def random_block(rng):
    kind = rng.choice(('rot', 'hyp', 'neghyp'))
    if kind == 'rot':
        return SmallRotation(rng.choice((1, -1)), window=rng.randint(1, 3))
    if kind == 'hyp':
        return Hyperbolic(Fraction(rng.choice(COEFFICIENTS), rng.randint(1, 3)))
    return NegHyperbolicPair(rng.choice(('+', '-')))


def random_block_path(rng, max_blocks=4):
    return BlockPath(
        tuple(random_block(rng) for _ in range(rng.randint(1, max_blocks))),
        Fraction(rng.randint(1, 6), rng.randint(1, 3)),
    )


def random_orbit(rng, max_blocks=4):
    """
    An orbit whose multiplicity stays inside every rotation window.
    """
    path = random_block_path(rng, max_blocks)
    windows = [b.window for b in path.blocks if isinstance(b, SmallRotation)]
    return OrbitModel(path, rng.randint(1, min(windows + [3])))


def _levels(rng, count):
    return tuple(Fraction(-v, 2) for v in rng.sample(range(1, 4 * count + 2), count))


def random_inventory(rng, max_orbits=5, max_negative=4, max_curves=6):
    """
    Orbits of degree -1..2 (planes only on degree 0), random curves and
    planes with random signs, coefficients and asymptotic data.
    """
    count = rng.randint(1, max_orbits)
    generators = tuple(
        Generator('a{}'.format(i + 1), rng.choice((0, 0, 0, 1, -1, 2)))
        for i in range(count)
    )
    ids = [g.id for g in generators]
    curves = []
    for _ in range(rng.randint(0, max_curves)):
        negative = rng.randint(0, max_negative)
        curves.append(RigidCurveDatum.curve(
            rng.choice(ids),
            [rng.choice(ids) for _ in range(negative)],
            sign=rng.choice((1, -1)),
            coeff=Fraction(rng.choice(COEFFICIENTS), rng.randint(1, 2)),
            levels=_levels(rng, negative),
        ))
    planes = []
    for g in generators:
        if g.degree != 0:
            continue
        for side in ('+', '-'):
            for _ in range(rng.randint(0, 2)):
                magnitude = Fraction(rng.randint(1, 4), rng.randint(1, 3))
                planes.append(RigidCurveDatum.plane(
                    g.id, side, sign=rng.choice((1, -1)),
                    k=-magnitude if side == '+' else magnitude,
                ))
    return Inventory(
        GradingSpec.integer(), generators, tuple(curves), tuple(planes),
        rng.choice((Fraction(1), Fraction(1, 2), Fraction(2))),
    )


def presentation_inventory(rng, A, plus, minus):
    """
    One curve per term of each differential, negative ends in canonical
    order, and one plane of sign +-1 per unit of each integer augmentation
    value, on the plus side for `plus` and the minus side for `minus`.
    """
    curves = []
    for gid in A.ids:
        for monomial, coefficient in A.d(gid).terms.items():
            word = monomial.word()
            curves.append(RigidCurveDatum.curve(
                gid, word,
                sign=1 if coefficient > 0 else -1,
                coeff=abs(coefficient),
                levels=_levels(rng, len(word)),
            ))
    planes = []
    for side, augmentation in (('+', plus), ('-', minus)):
        for gid, value in sorted(augmentation.values.items()):
            if value.denominator != 1:
                raise ValueError('plane counts need integer values, got {} on {}.'.format(
                    value, gid))
            for _ in range(abs(value.numerator)):
                magnitude = Fraction(rng.randint(1, 4), rng.randint(1, 3))
                planes.append(RigidCurveDatum.plane(
                    gid, side, sign=1 if value > 0 else -1,
                    k=-magnitude if side == '+' else magnitude,
                ))
    return Inventory(
        A.grading, tuple(A.generators), tuple(curves), tuple(planes),
        rng.choice((Fraction(1), Fraction(1, 2), Fraction(2))),
    )


def random_presentation_inventory(rng, max_generators=4, max_word=3):
    """
    The inventory of a random augmented presentation with two of its
    augmentations as plane counts.
    """
    A, found = augmented_presentation(rng, max_generators, max_word, cyclic=False)
    return presentation_inventory(rng, A, rng.choice(found), rng.choice(found))


def _random_tree(rng, count):
    parents = {k: rng.randrange(k) for k in range(1, count)}
    children = {k: [c for c, p in parents.items() if p == k] for k in range(count)}
    plus = {0: 'r'}
    plus.update({k: rng.choice(('a', 'b', 'c')) for k in range(1, count)})
    vertices = []
    edges = [Edge('in', plus[0], None, 'v1')]
    for k in range(count):
        key = 'v{}'.format(k + 1)
        size = len(children[k]) + rng.randint(1, 2)
        slots = rng.sample(range(size), len(children[k]))
        child_at = dict(zip(slots, children[k]))
        minus = []
        for position in range(size):
            edge_key = '{}e{}'.format(key, position + 1)
            if position in child_at:
                child = child_at[position]
                minus.append(plus[child])
                edges.append(Edge(edge_key, plus[child], key,
                                  'v{}'.format(child + 1), position))
                continue
            orbit = rng.choice(('a', 'b'))
            minus.append(orbit)
            if rng.random() < 0.3:
                plane_key = '{}p{}'.format(key, position + 1)
                vertices.append(Vertex(plane_key, RigidCurveDatum.plane(
                    orbit, rng.choice(('+', '-')), sign=rng.choice((1, -1)))))
                edges.append(Edge(edge_key, orbit, key, plane_key, position))
            else:
                edges.append(Edge(edge_key, orbit, key, None, position))
        vertices.append(Vertex(key, RigidCurveDatum.curve(
            plus[k], minus, sign=rng.choice((1, -1)))))
    return Tree(tuple(vertices), tuple(edges)).validate()


def random_cancellation_family(rng, curve_vertices=None):
    """
    A tree with two or three curve vertices, at most six ends and two free
    ends on the same orbit.
    """
    count = curve_vertices or rng.choice((2, 3))
    while True:
        tree = _random_tree(rng, count)
        ends = tree.ends()
        free = [e for e in ends if e.target is None]
        if len(ends) <= MAX_ENDS and any(
                a.orbit == b.orbit for a, b in itertools.combinations(free, 2)):
            return tree
