"""
Combinatorial gluing oracle.

Rigid curves in the symplectization of the dividing set and rigid planes in
the two fillings are glued along trees. Shapes with at most one curve
vertex are solved branch by branch through the explicit normal-section
equations and counted with their signs; the total must equal the
bilinearized differential. Trees with two or more curve vertices cancel in
pairs under a transposition of free ends.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
from math import factorial
from typing import Dict, List, Optional, Tuple

import sympy

from .base_component import BaseComponent
from .bilinearization import Augmentation, bilinearize, hat_id
from .errors import ConsistencyError, GluingError
from .graded_algebra import (
    CdgaPresentation,
    Generator,
    GradingSpec,
    Monomial,
    Polynomial,
    normalize_word,
)
from .linalg import SparseMatrix

logger = logging.getLogger(__name__)

CURVE = 'curve'
PLANE = 'plane'


def _sympy_rational(value):
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


@dataclass(frozen=True)
class RigidCurveDatum:
    """
    A rigid curve of the dividing set (kind 'curve': positive orbit, ordered
    negative orbits, boundary levels) or a rigid plane of a filling (kind
    'plane': orbit, side, asymptotic coefficient k with -k > 0 on the plus
    side and k > 0 on the minus side).
    """
    kind: str
    plus: str
    minus: Tuple[str, ...] = ()
    sign: int = 1
    coeff: Fraction = Fraction(1)
    levels: Tuple[Fraction, ...] = ()
    side: Optional[str] = None
    k: Optional[Fraction] = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise GluingError('sign of {} must be +1 or -1.'.format(self.plus))
        if self.kind == CURVE:
            if not self.levels:
                object.__setattr__(
                    self, 'levels',
                    tuple(Fraction(-(i + 1)) for i in range(len(self.minus)))
                )
            if len(self.levels) != len(self.minus):
                raise GluingError('one boundary level per negative end needed.')
            if any(level >= 0 for level in self.levels):
                raise GluingError('boundary levels must be negative.')
        elif self.kind == PLANE:
            if self.side not in ('+', '-'):
                raise GluingError('plane side must be "+" or "-".')
            if self.k is None:
                object.__setattr__(self, 'k', Fraction(-1 if self.side == '+' else 1))
            if (self.side == '+' and self.k >= 0) or (self.side == '-' and self.k <= 0):
                raise GluingError(
                    'plane on side {} has asymptotic coefficient {} of the wrong '
                    'sign.'.format(self.side, self.k)
                )
        else:
            raise GluingError('unknown datum kind {!r}.'.format(self.kind))

    @classmethod
    def curve(cls, plus, minus, sign=1, coeff=1, levels=()):
        return cls(CURVE, plus, tuple(minus), sign, Fraction(coeff),
                   tuple(Fraction(v) for v in levels))

    @classmethod
    def plane(cls, orbit, side, sign=1, k=None):
        return cls(PLANE, orbit, sign=sign, side=side,
                   k=None if k is None else Fraction(k))

    @property
    def is_plane(self):
        return self.kind == PLANE

    @property
    def orbit(self):
        return self.plus

    @property
    def negative_count(self):
        return len(self.minus)


@dataclass(frozen=True)
class Vertex:
    key: str
    datum: RigidCurveDatum


@dataclass(frozen=True)
class Edge:
    """
    `source` is None for the incoming edge of the root, `target` is None
    for a free end; `position` is the index of the edge among the negative
    ends of its source.
    """
    key: str
    orbit: str
    source: Optional[str] = None
    target: Optional[str] = None
    position: Optional[int] = None


@dataclass(frozen=True)
class Tree:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]

    def vertex(self, key):
        for vertex in self.vertices:
            if vertex.key == key:
                return vertex
        raise GluingError('unknown vertex {!r}.'.format(key))

    def incoming(self, key):
        return [e for e in self.edges if e.target == key]

    def outgoing(self, key):
        return sorted((e for e in self.edges if e.source == key),
                      key=lambda e: e.position)

    @property
    def root(self):
        roots = [e.target for e in self.edges if e.source is None]
        if len(roots) != 1:
            raise GluingError('a tree has exactly one root edge.')
        return roots[0]

    def curve_vertices(self):
        return [v for v in self.vertices if not v.datum.is_plane]

    def plane_vertices(self):
        return [v for v in self.vertices if v.datum.is_plane]

    def is_gluing(self, edge):
        return edge.source is not None and edge.target is not None and \
            not self.vertex(edge.target).datum.is_plane

    def ends(self):
        """
        Free and plane-capped negative ends of the curve vertices, in vertex
        order then position order.
        """
        result = []
        for vertex in self.curve_vertices():
            for edge in self.outgoing(vertex.key):
                if not self.is_gluing(edge):
                    result.append(edge)
        return result

    def validate(self):
        """
        :raise GluingError: unless every vertex has exactly one incoming
        edge, the tree is connected, and orbits agree along edges.
        """
        keys = [v.key for v in self.vertices]
        if len(set(keys)) != len(keys):
            raise GluingError('duplicate vertex keys.')
        for vertex in self.vertices:
            incoming = self.incoming(vertex.key)
            if len(incoming) != 1:
                raise GluingError(
                    'vertex {} has {} incoming edges.'.format(vertex.key, len(incoming))
                )
            if incoming[0].orbit != vertex.datum.plus:
                raise GluingError('orbit mismatch entering {}.'.format(vertex.key))
            outgoing = self.outgoing(vertex.key)
            if vertex.datum.is_plane:
                if outgoing:
                    raise GluingError('plane {} has negative ends.'.format(vertex.key))
                continue
            if [e.position for e in outgoing] != list(range(vertex.datum.negative_count)):
                raise GluingError('negative ends of {} are not all attached.'.format(
                    vertex.key))
            for edge in outgoing:
                if edge.orbit != vertex.datum.minus[edge.position]:
                    raise GluingError('orbit mismatch on edge {}.'.format(edge.key))
        for edge in self.edges:
            if edge.source is not None and edge.source not in keys:
                raise GluingError('edge {} leaves an unknown vertex.'.format(edge.key))
            if edge.target is not None and edge.target not in keys:
                raise GluingError('edge {} enters an unknown vertex.'.format(edge.key))
        reached = {self.root}
        frontier = [self.root]
        while frontier:
            key = frontier.pop()
            for edge in self.outgoing(key):
                if edge.target is not None:
                    if edge.target in reached:
                        raise GluingError('cycle through {}.'.format(edge.target))
                    reached.add(edge.target)
                    frontier.append(edge.target)
        if reached != set(keys):
            raise GluingError('tree is not connected.')
        return self


@dataclass(frozen=True)
class MultisectionBranch:
    """
    `ranks[i]` is the rank (1-based) of the coefficient assigned to the
    i-th negative end; `values` are the ordered coefficients.
    """
    ranks: Tuple[int, ...]
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if sorted(self.ranks) != list(range(1, len(self.ranks) + 1)):
            raise GluingError('branch ranks must be a permutation.')
        if len(self.values) != len(self.ranks):
            raise GluingError('one coefficient per negative end needed.')
        if any(v <= 0 for v in self.values) or any(
                a >= b for a, b in zip(self.values, self.values[1:])):
            raise GluingError('coefficients must be positive and strictly increasing.')

    def coefficient(self, index):
        return self.values[self.ranks[index] - 1]

    def vector(self):
        return tuple(self.coefficient(i) for i in range(len(self.ranks)))


def branch_family(count, values=None):
    """
    All count! branches, each of weight 1/count!.
    """
    values = tuple(Fraction(v) for v in (values or range(1, count + 1)))
    return [
        MultisectionBranch(tuple(ranks), values)
        for ranks in itertools.permutations(range(1, count + 1))
    ]


@dataclass(frozen=True)
class GluingShape:
    tree: Tree
    eps_sigma: Fraction = Fraction(1)
    context: Optional[CdgaPresentation] = None

    @property
    def N(self):
        return len(self.tree.curve_vertices())

    def neck_length(self, edge):
        prefix = 'nl' if self.tree.is_gluing(edge) else 'l'
        return sympy.Symbol('{}_{}'.format(prefix, edge.key), real=True)


def plane_shape(plane, eps_sigma=Fraction(1), context=None):
    tree = Tree(
        (Vertex('p', plane),),
        (Edge('in', plane.orbit, None, 'p'),),
    )
    return GluingShape(tree.validate(), Fraction(eps_sigma), context)


def one_curve_shape(curve, uncapped, planes, eps_sigma=Fraction(1), context=None):
    """
    One curve vertex with the negative end `uncapped` (0-based) left free
    and every other end capped by planes[position].
    """
    vertices = [Vertex('v', curve)]
    edges = [Edge('in', curve.plus, None, 'v')]
    for position, orbit in enumerate(curve.minus):
        key = 'e{}'.format(position + 1)
        if position == uncapped:
            edges.append(Edge(key, orbit, 'v', None, position))
        else:
            plane = planes[position]
            vertex_key = 'p{}'.format(position + 1)
            vertices.append(Vertex(vertex_key, plane))
            edges.append(Edge(key, orbit, 'v', vertex_key, position))
    return GluingShape(Tree(tuple(vertices), tuple(edges)).validate(),
                       Fraction(eps_sigma), context)


def normal_section(shape, coefficients, basis='mu_tilde', lengths=None):
    """
    The obstruction section of a glued configuration: each curve vertex v
    with coefficient c contributes -c e^(-eps nl) on its incoming gluing
    edge and c e^(-eps s_j) on its j-th negative end; each plane on edge i
    contributes -k e^(-eps l_i). In the rescaled basis a curve vertex alone
    contributes c (1, ..., 1).

    :param coefficients: mapping curve vertex key -> coefficient.
    :param lengths: optional mapping edge key -> neck length value.
    :return: mapping edge key -> sympy expression.
    """
    if basis not in ('mu', 'mu_tilde'):
        raise GluingError('unknown basis {!r}.'.format(basis))
    tree = shape.tree
    eps = _sympy_rational(shape.eps_sigma)
    lengths = lengths or {}
    vector = {}
    scale = {}
    for vertex in tree.curve_vertices():
        for edge in tree.outgoing(vertex.key):
            level = _sympy_rational(vertex.datum.levels[edge.position])
            scale[edge.key] = sympy.exp(-eps * level)
            vector[edge.key] = sympy.Integer(0)

    def length_of(edge):
        if edge.key in lengths:
            return sympy.sympify(lengths[edge.key])
        return shape.neck_length(edge)

    for vertex in tree.curve_vertices():
        if vertex.key not in coefficients:
            raise GluingError('no coefficient for vertex {}.'.format(vertex.key))
        value = coefficients[vertex.key]
        if isinstance(value, (int, Fraction)):
            c = _sympy_rational(value)
        else:
            c = sympy.sympify(value)
        incoming = tree.incoming(vertex.key)[0]
        if incoming.source is not None:
            vector[incoming.key] -= c * sympy.exp(-eps * length_of(incoming))
        for edge in tree.outgoing(vertex.key):
            vector[edge.key] += c * scale[edge.key]
    for vertex in tree.plane_vertices():
        edge = tree.incoming(vertex.key)[0]
        if edge.source is None:
            continue
        k = _sympy_rational(vertex.datum.k)
        vector[edge.key] -= k * sympy.exp(-eps * length_of(edge))
    if basis == 'mu_tilde':
        vector = {key: sympy.simplify(value / scale[key])
                  for key, value in vector.items()}
    return vector


@dataclass
class BranchSolution:
    coefficient: Fraction
    lengths: Dict[str, float]
    exact_lengths: Dict[str, object] = field(default_factory=dict)


def _one_curve_parts(shape):
    tree = shape.tree
    curves = tree.curve_vertices()
    if len(curves) != 1:
        raise GluingError('shape has {} curve vertices, expected one.'.format(len(curves)))
    vertex = curves[0]
    free = []
    capped = []
    for edge in tree.outgoing(vertex.key):
        if edge.target is None:
            free.append(edge)
        else:
            capped.append((edge, tree.vertex(edge.target).datum))
    if len(free) != 1:
        raise GluingError('a one-curve shape leaves exactly one end uncapped.')
    return vertex, free[0], capped


def solve_branch(shape, branch):
    """
    Solve the normal-section equation on one branch. A solution exists iff
    every minus-side plane sits on an end of lower rank than the uncapped
    end and every plus-side plane on an end of higher rank; it is then
    unique with c the uncapped coefficient.

    :return: BranchSolution or None.
    """
    vertex, free, capped = _one_curve_parts(shape)
    if len(branch.ranks) != vertex.datum.negative_count:
        raise GluingError('branch size does not match the curve.')
    top = branch.coefficient(free.position)
    for edge, plane in capped:
        gap = top - branch.coefficient(edge.position)
        if gap == 0 or (gap > 0) != (plane.k > 0):
            return None
    eps = _sympy_rational(shape.eps_sigma)
    exact = {}
    for edge, plane in capped:
        gap = top - branch.coefficient(edge.position)
        level = _sympy_rational(vertex.datum.levels[edge.position])
        exact[edge.key] = level - sympy.log(_sympy_rational(gap / plane.k)) / eps
    section = normal_section(shape, {vertex.key: top}, lengths=exact)
    for edge in shape.tree.outgoing(vertex.key):
        target = _sympy_rational(branch.coefficient(edge.position))
        if sympy.simplify(section[edge.key] - target) != 0:
            raise ConsistencyError(
                'branch solution leaves residual on {}.'.format(edge.key), item=edge.key
            )
    return BranchSolution(
        top, {k: float(sympy.N(v)) for k, v in exact.items()}, exact
    )


def _koszul_sign(curve, context):
    if context is None:
        return 1
    sign, _ = normalize_word(curve.minus, context)
    return sign


def count_contribution(shape, branches=None):
    """
    Signed count of one shape. A lone plane counts +sign on the plus side
    and -sign on the minus side; a one-curve shape counts the solvable
    branches, each of weight 1/N!, times the curve coefficient and sign and
    the signs of its planes.

    :raise GluingError: for shapes with two or more curve vertices.
    """
    tree = shape.tree
    if shape.N == 0:
        if len(tree.vertices) != 1:
            raise GluingError('a shape without curves is a single plane.')
        plane = tree.vertices[0].datum
        return Fraction(plane.sign if plane.side == '+' else -plane.sign)
    if shape.N > 1:
        raise GluingError('shapes with {} curve vertices cancel in families; '
                          'use verify_cancellation.'.format(shape.N))
    vertex, _, capped = _one_curve_parts(shape)
    curve = vertex.datum
    count = curve.negative_count
    if branches is None:
        branches = branch_family(count)
    solved = sum(1 for branch in branches if solve_branch(shape, branch) is not None)
    if not solved:
        return Fraction(0)
    sign = curve.sign * _koszul_sign(curve, shape.context)
    for _, plane in capped:
        sign *= plane.sign
    return Fraction(solved, factorial(count)) * curve.coeff * sign


def orientation_sign(tree, ranks):
    """
    Sign of det(P_h L0): L0 has one row per end, the indicator column of
    each curve vertex's ends and unit columns for every end that is not
    the first of its vertex; P_h permutes rows by the ranks h.
    """
    ends = tree.ends()
    index = {edge.key: i for i, edge in enumerate(ends)}
    columns = []
    for vertex in tree.curve_vertices():
        own = [index[e.key] for e in tree.outgoing(vertex.key) if e.key in index]
        if not own:
            continue
        columns.append({i: 1 for i in own})
        for i in own[1:]:
            columns.append({i: 1})
    permuted = [{ranks[i]: v for i, v in column.items()} for column in columns]
    value = SparseMatrix.from_columns(permuted, len(ends)).det()
    if value not in (1, -1):
        raise ConsistencyError('orientation determinant {} is not a unit.'.format(value))
    return int(value)


def _is_solution(ranks, free, minus_capped, plus_capped):
    free_ranks = [ranks[i] for i in free]
    low, high = min(free_ranks), max(free_ranks)
    return all(ranks[i] < low for i in minus_capped) and \
        all(ranks[i] > high for i in plus_capped)


@dataclass
class CancellationCertificate:
    total: Fraction = Fraction(0)
    trees: int = 0
    pairs: int = 0


@dataclass(frozen=True)
class Inventory:
    """
    Rigid curves of the dividing set and rigid planes of the two fillings,
    over the orbits `generators`.
    """
    grading: GradingSpec
    generators: Tuple[Generator, ...]
    curves: Tuple[RigidCurveDatum, ...] = ()
    planes: Tuple[RigidCurveDatum, ...] = ()
    eps_sigma: Fraction = Fraction(1)

    def context(self):
        return CdgaPresentation(self.grading, self.generators)

    def presentation(self):
        """
        Orbits with the differential counted by the curves.
        """
        context = self.context()
        differential = {}
        for curve in self.curves:
            term = Polynomial.from_word(curve.minus, context, curve.coeff * curve.sign)
            differential[curve.plus] = differential.get(curve.plus, Polynomial()) + term
        return context.with_differential(differential)

    def augmentations(self):
        plus, minus = {}, {}
        for plane in self.planes:
            target = plus if plane.side == '+' else minus
            target[plane.orbit] = target.get(plane.orbit, Fraction(0)) + plane.sign
        return Augmentation(plus, name='plus'), Augmentation(minus, name='minus')

    def check(self):
        context = self.context()
        for plane in self.planes:
            if context.degree(plane.orbit) != 0:
                raise GluingError('plane on {} of nonzero degree.'.format(plane.orbit))
        for curve in self.curves:
            for orbit in (curve.plus,) + curve.minus:
                context.generator(orbit)
        return self


def enumerate_shapes(inventory):
    """
    Every lone plane and every one-curve shape: a curve with one end left
    uncapped and a plane on each other end.
    """
    inventory.check()
    context = inventory.context()
    eps = inventory.eps_sigma
    by_orbit = {}
    for plane in inventory.planes:
        by_orbit.setdefault(plane.orbit, []).append(plane)
    shapes = [plane_shape(plane, eps, context) for plane in inventory.planes]
    for curve in inventory.curves:
        for uncapped in range(curve.negative_count):
            options = [
                [None] if position == uncapped else by_orbit.get(orbit, [])
                for position, orbit in enumerate(curve.minus)
            ]
            for choice in itertools.product(*options):
                shapes.append(one_curve_shape(curve, uncapped, dict(enumerate(choice)),
                                              eps, context))
    logger.debug('enumerated %d shapes', len(shapes))
    return shapes


@dataclass
class GluingReport:
    differential: Dict[str, Polynomial]
    expected: Dict[str, Polynomial]
    mismatches: List[tuple] = field(default_factory=list)

    @property
    def agree(self):
        return not self.mismatches

    def raise_for_status(self):
        if self.mismatches:
            gid, monomial, got, wanted = self.mismatches[0]
            raise ConsistencyError(
                'oracle differs on {} at {}: {} != {}'.format(gid, monomial, got, wanted),
                item=(gid, monomial),
            )
        return self


class GluingOracle(BaseComponent):
    """
    Aggregate shape counts into a differential and verify it against the
    bilinearized formula; verify that families of larger trees cancel.

    Examples:
    >>> from pybilin import SerialBackend
    >>> oracle = GluingOracle(SerialBackend())
    >>> oracle.aggregate_differential(inventory).agree
    True
    """
    def __init__(self, backend, name='gluing'):
        super().__init__(backend, name)

    def _shape_term(self, shape):
        contribution = count_contribution(shape)
        tree = shape.tree
        root = tree.vertex(tree.root)
        if shape.N == 0:
            return root.datum.orbit, Monomial(), contribution
        _, free, _ = _one_curve_parts(shape)
        return root.datum.plus, Monomial.of(hat_id(free.orbit)), contribution

    def aggregate_differential(self, inventory):
        """
        Sum the counts of all N = 0, 1 shapes and compare them coefficient
        by coefficient with the bilinearized differential of the curve
        presentation and the plane augmentations.
        """
        shapes = enumerate_shapes(inventory)
        terms = {}
        for gid, monomial, value in self.backend.map(self._shape_term, shapes):
            if value:
                bucket = terms.setdefault(gid, {})
                bucket[monomial] = bucket.get(monomial, Fraction(0)) + value
        presentation = inventory.presentation()
        plus, minus = inventory.augmentations()
        package = bilinearize(presentation, plus, minus, check_augmentations=False)
        differential = {}
        expected = {}
        mismatches = []
        for gid in presentation.ids:
            got = Polynomial(terms.get(gid, {}))
            hid = hat_id(gid)
            wanted = package.d1(hid) + Polynomial.constant(package.d0(hid))
            differential[gid] = got
            expected[gid] = wanted
            for monomial in sorted(set(got.terms) | set(wanted.terms)):
                if got.coefficient(monomial) != wanted.coefficient(monomial):
                    mismatches.append((gid, str(monomial), got.coefficient(monomial),
                                       wanted.coefficient(monomial)))
        if mismatches:
            logger.warning('gluing oracle found %d mismatches', len(mismatches))
        return GluingReport(differential, expected, mismatches)

    def _cancel_tree(self, tree):
        tree.validate()
        if len(tree.curve_vertices()) < 2:
            raise GluingError('cancellation families need two or more curve vertices.')
        ends = tree.ends()
        free = [i for i, e in enumerate(ends) if e.target is None]
        minus_capped = [i for i, e in enumerate(ends)
                        if e.target is not None and tree.vertex(e.target).datum.side == '-']
        plus_capped = [i for i, e in enumerate(ends)
                       if e.target is not None and tree.vertex(e.target).datum.side == '+']
        swap = None
        for a, b in itertools.combinations(free, 2):
            if ends[a].orbit == ends[b].orbit:
                swap = (a, b)
                break
        if swap is None or not free:
            raise GluingError('family is not admissible: no symmetric pair of free ends.')
        weight = Fraction(1)
        factor = 1
        for vertex in tree.curve_vertices():
            weight /= factorial(vertex.datum.negative_count)
            factor *= vertex.datum.sign
        for vertex in tree.plane_vertices():
            factor *= vertex.datum.sign
        total = Fraction(0)
        pairs = 0
        a, b = swap
        for ranks in itertools.permutations(range(len(ends))):
            if not _is_solution(ranks, free, minus_capped, plus_capped):
                continue
            partner = list(ranks)
            partner[a], partner[b] = ranks[b], ranks[a]
            partner = tuple(partner)
            if not _is_solution(partner, free, minus_capped, plus_capped):
                raise ConsistencyError('solution without a partner.', item=ranks)
            sign = orientation_sign(tree, ranks)
            if orientation_sign(tree, partner) != -sign:
                raise ConsistencyError('partner has the same orientation.', item=ranks)
            total += sign * weight * factor
            pairs += 1
        return total, pairs // 2

    def verify_cancellation(self, trees):
        """
        Pair every solution of every tree with its transposed partner of
        opposite orientation and check the signed weighted sum is zero.

        :raise ConsistencyError: on an unpaired solution or nonzero total.
        """
        certificate = CancellationCertificate()
        for total, pairs in self.backend.map(self._cancel_tree, list(trees)):
            certificate.total += total
            certificate.trees += 1
            certificate.pairs += pairs
        if certificate.total:
            raise ConsistencyError(
                'cancellation total is {}.'.format(certificate.total), item=certificate
            )
        return certificate
