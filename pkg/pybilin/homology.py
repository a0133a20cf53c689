"""
Exact homology over Q and the vanishing criterion for bilinearized
algebras.

The criterion is decided four independent ways (homotopy solvable,
fundamental class zero, augmentation of the bilinearized algebra found,
unit not exact in a word-length truncation) and the answers must agree.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
from typing import Dict, List, Optional

from .base_component import BaseComponent
from .bilinearization import (
    Augmentation,
    BilinearizedPackage,
    base_id,
    bilinearize,
    capping_weight,
    hat_id,
)
from .config import DEFAULT_WORD_BOUND
from .errors import AugmentationError, ConsistencyError, PresentationError
from .graded_algebra import (
    UNIT,
    Monomial,
    Polynomial,
    apply_differential,
    evaluate,
    substitute,
)
from .linalg import SparseMatrix

logger = logging.getLogger(__name__)


class GradedChainComplex:
    """
    Finite graded complex over Q with a degree -1 differential.

    :param grading: GradingSpec of the degrees.
    :param bases: mapping degree -> ordered list of basis labels.
    :param differentials: mapping degree -> SparseMatrix from the basis in
    that degree to the basis one degree lower. Missing degrees are zero.
    """
    def __init__(self, grading, bases, differentials=None):
        self.grading = grading
        self.bases = {
            grading.reduce(deg): list(labels)
            for deg, labels in bases.items() if labels
        }
        self.differentials = {}
        for deg, matrix in (differentials or {}).items():
            deg = grading.reduce(deg)
            expected = (len(self.basis(self.target(deg))), len(self.basis(deg)))
            if matrix.shape != expected:
                raise ValueError(
                    'differential in degree {} has shape {}, expected {}.'.format(
                        deg, matrix.shape, expected
                    )
                )
            self.differentials[deg] = matrix

    def degrees(self):
        return sorted(self.bases)

    def basis(self, deg):
        return self.bases.get(self.grading.reduce(deg), [])

    def target(self, deg):
        return self.grading.shift(deg, -1)

    def source(self, deg):
        return self.grading.shift(deg, 1)

    def matrix(self, deg):
        deg = self.grading.reduce(deg)
        if deg in self.differentials:
            return self.differentials[deg]
        return SparseMatrix({}, (len(self.basis(self.target(deg))),
                                 len(self.basis(deg))))

    def check(self):
        """
        :raise ConsistencyError: naming the first degree where d^2 != 0.
        """
        for deg in self.degrees():
            if not (self.matrix(self.target(deg)) @ self.matrix(deg)).is_zero():
                raise ConsistencyError(
                    'd^2 != 0 starting in degree {}.'.format(deg), item=deg
                )
        return self


@dataclass
class HomologySummary:
    dims: Dict[int, int] = field(default_factory=dict)
    representatives: Dict[int, list] = field(default_factory=dict)
    boundaries: Dict[int, list] = field(default_factory=dict)

    def total(self):
        return sum(self.dims.values())

    def nonzero_dims(self):
        return {deg: n for deg, n in sorted(self.dims.items()) if n}


@dataclass
class HomotopyCertificate:
    """
    Values K(v) on the generators of degree -1; the derivation they
    determine satisfies K(d x) = (left - right)(x).
    """
    values: Dict[str, Fraction] = field(default_factory=dict)

    def __call__(self, gid):
        return self.values.get(gid, Fraction(0))

    def is_zero(self):
        return not any(self.values.values())


@dataclass
class FundamentalClass:
    """
    The functional d0 evaluated on a basis of the module homology.
    `evaluations` lists (degree, representative, value).
    """
    evaluations: list = field(default_factory=list)

    @property
    def is_zero(self):
        return all(not value for _, _, value in self.evaluations)

    def witness(self):
        for evaluation in self.evaluations:
            if evaluation[2]:
                return evaluation
        return None


@dataclass
class CriterionVerdict:
    nonvanishing: bool
    homotopic: bool
    class_zero: bool
    augmentation_found: bool
    unit_not_exact: bool
    word_bound: int
    certificate: Optional[HomotopyCertificate] = None
    bilin_augmentation: Optional[Augmentation] = None
    class_witness: Optional[tuple] = None
    module_dims: Dict[int, int] = field(default_factory=dict)
    algebra_dims: Dict[int, int] = field(default_factory=dict)
    series_dims: Dict[int, int] = field(default_factory=dict)

    @property
    def sub_results(self):
        return (self.homotopic, self.class_zero, self.augmentation_found,
                self.unit_not_exact)


@dataclass
class TransportMap:
    """
    Algebra automorphism of the hatted algebra: identity plus `constant`
    on degree-0 hats plus the linear part of `linear` - 1.
    """
    constant: Dict[str, Fraction]
    linear: SparseMatrix
    images: Dict[str, Polynomial]
    dims_before: Dict[int, int]
    dims_after: Dict[int, int]

    def is_identity(self):
        return not any(self.constant.values()) and \
            self.linear == SparseMatrix.identity(self.linear.shape[0])


def monomials_up_to(ctx, ids, word_bound):
    """
    Canonical monomials in `ids` of word length <= word_bound.
    """
    ids = sorted(ids)

    def extend(position, remaining, factors):
        if position == len(ids):
            yield Monomial(tuple(factors))
            return
        gid = ids[position]
        top = min(remaining, 1) if ctx.is_odd(gid) else remaining
        for exponent in range(top + 1):
            step = factors + [(gid, exponent)] if exponent else factors
            yield from extend(position + 1, remaining - exponent, step)

    return sorted(extend(0, word_bound, []))


def complex_from_maps(grading, labels_by_degree, image_of):
    """
    Assemble a complex from a callable giving the image of each label as a
    mapping label -> coefficient.
    """
    bases = {deg: sorted(labels) for deg, labels in labels_by_degree.items()}
    index = {
        deg: {label: i for i, label in enumerate(labels)}
        for deg, labels in bases.items()
    }
    differentials = {}
    for deg, labels in bases.items():
        target = grading.shift(deg, -1)
        target_index = index.get(target, {})
        columns = []
        for label in labels:
            column = {}
            for other, value in image_of(label).items():
                if other not in target_index:
                    raise ConsistencyError(
                        'image of {} leaves the complex at {}.'.format(label, other),
                        item=label,
                    )
                column[target_index[other]] = value
            columns.append(column)
        differentials[deg] = SparseMatrix.from_columns(
            columns, len(bases.get(target, []))
        )
    return GradedChainComplex(grading, bases, differentials)


def homotopy_row(p, A, left, right, degree=-1):
    """
    Coefficients of K(v), v of the given degree, in K(p) where K is the
    derivation with left-capped prefixes and right-capped suffixes.
    """
    target = A.grading.reduce(degree)
    row = {}
    for monomial, coefficient in p.terms.items():
        word = monomial.word()
        for gid, exponent in monomial.factors:
            if A.degree(gid) != target:
                continue
            rest = list(word)
            rest.remove(gid)
            if any(A.is_odd(y) for y in rest):
                continue
            weight = capping_weight(rest, left, right)
            if weight:
                row[gid] = row.get(gid, Fraction(0)) + coefficient * exponent * weight
    return {gid: value for gid, value in row.items() if value}


def check_homotopy(A, left, right, certificate):
    """
    Whether K(d x) = (left - right)(x) for every generator x.
    """
    for gid in A.ids:
        row = homotopy_row(A.d(gid), A, left, right)
        value = sum((c * certificate(v) for v, c in row.items()), Fraction(0))
        if value != left(gid) - right(gid):
            return False
    return True


def solve_homotopy(A, left, right):
    """
    Solve K(d x) = (left - right)(x) for the values of K on degree -1
    generators, or prove infeasibility by exact rank.

    :return: HomotopyCertificate, or None when no homotopy exists.
    """
    unknowns = list(A.ids_of_degree(-1))
    equations = list(A.ids_of_degree(0))
    column = {gid: j for j, gid in enumerate(unknowns)}
    rows = {}
    rhs = {}
    for i, gid in enumerate(equations):
        row = homotopy_row(A.d(gid), A, left, right)
        rows[i] = {column[v]: c for v, c in row.items()}
        difference = left(gid) - right(gid)
        if difference:
            rhs[i] = difference
    system = SparseMatrix(rows, (len(equations), len(unknowns)))
    solution = system.solve(rhs)
    if solution is None:
        logger.info('no homotopy: system of rank %d is inconsistent', system.rank())
        return None
    certificate = HomotopyCertificate(
        {gid: solution.get(j, Fraction(0)) for j, gid in enumerate(unknowns)}
    )
    if not check_homotopy(A, left, right, certificate):
        raise ConsistencyError('solved homotopy fails its own equations.')
    return certificate


def shift_augmentation(A, augmentation, certificate, name=''):
    """
    augmentation + K o d, with K extended as a derivation at `augmentation`.
    """
    values = dict(augmentation.values)
    for gid in A.ids_of_degree(0):
        row = homotopy_row(A.d(gid), A, augmentation, augmentation)
        shift = sum((c * certificate(v) for v, c in row.items()), Fraction(0))
        values[gid] = augmentation(gid) + shift
    return Augmentation(values, name=name)


def symmetric_series(hdims, word_bound, grading):
    """
    Dimensions of the graded-commutative algebra on classes with the given
    degree counts, per word length and degree, up to `word_bound`.

    :param hdims: mapping degree -> number of classes.
    :return: mapping word length -> {degree: count}.
    """
    states = {(0, grading.reduce(0)): 1}
    for deg, count in sorted(hdims.items()):
        odd = deg % 2 == 1
        for _ in range(count):
            updated = {}
            for (length, total), n in states.items():
                top = 1 if odd else word_bound - length
                for exponent in range(min(top, word_bound - length) + 1):
                    key = (length + exponent, grading.reduce(total + exponent * deg))
                    updated[key] = updated.get(key, 0) + n
            states = updated
    series = {}
    for (length, deg), n in states.items():
        series.setdefault(length, {})[deg] = series.get(length, {}).get(deg, 0) + n
    return {length: dict(sorted(d.items())) for length, d in sorted(series.items())}


def series_totals(series):
    totals = {}
    for by_degree in series.values():
        for deg, n in by_degree.items():
            totals[deg] = totals.get(deg, 0) + n
    return dict(sorted(totals.items()))


def linear_complex(A):
    """
    Generators with the word-length-1 part of the differential. A complex
    whenever no generator has a constant term in its differential.
    """
    if any(A.d(gid).constant_term for gid in A.ids):
        raise PresentationError('linear part needs differentials without constants.')
    by_degree = {}
    for gid in A.ids:
        by_degree.setdefault(A.degree(gid), []).append(gid)

    def image(gid):
        linear = A.d(gid).word_length_parts().get(1, Polynomial())
        return {m.ids()[0]: c for m, c in linear.terms.items()}

    return complex_from_maps(A.grading, by_degree, image)


class HomologyEngine(BaseComponent):
    """
    Homology of finite complexes and the vanishing criterion.

    Examples:
    >>> from pybilin import SerialBackend
    >>> engine = HomologyEngine(SerialBackend())
    >>> verdict = engine.decide_criterion(A, left, right)
    >>> verdict.nonvanishing
    False
    """
    def __init__(self, backend, name='homology'):
        super().__init__(backend, name)

    def _homology_in_degree(self, chain_complex, deg):
        labels = chain_complex.basis(deg)
        d_out = chain_complex.matrix(deg)
        d_in = chain_complex.matrix(chain_complex.source(deg))
        kernel = d_out.nullspace()
        _, pivots = d_in.rref()
        boundaries = [d_in.column(p) for p in pivots]
        combined = SparseMatrix.from_columns(boundaries + kernel, len(labels))
        _, combined_pivots = combined.rref()
        representatives = [
            kernel[i - len(boundaries)]
            for i in combined_pivots if i >= len(boundaries)
        ]
        dim = len(kernel) - len(boundaries)
        if dim != len(representatives):
            raise ConsistencyError(
                'boundaries are not cycles in degree {}.'.format(deg), item=deg
            )

        def named(vector):
            return {labels[i]: value for i, value in sorted(vector.items())}

        return deg, dim, [named(v) for v in representatives], \
            [named(v) for v in boundaries]

    def homology(self, chain_complex):
        """
        Dimensions, representative cycles and boundary bases, per degree.

        :raise ConsistencyError: if consecutive differentials do not compose
        to zero.
        """
        chain_complex.check()
        results = self.backend.map(
            lambda deg: self._homology_in_degree(chain_complex, deg),
            chain_complex.degrees(),
        )
        summary = HomologySummary()
        for deg, dim, representatives, boundaries in results:
            summary.dims[deg] = dim
            summary.representatives[deg] = representatives
            summary.boundaries[deg] = boundaries
        return summary

    def module_complex(self, package):
        """
        The hatted generators with the linear part of the bilinearized
        differential.
        """
        by_degree = {}
        for hid in package.hat_ids:
            by_degree.setdefault(package.degree(hid), []).append(hid)

        def image(hid):
            return {m.ids()[0]: c for m, c in package.d1(hid).terms.items()}

        return complex_from_maps(package.base.grading, by_degree, image)

    def truncated_algebra_complex(self, package, word_bound=DEFAULT_WORD_BOUND):
        """
        Monomials in the hatted generators of word length <= word_bound with
        the full bilinearized differential, which preserves this filtration.
        """
        algebra = package.algebra
        by_degree = {}
        for monomial in monomials_up_to(algebra, package.hat_ids, word_bound):
            by_degree.setdefault(algebra.monomial_degree(monomial), []).append(monomial)

        def image(monomial):
            return dict(
                apply_differential(Polynomial({monomial: 1}), algebra).terms
            )

        logger.debug('truncated algebra complex has %d monomials',
                     sum(len(v) for v in by_degree.values()))
        return complex_from_maps(package.base.grading, by_degree, image)

    def fundamental_class(self, package):
        """
        Evaluate d0 on a homology basis of the module complex.
        """
        summary = self.homology(self.module_complex(package))
        evaluations = []
        for deg in sorted(summary.representatives):
            for representative in summary.representatives[deg]:
                value = sum(
                    (package.d0(hid) * c for hid, c in representative.items()),
                    Fraction(0),
                )
                evaluations.append((deg, representative, value))
        return FundamentalClass(evaluations)

    def solve_homotopy(self, A, left, right):
        return solve_homotopy(A, left, right)

    def construct_bilin_augmentation(self, package):
        """
        Split the image of d1 into the degree-0 hats, define the augmentation
        as -d0 composed with a right inverse on the image and zero on a
        basis-order complement, and keep it only if it kills the full
        differential.
        """
        grading = package.base.grading
        sources = [h for h in package.hat_ids if package.degree(h) == grading.reduce(1)]
        targets = [h for h in package.hat_ids if package.degree(h) == grading.reduce(0)]
        target_index = {h: i for i, h in enumerate(targets)}
        columns = []
        for hid in sources:
            columns.append({
                target_index[m.ids()[0]]: c for m, c in package.d1(hid).terms.items()
            })
        d1 = SparseMatrix.from_columns(columns, len(targets))
        _, pivots = d1.rref()
        image_basis = [columns[p] for p in pivots]
        with_units = SparseMatrix.from_columns(
            image_basis + [{i: 1} for i in range(len(targets))], len(targets)
        )
        _, extended = with_units.rref()
        complement = [
            i - len(image_basis) for i in extended if i >= len(image_basis)
        ]
        square = SparseMatrix.from_columns(
            image_basis + [{i: 1} for i in complement], len(targets)
        )
        wanted = {}
        for k, p in enumerate(pivots):
            value = -package.d0(sources[p])
            if value:
                wanted[k] = value
        solution = square.transpose().solve(wanted)
        if solution is None:
            raise ConsistencyError('image basis and complement are not a basis.')
        augmentation = Augmentation(
            {targets[i]: v for i, v in solution.items()}, name='bilinearized'
        )
        for hid in package.hat_ids:
            if augmentation.evaluate(package.d(hid)):
                logger.info('constructed augmentation fails on %s', hid)
                return None
        return augmentation

    def unit_is_exact(self, package, word_bound=DEFAULT_WORD_BOUND):
        """
        Whether 1 is a boundary in the word-length truncation; with
        word_bound >= 1 this detects vanishing of the whole homology.
        """
        complex_ = self.truncated_algebra_complex(package, word_bound)
        d = complex_.matrix(1)
        labels = complex_.basis(0)
        unit = {labels.index(UNIT): Fraction(1)}
        columns = [d.column(j) for j in range(d.shape[1])]
        extended = SparseMatrix.from_columns(columns + [unit], len(labels))
        return extended.rank() == d.rank()

    def symmetric_series(self, hdims, word_bound, grading):
        return symmetric_series(hdims, word_bound, grading)

    def decide_criterion(self, A, left, right, word_bound=DEFAULT_WORD_BOUND):
        """
        Decide nonvanishing four ways and check that the answers agree; when
        nonvanishing, check the truncated homology of the bilinearized
        algebra against the symmetric algebra on the module homology.

        :raise ConsistencyError: on any disagreement.
        """
        if word_bound < 1:
            raise ValueError('word_bound must be at least 1.')
        package = bilinearize(A, left, right)
        certificate = self.solve_homotopy(A, left, right)
        fundamental = self.fundamental_class(package)
        bilin_augmentation = self.construct_bilin_augmentation(package)
        unit_not_exact = not self.unit_is_exact(package, word_bound)
        module_dims = self.homology(self.module_complex(package)).dims
        verdict = CriterionVerdict(
            nonvanishing=certificate is not None,
            homotopic=certificate is not None,
            class_zero=fundamental.is_zero,
            augmentation_found=bilin_augmentation is not None,
            unit_not_exact=unit_not_exact,
            word_bound=word_bound,
            certificate=certificate,
            bilin_augmentation=bilin_augmentation,
            class_witness=fundamental.witness(),
            module_dims=module_dims,
        )
        if len(set(verdict.sub_results)) != 1:
            raise ConsistencyError(
                'criterion sub-results disagree: homotopic={}, class zero={}, '
                'augmentation={}, unit not exact={}'.format(*verdict.sub_results),
                item=verdict,
            )
        if verdict.nonvanishing:
            algebra = self.homology(
                self.truncated_algebra_complex(package, word_bound)
            )
            verdict.algebra_dims = dict(sorted(algebra.dims.items()))
            verdict.series_dims = series_totals(
                symmetric_series(module_dims, word_bound, A.grading)
            )
            if {k: v for k, v in verdict.algebra_dims.items() if v} != \
                    {k: v for k, v in verdict.series_dims.items() if v}:
                raise ConsistencyError(
                    'truncated homology {} differs from the symmetric algebra '
                    'series {}.'.format(verdict.algebra_dims, verdict.series_dims),
                    item=verdict,
                )
        logger.info('criterion: %s',
                    'nonvanishing' if verdict.nonvanishing else 'vanishing')
        return verdict

    def homotopy_transport(self, A, left, left1, certificate, right):
        """
        Chain isomorphism between the bilinearized algebras of (left, right)
        and (left1, right), where K o d = left1 - left. The map is the
        identity plus a constant part (seeded with -K) plus a degree
        preserving linear part, solved exactly from the intertwining
        equations.

        :raise AugmentationError: if the certificate is not a homotopy.
        :raise ConsistencyError: if no such isomorphism exists or it fails
        verification.
        """
        if not check_homotopy(A, left1, left, certificate):
            raise AugmentationError('certificate is not a homotopy from left to left1.')
        before = bilinearize(A, left, right)
        after = bilinearize(A, left1, right)
        hats = before.hat_ids
        n = len(hats)
        d = before.module_differential
        d_after = after.module_differential
        grading = A.grading
        zero_hats = [i for i, h in enumerate(hats) if before.degree(h) == grading.reduce(0)]
        seed = {
            i: -certificate(base_id(hats[i])[0]) for i in zero_hats
        }

        # unknowns: L[i][j] for hats of equal degree, then dc[j] on degree-0 hats
        unknowns = [
            ('L', i, j) for j in range(n) for i in range(n)
            if before.degree(hats[i]) == before.degree(hats[j])
        ] + [('c', j) for j in zero_hats]
        column = {u: k for k, u in enumerate(unknowns)}
        rows = {}
        rhs = {}
        row_count = 0

        def add_row(entries, value):
            nonlocal row_count
            rows[row_count] = entries
            if value:
                rhs[row_count] = value
            row_count += 1

        # D + D L = D' + L D'
        for i in range(n):
            for j in range(n):
                entries = {}
                for k in range(n):
                    if ('L', k, j) in column and d[i, k]:
                        entries[column[('L', k, j)]] = \
                            entries.get(column[('L', k, j)], 0) + d[i, k]
                    if ('L', i, k) in column and d_after[k, j]:
                        entries[column[('L', i, k)]] = \
                            entries.get(column[('L', i, k)], 0) - d_after[k, j]
                add_row(entries, d_after[i, j] - d[i, j])
        # f + f L = f' + (seed + dc) D'
        for j in range(n):
            entries = {}
            for k in range(n):
                f_k = before.d0(hats[k])
                if ('L', k, j) in column and f_k:
                    entries[column[('L', k, j)]] = \
                        entries.get(column[('L', k, j)], 0) + f_k
                if ('c', k) in column and d_after[k, j]:
                    entries[column[('c', k)]] = \
                        entries.get(column[('c', k)], 0) - d_after[k, j]
            seeded = sum((seed[k] * d_after[k, j] for k in seed), Fraction(0))
            add_row(entries, after.d0(hats[j]) + seeded - before.d0(hats[j]))

        system = SparseMatrix(rows, (row_count, len(unknowns)))
        solution = system.solve(rhs)
        if solution is None:
            raise ConsistencyError('no chain isomorphism between the two packages.')

        def assemble(values):
            linear_rows = {i: {i: Fraction(1)} for i in range(n)}
            constant = {hats[i]: value for i, value in seed.items()}
            for k, value in values.items():
                unknown = unknowns[k]
                if unknown[0] == 'L':
                    _, i, j = unknown
                    linear_rows[i][j] = linear_rows[i].get(j, Fraction(0)) + value
                else:
                    hid = hats[unknown[1]]
                    constant[hid] = constant.get(hid, Fraction(0)) + value
            return SparseMatrix(linear_rows, (n, n)), constant

        linear, constant = assemble(solution)
        if not linear.det():
            # move along the solution space until the linear part is invertible
            kernel = system.nullspace()
            for t in range(1, 9):
                moved = dict(solution)
                for power, vector in enumerate(kernel, start=1):
                    for k, value in vector.items():
                        moved[k] = moved.get(k, Fraction(0)) + value * t ** power
                linear, constant = assemble(moved)
                if linear.det():
                    logger.debug('invertible transport found at t = %d', t)
                    break
            else:
                raise ConsistencyError('transport map is not invertible.')
        images = {}
        for j, hid in enumerate(hats):
            image = Polynomial.constant(constant.get(hid, 0))
            for i, value in linear.column(j).items():
                image = image + Polynomial.generator(hats[i], value)
            images[hid] = image
        for hid in hats:
            lhs = apply_differential(images[hid], before.algebra)
            rhs_poly = substitute(after.d(hid), images, before.algebra)
            if lhs != rhs_poly:
                raise ConsistencyError(
                    'transport map fails to intertwine on {}.'.format(hid), item=hid
                )
        dims_before = self.homology(self.module_complex(before)).dims
        dims_after = self.homology(self.module_complex(after)).dims
        if dims_before != dims_after:
            raise ConsistencyError('homotopic pairs give different module homology.')
        return TransportMap(
            constant={h: v for h, v in constant.items() if v},
            linear=linear,
            images=images,
            dims_before=dims_before,
            dims_after=dims_after,
        )

    def cylinder_linear_dims(self, cylinder):
        """
        Homology dimensions of the linear parts of a presentation and of its
        cylinder; they agree when the inclusions are quasi-isomorphisms.
        """
        base = self.homology(linear_complex(cylinder.base)).nonzero_dims()
        total = self.homology(linear_complex(cylinder.algebra)).nonzero_dims()
        return base, total
