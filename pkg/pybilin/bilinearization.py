"""
Cylinders, the stab operator and bilinearized algebras.

Derived generator ids append a suffix to the base id: `x.l` and `x.r` for
the two ends of the cylinder and `x.h` for the shifted (hatted) copy.
"""
from fractions import Fraction
import itertools
import logging
from math import factorial

from sympy.utilities.iterables import multiset_permutations

from .config import LITERAL_SYM_BOUND, SEARCH_ASSIGNMENT_CAP
from .errors import AugmentationError, ConsistencyError, SearchLimitError
from .graded_algebra import (
    CdgaPresentation,
    Generator,
    Monomial,
    Polynomial,
    ValidationReport,
    apply_differential,
    evaluate,
    normalize_word,
    relabel,
    substitute,
    validate_presentation,
)
from .linalg import SparseMatrix

logger = logging.getLogger(__name__)

LEFT = '.l'
HAT = '.h'
RIGHT = '.r'


def left_id(gid):
    return gid + LEFT


def hat_id(gid):
    return gid + HAT


def right_id(gid):
    return gid + RIGHT


def base_id(derived):
    """
    Split a derived id into (base id, suffix).
    """
    for suffix in (LEFT, HAT, RIGHT):
        if derived.endswith(suffix):
            return derived[:-len(suffix)], suffix
    raise ValueError('{!r} is not a derived generator id.'.format(derived))


class Augmentation:
    """
    Algebra map to Q given by its values on generators; absent ids map to 0.
    """
    def __init__(self, values=None, name=''):
        self.values = {
            gid: Fraction(value) for gid, value in (values or {}).items()
            if Fraction(value)
        }
        self.name = name

    def __call__(self, gid):
        return self.values.get(gid, Fraction(0))

    def evaluate(self, polynomial):
        return evaluate(polynomial, self.values)

    def __eq__(self, other):
        if not isinstance(other, Augmentation):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(frozenset(self.values.items()))

    def __repr__(self):
        return 'Augmentation({}{})'.format(
            {k: str(v) for k, v in sorted(self.values.items())},
            ', name={!r}'.format(self.name) if self.name else '',
        )


def validate_augmentation(A, augmentation):
    """
    Report generators where the augmentation is nonzero in nonzero degree or
    does not kill the differential.
    """
    report = ValidationReport('augmentation {}'.format(augmentation.name or '')
                              .strip())
    for gid in sorted(augmentation.values):
        if gid not in A:
            report.add('unknown', gid)
        elif A.degree(gid) != 0:
            report.add('degree', gid, 'value {} in degree {}'.format(
                augmentation(gid), A.degree(gid)))
    if not report.valid:
        return report
    for gid in A.ids:
        value = augmentation.evaluate(A.d(gid))
        if value:
            report.add('differential', gid, 'eps(d {}) = {}'.format(gid, value))
    return report


def candidate_grid(max_numerator, max_denominator):
    """
    All rationals p/q with |p| <= max_numerator and 1 <= q <= max_denominator.
    """
    return sorted({
        Fraction(p, q)
        for p in range(-max_numerator, max_numerator + 1)
        for q in range(1, max_denominator + 1)
    })


def search_augmentations_bounded(A, candidate_values, cap=SEARCH_ASSIGNMENT_CAP):
    """
    Exhaustively try every assignment of `candidate_values` to the degree-0
    generators. The result is complete only relative to the candidate set.

    :raise SearchLimitError: if the number of assignments exceeds `cap`.
    """
    candidates = sorted({Fraction(v) for v in candidate_values})
    free = A.ids_of_degree(0)
    count = len(candidates) ** len(free)
    if count > cap:
        raise SearchLimitError(
            '{} assignments exceed the search cap {}.'.format(count, cap)
        )
    logger.debug('searching %d assignments over %d generators', count, len(free))
    found = []
    for values in itertools.product(candidates, repeat=len(free)):
        augmentation = Augmentation(dict(zip(free, values)))
        if all(not augmentation.evaluate(A.d(gid)) for gid in A.ids):
            found.append(augmentation)
    logger.info('found %d augmentations', len(found))
    return found


def cylinder_context(A):
    """
    Presentation on V^l, V-hat and V^r with no differential, used to
    normalize cylinder monomials.
    """
    generators = []
    for g in A.generators:
        generators.append(Generator(left_id(g.id), g.degree, g.action))
        generators.append(
            Generator(hat_id(g.id), A.grading.shift(g.degree, 1), g.action)
        )
        generators.append(Generator(right_id(g.id), g.degree, g.action))
    return CdgaPresentation(A.grading, generators)


def hat_context(A):
    return CdgaPresentation(
        A.grading,
        [
            Generator(hat_id(g.id), A.grading.shift(g.degree, 1), g.action)
            for g in A.generators
        ],
    )


def _stab_of_word(word, A, cyl):
    # sum_j (-1)^|y_1..y_{j-1}| y_1^l .. y_{j-1}^l hat(y_j) y_{j+1}^r .. y_k^r
    result = Polynomial()
    parity = 0
    for j, gid in enumerate(word):
        cylinder_word = (
            [left_id(y) for y in word[:j]]
            + [hat_id(gid)]
            + [right_id(y) for y in word[j + 1:]]
        )
        term = Polynomial.from_word(cylinder_word, cyl)
        result = result + (-term if parity else term)
        if A.is_odd(gid):
            parity ^= 1
    return result


def _stab_of_monomial(monomial, A, cyl, literal_bound):
    word = monomial.word()
    k = len(word)
    if k == 0:
        return Polynomial()
    total = Polynomial()
    if k <= literal_bound:
        arrangements = (
            ([word[i] for i in order], 1)
            for order in itertools.permutations(range(k))
        )
    else:
        logger.warning('grouped stab enumeration for word length %d', k)
        weight = 1
        for _, exponent in monomial.factors:
            weight *= factorial(exponent)
        arrangements = (
            (arrangement, weight) for arrangement in multiset_permutations(list(word))
        )
    for arrangement, multiplicity in arrangements:
        sign, _ = normalize_word(arrangement, A)
        total = total + _stab_of_word(arrangement, A, cyl).scale(sign * multiplicity)
    return total.scale(Fraction(1, factorial(k)))


def stab(p, A, cyl=None, literal_bound=LITERAL_SYM_BOUND):
    """
    The stab operator: symmetrize each monomial over all orderings with
    Koszul signs, apply the ordered stab formula and normalize in the
    cylinder algebra. Degree +1, stab(1) = 0.
    """
    cyl = cyl or cylinder_context(A)
    result = Polynomial()
    for monomial, coefficient in p.terms.items():
        result = result + _stab_of_monomial(
            monomial, A, cyl, literal_bound
        ).scale(coefficient)
    return result


class CylinderPresentation:
    """
    Cylinder algebra on V^l, V-hat and V^r.

    :param base: the presentation the cylinder is built on.
    :param algebra: CdgaPresentation of the cylinder with its differential.
    """
    def __init__(self, base, algebra):
        self.base = base
        self.algebra = algebra

    def d(self, derived):
        return self.algebra.d(derived)


def build_cylinder(A, literal_bound=LITERAL_SYM_BOUND):
    """
    d x^l = -(d x)^l, d x^r = -(d x)^r, d hat(x) = stab(d x) + x^l - x^r.

    :raise PresentationError: if A is invalid.
    :raise ConsistencyError: if the cylinder differential does not square to
    zero; this happens exactly when A leaves the class where every factor of
    a differential monomial of word length >= 2 is closed.
    """
    validate_presentation(A).raise_for_status()
    cyl = cylinder_context(A)
    differential = {}
    for gid in A.ids:
        dx = A.d(gid)
        differential[left_id(gid)] = -relabel(dx, LEFT, cyl)
        differential[right_id(gid)] = -relabel(dx, RIGHT, cyl)
        differential[hat_id(gid)] = (
            stab(dx, A, cyl, literal_bound)
            + Polynomial.generator(left_id(gid))
            - Polynomial.generator(right_id(gid))
        )
    algebra = cyl.with_differential(differential)
    report = validate_presentation(algebra)
    if not report.valid:
        violation = report.violations[0]
        raise ConsistencyError(
            'cylinder differential fails at {}: {}'.format(
                violation.item, violation.detail
            ),
            item=violation.item,
        )
    logger.debug('built cylinder on %d generators', len(algebra.ids))
    return CylinderPresentation(A, algebra)


def check_cylinder_inclusions(cylinder):
    """
    Check that x -> x^l and x -> x^r are DGA maps from (S(V), -d) into the
    cylinder, on generators and on all products of two generators.

    :return: {'l': bool, 'r': bool}.
    """
    A = cylinder.base
    cyl = cylinder.algebra
    words = [(gid,) for gid in A.ids] + list(
        itertools.combinations_with_replacement(A.ids, 2)
    )
    result = {}
    for side, suffix in (('l', LEFT), ('r', RIGHT)):
        images = {gid: Polynomial.generator(gid + suffix) for gid in A.ids}
        ok = True
        for word in words:
            p = Polynomial.from_word(word, A)
            mapped = substitute(p, images, cyl)
            lhs = apply_differential(mapped, cyl)
            rhs = substitute(-apply_differential(p, A), images, cyl)
            if lhs != rhs:
                logger.info('inclusion %s fails on %s', side, word)
                ok = False
                break
        result[side] = ok
    return result


def project(p, left, right):
    """
    Augmentation substitution on cylinder polynomials: x^l -> left(x),
    x^r -> right(x), hats kept.
    """
    terms = {}
    for monomial, coefficient in p.terms.items():
        kept = []
        for derived, exponent in monomial.factors:
            gid, suffix = base_id(derived)
            if suffix == HAT:
                kept.append((derived, exponent))
            else:
                value = left(gid) if suffix == LEFT else right(gid)
                coefficient *= value ** exponent
                if not coefficient:
                    break
        if coefficient:
            key = Monomial(tuple(kept))
            terms[key] = terms.get(key, Fraction(0)) + coefficient
    return Polynomial(terms)


def capping_weight(rest, left, right):
    """
    sum over subsets S of rest of |S|!(m-|S|)!/(m+1)! left(S) right(rest - S),
    the average over hat positions of left-capped prefixes and
    right-capped suffixes. `rest` is a sequence of generator ids.
    """
    # coefficients of prod (right(y) + t left(y)) in t
    coefficients = [Fraction(1)]
    for gid in rest:
        a, b = left(gid), right(gid)
        shifted = [Fraction(0)] + [c * a for c in coefficients]
        coefficients = [c * b for c in coefficients] + [Fraction(0)]
        coefficients = [x + y for x, y in zip(coefficients, shifted)]
    m = len(rest)
    return sum(
        (c * Fraction(factorial(s) * factorial(m - s), factorial(m + 1))
         for s, c in enumerate(coefficients) if c),
        Fraction(0),
    )


def _grouped_linear_part(p, A, left, right):
    terms = {}
    for monomial, coefficient in p.terms.items():
        word = monomial.word()
        for gid, exponent in monomial.factors:
            rest = list(word)
            rest.remove(gid)
            if any(A.is_odd(y) for y in rest):
                continue
            weight = capping_weight(rest, left, right)
            if weight:
                key = Monomial.of(hat_id(gid))
                terms[key] = terms.get(key, Fraction(0)) + coefficient * exponent * weight
    return Polynomial(terms)


def bilinear_differential(A, left, right, method='grouped',
                          literal_bound=LITERAL_SYM_BOUND):
    """
    Differential on hatted generators: constant part (left - right)(x) plus
    the capping of all but one factor of each monomial of d x.

    :param method: 'literal' projects stab(d x) term by term; 'grouped'
    uses the closed-form subset weights.
    :return: mapping base id -> Polynomial in hatted ids.
    """
    if method not in ('literal', 'grouped'):
        raise ValueError('unknown method {!r}.'.format(method))
    cyl = cylinder_context(A) if method == 'literal' else None
    result = {}
    for gid in A.ids:
        dx = A.d(gid)
        if method == 'literal':
            linear = project(stab(dx, A, cyl, literal_bound), left, right)
        else:
            linear = _grouped_linear_part(dx, A, left, right)
        result[gid] = linear + Polynomial.constant(left(gid) - right(gid))
    return result


class BilinearizedPackage:
    """
    Bilinearized algebra on hatted generators together with its linear part
    (module differential) and constant part (fundamental functional).

    `module_differential` has one column per entry of `hat_ids`; column j is
    the linear part of the differential of hat_ids[j].
    """
    def __init__(self, base, left, right, differential):
        self.base = base
        self.left = left
        self.right = right
        self.hat_ids = tuple(hat_id(gid) for gid in base.ids)
        self.algebra = hat_context(base).with_differential(
            {hat_id(gid): p for gid, p in differential.items() if p}
        )
        self.index = {hid: i for i, hid in enumerate(self.hat_ids)}
        columns = []
        functional = {}
        for hid in self.hat_ids:
            gid, _ = base_id(hid)
            parts = differential[gid].word_length_parts()
            if set(parts) - {0, 1}:
                raise ConsistencyError(
                    'bilinearized differential of {} has nonlinear terms.'.format(hid),
                    item=hid,
                )
            constant = parts.get(0, Polynomial()).constant_term
            if constant:
                functional[hid] = constant
            column = {}
            for monomial, coefficient in parts.get(1, Polynomial()).terms.items():
                column[self.index[monomial.ids()[0]]] = coefficient
            columns.append(column)
        self.module_differential = SparseMatrix.from_columns(
            columns, len(self.hat_ids)
        )
        self.fundamental_functional = functional

    def degree(self, hid):
        return self.algebra.degree(hid)

    def d0(self, hid):
        return self.fundamental_functional.get(hid, Fraction(0))

    def d1(self, hid):
        column = self.module_differential.column(self.index[hid])
        return Polynomial({
            Monomial.of(self.hat_ids[i]): value for i, value in column.items()
        })

    def d(self, hid):
        return self.algebra.d(hid)

    def functional_row(self):
        return SparseMatrix(
            {0: {self.index[h]: v for h, v in self.fundamental_functional.items()}},
            (1, len(self.hat_ids)),
        )

    def check_invariants(self):
        """
        :raise ConsistencyError: unless d1 squares to zero and d0 d1 = 0.
        """
        d1 = self.module_differential
        if not (d1 @ d1).is_zero():
            raise ConsistencyError('(d1)^2 != 0 on the bilinearized module.')
        if not (self.functional_row() @ d1).is_zero():
            raise ConsistencyError('d0 d1 != 0 on the bilinearized module.')
        return self


def bilinearize(A, left, right, method='grouped', check_augmentations=True,
                literal_bound=LITERAL_SYM_BOUND):
    """
    Bilinearized package of A with respect to the pair (left, right).

    :raise AugmentationError: naming the offending generator, when
    `check_augmentations` is set and either augmentation is invalid.
    """
    if check_augmentations:
        validate_presentation(A).raise_for_status()
        for augmentation in (left, right):
            validate_augmentation(A, augmentation).raise_for_status(
                AugmentationError
            )
    differential = bilinear_differential(A, left, right, method, literal_bound)
    package = BilinearizedPackage(A, left, right, differential)
    if check_augmentations:
        package.check_invariants()
    logger.debug('bilinearized %d generators', len(package.hat_ids))
    return package
