"""
Free graded-commutative algebras over the rationals.

A presentation fixes the generators, their degrees (integers or residues
modulo an even d) and the differential on generators. Polynomials are
sparse maps from Koszul-normalized monomials to `Fraction` coefficients;
every product goes through `normalize_word` or its merge shortcut so that
monomial keys are always canonical.
"""
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from typing import Optional, Tuple

from .errors import PresentationError

logger = logging.getLogger(__name__)

RESERVED_CHAR = '.'


@dataclass(frozen=True)
class GradingSpec:
    """
    Integer grading (kind 'Z') or cyclic grading (kind 'Zmod') with an even
    modulus, so the Koszul parity of a residue is well defined.
    """
    kind: str = 'Z'
    modulus: int = 0

    def __post_init__(self):
        if self.kind == 'Z':
            if self.modulus:
                raise PresentationError('integer grading takes no modulus.')
        elif self.kind == 'Zmod':
            if self.modulus < 2 or self.modulus % 2:
                raise PresentationError(
                    'cyclic grading needs an even modulus >= 2, got {}.'.format(
                        self.modulus
                    )
                )
        else:
            raise PresentationError('unknown grading kind {!r}.'.format(self.kind))

    @classmethod
    def integer(cls):
        return cls('Z', 0)

    @classmethod
    def cyclic(cls, modulus):
        return cls('Zmod', modulus)

    @property
    def is_cyclic(self):
        return self.kind == 'Zmod'

    def reduce(self, degree):
        return degree % self.modulus if self.is_cyclic else degree

    def shift(self, degree, amount):
        return self.reduce(degree + amount)

    def equal(self, a, b):
        return self.reduce(a) == self.reduce(b)


@dataclass(frozen=True)
class Generator:
    id: str
    degree: int
    action: Optional[Fraction] = None


@dataclass(frozen=True, order=True)
class Monomial:
    """
    Sorted tuple of (generator id, exponent) pairs; the empty tuple is 1.
    """
    factors: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        previous = None
        for gid, exponent in self.factors:
            if exponent < 1:
                raise PresentationError(
                    'exponent of {} must be positive.'.format(gid)
                )
            if previous is not None and gid <= previous:
                raise PresentationError(
                    'monomial factors must be strictly increasing by id.'
                )
            previous = gid

    @classmethod
    def of(cls, gid):
        return cls(((gid, 1),))

    @property
    def word_length(self):
        return sum(exponent for _, exponent in self.factors)

    def word(self):
        return tuple(gid for gid, exponent in self.factors
                     for _ in range(exponent))

    def ids(self):
        return tuple(gid for gid, _ in self.factors)

    def exponent(self, gid):
        for other, exponent in self.factors:
            if other == gid:
                return exponent
        return 0

    def __str__(self):
        if not self.factors:
            return '1'
        return '*'.join(
            gid if exponent == 1 else '{}^{}'.format(gid, exponent)
            for gid, exponent in self.factors
        )


UNIT = Monomial()


class Polynomial:
    """
    Finite rational combination of canonical monomials. Instances are
    treated as immutable.
    """
    __slots__ = ('terms',)

    def __init__(self, terms=None):
        cleaned = {}
        for monomial, coefficient in (terms or {}).items():
            coefficient = Fraction(coefficient)
            if coefficient:
                cleaned[monomial] = coefficient
        self.terms = cleaned

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, value):
        return cls({UNIT: value})

    @classmethod
    def one(cls):
        return cls.constant(1)

    @classmethod
    def generator(cls, gid, coefficient=1):
        return cls({Monomial.of(gid): coefficient})

    @classmethod
    def from_word(cls, word, ctx, coefficient=1):
        sign, monomial = normalize_word(word, ctx)
        if not sign:
            return cls()
        return cls({monomial: sign * Fraction(coefficient)})

    @classmethod
    def from_terms(cls, terms, ctx):
        """
        :param terms: iterable of (coefficient, word) pairs.
        """
        total = cls()
        for coefficient, word in terms:
            total = total + cls.from_word(word, ctx, coefficient)
        return total

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def coefficient(self, monomial):
        return self.terms.get(monomial, Fraction(0))

    @property
    def constant_term(self):
        return self.coefficient(UNIT)

    def __add__(self, other):
        terms = dict(self.terms)
        for monomial, coefficient in other.terms.items():
            terms[monomial] = terms.get(monomial, Fraction(0)) + coefficient
        return Polynomial(terms)

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = Fraction(factor)
        return Polynomial({m: c * factor for m, c in self.terms.items()})

    def max_word_length(self):
        return max((m.word_length for m in self.terms), default=-1)

    def word_length_parts(self):
        parts = {}
        for monomial, coefficient in self.terms.items():
            parts.setdefault(monomial.word_length, {})[monomial] = coefficient
        return {n: Polynomial(t) for n, t in parts.items()}

    def generators_used(self):
        return sorted({gid for m in self.terms for gid in m.ids()})

    def __repr__(self):
        return 'Polynomial({})'.format(self)

    def __str__(self):
        if not self.terms:
            return '0'
        pieces = []
        for monomial, coefficient in self.items():
            if monomial == UNIT:
                text = str(coefficient)
            elif coefficient == 1:
                text = str(monomial)
            elif coefficient == -1:
                text = '-{}'.format(monomial)
            else:
                text = '{}*{}'.format(coefficient, monomial)
            pieces.append(text)
        return ' + '.join(pieces).replace('+ -', '- ')


class CdgaPresentation:
    """
    Finitely generated free graded-commutative DGA over Q.

    :param grading: GradingSpec.
    :param generators: iterable of Generator.
    :param differential: mapping generator id -> Polynomial; missing ids
    are closed.
    """
    def __init__(self, grading, generators, differential=None):
        self.grading = grading
        self._generators = {}
        for generator in generators:
            if not generator.id:
                raise PresentationError('generator ids must be non-empty.')
            if generator.id in self._generators:
                raise PresentationError(
                    'duplicate generator id {!r}.'.format(generator.id)
                )
            if generator.action is not None and generator.action < 0:
                raise PresentationError(
                    'action of {!r} must be nonnegative.'.format(generator.id)
                )
            self._generators[generator.id] = Generator(
                generator.id, grading.reduce(generator.degree), generator.action
            )
        with_action = [g.action is not None for g in self._generators.values()]
        if any(with_action) and not all(with_action):
            raise PresentationError(
                'action must be given on all generators or on none.'
            )
        self.ids = tuple(sorted(self._generators))
        self.differential = {}
        for gid, polynomial in (differential or {}).items():
            if gid not in self._generators:
                raise PresentationError(
                    'differential given for unknown generator {!r}.'.format(gid)
                )
            self._check_polynomial(polynomial)
            self.differential[gid] = polynomial

    def _check_polynomial(self, polynomial):
        for monomial in polynomial.terms:
            for gid, exponent in monomial.factors:
                if gid not in self._generators:
                    raise PresentationError(
                        'unknown generator id {!r}.'.format(gid)
                    )
                if exponent > 1 and self.is_odd(gid):
                    raise PresentationError(
                        'odd generator {!r} appears squared.'.format(gid)
                    )

    @property
    def generators(self):
        return tuple(self._generators[gid] for gid in self.ids)

    @property
    def has_action(self):
        return bool(self.ids) and self._generators[self.ids[0]].action is not None

    def __contains__(self, gid):
        return gid in self._generators

    def generator(self, gid):
        try:
            return self._generators[gid]
        except KeyError:
            raise PresentationError('unknown generator id {!r}.'.format(gid))

    def degree(self, gid):
        return self.generator(gid).degree

    def is_odd(self, gid):
        return self.degree(gid) % 2 == 1

    def d(self, gid):
        self.generator(gid)
        return self.differential.get(gid, Polynomial())

    def is_closed(self, gid):
        return not self.d(gid)

    def monomial_degree(self, monomial):
        return self.grading.reduce(
            sum(self.degree(gid) * e for gid, e in monomial.factors)
        )

    def ids_of_degree(self, degree):
        degree = self.grading.reduce(degree)
        return tuple(gid for gid in self.ids if self.degree(gid) == degree)

    def with_differential(self, differential):
        return CdgaPresentation(self.grading, self.generators, differential)

    def __repr__(self):
        return 'CdgaPresentation({} generators, grading={}{})'.format(
            len(self.ids),
            self.grading.kind,
            self.grading.modulus or '',
        )


@dataclass(frozen=True)
class Violation:
    kind: str
    item: str
    detail: str = ''


@dataclass
class ValidationReport:
    """
    Outcome of a validation pass. Never raised by itself; call
    `raise_for_status` to turn a failing report into an exception.
    """
    subject: str
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def add(self, kind, item, detail=''):
        self.violations.append(Violation(kind, item, detail))

    def items(self, kind=None):
        return [v.item for v in self.violations if kind is None or v.kind == kind]

    def raise_for_status(self, error_class=PresentationError):
        if self.violations:
            raise error_class(
                '{} is invalid: {}'.format(
                    self.subject,
                    '; '.join(
                        '{} at {}{}'.format(
                            v.kind, v.item, ' ({})'.format(v.detail) if v.detail else ''
                        )
                        for v in self.violations
                    ),
                )
            )
        return self


def normalize_word(word, ctx):
    """
    Sort a word of generator ids into its canonical monomial.

    :return: (sign, Monomial); sign is 0 (and the monomial None) when an odd
    generator repeats.
    """
    odd_positions = []
    for gid in word:
        if ctx.is_odd(gid):
            odd_positions.append(gid)
    if len(set(odd_positions)) != len(odd_positions):
        return 0, None
    inversions = 0
    for i, a in enumerate(odd_positions):
        for b in odd_positions[i + 1:]:
            if a > b:
                inversions += 1
    counts = Counter(word)
    monomial = Monomial(tuple(sorted(counts.items())))
    return (-1 if inversions % 2 else 1), monomial


def _merge(left, right, ctx):
    odd_left = [gid for gid in left.ids() if ctx.is_odd(gid)]
    sign = 1
    for gid in right.ids():
        if not ctx.is_odd(gid):
            continue
        if gid in odd_left:
            return 0, None
        if sum(1 for other in odd_left if other > gid) % 2:
            sign = -sign
    counts = dict(left.factors)
    for gid, exponent in right.factors:
        counts[gid] = counts.get(gid, 0) + exponent
    return sign, Monomial(tuple(sorted(counts.items())))


def multiply(p, q, ctx):
    terms = {}
    for m1, c1 in p.terms.items():
        for m2, c2 in q.terms.items():
            sign, monomial = _merge(m1, m2, ctx)
            if sign:
                terms[monomial] = terms.get(monomial, Fraction(0)) + sign * c1 * c2
    return Polynomial(terms)


def multiply_all(polynomials, ctx):
    result = Polynomial.one()
    for polynomial in polynomials:
        result = multiply(result, polynomial, ctx)
    return result


def _differential_of_monomial(monomial, ctx):
    result = Polynomial()
    factors = monomial.factors
    prefix_parity = 0
    for index, (gid, exponent) in enumerate(factors):
        dg = ctx.d(gid)
        if dg:
            # d(g^e) = e g^(e-1) dg for even g; odd g has e == 1
            middle = dg.scale(exponent)
            if exponent > 1:
                middle = multiply(
                    Polynomial({Monomial(((gid, exponent - 1),)): 1}), middle, ctx
                )
            prefix = Polynomial({Monomial(factors[:index]): 1})
            suffix = Polynomial({Monomial(factors[index + 1:]): 1})
            term = multiply(multiply(prefix, middle, ctx), suffix, ctx)
            result = result + (term if prefix_parity == 0 else -term)
        if ctx.is_odd(gid):
            prefix_parity ^= exponent % 2
    return result


def apply_differential(p, ctx):
    """
    Extend the differential from generators by the graded Leibniz rule.
    """
    result = Polynomial()
    for monomial, coefficient in p.terms.items():
        result = result + _differential_of_monomial(monomial, ctx).scale(coefficient)
    return result


def polynomial_degree(p, ctx):
    """
    Common degree of all monomials of p, or None if p is zero or
    inhomogeneous.
    """
    degrees = {ctx.monomial_degree(m) for m in p.terms}
    return degrees.pop() if len(degrees) == 1 else None


def evaluate(p, values):
    """
    Evaluate p under the algebra map generator id -> values[id] (missing
    ids map to 0).
    """
    total = Fraction(0)
    for monomial, coefficient in p.terms.items():
        term = coefficient
        for gid, exponent in monomial.factors:
            term *= Fraction(values.get(gid, 0)) ** exponent
            if not term:
                break
        total += term
    return total


def substitute(p, images, target):
    """
    Apply the algebra map sending each generator to images[id] (a
    Polynomial over `target`); generators without an image are kept.
    """
    result = Polynomial()
    for monomial, coefficient in p.terms.items():
        factors = [
            images.get(gid, Polynomial.generator(gid)) for gid in monomial.word()
        ]
        result = result + multiply_all(factors, target).scale(coefficient)
    return result


def relabel(p, suffix, target):
    """
    Copy p into the generators id + suffix of `target`, renormalizing.
    """
    result = Polynomial()
    for monomial, coefficient in p.terms.items():
        word = [gid + suffix for gid in monomial.word()]
        result = result + Polynomial.from_word(word, target, coefficient)
    return result


def validate_presentation(A):
    """
    Check degree, d^2 = 0 and the action filtration on every generator.
    The report lists every violation; this never raises.
    """
    report = ValidationReport('presentation')
    for gid in A.ids:
        dx = A.d(gid)
        target = A.grading.shift(A.degree(gid), -1)
        wrong = [m for m in dx.terms if A.monomial_degree(m) != target]
        if wrong:
            report.add(
                'degree',
                gid,
                'expected degree {}, got {}'.format(
                    target, sorted({A.monomial_degree(m) for m in wrong})
                ),
            )
        if A.has_action:
            bound = A.generator(gid).action
            for monomial in dx.terms:
                total = sum(
                    A.generator(y).action * e for y, e in monomial.factors
                )
                if total > bound:
                    report.add(
                        'action', gid, '{} has action {} > {}'.format(
                            monomial, total, bound
                        )
                    )
        residual = apply_differential(dx, A)
        if residual:
            report.add('d_squared', gid, 'd^2 = {}'.format(residual))
    if report.valid:
        logger.debug('presentation with %d generators is valid', len(A.ids))
    else:
        logger.info('presentation has %d violations', len(report.violations))
    return report


def decompose_differential(A, gid):
    """
    Word-length parts [d_0 x, d_1 x, ...] of the differential of `gid`.
    """
    dx = A.d(gid)
    parts = dx.word_length_parts()
    top = max(parts, default=-1)
    return [parts.get(n, Polynomial()) for n in range(top + 1)]


def reduce_grading(A, modulus):
    """
    Reduce a Z-graded presentation modulo an even modulus.
    """
    if A.grading.is_cyclic:
        raise PresentationError('presentation is already cyclically graded.')
    grading = GradingSpec.cyclic(modulus)
    return CdgaPresentation(grading, A.generators, dict(A.differential))


def check_generator_id(gid):
    """
    :raise PresentationError: if a user-supplied id is empty or uses the
    character reserved for derived ids.
    """
    if not gid or RESERVED_CHAR in gid:
        raise PresentationError(
            'generator id {!r} must be non-empty and free of {!r}.'.format(
                gid, RESERVED_CHAR
            )
        )
    return gid
