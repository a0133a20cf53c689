"""
Conley-Zehnder indices of block symplectic paths, contact homology
gradings, good/bad orbits and the normal asymptotic spectrum.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from typing import Tuple

import sympy

from .errors import GeometryError

logger = logging.getLogger(__name__)

# rotation by arctan(4/3), an irrational multiple of pi with rational entries
_ROTATION = sympy.Matrix([[sympy.Rational(3, 5), -sympy.Rational(4, 5)],
                          [sympy.Rational(4, 5), sympy.Rational(3, 5)]])


def _exact_sign(value):
    value = sympy.nsimplify(value) if isinstance(value, float) else value
    sign = sympy.sign(value)
    if sign in (1, -1):
        return int(sign)
    if sign == 0:
        raise GeometryError('degenerate return map: det(Id - A) = 0.')
    approximation = sympy.N(value, 50)
    if approximation == 0:
        raise GeometryError('degenerate return map: det(Id - A) = 0.')
    return 1 if approximation > 0 else -1


@dataclass(frozen=True)
class SmallRotation:
    """
    e^{+-J0 eps t} with 0 < eps < 2 pi / a. `window` is the largest
    multiplicity for which the small-angle model stays valid.
    """
    direction: int
    window: int = 1
    half_dimension = 1

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise GeometryError('rotation direction must be +1 or -1.')
        if self.window < 1:
            raise GeometryError('rotation window must be at least 1.')

    def cz(self, multiplicity=1):
        if multiplicity > self.window:
            raise GeometryError(
                'rotation iterated {} times outside its window {}.'.format(
                    multiplicity, self.window
                )
            )
        return self.direction

    def return_map(self, multiplicity, action):
        self.cz(multiplicity)
        rotation = _ROTATION if self.direction == 1 else _ROTATION.T
        return rotation ** multiplicity


@dataclass(frozen=True)
class Hyperbolic:
    b: Fraction
    half_dimension = 1

    def __post_init__(self):
        if not self.b:
            raise GeometryError('hyperbolic block with b = 0 is degenerate.')

    def cz(self, multiplicity=1):
        return 0

    def return_map(self, multiplicity, action):
        t = sympy.Rational(self.b.numerator, self.b.denominator) * multiplicity * action
        return sympy.diag(sympy.exp(t), sympy.exp(-t))


@dataclass(frozen=True)
class NegHyperbolicPair:
    """
    Negative hyperbolic block; with framing f+ (resp. f-) the m-fold
    iterate has index -m (resp. +m).
    """
    framing: str
    half_dimension = 1

    def __post_init__(self):
        if self.framing not in ('+', '-'):
            raise GeometryError('framing must be "+" or "-".')

    def cz(self, multiplicity=1):
        return -multiplicity if self.framing == '+' else multiplicity

    def return_map(self, multiplicity, action):
        return (-1) ** multiplicity * sympy.diag(
            sympy.exp(multiplicity), sympy.exp(-multiplicity)
        )


@dataclass(frozen=True)
class BlockPath:
    blocks: Tuple = ()
    action: Fraction = Fraction(1)

    def __post_init__(self):
        if self.action <= 0:
            raise GeometryError('action must be positive.')

    @property
    def half_dimension(self):
        return sum(block.half_dimension for block in self.blocks)

    def concat(self, other):
        return BlockPath(tuple(self.blocks) + tuple(other.blocks), self.action)


@dataclass(frozen=True)
class OrbitModel:
    path: BlockPath
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise GeometryError('multiplicity must be at least 1.')

    @property
    def half_dimension(self):
        return self.path.half_dimension

    @property
    def ambient_n(self):
        # dim of the contact manifold is 2n - 1
        return self.half_dimension + 1


@dataclass(frozen=True)
class LiftedGrading:
    cz: int
    grading: int
    good: bool


def cz_index(path, multiplicity=1):
    """
    Sum of the block indices of the m-fold iterate.
    """
    return sum(block.cz(multiplicity) for block in path.blocks)


def cz_parity_check(path, multiplicity=1, return_eigenvalue_signs=False):
    """
    Check (-1)^(CZ + n) = sign det(Id - A) block by block.
    :return: bool, or (bool, per-block signs) when return_eigenvalue_signs.
    """
    action = sympy.Rational(path.action.numerator, path.action.denominator)
    signs = []
    for block in path.blocks:
        matrix = block.return_map(multiplicity, action)
        signs.append(_exact_sign((sympy.eye(2) - matrix).det()))
    product = 1
    for sign in signs:
        product *= sign
    expected = (-1) ** ((cz_index(path, multiplicity) + path.half_dimension) % 2)
    ok = product == expected
    if not ok:
        logger.warning('parity identity fails for %s', path)
    if return_eigenvalue_signs:
        return ok, signs
    return ok


def ch_grading(cz, n):
    return cz + n - 3


def orbit_grading(orbit):
    return ch_grading(cz_index(orbit.path, orbit.multiplicity), orbit.ambient_n)


def is_bad(orbit):
    """
    An iterate is bad iff CZ(gamma^m) - CZ(gamma) is odd.
    """
    difference = cz_index(orbit.path, orbit.multiplicity) - cz_index(orbit.path, 1)
    return difference % 2 == 1


def lift_grading(orbit):
    """
    Lift an orbit of the dividing set to its neighborhood: the normal
    direction adds a hyperbolic block of index 0, so the grading goes up by
    one and goodness is unchanged.
    """
    lifted = OrbitModel(
        orbit.path.concat(BlockPath((Hyperbolic(Fraction(1)),), orbit.path.action)),
        orbit.multiplicity,
    )
    cz = cz_index(lifted.path, lifted.multiplicity)
    grading = ch_grading(cz, lifted.ambient_n)
    if grading != orbit_grading(orbit) + 1:
        raise GeometryError('lifted grading is not shifted by one.')
    return LiftedGrading(cz, grading, not is_bad(lifted))


@dataclass(frozen=True)
class SpectrumQuery:
    """
    :param action: positive number or sympy expression such as 2*pi.
    :param assume_gap: declare eps_sigma < cutoff < eps_tau with every
    other eigenvalue outside (-cutoff, cutoff).
    """
    eps_tau: object
    eps_sigma: object
    action: object
    cutoff: object
    assume_gap: bool = False

    def __post_init__(self):
        for name in ('eps_tau', 'eps_sigma', 'action', 'cutoff'):
            value = sympy.sympify(getattr(self, name))
            object.__setattr__(self, name, value)
            if not value.is_positive:
                raise GeometryError('{} must be positive.'.format(name))


@dataclass(frozen=True)
class Eigenvalue:
    value: object
    multiplicity: int
    mode: int
    distinguished: bool = False

    @property
    def approx(self):
        return float(sympy.N(self.value))


@dataclass
class Spectrum:
    query: SpectrumQuery
    eigenvalues: list = field(default_factory=list)

    def window(self):
        """
        Eigenvalues strictly inside (-cutoff, cutoff).
        """
        return [e for e in self.eigenvalues
                if bool(sympy.Abs(e.value) < self.query.cutoff)]

    def values(self):
        return [e.value for e in self.eigenvalues]


def normal_spectrum(q):
    """
    The distinguished eigenvalues -eps_sigma and eps_tau, plus every mode
    m >= 1 eigenvalue, 2 lambda = (eps_tau - eps_sigma) +- sqrt(4 (2 pi m /
    a)^2 + (eps_tau + eps_sigma)^2), inside (-cutoff, cutoff), each with
    multiplicity 2.
    """
    eigenvalues = [
        Eigenvalue(-q.eps_sigma, 1, 0, distinguished=True),
        Eigenvalue(q.eps_tau, 1, 0, distinguished=True),
    ]
    m = 1
    while True:
        root = sympy.sqrt(4 * (2 * sympy.pi * m / q.action) ** 2
                          + (q.eps_tau + q.eps_sigma) ** 2)
        pair = [
            sympy.simplify(((q.eps_tau - q.eps_sigma) + root) / 2),
            sympy.simplify(((q.eps_tau - q.eps_sigma) - root) / 2),
        ]
        inside = [v for v in pair if bool(sympy.Abs(v) < q.cutoff)]
        if not inside:
            break
        eigenvalues.extend(Eigenvalue(v, 2, m) for v in inside)
        m += 1
    eigenvalues.sort(key=lambda e: float(sympy.N(e.value)))
    spectrum = Spectrum(q, eigenvalues)
    if q.assume_gap:
        if not (bool(q.eps_sigma < q.cutoff) and bool(q.cutoff < q.eps_tau)):
            raise GeometryError('gap assumption needs eps_sigma < cutoff < eps_tau.')
        if [e.value for e in spectrum.window()] != [-q.eps_sigma]:
            raise GeometryError(
                'gap assumption violated: window holds {}.'.format(
                    [str(e.value) for e in spectrum.window()]
                )
            )
    logger.debug('spectrum has %d eigenvalues in the window',
                  len(spectrum.window()))
    return spectrum
