"""
JSON formats for presentations, augmentations, orbit models, surface
configurations and rigid-curve inventories, plus the report documents the
command line emits. Parsing errors carry the JSON pointer of the fault.
"""
from fractions import Fraction
import json
import logging
import os
import re

from .bilinearization import Augmentation
from .config import REPORT_SCHEMA_VERSION
from .errors import InputError, PybilinError
from .gluing_oracle import Inventory, RigidCurveDatum
from .graded_algebra import (
    CdgaPresentation,
    Generator,
    GradingSpec,
    Polynomial,
    check_generator_id,
)
from .model_geometry import (
    BlockPath,
    Hyperbolic,
    NegHyperbolicPair,
    OrbitModel,
    SmallRotation,
)
from .surface_doubles import DividingCircle, RegionSide, SurfaceConfig

logger = logging.getLogger(__name__)

RATIONAL = re.compile(r'-?\d+(/\d+)?', re.ASCII)


def _child(pointer, key):
    token = str(key).replace('~', '~0').replace('/', '~1')
    return '{}/{}'.format(pointer, token)


def parse_rational(value, pointer=''):
    """
    Accept an integer or a string "p" or "p/q".
    """
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError('expected a rational as "p/q", got {!r}'.format(value), pointer)
    if isinstance(value, str) and not RATIONAL.fullmatch(value):
        raise InputError('malformed rational {!r}'.format(value), pointer)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise InputError('malformed rational {!r}'.format(value), pointer)


def format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return '{}/{}'.format(value.numerator, value.denominator)


def _get(doc, key, pointer, expected=None, default=None, required=True):
    if not isinstance(doc, dict):
        raise InputError('expected an object', pointer)
    if key not in doc:
        if required:
            raise InputError('missing key {!r}'.format(key), pointer)
        return default
    value = doc[key]
    if expected is not None and (
            not isinstance(value, expected) or isinstance(value, bool) and expected is int):
        raise InputError(
            'expected {} for {!r}'.format(
                getattr(expected, '__name__', expected), key
            ),
            _child(pointer, key),
        )
    return value


def load_json(path):
    """
    :raise InputError: if the file is missing or is not JSON.
    """
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as error:
        raise InputError('cannot read {}: {}'.format(path, error.strerror))
    except json.JSONDecodeError as error:
        raise InputError('{} is not JSON: {}'.format(path, error.msg))


def grading_from_dict(doc, pointer='/grading'):
    kind = _get(doc, 'kind', pointer, str)
    try:
        if kind == 'Z':
            return GradingSpec.integer()
        if kind == 'Zmod':
            return GradingSpec.cyclic(_get(doc, 'd', pointer, int))
    except PybilinError as error:
        raise InputError(str(error), pointer)
    raise InputError('unknown grading kind {!r}'.format(kind), _child(pointer, 'kind'))


def grading_to_dict(grading):
    if grading.is_cyclic:
        return {'kind': 'Zmod', 'd': grading.modulus}
    return {'kind': 'Z'}


def generators_from_list(items, pointer='/generators'):
    if not isinstance(items, list):
        raise InputError('expected a list of generators', pointer)
    generators = []
    for i, item in enumerate(items):
        here = _child(pointer, i)
        gid = _get(item, 'id', here, str)
        try:
            check_generator_id(gid)
        except PybilinError as error:
            raise InputError(str(error), _child(here, 'id'))
        action = _get(item, 'action', here, required=False)
        generators.append(Generator(
            gid,
            _get(item, 'degree', here, int),
            None if action is None else parse_rational(action, _child(here, 'action')),
        ))
    return generators


def generators_to_list(generators):
    result = []
    for g in generators:
        item = {'id': g.id, 'degree': g.degree}
        if g.action is not None:
            item['action'] = format_rational(g.action)
        result.append(item)
    return result


def polynomial_from_list(items, ctx, pointer):
    if not isinstance(items, list):
        raise InputError('expected a list of terms', pointer)
    total = Polynomial()
    for i, item in enumerate(items):
        here = _child(pointer, i)
        word = _get(item, 'word', here, list)
        for j, gid in enumerate(word):
            if not isinstance(gid, str) or gid not in ctx:
                raise InputError('unknown generator {!r}'.format(gid),
                                 _child(_child(here, 'word'), j))
        coeff = parse_rational(_get(item, 'coeff', here, default=1, required=False),
                               _child(here, 'coeff'))
        total = total + Polynomial.from_word(word, ctx, coeff)
    return total


def polynomial_to_list(polynomial):
    return [
        {'coeff': format_rational(c), 'word': list(m.word())}
        for m, c in polynomial.items()
    ]


def augmentation_from_dict(values, name='', pointer='/'):
    if not isinstance(values, dict):
        raise InputError('expected an object of generator values', pointer)
    return Augmentation(
        {gid: parse_rational(v, _child(pointer, gid)) for gid, v in values.items()},
        name=name,
    )


def augmentation_to_dict(augmentation):
    return {gid: format_rational(v) for gid, v in sorted(augmentation.values.items())}


def presentation_from_dict(doc):
    """
    :return: (CdgaPresentation, mapping name -> Augmentation of the
    "augmentations" block).
    """
    grading = grading_from_dict(_get(doc, 'grading', ''))
    generators = generators_from_list(_get(doc, 'generators', ''))
    try:
        ctx = CdgaPresentation(grading, generators)
    except PybilinError as error:
        raise InputError(str(error), '/generators')
    differential = {}
    for gid, terms in _get(doc, 'differential', '', dict, {}, False).items():
        here = _child('/differential', gid)
        if gid not in ctx:
            raise InputError('differential of unknown generator {!r}'.format(gid), here)
        differential[gid] = polynomial_from_list(terms, ctx, here)
    try:
        A = ctx.with_differential(differential)
    except PybilinError as error:
        raise InputError(str(error), '/differential')
    augmentations = {
        name: augmentation_from_dict(values, name, _child('/augmentations', name))
        for name, values in _get(doc, 'augmentations', '', dict, {}, False).items()
    }
    logger.debug('loaded presentation with %d generators', len(A.ids))
    return A, augmentations


def presentation_to_dict(A, augmentations=None):
    doc = {
        'grading': grading_to_dict(A.grading),
        'generators': generators_to_list(A.generators),
        'differential': {
            gid: polynomial_to_list(A.d(gid)) for gid in A.ids if A.d(gid)
        },
    }
    if augmentations:
        doc['augmentations'] = {
            name: augmentation_to_dict(aug) for name, aug in sorted(augmentations.items())
        }
    return doc


def load_presentation(path):
    return presentation_from_dict(load_json(path))


def resolve_augmentation(spec, augmentations):
    """
    A name from the presentation's "augmentations" block, or the path of an
    augmentation JSON file.
    """
    if spec in augmentations:
        return augmentations[spec]
    if os.path.exists(spec):
        return augmentation_from_dict(load_json(spec), name=os.path.basename(spec))
    raise InputError('no augmentation named {!r}'.format(spec), '/augmentations')


def package_to_dict(package):
    """
    The bilinearized algebra as a presentation document plus its constant
    part as a separate vector.
    """
    doc = presentation_to_dict(package.algebra)
    doc['d0'] = {
        hid: format_rational(v) for hid, v in sorted(package.fundamental_functional.items())
    }
    return doc


_BLOCK_KINDS = ('rot', 'hyp', 'neghyp')


def block_from_dict(doc, pointer):
    kind = _get(doc, 'kind', pointer, str)
    try:
        if kind == 'rot':
            return SmallRotation(_get(doc, 'dir', pointer, int),
                                 _get(doc, 'window', pointer, int, 1, False))
        if kind == 'hyp':
            return Hyperbolic(parse_rational(_get(doc, 'b', pointer), _child(pointer, 'b')))
        if kind == 'neghyp':
            return NegHyperbolicPair(_get(doc, 'framing', pointer, str))
    except PybilinError as error:
        if isinstance(error, InputError):
            raise
        raise InputError(str(error), pointer)
    raise InputError('block kind must be one of {}'.format(_BLOCK_KINDS),
                     _child(pointer, 'kind'))


def block_to_dict(block):
    if isinstance(block, SmallRotation):
        return {'kind': 'rot', 'dir': block.direction, 'window': block.window}
    if isinstance(block, Hyperbolic):
        return {'kind': 'hyp', 'b': format_rational(block.b)}
    return {'kind': 'neghyp', 'framing': block.framing}


def orbit_from_dict(doc):
    blocks = _get(doc, 'blocks', '', list)
    action = parse_rational(_get(doc, 'action', '', default=1, required=False), '/action')
    try:
        path = BlockPath(
            tuple(block_from_dict(b, _child('/blocks', i)) for i, b in enumerate(blocks)),
            action,
        )
        return OrbitModel(path, _get(doc, 'multiplicity', '', int, 1, False))
    except PybilinError as error:
        if isinstance(error, InputError):
            raise
        raise InputError(str(error), '/')


def orbit_to_dict(orbit):
    return {
        'blocks': [block_to_dict(b) for b in orbit.path.blocks],
        'action': format_rational(orbit.path.action),
        'multiplicity': orbit.multiplicity,
    }


def _side_from_dict(doc, pointer):
    return RegionSide(
        disk=_get(doc, 'disk', pointer, bool),
        chi=_get(doc, 'chi', pointer, int),
        region=_get(doc, 'region', pointer, str, None, False),
    )


def surface_from_dict(doc):
    genus = _get(_get(doc, 'surface', '', dict), 'genus', '/surface', int)
    circles = []
    for i, item in enumerate(_get(doc, 'circles', '', list)):
        here = _child('/circles', i)
        circles.append(DividingCircle(
            _side_from_dict(_get(item, 'plus', here, dict), _child(here, 'plus')),
            _side_from_dict(_get(item, 'minus', here, dict), _child(here, 'minus')),
        ))
    return SurfaceConfig(genus, tuple(circles))


def _side_to_dict(side):
    doc = {'disk': side.disk, 'chi': side.chi}
    if side.region is not None:
        doc['region'] = side.region
    return doc


def surface_to_dict(cfg):
    return {
        'surface': {'genus': cfg.genus},
        'circles': [
            {'plus': _side_to_dict(c.plus), 'minus': _side_to_dict(c.minus)}
            for c in cfg.circles
        ],
    }


def inventory_from_dict(doc):
    grading = grading_from_dict(
        _get(doc, 'grading', '', dict, {'kind': 'Z'}, False)
    )
    generators = generators_from_list(_get(doc, 'generators', ''))
    known = {g.id for g in generators}
    curves = []
    planes = []
    try:
        for i, item in enumerate(_get(doc, 'curves', '', list, [], False)):
            here = _child('/curves', i)
            minus = _get(item, 'minus', here, list, [], False)
            for gid in [_get(item, 'plus', here, str)] + minus:
                if gid not in known:
                    raise InputError('unknown orbit {!r}'.format(gid), here)
            curves.append(RigidCurveDatum.curve(
                item['plus'],
                minus,
                sign=_get(item, 'sign', here, int, 1, False),
                coeff=parse_rational(_get(item, 'coeff', here, default=1, required=False),
                                     _child(here, 'coeff')),
                levels=[parse_rational(v, _child(_child(here, 'levels'), j))
                        for j, v in enumerate(_get(item, 'levels', here, list, [], False))],
            ))
        for i, item in enumerate(_get(doc, 'planes', '', list, [], False)):
            here = _child('/planes', i)
            orbit = _get(item, 'orbit', here, str)
            if orbit not in known:
                raise InputError('unknown orbit {!r}'.format(orbit), _child(here, 'orbit'))
            k = _get(item, 'k', here, required=False)
            planes.append(RigidCurveDatum.plane(
                orbit,
                _get(item, 'side', here, str),
                sign=_get(item, 'sign', here, int, 1, False),
                k=None if k is None else parse_rational(k, _child(here, 'k')),
            ))
        inventory = Inventory(
            grading, tuple(generators), tuple(curves), tuple(planes),
            parse_rational(_get(doc, 'eps_sigma', '', default=1, required=False),
                           '/eps_sigma'),
        )
        return inventory.check()
    except PybilinError as error:
        if isinstance(error, InputError):
            raise
        raise InputError(str(error), '/')


def inventory_to_dict(inventory):
    return {
        'grading': grading_to_dict(inventory.grading),
        'generators': generators_to_list(inventory.generators),
        'curves': [
            {
                'plus': c.plus,
                'minus': list(c.minus),
                'sign': c.sign,
                'coeff': format_rational(c.coeff),
                'levels': [format_rational(v) for v in c.levels],
            }
            for c in inventory.curves
        ],
        'planes': [
            {'orbit': p.orbit, 'side': p.side, 'sign': p.sign, 'k': format_rational(p.k)}
            for p in inventory.planes
        ],
        'eps_sigma': format_rational(inventory.eps_sigma),
    }


def _degree_map(dims):
    return {str(deg): n for deg, n in sorted(dims.items())}


def homology_to_dict(summary):
    return {
        'dims': _degree_map(summary.dims),
        'representatives': {
            str(deg): [
                {label: format_rational(v) for label, v in vector.items()}
                for vector in vectors
            ]
            for deg, vectors in sorted(summary.representatives.items())
        },
    }


def verdict_to_dict(verdict):
    """
    The verdict with its witness: the homotopy, the constructed augmentation
    of the bilinearized algebra, or the nonzero class evaluation.
    """
    doc = {
        'nonvanishing': verdict.nonvanishing,
        'sub_results': {
            'homotopic': verdict.homotopic,
            'class_zero': verdict.class_zero,
            'augmentation_found': verdict.augmentation_found,
            'unit_not_exact': verdict.unit_not_exact,
        },
        'word_bound': verdict.word_bound,
        'module_dims': _degree_map(verdict.module_dims),
    }
    if verdict.certificate is not None:
        doc['homotopy'] = {
            gid: format_rational(v) for gid, v in sorted(verdict.certificate.values.items())
        }
    if verdict.bilin_augmentation is not None:
        doc['bilinearized_augmentation'] = augmentation_to_dict(verdict.bilin_augmentation)
    if verdict.class_witness is not None:
        deg, representative, value = verdict.class_witness
        doc['class_witness'] = {
            'degree': deg,
            'cycle': {h: format_rational(v) for h, v in representative.items()},
            'value': format_rational(value),
        }
    if verdict.nonvanishing:
        doc['algebra_dims'] = _degree_map(verdict.algebra_dims)
        doc['series_dims'] = _degree_map(verdict.series_dims)
    return doc


def surface_result_to_dict(result):
    return {
        'tightness': result.tightness,
        'vanishing': result.vanishing,
        'generators': list(result.generators),
        'series': _degree_map(result.series),
        'criterion': verdict_to_dict(result.verdict),
    }


def gluing_report_to_dict(report):
    return {
        'agree': report.agree,
        'differential': {
            gid: polynomial_to_list(p) for gid, p in sorted(report.differential.items())
        },
        'expected': {
            gid: polynomial_to_list(p) for gid, p in sorted(report.expected.items())
        },
        'mismatches': [
            {'generator': gid, 'monomial': monomial,
             'oracle': format_rational(got), 'formula': format_rational(wanted)}
            for gid, monomial, got, wanted in report.mismatches
        ],
    }


def wrap_report(kind, payload):
    return {'version': REPORT_SCHEMA_VERSION, 'kind': kind, 'report': payload}


def dumps(document):
    return json.dumps(document, indent=2, sort_keys=True)
