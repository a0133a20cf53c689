"""
Command-line front end.

    pybilin criterion intro_xy.json --left a --right b
    pybilin surface sphere_one_circle.json --covers 3 --format json

Exit codes: 0 success (nonvanishing for `criterion`), 1 input or
validation error, 2 internal consistency failure, 3 vanishing verdict.
"""
import argparse
import logging
import sys

from . import __version__
from . import serialization
from .backends import SerialBackend, ThreadPoolBackend
from .bilinearization import (
    bilinearize,
    candidate_grid,
    search_augmentations_bounded,
    validate_augmentation,
)
from .config import CommandConfig, DEFAULT_MAX_COVER, DEFAULT_SEED, DEFAULT_WORD_BOUND
from .engine import Engine
from .errors import ConsistencyError, PybilinError
from .graded_algebra import validate_presentation
from .homology import linear_complex
from .model_geometry import cz_index, cz_parity_check, is_bad, lift_grading, orbit_grading
from .selftest import run_selftest
from .surface_doubles import SymmetricDoubleSpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONSISTENCY = 2
EXIT_VANISHING = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', dest='output_format', default='text',
                        choices=('text', 'json'))
    common.add_argument('-v', '--verbose', action='count', default=0)
    common.add_argument('--jobs', type=int, default=1,
                        help='worker threads for independent work items')
    return common


def build_parser():
    common = _common_options()
    parser = _Parser(prog='pybilin',
                     description='Bilinearized contact homology over Q.')
    parser.add_argument('--version', action='version', version=__version__)
    commands = parser.add_subparsers(dest='subcommand', parser_class=_Parser)
    commands.required = True

    validate = commands.add_parser('validate', parents=[common],
                                   help='check a presentation and its augmentations')
    validate.add_argument('dga')

    homology = commands.add_parser('homology', parents=[common],
                                   help='homology of the linear part')
    homology.add_argument('dga')
    homology.add_argument('--linearize', metavar='AUG')

    search = commands.add_parser('search', parents=[common],
                                 help='bounded augmentation search')
    search.add_argument('dga')
    search.add_argument('--candidates', default='2/1',
                        help='grid "P/Q": numerators up to P, denominators up to Q')

    for name, text in (('bilinearize', 'bilinearized algebra of a pair'),
                       ('criterion', 'decide the vanishing criterion')):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument('dga')
        sub.add_argument('--left', required=True, metavar='AUG')
        sub.add_argument('--right', required=True, metavar='AUG')
        sub.add_argument('--word-bound', type=int, default=DEFAULT_WORD_BOUND)

    surface = commands.add_parser('surface', parents=[common],
                                  help='contact homology of a surface neighborhood')
    surface.add_argument('surface')
    surface.add_argument('--covers', type=int, default=DEFAULT_MAX_COVER)
    surface.add_argument('--word-bound', type=int, default=DEFAULT_WORD_BOUND)

    double = commands.add_parser('double', parents=[common], help='symmetric double')
    double.add_argument('dga')
    double.add_argument('--aug', required=True)
    double.add_argument('--word-bound', type=int, default=DEFAULT_WORD_BOUND)

    glue = commands.add_parser('glue', parents=[common],
                               help='compare the gluing oracle with the formula')
    glue.add_argument('inventory')

    cz = commands.add_parser('cz', parents=[common], help='indices of an orbit model')
    cz.add_argument('orbit')

    selftest = commands.add_parser('selftest', parents=[common],
                                   help='run the property suite')
    selftest.add_argument('--seed', type=int, default=DEFAULT_SEED)
    selftest.add_argument('--scale', type=float, default=1.0)
    return parser


def _config(args):
    inputs = [getattr(args, key) for key in ('dga', 'surface', 'inventory', 'orbit')
              if getattr(args, key, None)]
    return CommandConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        word_bound=getattr(args, 'word_bound', DEFAULT_WORD_BOUND),
        max_cover=getattr(args, 'covers', DEFAULT_MAX_COVER),
        output_format=args.output_format,
        candidates=getattr(args, 'candidates', None),
        seed=getattr(args, 'seed', DEFAULT_SEED),
        jobs=args.jobs,
    )


def _dims_text(dims):
    if not any(dims.values()):
        return '  (zero)'
    return '\n'.join('  degree {}: {}'.format(d, n) for d, n in sorted(dims.items()) if n)


def _load_pair(path, left, right):
    A, augmentations = serialization.load_presentation(path)
    return (A, serialization.resolve_augmentation(left, augmentations),
            serialization.resolve_augmentation(right, augmentations))


def cmd_validate(config, args, engine):
    A, augmentations = serialization.load_presentation(config.inputs[0])
    reports = [validate_presentation(A)] + [
        validate_augmentation(A, aug) for _, aug in sorted(augmentations.items())
    ]
    payload = {
        'valid': all(r.valid for r in reports),
        'reports': [
            {'subject': r.subject, 'valid': r.valid,
             'violations': [{'kind': v.kind, 'item': v.item, 'detail': v.detail}
                            for v in r.violations]}
            for r in reports
        ],
    }
    lines = []
    for report in reports:
        lines.append('{}: {}'.format(report.subject, 'valid' if report.valid else 'invalid'))
        lines.extend('  {} at {} {}'.format(v.kind, v.item, v.detail).rstrip()
                     for v in report.violations)
    return (EXIT_OK if payload['valid'] else EXIT_INPUT), payload, '\n'.join(lines)


def cmd_homology(config, args, engine):
    A, augmentations = serialization.load_presentation(config.inputs[0])
    if args.linearize:
        aug = serialization.resolve_augmentation(args.linearize, augmentations)
        package = bilinearize(A, aug, aug)
        summary = engine.homology.homology(engine.homology.module_complex(package))
    else:
        constants = [gid for gid in A.ids if A.d(gid).constant_term]
        if constants:
            raise UsageError(
                'differential of {} has a constant term; pass --linearize AUG to '
                'linearize at an augmentation.'.format(', '.join(constants))
            )
        summary = engine.homology.homology(linear_complex(A))
    text = 'linearized homology:\n' + _dims_text(summary.dims)
    return EXIT_OK, serialization.homology_to_dict(summary), text


def cmd_search(config, args, engine):
    A, _ = serialization.load_presentation(config.inputs[0])
    try:
        numerator, denominator = (int(v) for v in config.candidates.split('/'))
    except ValueError:
        raise UsageError('--candidates must look like "P/Q".')
    found = search_augmentations_bounded(A, candidate_grid(numerator, denominator))
    payload = {'candidates': config.candidates,
               'augmentations': [serialization.augmentation_to_dict(a) for a in found]}
    text = '{} augmentations over the grid {}'.format(len(found), config.candidates)
    for aug in found:
        text += '\n  ' + ', '.join('{} = {}'.format(g, serialization.format_rational(v))
                                   for g, v in sorted(aug.values.items()))
    return EXIT_OK, payload, text


def cmd_bilinearize(config, args, engine):
    A, left, right = _load_pair(config.inputs[0], args.left, args.right)
    package = bilinearize(A, left, right)
    lines = []
    for hid in package.hat_ids:
        lines.append('d {} = {}'.format(hid, package.d(hid)))
    return EXIT_OK, serialization.package_to_dict(package), '\n'.join(lines)


def cmd_criterion(config, args, engine):
    A, left, right = _load_pair(config.inputs[0], args.left, args.right)
    verdict = engine.homology.decide_criterion(A, left, right, config.word_bound)
    if verdict.nonvanishing:
        values = ', '.join('K({}) = {}'.format(g, serialization.format_rational(v))
                           for g, v in sorted(verdict.certificate.values.items()))
        text = 'nonvanishing: augmentations are homotopic ({})'.format(values or 'K = 0')
        text += '\nhomology of the bilinearized algebra up to word length {}:\n{}'.format(
            verdict.word_bound, _dims_text(verdict.algebra_dims))
        code = EXIT_OK
    else:
        _, cycle, value = verdict.class_witness
        text = 'vanishing: fundamental class nonzero: {} -> {}'.format(
            ' + '.join('{}*{}'.format(serialization.format_rational(c), h)
                       if c != 1 else h for h, c in cycle.items()),
            serialization.format_rational(value),
        )
        code = EXIT_VANISHING
    return code, serialization.verdict_to_dict(verdict), text


def cmd_surface(config, args, engine):
    cfg = serialization.surface_from_dict(serialization.load_json(config.inputs[0]))
    result = engine.surfaces.ch_surface(cfg, config.max_cover, config.word_bound)
    if result.vanishing:
        text = '{}; CH = 0'.format(result.tightness)
    else:
        text = '{}; CH = Λ({})'.format(result.tightness, ', '.join(result.generators))
    return EXIT_OK, serialization.surface_result_to_dict(result), text


def cmd_double(config, args, engine):
    A, augmentations = serialization.load_presentation(config.inputs[0])
    aug = serialization.resolve_augmentation(args.aug, augmentations)
    result = engine.surfaces.symmetric_double(SymmetricDoubleSpec(A, aug), config.word_bound)
    payload = serialization.verdict_to_dict(result.verdict)
    payload['series'] = {
        str(length): {str(d): n for d, n in by_degree.items()}
        for length, by_degree in result.series.items()
    }
    text = 'nonvanishing; CH = S(H) with linearized homology\n{}'.format(
        _dims_text(result.verdict.module_dims))
    return EXIT_OK, payload, text


def cmd_glue(config, args, engine):
    inventory = serialization.inventory_from_dict(
        serialization.load_json(config.inputs[0]))
    report = engine.gluing.aggregate_differential(inventory)
    lines = ['d {} = {}'.format(gid + '.h', p) for gid, p in sorted(report.differential.items())]
    if report.agree:
        lines.append('oracle agrees with the bilinearized formula')
        code = EXIT_OK
    else:
        lines.extend('mismatch on {} at {}: {} != {}'.format(*m) for m in report.mismatches)
        code = EXIT_CONSISTENCY
    return code, serialization.gluing_report_to_dict(report), '\n'.join(lines)


def cmd_cz(config, args, engine):
    orbit = serialization.orbit_from_dict(serialization.load_json(config.inputs[0]))
    lifted = lift_grading(orbit)
    payload = {
        'cz': cz_index(orbit.path, orbit.multiplicity),
        'grading': orbit_grading(orbit),
        'good': not is_bad(orbit),
        'parity_identity': cz_parity_check(orbit.path, orbit.multiplicity),
        'lifted': {'cz': lifted.cz, 'grading': lifted.grading, 'good': lifted.good},
    }
    text = 'CZ = {cz}, |gamma| = {grading}, {0}, parity identity {1}'.format(
        'good' if payload['good'] else 'bad',
        'holds' if payload['parity_identity'] else 'fails',
        **payload
    ) + '\nlifted: CZ = {cz}, |gamma| = {grading}'.format(**payload['lifted'])
    code = EXIT_OK if payload['parity_identity'] else EXIT_CONSISTENCY
    return code, payload, text


def cmd_selftest(config, args, engine):
    report = run_selftest(config.seed, args.scale, engine.backend)
    lines = ['{:<36} {:<6} {:>6} {:>8.2f}s {}'.format(
        c.name, 'ok' if c.passed else 'FAILED', c.instances, c.seconds, c.detail).rstrip()
        for c in report.checks]
    return (EXIT_OK if report.passed else EXIT_CONSISTENCY), report.to_dict(), '\n'.join(lines)


COMMANDS = {
    'validate': cmd_validate,
    'homology': cmd_homology,
    'search': cmd_search,
    'bilinearize': cmd_bilinearize,
    'criterion': cmd_criterion,
    'surface': cmd_surface,
    'double': cmd_double,
    'glue': cmd_glue,
    'cz': cmd_cz,
    'selftest': cmd_selftest,
}


def _failure(config, code, message):
    if config.output_format == 'json':
        payload = {'error': message, 'exit': code}
        return code, serialization.dumps(serialization.wrap_report(config.subcommand, payload))
    return code, message


def run(argv):
    """
    :return: (exit code, report text).
    """
    try:
        args = build_parser().parse_args(argv)
        config = _config(args)
    except (UsageError, ValueError) as error:
        return EXIT_INPUT, 'error: {}'.format(error)
    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format='%(levelname)s %(name)s: %(message)s',
    )
    backend = ThreadPoolBackend(config.jobs) if config.jobs > 1 else SerialBackend()
    engine = Engine(backend)
    try:
        code, payload, text = COMMANDS[config.subcommand](config, args, engine)
    except ConsistencyError as error:
        logger.error('consistency check failed: %s', error)
        return _failure(config, EXIT_CONSISTENCY, 'internal consistency failure: {}'.format(error))
    except (PybilinError, UsageError) as error:
        return _failure(config, EXIT_INPUT, 'error: {}'.format(error))
    if config.output_format == 'json':
        return code, serialization.dumps(serialization.wrap_report(config.subcommand, payload))
    return code, text


def main(argv=None):
    code, output = run(sys.argv[1:] if argv is None else argv)
    print(output, file=sys.stdout if code in (EXIT_OK, EXIT_VANISHING) else sys.stderr)
    return code


if __name__ == '__main__':
    sys.exit(main())
