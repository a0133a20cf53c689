import json
import os

import pytest

from pybilin.cli import (
    EXIT_CONSISTENCY,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_VANISHING,
    main,
    run,
)

DATA = os.path.join(os.path.dirname(__file__), '..', 'pybilin', 'data')
INTRO = os.path.join(DATA, 'intro_xy.json')


def data(name):
    return os.path.join(DATA, name)


class TestCriterion:
    def test_vanishing(self):
        code, text = run(['criterion', INTRO, '--left', 'a', '--right', 'b'])
        assert code == EXIT_VANISHING
        assert text == 'vanishing: fundamental class nonzero: x.h -> 2'

    def test_nonvanishing(self):
        code, text = run(['criterion', INTRO, '--left', 'a', '--right', 'a'])
        assert code == EXIT_OK
        assert text.startswith('nonvanishing: augmentations are homotopic (K = 0)')

    def test_json(self):
        code, text = run(['criterion', INTRO, '--left', 'a', '--right', 'b',
                          '--format', 'json'])
        assert code == EXIT_VANISHING
        document = json.loads(text)
        assert document['version'] == 1
        assert document['kind'] == 'criterion'
        assert document['report']['nonvanishing'] is False

    def test_augmentation_file(self, tmp_path):
        path = tmp_path / 'right.json'
        path.write_text('{"x": "1"}')
        code, _ = run(['criterion', INTRO, '--left', 'a', '--right', str(path)])
        assert code == EXIT_OK

    def test_threads(self):
        code, _ = run(['criterion', INTRO, '--left', 'a', '--right', 'b', '--jobs', '2'])
        assert code == EXIT_VANISHING


class TestOtherCommands:
    def test_validate(self):
        code, text = run(['validate', INTRO])
        assert code == EXIT_OK
        assert text.splitlines()[0] == 'presentation: valid'

    def test_validate_bad_augmentation(self, tmp_path):
        doc = json.loads(open(INTRO).read())
        doc['augmentations'] = {'a': {'x': '2'}}
        path = tmp_path / 'bad.json'
        path.write_text(json.dumps(doc))
        code, text = run(['validate', str(path)])
        assert code == EXIT_INPUT
        assert 'invalid' in text

    def test_homology(self):
        code, text = run(['homology', INTRO, '--linearize', 'a'])
        assert code == EXIT_OK
        assert text.startswith('linearized homology:')

    def test_search(self):
        code, text = run(['search', INTRO])
        assert code == EXIT_OK
        assert text.startswith('2 augmentations over the grid 2/1')
        assert '  x = -1' in text.splitlines()

    def test_search_without_augmentations(self):
        code, text = run(['search', data('no_augmentation.json')])
        assert code == EXIT_OK
        assert text == '0 augmentations over the grid 2/1'

    def test_bilinearize(self):
        code, text = run(['bilinearize', INTRO, '--left', 'a', '--right', 'b'])
        assert code == EXIT_OK
        assert 'd x.h = 2' in text.splitlines()

    def test_surface(self):
        code, text = run(['surface', data('sphere_one_circle.json'), '--covers', '2'])
        assert code == EXIT_OK
        assert text == 'tight; CH = Λ(g1_1, g1_2)'
        code, text = run(['surface', data('sphere_two_circles.json'), '--covers', '2'])
        assert text == 'overtwisted; CH = 0'

    def test_double(self):
        code, text = run(['double', INTRO, '--aug', 'a'])
        assert code == EXIT_OK
        assert text.startswith('nonvanishing')

    def test_glue(self):
        code, text = run(['glue', data('two_ends_inventory.json')])
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0] == 'd g.h = g2.h'
        assert lines[-1] == 'oracle agrees with the bilinearized formula'

    def test_cz(self):
        code, text = run(['cz', data('elliptic_orbit.json')])
        assert code == EXIT_OK
        assert text.splitlines() == [
            'CZ = 1, |gamma| = 1, good, parity identity holds',
            'lifted: CZ = 1, |gamma| = 2',
        ]


class TestErrors:
    def test_missing_file(self, tmp_path):
        code, text = run(['validate', str(tmp_path / 'nope.json')])
        assert code == EXIT_INPUT
        assert text.startswith('error:')

    def test_unknown_augmentation(self):
        code, _ = run(['criterion', INTRO, '--left', 'a', '--right', 'c'])
        assert code == EXIT_INPUT

    def test_bad_candidates(self):
        code, text = run(['search', INTRO, '--candidates', '2'])
        assert code == EXIT_INPUT
        assert 'P/Q' in text

    def test_word_bound(self):
        code, text = run(['criterion', INTRO, '--left', 'a', '--right', 'b',
                          '--word-bound', '0'])
        assert code == EXIT_INPUT
        assert 'word_bound must be at least 1' in text

    def test_homology_needs_linearize_with_constants(self):
        code, text = run(['homology', INTRO])
        assert code == EXIT_INPUT
        assert '--linearize' in text
        assert 'differential of y' in text

    def test_json_errors_are_wrapped(self):
        code, text = run(['homology', INTRO, '--format', 'json'])
        assert code == EXIT_INPUT
        document = json.loads(text)
        assert document['kind'] == 'homology'
        assert document['report']['exit'] == EXIT_INPUT
        assert '--linearize' in document['report']['error']

    def test_unknown_subcommand(self):
        code, _ = run(['frobnicate'])
        assert code == EXIT_INPUT

    def test_consistency_code_is_distinct(self):
        assert len({EXIT_OK, EXIT_INPUT, EXIT_CONSISTENCY, EXIT_VANISHING}) == 4


class TestMain:
    def test_stdout(self, capsys):
        assert main(['cz', data('elliptic_orbit.json')]) == EXIT_OK
        assert capsys.readouterr().out.startswith('CZ = 1')

    def test_vanishing_goes_to_stdout(self, capsys):
        assert main(['criterion', INTRO, '--left', 'a', '--right', 'b']) == EXIT_VANISHING
        assert 'vanishing' in capsys.readouterr().out

    def test_errors_go_to_stderr(self, capsys, tmp_path):
        assert main(['validate', str(tmp_path / 'nope.json')]) == EXIT_INPUT
        captured = capsys.readouterr()
        assert captured.out == ''
        assert captured.err.startswith('error:')


@pytest.mark.parametrize('fmt', ['text', 'json'])
def test_selftest_command(fmt):
    code, text = run(['selftest', '--scale', '0.05', '--format', fmt])
    assert code == EXIT_OK
    if fmt == 'json':
        assert json.loads(text)['report']['passed'] is True
