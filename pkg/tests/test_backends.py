import threading

import pytest

from pybilin.backends import BaseBackend, SerialBackend, ThreadPoolBackend


class TestBaseBackend:
    def test_init(self):
        with pytest.raises(TypeError) as excinfo:
            BaseBackend(1)
        assert 'abstract' in str(excinfo.value)


class TestSerialBackend:
    def test_init(self):
        assert SerialBackend().workers == 1

    def test_map(self):
        assert SerialBackend().map(lambda x: x * x, range(4)) == [0, 1, 4, 9]


class TestThreadPoolBackend:
    def test_init(self):
        assert ThreadPoolBackend().workers == 4
        with pytest.raises(ValueError) as excinfo:
            ThreadPoolBackend(workers=0)
        assert 'workers must be at least 1' in str(excinfo.value)

    def test_map_keeps_order(self):
        backend = ThreadPoolBackend(workers=3)
        assert backend.map(lambda x: -x, range(20)) == [-x for x in range(20)]

    def test_single_item_stays_in_thread(self):
        calling = threading.get_ident()
        assert ThreadPoolBackend().map(lambda _: threading.get_ident(), [0]) == [calling]
