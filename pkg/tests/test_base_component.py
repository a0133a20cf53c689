import pytest

from pybilin import SerialBackend
from pybilin.base_component import BaseComponent
from pybilin.homology import HomologyEngine


class TestBaseComponent:
    def test_init(self):
        with pytest.raises(TypeError) as excinfo:
            BaseComponent(SerialBackend(), 'component')
        assert 'abstract' in str(excinfo.value)

    def test_backend_type(self):
        with pytest.raises(TypeError) as excinfo:
            HomologyEngine('serial')
        assert 'backend must be a BaseBackend object.' in str(excinfo.value)
