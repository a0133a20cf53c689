from pybilin import Engine, SerialBackend, ThreadPoolBackend
from pybilin.gluing_oracle import GluingOracle
from pybilin.homology import HomologyEngine
from pybilin.surface_doubles import SurfaceDoubles


class TestEngine:
    def test_init(self):
        backend = ThreadPoolBackend(workers=2)
        engine = Engine(backend)

        assert engine.backend is backend
        assert isinstance(engine.homology, HomologyEngine)
        assert isinstance(engine.surfaces, SurfaceDoubles)
        assert isinstance(engine.gluing, GluingOracle)
        assert engine.homology.backend is backend
        assert engine.gluing.backend is backend

    def test_surfaces_share_homology(self):
        engine = Engine(SerialBackend())
        assert engine.surfaces.homology is engine.homology
