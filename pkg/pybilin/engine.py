from .gluing_oracle import GluingOracle
from .homology import HomologyEngine
from .surface_doubles import SurfaceDoubles


class Engine:
    """
    Run every computation through the attributes of one object sharing a
    backend.
    Usage example:
        >>> backend = ThreadPoolBackend(workers=4)
        >>> engine = Engine(backend)
        >>> engine.homology.decide_criterion(A, left, right).nonvanishing
        False

    """
    def __init__(self, backend):
        self.backend = backend
        self.homology = HomologyEngine(self.backend)
        self.surfaces = SurfaceDoubles(self.backend, homology=self.homology)
        self.gluing = GluingOracle(self.backend)
