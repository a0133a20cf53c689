from abc import ABC, abstractmethod
from .backends import BaseBackend


class BaseComponent(ABC):
    """
    This forces all components to have a backend and a name attribute.
    """
    @abstractmethod
    def __init__(self, backend, name):
        self.backend = backend
        self.name = name
        if not isinstance(self.backend, BaseBackend):
            raise TypeError('backend must be a BaseBackend object.')
