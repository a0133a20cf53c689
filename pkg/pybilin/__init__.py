__version__ = '0.1.0.dev'
from .backends import SerialBackend, ThreadPoolBackend
from .engine import Engine
