from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
import logging

logger = logging.getLogger(__name__)


class BaseBackend(ABC):
    """
    Any backend used to instantiate an Engine or an object inherited from
    BaseComponent should inherit from this class.
    """
    @abstractmethod
    def __init__(self, workers):
        if workers < 1:
            raise ValueError('workers must be at least 1.')
        self.workers = workers

    def map(self, fn, items):
        """
        Apply fn to every item.
        :param fn: one-argument callable.
        :param items: iterable of work items.
        :return: list of results, in input order.
        """
        return [fn(item) for item in items]


class SerialBackend(BaseBackend):
    """
    Evaluate work items one after the other in the calling thread.
    """
    def __init__(self):
        super().__init__(1)


class ThreadPoolBackend(BaseBackend):
    """
    Evaluate independent work items on a thread pool. All inputs are
    immutable, so no locking is needed.
    """
    def __init__(self, workers=4):
        super().__init__(workers)

    def map(self, fn, items):
        items = list(items)
        if len(items) < 2:
            return super().map(fn, items)
        logger.debug('mapping %d items on %d threads', len(items), self.workers)
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))
