class PybilinError(Exception):
    pass


class PresentationError(PybilinError):
    pass


class AugmentationError(PybilinError):
    pass


class GeometryError(PybilinError):
    pass


class GluingError(PybilinError):
    pass


class SearchLimitError(PybilinError):
    pass


class InputError(PybilinError):
    """
    Malformed input document. `pointer` is the JSON pointer of the fault.
    """
    def __init__(self, message, pointer=''):
        super().__init__('{} (at "{}")'.format(message, pointer or '/'))
        self.pointer = pointer or '/'


class ConsistencyError(PybilinError):
    """
    Raised when an internal cross-check disagrees. These must never fire
    on valid input; `item` names what failed.
    """
    def __init__(self, message, item=None):
        super().__init__(message)
        self.item = item
