from dataclasses import dataclass, field
from typing import List, Optional

DEFAULT_WORD_BOUND = 4
DEFAULT_MAX_COVER = 3
LITERAL_SYM_BOUND = 6
SEARCH_ASSIGNMENT_CAP = 250000
DEFAULT_SEED = 0
REPORT_SCHEMA_VERSION = 1
FLOAT_DISPLAY_TOLERANCE = 1e-12

OUTPUT_FORMATS = ('text', 'json')


@dataclass
class CommandConfig:
    """
    Options of one CLI invocation, checked on construction.
    """
    subcommand: str
    inputs: List[str] = field(default_factory=list)
    word_bound: int = DEFAULT_WORD_BOUND
    max_cover: int = DEFAULT_MAX_COVER
    output_format: str = 'text'
    candidates: Optional[str] = None
    seed: int = DEFAULT_SEED
    jobs: int = 1

    def __post_init__(self):
        if self.word_bound < 1:
            raise ValueError(
                'word_bound must be at least 1, got {}.'.format(self.word_bound)
            )
        if self.max_cover < 1:
            raise ValueError(
                'max_cover must be at least 1, got {}.'.format(self.max_cover)
            )
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(
                'output_format must be one of {}.'.format(OUTPUT_FORMATS)
            )
        if self.jobs < 1:
            raise ValueError('jobs must be at least 1.')
