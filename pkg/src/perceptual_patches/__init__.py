"""A toolkit for perceptual adversarial patches against density-map
crowd counting models: toy counting networks on synthetic scenes,
transferable patch generation, baseline attacks, adversarial training
and evaluation reports.
"""

import logging as _logging

__license__ = "MIT"
__version__ = "0.1.0"


def enable_logging(level=_logging.INFO) -> None:
    """Enable logging for this package.

    Args:
        level (Level): The log level.
    """
    _logging.getLogger(__name__).setLevel(level)
