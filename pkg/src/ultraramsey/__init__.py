"""Big Ramsey degrees and colourings of ultrametric spaces of the form ``Q_S``."""

from .core import *  # noqa: F401,F403
from .treecodec import *  # noqa: F401,F403
from .partition import *  # noqa: F401,F403
from .divlab import *  # noqa: F401,F403
from . import core, divlab, partition, treecodec

__version__ = "0.1.0"
