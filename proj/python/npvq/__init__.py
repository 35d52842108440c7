"""Speaker identification with fused linear and nonlinear predictive codebooks.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
