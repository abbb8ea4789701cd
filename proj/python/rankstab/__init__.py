"""Feature ranking stability and predictive performance toolkit."""

from rankstab._core import *  # noqa: F401,F403
from rankstab._core import __doc__ as _core_doc

__version__ = "0.1.0"
__doc__ = _core_doc
