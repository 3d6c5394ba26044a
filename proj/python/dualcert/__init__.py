"""Dual first-order optimization methods with primal error certificates."""

try:
    from ._dualcert import *  # noqa: F401,F403
    from ._dualcert import __doc__ as _doc
except ImportError:  # in-tree builds keep the extension next to the package
    from _dualcert import *  # noqa: F401,F403
    from _dualcert import __doc__ as _doc

__doc__ = _doc
