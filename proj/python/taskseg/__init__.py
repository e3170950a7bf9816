"""Assembly-task segmentation toolkit.

Thin wrapper around the compiled extension; see the package README for the
pipeline overview (recording I/O, origin-centric graph, breakpoint
detection, synthetic plans, and evaluation).
"""

try:
    from ._taskseg import *  # noqa: F401,F403  (wheel layout)
    from ._taskseg import __doc__ as _doc
except ImportError:  # pragma: no cover - build-tree layout
    from _taskseg import *  # noqa: F401,F403
    from _taskseg import __doc__ as _doc

__doc__ = _doc or __doc__
