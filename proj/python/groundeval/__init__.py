"""Grounded-response evaluation: statistics, judge math, and cost model.

Thin re-export of the compiled module. The heavy lifting (stores, clients,
report rendering) stays in the C++ CLI; this package exposes the numeric
operations for notebooks and scripts.
"""

try:
    from ._groundeval import *  # noqa: F401,F403  (installed wheel layout)
    from ._groundeval import __version__  # noqa: F401
except ImportError:  # build-tree layout: module sits next to the package on sys.path
    from _groundeval import *  # noqa: F401,F403
    from _groundeval import __version__  # noqa: F401
