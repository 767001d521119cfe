"""Radial two-species chemotaxis blow-up laboratory (C++ core bindings)."""

try:
    from ._chemolab import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _chemolab import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
