"""Alsomitra glider simulation, cloning, verification and reachability."""

import json as _json

try:
    from ._glider import *  # noqa: F401,F403
    from . import _glider as _core
except ImportError:  # development layout: extension on PYTHONPATH next to this package
    from _glider import *  # noqa: F401,F403
    import _glider as _core

__version__ = _core.__version__


def load_config(path):
    """Resolved configuration (defaults filled in) as a dict."""
    return _json.loads(_core.config_json(path))
