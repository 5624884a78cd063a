"""Stylized facts of high-frequency price series.

Thin wrapper over the C++ core. Arrays go in and come out as float64 numpy arrays.
"""

import json

from . import _core
from ._core import *  # noqa: F401,F403


def default_config():
    """Default run configuration as a dict."""
    return json.loads(_core.default_config())


def run(config):
    """Run a full analysis. `config` is a dict or JSON text.

    Returns (report, exit_code) with the report parsed into a dict.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    report, code = _core.run(text)
    return json.loads(report), code
