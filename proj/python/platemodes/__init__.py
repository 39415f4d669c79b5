"""Clamped plate eigenmodes with clamped interior points."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_config as _run_config


def run(config, out_dir, threads=0):
    """Run a config (dict or JSON text); returns (status, manifest dict)."""
    text = config if isinstance(config, str) else json.dumps(config)
    status, manifest = _run_config(text, str(out_dir), threads)
    return status, json.loads(manifest)
