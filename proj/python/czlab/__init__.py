"""Python access to the czlab library: grid operators, function spaces, curve kernels and the suites."""

import json

from ._czlab import (
    ConfigError,
    CzlabError,
    Grid,
    GridFunction,
    InvalidArgument,
    bmo_norm,
    curve_kernel,
    h1_norm,
    hilbert_transform,
    lp_norm,
    maximal_function,
    pairing,
    para_accretivity_constant,
    suite_names,
)
from ._czlab import _default_config, _resolve_config, _run_suite

__all__ = [
    "ConfigError",
    "CzlabError",
    "Grid",
    "GridFunction",
    "InvalidArgument",
    "bmo_norm",
    "curve_kernel",
    "default_config",
    "h1_norm",
    "hilbert_transform",
    "lp_norm",
    "maximal_function",
    "pairing",
    "para_accretivity_constant",
    "resolve_config",
    "run_suite",
    "sample",
    "suite_names",
]


def sample(grid, f):
    """GridFunction with values f(x) at the grid's midpoints; f must accept a numpy array."""
    import numpy as np

    return GridFunction(grid, np.asarray(f(np.asarray(grid.points())), dtype=complex))


def default_config(suite):
    return json.loads(_default_config(suite))


def resolve_config(suite, user):
    return json.loads(_resolve_config(suite, json.dumps(user)))


def run_suite(suite, config, out_dir=None):
    """Resolve config, run the suite and return (summary dict, {csv name: text}).

    With out_dir, the artifacts are also written there exactly as the command line tool writes them.
    """
    resolved = _resolve_config(suite, json.dumps(config))
    summary, tables = _run_suite(suite, resolved, "" if out_dir is None else str(out_dir))
    return json.loads(summary), dict(tables)
