"""Stochastic fractional heat equation laboratory.

Thin Python layer over the C++ core: constants, kernels, noise, fBm paths,
simulation, and the verification harness.
"""

import json

from ._core import (
    ConfigurationError,
    DegenerateTestError,
    FracsheError,
    NumericError,
    ParameterDomainError,
    __version__,
    c_alpha_gamma_d,
    constants,
    continuum_variance,
    coordinates,
    fbm_path,
    gaussian_abs_moment,
    green_kernel,
    kolmogorov_cdf,
    ks_critical_value,
    linear_variance,
    q_variation,
    replay,
    sample_noise,
    simulate,
)
from . import _core


def _dump(config):
    return config if isinstance(config, str) else json.dumps(config)


def resolve(config):
    """Config dict with every default filled in."""
    return json.loads(_core.resolved_config(_dump(config)))


def execute(config, threads=0):
    """Run the requested experiments in memory; returns {name: verdict}."""
    return json.loads(_core._execute(_dump(config), threads))


def run(config, threads=0):
    """Run with artifacts and manifest under config["output_dir"]."""
    return _core._run(_dump(config), threads)


__all__ = [
    "ConfigurationError",
    "DegenerateTestError",
    "FracsheError",
    "NumericError",
    "ParameterDomainError",
    "__version__",
    "c_alpha_gamma_d",
    "constants",
    "continuum_variance",
    "coordinates",
    "execute",
    "fbm_path",
    "gaussian_abs_moment",
    "green_kernel",
    "kolmogorov_cdf",
    "ks_critical_value",
    "linear_variance",
    "q_variation",
    "replay",
    "resolve",
    "run",
    "sample_noise",
    "simulate",
]
