"""Partition calculus and Monte Carlo checks for trace fluctuations of sample covariance matrices."""

import json
from fractions import Fraction

from . import _mpfluct
from ._mpfluct import ConfigError, DomainError, Error, SizeLimitError

__version__ = _mpfluct.version

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "SizeLimitError",
    "a_coefficient",
    "beta_stats",
    "chebyshev_t",
    "cli_main",
    "coeff_triangles",
    "g_closed_form",
    "gamma_poly",
    "gamma_scaled",
    "mp_moment",
    "nhpp_count",
    "run_experiment",
    "un_exact_m1",
]


def _q(value):
    return str(Fraction(value))


def _fractions(values):
    return [Fraction(v) for v in values]


def _config(config):
    return config if isinstance(config, str) else json.dumps(config)


def chebyshev_t(k):
    """Coefficients of the monic Chebyshev polynomial T_k, lowest power first."""
    return _fractions(_mpfluct.chebyshev_t(k))


def gamma_poly(k, y):
    return _fractions(_mpfluct.gamma_poly(k, _q(y)))


def gamma_scaled(k, y, sigma2):
    return _fractions(_mpfluct.gamma_scaled(k, _q(y), _q(sigma2)))


def coeff_triangles(order, y):
    """(gamma, inverse) as lists of rows; row k holds columns 0..k."""
    gamma, inverse = _mpfluct.coeff_triangles(order, _q(y))
    return [_fractions(r) for r in gamma], [_fractions(r) for r in inverse]


def g_closed_form(k, m, y):
    return Fraction(_mpfluct.g_closed_form(k, m, _q(y)))


def mp_moment(k, kappa=1, mu=1, sigma2=1):
    return Fraction(_mpfluct.mp_moment(k, _q(kappa), _q(mu), _q(sigma2)))


nhpp_count = _mpfluct.nhpp_count
a_coefficient = _mpfluct.a_coefficient


def beta_stats(config):
    """Beta statistics of the configured structure at its grid size."""
    return _mpfluct.beta_stats(_config(config))


def un_exact_m1(config, k_total=2):
    return Fraction(_mpfluct.un_exact_m1(_config(config), k_total))


def run_experiment(kind, config):
    """Runs 'clt', 'covdiag' or 'moments' and returns the result table as a dict."""
    return _mpfluct.run_experiment(kind, _config(config))


def cli_main(args):
    """Runs the command line tool in process; returns (exit code, stdout)."""
    return _mpfluct.cli_main([str(a) for a in args])
