"""Shared fixtures and Monte Carlo oracles for the test suite.

The MC oracles here are deliberately independent of the library's quadrature
path: they average over explicit standard normal samples, in chunks, and
report a standard error so tests can assert 3-sigma agreement.
"""

import math

import numpy as np
import pytest

from replica_lab import free_entropy_mc, standard_priors
from replica_lab.channel import make_evaluator


@pytest.fixture(scope="session")
def ev():
    return make_evaluator(61)


@pytest.fixture(scope="session")
def priors():
    return standard_priors()


def mc_log_expectation(fn, n_samples=10**7, seed=0, chunk=10**6):
    """(mean, stderr) of fn(z) over z ~ N(0,1), chunked to bound memory."""
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    count = 0
    while count < n_samples:
        m = min(chunk, n_samples - count)
        vals = fn(rng.standard_normal(m))
        total += float(vals.sum())
        total_sq += float((vals**2).sum())
        count += m
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return mean, math.sqrt(var / count)


def mc_psi_hat(prior, r, s, n_samples=10**7, seed=0):
    """Monte Carlo psi_hat for an arbitrary atom prior (oracle path)."""
    v = prior.values
    lw = prior.log_weights

    def fn(z):
        a = np.sqrt(r) * z[:, None] * v + s * v - 0.5 * r * v**2 + lw
        m = a.max(axis=1)
        return m + np.log(np.exp(a - m[:, None]).sum(axis=1))

    return mc_log_expectation(fn, n_samples, seed)


def mc_psi_bar(prior, r, s, n_samples=10**7, seed=0):
    """Monte Carlo psi_bar: per-atom psi_hat(r, s x*) combined exactly over x*."""
    mean = 0.0
    var = 0.0
    for k, (v_star, w) in enumerate(prior.atoms):
        m, se = mc_psi_hat(prior, r, s * v_star, n_samples, seed + 1000 * k)
        mean += w * m
        var += (w * se) ** 2
    return mean, math.sqrt(var)


def mc_log_cosh(r, s, n_samples=10**7, seed=0):
    """Monte Carlo of -r/2 + E log cosh(sqrt(r) z + s), the two-point closed form."""
    return mc_log_expectation(
        lambda z: -r / 2.0 + np.logaddexp(np.sqrt(r) * z + s, -(np.sqrt(r) * z + s)) - math.log(2.0),
        n_samples,
        seed,
    )


@pytest.fixture(scope="session")
def rademacher_fn_estimates(priors):
    """Free-entropy estimates at lambda = 2 for n in {8, 12, 16}, 400 draws.

    Session-scoped: the finite-size acceptance criterion and the module-level
    decay checks share these runs.
    """
    p = priors["rademacher"]
    return {n: free_entropy_mc(p, n, 2.0, 400, 7) for n in (8, 12, 16)}
