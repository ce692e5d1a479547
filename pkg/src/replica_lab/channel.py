"""Scalar Gaussian channel free entropies by Gauss-Hermite quadrature.

The building blocks of the replica-symmetric analysis are expectations of

    log int exp(sqrt(r) z x + s x - (r/2) x^2) dP(x),        z ~ N(0,1),

over the channel noise z (and, for some variants, over a planted value x*
drawn from the prior).  With finite-atom priors the inner integral is a
finite sum, so the only integration is over z, done here with normalized
Gauss-Hermite nodes for the standard normal weight.  Three variants appear:

    psi_hat(r, s)  fixed tilt s,
    psi_bar(r, s) = E_{x*} psi_hat(r, s x*),
    psi(r)        = psi_bar(r, r)   (the Bayes-matched channel).

All integrands are bounded and analytic for bounded priors, so the
quadrature converges spectrally; 61 nodes leave errors well below 1e-10
over the parameter ranges used anywhere in this package.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermitenorm

from .errors import DomainError, InvalidArgumentError
from .priors import Prior

DEFAULT_NODE_COUNT = 61

# One-shot convergence bookkeeping: prior keys already checked against the
# doubled-node evaluator in this process.
_DOUBLING_CHECKED: set = set()
_DOUBLING_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ChannelEvaluator:
    """Gauss-Hermite nodes and weights normalized for z ~ N(0,1)."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    node_count: int = 0

    def __repr__(self):
        return f"ChannelEvaluator(node_count={self.node_count})"


@lru_cache(maxsize=16)
def make_evaluator(node_count: int = DEFAULT_NODE_COUNT) -> ChannelEvaluator:
    """Quadrature rule exact for polynomials in z up to degree 2*node_count - 1."""
    if node_count < 2:
        raise InvalidArgumentError(f"node_count must be >= 2, got {node_count}")
    nodes, weights = roots_hermitenorm(int(node_count))
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return ChannelEvaluator(nodes=nodes, weights=weights, node_count=int(node_count))


def default_evaluator() -> ChannelEvaluator:
    return make_evaluator(DEFAULT_NODE_COUNT)


def _resolve(ev: ChannelEvaluator | None) -> ChannelEvaluator:
    return ev if ev is not None else default_evaluator()


def psi_hat_array(ev: ChannelEvaluator, p: Prior, r, s) -> np.ndarray:
    """Vectorized psi_hat over broadcastable nonnegative r and real s.

    Memory scales as broadcast_size * node_count * atom_count; callers with
    large grids should chunk.  The inner log-sum over atoms subtracts the
    per-z maximum exponent before exponentiating, so large r and s are safe.
    """
    ev = _resolve(ev)
    r = np.asarray(r, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    r_b, s_b = np.broadcast_arrays(r, s)
    z = ev.nodes  # (G,)
    v = p.values  # (A,)
    lw = p.log_weights
    # exponent[..., G, A]
    a = (
        np.sqrt(r_b)[..., None, None] * z[:, None] * v[None, :]
        + s_b[..., None, None] * v[None, :]
        - 0.5 * r_b[..., None, None] * v[None, :] ** 2
        + lw[None, :]
    )
    m = a.max(axis=-1)
    inner = m + np.log(np.exp(a - m[..., None]).sum(axis=-1))  # (..., G)
    return inner @ ev.weights


def _check_r(r) -> None:
    if np.any(np.asarray(r) < 0):
        raise DomainError(f"r must be >= 0, got {r}")


def _maybe_doubling_check(ev: ChannelEvaluator, p: Prior, r: float, s: float):
    """Once per process and prior, compare against the doubled-node rule.

    Runs only for the default evaluator; a drift above 1e-8 signals that the
    quadrature has stopped resolving the integrand and is worth a warning.
    """
    if ev.node_count != DEFAULT_NODE_COUNT:
        return
    key = p.atoms
    if key in _DOUBLING_CHECKED:
        return
    _DOUBLING_CHECKED.add(key)
    ev2 = make_evaluator(2 * DEFAULT_NODE_COUNT - 1)
    a = float(psi_hat_array(ev, p, r, s))
    b = float(psi_hat_array(ev2, p, r, s))
    if abs(a - b) > _DOUBLING_TOL:
        warnings.warn(
            f"doubling quadrature nodes moved psi_hat by {abs(a - b):.3e} "
            f"at (r={r}, s={s}) for prior {p.name!r}",
            RuntimeWarning,
            stacklevel=3,
        )


def psi_hat(ev: ChannelEvaluator | None, p: Prior, r: float, s: float) -> float:
    """psi_hat(r, s) = E_z log int exp(sqrt(r) z x + s x - (r/2) x^2) dP(x)."""
    _check_r(r)
    ev = _resolve(ev)
    _maybe_doubling_check(ev, p, float(r), float(s))
    return float(psi_hat_array(ev, p, float(r), float(s)))


def psi_bar_array(ev: ChannelEvaluator | None, p: Prior, r, s) -> np.ndarray:
    """Vectorized psi_bar(r, s) = sum_{x*} w(x*) psi_hat(r, s * x*)."""
    ev = _resolve(ev)
    r = np.asarray(r, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    r_b, s_b = np.broadcast_arrays(r, s)
    vals = psi_hat_array(ev, p, r_b[..., None], s_b[..., None] * p.values)
    return vals @ p.weights


def psi_bar(ev: ChannelEvaluator | None, p: Prior, r: float, s: float) -> float:
    """psi_bar(r, s) = E_{x*} psi_hat(r, s x*) with x* drawn from the prior."""
    _check_r(r)
    ev = _resolve(ev)
    _maybe_doubling_check(ev, p, float(r), float(s))
    return float(psi_bar_array(ev, p, float(r), float(s)))


def psi_array(ev: ChannelEvaluator | None, p: Prior, r) -> np.ndarray:
    """Vectorized psi(r) = psi_bar(r, r)."""
    r = np.asarray(r, dtype=np.float64)
    return psi_bar_array(ev, p, r, r)


def psi(ev: ChannelEvaluator | None, p: Prior, r: float) -> float:
    """psi(r) = E_{x*, z} log int exp(sqrt(r) z x + r x x* - (r/2) x^2) dP(x).

    Equals psi_bar(r, r): the planted tilt is s = r x* averaged over x*.
    """
    _check_r(r)
    ev = _resolve(ev)
    _maybe_doubling_check(ev, p, float(r), float(r))
    return float(psi_array(ev, p, float(r)))


def psi_prime(ev: ChannelEvaluator | None, p: Prior, r: float) -> float:
    """d psi / dr by finite differences with step h = max(1e-6, 1e-6 r).

    Central away from the boundary; second-order one-sided on [0, h) where a
    central stencil would need r < 0.  Accuracy ~1e-9, ample for the fixed
    point iteration q <- 2 psi'(lambda q).
    """
    _check_r(r)
    ev = _resolve(ev)
    r = float(r)
    h = max(1e-6, 1e-6 * r)
    if r >= h:
        vals = psi_array(ev, p, np.array([r - h, r + h]))
        return float((vals[1] - vals[0]) / (2.0 * h))
    vals = psi_array(ev, p, np.array([r, r + h, r + 2.0 * h]))
    return float((-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * h))


def asymmetry_gap(ev: ChannelEvaluator | None, p: Prior, r: float) -> float:
    """psi_bar(r, r) - psi_bar(r, -r); nonnegative for every prior and r >= 0."""
    _check_r(r)
    ev = _resolve(ev)
    r = float(r)
    vals = psi_bar_array(ev, p, np.array([r, r]), np.array([r, -r]))
    return float(vals[0] - vals[1])
