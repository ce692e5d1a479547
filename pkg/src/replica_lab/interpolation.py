"""Interpolating Hamiltonians between the matrix model and a scalar channel.

The interpolation couples the spiked-matrix interaction at strength t to a
decoupled one-body Gaussian side channel at strength 1 - t:

    -H_t(x) = sum_{i<j} [ sqrt(t lam/N) W_ij x_i x_j
                          + (t lam/N) x_i x*_i x_j x*_j
                          - (t lam/2N) x_i^2 x_j^2 ]
            + sum_i    [ sqrt((1-t) r) z_i x_i
                          + (1-t) s x_i x*_i
                          - ((1-t) r / 2) x_i^2 ],

with r = lam q and s = lam m.  The matched case s = r drives the free-entropy
lower bound (the t-derivative is bounded below by -lam q^2/4 up to O(1/N));
the general case drives the upper bound on the overlap-restricted free
entropy.  Both are verified here by finite differences of the exactly
enumerated path free entropy phi(t), with disorder shared across the t grid
so slope estimates are paired.

The matrix part of -H_t is algebraically the original Hamiltonian at
effective SNR t*lambda, and is computed through exactly that code path; at
t = 1 the side coefficients are exact zeros, so phi(1) reproduces the plain
free-entropy estimator bit for bit on shared seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelEvaluator
from .errors import DomainError, InvalidArgumentError
from .finite import (
    DEFAULT_BUDGET,
    SpikedInstance,
    _logsumexp,
    _matrix_energies,
    _mc_estimate,
    _sample_atoms,
    _triu,
    McEstimate,
    derive_seed,
    enumeration_table,
    instance_from_parts,
    sample_instance,
)
from .priors import Prior, support_bound
from .report import VerificationReport
from .rs import f_hat, golden_section_min

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class AugmentedInstance:
    """A base instance plus the side-channel observations of the t-path.

    side_obs records y_i = sqrt((1-t) r) x*_i + z_i; the Hamiltonian uses the
    noise z_i directly.  At t = 1 every side coefficient vanishes, at t = 0
    every matrix coefficient does.
    """

    base: SpikedInstance
    t: float
    r: float
    s: float
    side_noise: np.ndarray = field(repr=False)
    side_obs: np.ndarray = field(repr=False)


def _check_t(t: float):
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")


def augment(inst: SpikedInstance, t: float, r: float, s: float, seed: int) -> AugmentedInstance:
    """Draw the side noise and assemble the augmented observation set."""
    _check_t(t)
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    z = np.random.default_rng(int(seed) & _MASK64).standard_normal(inst.n)
    obs = math.sqrt((1.0 - t) * r) * inst.spike + z
    z.setflags(write=False)
    obs.setflags(write=False)
    return AugmentedInstance(base=inst, t=float(t), r=float(r), s=float(s), side_noise=z, side_obs=obs)


def h_t(aug: AugmentedInstance, x) -> float:
    """-H_t(x) for one configuration, evaluated directly from the definition."""
    _check_t(aug.t)
    inst = aug.base
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (inst.n,):
        raise InvalidArgumentError(f"x must have length {inst.n}, got shape {x.shape}")
    n = inst.n
    i, j = _triu(n)
    pp = x[i] * x[j]
    spike_pp = inst.spike[i] * inst.spike[j]
    t, lam, r, s = aug.t, inst.lam, aug.r, aug.s
    mat = (
        math.sqrt(t * lam / n) * (inst.noise @ pp)
        + t * lam / n * (spike_pp @ pp)
        - t * lam / (2.0 * n) * (pp @ pp)
    )
    side = (
        math.sqrt((1.0 - t) * r) * (aug.side_noise @ x)
        + (1.0 - t) * s * (x @ inst.spike)
        - (1.0 - t) * r / 2.0 * (x @ x)
    )
    return float(mat + side)


def _phi_t_draws(
    p: Prior,
    n: int,
    lam: float,
    q: float,
    m: float,
    t_values,
    n_disorder: int,
    seed: int,
    restricted=None,
    spike=None,
    budget: int = DEFAULT_BUDGET,
) -> np.ndarray:
    """Per-draw path free entropies, shape (n_disorder, len(t_values)).

    Spike handling has two variants: resampled per draw when spike is None
    (the expectation over x* of the lower-bound argument), held fixed
    otherwise (the fixed-spike potential of the upper-bound argument).
    Disorder (W, z) is drawn once per replica and shared across every t.
    """
    if q < 0:
        raise DomainError(f"q must be >= 0, got {q}")
    t_values = [float(t) for t in t_values]
    for t in t_values:
        _check_t(t)
    r = lam * q
    s = lam * m
    table = enumeration_table(p, n, budget)
    n_pairs = n * (n - 1) // 2

    fixed_mask = None
    if spike is not None:
        spike = np.asarray(spike, dtype=np.float64)
        if restricted is not None:
            m_win, eps_win = restricted
            overlap = table.X @ spike / n
            fixed_mask = (overlap >= m_win) & (overlap < m_win + eps_win)

    out = np.empty((n_disorder, len(t_values)))
    for k in range(n_disorder):
        if spike is None:
            inst0 = sample_instance(p, n, lam, derive_seed(seed, k))
            spike_k, noise_k = inst0.spike, inst0.noise
        else:
            spike_k = spike
            rng = np.random.default_rng(derive_seed(seed, k) & _MASK64)
            noise_k = rng.standard_normal(n_pairs)
        z = np.random.default_rng(derive_seed(seed, k, 1) & _MASK64).standard_normal(n)

        if fixed_mask is not None:
            mask = fixed_mask
        elif restricted is not None:
            m_win, eps_win = restricted
            overlap = table.X @ spike_k / n
            mask = (overlap >= m_win) & (overlap < m_win + eps_win)
        else:
            mask = None

        x_cfg = table.X if mask is None else table.X[mask]
        logw = table.logw if mask is None else table.logw[mask]
        pairsq = table.pairsq if mask is None else table.pairsq[mask]
        sumsq = table.sumsq if mask is None else table.sumsq[mask]
        if x_cfg.shape[0] == 0:
            out[k, :] = -np.inf
            continue
        xz = x_cfg @ z
        xsp = x_cfg @ spike_k
        for c, t in enumerate(t_values):
            inst_t = instance_from_parts(spike_k, noise_k, t * lam, seed=derive_seed(seed, k))
            e = logw + _matrix_energies(inst_t, x_cfg, pairsq)
            side = (
                math.sqrt((1.0 - t) * r) * xz
                + (1.0 - t) * s * xsp
                - (1.0 - t) * r / 2.0 * sumsq
            )
            out[k, c] = _logsumexp(e + side) / n
    return out


def phi_of_t(
    p: Prior,
    n: int,
    lam: float,
    q: float,
    m: float,
    t: float,
    n_disorder: int,
    seed: int,
    restricted=None,
    spike=None,
    budget: int = DEFAULT_BUDGET,
) -> McEstimate:
    """Path free entropy phi(t), optionally overlap-restricted or fixed-spike.

    restricted is an optional (m_window, eps) pair selecting configurations
    with R_{1,*} in [m_window, m_window + eps); spike fixes the planted
    vector instead of resampling it per disorder draw.  An unreachable
    window yields the -inf sentinel.
    """
    vals = _phi_t_draws(
        p, n, lam, q, m, [t], n_disorder, seed, restricted=restricted, spike=spike, budget=budget
    )[:, 0]
    if not np.isfinite(vals).all():
        return McEstimate(float("-inf"), 0.0, n_disorder, int(seed), empty_window=True)
    return _mc_estimate(vals, seed)


DEFAULT_T_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def guerra_slope_check(
    p: Prior,
    n: int,
    lam: float,
    q: float,
    t_grid=DEFAULT_T_GRID,
    n_disorder: int = 400,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    c_allowance: float | None = None,
) -> VerificationReport:
    """Finite-difference check of the lower-bound slope phi'(t) >= -lam q^2/4 - C/N.

    Runs the matched interpolation (s = r = lam q) with the spike resampled
    per draw, computes paired slope estimates on adjacent t-grid points, and
    passes if every slope clears the bound within C/N plus 3 standard errors,
    C defaulting to the calibration allowance lam K^4.
    """
    t_grid = [float(t) for t in t_grid]
    if len(t_grid) < 2 or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise InvalidArgumentError("t_grid must be strictly increasing with >= 2 points")
    K = support_bound(p)
    c_val = lam * K**4 if c_allowance is None else c_allowance
    phis = _phi_t_draws(p, n, lam, q, q, t_grid, n_disorder, seed, budget=budget)
    dt = np.diff(np.asarray(t_grid))
    slopes = np.diff(phis, axis=1) / dt
    slope_mean = slopes.mean(axis=0)
    if n_disorder > 1:
        slope_se = slopes.std(axis=0, ddof=1) / math.sqrt(n_disorder)
    else:
        slope_se = np.zeros_like(slope_mean)
    bound = lam * q * q / 4.0 + c_val / n
    margins = slope_mean + bound + 3.0 * slope_se
    worst = int(np.argmin(margins))
    return VerificationReport(
        check="guerra_slope",
        params={
            "prior": p.name,
            "n": n,
            "lambda": lam,
            "q": q,
            "t_grid": list(t_grid),
            "n_disorder": n_disorder,
            "seed": seed,
            "min_slope": float(slope_mean[worst]),
            "worst_segment": worst,
        },
        slack=float(margins[worst]),
        stderr=float(slope_se[worst]),
        allowance=float(bound + 3.0 * slope_se[worst]),
        passed=bool(margins[worst] >= 0.0),
    )


def fp_upper_check(
    p: Prior,
    n: int,
    lam: float,
    m: float,
    eps: float,
    q_grid=None,
    n_disorder: int = 400,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    ev: ChannelEvaluator | None = None,
    c_allowance: float | None = None,
) -> VerificationReport:
    """Interpolation upper bound on the Franz-Parisi potential.

    Draws one spike from the prior, estimates Phi_eps(m, x*) over the matrix
    disorder, and checks it against inf_q F_hat(lam, m, q, x*) + lam eps^2/2
    plus the calibration allowance C/N + 3 stderr (C = lam K^4 by default).
    An unreachable window produces a skipped (vacuously passing) report.
    """
    from .finite import fp_potential  # local import to keep module load acyclic

    if q_grid is None:
        q_grid = np.linspace(0.0, support_bound(p) ** 2 + 1.0, 41)
    q_grid = np.asarray(sorted(float(q) for q in q_grid))
    spike = _sample_atoms(
        p, n, np.random.default_rng(derive_seed(seed, 0, 2) & _MASK64)
    )
    lhs = fp_potential(p, n, lam, m, eps, spike, n_disorder, derive_seed(seed, 1), budget)
    params = {
        "prior": p.name,
        "n": n,
        "lambda": lam,
        "m": m,
        "eps": eps,
        "n_disorder": n_disorder,
        "seed": seed,
    }
    if lhs.empty_window:
        params["skipped"] = "empty overlap window"
        return VerificationReport(
            check="fp_upper", params=params, slack=float("inf"),
            stderr=0.0, allowance=0.0, passed=True,
        )

    def rhs(q):
        return f_hat(p, lam, m, float(q), spike, ev)

    vals = np.array([rhs(q) for q in q_grid])
    i = int(np.argmin(vals))
    a = q_grid[max(i - 1, 0)]
    b = q_grid[min(i + 1, q_grid.size - 1)]
    q_min, rhs_min = golden_section_min(rhs, float(a), float(b))
    if vals[i] < rhs_min:
        q_min, rhs_min = float(q_grid[i]), float(vals[i])

    K = support_bound(p)
    c_val = lam * K**4 if c_allowance is None else c_allowance
    allowance = lam * eps * eps / 2.0 + c_val / n + 3.0 * lhs.stderr
    slack = rhs_min + allowance - lhs.mean
    params.update({"q_min": q_min, "rhs_min": rhs_min, "lhs_mean": lhs.mean})
    return VerificationReport(
        check="fp_upper",
        params=params,
        slack=float(slack),
        stderr=lhs.stderr,
        allowance=float(allowance),
        passed=bool(slack >= 0.0),
    )
