"""The named inequality/identity suite behind the `verify` CLI command.

Each check produces a VerificationReport whose slack is >= 0 iff the check
passes.  Deterministic checks carry zero standard error; Monte Carlo checks
grant themselves exactly the allowance stated in their report.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelEvaluator, asymmetry_gap
from .errors import EnumerationBudgetError
from .finite import (
    DEFAULT_BUDGET,
    derive_seed,
    kl_log_likelihood_ratio,
    nishimori_check,
    sample_instance,
)
from .interpolation import fp_upper_check, guerra_slope_check
from .priors import Prior, second_moment
from .report import VerificationReport
from .rs import phi_rs, saddle, state_evolution


def tilt_asymmetry_check(
    p: Prior, r_grid=None, tol: float = 1e-10, ev: ChannelEvaluator | None = None
) -> VerificationReport:
    """psi_bar(r, r) >= psi_bar(r, -r) on a grid of r values."""
    if r_grid is None:
        r_grid = np.arange(0.0, 10.0 + 1e-12, 0.25)
    gaps = [asymmetry_gap(ev, p, float(r)) for r in r_grid]
    worst = min(gaps)
    return VerificationReport(
        check="tilt_asymmetry",
        params={"prior": p.name, "r_max": float(max(r_grid)), "min_gap": float(worst)},
        slack=float(worst + tol),
        stderr=0.0,
        allowance=tol,
        passed=bool(worst >= -tol),
    )


def saddle_equivalence_check(
    p: Prior, lam_grid=None, tol: float = 1e-4, ev: ChannelEvaluator | None = None
) -> VerificationReport:
    """|sup_m inf_q F_bar - sup_q F| <= tol along a lambda grid."""
    if lam_grid is None:
        lam_grid = (0.5, 1.0, 2.0, 4.0)
    worst = 0.0
    worst_lam = float(lam_grid[0]) if len(lam_grid) else 0.0
    for lam in lam_grid:
        gap = abs(saddle(p, float(lam), ev).value - phi_rs(p, float(lam), ev).value)
        if gap > worst:
            worst, worst_lam = gap, float(lam)
    return VerificationReport(
        check="saddle_equivalence",
        params={"prior": p.name, "lambda_grid": [float(x) for x in lam_grid],
                "max_gap": worst, "argmax_lambda": worst_lam},
        slack=float(tol - worst),
        stderr=0.0,
        allowance=tol,
        passed=bool(worst <= tol),
    )


def kl_identity_check(
    p: Prior,
    n: int,
    lam: float,
    n_instances: int,
    seed: int,
    tol: float = 1e-10,
    budget: int = DEFAULT_BUDGET,
) -> VerificationReport:
    """Per-instance agreement of the log likelihood ratio with log Z."""
    worst = 0.0
    for k in range(n_instances):
        inst = sample_instance(p, n, lam, derive_seed(seed, k))
        llr, log_z = kl_log_likelihood_ratio(inst, p, budget)
        worst = max(worst, abs(llr - log_z))
    return VerificationReport(
        check="kl_identity",
        params={"prior": p.name, "n": n, "lambda": lam,
                "n_instances": n_instances, "seed": seed, "max_abs_diff": worst},
        slack=float(tol - worst),
        stderr=0.0,
        allowance=tol,
        passed=bool(worst <= tol),
    )


def se_fixed_point_check(
    p: Prior, lam: float, tol: float = 1e-5, ev: ChannelEvaluator | None = None
) -> VerificationReport:
    """State-evolution fixed point from the informative side matches q*."""
    m2 = second_moment(p)
    trace = state_evolution(p, lam, q0=0.9 * m2, tol=1e-10, max_iter=2000, ev=ev)
    q_star = phi_rs(p, lam, ev).optimizer_q
    diff = abs(trace.fixed_point - q_star)
    return VerificationReport(
        check="se_fixed_point",
        params={"prior": p.name, "lambda": lam, "fixed_point": trace.fixed_point,
                "q_star": q_star, "converged": trace.converged},
        slack=float(tol - diff),
        stderr=0.0,
        allowance=tol,
        passed=bool(trace.converged and diff <= tol),
    )


def run_suite(
    p: Prior,
    n: int = 10,
    n_disorder: int = 400,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    ev: ChannelEvaluator | None = None,
) -> list:
    """The full battery at one (prior, n, n_disorder, seed) setting."""
    m2 = second_moment(p)
    reports = [
        tilt_asymmetry_check(p, ev=ev),
        saddle_equivalence_check(p, ev=ev),
        se_fixed_point_check(p, 2.0, ev=ev),
        se_fixed_point_check(p, 4.0, ev=ev),
    ]
    try:
        reports.append(
            kl_identity_check(p, n, 2.0, min(100, max(2, n_disorder)), derive_seed(seed, 101))
        )
        for lam in (0.5, 1.0, 2.0):
            reports.append(nishimori_check(p, n, lam, n_disorder, derive_seed(seed, 102), budget))
        q_star2 = phi_rs(p, 2.0, ev).optimizer_q
        for i, q in enumerate((0.25 * m2, 0.5 * m2, q_star2)):
            reports.append(
                guerra_slope_check(p, n, 2.0, float(q),
                                   n_disorder=n_disorder, seed=derive_seed(seed, 103 + i),
                                   budget=budget)
            )
        for i, m in enumerate((-0.5 * m2, 0.0, 0.5 * m2)):
            reports.append(
                fp_upper_check(p, n, 2.0, float(m), 0.25,
                               n_disorder=n_disorder, seed=derive_seed(seed, 106 + i),
                               budget=budget, ev=ev)
            )
    except EnumerationBudgetError as e:
        reports.append(
            VerificationReport(
                check="enumeration_budget",
                params={"prior": p.name, "n": n, "required": e.required, "budget": e.budget},
                slack=float("-inf"),
                passed=False,
            )
        )
    return reports
