"""Sliding between the matrix model and a decoupled scalar channel.

The interpolation replaces the pairwise interaction (strength t) with a
per-site Gaussian observation (strength 1 - t).  At t = 1 the path free
entropy phi(t) equals the finite-size free entropy of the matrix model; at
t = 0 it collapses to the one-dimensional channel value psi(lambda q).  The
derivative along the path is bounded below by -lambda q^2 / 4 up to O(1/N),
which is exactly what pins the limiting free entropy from below.
"""

import numpy as np

from replica_lab import free_entropy_mc, phi_of_t, psi, standard_priors

prior = standard_priors()["rademacher"]
n, lam, draws, seed = 10, 2.0, 300, 5
t_grid = np.linspace(0.0, 1.0, 6)

for q in (0.25, 0.5):
    vals = [phi_of_t(prior, n, lam, q, q, float(t), draws, seed) for t in t_grid]
    print(f"q = {q}: channel value psi(lambda q) = {psi(None, prior, lam * q):.5f}")
    print(f"  {'t':>5} {'phi(t)':>10} {'stderr':>9}")
    for t, est in zip(t_grid, vals):
        print(f"  {t:5.2f} {est.mean:10.5f} {est.stderr:9.5f}")
    slopes = np.diff([e.mean for e in vals]) / np.diff(t_grid)
    print(f"  min segment slope = {slopes.min():+.4f} vs bound {-lam * q * q / 4:+.4f} - O(1/n)")
    print()

fn = free_entropy_mc(prior, n, lam, draws, seed)
print(f"endpoint check: phi(1) = {phi_of_t(prior, n, lam, 0.5, 0.5, 1.0, draws, seed).mean:.5f}")
print(f"                F_n    = {fn.mean:.5f}   (identical by construction)")
