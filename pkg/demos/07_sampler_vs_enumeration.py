"""Markov chain sampling of the posterior, validated against exact enumeration.

At sizes where every configuration can be enumerated, the posterior law of
the spike overlap is known exactly, so the single-site Metropolis sampler
can be checked end to end: run the chain, histogram the recorded overlaps,
and compare with the exact law in total variation.  Beyond the enumeration
budget the sampler is the only tool, and this is the calibration that says
how far to trust it.
"""

import numpy as np

from replica_lab import log_partition_exact, metropolis_sampler, sample_instance, standard_priors

prior = standard_priors()["rademacher"]
inst = sample_instance(prior, 12, 1.0, seed=2024)
law = dict(log_partition_exact(inst, prior).overlap_law)

samples = metropolis_sampler(inst, prior, n_sweeps=50000, burn_in=1000, seed=77)
vals, counts = np.unique(np.round(samples, 9), return_counts=True)
emp = dict(zip(vals.tolist(), (counts / counts.sum()).tolist()))

print(f"n = {inst.n}, lambda = {inst.lam}, sweeps = 50000\n")
print(f"{'overlap':>8} {'exact':>9} {'sampled':>9}")
for k in sorted(set(law) | set(emp)):
    print(f"{k:8.3f} {law.get(k, 0.0):9.5f} {emp.get(k, 0.0):9.5f}")

tv = 0.5 * sum(abs(law.get(k, 0.0) - emp.get(k, 0.0)) for k in set(law) | set(emp))
print(f"\ntotal variation distance = {tv:.4f}")
print("the chain mixes fast here: proposals are fresh prior atoms, so the")
print("prior weights cancel from the acceptance ratio and only the energy acts.")
