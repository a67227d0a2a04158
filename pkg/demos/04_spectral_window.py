"""
Searching an eigenvalue window
==============================

Discretize x^2 + p^2 on a periodic grid, prepare an equal superposition of
its four lowest eigenstates, and amplify the part with eigenvalue in [0, 4].
The oracle pipeline check moves a pointer mode by each eigenvalue, flags
the window, and moves it back.
"""

import numpy as np

from fpsearch import engine
from fpsearch.spectral import (ModeGrid, SpectralProblem, equal_superposition, post_search_distribution,
                               simulate_oracle_pipeline, spectral_lambda, verify_gate_decomposition, window_mass)

grid = ModeGrid(256, 8.0)
prob = SpectralProblem([(1.0, 2, 0), (1.0, 0, 2)], grid, (0.0, 4.0), input_amplitudes=equal_superposition(4))
print("lowest eigenvalues:", np.round(prob.eigenvalues[:6], 8))

lam = spectral_lambda(prob)
q = engine.minimal_queries(lam, 0.1)
final = engine.run_fixed_point(lam, q, 0.1).final
dist = post_search_distribution(prob, final)
print(f"lambda={lam:.3f}  q={q}  in-window mass after search={window_mass(prob, dist):.4f}")

report = simulate_oracle_pipeline(prob)
print("flags correct:", report.all_correct, " min pointer fidelity:", report.min_fidelity)
print("flag distribution:", np.round(report.flag_distribution, 6))

# two-mode identity used to build exp(-i B p) from cubic phase and p.p gates
res = verify_gate_decomposition(0.3, 0.2)
print("max infidelity:", res.max_infidelity, " reliable:", res.reliable)
