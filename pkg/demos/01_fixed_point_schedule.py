"""
Fixed-point phases versus plain Grover iterations
=================================================

Build the phase schedule for a few query budgets, run the two-level
dynamics, and compare with the standard Grover iteration, which overshoots
once it passes the optimal number of steps.
"""

import numpy as np

from fpsearch import engine, schedule

lam, delta = 1e-3, 0.1

# phases for q = 2: beta is alpha in reverse order
s = schedule.build_schedule(2, delta)
print("alpha:", np.round(s.alphas, 4))
print("beta: ", np.round(s.betas, 4))

# the smallest q that guarantees success >= 1 - delta, and the closed-form sufficient count
q0 = engine.minimal_queries(lam, delta)
print("minimal q:", q0, " sufficient q:", schedule.required_queries(lam, delta))
print("lower bound for any algorithm:", round(schedule.lower_bound_queries(1 - delta, lam), 2))

# each q gets its own schedule; the success probability stays above 0.9 from q0 on
qs = range(q0, q0 + 120, 10)
fixed = engine.fixed_point_sweep(lam, delta, qs)
naive = engine.run_naive_grover(lam, max(qs)).p
for q, pf in zip(qs, fixed):
    print(f"q={q:4d}  fixed-point p={pf:.4f}  grover p={naive[q - 1]:.4f}")

# the recursive pi/3 method also never overshoots, but needs O(1/lam) queries
for m in range(2, 9):
    queries, p = engine.run_pi3(lam, m)
    print(f"pi/3 depth {m}: {queries:5d} queries, p={p:.4f}")
