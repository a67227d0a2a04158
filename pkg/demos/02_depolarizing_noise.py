"""
Search under depolarizing noise
===============================

Each iteration is followed by a depolarizing channel of strength d. The
density-matrix run shows how quickly the success probability degrades.
"""

from fpsearch import engine

lam, delta = 1 / 237, 0.1

for d in (0.0, 0.005, 0.01, 0.02, 0.03):
    ps = engine.noisy_sweep(lam, delta, d, range(1, 41))
    print(f"depol={d:<6} p(17)={ps[16]:.4f}  best p over q<=40: {ps.max():.4f}")

# with full depolarization the state is maximally mixed after one step
print(engine.run_noisy(lam, 5, delta, 1.0).p)
