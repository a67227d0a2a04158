"""
Overlap estimates for the optimization benchmarks
=================================================

The target region is where every partial derivative is at most 0.1 in
magnitude. Its share of the search region (lambda) sets both the quantum
query count and the classical expected number of random draws, 1/lambda.
"""

from fpsearch.experiments import estimate_lambda, search_summary
from fpsearch.problems import builtin_suite, custom_function

for fn in builtin_suite():
    grid = estimate_lambda(fn, "grid")
    mc = estimate_lambda(fn, "mc", samples=1 << 21, seed=1, workers=4)
    summary = search_summary(grid.lam)
    print(f"{fn.name:16s} grid={grid.lam:.4e}  mc={mc.lam:.4e} +- {mc.std_error:.1e}  "
          f"q={summary['minimal_q']}  1/lambda={summary['classical']:.4g}")

# user-defined problem: expression strings over x1..xd, gradient by finite differences
bowl = custom_function("bowl", "(x1 - 0.5)^2 + x2^2", [(-1, 1), (-1, 1)], ["x1^2 + x2^2 <= 1"])
est = estimate_lambda(bowl, "grid", resolution=128, refine=4)
print("bowl:", est.to_json())
