"""
The optimal plug-in set and its optimality conditions
======================================================

S* is the support of the minimizer of a small convex program.  Its
solution thresholds the likelihood ratio rho = pi_t / pi_b at a level c, so
S* is always a top-rho suffix.  Here we solve it, inspect the KKT
residuals, and compare with brute-force search over every subset.
"""

import numpy as np

from minimax_ope import (
    brute_force_subset,
    minimax_risk_surrogate,
    solve_optimal_subset,
    switch_objective,
    validate_policy,
)

rng = np.random.default_rng(7)
k = 10
target = validate_policy(rng.dirichlet(np.ones(k)))
behavior = validate_policy(rng.dirichlet(np.ones(k) * 0.3))

for n in (2, 10, 50, 500):
    sol = solve_optimal_subset(target, behavior, n)
    res = sol.kkt_residuals(target, behavior)
    brute_set, brute_obj = brute_force_subset(target, behavior, n)
    print(f"n={n:4d}  S*={sol.s_star.tolist()}  c={sol.c:8.3f}  eps={sol.epsilon:.3f}  "
          f"max KKT residual={max(res.values()):.1e}")
    print(f"        objective at S*={switch_objective(target, behavior, n, sol.s_star):.5f}  "
          f"brute-force optimum={brute_obj:.5f} at {brute_set.tolist()}")

# rho on and off the set: everything inside beats the threshold
sol = solve_optimal_subset(target, behavior, 10)
order = np.argsort(sol.rho)
print("\nactions by rho:", order.tolist())
print("rho:", np.round(sol.rho[order], 3).tolist())
print("in S*:", sol.mask[order].astype(int).tolist())

# The surrogate pi_t(S*)^2 + T2/n tracks the minimax risk up to constants.
for n in (10, 100, 1000):
    print(f"n={n:5d}  risk surrogate={minimax_risk_surrogate(target, behavior, n).value:.5f}")

# An arm the behavior policy never plays is always in the plug-in set.
sol = solve_optimal_subset(validate_policy([0.5, 0.5]), validate_policy([1.0, 0.0]), 10)
print("\nunexplored arm forced into S*:", sol.s_star.tolist(), "v* =", sol.v_star.tolist())
