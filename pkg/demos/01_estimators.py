"""
Estimating a target policy's value from logged bandit data
===========================================================

A behavior policy pulled arms and logged rewards; we want the value of a
different (target) policy.  Three estimators ship with the library: the
plug-in estimator, importance sampling (IS), and Switch, which uses the
plug-in rule on a set S of arms and IS everywhere else.
"""

import numpy as np

from minimax_ope import (
    BanditInstance,
    SeedSpec,
    draw_dataset,
    importance_sampling,
    plug_in,
    solve_optimal_subset,
    switch,
    validate_policy,
    value_function,
)

# Five arms.  The behavior policy rarely plays the last two, which the
# target policy likes.
behavior = validate_policy([0.40, 0.30, 0.26, 0.03, 0.01])
target = validate_policy([0.10, 0.10, 0.20, 0.30, 0.30])
rewards = np.array([0.2, 0.4, 0.5, 0.7, 0.9])
inst = BanditInstance(target, behavior, rewards)
print("true value:", value_function(inst))

# One logged dataset of n = 20 rounds; rewards are coin flips with mean r(a).
n = 20
data = draw_dataset(inst, n, SeedSpec(base_seed=1))
print("pulls per arm:", data.counts)

# The optimal plug-in set depends only on the policies and n.
sol = solve_optimal_subset(target, behavior, n)
print("plug-in set S* =", sol.s_star.tolist(), " threshold c =", round(sol.c, 3))

print("plug-in :", plug_in(data, target))
print("IS      :", importance_sampling(data, target, behavior))
print("Switch  :", switch(data, target, behavior, sol.s_star))

# Repeating over many seeds shows the bias/variance trade-off.
est = {"plugin": [], "is": [], "switch": []}
for t in range(2000):
    d = draw_dataset(inst, n, SeedSpec(1, t))
    est["plugin"].append(plug_in(d, target))
    est["is"].append(importance_sampling(d, target, behavior))
    est["switch"].append(switch(d, target, behavior, sol.s_star))
v = value_function(inst)
for name, vals in est.items():
    vals = np.array(vals)
    print(f"{name:7s} bias {vals.mean() - v:+.4f}  sd {vals.std():.4f}  "
          f"mse {np.mean((vals - v) ** 2):.5f}")
