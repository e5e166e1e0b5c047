"""
Off-policy evaluation on a ratings dataset
==========================================

Each movie is an arm, its mean rating (rescaled to [0, 1]) is the reward,
and the share of ratings it received defines the behavior policy.  The
target recommends movies uniformly.  Drawing n ratings with replacement
from the pool gives logged data.  A synthetic MovieLens-shaped file stands
in for the real one; point RATINGS at a real ratings.csv to use it.
"""

import os
import tempfile

from minimax_ope import solve_optimal_subset
from minimax_ope.ratings import (
    RatingsInstanceSpec,
    ingest_ratings,
    ratings_mse,
    synthetic_ratings_csv,
)

path = os.environ.get("RATINGS")
if path is None:
    path = os.path.join(tempfile.mkdtemp(), "ratings.csv")
    synthetic_ratings_csv(path, movies=600, seed=0)

ratings = ingest_ratings(RatingsInstanceSpec(path, movie_count=500, min_ratings=10))
inst = ratings.instance
print(f"{inst.k} movies, {ratings.pool_actions.size} ratings in the pool")
print(f"smallest behavior probability {inst.behavior.weights.min():.2e}")

for n in (200, 1000, 5000):
    sol = solve_optimal_subset(inst.target, inst.behavior, n)
    reps = ratings_mse(ratings, n, 500, base_seed=n)
    line = "  ".join(f"{name} {rep.mean_squared_error:.2e}" for name, rep in reps.items())
    print(f"n={n:5d} |S*|={sol.s_star.size:3d}  {line}")
