"""Bandit instances built from a movie-ratings CSV, and instance files.

Each movie is an action.  Its mean reward is the average rating rescaled to
``[0, r_max]``, the behavior policy is the share of ratings it received, and
the target is uniform.  A trial draws ``n`` ratings uniformly *with
replacement* from the pool, which matches the i.i.d. observation model.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bandit import BanditInstance, Dataset, uniform_policy, validate_policy
from .errors import InsufficientMovies, MalformedCsv
from .sampler import SeedSpec


@dataclass(frozen=True)
class RatingsInstanceSpec:
    ratings_path: str
    movie_count: int = 500
    min_ratings: int = 10
    rating_scale_max: float = 5.0
    subsample_seed: int = 0
    r_max: float = 1.0

    def __post_init__(self):
        if self.movie_count < 1 or self.min_ratings < 1:
            raise ValueError("movie_count and min_ratings must be at least 1")
        if not self.rating_scale_max > 0:
            raise ValueError("rating_scale_max must be positive")


@dataclass(frozen=True, eq=False)
class RatingsInstance:
    instance: BanditInstance
    movie_ids: np.ndarray  # movie id of each action, ascending
    pool_actions: np.ndarray  # one entry per rating
    pool_rewards: np.ndarray

    def sampler(self, n: int):
        """``seed -> Dataset`` drawing ``n`` ratings with replacement from the pool."""
        k, r_max = self.instance.k, self.instance.r_max
        size = self.pool_actions.shape[0]

        def draw(seed: SeedSpec) -> Dataset:
            idx = seed.generator().integers(0, size, n)
            return Dataset(self.pool_actions[idx], self.pool_rewards[idx], k, n,
                           "multinomial", r_max)

        return draw


def read_ratings(path) -> tuple[np.ndarray, np.ndarray]:
    """``(movie_ids, ratings)`` from a CSV with ``movieId`` and ``rating`` columns."""
    ids, ratings = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        missing = {"movieId", "rating"} - set(cols)
        if missing:
            raise MalformedCsv(f"missing column(s): {', '.join(sorted(missing))}")
        for lineno, row in enumerate(reader, start=2):
            try:
                ids.append(int(row["movieId"]))
                value = float(row["rating"])
            except (TypeError, ValueError):
                raise MalformedCsv(f"line {lineno}: bad movieId or rating") from None
            if not math.isfinite(value):
                raise MalformedCsv(f"line {lineno}: rating is not finite")
            ratings.append(value)
    return np.array(ids, dtype=np.int64), np.array(ratings)


def ingest_ratings(spec: RatingsInstanceSpec) -> RatingsInstance:
    ids, ratings = read_ratings(spec.ratings_path)
    if ratings.size and (ratings.min() < 0 or ratings.max() > spec.rating_scale_max):
        raise MalformedCsv(f"ratings must lie in [0, {spec.rating_scale_max}]")
    uniq, counts = np.unique(ids, return_counts=True)
    qualifying = uniq[counts >= spec.min_ratings]
    if qualifying.size < spec.movie_count:
        raise InsufficientMovies(
            f"{qualifying.size} movies have >= {spec.min_ratings} ratings, "
            f"{spec.movie_count} requested")
    rng = SeedSpec(spec.subsample_seed).generator()
    chosen = np.sort(rng.choice(qualifying, spec.movie_count, replace=False))

    keep = np.isin(ids, chosen)
    actions = np.searchsorted(chosen, ids[keep])
    rewards = ratings[keep] / spec.rating_scale_max * spec.r_max
    k = chosen.size
    n_a = np.bincount(actions, minlength=k)
    sums = np.bincount(actions, weights=rewards, minlength=k)
    means = np.minimum(sums / n_a, spec.r_max)
    behavior = validate_policy(n_a / n_a.sum())
    inst = BanditInstance(uniform_policy(k), behavior, means, spec.r_max)
    return RatingsInstance(inst, chosen, actions, rewards)


# ---------------------------------------------------------------------------
# instance files (JSON; floats round-trip exactly through repr)


def save_instance(instance: BanditInstance, path, movie_ids=None):
    doc = {
        "k": instance.k,
        "r_max": instance.r_max,
        "target": instance.target.weights.tolist(),
        "behavior": instance.behavior.weights.tolist(),
        "mean_rewards": np.asarray(instance.mean_rewards).tolist(),
    }
    if movie_ids is not None:
        doc["movie_ids"] = [int(m) for m in movie_ids]
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_instance(path) -> BanditInstance:
    doc = json.loads(Path(path).read_text())
    try:
        return BanditInstance(validate_policy(doc["target"]), validate_policy(doc["behavior"]),
                              np.array(doc["mean_rewards"], dtype=float),
                              float(doc.get("r_max", 1.0)))
    except KeyError as exc:
        raise ValueError(f"instance file lacks field {exc}") from None


def ratings_mse(ratings: RatingsInstance, n: int, trials: int, base_seed: int,
                estimators=("plugin", "is", "switch", "chebyshev"), workers: int = 1,
                c0: float | None = None, c1: float | None = None) -> dict:
    """Monte Carlo MSE of each named estimator when ``n`` ratings are resampled
    from the pool; the truth is the value of the uniform target."""
    from .analysis import make_estimator, monte_carlo_compare

    inst = ratings.instance
    ests = {name: make_estimator(name, inst, n, c0=c0, c1=c1) if name == "chebyshev"
            else make_estimator(name, inst, n) for name in estimators}
    return monte_carlo_compare(ests, inst, n, trials, base_seed, workers=workers,
                               sampler=ratings.sampler(n))


def synthetic_ratings_csv(path, movies: int = 600, seed: int = 0, min_count: int = 10,
                          zipf_exponent: float = 1.4, max_extra: int = 10_000):
    """Write a MovieLens-shaped ``userId,movieId,rating,timestamp`` file.

    Rating counts per movie are heavy-tailed (``min_count`` plus a capped
    Zipf draw) and ratings are half-stars around a per-movie quality level.
    """
    rng = np.random.default_rng(seed)
    counts = min_count + np.minimum(rng.zipf(zipf_exponent, movies), max_extra)
    quality = rng.uniform(1.0, 4.5, movies)
    movie = np.repeat(np.arange(1, movies + 1), counts)
    raw = rng.normal(np.repeat(quality, counts), 0.8)
    stars = np.clip(np.round(raw * 2) / 2, 0.5, 5.0)
    users = rng.integers(1, 10_000, movie.size)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["userId", "movieId", "rating", "timestamp"])
        w.writerows(zip(users.tolist(), movie.tolist(), [f"{x:.1f}" for x in stars],
                        range(1_000_000, 1_000_000 + movie.size)))
