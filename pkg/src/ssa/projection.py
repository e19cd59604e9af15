"""Level 3: project expected behavior and affected personal values.

From a situation profile the agent predicts the priority the user is
likely to assign to the situation (1-7 scale) and assesses which personal
values the situation promotes or demotes. Similar situations can be
grouped by k-means over profile space for diagnostic reports.

Priority models come in three flavors, swapped in as feedback
accumulates: a fixed default formula, an exact-recall nearest-neighbor
model over corrected examples, and a ridge least-squares linear model
once enough pairs exist.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .comprehension import DIMENSIONS, SituationProfile, clamp
from .errors import TooFewProfiles, ValidationError

PRIORITY_MIN, PRIORITY_MAX = 1.0, 7.0

#: Personal-value taxonomy the default impact table is written against.
#: Deliberately configurable; this list merges the values the approach is
#: commonly illustrated with.
DEFAULT_VALUE_TAXONOMY = (
    "helpfulness",
    "capability",
    "social_recognition",
    "health",
    "security",
    "hedonism",
    "success",
    "independence",
)

#: Profile scores at or above this count as "high" for impact rules.
HIGH_THRESHOLD = 4.0


@dataclass(frozen=True)
class ImpactRule:
    """Threshold condition over profile dimensions -> value effects (+-1)."""

    when: dict[str, dict]
    effect: dict[str, int]

    def __post_init__(self):
        for dim, matcher in self.when.items():
            if dim not in DIMENSIONS:
                raise ValidationError(f"impact rule references unknown dimension {dim!r}")
            if not isinstance(matcher, dict) or not set(matcher) <= {"gte", "lte"}:
                raise ValidationError(f"impact rule matcher {matcher!r} must be gte/lte")
            for bound in matcher.values():
                if not 1.0 <= bound <= 6.0:
                    raise ValidationError(f"impact threshold {bound} outside [1, 6]")
        for value, sign in self.effect.items():
            if sign not in (-1, 1):
                raise ValidationError(f"impact effect for {value!r} must be +1 or -1")

    def matches(self, profile: SituationProfile) -> bool:
        for dim, matcher in self.when.items():
            actual = profile[dim]
            if "gte" in matcher and actual < matcher["gte"]:
                return False
            if "lte" in matcher and actual > matcher["lte"]:
                return False
        return True


def load_impact_table(text: str) -> tuple[ImpactRule, ...]:
    doc = json.loads(text)
    return tuple(ImpactRule(when=e["when"], effect=e["effect"]) for e in doc)


#: Default impact table: duty+intellect promote helpfulness/capability,
#: sociality promotes social recognition, positivity promotes hedonism;
#: adversity demotes security and negativity demotes health.
DEFAULT_IMPACT_TABLE: tuple[ImpactRule, ...] = (
    ImpactRule(
        when={"duty": {"gte": HIGH_THRESHOLD}, "intellect": {"gte": HIGH_THRESHOLD}},
        effect={"helpfulness": 1, "capability": 1},
    ),
    ImpactRule(when={"sociality": {"gte": HIGH_THRESHOLD}}, effect={"social_recognition": 1}),
    ImpactRule(when={"positivity": {"gte": HIGH_THRESHOLD}}, effect={"hedonism": 1}),
    ImpactRule(when={"adversity": {"gte": HIGH_THRESHOLD}}, effect={"security": -1}),
    ImpactRule(when={"negativity": {"gte": HIGH_THRESHOLD}}, effect={"health": -1}),
)


def assess_value_impact(
    profile: SituationProfile, table: Sequence[ImpactRule] = DEFAULT_IMPACT_TABLE
) -> dict[str, int]:
    """Merge the effects of every matching rule.

    Conflicting signs on one value neutralize to 0 rather than erroring,
    so user-supplied tables cannot crash projection. Values with zero net
    impact are omitted (absent key == 0).
    """
    signs: dict[str, set[int]] = {}
    for rule in table:
        if rule.matches(profile):
            for value, sign in rule.effect.items():
                signs.setdefault(value, set()).add(sign)
    impact: dict[str, int] = {}
    for value, seen in signs.items():
        if len(seen) == 1:
            impact[value] = next(iter(seen))
    return impact


# ---------------------------------------------------------------------------
# Priority models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefaultPriorityFormula:
    """Fixed formula privileging duty: 1 + 0.9*(duty-1) + 0.3*(adversity-1)."""

    duty_weight: float = 0.9
    adversity_weight: float = 0.3

    kind = "default_formula"

    def implicit_weights(self) -> dict[str, float]:
        weights = {name: 0.0 for name in DIMENSIONS}
        weights["duty"] = self.duty_weight
        weights["adversity"] = self.adversity_weight
        return weights

    def predict(self, profile: SituationProfile) -> float:
        raw = (
            1.0
            + self.duty_weight * (profile.duty - 1.0)
            + self.adversity_weight * (profile.adversity - 1.0)
        )
        return clamp(raw, PRIORITY_MIN, PRIORITY_MAX)


@dataclass(frozen=True)
class LinearPriorityModel:
    """Ridge least-squares over the eight dimensions plus intercept."""

    weights: tuple[float, ...]  # aligned with DIMENSIONS
    intercept: float

    kind = "linear"

    def implicit_weights(self) -> dict[str, float]:
        return dict(zip(DIMENSIONS, self.weights))

    def predict(self, profile: SituationProfile) -> float:
        raw = self.intercept
        for w, x in zip(self.weights, profile.as_tuple()):
            raw += w * x
        return clamp(raw, PRIORITY_MIN, PRIORITY_MAX)


@dataclass(frozen=True)
class KnnPriorityModel:
    """Nearest-neighbor recall over (profile, priority) pairs.

    Used while corrected examples exist but are too few for the linear
    model; with k=1 a corrected situation reproduces its correction
    exactly. Ties break by insertion order.
    """

    pairs: tuple[tuple[SituationProfile, float], ...]
    k: int = 1

    kind = "knn"

    def predict(self, profile: SituationProfile) -> float:
        query = profile.as_tuple()
        distances = []
        for i, (train, _) in enumerate(self.pairs):
            total = 0.0
            for a, b in zip(query, train.as_tuple()):
                d = a - b
                total += d * d
            distances.append((math.sqrt(total), i))
        distances.sort()
        k = min(self.k, len(self.pairs))
        total = 0.0
        for _, i in distances[:k]:
            total += self.pairs[i][1]
        return clamp(total / k, PRIORITY_MIN, PRIORITY_MAX)


PriorityModel = Union[DefaultPriorityFormula, LinearPriorityModel, KnnPriorityModel]

RIDGE_LAMBDA = 1e-3
LINEAR_MIN_PAIRS = 10


def predict_priority(model: PriorityModel, profile: SituationProfile) -> float:
    """Clamped priority in [1, 7] under the given model."""
    return model.predict(profile)


def fit_priority_model(
    pairs: Sequence[tuple[SituationProfile, float]],
    ridge_lambda: float = RIDGE_LAMBDA,
) -> PriorityModel:
    """Ridge least-squares fit; falls back to the default formula when
    fewer than LINEAR_MIN_PAIRS examples exist.

    The intercept is not penalized (features and targets are centered
    before solving), so a constant target is reproduced exactly and
    training MSE never exceeds the best constant predictor's.
    """
    if len(pairs) < LINEAR_MIN_PAIRS:
        return DefaultPriorityFormula()
    X = np.array([p.as_tuple() for p, _ in pairs], dtype=float)
    y = np.array([target for _, target in pairs], dtype=float)
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    gram = Xc.T @ Xc + ridge_lambda * np.eye(len(DIMENSIONS))
    weights = np.linalg.solve(gram, Xc.T @ yc)
    intercept = y_mean - float(x_mean @ weights)
    return LinearPriorityModel(weights=tuple(float(w) for w in weights), intercept=intercept)


def fit_knn_priority(
    pairs: Sequence[tuple[SituationProfile, float]], k: int = 1
) -> KnnPriorityModel:
    if not pairs:
        raise ValidationError("cannot fit a kNN priority model on zero pairs")
    return KnnPriorityModel(pairs=tuple(pairs), k=k)


def regularized_loss(
    model: LinearPriorityModel,
    pairs: Sequence[tuple[SituationProfile, float]],
    ridge_lambda: float = RIDGE_LAMBDA,
) -> float:
    """Sum of squared residuals (unclamped) plus the ridge penalty."""
    loss = 0.0
    for profile, target in pairs:
        raw = model.intercept
        for w, x in zip(model.weights, profile.as_tuple()):
            raw += w * x
        loss += (raw - target) ** 2
    loss += ridge_lambda * sum(w * w for w in model.weights)
    return loss


# ---------------------------------------------------------------------------
# Situation grouping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterModel:
    centroids: tuple[tuple[float, ...], ...]
    assignments: tuple[int, ...]
    wcss_history: tuple[float, ...]


def fit_clusters(
    profiles: Sequence[SituationProfile],
    k: int = 4,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> ClusterModel:
    """Deterministic k-means over profile space.

    Farthest-first initialization (first centroid = profile 0, then
    repeatedly the point farthest from its nearest chosen centroid, ties
    to the lower index) followed by Lloyd iterations. ``seed`` is accepted
    for interface stability but unused: the algorithm has no random
    choices.
    """
    if k < 1:
        raise ValidationError(f"k={k} must be >= 1", field="k")
    if len(profiles) < k:
        raise TooFewProfiles(f"{len(profiles)} profiles for k={k}")
    X = np.array([p.as_tuple() for p in profiles], dtype=float)
    n = len(X)

    chosen = [0]
    dist_to_nearest = np.sum((X - X[0]) ** 2, axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(dist_to_nearest))  # first occurrence on ties
        chosen.append(nxt)
        dist_to_nearest = np.minimum(dist_to_nearest, np.sum((X - X[nxt]) ** 2, axis=1))
    centroids = X[chosen].copy()

    wcss_history: list[float] = []
    assignments = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        sq = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assignments = np.argmin(sq, axis=1)  # ties to lower index
        wcss_history.append(float(sq[np.arange(n), assignments].sum()))
        new_centroids = centroids.copy()
        for j in range(k):
            members = X[assignments == j]
            if len(members):  # empty clusters keep their centroid
                new_centroids[j] = members.mean(axis=0)
        shift = float(np.max(np.abs(new_centroids - centroids)))
        centroids = new_centroids
        if shift < tol:
            break
    return ClusterModel(
        centroids=tuple(tuple(float(v) for v in c) for c in centroids),
        assignments=tuple(int(a) for a in assignments),
        wcss_history=tuple(wcss_history),
    )


def assign_cluster(model: ClusterModel, profile: SituationProfile) -> int:
    """Index of the nearest centroid, ties to the lower index."""
    x = profile.as_tuple()
    best_idx, best_dist = 0, math.inf
    for j, centroid in enumerate(model.centroids):
        d = sum((a - b) ** 2 for a, b in zip(x, centroid))
        if d < best_dist:
            best_idx, best_dist = j, d
    return best_idx


def cluster_report(
    model: ClusterModel,
    profiles: Sequence[SituationProfile],
    priority_model: Optional[PriorityModel] = None,
    impact_table: Sequence[ImpactRule] = DEFAULT_IMPACT_TABLE,
) -> dict:
    """Diagnostic JSON report: per-cluster size, centroid, mean priority
    and modal value impacts."""
    priority_model = priority_model or DefaultPriorityFormula()
    clusters = []
    for j, centroid in enumerate(model.centroids):
        member_idx = [i for i, a in enumerate(model.assignments) if a == j]
        members = [profiles[i] for i in member_idx]
        priorities = [predict_priority(priority_model, p) for p in members]
        counts: dict[str, dict[int, int]] = {}
        for p in members:
            for value, sign in assess_value_impact(p, impact_table).items():
                counts.setdefault(value, {}).update(
                    {sign: counts.get(value, {}).get(sign, 0) + 1}
                )
        modal: dict[str, int] = {}
        for value, by_sign in counts.items():
            # a sign is modal if it occurs in a strict majority of members
            sign, cnt = max(by_sign.items(), key=lambda kv: kv[1])
            if cnt * 2 > len(members):
                modal[value] = sign
        clusters.append(
            {
                "cluster": j,
                "size": len(members),
                "centroid": dict(zip(DIMENSIONS, centroid)),
                "mean_priority": sum(priorities) / len(priorities) if priorities else None,
                "modal_impacts": modal,
            }
        )
    return {"k": len(model.centroids), "clusters": clusters}
