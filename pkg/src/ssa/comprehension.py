"""Level 2: infer the situation profile.

A situation profile scores the eight psychological characteristics of a
situation (duty, intellect, adversity, mating, positivity, negativity,
deception, sociality) on a 1-6 scale. Two inference paths are provided:

* a forward-chaining rule engine with additive deltas clamped into range,
  which is fully explainable through its fired-rule trace, and
* a k-nearest-neighbors learner over encoded feature vectors, which
  handles situation variety and reports a per-dimension uncertainty
  (sample standard deviation of the neighbor labels).

``comprehend`` arbitrates between the two: the learned path is used once
enough training pairs have accumulated, otherwise the rules run.

All arithmetic in the kNN path is plain left-to-right Python summation so
predictions are bit-for-bit reproducible against an exhaustive-scan
oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import EmptyDataset, ManifestMismatch, RangeError, ValidationError
from .perception import FeatureVector, SocialSituation

PROFILE_MIN, PROFILE_MAX = 1.0, 6.0

DIMENSIONS = (
    "duty",
    "intellect",
    "adversity",
    "mating",
    "positivity",
    "negativity",
    "deception",
    "sociality",
)


def clamp(value: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, value))


@dataclass(frozen=True)
class SituationProfile:
    duty: float
    intellect: float
    adversity: float
    mating: float
    positivity: float
    negativity: float
    deception: float
    sociality: float

    def __post_init__(self):
        for name in DIMENSIONS:
            v = getattr(self, name)
            if not (PROFILE_MIN <= v <= PROFILE_MAX) or not math.isfinite(v):
                raise RangeError(f"{name}={v} outside [1, 6]", field=name)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in DIMENSIONS)

    def __getitem__(self, dimension: str) -> float:
        if dimension not in DIMENSIONS:
            raise KeyError(dimension)
        return getattr(self, dimension)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in DIMENSIONS}

    @classmethod
    def from_dict(cls, data: dict) -> "SituationProfile":
        unknown = sorted(set(data) - set(DIMENSIONS))
        if unknown:
            raise ValidationError(f"unknown profile dimension(s): {', '.join(unknown)}")
        missing = [name for name in DIMENSIONS if name not in data]
        if missing:
            raise ValidationError(f"profile missing dimension(s): {', '.join(missing)}")
        return cls(**{name: float(data[name]) for name in DIMENSIONS})

    @classmethod
    def uniform(cls, value: float) -> "SituationProfile":
        return cls(*([value] * len(DIMENSIONS)))


# ---------------------------------------------------------------------------
# Rule engine
# ---------------------------------------------------------------------------

# Situation fields a rule condition may reference. Participant fields
# evaluate against the focal (first) participant; a predicate on an absent
# or unknown field is false.
_RULE_FIELDS = (
    "activity",
    "location",
    "num_people",
    "duration",
    "role",
    "hierarchy",
    "contact_frequency",
    "relationship_quality",
    "years_known",
)


def _field_value(situation: SocialSituation, name: str):
    cues = situation.cues
    if name == "activity":
        return cues.activity_type.value
    if name == "location":
        return cues.location_type.value
    if name == "num_people":
        return cues.num_people
    if name == "duration":
        return cues.duration
    focal = situation.participants[0] if situation.participants else None
    if focal is None:
        return None
    if name == "role":
        return focal.role.value if focal.role else None
    if name == "hierarchy":
        return focal.hierarchy.value if focal.hierarchy else None
    return getattr(focal, name)


def _predicate_holds(matcher, actual) -> bool:
    if actual is None:
        return False
    if isinstance(matcher, dict):
        if "gte" in matcher:
            return actual >= matcher["gte"]
        if "lte" in matcher:
            return actual <= matcher["lte"]
        raise ValidationError(f"unsupported matcher {matcher!r}")
    if isinstance(matcher, (list, tuple)):
        return actual in matcher
    return actual == matcher


def _validate_clause(clause: dict, rule_id: str) -> None:
    for name in clause:
        if name not in _RULE_FIELDS:
            raise ValidationError(
                f"rule {rule_id!r} references unknown field {name!r}", field=name
            )


def clause_matches(situation: SocialSituation, clause: dict) -> bool:
    """Evaluate one conjunctive clause against a situation. Shared by the
    rule engine and user-preference predicates."""
    return all(
        _predicate_holds(matcher, _field_value(situation, name))
        for name, matcher in clause.items()
    )


@dataclass(frozen=True)
class Rule:
    """One scoring rule: a condition over situation fields plus signed
    per-dimension deltas.

    ``when`` is a conjunction of field predicates; a list of clauses means
    a disjunction (the rule fires once if any clause holds). Predicates:
    scalar = equality, list = membership, {"gte"|"lte": n} = threshold.
    """

    rule_id: str
    when: tuple[dict, ...]  # disjunction of conjunctive clauses
    add: dict[str, float]

    def __post_init__(self):
        if not self.when:
            raise ValidationError(f"rule {self.rule_id!r} has no condition")
        for clause in self.when:
            _validate_clause(clause, self.rule_id)
        for dim, delta in self.add.items():
            if dim not in DIMENSIONS:
                raise ValidationError(
                    f"rule {self.rule_id!r} adds to unknown dimension {dim!r}", field=dim
                )
            if not math.isfinite(delta):
                raise ValidationError(f"rule {self.rule_id!r} delta for {dim} not finite")

    @classmethod
    def make(cls, rule_id: str, when, add: dict[str, float]) -> "Rule":
        clauses = when if isinstance(when, (list, tuple)) else [when]
        return cls(rule_id=rule_id, when=tuple(dict(c) for c in clauses), add=dict(add))

    def matched_clause(self, situation: SocialSituation) -> Optional[list[tuple[str, object]]]:
        """First satisfied clause as (field, actual value) pairs, else None."""
        for clause in self.when:
            actuals = []
            for name, matcher in clause.items():
                actual = _field_value(situation, name)
                if not _predicate_holds(matcher, actual):
                    break
                actuals.append((name, actual))
            else:
                return actuals
        return None


@dataclass(frozen=True)
class RuleSet:
    baseline: float
    rules: tuple[Rule, ...] = ()

    @classmethod
    def from_json(cls, text: str) -> "RuleSet":
        doc = json.loads(text)
        unknown = sorted(set(doc) - {"baseline", "rules"})
        if unknown:
            raise ValidationError(f"unknown ruleset field(s): {', '.join(unknown)}")
        rules = tuple(
            Rule.make(entry["id"], entry["when"], entry["add"]) for entry in doc.get("rules", [])
        )
        return cls(baseline=float(doc["baseline"]), rules=rules)

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "rules": [
                {"id": r.rule_id, "when": list(r.when), "add": r.add} for r in self.rules
            ],
        }


#: Default ruleset. Additive-then-clamp semantics keep disjoint rules
#: order-insensitive; round deltas make hand checks easy.
DEFAULT_RULESET = RuleSet(
    baseline=2.0,
    rules=(
        Rule.make("R1", [{"activity": "meeting"}, {"location": "office"}],
                  {"duty": 2.5, "intellect": 1.0}),
        Rule.make("R2", {"role": ["friend", "family"], "activity": ["dinner", "party"]},
                  {"positivity": 2.0, "sociality": 2.5}),
        Rule.make("R3", {"num_people": {"gte": 2}}, {"sociality": 1.0}),
        Rule.make("R4", [{"role": "supervisor"}, {"hierarchy": "higher"}],
                  {"duty": 1.0, "adversity": 0.5}),
        Rule.make("R5", {"relationship_quality": {"lte": 2}},
                  {"negativity": 1.5, "deception": 0.5}),
        Rule.make("R6", [{"role": "romantic_partner"}, {"activity": "date"}],
                  {"mating": 3.0}),
    ),
)


@dataclass(frozen=True)
class ComprehensionResult:
    """Level-2 output plus the evidence needed to explain it.

    ``trace`` lists fired rule ids (rules source) or neighbor situation
    ids (learned source), nearest first. Uncertainty is zero on the rules
    path; on the learned path it is the per-dimension sample standard
    deviation of the neighbor labels.
    """

    profile: SituationProfile
    source: str  # "rules" | "learned"
    uncertainty: dict[str, float]
    trace: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_dict(),
            "source": self.source,
            "uncertainty": dict(self.uncertainty),
            "trace": list(self.trace),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ComprehensionResult":
        return cls(
            profile=SituationProfile.from_dict(data["profile"]),
            source=data["source"],
            uncertainty={k: float(v) for k, v in data["uncertainty"].items()},
            trace=tuple(data["trace"]),
        )


def evaluate_rules(situation: SocialSituation, rules: RuleSet) -> ComprehensionResult:
    """Run the rule engine: clamp(baseline + sum of fired deltas) per
    dimension. Deterministic; an empty ruleset yields the all-baseline
    profile with an empty trace."""
    totals = {name: rules.baseline for name in DIMENSIONS}
    fired: list[str] = []
    for rule in rules.rules:
        if rule.matched_clause(situation) is not None:
            fired.append(rule.rule_id)
            for dim, delta in rule.add.items():
                totals[dim] += delta
    profile = SituationProfile(
        **{name: clamp(totals[name], PROFILE_MIN, PROFILE_MAX) for name in DIMENSIONS}
    )
    return ComprehensionResult(
        profile=profile,
        source="rules",
        uncertainty={name: 0.0 for name in DIMENSIONS},
        trace=tuple(fired),
    )


# ---------------------------------------------------------------------------
# kNN learner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KnnModel:
    """Lazy learner: training pairs stored verbatim.

    Distances are weighted Euclidean; neighbor ties break by training
    insertion order. Immutable after fit, so predictions are safe for
    concurrent readers.
    """

    pairs: tuple[tuple[FeatureVector, SituationProfile], ...]
    k: int
    weights: tuple[float, ...]
    ids: tuple[str, ...] = field(default=())
    manifest: str = ""

    @property
    def effective_k(self) -> int:
        return min(self.k, len(self.pairs))


def fit_knn(
    dataset: Sequence[tuple[FeatureVector, SituationProfile]],
    k: int = 5,
    weights: Optional[Sequence[float]] = None,
    ids: Optional[Sequence[str]] = None,
) -> KnnModel:
    """Store the dataset verbatim. Effective k is min(k, |dataset|)."""
    if not dataset:
        raise EmptyDataset("cannot fit kNN on an empty dataset")
    if k < 1:
        raise ValidationError(f"k={k} must be >= 1", field="k")
    manifest = dataset[0][0].manifest
    width = len(dataset[0][0].values)
    for fv, _ in dataset:
        if fv.manifest != manifest or len(fv.values) != width:
            raise ManifestMismatch(
                f"training vectors mix manifests ({fv.manifest!r} vs {manifest!r})"
            )
    if weights is None:
        weights = [1.0] * width
    weights = tuple(float(w) for w in weights)
    if len(weights) != width:
        raise ValidationError(f"{len(weights)} weights for {width} features")
    if any(w < 0 for w in weights):
        raise ValidationError("feature weights must be >= 0")
    if ids is None:
        ids = [f"train-{i}" for i in range(len(dataset))]
    return KnnModel(
        pairs=tuple((fv, profile) for fv, profile in dataset),
        k=k,
        weights=weights,
        ids=tuple(ids),
        manifest=manifest,
    )


def weighted_distance(weights: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Left-to-right weighted Euclidean distance (fixed summation order)."""
    total = 0.0
    for w, x, y in zip(weights, a, b):
        d = x - y
        total += w * d * d
    return math.sqrt(total)


def predict_profile_knn(model: KnnModel, x: FeatureVector) -> ComprehensionResult:
    """Predict by averaging the k nearest training labels.

    Neighbors are the k smallest weighted distances with ties broken by
    insertion order; per-dimension mean and sample standard deviation are
    summed over the selected neighbors in insertion order so the result
    is bit-for-bit reproducible.
    """
    if x.manifest != model.manifest or len(x.values) != len(model.weights):
        raise ManifestMismatch(
            f"query manifest {x.manifest!r} does not match model {model.manifest!r}"
        )
    distances = [
        weighted_distance(model.weights, x.values, fv.values) for fv, _ in model.pairs
    ]
    k = model.effective_k
    ranked = sorted(range(len(distances)), key=lambda i: (distances[i], i))
    selected = ranked[:k]
    by_insertion = sorted(selected)

    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    for dim in DIMENSIONS:
        total = 0.0
        for i in by_insertion:
            total += getattr(model.pairs[i][1], dim)
        mean = total / k
        means[dim] = mean
        if k == 1:
            stds[dim] = 0.0
        else:
            sq = 0.0
            for i in by_insertion:
                diff = getattr(model.pairs[i][1], dim) - mean
                sq += diff * diff
            stds[dim] = math.sqrt(sq / (k - 1))
    profile = SituationProfile(
        **{dim: clamp(means[dim], PROFILE_MIN, PROFILE_MAX) for dim in DIMENSIONS}
    )
    return ComprehensionResult(
        profile=profile,
        source="learned",
        uncertainty=stds,
        trace=tuple(model.ids[i] for i in selected),
    )


def save_training_pairs(pairs: Sequence[tuple[FeatureVector, SituationProfile]], path) -> None:
    """Persist a training dataset as JSON-lines, one pair per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for fv, profile in pairs:
            doc = {"features": fv.to_dict(), "profile": profile.to_dict()}
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")


def load_training_pairs(path) -> list[tuple[FeatureVector, SituationProfile]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            pairs.append(
                (FeatureVector.from_dict(doc["features"]), SituationProfile.from_dict(doc["profile"]))
            )
    return pairs


#: Minimum training pairs before the learned path takes over from rules.
DEFAULT_N_TRAIN = 20


def comprehend(
    situation: SocialSituation,
    rules: RuleSet,
    model: Optional[KnnModel] = None,
    features: Optional[FeatureVector] = None,
    n_train: int = DEFAULT_N_TRAIN,
) -> ComprehensionResult:
    """Arbitrate between the learned and rule paths.

    The learned path is used iff a model exists with at least ``n_train``
    training pairs; ``features`` must then be the encoding of
    ``situation`` (computed by the caller so encoding policy stays in one
    place).
    """
    if model is not None and len(model.pairs) >= n_train:
        if features is None:
            from .perception import encode_features

            features = encode_features(situation)
        return predict_profile_knn(model, features)
    return evaluate_rules(situation, rules)
