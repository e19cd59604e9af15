from __future__ import annotations

import math
import random

import pytest

from ssa.comprehension import (
    DEFAULT_RULESET,
    DIMENSIONS,
    ComprehensionResult,
    KnnModel,
    Rule,
    RuleSet,
    SituationProfile,
    comprehend,
    evaluate_rules,
    fit_knn,
    predict_profile_knn,
)
from ssa.errors import EmptyDataset, ManifestMismatch, RangeError
from ssa.perception import ContactRegistry, FeatureVector, encode_features

from conftest import random_situation

# ---------------------------------------------------------------------------
# Independent exhaustive-scan oracle (kept deliberately separate from the
# library implementation: explicit min-extraction instead of sort, same
# left-to-right float arithmetic).
# ---------------------------------------------------------------------------


def knn_oracle(model: KnnModel, x: FeatureVector) -> ComprehensionResult:
    distances = []
    for fv, _ in model.pairs:
        total = 0.0
        for w, a, b in zip(model.weights, x.values, fv.values):
            d = a - b
            total += w * d * d
        distances.append(math.sqrt(total))
    k = min(model.k, len(model.pairs))
    remaining = list(range(len(distances)))
    selected = []
    for _ in range(k):
        best = remaining[0]
        for i in remaining[1:]:
            if distances[i] < distances[best]:
                best = i
        remaining.remove(best)
        selected.append(best)
    by_insertion = sorted(selected)
    means, stds = {}, {}
    for dim in DIMENSIONS:
        total = 0.0
        for i in by_insertion:
            total += getattr(model.pairs[i][1], dim)
        mean = total / k
        means[dim] = max(1.0, min(6.0, mean))
        if k == 1:
            stds[dim] = 0.0
        else:
            sq = 0.0
            for i in by_insertion:
                diff = getattr(model.pairs[i][1], dim) - mean
                sq += diff * diff
            stds[dim] = math.sqrt(sq / (k - 1))
    return ComprehensionResult(
        profile=SituationProfile(**means),
        source="learned",
        uncertainty=stds,
        trace=tuple(model.ids[i] for i in selected),
    )


def _toy_vector(values, manifest="toy-1"):
    names = tuple(f"f{i}" for i in range(len(values)))
    return FeatureVector(values=tuple(float(v) for v in values), names=names, manifest=manifest)


def _profile(duty=2.0, **overrides) -> SituationProfile:
    base = {dim: 2.0 for dim in DIMENSIONS}
    base["duty"] = duty
    base.update(overrides)
    return SituationProfile(**base)


def _random_dataset(rng: random.Random, n: int, width: int = 6):
    dataset = []
    for _ in range(n):
        fv = _toy_vector([rng.uniform(-2, 2) for _ in range(width)])
        profile = SituationProfile(*[rng.uniform(1, 6) for _ in DIMENSIONS])
        dataset.append((fv, profile))
    return dataset


class TestEvaluateRules:
    def test_work_meeting_hand_evaluated(self, s_work):
        result = evaluate_rules(s_work, DEFAULT_RULESET)
        assert result.profile.to_dict() == {
            "duty": 5.5,
            "intellect": 3.0,
            "adversity": 2.5,
            "mating": 2.0,
            "positivity": 2.0,
            "negativity": 2.0,
            "deception": 2.0,
            "sociality": 3.0,
        }
        assert result.trace == ("R1", "R3", "R4")
        assert result.source == "rules"
        assert all(v == 0.0 for v in result.uncertainty.values())

    def test_work_situation_peaks_on_duty(self, s_work):
        profile = evaluate_rules(s_work, DEFAULT_RULESET).profile
        others = [profile[d] for d in DIMENSIONS if d != "duty"]
        assert profile.duty > max(others)

    def test_dinner_hand_evaluated(self, s_dinner):
        result = evaluate_rules(s_dinner, DEFAULT_RULESET)
        assert result.profile.positivity == 4.0
        assert result.profile.sociality == 5.5
        for dim in ("duty", "intellect", "adversity", "mating", "negativity", "deception"):
            assert result.profile[dim] == 2.0
        assert result.trace == ("R2", "R3")

    def test_empty_ruleset_all_baseline(self, s_work):
        result = evaluate_rules(s_work, RuleSet(baseline=2.0))
        assert result.profile == SituationProfile.uniform(2.0)
        assert result.trace == ()

    def test_clamping_upper_bound(self, s_work):
        rules = RuleSet(
            baseline=2.0,
            rules=(Rule.make("BIG", {"activity": "meeting"}, {"duty": 99.0}),),
        )
        assert evaluate_rules(s_work, rules).profile.duty == 6.0

    def test_rule_monotonicity_positive_deltas(self):
        # adding a rule with only positive deltas never lowers any dimension
        rng = random.Random(13)
        registry = ContactRegistry()
        for i in range(200):
            situation = random_situation(rng, registry, i)
            extra = Rule.make(
                "EXTRA",
                {rng.choice(["activity", "location"]): rng.choice(["meeting", "office", "dinner"])},
                {rng.choice(DIMENSIONS): rng.uniform(0, 3)},
            )
            before = evaluate_rules(situation, DEFAULT_RULESET).profile
            extended = RuleSet(baseline=2.0, rules=(*DEFAULT_RULESET.rules, extra))
            after = evaluate_rules(situation, extended).profile
            for dim in DIMENSIONS:
                assert after[dim] >= before[dim]

    def test_ruleset_json_round_trip(self, s_work):
        loaded = RuleSet.from_json(__import__("json").dumps(DEFAULT_RULESET.to_dict()))
        assert evaluate_rules(s_work, loaded) == evaluate_rules(s_work, DEFAULT_RULESET)


class TestFitKnn:
    def test_effective_k_clamped(self):
        rng = random.Random(1)
        model = fit_knn(_random_dataset(rng, 3), k=5)
        assert model.effective_k == 3

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            fit_knn([], k=1)

    def test_determinism(self):
        rng = random.Random(2)
        dataset = _random_dataset(rng, 20)
        query = _toy_vector([0.1] * 6)
        a = predict_profile_knn(fit_knn(dataset, k=3), query)
        b = predict_profile_knn(fit_knn(dataset, k=3), query)
        assert a == b


class TestPredictProfileKnn:
    def test_identity_neighbor(self):
        rng = random.Random(3)
        dataset = _random_dataset(rng, 10)
        model = fit_knn(dataset, k=1)
        for fv, profile in dataset[:3]:
            result = predict_profile_knn(model, fv)
            assert result.profile == profile
            assert all(u == 0.0 for u in result.uncertainty.values())

    def test_equidistant_toy_mean_and_std(self):
        # three training points at distance 1 from the origin with duty
        # labels {2, 4, 6}: mean 4.0, sample std 2.0
        dataset = [
            (_toy_vector([1.0, 0.0]), _profile(duty=2.0)),
            (_toy_vector([-1.0, 0.0]), _profile(duty=4.0)),
            (_toy_vector([0.0, 1.0]), _profile(duty=6.0)),
        ]
        model = fit_knn(dataset, k=3)
        result = predict_profile_knn(model, _toy_vector([0.0, 0.0]))
        assert result.profile.duty == pytest.approx(4.0)
        assert result.uncertainty["duty"] == pytest.approx(2.0)
        assert result.trace == ("train-0", "train-1", "train-2")

    def test_matches_oracle_bit_for_bit(self):
        rng = random.Random(4)
        dataset = _random_dataset(rng, 50)
        for k in (1, 3, 5):
            model = fit_knn(dataset, k=k)
            for _ in range(20):
                query = _toy_vector([rng.uniform(-2, 2) for _ in range(6)])
                assert predict_profile_knn(model, query) == knn_oracle(model, query)

    def test_manifest_mismatch(self):
        rng = random.Random(5)
        model = fit_knn(_random_dataset(rng, 5), k=1)
        with pytest.raises(ManifestMismatch):
            predict_profile_knn(model, _toy_vector([0.0] * 6, manifest="other"))

    def test_permutation_invariance_with_distinct_distances(self):
        rng = random.Random(6)
        dataset = _random_dataset(rng, 30)
        query = _toy_vector([rng.uniform(-2, 2) for _ in range(6)])
        base = predict_profile_knn(fit_knn(dataset, k=5), query)
        shuffled = dataset[:]
        rng.shuffle(shuffled)
        other = predict_profile_knn(fit_knn(shuffled, k=5), query)
        # continuous random features make exact distance ties vanishingly
        # unlikely, so the predicted profile is permutation-invariant
        assert other.profile.to_dict() == pytest.approx(base.profile.to_dict())

    def test_bounds_fuzz(self):
        rng = random.Random(7)
        dataset = _random_dataset(rng, 40)
        model = fit_knn(dataset, k=5)
        for _ in range(500):
            query = _toy_vector([rng.uniform(-5, 5) for _ in range(6)])
            profile = predict_profile_knn(model, query).profile
            for dim in DIMENSIONS:
                assert 1.0 <= profile[dim] <= 6.0


class TestComprehend:
    def _model_with(self, n: int) -> KnnModel:
        rng = random.Random(8)
        return fit_knn(_random_dataset(rng, n), k=5)

    def test_no_model_falls_back_to_rules(self, s_work):
        assert comprehend(s_work, DEFAULT_RULESET).source == "rules"

    def test_threshold_boundary(self, s_work):
        model19 = self._model_with(19)
        assert (
            comprehend(s_work, DEFAULT_RULESET, model=model19, features=None).source == "rules"
        )

    def test_learned_above_threshold(self, s_work):
        model25 = self._model_with(25)
        features = _toy_vector([0.0] * 6)
        result = comprehend(s_work, DEFAULT_RULESET, model=model25, features=features)
        assert result.source == "learned"


class TestProfileBounds:
    def test_out_of_range_rejected(self):
        with pytest.raises(RangeError):
            SituationProfile.uniform(0.5)
        with pytest.raises(RangeError):
            SituationProfile.uniform(6.5)
