from __future__ import annotations

import json
import random

import pytest

from ssa.agent_loop import detect_conflicts, suggest
from ssa.comprehension import (
    DEFAULT_RULESET,
    DIMENSIONS,
    ComprehensionResult,
    SituationProfile,
    evaluate_rules,
    fit_knn,
    predict_profile_knn,
)
from ssa.errors import ValidationError
from ssa.explanation import (
    contributions,
    explain_share,
    explain_suggestion,
    level1_evidence,
    load_template_catalog,
    render_text,
)
from ssa.perception import FeatureVector
from ssa.projection import (
    DEFAULT_IMPACT_TABLE,
    DefaultPriorityFormula,
    LinearPriorityModel,
    predict_priority,
)
from ssa.agent_loop import Meeting, ShareDecision
from datetime import datetime


class TestContributions:
    def test_work_profile_default_formula(self, s_work):
        profile = evaluate_rules(s_work, DEFAULT_RULESET).profile
        ranked = contributions(profile, DefaultPriorityFormula())
        assert ranked[0] == ("duty", pytest.approx(0.9 * (5.5 - 3.5)))
        assert ranked[1] == ("adversity", pytest.approx(0.3 * (2.5 - 3.5)))
        assert all(c == 0.0 for _, c in ranked[2:])

    def test_midpoint_profile_all_zero(self):
        ranked = contributions(SituationProfile.uniform(3.5), DefaultPriorityFormula())
        assert all(c == 0.0 for _, c in ranked)

    def test_ranking_invariant_under_positive_scaling(self):
        rng = random.Random(31)
        weights = tuple(rng.uniform(-1, 1) for _ in DIMENSIONS)
        profile = SituationProfile(*[rng.uniform(1, 6) for _ in DIMENSIONS])
        base = [d for d, _ in contributions(profile, LinearPriorityModel(weights, 0.0))]
        doubled = [
            d
            for d, _ in contributions(
                profile, LinearPriorityModel(tuple(2 * w for w in weights), 0.0)
            )
        ]
        assert base == doubled


class TestLevel1Evidence:
    def test_rules_trace_fields(self, s_work):
        result = evaluate_rules(s_work, DEFAULT_RULESET)
        evidence = level1_evidence(result, s_work, DEFAULT_RULESET)
        assert evidence == [
            ("R1", [("activity", "meeting")]),
            ("R3", [("num_people", 2)]),
            ("R4", [("role", "supervisor")]),
        ]

    def test_identity_neighbor_reports_first_canonical_features(self, s_work):
        from ssa.perception import encode_features

        fv = encode_features(s_work)
        profile = SituationProfile.uniform(3.0)
        model = fit_knn([(fv, profile)], k=1, ids=["s_work"])
        result = predict_profile_knn(model, fv)
        evidence = level1_evidence(result, s_work, DEFAULT_RULESET, knn_model=model, features=fv)
        assert evidence == [("s_work", [fv.names[0], fv.names[1], fv.names[2]])]

    def test_empty_trace_rejected(self, s_work):
        result = ComprehensionResult(
            profile=SituationProfile.uniform(2.0),
            source="rules",
            uncertainty={d: 0.0 for d in DIMENSIONS},
            trace=(),
        )
        with pytest.raises(ValidationError):
            level1_evidence(result, s_work, DEFAULT_RULESET)


def _work_dinner_explanation(s_work, s_dinner, depth):
    meetings = [
        Meeting(meeting_id="s_work", situation_id="s_work",
                start=s_work.cues.start, duration=s_work.cues.duration),
        Meeting(meeting_id="s_dinner", situation_id="s_dinner",
                start=s_dinner.cues.start, duration=s_dinner.cues.duration),
    ]
    conflict = detect_conflicts(meetings)[0]
    results = {
        "s_work": evaluate_rules(s_work, DEFAULT_RULESET),
        "s_dinner": evaluate_rules(s_dinner, DEFAULT_RULESET),
    }
    model = DefaultPriorityFormula()
    priorities = {sid: predict_priority(model, results[sid].profile) for sid in results}
    suggestion = suggest(conflict, priorities, {m.meeting_id: m for m in meetings})
    return explain_suggestion(
        suggestion,
        {"s_work": s_work, "s_dinner": s_dinner},
        results,
        model,
        DEFAULT_RULESET,
        depth,
    )


class TestExplainSuggestion:
    def test_depth1_compares_priorities(self, s_work, s_dinner):
        node = _work_dinner_explanation(s_work, s_dinner, 1)
        assert node.level == "L3_value_behavior"
        assert node.child is None
        facts = node.statements[0][1]
        assert facts["keep"] == "s_work"
        assert facts["keep_priority"] == pytest.approx(5.5)
        assert facts["reschedule_priority"] == pytest.approx(2.2)

    def test_depth2_cites_duty_and_adversity(self, s_work, s_dinner):
        node = _work_dinner_explanation(s_work, s_dinner, 2)
        l2 = node.child
        assert l2.level == "L2_characteristics"
        cited = [facts["dimension"] for _, facts in l2.statements]
        assert cited == ["duty", "adversity"]
        assert l2.statements[0][1]["contribution"] == pytest.approx(1.8)

    def test_depth3_cites_rules_r1_r4_with_fields(self, s_work, s_dinner):
        node = _work_dinner_explanation(s_work, s_dinner, 3)
        l1 = node.child.child
        assert l1.level == "L1_evidence"
        cited = {facts["rule_id"]: facts["fields"] for _, facts in l1.statements}
        assert set(cited) == {"R1", "R4"}  # R3 touches no cited dimension
        assert cited["R1"] == [["activity", "meeting"]]
        assert cited["R4"] == [["role", "supervisor"]]

    def test_layer_soundness_prefix_property(self, s_work, s_dinner):
        d1 = _work_dinner_explanation(s_work, s_dinner, 1).to_dict()
        d2 = _work_dinner_explanation(s_work, s_dinner, 2).to_dict()
        d3 = _work_dinner_explanation(s_work, s_dinner, 3).to_dict()

        def strip_child(doc):
            return {k: v for k, v in doc.items() if k != "child"}

        assert strip_child(d2) == strip_child(d1)
        assert strip_child(d3) == strip_child(d2)
        assert strip_child(d3["child"]) == strip_child(d2["child"])

    def test_deterministic_rendering(self, s_work, s_dinner):
        a = _work_dinner_explanation(s_work, s_dinner, 3)
        b = _work_dinner_explanation(s_work, s_dinner, 3)
        assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
        assert render_text(a) == render_text(b)

    def test_invalid_depth(self, s_work, s_dinner):
        with pytest.raises(ValidationError):
            _work_dinner_explanation(s_work, s_dinner, 4)

    def test_groundedness_of_rule_fields(self, s_work, s_dinner):
        # every quoted field value must equal the stored situation's value
        node = _work_dinner_explanation(s_work, s_dinner, 3)
        from ssa.comprehension import _field_value  # white-box re-resolution

        for _, facts in node.child.child.statements:
            for name, value in facts["fields"]:
                assert _field_value(s_work, name) == value


class TestExplainShare:
    def _share_explanation(self, s_dinner, depth):
        result = evaluate_rules(s_dinner, DEFAULT_RULESET)
        decision = ShareDecision(
            situation_id="s_dinner",
            recipient="c2",
            decision="share",
            driving_values=("social_recognition",),
        )
        return explain_share(
            decision, s_dinner, result, DEFAULT_IMPACT_TABLE, DEFAULT_RULESET, depth
        )

    def test_l3_names_driving_values(self, s_dinner):
        node = self._share_explanation(s_dinner, 1)
        assert node.statements[0][0] == "share.share"
        assert node.statements[0][1]["values"] == ["social_recognition"]

    def test_l2_cites_sociality(self, s_dinner):
        node = self._share_explanation(s_dinner, 2)
        cited = [facts["dimension"] for _, facts in node.child.statements]
        assert cited == ["sociality"]
        assert node.child.statements[0][1]["value"] == 5.5

    def test_l1_cites_sociality_rules(self, s_dinner):
        node = self._share_explanation(s_dinner, 3)
        rule_ids = {facts["rule_id"] for _, facts in node.child.child.statements}
        assert rule_ids == {"R2", "R3"}  # both add to sociality

    def test_rendered_lines_fill_templates(self, s_dinner):
        lines = render_text(self._share_explanation(s_dinner, 3))
        assert any("social_recognition" in line for line in lines)
        catalog = load_template_catalog()
        assert all("{" not in line for line in lines), "unfilled template slot"
        assert set(catalog)  # catalog loads
