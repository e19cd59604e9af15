"""Layered explanations for suggestions and share decisions.

Every explanation is a chain of up to three nodes:

* L3 relates the decision to priorities or personal values,
* L2 names the psychological characteristics behind the L3 statement,
* L1 grounds those characteristics in situation cues and relationship
  features (fired rules or nearest neighbors).

Deeper levels strictly extend shallower ones, so drilling down never
rewrites what the user already saw. Statements are (template_id, facts)
pairs; the text templates live in ``templates.json`` so presentation can
change without touching this engine, and every bound fact is copied from
stored state, never synthesized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Optional, Sequence

from .agent_loop import ShareDecision, Suggestion
from .comprehension import (
    DIMENSIONS,
    ComprehensionResult,
    KnnModel,
    RuleSet,
    SituationProfile,
)
from .errors import ValidationError
from .perception import FeatureVector, SocialSituation
from .projection import (
    DefaultPriorityFormula,
    ImpactRule,
    KnnPriorityModel,
    PriorityModel,
)

#: Characteristics cited at L2; kept short on purpose.
TOP_M_CHARACTERISTICS = 2

#: Contributions compare against the scale midpoint so explanations work
#: before any training data exists.
MIDPOINT = 3.5

LEVELS = ("L3_value_behavior", "L2_characteristics", "L1_evidence")


@dataclass(frozen=True)
class ExplanationNode:
    level: str
    statements: tuple[tuple[str, dict], ...]
    child: Optional["ExplanationNode"] = None

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "statements": [
                {"template": template, "facts": facts} for template, facts in self.statements
            ],
            "child": self.child.to_dict() if self.child else None,
        }


def contributions(
    profile: SituationProfile, priority_model: PriorityModel
) -> list[tuple[str, float]]:
    """Per-dimension signed contribution to priority: w_d * (x_d - 3.5).

    Uses the active model's coefficients; the nearest-neighbor priority
    model has none, so the default formula's implicit weights stand in.
    Ranked by absolute contribution, ties in canonical dimension order.
    """
    if isinstance(priority_model, KnnPriorityModel):
        weights = DefaultPriorityFormula().implicit_weights()
    else:
        weights = priority_model.implicit_weights()
    scored = [(dim, weights[dim] * (profile[dim] - MIDPOINT)) for dim in DIMENSIONS]
    order = {dim: i for i, dim in enumerate(DIMENSIONS)}
    scored.sort(key=lambda item: (-abs(item[1]), order[item[0]]))
    return scored


def level1_evidence(
    result: ComprehensionResult,
    situation: SocialSituation,
    ruleset: RuleSet,
    knn_model: Optional[KnnModel] = None,
    features: Optional[FeatureVector] = None,
) -> list[tuple[str, list]]:
    """Ground a comprehension result in Level-1 facts.

    Rules source: per fired rule, the satisfied predicates with the
    situation's actual field values. Learned source: per neighbor, the
    three feature names with the smallest per-feature weighted distance
    to the query (ties in canonical feature order).
    """
    if not result.trace:
        raise ValidationError("comprehension trace is empty; nothing to ground")
    if result.source == "rules":
        by_id = {rule.rule_id: rule for rule in ruleset.rules}
        evidence = []
        for rule_id in result.trace:
            rule = by_id.get(rule_id)
            if rule is None:
                raise ValidationError(f"trace references unknown rule {rule_id!r}")
            matched = rule.matched_clause(situation) or []
            evidence.append((rule_id, matched))
        return evidence
    if knn_model is None or features is None:
        raise ValidationError("learned evidence needs the model and query features")
    index_by_id = {nid: i for i, nid in enumerate(knn_model.ids)}
    evidence = []
    for neighbor_id in result.trace:
        i = index_by_id.get(neighbor_id)
        if i is None:
            raise ValidationError(f"trace references unknown neighbor {neighbor_id!r}")
        neighbor = knn_model.pairs[i][0]
        per_feature = [
            w * (a - b) * (a - b)
            for w, a, b in zip(knn_model.weights, features.values, neighbor.values)
        ]
        closest = sorted(range(len(per_feature)), key=lambda j: (per_feature[j], j))[:3]
        evidence.append((neighbor_id, [features.names[j] for j in closest]))
    return evidence


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{round(value, 6):g}"
    return str(value)


def _l2_statements(profile: SituationProfile, ranked: Sequence[tuple[str, float]], template: str):
    statements = []
    for dim, contribution in ranked[:TOP_M_CHARACTERISTICS]:
        facts = {"dimension": dim, "value": profile[dim]}
        if template == "characteristic.priority_driver":
            facts["contribution"] = contribution
        statements.append((template, facts))
    return tuple(statements)


def _l1_node(
    result: ComprehensionResult,
    situation: SocialSituation,
    ruleset: RuleSet,
    cited_dims: Sequence[str],
    knn_model: Optional[KnnModel],
    features: Optional[FeatureVector],
) -> ExplanationNode:
    """L1 keeps only the evidence behind the characteristics cited at L2:
    fired rules that touch a cited dimension (the learned path has no
    per-dimension attribution, so all neighbors are kept)."""
    evidence = level1_evidence(result, situation, ruleset, knn_model, features)
    statements = []
    if result.source == "rules":
        deltas = {rule.rule_id: rule.add for rule in ruleset.rules}
        cited = set(cited_dims)
        for rule_id, fields in evidence:
            if not cited.intersection(deltas.get(rule_id, {})):
                continue
            statements.append(
                ("evidence.rule", {"rule_id": rule_id, "fields": [[n, v] for n, v in fields]})
            )
    else:
        for neighbor_id, names in evidence:
            statements.append(("evidence.neighbor", {"neighbor": neighbor_id, "features": names}))
    return ExplanationNode(level="L1_evidence", statements=tuple(statements))


def _chain(l3: ExplanationNode, l2: ExplanationNode, l1: ExplanationNode, depth: int):
    if depth == 1:
        return ExplanationNode(level=l3.level, statements=l3.statements)
    if depth == 2:
        return ExplanationNode(
            level=l3.level,
            statements=l3.statements,
            child=ExplanationNode(level=l2.level, statements=l2.statements),
        )
    return ExplanationNode(
        level=l3.level,
        statements=l3.statements,
        child=ExplanationNode(level=l2.level, statements=l2.statements, child=l1),
    )


def _check_depth(depth: int) -> None:
    if depth not in (1, 2, 3):
        raise ValidationError(f"depth={depth} must be 1, 2 or 3", field="depth")


def explain_suggestion(
    suggestion: Suggestion,
    situations: Mapping[str, SocialSituation],
    results: Mapping[str, ComprehensionResult],
    priority_model: PriorityModel,
    ruleset: RuleSet,
    depth: int,
    knn_model: Optional[KnnModel] = None,
    features: Optional[Mapping[str, FeatureVector]] = None,
) -> ExplanationNode:
    """Three-level explanation of a keep/reschedule suggestion.

    L2 and L1 drill into the kept meeting's situation: why its priority
    came out on top, and which cues and relationship features caused it.
    ``situations``/``results`` are keyed by situation id as stored on the
    decision.
    """
    _check_depth(depth)
    kept = situations[suggestion.keep]
    kept_result = results[suggestion.keep]
    l3_statements = [
        (
            "suggestion.decision",
            {
                "keep": suggestion.keep,
                "reschedule": suggestion.reschedule,
                "keep_priority": suggestion.priorities[suggestion.keep],
                "reschedule_priority": suggestion.priorities[suggestion.reschedule],
            },
        )
    ]
    if suggestion.low_confidence:
        l3_statements.append(("suggestion.low_confidence", {"margin": suggestion.margin}))
    l3 = ExplanationNode(level="L3_value_behavior", statements=tuple(l3_statements))

    ranked = contributions(kept_result.profile, priority_model)
    l2 = ExplanationNode(
        level="L2_characteristics",
        statements=_l2_statements(kept_result.profile, ranked, "characteristic.priority_driver"),
    )
    cited = [dim for dim, _ in ranked[:TOP_M_CHARACTERISTICS]]
    l1 = _l1_node(
        kept_result,
        kept,
        ruleset,
        cited,
        knn_model,
        features.get(suggestion.keep) if features else None,
    )
    return _chain(l3, l2, l1, depth)


def explain_share(
    decision: ShareDecision,
    situation: SocialSituation,
    result: ComprehensionResult,
    impact_table: Sequence[ImpactRule],
    ruleset: RuleSet,
    depth: int,
    knn_model: Optional[KnnModel] = None,
    features: Optional[FeatureVector] = None,
) -> ExplanationNode:
    """Three-level explanation of a sharing decision.

    L2 cites the characteristics referenced by the impact rules behind
    the decision (for a share, the rules that promoted the driving
    values; for a withhold, every matched rule)."""
    _check_depth(depth)
    if decision.decision == "share":
        l3_statements = (
            (
                "share.share",
                {
                    "recipient": decision.recipient,
                    "values": list(decision.driving_values),
                },
            ),
        )
        relevant = set(decision.driving_values)
    else:
        l3_statements = (("share.withhold", {"recipient": decision.recipient}),)
        relevant = None  # every matched rule explains a withhold
    l3 = ExplanationNode(level="L3_value_behavior", statements=l3_statements)

    profile = result.profile
    cited_dims: list[str] = []
    for rule in impact_table:
        if not rule.matches(profile):
            continue
        if relevant is not None and not relevant.intersection(rule.effect):
            continue
        for dim in rule.when:
            if dim not in cited_dims:
                cited_dims.append(dim)
    order = {dim: i for i, dim in enumerate(DIMENSIONS)}
    cited_dims.sort(key=lambda dim: (-profile[dim], order[dim]))
    cited_dims = cited_dims[:TOP_M_CHARACTERISTICS]
    l2 = ExplanationNode(
        level="L2_characteristics",
        statements=tuple(
            ("characteristic.share_driver", {"dimension": dim, "value": profile[dim]})
            for dim in cited_dims
        ),
    )
    l1 = _l1_node(result, situation, ruleset, cited_dims, knn_model, features)
    return _chain(l3, l2, l1, depth)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def load_template_catalog() -> dict[str, str]:
    text = resources.files("ssa").joinpath("templates.json").read_text(encoding="utf-8")
    return json.loads(text)


def _render_fact(value) -> str:
    if isinstance(value, list):
        if value and isinstance(value[0], list):  # [[field, value], ...]
            return ", ".join(f"{n}={_format_value(v)}" for n, v in value)
        return ", ".join(_format_value(v) for v in value)
    return _format_value(value)


def render_text(node: ExplanationNode, catalog: Optional[dict[str, str]] = None) -> list[str]:
    """Flatten a node chain to template-filled lines, deterministic for
    identical input."""
    catalog = catalog or load_template_catalog()
    lines = []
    current: Optional[ExplanationNode] = node
    while current is not None:
        for template_id, facts in current.statements:
            template = catalog[template_id]
            lines.append(template.format(**{k: _render_fact(v) for k, v in facts.items()}))
        current = current.child
    return lines
