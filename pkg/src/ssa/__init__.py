"""Social situation awareness engine and agenda-management support agent.

The pipeline runs in three levels — perceive the elements of a social
situation, comprehend them as a profile of psychological characteristics,
and project expected behavior (meeting priority) and affected personal
values — wrapped by four interaction behaviors: elicitation, support,
explanation and feedback. State is event-sourced and exposed over a JSON
HTTP API and the ``ssa`` CLI.
"""

from .agent import Agent, AgentState, DecisionRecord
from .agent_loop import (
    Conflict,
    ElicitationRequest,
    FeedbackRecord,
    Meeting,
    ShareDecision,
    Suggestion,
    UserModel,
    assess_support_need,
    detect_conflicts,
    share_decision,
    suggest,
)
from .comprehension import (
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
from .config import AgentConfig
from .errors import SsaError
from .explanation import ExplanationNode, contributions, explain_share, explain_suggestion, level1_evidence
from .perception import (
    ActivityType,
    ContactRegistry,
    FeatureVector,
    Hierarchy,
    LocationType,
    Role,
    SituationCueSet,
    SocialRelationship,
    SocialSituation,
    assemble_situation,
    detect_missing_fields,
    encode_features,
)
from .projection import (
    ClusterModel,
    DefaultPriorityFormula,
    ImpactRule,
    KnnPriorityModel,
    LinearPriorityModel,
    assess_value_impact,
    assign_cluster,
    fit_clusters,
    fit_priority_model,
    predict_priority,
)
from .synthetic import SyntheticSpec, evaluate_pipeline, generate_synthetic

__version__ = "0.1.0"
