"""The four interaction behaviors around the pipeline.

* Elicitation: ask the user only when information is missing or a learned
  prediction is too uncertain to trust.
* Support: detect overlapping meetings and suggest keeping the one with
  higher priority; flag mismatches with the user's stated preferences and
  situations that touch values important to the user.
* Sharing: decide whether sharing with a recipient is value-aligned,
  with a hard veto when any important value would be demoted.
* Feedback: validate accept/reject verdicts and turn corrections into
  training pairs for the models.

Everything here is a pure function over explicit inputs; the
event-sourced command layer in :mod:`ssa.agent` owns the state.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Mapping, Optional, Sequence

from .comprehension import ComprehensionResult, SituationProfile, clause_matches
from .errors import InvalidCorrection, RangeError, ValidationError
from .perception import SocialSituation
from .projection import PRIORITY_MAX, PRIORITY_MIN

#: Uncertainty (one Likert step) above which the agent asks instead of
#: silently trusting a learned prediction.
DEFAULT_ELICITATION_THRESHOLD = 1.0

#: Priority margins below this are surfaced as low-confidence suggestions.
LOW_CONFIDENCE_MARGIN = 0.25


@dataclass(frozen=True)
class UserModel:
    """Preferences the support module personalizes against."""

    important_values: frozenset[str] = frozenset()
    # (situation predicate clause, (low, high) priority band)
    behavior_preferences: tuple[tuple[dict, tuple[float, float]], ...] = ()
    elicitation_threshold: float = DEFAULT_ELICITATION_THRESHOLD

    def __post_init__(self):
        if self.elicitation_threshold <= 0:
            raise ValidationError("elicitation_threshold must be > 0")


@dataclass(frozen=True)
class Meeting:
    meeting_id: str
    situation_id: str
    start: datetime
    duration: float  # minutes

    def __post_init__(self):
        if self.duration <= 0:
            raise ValidationError(f"meeting {self.meeting_id!r} has non-positive duration")

    @property
    def end(self) -> datetime:
        from datetime import timedelta

        return self.start + timedelta(minutes=self.duration)


@dataclass(frozen=True)
class Conflict:
    conflict_id: str
    meeting_ids: tuple[str, str]
    overlap: tuple[datetime, datetime]

    def to_dict(self) -> dict:
        return {
            "conflict_id": self.conflict_id,
            "meeting_ids": list(self.meeting_ids),
            "overlap": [self.overlap[0].isoformat(), self.overlap[1].isoformat()],
        }


def detect_conflicts(agenda: Sequence[Meeting]) -> list[Conflict]:
    """All unordered meeting pairs whose half-open intervals intersect.

    Touching endpoints do not conflict. Output is sorted by the earlier
    start of the pair, then conflict id; within a pair meetings are
    ordered by (start, id).
    """
    conflicts = []
    for i in range(len(agenda)):
        for j in range(i + 1, len(agenda)):
            a, b = agenda[i], agenda[j]
            lo = max(a.start, b.start)
            hi = min(a.end, b.end)
            if lo < hi:
                first, second = sorted((a, b), key=lambda m: (m.start, m.meeting_id))
                conflicts.append(
                    Conflict(
                        conflict_id=f"cf-{first.meeting_id}-{second.meeting_id}",
                        meeting_ids=(first.meeting_id, second.meeting_id),
                        overlap=(lo, hi),
                    )
                )
    conflicts.sort(key=lambda c: (c.overlap[0], c.conflict_id))
    return conflicts


@dataclass(frozen=True)
class Suggestion:
    suggestion_id: str
    conflict_id: str
    keep: str
    reschedule: str
    priorities: dict[str, float]
    margin: float
    low_confidence: bool

    def to_dict(self) -> dict:
        return {
            "suggestion_id": self.suggestion_id,
            "conflict_id": self.conflict_id,
            "keep": self.keep,
            "reschedule": self.reschedule,
            "priorities": dict(self.priorities),
            "margin": self.margin,
            "low_confidence": self.low_confidence,
        }


def suggest(
    conflict: Conflict,
    priorities: Mapping[str, float],
    meetings: Mapping[str, Meeting],
) -> Suggestion:
    """Keep the higher-priority meeting, reschedule the other.

    Exact ties keep the earlier-starting meeting, then the lower id.
    A margin under LOW_CONFIDENCE_MARGIN flags the suggestion as low
    confidence (it is still made; the UI surfaces the flag).
    """
    a, b = conflict.meeting_ids
    pa, pb = priorities[a], priorities[b]
    for mid, p in ((a, pa), (b, pb)):
        if not PRIORITY_MIN <= p <= PRIORITY_MAX:
            raise RangeError(f"priority {p} for {mid!r} outside [1, 7]", field="priority")
    if pa == pb:
        keep = min((a, b), key=lambda mid: (meetings[mid].start, mid))
    else:
        keep = a if pa > pb else b
    reschedule = b if keep == a else a
    margin = abs(pa - pb)
    return Suggestion(
        suggestion_id=f"sug-{conflict.conflict_id}",
        conflict_id=conflict.conflict_id,
        keep=keep,
        reschedule=reschedule,
        priorities={a: pa, b: pb},
        margin=margin,
        low_confidence=margin < LOW_CONFIDENCE_MARGIN,
    )


# ---------------------------------------------------------------------------
# Elicitation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ElicitationRequest:
    """A question for the user: missing fields and/or an uncertain
    prediction. At least one cause is always present."""

    request_id: str
    situation_id: str
    missing: tuple[str, ...] = ()
    uncertainty: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if not self.missing and not self.uncertainty:
            raise ValidationError("elicitation request needs at least one cause")

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "situation_id": self.situation_id,
            "missing": list(self.missing),
            "uncertainty": [[dim, value] for dim, value in self.uncertainty],
        }


def build_pending_elicitations(
    situations: Mapping[str, SocialSituation],
    missing_by_situation: Mapping[str, Sequence[str]],
    comprehensions: Mapping[str, ComprehensionResult],
    answered_counts: Mapping[str, int],
    uncertainty_resolved: set[str],
    threshold: float = DEFAULT_ELICITATION_THRESHOLD,
) -> list[ElicitationRequest]:
    """One request per situation that has missing mandatory fields or a
    learned comprehension with any dimension uncertainty above the
    threshold (unless the user already resolved it). Request ids are
    deterministic: ``elq-<situation>-<n>`` where n counts prior answered
    requests for that situation.
    """
    pending = []
    for sid in situations:
        missing = tuple(missing_by_situation.get(sid, ()))
        uncertain: tuple[tuple[str, float], ...] = ()
        result = comprehensions.get(sid)
        if result is not None and result.source == "learned" and sid not in uncertainty_resolved:
            uncertain = tuple(
                (dim, value) for dim, value in result.uncertainty.items() if value > threshold
            )
        if missing or uncertain:
            pending.append(
                ElicitationRequest(
                    request_id=f"elq-{sid}-{answered_counts.get(sid, 0)}",
                    situation_id=sid,
                    missing=missing,
                    uncertainty=uncertain,
                )
            )
    return pending


# ---------------------------------------------------------------------------
# Support need
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportAssessment:
    kind: str  # "none" | "behavior_mismatch" | "value_affected"
    affected_values: tuple[str, ...] = ()
    band: Optional[tuple[float, float]] = None

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.affected_values:
            out["affected_values"] = list(self.affected_values)
        if self.band is not None:
            out["band"] = list(self.band)
        return out


def assess_support_need(
    user: UserModel,
    situation: SocialSituation,
    impact: Mapping[str, int],
    priority: float,
) -> SupportAssessment:
    """Support is needed when the situation touches an important value or
    the predicted priority falls outside a matching preference band.
    Value impact takes precedence when both apply."""
    touched = tuple(
        sorted(v for v, sign in impact.items() if sign != 0 and v in user.important_values)
    )
    if touched:
        return SupportAssessment(kind="value_affected", affected_values=touched)
    for clause, (lo, hi) in user.behavior_preferences:
        if clause_matches(situation, clause) and not lo <= priority <= hi:
            return SupportAssessment(kind="behavior_mismatch", band=(lo, hi))
    return SupportAssessment(kind="none")


# ---------------------------------------------------------------------------
# Sharing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShareDecision:
    situation_id: str
    recipient: str
    decision: str  # "share" | "withhold"
    driving_values: tuple[str, ...]

    def __post_init__(self):
        if self.decision == "share" and not self.driving_values:
            raise ValidationError("share decisions must name their driving values")

    def to_dict(self) -> dict:
        return {
            "situation_id": self.situation_id,
            "recipient": self.recipient,
            "decision": self.decision,
            "driving_values": list(self.driving_values),
        }


def share_decision(
    impact: Mapping[str, int], important_values: frozenset[str] | set[str]
) -> tuple[str, tuple[str, ...]]:
    """Share iff some promoted value is important to the user and no
    important value is demoted (the demotion veto always wins)."""
    promoted = sorted(v for v, s in impact.items() if s > 0 and v in important_values)
    demoted = [v for v, s in impact.items() if s < 0 and v in important_values]
    if promoted and not demoted:
        return "share", tuple(promoted)
    return "withhold", ()


# ---------------------------------------------------------------------------
# Feedback
# ---------------------------------------------------------------------------

FEEDBACK_VERDICTS = ("accept", "reject")


@dataclass(frozen=True)
class FeedbackRecord:
    """User verdict on a suggestion, optionally with corrections.

    Corrections refer to the rescheduled (disputed) meeting's situation.
    A rejection must carry at least one correction or a reason.
    """

    suggestion_id: str
    verdict: str
    corrected_priority: Optional[float] = None
    corrected_profile: Optional[SituationProfile] = None
    reason: str = ""

    def __post_init__(self):
        if self.verdict not in FEEDBACK_VERDICTS:
            raise ValidationError(
                f"verdict {self.verdict!r} must be one of {FEEDBACK_VERDICTS}",
                field="verdict",
            )
        if self.corrected_priority is not None and not (
            PRIORITY_MIN <= self.corrected_priority <= PRIORITY_MAX
        ):
            raise InvalidCorrection(
                f"corrected_priority={self.corrected_priority} outside [1, 7]",
                field="corrected_priority",
            )
        if self.verdict == "reject" and not (
            self.corrected_priority is not None
            or self.corrected_profile is not None
            or self.reason
        ):
            raise ValidationError(
                "a rejection needs a correction or a reason", field="reason"
            )

    def to_dict(self) -> dict:
        out: dict = {"suggestion_id": self.suggestion_id, "verdict": self.verdict}
        if self.corrected_priority is not None:
            out["corrected_priority"] = self.corrected_priority
        if self.corrected_profile is not None:
            out["corrected_profile"] = self.corrected_profile.to_dict()
        if self.reason:
            out["reason"] = self.reason
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FeedbackRecord":
        allowed = {"suggestion_id", "verdict", "corrected_priority", "corrected_profile", "reason"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ValidationError(f"unknown feedback field(s): {', '.join(unknown)}")
        profile = None
        if data.get("corrected_profile") is not None:
            try:
                profile = SituationProfile.from_dict(data["corrected_profile"])
            except RangeError as exc:
                raise InvalidCorrection(str(exc), field="corrected_profile")
        return cls(
            suggestion_id=data.get("suggestion_id", ""),
            verdict=data.get("verdict", ""),
            corrected_priority=data.get("corrected_priority"),
            corrected_profile=profile,
            reason=data.get("reason", ""),
        )
