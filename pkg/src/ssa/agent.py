"""Event-sourced agent: state fold and command layer.

``AgentState`` is a deterministic fold of the event log: every mutation
enters through an event, so the live state always equals
``replay(log)``. Commands validate input against the current state,
append the event durably, then apply it; readers see consistent state
because a single lock serializes writers (reads are cheap and
recomputed from immutable values).

Model management: the comprehension kNN is a lazy learner, so it is
derived directly from the accumulated training pairs at read time; the
priority model is rebuilt only on ``model_refit`` events, choosing the
linear model when enough pairs exist, exact nearest-neighbor recall when
feedback has started to accumulate, and the default formula otherwise.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

from . import agent_loop, comprehension, explanation, perception, projection
from .agent_loop import (
    Conflict,
    FeedbackRecord,
    Meeting,
    ShareDecision,
    Suggestion,
    UserModel,
)
from .comprehension import (
    ComprehensionResult,
    KnnModel,
    SituationProfile,
    comprehend,
    fit_knn,
)
from .config import AgentConfig
from .errors import (
    ClosedRequest,
    RangeError,
    UnknownConflict,
    UnknownContact,
    UnknownDecision,
    UnknownRequest,
    UnknownSituation,
    UnknownSuggestion,
    ValidationError,
)
from .perception import (
    ContactRegistry,
    FeatureVector,
    Hierarchy,
    Role,
    SituationCueSet,
    SocialRelationship,
    SocialSituation,
    detect_missing_fields,
    encode_features,
)
from .projection import (
    DefaultPriorityFormula,
    KnnPriorityModel,
    LinearPriorityModel,
    PriorityModel,
    assess_value_impact,
    fit_knn_priority,
    fit_priority_model,
    predict_priority,
)
from .store import EventLog, EventRecord, load_snapshot, replay, write_snapshot

_PARTICIPANT_PATH = re.compile(r"^participants\[(\d+)\](?:\.(\w+))?$")


@dataclass
class StoredSituation:
    """Situation as logged: cues plus participant references (contacts are
    resolved on read so elicited updates show through)."""

    situation_id: str
    cues: SituationCueSet
    participant_ids: tuple[str, ...]
    label: str = ""

    def resolve(self, contacts: ContactRegistry) -> SocialSituation:
        return perception.assemble_situation(
            self.situation_id, self.cues, self.participant_ids, contacts, self.label
        )

    def to_dict(self) -> dict:
        return {
            "situation_id": self.situation_id,
            "cues": self.cues.to_dict(),
            "participant_ids": list(self.participant_ids),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StoredSituation":
        return cls(
            situation_id=doc["situation_id"],
            cues=SituationCueSet.from_dict(doc["cues"]),
            participant_ids=tuple(doc.get("participant_ids", ())),
            label=doc.get("label", ""),
        )


@dataclass
class DecisionRecord:
    """A decision plus the projection/comprehension context it was made
    with, snapshotted so explanations stay grounded in what the agent
    actually knew."""

    decision_id: str
    kind: str  # "suggestion" | "share"
    suggestion: Optional[Suggestion] = None
    share: Optional[ShareDecision] = None
    situations: dict[str, SocialSituation] = dc_field(default_factory=dict)
    results: dict[str, ComprehensionResult] = dc_field(default_factory=dict)
    model_kind: str = "default_formula"

    def to_dict(self) -> dict:
        doc: dict = {
            "decision_id": self.decision_id,
            "kind": self.kind,
            "situations": {sid: s.to_dict() for sid, s in self.situations.items()},
            "results": {sid: r.to_dict() for sid, r in self.results.items()},
            "model_kind": self.model_kind,
        }
        if self.suggestion is not None:
            doc["suggestion"] = self.suggestion.to_dict()
        if self.share is not None:
            doc["share"] = self.share.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionRecord":
        suggestion = None
        if "suggestion" in doc:
            s = doc["suggestion"]
            suggestion = Suggestion(
                suggestion_id=s["suggestion_id"],
                conflict_id=s["conflict_id"],
                keep=s["keep"],
                reschedule=s["reschedule"],
                priorities={k: float(v) for k, v in s["priorities"].items()},
                margin=float(s["margin"]),
                low_confidence=bool(s["low_confidence"]),
            )
        share = None
        if "share" in doc:
            sh = doc["share"]
            share = ShareDecision(
                situation_id=sh["situation_id"],
                recipient=sh["recipient"],
                decision=sh["decision"],
                driving_values=tuple(sh["driving_values"]),
            )
        return cls(
            decision_id=doc["decision_id"],
            kind=doc["kind"],
            suggestion=suggestion,
            share=share,
            situations={
                sid: SocialSituation.from_dict(s) for sid, s in doc["situations"].items()
            },
            results={
                sid: ComprehensionResult.from_dict(r) for sid, r in doc["results"].items()
            },
            model_kind=doc.get("model_kind", "default_formula"),
        )


def _serialize_priority_model(model: PriorityModel) -> dict:
    if isinstance(model, LinearPriorityModel):
        return {"kind": "linear", "weights": list(model.weights), "intercept": model.intercept}
    if isinstance(model, KnnPriorityModel):
        return {
            "kind": "knn",
            "k": model.k,
            "pairs": [[p.to_dict(), target] for p, target in model.pairs],
        }
    return {"kind": "default_formula"}


def _deserialize_priority_model(doc: dict) -> PriorityModel:
    if doc["kind"] == "linear":
        return LinearPriorityModel(
            weights=tuple(float(w) for w in doc["weights"]), intercept=float(doc["intercept"])
        )
    if doc["kind"] == "knn":
        return KnnPriorityModel(
            pairs=tuple(
                (SituationProfile.from_dict(p), float(t)) for p, t in doc["pairs"]
            ),
            k=doc["k"],
        )
    return DefaultPriorityFormula()


@dataclass
class AgentState:
    """Everything the agent knows; a pure fold of the event log."""

    contacts: ContactRegistry = dc_field(default_factory=ContactRegistry)
    situations: dict[str, StoredSituation] = dc_field(default_factory=dict)
    comprehension_pairs: list[tuple[str, FeatureVector, SituationProfile]] = dc_field(
        default_factory=list
    )
    priority_pairs: list[tuple[SituationProfile, float]] = dc_field(default_factory=list)
    priority_model: PriorityModel = dc_field(default_factory=DefaultPriorityFormula)
    decisions: dict[str, DecisionRecord] = dc_field(default_factory=dict)
    feedback_log: list[dict] = dc_field(default_factory=list)
    answered_counts: dict[str, int] = dc_field(default_factory=dict)
    closed_requests: set[str] = dc_field(default_factory=set)
    uncertainty_resolved: set[str] = dc_field(default_factory=set)
    last_seq: int = 0

    def to_doc(self) -> dict:
        """Canonical JSON form, used for snapshots and deep-equality."""
        return {
            "contacts": [c.to_dict() for c in self.contacts.all()],
            "situations": [s.to_dict() for s in self.situations.values()],
            "comprehension_pairs": [
                {"id": pid, "features": fv.to_dict(), "profile": p.to_dict()}
                for pid, fv, p in self.comprehension_pairs
            ],
            "priority_pairs": [
                {"profile": p.to_dict(), "priority": t} for p, t in self.priority_pairs
            ],
            "priority_model": _serialize_priority_model(self.priority_model),
            "decisions": [d.to_dict() for d in self.decisions.values()],
            "feedback_log": list(self.feedback_log),
            "answered_counts": dict(self.answered_counts),
            "closed_requests": sorted(self.closed_requests),
            "uncertainty_resolved": sorted(self.uncertainty_resolved),
            "last_seq": self.last_seq,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "AgentState":
        state = cls()
        for contact in doc["contacts"]:
            state.contacts.register(SocialRelationship.from_dict(contact))
        for s in doc["situations"]:
            stored = StoredSituation.from_dict(s)
            state.situations[stored.situation_id] = stored
        state.comprehension_pairs = [
            (
                e["id"],
                FeatureVector.from_dict(e["features"]),
                SituationProfile.from_dict(e["profile"]),
            )
            for e in doc["comprehension_pairs"]
        ]
        state.priority_pairs = [
            (SituationProfile.from_dict(e["profile"]), float(e["priority"]))
            for e in doc["priority_pairs"]
        ]
        state.priority_model = _deserialize_priority_model(doc["priority_model"])
        for d in doc["decisions"]:
            record = DecisionRecord.from_dict(d)
            state.decisions[record.decision_id] = record
        state.feedback_log = list(doc["feedback_log"])
        state.answered_counts = dict(doc["answered_counts"])
        state.closed_requests = set(doc["closed_requests"])
        state.uncertainty_resolved = set(doc["uncertainty_resolved"])
        state.last_seq = doc["last_seq"]
        return state


def _refit_priority_model(pairs: list[tuple[SituationProfile, float]]) -> PriorityModel:
    """Arbitration: linear once enough pairs exist, exact nearest-neighbor
    recall while feedback is sparse, default formula before any."""
    if len(pairs) >= projection.LINEAR_MIN_PAIRS:
        return fit_priority_model(pairs)
    if pairs:
        return fit_knn_priority(pairs, k=1)
    return DefaultPriorityFormula()


class Agent:
    """Single-writer command layer over the event log."""

    def __init__(self, config: AgentConfig, clock: Callable[[], float] | None = None):
        self.config = config
        self._lock = threading.RLock()
        kwargs = {"clock": clock} if clock else {}
        self.log = EventLog(config.log_path, **kwargs)
        self.state = AgentState()
        if config.snapshot_path.exists():
            doc, covered = load_snapshot(config.snapshot_path)
            self.state = AgentState.from_doc(doc)
            replay(self.log.events(after_seq=covered), self._apply, self.state)
        else:
            replay(self.log.events(), self._apply, self.state)

    # ------------------------------------------------------------------
    # Event application (the fold)
    # ------------------------------------------------------------------

    def _apply(self, state: AgentState, event: EventRecord) -> None:
        kind, payload = event.kind, event.payload
        if kind == "contact_registered":
            state.contacts.register(SocialRelationship.from_dict(payload["contact"]))
        elif kind == "situation_added":
            stored = StoredSituation.from_dict(payload["situation"])
            state.situations[stored.situation_id] = stored
        elif kind == "elicitation_answered":
            self._apply_answers(state, payload)
        elif kind == "feedback_recorded":
            self._apply_feedback(state, event)
        elif kind == "model_refit":
            if "priority" in payload["targets"]:
                state.priority_model = _refit_priority_model(state.priority_pairs)
            # the comprehension learner is lazy: new pairs are picked up on read
        elif kind == "decision_made":
            record = DecisionRecord.from_dict(payload["decision"])
            state.decisions[record.decision_id] = record
        state.last_seq = event.seq

    def _apply_answers(self, state: AgentState, payload: dict) -> None:
        sid = payload["situation_id"]
        stored = state.situations[sid]
        answers = payload["answers"]
        asserted: dict[str, float] = {}
        for key in sorted(answers):
            value = answers[key]
            match = _PARTICIPANT_PATH.match(key)
            if match:
                index, field_name = int(match.group(1)), match.group(2)
                if field_name is None:
                    # link an existing contact into the participant slot
                    if index >= len(stored.participant_ids):
                        stored.participant_ids = (*stored.participant_ids, value)
                    continue
                if index >= len(stored.participant_ids):
                    auto_id = f"auto-{sid}-{index}"
                    if auto_id not in state.contacts:
                        state.contacts.register(SocialRelationship(contact_id=auto_id))
                    stored.participant_ids = (*stored.participant_ids, auto_id)
                contact_id = stored.participant_ids[index]
                state.contacts.update_fields(contact_id, **{field_name: _parse_field(field_name, value)})
            elif key in comprehension.DIMENSIONS:
                asserted[key] = float(value)
        if asserted:
            current = self._comprehend_state(state, sid)
            profile = SituationProfile(
                **{
                    dim: asserted.get(dim, current.profile[dim])
                    for dim in comprehension.DIMENSIONS
                }
            )
            features = encode_features(stored.resolve(state.contacts), impute_missing=True)
            pair_id = f"{sid}@{len(state.comprehension_pairs)}"
            state.comprehension_pairs.append((pair_id, features, profile))
            state.uncertainty_resolved.add(sid)
        state.closed_requests.add(payload["request_id"])
        state.answered_counts[sid] = state.answered_counts.get(sid, 0) + 1

    def _apply_feedback(self, state: AgentState, event: EventRecord) -> None:
        fb = FeedbackRecord.from_dict(event.payload["feedback"])
        state.feedback_log.append(
            {"seq": event.seq, "timestamp": event.timestamp, **fb.to_dict()}
        )
        if fb.verdict == "accept":
            return
        decision = state.decisions[fb.suggestion_id]
        target_sid = decision.suggestion.reschedule  # corrections dispute the demoted meeting
        if fb.corrected_priority is not None:
            profile = decision.results[target_sid].profile
            state.priority_pairs.append((profile, float(fb.corrected_priority)))
        if fb.corrected_profile is not None:
            features = encode_features(decision.situations[target_sid], impute_missing=True)
            pair_id = f"{target_sid}@{len(state.comprehension_pairs)}"
            state.comprehension_pairs.append((pair_id, features, fb.corrected_profile))

    # ------------------------------------------------------------------
    # Derived models and reads
    # ------------------------------------------------------------------

    def _knn_model(self, state: Optional[AgentState] = None) -> Optional[KnnModel]:
        state = state or self.state
        if not state.comprehension_pairs:
            return None
        return fit_knn(
            [(fv, p) for _, fv, p in state.comprehension_pairs],
            k=self.config.k,
            ids=[pid for pid, _, _ in state.comprehension_pairs],
        )

    def _comprehend_state(self, state: AgentState, sid: str) -> ComprehensionResult:
        stored = state.situations.get(sid)
        if stored is None:
            raise UnknownSituation(f"situation {sid!r} not found")
        situation = stored.resolve(state.contacts)
        model = self._knn_model(state)
        features = None
        if model is not None and len(model.pairs) >= self.config.n_train:
            features = encode_features(situation, impute_missing=True)
        return comprehend(
            situation,
            self.config.ruleset,
            model=model,
            features=features,
            n_train=self.config.n_train,
        )

    def situation(self, sid: str) -> SocialSituation:
        with self._lock:
            stored = self.state.situations.get(sid)
            if stored is None:
                raise UnknownSituation(f"situation {sid!r} not found")
            return stored.resolve(self.state.contacts)

    def comprehension_result(self, sid: str) -> ComprehensionResult:
        with self._lock:
            return self._comprehend_state(self.state, sid)

    def projection_result(self, sid: str) -> dict:
        with self._lock:
            situation = self.situation(sid)
            result = self._comprehend_state(self.state, sid)
            impact = assess_value_impact(result.profile, self.config.impact_table)
            priority = predict_priority(self.state.priority_model, result.profile)
            support = agent_loop.assess_support_need(
                self.config.user_model(), situation, impact, priority
            )
            return {
                "situation_id": sid,
                "comprehension": result.to_dict(),
                "impact": impact,
                "priority": priority,
                "priority_model": _serialize_priority_model(self.state.priority_model)["kind"],
                "support": support.to_dict(),
            }

    def agenda(self) -> list[Meeting]:
        with self._lock:
            return [
                Meeting(
                    meeting_id=sid,
                    situation_id=sid,
                    start=stored.cues.start,
                    duration=stored.cues.duration,
                )
                for sid, stored in self.state.situations.items()
            ]

    def conflicts(self) -> list[Conflict]:
        return agent_loop.detect_conflicts(self.agenda())

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def register_contact(self, data: dict) -> str:
        with self._lock:
            contact = SocialRelationship.from_dict(data)
            existing = (
                self.state.contacts.get(contact.contact_id)
                if contact.contact_id in self.state.contacts
                else None
            )
            if existing == contact:
                return contact.contact_id  # idempotent re-registration
            if existing is not None:
                from .errors import DuplicateContactId

                raise DuplicateContactId(
                    f"contact {contact.contact_id!r} already registered with a different payload",
                    field="contact_id",
                )
            self._append("contact_registered", {"contact": contact.to_dict()})
            return contact.contact_id

    def add_situation(self, data: dict) -> dict:
        with self._lock:
            allowed = {"situation_id", "cues", "participant_ids", "label"}
            unknown = sorted(set(data) - allowed)
            if unknown:
                raise ValidationError(f"unknown situation field(s): {', '.join(unknown)}")
            if "cues" not in data:
                raise ValidationError("situation needs cues", field="cues")
            cues = SituationCueSet.from_dict(data["cues"])
            sid = data.get("situation_id") or f"s{len(self.state.situations) + 1}"
            if sid in self.state.situations:
                raise ValidationError(f"situation_id {sid!r} already exists", field="situation_id")
            participant_ids = tuple(data.get("participant_ids", ()))
            for pid in participant_ids:
                if pid not in self.state.contacts:
                    raise UnknownContact(f"contact {pid!r} is not registered")
            stored = StoredSituation(
                situation_id=sid,
                cues=cues,
                participant_ids=participant_ids,
                label=data.get("label", ""),
            )
            self._append("situation_added", {"situation": stored.to_dict()})
            return self.situation(sid).to_dict()

    def suggestion_for(self, conflict_id: str) -> DecisionRecord:
        with self._lock:
            decision_id = f"sug-{conflict_id}"
            if decision_id in self.state.decisions:
                return self.state.decisions[decision_id]
            conflict = next(
                (c for c in self.conflicts() if c.conflict_id == conflict_id), None
            )
            if conflict is None:
                raise UnknownConflict(f"conflict {conflict_id!r} not found")
            results = {}
            priorities = {}
            situations = {}
            for mid in conflict.meeting_ids:  # meeting ids are situation ids
                results[mid] = self._comprehend_state(self.state, mid)
                priorities[mid] = predict_priority(
                    self.state.priority_model, results[mid].profile
                )
                situations[mid] = self.situation(mid)
            meetings = {m.meeting_id: m for m in self.agenda()}
            suggestion = agent_loop.suggest(conflict, priorities, meetings)
            record = DecisionRecord(
                decision_id=suggestion.suggestion_id,
                kind="suggestion",
                suggestion=suggestion,
                situations=situations,
                results=results,
                model_kind=_serialize_priority_model(self.state.priority_model)["kind"],
            )
            self._append("decision_made", {"decision": record.to_dict()})
            return self.state.decisions[record.decision_id]

    def share_decide(
        self, situation_id: str, recipient: str, important_values: Optional[list[str]] = None
    ) -> DecisionRecord:
        with self._lock:
            if recipient not in self.state.contacts:
                raise UnknownContact(f"contact {recipient!r} is not registered")
            situation = self.situation(situation_id)
            decision_id = f"shr-{situation_id}-{recipient}"
            if decision_id in self.state.decisions:
                return self.state.decisions[decision_id]
            result = self._comprehend_state(self.state, situation_id)
            impact = assess_value_impact(result.profile, self.config.impact_table)
            values = frozenset(
                important_values
                if important_values is not None
                else self.config.user_model().important_values
            )
            verdict, driving = agent_loop.share_decision(impact, values)
            share = ShareDecision(
                situation_id=situation_id,
                recipient=recipient,
                decision=verdict,
                driving_values=driving,
            )
            record = DecisionRecord(
                decision_id=decision_id,
                kind="share",
                share=share,
                situations={situation_id: situation},
                results={situation_id: result},
                model_kind=_serialize_priority_model(self.state.priority_model)["kind"],
            )
            self._append("decision_made", {"decision": record.to_dict()})
            return self.state.decisions[decision_id]

    def explanation_for(self, decision_id: str, depth: int) -> explanation.ExplanationNode:
        with self._lock:
            record = self.state.decisions.get(decision_id)
            if record is None:
                raise UnknownDecision(f"decision {decision_id!r} not found")
            knn = self._knn_model()
            features = {
                sid: encode_features(s, impute_missing=True)
                for sid, s in record.situations.items()
                if record.results[sid].source == "learned"
            }
            if record.kind == "suggestion":
                return explanation.explain_suggestion(
                    record.suggestion,
                    record.situations,
                    record.results,
                    self.state.priority_model,
                    self.config.ruleset,
                    depth,
                    knn_model=knn,
                    features=features,
                )
            sid = record.share.situation_id
            return explanation.explain_share(
                record.share,
                record.situations[sid],
                record.results[sid],
                self.config.impact_table,
                self.config.ruleset,
                depth,
                knn_model=knn,
                features=features.get(sid),
            )

    def record_feedback(self, decision_id: str, payload: dict) -> FeedbackRecord:
        with self._lock:
            record = self.state.decisions.get(decision_id)
            if record is None or record.kind != "suggestion":
                raise UnknownSuggestion(f"suggestion {decision_id!r} not found")
            data = dict(payload)
            data.setdefault("suggestion_id", decision_id)
            if data["suggestion_id"] != decision_id:
                raise ValidationError("suggestion_id does not match decision", field="suggestion_id")
            fb = FeedbackRecord.from_dict(data)
            self._append("feedback_recorded", {"feedback": fb.to_dict()})
            return fb

    def apply_feedback(self, targets: Optional[list[str]] = None) -> str:
        """Refit the models fed by feedback; returns the active priority
        model kind."""
        with self._lock:
            self._append(
                "model_refit", {"targets": targets or ["priority", "comprehension"]}
            )
            return _serialize_priority_model(self.state.priority_model)["kind"]

    def feedback(self, decision_id: str, payload: dict) -> dict:
        """Record a verdict and, when it carries corrections, refit."""
        with self._lock:
            fb = self.record_feedback(decision_id, payload)
            refit: list[str] = []
            if fb.corrected_priority is not None:
                refit.append("priority")
            if fb.corrected_profile is not None:
                refit.append("comprehension")
            if refit:
                self.apply_feedback(refit)
            return {"recorded": True, "verdict": fb.verdict, "refit": refit}

    # ------------------------------------------------------------------
    # Elicitation
    # ------------------------------------------------------------------

    def pending_elicitations(self) -> list[agent_loop.ElicitationRequest]:
        with self._lock:
            state = self.state
            situations = {
                sid: stored.resolve(state.contacts) for sid, stored in state.situations.items()
            }
            missing = {sid: detect_missing_fields(s) for sid, s in situations.items()}
            comprehensions = {
                sid: self._comprehend_state(state, sid) for sid in state.situations
            }
            return agent_loop.build_pending_elicitations(
                situations,
                missing,
                comprehensions,
                state.answered_counts,
                state.uncertainty_resolved,
                self.config.tau,
            )

    def answer_elicitation(self, request_id: str, answers: dict) -> dict:
        with self._lock:
            if request_id in self.state.closed_requests:
                raise ClosedRequest(f"request {request_id!r} was already answered")
            request = next(
                (r for r in self.pending_elicitations() if r.request_id == request_id), None
            )
            if request is None:
                raise UnknownRequest(f"request {request_id!r} is not pending")
            self._validate_answers(request, answers)
            self._append(
                "elicitation_answered",
                {
                    "request_id": request_id,
                    "situation_id": request.situation_id,
                    "answers": answers,
                },
            )
            return {"closed": request_id, "situation_id": request.situation_id}

    def _validate_answers(self, request: agent_loop.ElicitationRequest, answers: dict) -> None:
        if not isinstance(answers, dict) or not answers:
            raise ValidationError("answers must be a non-empty object", field="answers")
        listed_fields = set(request.missing)
        listed_dims = {dim for dim, _ in request.uncertainty}
        covered = 0
        for key, value in answers.items():
            match = _PARTICIPANT_PATH.match(key)
            if match and match.group(2) is None:
                # linking a contact covers that slot's missing fields
                if not any(m.startswith(f"{key}.") for m in listed_fields):
                    raise ValidationError(f"{key!r} is not listed on this request", field=key)
                if value not in self.state.contacts:
                    raise UnknownContact(f"contact {value!r} is not registered")
                covered += 1
            elif key in listed_fields:
                _parse_field(key.rsplit(".", 1)[1], value)  # raises RangeError on bad input
                covered += 1
            elif key in listed_dims:
                v = float(value)
                if not comprehension.PROFILE_MIN <= v <= comprehension.PROFILE_MAX:
                    raise RangeError(f"{key}={v} outside [1, 6]", field=key)
                covered += 1
            else:
                raise ValidationError(f"{key!r} is not listed on this request", field=key)
        if covered < 1:
            raise ValidationError("answers must cover at least one listed item")

    # ------------------------------------------------------------------
    # Persistence
    # ------------------------------------------------------------------

    def snapshot(self) -> int:
        with self._lock:
            write_snapshot(self.config.snapshot_path, self.state.to_doc(), self.state.last_seq)
            return self.state.last_seq

    def replayed_state(self) -> AgentState:
        """Fold the full log from scratch (for audits and tests)."""
        with self._lock:
            state = AgentState()
            replay(self.log.events(), self._apply, state)
            return state

    def _append(self, kind: str, payload: dict) -> None:
        event = self.log.append(kind, payload)
        self._apply(self.state, event)

    def close(self) -> None:
        self.log.close()


def _parse_field(field_name: str, value):
    """Validate and convert one relationship field from user input."""
    if field_name == "role":
        return perception._parse_enum(Role, value, "role")
    if field_name == "hierarchy":
        return perception._parse_enum(Hierarchy, value, "hierarchy")
    if field_name in ("contact_frequency", "relationship_quality"):
        if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 7:
            raise RangeError(f"{field_name}={value!r} must be an integer in 1..7", field=field_name)
        return value
    if field_name == "years_known":
        v = float(value)
        if v < 0:
            raise RangeError(f"years_known={v} must be >= 0", field=field_name)
        return v
    raise ValidationError(f"unknown relationship field {field_name!r}", field=field_name)
