"""Level 1: perceive social situations.

Builds the two-part representation of a social situation — environmental
cues plus the social-background features of the people involved — and
encodes complete situations as fixed-width feature vectors for the
learners downstream.

Cue and relationship enumerations are a configurable stand-in for a
richer ontology; the encoding layout is versioned through
``ENCODING_MANIFEST`` so any schema change is explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from typing import Iterable, Optional

from .errors import (
    DuplicateContactId,
    InvalidCues,
    MissingField,
    RangeError,
    UnknownContact,
    ValidationError,
)


class Role(str, Enum):
    friend = "friend"
    family = "family"
    colleague = "colleague"
    supervisor = "supervisor"
    subordinate = "subordinate"
    client = "client"
    romantic_partner = "romantic_partner"
    acquaintance = "acquaintance"
    stranger = "stranger"


class Hierarchy(str, Enum):
    higher = "higher"
    equal = "equal"
    lower = "lower"


class ActivityType(str, Enum):
    meeting = "meeting"
    dinner = "dinner"
    party = "party"
    call = "call"
    errand = "errand"
    date = "date"
    other = "other"


class LocationType(str, Enum):
    office = "office"
    home = "home"
    restaurant = "restaurant"
    public_venue = "public_venue"
    online = "online"
    other = "other"


ORDINAL_MIN, ORDINAL_MAX = 1, 7

# Scaling caps recorded in the encoding manifest: typical values land
# mid-range.
YEARS_CAP = 20.0
DURATION_CAP = 240.0
NUM_PEOPLE_CAP = 10.0

ENCODING_MANIFEST = "ssa-enc-1"


def _check_ordinal(name: str, value: Optional[int]) -> Optional[int]:
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        raise RangeError(f"{name} must be an integer in 1..7", field=name)
    if not ORDINAL_MIN <= value <= ORDINAL_MAX:
        raise RangeError(f"{name}={value} outside 1..7", field=name)
    return value


@dataclass(frozen=True)
class SocialRelationship:
    """Stable social-background features for one contact.

    All descriptive fields are optional: contacts may be registered with
    partial information and completed later through elicitation.  Any
    value that is present must pass its range check.
    """

    contact_id: str
    role: Optional[Role] = None
    hierarchy: Optional[Hierarchy] = None
    contact_frequency: Optional[int] = None  # ordinal 1..7
    relationship_quality: Optional[int] = None  # ordinal 1..7
    years_known: Optional[float] = None

    def __post_init__(self):
        if not self.contact_id:
            raise ValidationError("contact_id must be non-empty", field="contact_id")
        _check_ordinal("contact_frequency", self.contact_frequency)
        _check_ordinal("relationship_quality", self.relationship_quality)
        if self.years_known is not None and self.years_known < 0:
            raise RangeError(
                f"years_known={self.years_known} must be >= 0", field="years_known"
            )

    FIELDS = ("role", "hierarchy", "contact_frequency", "relationship_quality", "years_known")

    def missing_fields(self) -> list[str]:
        return [name for name in self.FIELDS if getattr(self, name) is None]

    def to_dict(self) -> dict:
        return {
            "contact_id": self.contact_id,
            "role": self.role.value if self.role else None,
            "hierarchy": self.hierarchy.value if self.hierarchy else None,
            "contact_frequency": self.contact_frequency,
            "relationship_quality": self.relationship_quality,
            "years_known": self.years_known,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SocialRelationship":
        _reject_unknown(data, {"contact_id", *cls.FIELDS}, "contact")
        if "contact_id" not in data:
            raise ValidationError("contact_id is required", field="contact_id")
        return cls(
            contact_id=data["contact_id"],
            role=_parse_enum(Role, data.get("role"), "role"),
            hierarchy=_parse_enum(Hierarchy, data.get("hierarchy"), "hierarchy"),
            contact_frequency=data.get("contact_frequency"),
            relationship_quality=data.get("relationship_quality"),
            years_known=data.get("years_known"),
        )


@dataclass(frozen=True)
class SituationCueSet:
    """Directly observable situational elements."""

    activity_type: ActivityType
    location_type: LocationType
    start: datetime
    duration: float  # minutes
    num_people: int

    def __post_init__(self):
        if self.duration <= 0:
            raise InvalidCues(f"duration={self.duration} must be > 0", field="duration")
        if self.num_people < 1:
            raise InvalidCues(
                f"num_people={self.num_people} must be >= 1", field="num_people"
            )

    def to_dict(self) -> dict:
        return {
            "activity_type": self.activity_type.value,
            "location_type": self.location_type.value,
            "start": self.start.isoformat(),
            "duration": self.duration,
            "num_people": self.num_people,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SituationCueSet":
        required = {"activity_type", "location_type", "start", "duration", "num_people"}
        _reject_unknown(data, required, "cues")
        for name in required:
            if name not in data:
                raise ValidationError(f"cues missing required field {name}", field=name)
        try:
            start = datetime.fromisoformat(data["start"])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"start is not an ISO timestamp: {exc}", field="start")
        return cls(
            activity_type=_parse_enum(ActivityType, data["activity_type"], "activity_type"),
            location_type=_parse_enum(LocationType, data["location_type"], "location_type"),
            start=start,
            duration=data["duration"],
            num_people=data["num_people"],
        )


@dataclass(frozen=True)
class SocialSituation:
    """Level-1 record: cues plus resolved participant relationships."""

    situation_id: str
    cues: SituationCueSet
    participants: tuple[SocialRelationship, ...] = ()
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "situation_id": self.situation_id,
            "cues": self.cues.to_dict(),
            "participants": [p.to_dict() for p in self.participants],
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SocialSituation":
        _reject_unknown(data, {"situation_id", "cues", "participants", "label"}, "situation")
        return cls(
            situation_id=data["situation_id"],
            cues=SituationCueSet.from_dict(data["cues"]),
            participants=tuple(
                SocialRelationship.from_dict(p) for p in data.get("participants", [])
            ),
            label=data.get("label", ""),
        )


def _parse_enum(enum_cls, raw, field_name: str):
    if raw is None:
        return None
    if isinstance(raw, enum_cls):
        return raw
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ValidationError(
            f"{field_name}={raw!r} not one of: {allowed}", field=field_name
        )


def _reject_unknown(data: dict, allowed: set, ctx: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValidationError(f"unknown {ctx} field(s): {', '.join(unknown)}", field=unknown[0])


class ContactRegistry:
    """Social background model: the user's registered contacts."""

    def __init__(self, contacts: Optional[dict[str, SocialRelationship]] = None):
        self._contacts: dict[str, SocialRelationship] = dict(contacts or {})

    def register(self, relationship: SocialRelationship) -> str:
        """Store a contact. Re-registering an identical record is a no-op;
        a different payload under an existing id raises DuplicateContactId.
        """
        existing = self._contacts.get(relationship.contact_id)
        if existing is not None and existing != relationship:
            raise DuplicateContactId(
                f"contact {relationship.contact_id!r} already registered with a "
                "different payload",
                field="contact_id",
            )
        self._contacts[relationship.contact_id] = relationship
        return relationship.contact_id

    def get(self, contact_id: str) -> SocialRelationship:
        try:
            return self._contacts[contact_id]
        except KeyError:
            raise UnknownContact(f"contact {contact_id!r} is not registered")

    def update_fields(self, contact_id: str, **updates) -> SocialRelationship:
        updated = replace(self.get(contact_id), **updates)
        self._contacts[contact_id] = updated
        return updated

    def __contains__(self, contact_id: str) -> bool:
        return contact_id in self._contacts

    def __len__(self) -> int:
        return len(self._contacts)

    def all(self) -> list[SocialRelationship]:
        return list(self._contacts.values())


def assemble_situation(
    situation_id: str,
    cues: SituationCueSet,
    participant_ids: Iterable[str],
    registry: ContactRegistry,
    label: str = "",
) -> SocialSituation:
    """Resolve participant ids against the registry and build the Level-1
    record. Contacts are referenced, never mutated."""
    participants = tuple(registry.get(pid) for pid in participant_ids)
    return SocialSituation(
        situation_id=situation_id, cues=cues, participants=participants, label=label
    )


def detect_missing_fields(situation: SocialSituation) -> list[str]:
    """List the mandatory fields that are absent or unknown.

    A situation with more than one person present must have at least the
    focal participant resolved; every listed participant must have all
    relationship features filled in. Returns [] iff the situation is
    complete.
    """
    missing: list[str] = []
    if situation.cues.num_people >= 2 and not situation.participants:
        missing.extend(f"participants[0].{name}" for name in SocialRelationship.FIELDS)
        return missing
    for i, participant in enumerate(situation.participants):
        missing.extend(f"participants[{i}].{name}" for name in participant.missing_fields())
    return missing


# ---------------------------------------------------------------------------
# Feature encoding
# ---------------------------------------------------------------------------

_ACTIVITY_FEATURES = tuple(f"activity={m.value}" for m in ActivityType)
_LOCATION_FEATURES = tuple(f"location={m.value}" for m in LocationType)
_ROLE_FEATURES = tuple(f"role={m.value}" for m in Role)
_HIERARCHY_FEATURES = tuple(f"hierarchy={m.value}" for m in Hierarchy)

FEATURE_NAMES: tuple[str, ...] = (
    *_ACTIVITY_FEATURES,
    *_LOCATION_FEATURES,
    "start_hour",
    "duration",
    "num_people",
    *_ROLE_FEATURES,
    *_HIERARCHY_FEATURES,
    "contact_frequency",
    "relationship_quality",
    "years_known",
)

FEATURE_COUNT = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    """Ordered (name, value) pairs under a fixed encoding manifest."""

    values: tuple[float, ...]
    names: tuple[str, ...] = FEATURE_NAMES
    manifest: str = ENCODING_MANIFEST

    def __post_init__(self):
        if len(self.values) != len(self.names):
            raise ValidationError(
                f"feature vector has {len(self.values)} values for "
                f"{len(self.names)} names"
            )

    def items(self) -> list[tuple[str, float]]:
        return list(zip(self.names, self.values))

    def to_dict(self) -> dict:
        return {"manifest": self.manifest, "values": [list(p) for p in self.items()]}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        _reject_unknown(data, {"manifest", "values"}, "feature vector")
        pairs = data["values"]
        return cls(
            values=tuple(float(v) for _, v in pairs),
            names=tuple(str(n) for n, _ in pairs),
            manifest=data["manifest"],
        )


def _one_hot(features: tuple[str, ...], selected: Optional[str]) -> list[float]:
    if selected is None:
        # Midpoint imputation spreads unit mass uniformly so the group
        # still sums to 1.
        return [1.0 / len(features)] * len(features)
    return [1.0 if name.split("=", 1)[1] == selected else 0.0 for name in features]


def _scale_ordinal(value: Optional[int]) -> float:
    if value is None:
        return 0.5
    return (value - 1) / 6.0


def encode_features(situation: SocialSituation, impute_missing: bool = False) -> FeatureVector:
    """Encode a situation as a fixed-width vector (manifest ``ssa-enc-1``).

    One-hot for enums; ordinals scaled by (v-1)/6; years_known capped at 20
    years, duration at 240 minutes, num_people at 10. Multi-participant
    situations encode the focal (first) participant plus num_people.

    Strict by default: raises MissingField if the situation is incomplete.
    With ``impute_missing`` unknown values take scale midpoints (one-hot
    groups become uniform).
    """
    missing = detect_missing_fields(situation)
    if missing and not impute_missing:
        raise MissingField(
            f"situation {situation.situation_id!r} is incomplete: {', '.join(missing)}",
            field=missing[0],
        )
    cues = situation.cues
    focal = situation.participants[0] if situation.participants else None

    values: list[float] = []
    values.extend(_one_hot(_ACTIVITY_FEATURES, cues.activity_type.value))
    values.extend(_one_hot(_LOCATION_FEATURES, cues.location_type.value))
    values.append(cues.start.hour / 23.0)
    values.append(min(cues.duration / DURATION_CAP, 1.0))
    values.append(min(cues.num_people / NUM_PEOPLE_CAP, 1.0))
    values.extend(_one_hot(_ROLE_FEATURES, focal.role.value if focal and focal.role else None))
    values.extend(
        _one_hot(_HIERARCHY_FEATURES, focal.hierarchy.value if focal and focal.hierarchy else None)
    )
    values.append(_scale_ordinal(focal.contact_frequency if focal else None))
    values.append(_scale_ordinal(focal.relationship_quality if focal else None))
    if focal is not None and focal.years_known is not None:
        values.append(min(focal.years_known / YEARS_CAP, 1.0))
    else:
        values.append(0.5)
    return FeatureVector(values=tuple(values))
