"""Agent configuration.

A single JSON document controls where state lives and the knobs of the
pipeline: elicitation threshold, kNN neighborhood size, the rules/learned
arbitration threshold, and optional paths to a custom ruleset and impact
table. The profile and priority scales are part of the engine's contract;
the config records them so a mismatched deployment fails loudly instead
of silently rescaling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .agent_loop import DEFAULT_ELICITATION_THRESHOLD, UserModel
from .comprehension import DEFAULT_N_TRAIN, DEFAULT_RULESET, PROFILE_MAX, PROFILE_MIN, RuleSet
from .errors import ValidationError
from .projection import (
    DEFAULT_IMPACT_TABLE,
    PRIORITY_MAX,
    PRIORITY_MIN,
    ImpactRule,
    load_impact_table,
)

CONFIG_FILENAME = "config.json"
LOG_FILENAME = "events.ndjson"
SNAPSHOT_FILENAME = "snapshot.json"

_ALLOWED_KEYS = {
    "store_dir",
    "ruleset_path",
    "impact_table_path",
    "tau",
    "k",
    "n_train",
    "profile_scale",
    "priority_scale",
    "important_values",
    "preference_bands",
}


@dataclass
class AgentConfig:
    store_dir: str = "."
    ruleset_path: str | None = None
    impact_table_path: str | None = None
    tau: float = DEFAULT_ELICITATION_THRESHOLD
    k: int = 5
    n_train: int = DEFAULT_N_TRAIN
    important_values: tuple[str, ...] = ()
    preference_bands: tuple[tuple[dict, tuple[float, float]], ...] = ()

    ruleset: RuleSet = field(default=DEFAULT_RULESET)
    impact_table: tuple[ImpactRule, ...] = field(default=DEFAULT_IMPACT_TABLE)

    def __post_init__(self):
        if self.tau <= 0:
            raise ValidationError("tau must be > 0", field="tau")
        if self.k < 1:
            raise ValidationError("k must be >= 1", field="k")
        if self.n_train < 1:
            raise ValidationError("n_train must be >= 1", field="n_train")
        if self.ruleset_path:
            self.ruleset = RuleSet.from_json(Path(self.ruleset_path).read_text("utf-8"))
        if self.impact_table_path:
            self.impact_table = load_impact_table(
                Path(self.impact_table_path).read_text("utf-8")
            )

    def user_model(self) -> UserModel:
        return UserModel(
            important_values=frozenset(self.important_values),
            behavior_preferences=self.preference_bands,
            elicitation_threshold=self.tau,
        )

    @property
    def log_path(self) -> Path:
        return Path(self.store_dir) / LOG_FILENAME

    @property
    def snapshot_path(self) -> Path:
        return Path(self.store_dir) / SNAPSHOT_FILENAME

    def to_dict(self) -> dict:
        return {
            "store_dir": self.store_dir,
            "ruleset_path": self.ruleset_path,
            "impact_table_path": self.impact_table_path,
            "tau": self.tau,
            "k": self.k,
            "n_train": self.n_train,
            "profile_scale": [PROFILE_MIN, PROFILE_MAX],
            "priority_scale": [PRIORITY_MIN, PRIORITY_MAX],
            "important_values": list(self.important_values),
            "preference_bands": [
                [clause, list(band)] for clause, band in self.preference_bands
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AgentConfig":
        unknown = sorted(set(doc) - _ALLOWED_KEYS)
        if unknown:
            raise ValidationError(f"unknown config key(s): {', '.join(unknown)}")
        for key, expected in (
            ("profile_scale", [PROFILE_MIN, PROFILE_MAX]),
            ("priority_scale", [PRIORITY_MIN, PRIORITY_MAX]),
        ):
            if key in doc and list(doc[key]) != expected:
                raise ValidationError(
                    f"{key}={doc[key]} unsupported; engine scale is {expected}", field=key
                )
        bands = tuple(
            (dict(clause), (float(band[0]), float(band[1])))
            for clause, band in doc.get("preference_bands", [])
        )
        return cls(
            store_dir=doc.get("store_dir", "."),
            ruleset_path=doc.get("ruleset_path"),
            impact_table_path=doc.get("impact_table_path"),
            tau=doc.get("tau", DEFAULT_ELICITATION_THRESHOLD),
            k=doc.get("k", 5),
            n_train=doc.get("n_train", DEFAULT_N_TRAIN),
            important_values=tuple(doc.get("important_values", ())),
            preference_bands=bands,
        )

    @classmethod
    def load(cls, path: str | Path) -> "AgentConfig":
        doc = json.loads(Path(path).read_text("utf-8"))
        return cls.from_dict(doc)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
