"""Record real engine responses as UI test fixtures.

Runs the engine in-process through its HTTP app and writes every response
body the UI suite replays. Re-run after engine changes:

    python3 frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from ssa.agent import Agent
from ssa.config import AgentConfig
from ssa.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

C1 = {
    "contact_id": "c1", "role": "supervisor", "hierarchy": "higher",
    "contact_frequency": 6, "relationship_quality": 5, "years_known": 3.0,
}
C2 = {
    "contact_id": "c2", "role": "friend", "hierarchy": "equal",
    "contact_frequency": 5, "relationship_quality": 6, "years_known": 10.0,
}
C3 = {
    "contact_id": "c3", "role": "supervisor", "hierarchy": "higher",
    "contact_frequency": 4, "relationship_quality": 4, "years_known": 1.0,
}


def _situation(sid, label, activity, location, start, duration, participants):
    return {
        "situation_id": sid,
        "label": label,
        "cues": {
            "activity_type": activity,
            "location_type": location,
            "start": start,
            "duration": duration,
            "num_people": 2,
        },
        "participant_ids": participants,
    }


def _write(name: str, payload) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path.relative_to(FIXTURES.parent)}")


def record_main_scenario() -> None:
    with tempfile.TemporaryDirectory() as store:
        agent = Agent(AgentConfig(store_dir=store))
        client = TestClient(create_app(agent))

        client.post("/contacts", json=C1)
        client.post("/contacts", json=C2)
        client.post("/situations", json=_situation(
            "s_work", "work meeting", "meeting", "office", "2026-03-02T10:00:00", 60, ["c1"]))
        client.post("/situations", json=_situation(
            "s_dinner", "dinner with friend", "dinner", "restaurant",
            "2026-03-02T10:30:00", 90, ["c2"]))

        conflicts = client.get("/agenda/conflicts").json()
        _write("conflicts.json", conflicts)
        cid = conflicts["conflicts"][0]["conflict_id"]
        suggestion = client.get(f"/conflicts/{cid}/suggestion").json()
        _write("suggestion.json", suggestion)
        decision_id = suggestion["decision_id"]
        for depth in (1, 2, 3):
            _write(
                f"explanation_depth{depth}.json",
                client.get(f"/decisions/{decision_id}/explanation?depth={depth}").json(),
            )
        _write(
            "explanation_404.json",
            client.get("/decisions/ghost/explanation?depth=1").json(),
        )

        feedback = client.post(
            f"/decisions/{decision_id}/feedback",
            json={"verdict": "reject", "corrected_priority": 6.0},
        )
        _write("feedback_ok.json", feedback.json())
        bad = client.post(f"/decisions/{decision_id}/feedback", json={"verdict": "reject"})
        assert bad.status_code == 400
        _write("feedback_400.json", bad.json())
        # refreshed board after feedback (decision is stored, so stable)
        _write("conflicts_after_feedback.json", client.get("/agenda/conflicts").json())
        _write("suggestion_after_feedback.json",
               client.get(f"/conflicts/{cid}/suggestion").json())
        agent.close()


def record_low_confidence() -> None:
    with tempfile.TemporaryDirectory() as store:
        agent = Agent(AgentConfig(store_dir=store))
        client = TestClient(create_app(agent))
        client.post("/contacts", json=C1)
        client.post("/contacts", json=C3)
        # two supervisor meetings -> identical profiles, margin 0, tie
        client.post("/situations", json=_situation(
            "s_review", "design review", "meeting", "office", "2026-03-03T09:00:00", 60, ["c1"]))
        client.post("/situations", json=_situation(
            "s_sync", "planning sync", "meeting", "online", "2026-03-03T09:30:00", 60, ["c3"]))
        conflicts = client.get("/agenda/conflicts").json()
        _write("conflicts_low.json", conflicts)
        cid = conflicts["conflicts"][0]["conflict_id"]
        _write("suggestion_low.json", client.get(f"/conflicts/{cid}/suggestion").json())
        agent.close()


def record_elicitation() -> None:
    with tempfile.TemporaryDirectory() as store:
        agent = Agent(AgentConfig(store_dir=store))
        client = TestClient(create_app(agent))
        client.post("/contacts", json=C2)
        client.post("/situations", json=_situation(
            "s_lunch", "lunch, unknown companion", "dinner", "restaurant",
            "2026-03-04T12:00:00", 45, []))
        pending = client.get("/elicitation/pending").json()
        _write("pending.json", pending)
        request_id = pending["pending"][0]["request_id"]
        answered = client.post(
            f"/elicitation/{request_id}/answers",
            json={"answers": {"participants[0]": "c2"}},
        )
        _write("answer_ok.json", answered.json())
        _write("pending_empty.json", client.get("/elicitation/pending").json())
        closed = client.post(
            f"/elicitation/{request_id}/answers",
            json={"answers": {"participants[0]": "c2"}},
        )
        assert closed.status_code == 409
        _write("answer_409.json", closed.json())
        agent.close()


if __name__ == "__main__":
    FIXTURES.mkdir(parents=True, exist_ok=True)
    record_main_scenario()
    record_low_confidence()
    record_elicitation()
