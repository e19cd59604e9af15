from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from ssa.agent import Agent
from ssa.config import AgentConfig
from ssa.service import create_app

from conftest import seed_work_dinner

WORK_SITUATION = {
    "situation_id": "s_work",
    "label": "work meeting",
    "cues": {
        "activity_type": "meeting",
        "location_type": "office",
        "start": "2026-03-02T10:00:00",
        "duration": 60,
        "num_people": 2,
    },
    "participant_ids": ["c1"],
}

C1_PAYLOAD = {
    "contact_id": "c1",
    "role": "supervisor",
    "hierarchy": "higher",
    "contact_frequency": 6,
    "relationship_quality": 5,
    "years_known": 3.0,
}


@pytest.fixture
def client(tmp_path):
    agent = Agent(AgentConfig(store_dir=str(tmp_path)))
    with TestClient(create_app(agent)) as c:
        c.agent = agent
        yield c
    agent.close()


@pytest.fixture
def seeded_client(client):
    seed_work_dinner(client.agent)
    return client


class TestContacts:
    def test_register_and_list(self, client):
        response = client.post("/contacts", json=C1_PAYLOAD)
        assert response.status_code == 200
        assert response.json() == {"contact_id": "c1"}
        listed = client.get("/contacts").json()["contacts"]
        assert [c["contact_id"] for c in listed] == ["c1"]

    def test_validation_error_body(self, client):
        response = client.post("/contacts", json={**C1_PAYLOAD, "relationship_quality": 9})
        assert response.status_code == 400
        body = response.json()
        assert body["error_code"] == "range_error"
        assert body["field"] == "relationship_quality"
        assert "message" in body

    def test_unknown_field_rejected(self, client):
        response = client.post("/contacts", json={**C1_PAYLOAD, "nickname": "boss"})
        assert response.status_code == 400


class TestSituations:
    def test_add_and_fetch(self, client):
        client.post("/contacts", json=C1_PAYLOAD)
        response = client.post("/situations", json=WORK_SITUATION)
        assert response.status_code == 200
        fetched = client.get("/situations/s_work")
        assert fetched.status_code == 200
        assert fetched.json()["cues"]["activity_type"] == "meeting"

    def test_unknown_participant_404(self, client):
        response = client.post("/situations", json=WORK_SITUATION)
        assert response.status_code == 404
        assert response.json()["error_code"] == "unknown_contact"

    def test_unknown_situation_404(self, client):
        assert client.get("/situations/nope").status_code == 404

    def test_profile_endpoint(self, seeded_client):
        body = seeded_client.get("/situations/s_work/profile").json()
        assert body["profile"]["duty"] == 5.5
        assert body["source"] == "rules"
        assert body["trace"] == ["R1", "R3", "R4"]

    def test_projection_endpoint(self, seeded_client):
        body = seeded_client.get("/situations/s_dinner/projection").json()
        assert body["priority"] == pytest.approx(2.2)
        assert body["impact"] == {"social_recognition": 1, "hedonism": 1}
        assert body["priority_model"] == "default_formula"


class TestConflictFlow:
    def test_conflicts_and_suggestion(self, seeded_client):
        conflicts = seeded_client.get("/agenda/conflicts").json()["conflicts"]
        assert len(conflicts) == 1
        cid = conflicts[0]["conflict_id"]
        suggestion = seeded_client.get(f"/conflicts/{cid}/suggestion").json()
        assert suggestion["keep"] == "s_work"
        assert suggestion["low_confidence"] is False
        # idempotent: same decision on repeat
        again = seeded_client.get(f"/conflicts/{cid}/suggestion").json()
        assert again == suggestion

    def test_unknown_conflict_404(self, seeded_client):
        assert seeded_client.get("/conflicts/cf-x-y/suggestion").status_code == 404

    def test_explanation_depths(self, seeded_client):
        cid = seeded_client.get("/agenda/conflicts").json()["conflicts"][0]["conflict_id"]
        decision_id = seeded_client.get(f"/conflicts/{cid}/suggestion").json()["decision_id"]
        shallow = seeded_client.get(f"/decisions/{decision_id}/explanation?depth=1").json()
        deep = seeded_client.get(f"/decisions/{decision_id}/explanation?depth=3").json()
        assert shallow["explanation"]["child"] is None
        assert deep["explanation"]["child"]["child"]["level"] == "L1_evidence"
        assert deep["rendered"][: len(shallow["rendered"])] == shallow["rendered"]

    def test_invalid_depth_400(self, seeded_client):
        cid = seeded_client.get("/agenda/conflicts").json()["conflicts"][0]["conflict_id"]
        decision_id = seeded_client.get(f"/conflicts/{cid}/suggestion").json()["decision_id"]
        assert (
            seeded_client.get(f"/decisions/{decision_id}/explanation?depth=4").status_code == 400
        )

    def test_unknown_decision_404(self, seeded_client):
        assert seeded_client.get("/decisions/nope/explanation").status_code == 404

    def test_feedback_retrains(self, seeded_client):
        cid = seeded_client.get("/agenda/conflicts").json()["conflicts"][0]["conflict_id"]
        decision_id = seeded_client.get(f"/conflicts/{cid}/suggestion").json()["decision_id"]
        response = seeded_client.post(
            f"/decisions/{decision_id}/feedback",
            json={"verdict": "reject", "corrected_priority": 6.0},
        )
        assert response.status_code == 200
        assert response.json()["refit"] == ["priority"]
        projection = seeded_client.get("/situations/s_dinner/projection").json()
        assert projection["priority"] == 6.0
        assert projection["priority_model"] == "knn"

    def test_feedback_out_of_range_400(self, seeded_client):
        cid = seeded_client.get("/agenda/conflicts").json()["conflicts"][0]["conflict_id"]
        decision_id = seeded_client.get(f"/conflicts/{cid}/suggestion").json()["decision_id"]
        response = seeded_client.post(
            f"/decisions/{decision_id}/feedback",
            json={"verdict": "reject", "corrected_priority": 9},
        )
        assert response.status_code == 400
        assert response.json()["error_code"] == "invalid_correction"

    def test_feedback_unknown_decision_404(self, seeded_client):
        response = seeded_client.post(
            "/decisions/nope/feedback", json={"verdict": "accept"}
        )
        assert response.status_code == 404


class TestElicitationFlow:
    def _add_bare_situation(self, client):
        client.post(
            "/situations",
            json={
                "situation_id": "s_bare",
                "cues": {
                    "activity_type": "meeting",
                    "location_type": "office",
                    "start": "2026-03-03T09:00:00",
                    "duration": 30,
                    "num_people": 2,
                },
            },
        )

    def test_pending_for_missing_participant(self, client):
        self._add_bare_situation(client)
        pending = client.get("/elicitation/pending").json()["pending"]
        assert len(pending) == 1
        assert "participants[0].role" in pending[0]["missing"]

    def test_answer_closes_request(self, client):
        client.post("/contacts", json=C1_PAYLOAD)
        self._add_bare_situation(client)
        request_id = client.get("/elicitation/pending").json()["pending"][0]["request_id"]
        response = client.post(
            f"/elicitation/{request_id}/answers", json={"answers": {"participants[0]": "c1"}}
        )
        assert response.status_code == 200
        assert client.get("/elicitation/pending").json()["pending"] == []

    def test_answer_closed_request_409(self, client):
        client.post("/contacts", json=C1_PAYLOAD)
        self._add_bare_situation(client)
        request_id = client.get("/elicitation/pending").json()["pending"][0]["request_id"]
        client.post(f"/elicitation/{request_id}/answers", json={"participants[0]": "c1"})
        response = client.post(
            f"/elicitation/{request_id}/answers", json={"participants[0]": "c1"}
        )
        assert response.status_code == 409
        assert response.json()["error_code"] == "closed_request"

    def test_answer_unknown_request_404(self, client):
        response = client.post("/elicitation/elq-x-0/answers", json={"duty": 3})
        assert response.status_code == 404

    def test_out_of_range_answer_400(self, client):
        self._add_bare_situation(client)
        request_id = client.get("/elicitation/pending").json()["pending"][0]["request_id"]
        response = client.post(
            f"/elicitation/{request_id}/answers",
            json={"participants[0].relationship_quality": 9},
        )
        assert response.status_code == 400


class TestSharing:
    def test_share_promoted_important_value(self, seeded_client):
        response = seeded_client.post(
            "/sharing/decide",
            json={
                "situation_id": "s_dinner",
                "recipient": "c2",
                "important_values": ["social_recognition"],
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["decision"] == "share"
        assert body["driving_values"] == ["social_recognition"]
        # decision is explorable
        explanation = seeded_client.get(
            f"/decisions/{body['decision_id']}/explanation?depth=2"
        ).json()
        cited = [s["facts"]["dimension"] for s in explanation["explanation"]["child"]["statements"]]
        assert "sociality" in cited

    def test_withhold_without_promotion(self, seeded_client):
        response = seeded_client.post(
            "/sharing/decide",
            json={"situation_id": "s_work", "recipient": "c1", "important_values": ["health"]},
        )
        assert response.json()["decision"] == "withhold"

    def test_unknown_recipient_404(self, seeded_client):
        response = seeded_client.post(
            "/sharing/decide", json={"situation_id": "s_work", "recipient": "ghost"}
        )
        assert response.status_code == 404

    def test_missing_field_400(self, seeded_client):
        assert (
            seeded_client.post("/sharing/decide", json={"recipient": "c1"}).status_code == 400
        )
