from __future__ import annotations

from datetime import datetime

import pytest

from ssa.agent import Agent
from ssa.config import AgentConfig
from ssa.perception import (
    ActivityType,
    ContactRegistry,
    Hierarchy,
    LocationType,
    Role,
    SituationCueSet,
    SocialRelationship,
    assemble_situation,
)

C1 = SocialRelationship(
    contact_id="c1",
    role=Role.supervisor,
    hierarchy=Hierarchy.higher,
    contact_frequency=6,
    relationship_quality=5,
    years_known=3.0,
)

C2 = SocialRelationship(
    contact_id="c2",
    role=Role.friend,
    hierarchy=Hierarchy.equal,
    contact_frequency=5,
    relationship_quality=6,
    years_known=10.0,
)


@pytest.fixture
def registry() -> ContactRegistry:
    reg = ContactRegistry()
    reg.register(C1)
    reg.register(C2)
    return reg


@pytest.fixture
def s_work(registry):
    cues = SituationCueSet(
        activity_type=ActivityType.meeting,
        location_type=LocationType.office,
        start=datetime(2026, 3, 2, 10, 0),
        duration=60,
        num_people=2,
    )
    return assemble_situation("s_work", cues, ["c1"], registry, label="work meeting")


@pytest.fixture
def s_dinner(registry):
    cues = SituationCueSet(
        activity_type=ActivityType.dinner,
        location_type=LocationType.restaurant,
        start=datetime(2026, 3, 2, 10, 30),
        duration=90,
        num_people=2,
    )
    return assemble_situation("s_dinner", cues, ["c2"], registry, label="dinner with friend")


@pytest.fixture
def agent(tmp_path):
    """Fresh agent over an empty store; closed after the test."""
    instance = Agent(AgentConfig(store_dir=str(tmp_path)))
    yield instance
    instance.close()


def random_situation(rng, registry: ContactRegistry, index: int):
    """Uniformly random complete situation registered against `registry`."""
    import random as _random

    assert isinstance(rng, _random.Random)
    contact = SocialRelationship(
        contact_id=f"r{index}",
        role=rng.choice(list(Role)),
        hierarchy=rng.choice(list(Hierarchy)),
        contact_frequency=rng.randint(1, 7),
        relationship_quality=rng.randint(1, 7),
        years_known=round(rng.uniform(0, 40), 2),
    )
    registry.register(contact)
    cues = SituationCueSet(
        activity_type=rng.choice(list(ActivityType)),
        location_type=rng.choice(list(LocationType)),
        start=datetime(2026, 1, 1 + rng.randint(0, 27), rng.randint(0, 23), 0),
        duration=rng.randint(5, 600),
        num_people=rng.randint(2, 30),
    )
    return assemble_situation(f"rs{index}", cues, [contact.contact_id], registry)


def seed_work_dinner(agent: Agent) -> None:
    """Populate the overlapping work-meeting / dinner scenario."""
    agent.register_contact(C1.to_dict())
    agent.register_contact(C2.to_dict())
    agent.add_situation(
        {
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
    )
    agent.add_situation(
        {
            "situation_id": "s_dinner",
            "label": "dinner with friend",
            "cues": {
                "activity_type": "dinner",
                "location_type": "restaurant",
                "start": "2026-03-02T10:30:00",
                "duration": 90,
                "num_people": 2,
            },
            "participant_ids": ["c2"],
        }
    )
