"""HTTP/1.1 JSON API over the agent.

One agent instance backs the app; mutating requests are serialized by the
agent's internal lock, reads are served from consistent state. Errors map
to 400 (validation), 404 (unknown id), 409 (closed request) with a body
of the form ``{"error_code", "message", "field"?}``.
"""

from __future__ import annotations

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .agent import Agent
from .errors import (
    ClosedRequest,
    SsaError,
    StorageError,
    UnknownConflict,
    UnknownContact,
    UnknownDecision,
    UnknownRequest,
    UnknownSituation,
    UnknownSuggestion,
    ValidationError,
)
from .explanation import load_template_catalog, render_text

_NOT_FOUND = (
    UnknownContact,
    UnknownSituation,
    UnknownConflict,
    UnknownRequest,
    UnknownSuggestion,
    UnknownDecision,
)


def _status_for(exc: SsaError) -> int:
    if isinstance(exc, ClosedRequest):
        return 409
    if isinstance(exc, _NOT_FOUND):
        return 404
    if isinstance(exc, ValidationError):
        return 400
    if isinstance(exc, StorageError):
        return 500
    return 500


def create_app(agent: Agent) -> FastAPI:
    app = FastAPI(title="ssa-agent", docs_url=None, redoc_url=None)
    catalog = load_template_catalog()

    @app.exception_handler(SsaError)
    async def ssa_error_handler(request: Request, exc: SsaError):
        return JSONResponse(status_code=_status_for(exc), content=exc.to_dict())

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error_code": "validation_error", "message": str(exc.errors()[:1])},
        )

    @app.post("/contacts")
    def register_contact(payload: dict = Body(...)):
        contact_id = agent.register_contact(payload)
        return {"contact_id": contact_id}

    @app.get("/contacts")
    def list_contacts():
        return {"contacts": [c.to_dict() for c in agent.state.contacts.all()]}

    @app.post("/situations")
    def add_situation(payload: dict = Body(...)):
        return agent.add_situation(payload)

    @app.get("/situations/{sid}")
    def get_situation(sid: str):
        return agent.situation(sid).to_dict()

    @app.get("/situations/{sid}/profile")
    def get_profile(sid: str):
        result = agent.comprehension_result(sid)
        return {"situation_id": sid, **result.to_dict()}

    @app.get("/situations/{sid}/projection")
    def get_projection(sid: str):
        return agent.projection_result(sid)

    @app.get("/agenda/conflicts")
    def get_conflicts():
        return {"conflicts": [c.to_dict() for c in agent.conflicts()]}

    @app.get("/conflicts/{conflict_id}/suggestion")
    def get_suggestion(conflict_id: str):
        record = agent.suggestion_for(conflict_id)
        return {"decision_id": record.decision_id, **record.suggestion.to_dict()}

    @app.get("/decisions/{decision_id}/explanation")
    def get_explanation(decision_id: str, depth: int = 1):
        node = agent.explanation_for(decision_id, depth)
        return {
            "decision_id": decision_id,
            "depth": depth,
            "explanation": node.to_dict(),
            "rendered": render_text(node, catalog),
        }

    @app.post("/decisions/{decision_id}/feedback")
    def post_feedback(decision_id: str, payload: dict = Body(...)):
        return agent.feedback(decision_id, payload)

    @app.get("/elicitation/pending")
    def pending():
        return {"pending": [r.to_dict() for r in agent.pending_elicitations()]}

    @app.post("/elicitation/{request_id}/answers")
    def answer(request_id: str, payload: dict = Body(...)):
        answers = payload.get("answers", payload)
        return agent.answer_elicitation(request_id, answers)

    @app.post("/sharing/decide")
    def share_decide(payload: dict = Body(...)):
        allowed = {"situation_id", "recipient", "important_values"}
        unknown = sorted(set(payload) - allowed)
        if unknown:
            raise ValidationError(f"unknown field(s): {', '.join(unknown)}", field=unknown[0])
        for key in ("situation_id", "recipient"):
            if key not in payload:
                raise ValidationError(f"{key} is required", field=key)
        record = agent.share_decide(
            payload["situation_id"], payload["recipient"], payload.get("important_values")
        )
        return {"decision_id": record.decision_id, **record.share.to_dict()}

    return app
