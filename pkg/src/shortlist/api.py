"""HTTP/JSON facade over the analysis functions and the session store.

Exact rationals serialize as {"num": str, "den": str, "decimal": str}
with twelve decimal digits, so values round-trip losslessly and stay
readable. Big integers travel as decimal strings. Errors always carry
{"code", "message", "http_status"} with codes from a closed set.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import oracle, session, theory
from .exactmath import decimal_string

DECIMAL_DIGITS = 12

# Resource guard for the exact schedule optimizer, whose dynamic
# program is quadratic in the menu size per interior participant.
SCHEDULE_MENU_CAP = 300
SCHEDULE_PEOPLE_CAP = 12
BORDA_MENU_CAP = 20

ERROR_STATUS = {
    "invalid_params": 400,
    "not_found": 404,
    "wrong_turn": 422,
    "wrong_count": 422,
    "item_not_offered": 422,
    "conflict": 409,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str) -> None:
        if code not in ERROR_STATUS:
            raise ValueError("unknown error code %r" % code)
        super().__init__(message)
        self.code = code
        self.message = message
        self.http_status = ERROR_STATUS[code]


def rational_json(value: Fraction) -> dict[str, str]:
    return {
        "num": str(value.numerator),
        "den": str(value.denominator),
        "decimal": decimal_string(value, DECIMAL_DIGITS),
    }


def rational_from_json(obj: dict[str, str]) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


class CreateSessionBody(BaseModel):
    menu: list[Any]
    participants: list[str]
    schedule_override: Optional[list[int]] = None
    idempotency_token: Optional[str] = None


class SubmitShortlistBody(BaseModel):
    participant_index: int
    item_ids: list[str]
    idempotency_token: Optional[str] = None


def _menu_from_body(raw: Sequence[Any]) -> session.Menu:
    if not raw:
        raise ApiError("invalid_params", "menu must have at least one item")
    if all(isinstance(entry, str) for entry in raw):
        return session.menu_from_labels(list(raw))
    items = []
    for entry in raw:
        if not isinstance(entry, dict) or "item_id" not in entry:
            raise ApiError(
                "invalid_params",
                "menu entries must be labels or {item_id, label} objects",
            )
        label = entry.get("label", entry["item_id"])
        items.append(session.MenuItem(item_id=str(entry["item_id"]), label=str(label)))
    try:
        return session.Menu(items=tuple(items))
    except ValueError as exc:
        raise ApiError("invalid_params", str(exc))


def session_json(state: session.SessionState) -> dict[str, Any]:
    return {
        "session_id": state.session_id,
        "menu": [
            {"item_id": it.item_id, "label": it.label} for it in state.menu.items
        ],
        "participants": list(state.participants),
        "schedule": list(state.schedule.sizes),
        "turn": state.turn,
        "offered": list(state.offered),
        "history": [
            {
                "participant_index": sub.participant_index,
                "item_ids": list(sub.item_ids),
                "timestamp": sub.timestamp,
            }
            for sub in state.history
        ],
        "final_choice": state.final_choice,
        "status": state.status,
    }


def create_app(store: Optional[session.SessionStore] = None) -> FastAPI:
    app = FastAPI(title="shortlist", version="0.1.0", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store if store is not None else session.SessionStore()

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.http_status,
            content={
                "code": exc.code,
                "message": exc.message,
                "http_status": exc.http_status,
            },
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={
                "code": "invalid_params",
                "message": "malformed request: %s" % exc.errors()[:1],
                "http_status": 422,
            },
        )

    @app.get("/healthz")
    async def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.get("/analysis/two-party")
    async def two_party(n: int, k: Optional[int] = None) -> dict[str, Any]:
        if n < 1:
            raise ApiError("invalid_params", "n must be at least 1")
        optimum = theory.optimal_shortlist_size(n)
        k_used = k if k is not None else optimum.canonical
        if not 1 <= k_used <= n:
            raise ApiError("invalid_params", "k must lie in 1..n")
        params = theory.TwoPartyParams(menu_size=n, shortlist_size=k_used)
        report = theory.rank_gap_report(params)
        chooser_worst, both_worst = theory.worst_case_probabilities(params)
        return {
            "menu_size": n,
            "shortlist_size": k_used,
            "expected_chooser_rank": rational_json(report.expected_chooser_rank),
            "expected_proposer_rank": rational_json(report.expected_proposer_rank),
            "expected_total": rational_json(report.expected_total),
            "fairness_gap": rational_json(report.fairness_gap),
            "gap_second_moment": rational_json(report.gap_second_moment),
            "gap_variance": rational_json(report.gap_variance),
            "sigma_bound": report.sigma_bound,
            "chooser_worst_probability": rational_json(chooser_worst),
            "both_worst_probability": rational_json(both_worst),
            "ideal_size": theory.ideal_shortlist_size(n),
            "optimal": {
                "canonical": optimum.canonical,
                "candidates": list(optimum.candidates),
                "tie": optimum.tie,
                "expected_total": rational_json(optimum.expected_total),
            },
        }

    @app.get("/analysis/schedule")
    async def schedule(n: int, s: int) -> dict[str, Any]:
        if n < 1 or s < 1:
            raise ApiError("invalid_params", "n and s must be at least 1")
        if n > SCHEDULE_MENU_CAP or s > SCHEDULE_PEOPLE_CAP:
            raise ApiError(
                "invalid_params",
                "schedule analysis is capped at n <= %d, s <= %d"
                % (SCHEDULE_MENU_CAP, SCHEDULE_PEOPLE_CAP),
            )
        best, report = theory.optimal_integer_schedule(n, s)
        return {
            "menu_size": n,
            "people": s,
            "real_sizes": theory.ideal_schedule(n, s),
            "ideal_common_rank": report.ideal_common_rank,
            "integer": {
                "sizes": list(best.sizes),
                "per_person": [rational_json(v) for v in report.per_person],
                "expected_total": rational_json(report.expected_total),
            },
        }

    @app.get("/analysis/borda")
    async def borda(n: int) -> dict[str, Any]:
        if not 1 <= n <= BORDA_MENU_CAP:
            raise ApiError(
                "invalid_params", "n must lie in 1..%d" % BORDA_MENU_CAP
            )
        result = oracle.borda_oracle(n)
        return {
            "menu_size": n,
            "total_sum": str(result.total_sum),
            "expectation": rational_json(result.expectation),
        }

    @app.post("/sessions", status_code=201)
    async def create_session(body: CreateSessionBody) -> dict[str, Any]:
        menu = _menu_from_body(body.menu)
        try:
            state = app.state.store.create_session(
                menu=menu,
                participants=body.participants,
                schedule_override=body.schedule_override,
                idempotency_token=body.idempotency_token,
            )
        except session.SubmissionConflict as exc:
            raise ApiError("conflict", str(exc))
        except ValueError as exc:
            raise ApiError("invalid_params", str(exc))
        return session_json(state)

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str) -> dict[str, Any]:
        try:
            state = app.state.store.get_session(session_id)
        except session.SessionNotFound as exc:
            raise ApiError("not_found", str(exc))
        return session_json(state)

    @app.post("/sessions/{session_id}/shortlist")
    async def submit_shortlist(
        session_id: str, body: SubmitShortlistBody
    ) -> dict[str, Any]:
        if not body.idempotency_token:
            raise ApiError("invalid_params", "an idempotency token is required")
        try:
            state = app.state.store.submit_shortlist(
                session_id=session_id,
                participant_index=body.participant_index,
                item_ids=body.item_ids,
                idempotency_token=body.idempotency_token,
            )
        except session.SessionNotFound as exc:
            raise ApiError("not_found", str(exc))
        except session.SubmissionConflict as exc:
            raise ApiError("conflict", str(exc))
        except session.WrongTurn as exc:
            raise ApiError("wrong_turn", str(exc))
        except session.WrongCount as exc:
            raise ApiError("wrong_count", str(exc))
        except session.ItemNotOffered as exc:
            raise ApiError("item_not_offered", str(exc))
        except ValueError as exc:
            raise ApiError("invalid_params", str(exc))
        return session_json(state)

    return app


# JSON Schemas for every response body; the test suite validates each
# endpoint's output against these.

RATIONAL_SCHEMA = {
    "type": "object",
    "required": ["num", "den", "decimal"],
    "properties": {
        "num": {"type": "string", "pattern": "^-?[0-9]+$"},
        "den": {"type": "string", "pattern": "^[0-9]+$"},
        "decimal": {"type": "string"},
    },
    "additionalProperties": False,
}

ERROR_SCHEMA = {
    "type": "object",
    "required": ["code", "message", "http_status"],
    "properties": {
        "code": {"enum": sorted(ERROR_STATUS)},
        "message": {"type": "string"},
        "http_status": {"type": "integer"},
    },
    "additionalProperties": False,
}

TWO_PARTY_SCHEMA = {
    "type": "object",
    "required": [
        "menu_size",
        "shortlist_size",
        "expected_chooser_rank",
        "expected_proposer_rank",
        "expected_total",
        "fairness_gap",
        "gap_second_moment",
        "gap_variance",
        "sigma_bound",
        "chooser_worst_probability",
        "both_worst_probability",
        "ideal_size",
        "optimal",
    ],
    "properties": {
        "menu_size": {"type": "integer", "minimum": 1},
        "shortlist_size": {"type": "integer", "minimum": 1},
        "expected_chooser_rank": RATIONAL_SCHEMA,
        "expected_proposer_rank": RATIONAL_SCHEMA,
        "expected_total": RATIONAL_SCHEMA,
        "fairness_gap": RATIONAL_SCHEMA,
        "gap_second_moment": RATIONAL_SCHEMA,
        "gap_variance": RATIONAL_SCHEMA,
        "sigma_bound": {"type": "number"},
        "chooser_worst_probability": RATIONAL_SCHEMA,
        "both_worst_probability": RATIONAL_SCHEMA,
        "ideal_size": {"type": "number"},
        "optimal": {
            "type": "object",
            "required": ["canonical", "candidates", "tie", "expected_total"],
            "properties": {
                "canonical": {"type": "integer"},
                "candidates": {"type": "array", "items": {"type": "integer"}},
                "tie": {"type": "boolean"},
                "expected_total": RATIONAL_SCHEMA,
            },
        },
    },
}

SCHEDULE_SCHEMA = {
    "type": "object",
    "required": ["menu_size", "people", "real_sizes", "ideal_common_rank", "integer"],
    "properties": {
        "menu_size": {"type": "integer"},
        "people": {"type": "integer"},
        "real_sizes": {"type": "array", "items": {"type": "number"}},
        "ideal_common_rank": {"type": "number"},
        "integer": {
            "type": "object",
            "required": ["sizes", "per_person", "expected_total"],
            "properties": {
                "sizes": {"type": "array", "items": {"type": "integer"}},
                "per_person": {"type": "array", "items": RATIONAL_SCHEMA},
                "expected_total": RATIONAL_SCHEMA,
            },
        },
    },
}

BORDA_SCHEMA = {
    "type": "object",
    "required": ["menu_size", "total_sum", "expectation"],
    "properties": {
        "menu_size": {"type": "integer"},
        "total_sum": {"type": "string", "pattern": "^[0-9]+$"},
        "expectation": RATIONAL_SCHEMA,
    },
}

SESSION_SCHEMA = {
    "type": "object",
    "required": [
        "session_id",
        "menu",
        "participants",
        "schedule",
        "turn",
        "offered",
        "history",
        "final_choice",
        "status",
    ],
    "properties": {
        "session_id": {"type": "string", "minLength": 1},
        "menu": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["item_id", "label"],
                "properties": {
                    "item_id": {"type": "string", "minLength": 1},
                    "label": {"type": "string"},
                },
            },
        },
        "participants": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "string"},
        },
        "schedule": {
            "type": "array",
            "minItems": 2,
            "items": {"type": "integer", "minimum": 1},
        },
        "turn": {"type": "integer", "minimum": 0},
        "offered": {"type": "array", "items": {"type": "string"}},
        "history": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["participant_index", "item_ids", "timestamp"],
                "properties": {
                    "participant_index": {"type": "integer", "minimum": 0},
                    "item_ids": {"type": "array", "items": {"type": "string"}},
                    "timestamp": {"type": "string"},
                },
            },
        },
        "final_choice": {"type": ["string", "null"]},
        "status": {"enum": ["awaiting_shortlist", "complete", "aborted"]},
    },
}

HEALTH_SCHEMA = {
    "type": "object",
    "required": ["status"],
    "properties": {"status": {"enum": ["ok"]}},
}
