"""Live narrowing sessions: a real group whittling a real menu.

State is event-sourced. Every mutation first validates against the
current state, then appends one or two events (a submission that fills
the last slot also emits a completion event), then folds them in; the
live state is therefore always the fold of the log, and replaying a
persisted log reproduces it field for field, timestamps included.

`turn` counts completed submissions, so it doubles as the index of the
participant who moves next (participants are numbered from 0). The
offered set always has exactly `schedule.sizes[turn]` items; the
participant at `turn` must submit `schedule.sizes[turn + 1]` of them.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .theory import (
    MultiPartyReport,
    ShortlistSchedule,
    optimal_integer_schedule,
    schedule_report,
)

AWAITING = "awaiting_shortlist"
COMPLETE = "complete"
ABORTED = "aborted"


class SessionError(Exception):
    """Base for all protocol-rule violations."""


class SessionNotFound(SessionError):
    pass


class WrongTurn(SessionError):
    pass


class WrongCount(SessionError):
    pass


class ItemNotOffered(SessionError):
    pass


class SubmissionConflict(SessionError):
    """The targeted slot was already filled, or a token was reused
    with different arguments. Exactly one submission per slot wins."""


class SessionNotComplete(SessionError):
    pass


@dataclass(frozen=True)
class MenuItem:
    item_id: str
    label: str


@dataclass(frozen=True)
class Menu:
    items: tuple[MenuItem, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("menu must have at least one item")
        ids = [it.item_id for it in self.items]
        if any(not isinstance(i, str) or not i for i in ids):
            raise ValueError("item ids must be non-empty strings")
        if len(set(ids)) != len(ids):
            raise ValueError("item ids must be unique")

    @property
    def size(self) -> int:
        return len(self.items)

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(it.item_id for it in self.items)

    def position_of(self, item_id: str) -> int:
        for pos, it in enumerate(self.items):
            if it.item_id == item_id:
                return pos
        raise KeyError(item_id)


def menu_from_labels(labels: Sequence[str]) -> Menu:
    """Menu with generated ids item-1, item-2, ... in label order."""
    return Menu(
        items=tuple(
            MenuItem(item_id="item-%d" % (i + 1), label=str(label))
            for i, label in enumerate(labels)
        )
    )


@dataclass(frozen=True)
class Submission:
    participant_index: int
    item_ids: tuple[str, ...]
    timestamp: str


@dataclass(frozen=True)
class SessionState:
    session_id: str
    menu: Menu
    participants: tuple[str, ...]
    schedule: ShortlistSchedule
    turn: int
    offered: tuple[str, ...]
    history: tuple[Submission, ...]
    final_choice: Optional[str]
    status: str


@dataclass(frozen=True)
class SessionEvent:
    session_id: str
    seq: int
    kind: str
    payload: dict
    timestamp: str

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "session_id": self.session_id,
                "seq": self.seq,
                "kind": self.kind,
                "payload": self.payload,
                "timestamp": self.timestamp,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class SessionReport:
    """Final outcome, with realized ranks when rankings are volunteered.

    Expected values describe truthful top-block play under the session's
    schedule; a report for any other play style is still produced but
    the expectations then carry no optimality meaning.
    """

    session_id: str
    final_choice: str
    final_label: str
    expected_ranks: tuple[Fraction, ...]
    expected_total: Fraction
    realized_ranks: Optional[tuple[int, ...]]
    realized_total: Optional[int]


def apply_event(state: Optional[SessionState], event: SessionEvent) -> SessionState:
    """Pure fold step; the only way state is ever advanced."""
    p = event.payload
    if event.kind == "created":
        if state is not None:
            raise ValueError("duplicate created event")
        menu = Menu(
            items=tuple(MenuItem(d["item_id"], d["label"]) for d in p["menu"])
        )
        return SessionState(
            session_id=event.session_id,
            menu=menu,
            participants=tuple(p["participants"]),
            schedule=ShortlistSchedule(sizes=tuple(p["schedule"])),
            turn=0,
            offered=menu.item_ids,
            history=(),
            final_choice=None,
            status=AWAITING,
        )
    if state is None:
        raise ValueError("first event must be 'created'")
    if event.kind == "shortlist_submitted":
        sub = Submission(
            participant_index=p["participant_index"],
            item_ids=tuple(p["item_ids"]),
            timestamp=event.timestamp,
        )
        return replace(
            state,
            turn=state.turn + 1,
            offered=sub.item_ids,
            history=state.history + (sub,),
        )
    if event.kind == "completed":
        return replace(state, status=COMPLETE, final_choice=p["final_choice"])
    if event.kind == "aborted":
        return replace(state, status=ABORTED)
    raise ValueError("unknown event kind %r" % event.kind)


def replay(events: Sequence[SessionEvent]) -> SessionState:
    state: Optional[SessionState] = None
    for event in events:
        state = apply_event(state, event)
    if state is None:
        raise ValueError("empty event log")
    return state


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _check_permutation(p: Sequence[int], n: int) -> None:
    if len(p) != n:
        raise ValueError("ranking must cover all %d menu items" % n)
    seen = [False] * n
    for r in p:
        if not isinstance(r, int) or not 1 <= r <= n or seen[r - 1]:
            raise ValueError("not a permutation of 1..%d: %r" % (n, list(p)))
        seen[r - 1] = True


class SessionStore:
    """All live sessions, with an optional append-only JSONL log.

    One lock serializes mutations; reads hand out immutable snapshots.
    Opening a store on an existing log replays it, so a restarted
    server resumes every session exactly where it stood.
    """

    def __init__(self, log_path: Optional[str | Path] = None) -> None:
        self._lock = threading.Lock()
        self._states: dict[str, SessionState] = {}
        self._events: dict[str, list[SessionEvent]] = {}
        # (session_id, token) -> (request fingerprint, resulting state)
        self._submit_tokens: dict[tuple[str, str], tuple[tuple, SessionState]] = {}
        # token -> (request fingerprint, session_id)
        self._create_tokens: dict[str, tuple[tuple, str]] = {}
        self._last_submit_token: dict[str, str] = {}
        self._log_path = Path(log_path) if log_path is not None else None
        if self._log_path is not None and self._log_path.exists():
            self._load_log()

    # -- persistence ------------------------------------------------

    def _load_log(self) -> None:
        assert self._log_path is not None
        with self._log_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                event = SessionEvent(
                    session_id=rec["session_id"],
                    seq=rec["seq"],
                    kind=rec["kind"],
                    payload=rec["payload"],
                    timestamp=rec["timestamp"],
                )
                self._ingest(event, persist=False)

    def _ingest(self, event: SessionEvent, persist: bool = True) -> SessionState:
        sid = event.session_id
        state = apply_event(self._states.get(sid), event)
        self._states[sid] = state
        self._events.setdefault(sid, []).append(event)
        token = event.payload.get("idempotency_token")
        if event.kind == "created" and token:
            fingerprint = (
                tuple((d["item_id"], d["label"]) for d in event.payload["menu"]),
                tuple(event.payload["participants"]),
                tuple(event.payload["schedule"]),
            )
            self._create_tokens[token] = (fingerprint, sid)
        elif event.kind == "shortlist_submitted" and token:
            fingerprint = (
                event.payload["participant_index"],
                tuple(event.payload["item_ids"]),
            )
            self._submit_tokens[(sid, token)] = (fingerprint, state)
            self._last_submit_token[sid] = token
        elif event.kind == "completed":
            # A completion always follows its submission; fold it into
            # that token's stored result so replays see the final state.
            last = self._last_submit_token.get(sid)
            if last is not None:
                fingerprint, _ = self._submit_tokens[(sid, last)]
                self._submit_tokens[(sid, last)] = (fingerprint, state)
        if persist and self._log_path is not None:
            with self._log_path.open("a", encoding="utf-8") as fh:
                fh.write(event.to_json_line() + "\n")
        return state

    def _next_seq(self, session_id: str) -> int:
        return len(self._events.get(session_id, []))

    # -- operations -------------------------------------------------

    def create_session(
        self,
        menu: Menu,
        participants: Sequence[str],
        schedule_override: Optional[Sequence[int]] = None,
        session_id: Optional[str] = None,
        idempotency_token: Optional[str] = None,
    ) -> SessionState:
        if not participants:
            raise ValueError("at least one participant is required")
        if any(not isinstance(p, str) or not p.strip() for p in participants):
            raise ValueError("participant names must be non-empty strings")
        people = len(participants)
        if schedule_override is not None:
            schedule = ShortlistSchedule(sizes=tuple(schedule_override))
            if schedule.menu_size != menu.size:
                raise ValueError(
                    "override schedule starts at %d, not menu size %d"
                    % (schedule.menu_size, menu.size)
                )
            if schedule.people != people:
                raise ValueError(
                    "override schedule is for %d participants, not %d"
                    % (schedule.people, people)
                )
        else:
            schedule, _ = optimal_integer_schedule(menu.size, people)

        payload = {
            "menu": [
                {"item_id": it.item_id, "label": it.label} for it in menu.items
            ],
            "participants": list(participants),
            "schedule": list(schedule.sizes),
        }
        if idempotency_token:
            payload["idempotency_token"] = idempotency_token
        with self._lock:
            if idempotency_token and idempotency_token in self._create_tokens:
                fingerprint, sid = self._create_tokens[idempotency_token]
                asked = (
                    tuple((d["item_id"], d["label"]) for d in payload["menu"]),
                    tuple(payload["participants"]),
                    tuple(payload["schedule"]),
                )
                if asked != fingerprint:
                    raise SubmissionConflict(
                        "idempotency token reused with different arguments"
                    )
                return self._states[sid]
            sid = session_id or uuid.uuid4().hex[:12]
            if sid in self._states:
                raise ValueError("session id %r already exists" % sid)
            event = SessionEvent(
                session_id=sid,
                seq=0,
                kind="created",
                payload=payload,
                timestamp=_now(),
            )
            return self._ingest(event)

    def get_session(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._states.get(session_id)
        if state is None:
            raise SessionNotFound("no session %r" % session_id)
        return state

    def events(self, session_id: str) -> list[SessionEvent]:
        with self._lock:
            events = self._events.get(session_id)
        if events is None:
            raise SessionNotFound("no session %r" % session_id)
        return list(events)

    def submit_shortlist(
        self,
        session_id: str,
        participant_index: int,
        item_ids: Sequence[str],
        idempotency_token: str,
    ) -> SessionState:
        if not idempotency_token or not isinstance(idempotency_token, str):
            raise ValueError("an idempotency token is required")
        with self._lock:
            state = self._states.get(session_id)
            if state is None:
                raise SessionNotFound("no session %r" % session_id)
            people = state.schedule.people
            if not isinstance(participant_index, int) or not 0 <= participant_index < people:
                raise ValueError(
                    "participant index must lie in 0..%d" % (people - 1)
                )
            fingerprint = (participant_index, tuple(item_ids))
            key = (session_id, idempotency_token)
            if key in self._submit_tokens:
                stored_fp, stored_state = self._submit_tokens[key]
                if stored_fp != fingerprint:
                    raise SubmissionConflict(
                        "idempotency token reused with different arguments"
                    )
                return stored_state
            if state.status == ABORTED:
                raise WrongTurn("session was aborted")
            if participant_index < state.turn:
                raise SubmissionConflict(
                    "slot %d was already submitted; exactly one submission wins"
                    % participant_index
                )
            if participant_index > state.turn:
                raise WrongTurn(
                    "it is participant %d's turn, not %d"
                    % (state.turn, participant_index)
                )
            wanted = state.schedule.sizes[state.turn + 1]
            ids = tuple(item_ids)
            if len(set(ids)) != len(ids):
                raise WrongCount("submitted items contain duplicates")
            if len(ids) != wanted:
                raise WrongCount(
                    "expected exactly %d items, got %d" % (wanted, len(ids))
                )
            offered = set(state.offered)
            for item in ids:
                if item not in offered:
                    raise ItemNotOffered("item %r is not in the offered set" % item)

            event = SessionEvent(
                session_id=session_id,
                seq=self._next_seq(session_id),
                kind="shortlist_submitted",
                payload={
                    "participant_index": participant_index,
                    "item_ids": list(ids),
                    "idempotency_token": idempotency_token,
                },
                timestamp=_now(),
            )
            new_state = self._ingest(event)
            if new_state.turn == people:
                done = SessionEvent(
                    session_id=session_id,
                    seq=self._next_seq(session_id),
                    kind="completed",
                    payload={"final_choice": new_state.offered[0]},
                    timestamp=_now(),
                )
                new_state = self._ingest(done)
            return new_state

    def abort_session(self, session_id: str, reason: str = "") -> SessionState:
        with self._lock:
            state = self._states.get(session_id)
            if state is None:
                raise SessionNotFound("no session %r" % session_id)
            if state.status == ABORTED:
                return state
            if state.status == COMPLETE:
                raise SessionError("cannot abort a complete session")
            event = SessionEvent(
                session_id=session_id,
                seq=self._next_seq(session_id),
                kind="aborted",
                payload={"reason": reason},
                timestamp=_now(),
            )
            return self._ingest(event)

    def session_report(
        self,
        session_id: str,
        rankings: Optional[Sequence[Sequence[int]]] = None,
    ) -> SessionReport:
        state = self.get_session(session_id)
        if state.status != COMPLETE or state.final_choice is None:
            raise SessionNotComplete("session %r is not complete" % session_id)
        expected: MultiPartyReport = schedule_report(state.schedule)
        realized_ranks: Optional[tuple[int, ...]] = None
        realized_total: Optional[int] = None
        if rankings is not None:
            if len(rankings) != state.schedule.people:
                raise ValueError(
                    "need one ranking per participant (%d)" % state.schedule.people
                )
            n = state.menu.size
            for ranking in rankings:
                _check_permutation(ranking, n)
            pos = state.menu.position_of(state.final_choice)
            realized_ranks = tuple(ranking[pos] for ranking in rankings)
            realized_total = sum(realized_ranks)
        return SessionReport(
            session_id=session_id,
            final_choice=state.final_choice,
            final_label=state.menu.items[
                state.menu.position_of(state.final_choice)
            ].label,
            expected_ranks=expected.per_person,
            expected_total=expected.expected_total,
            realized_ranks=realized_ranks,
            realized_total=realized_total,
        )
