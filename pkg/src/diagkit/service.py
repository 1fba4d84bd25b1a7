"""HTTP session service: the interactive loop behind a small JSON API.

Sessions live in memory; every state transition of a session runs under its
own lock, so concurrent answers apply exactly once.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import logic
from .circuit import parse_netlist, reduce
from .dpi import DpiError, parse_dpi
from .engine import (ANSWERS, DONE, EngineConfig, Goal, SessionState)
from .fixtures import FIXTURE_NAMES, named_fixture
from .qpartition import QsmConfig
from .querycost import QcmConfig


class SessionConfigBody(BaseModel):
    n_leading: int = 10
    qsm_measure: str = "ENT"
    qsm_threshold: float = 0.01
    qcm_measure: str = "SUM"
    enhance: bool = False
    goal_kind: str = "G1_SINGLE"
    goal_threshold: float = 0.5
    goal_ratio: float = 1.0


class CreateSessionBody(BaseModel):
    dpi: Optional[str] = None
    netlist: Optional[str] = None
    fixture: Optional[str] = None
    config: SessionConfigBody = SessionConfigBody()


class AnswerBody(BaseModel):
    answer: str


@dataclass
class SessionHandle:
    id: str
    created_at: str
    state: SessionState
    lock: threading.Lock = field(default_factory=threading.Lock)


def _build_config(body: SessionConfigBody, costs: dict) -> EngineConfig:
    try:
        goal = Goal(body.goal_kind, threshold=body.goal_threshold,
                    ratio=body.goal_ratio)
        qsm = QsmConfig(body.qsm_measure.upper(), body.qsm_threshold)
        qcm = QcmConfig.of(body.qcm_measure.upper(), costs)
        if body.n_leading < 2:
            raise ValueError("n_leading must be at least 2")
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return EngineConfig(n_leading=body.n_leading, qsm=qsm, qcm=qcm,
                        enhance=body.enhance, goal=goal)


def _diagnosis_json(state: SessionState, d) -> dict:
    return {
        "ids": sorted(d.ids),
        "sentences": [logic.serialize(state.dpi.sentence(s))
                      for s in sorted(d.ids)],
        "probability": round(state.leading.prob(d), 6)
        if d in state.leading.probs else None,
    }


def state_json(handle: SessionHandle) -> dict:
    state = handle.state
    out = {
        "id": handle.id,
        "created_at": handle.created_at,
        "status": state.status,
        "leading": [_diagnosis_json(state, d) for d in state.leading],
        "query": None,
        "diagnosis": None,
        "history": state.transcript(),
    }
    if state.pending_query is not None:
        p_true, p_false = state.answer_probabilities()
        qp = state.pending_qp
        costs = state.dpi.costs
        by_formula = {state.dpi.sentence(sid): costs[sid]
                      for sid in state.dpi.ids}
        out["query"] = {
            "sentences": [{"text": logic.serialize(f),
                           "cost": by_formula.get(f, 1.0)}
                          for f in sorted(state.pending_query.sentences,
                                          key=logic.serialize)],
            "p_true": round(p_true, 6),
            "p_false": round(p_false, 6),
            "dplus": sorted(sorted(d.ids) for d in qp.dplus),
            "dminus": sorted(sorted(d.ids) for d in qp.dminus),
        }
    if state.status == DONE and state.result is not None:
        out["diagnosis"] = {
            "ids": sorted(state.result.ids),
            "sentences": [logic.serialize(state.dpi.sentence(s))
                          for s in sorted(state.result.ids)],
        }
    return out


def create_app() -> FastAPI:
    app = FastAPI(title="diagkit session service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, SessionHandle] = {}

    def get_handle(session_id: str) -> SessionHandle:
        handle = sessions.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        return handle

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        sources = [s for s in (body.dpi, body.netlist, body.fixture)
                   if s is not None]
        if len(sources) != 1:
            raise HTTPException(
                status_code=422,
                detail="provide exactly one of dpi, netlist, fixture")
        try:
            if body.fixture is not None:
                if body.fixture not in FIXTURE_NAMES:
                    raise DpiError("unknown fixture %r (have: %s)"
                                   % (body.fixture, ", ".join(FIXTURE_NAMES)))
                dpi = named_fixture(body.fixture)
            elif body.netlist is not None:
                dpi, _ = reduce(parse_netlist(body.netlist))
            else:
                dpi = parse_dpi(body.dpi)
            config = _build_config(body.config, dpi.costs)
            state = SessionState(dpi, config)
        except HTTPException:
            raise
        except (DpiError, logic.ParseError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        handle = SessionHandle(uuid.uuid4().hex,
                               datetime.now(timezone.utc).isoformat(), state)
        sessions[handle.id] = handle
        return state_json(handle)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return state_json(get_handle(session_id))

    @app.post("/sessions/{session_id}/answer")
    def answer(session_id: str, body: AnswerBody) -> dict:
        handle = get_handle(session_id)
        if body.answer not in ANSWERS:
            raise HTTPException(status_code=422,
                                detail="answer must be one of %s" % (ANSWERS,))
        with handle.lock:
            if handle.state.status == DONE or \
                    handle.state.pending_query is None:
                raise HTTPException(status_code=409,
                                    detail="session has no pending query")
            handle.state.step(body.answer)
        return state_json(handle)

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str) -> list:
        return get_handle(session_id).state.transcript()

    return app


app = create_app()
