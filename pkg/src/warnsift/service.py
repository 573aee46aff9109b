"""HTTP labeling service.

Serves interactive triage sessions over datasets in a directory. Every label
submission checkpoints the full session to disk, so a restarted process picks
up exactly where it stopped. Labels are only accepted for the session's
current pending query; anything else races a concurrent submission and is
answered with 409.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .dataset import (
    DEFAULT_DELETED,
    DEFAULT_LABEL_COLUMN,
    DEFAULT_NEGATIVE,
    DEFAULT_POSITIVE,
    WarningRecord,
    encode,
    fit_schema,
    load_csv,
)
from .engine import EngineConfig, SessionState, init_session
from .errors import PoolExhaustedError, WarnsiftError
from .learners import default_config

log = logging.getLogger("warnsift.service")


class CreateSessionRequest(BaseModel):
    dataset: str
    learner: str = "svm"
    seed: int = Field(default=0, ge=0)
    stop_recall: float = Field(default=0.95, gt=0.0, le=1.0)
    certainty_switch_threshold: int = Field(default=10, ge=1)
    batch_size: int = Field(default=1, ge=1)
    undersampling: bool = True
    presumptive_negatives: bool = True
    label_budget: int | None = Field(default=None, ge=1)
    label_column: str | None = DEFAULT_LABEL_COLUMN
    positive_token: str = DEFAULT_POSITIVE
    negative_token: str = DEFAULT_NEGATIVE
    deleted_token: str = DEFAULT_DELETED


class LabelRequest(BaseModel):
    id: str
    label: str


@dataclass
class LiveSession:
    session_id: str
    dataset: str
    created_at: str
    request: CreateSessionRequest
    state: SessionState
    records_by_id: dict[str, WarningRecord]
    stopped: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    def handle(self) -> dict:
        return {
            "session_id": self.session_id,
            "dataset": self.dataset,
            "created_at": self.created_at,
            "status": "stopped" if self.stopped else "active",
            "learner": self.state.config.learner.kind,
            "seed": self.state.rng_seed,
        }

    def progress(self) -> dict:
        return {
            "labeled": self.state.labeled_count,
            "positives": self.state.targets_found,
            "pool": len(self.state.pool),
            "phase": self.state.phase.value,
            "stopped": self.stopped,
        }

    def export_csv(self) -> str:
        lines = ["id,label"]
        lines += [f"{ev.id},{ev.label.value}" for ev in self.state.query_history]
        return "\n".join(lines) + "\n"


def create_app(data_dir: str | Path, checkpoint_dir: str | Path) -> FastAPI:
    data_dir = Path(data_dir)
    checkpoint_dir = Path(checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="warnsift", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, LiveSession] = {}

    def dataset_path(name: str) -> Path:
        path = data_dir / f"{name}.csv"
        if path.parent != data_dir:  # no traversal out of the data dir
            raise HTTPException(status_code=404, detail=f"unknown dataset '{name}'")
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"unknown dataset '{name}'")
        return path

    def load_pool(req: CreateSessionRequest):
        records = load_csv(
            dataset_path(req.dataset),
            label_column=req.label_column,
            positive_token=req.positive_token,
            negative_token=req.negative_token,
            deleted_token=req.deleted_token,
        )
        schema = fit_schema(records)
        pool = encode(records, schema)
        return pool, {r.id: r for r in records}

    def checkpoint_file(session_id: str) -> Path:
        return checkpoint_dir / f"{session_id}.json"

    def save_checkpoint(live: LiveSession) -> None:
        doc = {
            "format": "warnsift-service-session",
            "version": 1,
            "session_id": live.session_id,
            "dataset": live.dataset,
            "created_at": live.created_at,
            "stopped": live.stopped,
            "request": live.request.model_dump(),
            "session": live.state.to_json(),
        }
        target = checkpoint_file(live.session_id)
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc))
        os.replace(tmp, target)

    def restore_sessions() -> None:
        for path in sorted(checkpoint_dir.glob("*.json")):
            try:
                doc = json.loads(path.read_text())
                req = CreateSessionRequest(**doc["request"])
                pool, records = load_pool(req)
                state = SessionState.from_json(pool, doc["session"])
                live = LiveSession(
                    session_id=doc["session_id"],
                    dataset=doc["dataset"],
                    created_at=doc["created_at"],
                    request=req,
                    state=state,
                    records_by_id=records,
                    stopped=bool(doc["stopped"]),
                )
                sessions[live.session_id] = live
            except (WarnsiftError, HTTPException, KeyError, ValueError) as exc:
                log.warning("skipping checkpoint %s: %s", path.name, exc)

    restore_sessions()

    def get_session(session_id: str) -> LiveSession:
        live = sessions.get(session_id)
        if live is None:
            raise HTTPException(status_code=404, detail=f"unknown session '{session_id}'")
        return live

    def pending_query(live: LiveSession) -> str:
        try:
            return live.state.next_query()
        except PoolExhaustedError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    def query_payload(live: LiveSession) -> dict:
        wid = pending_query(live)
        state = live.state
        proba = None
        if state.model is not None:
            row = state.pool.X[state.pool.row_of(wid)][None, :]
            proba = float(state.model.predict_proba(row)[0])
        return {
            "id": wid,
            "features": dict(live.records_by_id[wid].features),
            "probability": proba,
            "phase": state.phase.value,
            "progress": live.progress(),
        }

    @app.get("/v1/datasets")
    def list_datasets() -> dict:
        names = sorted(p.stem for p in data_dir.glob("*.csv"))
        return {"datasets": names}

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        try:
            pool, records = load_pool(req)
            config = EngineConfig(
                learner=default_config(req.learner, seed=req.seed),
                certainty_switch_threshold=req.certainty_switch_threshold,
                undersampling=req.undersampling,
                presumptive_negatives=req.presumptive_negatives,
                stop_recall=req.stop_recall,
                batch_size=req.batch_size,
            )
            state = init_session(pool, config, seed=req.seed)
        except (WarnsiftError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        live = LiveSession(
            session_id=uuid.uuid4().hex,
            dataset=req.dataset,
            created_at=datetime.now(timezone.utc).isoformat(),
            request=req,
            state=state,
            records_by_id=records,
        )
        sessions[live.session_id] = live
        save_checkpoint(live)
        return live.handle()

    @app.get("/v1/sessions/{session_id}")
    def session_handle(session_id: str) -> dict:
        return get_session(session_id).handle()

    @app.get("/v1/sessions/{session_id}/next")
    def next_query(session_id: str) -> dict:
        live = get_session(session_id)
        with live.lock:
            if live.stopped:
                raise HTTPException(status_code=409, detail="session is stopped")
            return query_payload(live)

    @app.post("/v1/sessions/{session_id}/labels")
    def submit_label(session_id: str, req: LabelRequest) -> dict:
        if req.label not in ("actionable", "unactionable"):
            raise HTTPException(
                status_code=400,
                detail="label must be 'actionable' or 'unactionable'",
            )
        live = get_session(session_id)
        with live.lock:
            if live.stopped:
                raise HTTPException(status_code=409, detail="session is stopped")
            pending = pending_query(live)
            if req.id != pending:
                raise HTTPException(
                    status_code=409,
                    detail=f"'{req.id}' is not the current query ('{pending}')",
                )
            live.state.submit_label(req.id, req.label)
            budget = live.request.label_budget
            if budget is not None and live.state.labeled_count >= budget:
                live.stopped = True
            if live.state.labeled_count == len(live.state.pool):
                live.stopped = True
            save_checkpoint(live)
            return live.progress()

    @app.get("/v1/sessions/{session_id}/progress")
    def progress(session_id: str) -> dict:
        live = get_session(session_id)
        with live.lock:
            out = live.progress()
            out["ranking"] = [
                {"id": wid, "probability": p}
                for wid, p in live.state.remaining_ranking()
            ]
            return out

    @app.post("/v1/sessions/{session_id}/stop")
    def stop(session_id: str) -> dict:
        live = get_session(session_id)
        with live.lock:
            live.stopped = True
            save_checkpoint(live)
            return {"status": "stopped", "labeled": live.state.labeled_count}

    @app.get("/v1/sessions/{session_id}/export")
    def export(session_id: str) -> Response:
        live = get_session(session_id)
        with live.lock:
            csv_text = live.export_csv()
        return Response(
            content=csv_text,
            media_type="text/csv",
            headers={
                "Content-Disposition": f'attachment; filename="{live.dataset}-labels.csv"'
            },
        )

    return app
