"""HTTP shell around OnlineSession.

Every number the service returns comes from the library functions; handlers
only parse, lock, and serialize.  Sessions live in memory, with an optional
append-only JSON-lines log per session for crash recovery.

Status codes: 400 malformed input, 404 unknown session, 409 for an event
that does not advance time or a second shut-in declaration.
"""

from __future__ import annotations

import asyncio
import json
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from .catalog import InjectionProfile
from .forecast import forecast_to_dict
from .inference import GridSpec
from .priors import load_prior_config, prior_from_dict
from .session import MonotonicityError, OnlineSession

__all__ = ["create_app", "serve"]

STREAM_POLL_SECONDS = 0.2


def _profile_from_body(body):
    prof = body.get("profile")
    if not isinstance(prof, dict):
        raise HTTPException(400, "missing injection profile")
    try:
        return InjectionProfile(
            times=np.asarray(prof["t_days"], dtype=float),
            rates=np.asarray(prof["rate_m3_per_day"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise HTTPException(400, f"bad injection profile: {exc}")


def _grid_from_body(body):
    grid = body.get("grid")
    if grid is None:
        return None
    try:
        n = int(grid.get("n", 64))
        return GridSpec(n_a=int(grid.get("n_a", n)), n_b=int(grid.get("n_b", n)),
                        n_tau=int(grid.get("n_tau", n)),
                        tau_lo=grid.get("tau_lo"), tau_hi=grid.get("tau_hi"))
    except (TypeError, ValueError, AttributeError) as exc:
        raise HTTPException(400, f"bad grid spec: {exc}")


def create_app(data_dir=None, prior=None):
    """App factory; ``data_dir`` enables per-session logs and recovery."""
    app = FastAPI(title="fluidseis", docs_url=None, redoc_url=None)
    # operator console is served from elsewhere; no credentials in play
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions = {}
    base_prior = prior or load_prior_config()
    root = Path(data_dir) if data_dir is not None else None

    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        for log in sorted(root.glob("*.jsonl")):
            sess = OnlineSession.recover(log)
            sessions[sess.id] = sess

    @app.exception_handler(RequestValidationError)
    async def _malformed(request, exc):
        return JSONResponse({"detail": "malformed request body"}, status_code=400)

    def _session(sid):
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, "unknown session")
        return sess

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: dict):
        try:
            m0 = float(body["m0"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(400, "missing or bad m0")
        profile = _profile_from_body(body)
        sess_prior = base_prior
        if body.get("prior") is not None:
            try:
                sess_prior = prior_from_dict(body["prior"])
            except (KeyError, TypeError, ValueError) as exc:
                raise HTTPException(400, f"bad prior: {exc}")
        kwargs = {}
        if body.get("mu") is not None:
            kwargs["mu"] = float(body["mu"])
        if body.get("h_hours") is not None:
            kwargs["h_days"] = float(body["h_hours"]) / 24.0
        sid = uuid.uuid4().hex
        log_path = None if root is None else root / f"{sid}.jsonl"
        try:
            sess = OnlineSession(prior=sess_prior, profile=profile, m0=m0,
                                 grid_spec=_grid_from_body(body),
                                 session_id=sid, log_path=log_path, **kwargs)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        sessions[sess.id] = sess
        return {"id": sess.id}

    @app.post("/v1/sessions/{sid}/events")
    def post_events(sid: str, body: dict):
        sess = _session(sid)
        events = body.get("events")
        if not isinstance(events, list) or not events:
            raise HTTPException(400, "need a non-empty events list")
        try:
            times = [float(e["t"]) for e in events]
            mags = [float(e["m"]) for e in events]
        except (KeyError, TypeError, ValueError):
            raise HTTPException(400, "each event needs numeric t and m")
        try:
            sess.submit_events(times, mags)
        except MonotonicityError as exc:
            raise HTTPException(409, str(exc))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return {"accepted": len(events), "t_now": sess.t_now}

    @app.post("/v1/sessions/{sid}/shutin")
    def post_shutin(sid: str, body: dict):
        sess = _session(sid)
        try:
            t = float(body["t"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(400, "missing or bad t")
        try:
            sess.declare_shutin(t)
        except MonotonicityError as exc:
            raise HTTPException(409, str(exc))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return {"shut_in": sess.shut_in_declared}

    @app.get("/v1/sessions/{sid}/posterior")
    def get_posterior(sid: str):
        return _session(sid).snapshot_dict()

    @app.get("/v1/sessions/{sid}/forecast")
    def get_forecast(sid: str, h_hours: float | None = None):
        sess = _session(sid)
        h = None if h_hours is None else h_hours / 24.0
        snap = sess.snapshot(h_days=h)
        return forecast_to_dict(
            snap.count_forecast, snap.maxmag_forecast,
            flags={"likelihood_mode": snap.likelihood_mode, "whatif": False})

    @app.get("/v1/sessions/{sid}/whatif")
    def get_whatif(sid: str, shutin_at: float, h_hours: float | None = None):
        sess = _session(sid)
        h = None if h_hours is None else h_hours / 24.0
        try:
            count, maxmag = sess.whatif_forecast(shutin_at, h_days=h)
        except MonotonicityError as exc:
            raise HTTPException(409, str(exc))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return forecast_to_dict(count, maxmag,
                                flags={"likelihood_mode": sess.mode,
                                       "whatif": True, "shutin_at": shutin_at})

    @app.get("/v1/sessions/{sid}/stream")
    async def stream(sid: str, limit: int | None = None):
        # limit caps the number of payloads before the stream closes itself;
        # without it the stream runs until the client disconnects.
        sess = _session(sid)

        async def gen():
            seen = -1
            sent = 0
            while True:
                if sess.version != seen:
                    seen = sess.version
                    payload = await asyncio.to_thread(sess.snapshot_dict)
                    yield "data: " + json.dumps(payload) + "\n\n"
                    sent += 1
                    if limit is not None and sent >= limit:
                        return
                await asyncio.sleep(STREAM_POLL_SECONDS)

        return StreamingResponse(gen(), media_type="text/event-stream")

    return app


def serve(host="127.0.0.1", port=8000, data_dir=None, prior=None):
    import uvicorn

    uvicorn.run(create_app(data_dir=data_dir, prior=prior), host=host, port=port)
