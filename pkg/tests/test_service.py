"""HTTP layer: routing, status codes, and the guarantee that every number
the service returns is a library number, unchanged."""

import threading
import time

import pytest
from fastapi.testclient import TestClient

from fluidseis import (GridSpec, InjectionProfile, OnlineSession,
                       forecast_to_dict, load_prior_config)
from fluidseis.service import create_app

M0 = 1.0
PROFILE_BODY = {"t_days": [0.0], "rate_m3_per_day": [2400.0]}
GRID_BODY = {"n": 16}   # coarse on purpose; correctness lives in the library
EVENTS = [{"t": 0.05, "m": 1.4}, {"t": 0.11, "m": 2.0}, {"t": 0.19, "m": 1.1},
          {"t": 0.30, "m": 1.7}, {"t": 0.42, "m": 1.2}]


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def make_session(client, **extra):
    body = {"m0": M0, "profile": PROFILE_BODY, "grid": GRID_BODY}
    body.update(extra)
    r = client.post("/v1/sessions", json=body)
    assert r.status_code == 201
    return r.json()["id"]


class TestCreate:
    def test_created_with_id(self, client):
        sid = make_session(client)
        assert isinstance(sid, str) and sid

    def test_missing_m0(self, client):
        r = client.post("/v1/sessions", json={"profile": PROFILE_BODY})
        assert r.status_code == 400
        assert "m0" in r.json()["detail"]

    def test_missing_profile(self, client):
        r = client.post("/v1/sessions", json={"m0": M0})
        assert r.status_code == 400

    def test_bad_profile_lengths(self, client):
        r = client.post("/v1/sessions", json={
            "m0": M0, "profile": {"t_days": [0.0, 1.0],
                                  "rate_m3_per_day": [2400.0]}})
        assert r.status_code == 400

    def test_body_not_an_object(self, client):
        r = client.post("/v1/sessions", json=[1, 2, 3])
        assert r.status_code == 400
        assert r.json()["detail"] == "malformed request body"

    def test_body_not_json(self, client):
        r = client.post("/v1/sessions", content=b"not json at all",
                        headers={"content-type": "application/json"})
        assert r.status_code == 400

    def test_bad_prior(self, client):
        r = client.post("/v1/sessions", json={
            "m0": M0, "profile": PROFILE_BODY, "prior": {"a_fb": 3}})
        assert r.status_code == 400
        assert "prior" in r.json()["detail"]

    def test_bad_grid(self, client):
        r = client.post("/v1/sessions", json={
            "m0": M0, "profile": PROFILE_BODY, "grid": {"n": "coarse"}})
        assert r.status_code == 400


class TestUnknownSession:
    @pytest.mark.parametrize("method,path", [
        ("get", "/v1/sessions/nope/posterior"),
        ("get", "/v1/sessions/nope/forecast"),
        ("get", "/v1/sessions/nope/whatif?shutin_at=1.0"),
        ("get", "/v1/sessions/nope/stream"),
        ("post", "/v1/sessions/nope/events"),
        ("post", "/v1/sessions/nope/shutin"),
    ])
    def test_404(self, client, method, path):
        r = getattr(client, method)(path, **(
            {"json": {"events": EVENTS}} if method == "post" else {}))
        assert r.status_code == 404


class TestEvents:
    def test_accepted_and_clock_advances(self, client):
        sid = make_session(client)
        r = client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        assert r.status_code == 200
        assert r.json() == {"accepted": len(EVENTS), "t_now": EVENTS[-1]["t"]}

    def test_out_of_order_is_409_with_detail(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        r = client.post(f"/v1/sessions/{sid}/events",
                        json={"events": [{"t": 0.2, "m": 1.5}]})
        assert r.status_code == 409
        assert "t=0.2" in r.json()["detail"]

    def test_empty_list(self, client):
        sid = make_session(client)
        r = client.post(f"/v1/sessions/{sid}/events", json={"events": []})
        assert r.status_code == 400

    def test_non_numeric_fields(self, client):
        sid = make_session(client)
        r = client.post(f"/v1/sessions/{sid}/events",
                        json={"events": [{"t": 0.1, "m": "big"}]})
        assert r.status_code == 400

    def test_below_completeness(self, client):
        sid = make_session(client)
        r = client.post(f"/v1/sessions/{sid}/events",
                        json={"events": [{"t": 0.1, "m": 0.2}]})
        assert r.status_code == 400
        assert "completeness" in r.json()["detail"]


class TestShutin:
    def test_declares_and_mode_flips(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        r = client.post(f"/v1/sessions/{sid}/shutin", json={"t": 0.5})
        assert r.status_code == 200
        assert r.json() == {"shut_in": 0.5}
        post = client.get(f"/v1/sessions/{sid}/posterior").json()
        assert post["likelihood_mode"] == "complete"
        assert post["shut_in"] == 0.5

    def test_second_declaration_is_409(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/shutin", json={"t": 0.5})
        r = client.post(f"/v1/sessions/{sid}/shutin", json={"t": 0.7})
        assert r.status_code == 409
        assert "already declared" in r.json()["detail"]

    def test_missing_t(self, client):
        sid = make_session(client)
        r = client.post(f"/v1/sessions/{sid}/shutin", json={})
        assert r.status_code == 400


class TestPosteriorPayload:
    def test_shape(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        snap = client.get(f"/v1/sessions/{sid}/posterior").json()
        assert snap["session"] == sid
        assert snap["n_events"] == len(EVENTS)
        assert snap["likelihood_mode"] == "partial"
        post = snap["posterior"]
        assert set(post["axes"]) == {"a_fb", "b", "tau"}
        assert len(post["axes"]["a_fb"]) == GRID_BODY["n"]
        for name in ("a_fb", "b", "tau"):
            assert len(post["marginals"][name]) == GRID_BODY["n"]
        assert set(post["mean"]) == {"a_fb", "b", "tau"}
        assert post["m0"] == M0
        w = sum(snap["forecast"]["count"]["pmf"])
        assert abs(w - 1.0) < 1e-9


class TestForecastMatchesLibrary:
    def test_bit_identical_to_local_session(self, client):
        """The route must serialize library output verbatim."""
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        got = client.get(f"/v1/sessions/{sid}/forecast").json()

        local = OnlineSession(
            prior=load_prior_config(),
            profile=InjectionProfile.constant(2400.0),
            m0=M0, grid_spec=GridSpec(n_a=16, n_b=16, n_tau=16))
        local.submit_events([e["t"] for e in EVENTS],
                            [e["m"] for e in EVENTS])
        snap = local.snapshot()
        want = forecast_to_dict(
            snap.count_forecast, snap.maxmag_forecast,
            flags={"likelihood_mode": "partial", "whatif": False})
        assert got == want

    def test_horizon_override(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        got = client.get(f"/v1/sessions/{sid}/forecast",
                         params={"h_hours": 2.0}).json()
        assert got["h_days"] == pytest.approx(2.0 / 24.0, rel=1e-12)
        assert got["t_days"] == EVENTS[-1]["t"]

    def test_create_time_horizon_sticks(self, client):
        sid = make_session(client, h_hours=6.0)
        got = client.get(f"/v1/sessions/{sid}/forecast").json()
        assert got["h_days"] == pytest.approx(6.0 / 24.0, rel=1e-12)


class TestWhatif:
    def test_flags_and_dominance(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        stop_now = client.get(f"/v1/sessions/{sid}/whatif",
                              params={"shutin_at": EVENTS[-1]["t"]}).json()
        keep_going = client.get(f"/v1/sessions/{sid}/whatif",
                                params={"shutin_at": 5.0}).json()
        assert stop_now["flags"]["whatif"] is True
        assert stop_now["flags"]["shutin_at"] == EVENTS[-1]["t"]
        # stopping sooner can only thin the forecast window
        assert stop_now["count"]["mean"] <= keep_going["count"]["mean"]

    def test_past_shutin_is_400(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        r = client.get(f"/v1/sessions/{sid}/whatif",
                       params={"shutin_at": 0.1})
        assert r.status_code == 400

    def test_after_declaration_is_409(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/shutin", json={"t": 0.5})
        r = client.get(f"/v1/sessions/{sid}/whatif",
                       params={"shutin_at": 2.0})
        assert r.status_code == 409


class TestStream:
    def test_single_payload_equals_posterior_route(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
        want = client.get(f"/v1/sessions/{sid}/posterior").json()
        r = client.get(f"/v1/sessions/{sid}/stream", params={"limit": 1})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("text/event-stream")
        blocks = [b for b in r.text.split("\n\n") if b.strip()]
        assert len(blocks) == 1
        import json as _json
        assert _json.loads(blocks[0].removeprefix("data: ")) == want

    def test_pushes_follow_mutations(self, client):
        sid = make_session(client)
        client.post(f"/v1/sessions/{sid}/events",
                    json={"events": EVENTS[:2]})

        def poke():
            time.sleep(0.4)
            client.post(f"/v1/sessions/{sid}/events",
                        json={"events": EVENTS[2:]})

        t = threading.Thread(target=poke)
        t.start()
        with client.stream("GET", f"/v1/sessions/{sid}/stream",
                           params={"limit": 2}) as r:
            body = "".join(r.iter_text())
        t.join()
        import json as _json
        counts = [_json.loads(b.removeprefix("data: "))["n_events"]
                  for b in body.split("\n\n") if b.strip()]
        assert counts == [2, len(EVENTS)]


class TestRecovery:
    def test_sessions_survive_restart(self, tmp_path):
        with TestClient(create_app(data_dir=tmp_path)) as c:
            sid = make_session(c)
            c.post(f"/v1/sessions/{sid}/events", json={"events": EVENTS})
            c.post(f"/v1/sessions/{sid}/shutin", json={"t": 0.5})
            before = c.get(f"/v1/sessions/{sid}/posterior").json()

        with TestClient(create_app(data_dir=tmp_path)) as c:
            after = c.get(f"/v1/sessions/{sid}/posterior").json()
            assert after == before
            # recovered session stays writable
            r = c.post(f"/v1/sessions/{sid}/events",
                       json={"events": [{"t": 0.9, "m": 1.3}]})
            assert r.status_code == 200
            assert c.get(f"/v1/sessions/{sid}/posterior"
                         ).json()["n_events"] == len(EVENTS) + 1
