import json
import time
import warnings

import pytest

warnings.filterwarnings("ignore", category=DeprecationWarning)

from fastapi.testclient import TestClient

from fixtures import dome_doc_small, report_dome_doc, waterflood_doc
from groundloop.errors import NotFoundError
from groundloop.modelspec import AUTONOMOUS, parse_spec, resolve, run_config
from groundloop.service.api import create_app
from groundloop.service.artifacts import load_run_bundle, save_run_dir
from groundloop.service.store import SessionStore


def small_report_doc():
    doc = report_dome_doc(open_porosity=True)
    doc["mesh"].update({"nx": 8, "ny": 8, "nz": 3})
    doc["wells"]["producers"]["placement"] = [[4, 4], [2, 5], [5, 2]]
    doc["schedule"]["n_report_steps"] = 5
    return doc


def small_waterflood():
    doc = waterflood_doc()
    doc["mesh"]["nx"] = 40
    doc["wells"]["producers"]["placement"] = [[39, 0]]
    doc["schedule"]["n_report_steps"] = 6
    return doc


def wait_terminal(client, sid, timeout=90.0):
    t0 = time.time()
    while time.time() - t0 < timeout:
        st = client.get(f"/sessions/{sid}").json()
        if st["phase"] in ("done", "failed") and not st["running"]:
            return st
        time.sleep(0.1)
    raise TimeoutError("session did not reach a terminal state")


@pytest.fixture()
def service(tmp_path):
    store = SessionStore(tmp_path / "store")
    app = create_app(store)
    with TestClient(app) as client:
        yield client, store


class TestSessions:
    def test_create_and_ambiguities(self, service):
        client, _ = service
        r = client.post("/sessions", json={"spec": small_report_doc()})
        assert r.status_code == 201
        sid = r.json()["id"]
        items = client.get(f"/sessions/{sid}/ambiguities").json()["items"]
        keys = [i["key"] for i in items]
        assert "density_closure" in keys and "porosity_spec" in keys

    def test_unknown_session_404(self, service):
        client, _ = service
        assert client.get("/sessions/nope").status_code == 404

    def test_malformed_spec_422(self, service):
        client, _ = service
        r = client.post("/sessions", json={"spec": {"mesh": {"nx": "a lot"}}})
        assert r.status_code == 422

    def test_invalid_answer_422_names_invariant(self, service):
        client, _ = service
        sid = client.post("/sessions", json={"spec": small_report_doc()}).json()["id"]
        r = client.post(f"/sessions/{sid}/answers",
                        json={"answers": {"porosity_spec": {"means": [1.5] * 3,
                                                            "stds": [0] * 3}}})
        assert r.status_code == 422
        assert "porosity" in json.dumps(r.json()["detail"])
        # nothing committed
        items = client.get(f"/sessions/{sid}/ambiguities").json()["items"]
        assert any(i["key"] == "porosity_spec" for i in items)

    def test_answers_then_empty_ambiguities(self, service):
        client, _ = service
        sid = client.post("/sessions", json={"spec": small_report_doc()}).json()["id"]
        items = client.get(f"/sessions/{sid}/ambiguities").json()["items"]
        answers = {i["key"]: i["proposed_default"] for i in items}
        r = client.post(f"/sessions/{sid}/answers", json={"answers": answers})
        assert r.status_code == 200
        assert r.json()["remaining"] == []
        assert client.get(f"/sessions/{sid}/ambiguities").json()["items"] == []

    def test_partial_answers_keep_rest_pending(self, service):
        client, _ = service
        sid = client.post("/sessions", json={"spec": small_report_doc()}).json()["id"]
        items = client.get(f"/sessions/{sid}/ambiguities").json()["items"]
        first = items[0]
        r = client.post(f"/sessions/{sid}/answers",
                        json={"answers": {first["key"]: first["proposed_default"]}})
        remaining = r.json()["remaining"]
        assert first["key"] not in remaining
        assert len(remaining) == len(items) - 1


class TestRunAndResults:
    def test_run_to_certificate(self, service):
        client, _ = service
        sid = client.post("/sessions", json={"spec": small_waterflood(),
                                             "policy": "autonomous"}).json()["id"]
        assert client.post(f"/sessions/{sid}/run").status_code == 202
        st = wait_terminal(client, sid)
        assert st["phase"] == "done" and st["certificate"]

        ledger = client.get(f"/sessions/{sid}/ledger").json()["entries"]
        provs = {e["provenance"] for e in ledger}
        assert provs <= {"user_explicit", "agent_default"}

        rates = client.get(f"/sessions/{sid}/results/rates").json()
        assert rates["well_names"] == ["I1", "P1"]
        assert rates["pvi"][-1] == pytest.approx(1.2, rel=1e-9)

        snaps = client.get(f"/sessions/{sid}/results/snapshots").json()
        assert snaps["count"] == 6
        snap = client.get(f"/sessions/{sid}/results/snapshots?index=2").json()
        assert len(snap["saturation"]) == 40

    def test_conflict_on_concurrent_run(self, service):
        client, _ = service
        sid = client.post("/sessions", json={"spec": small_waterflood(),
                                             "policy": "autonomous"}).json()["id"]
        client.post(f"/sessions/{sid}/run")
        codes = {client.post(f"/sessions/{sid}/run").status_code for _ in range(3)}
        assert codes <= {409}
        wait_terminal(client, sid)

    def test_incremental_diagnostics_concatenate(self, service):
        client, _ = service
        sid = client.post("/sessions", json={"spec": small_waterflood(),
                                             "policy": "autonomous"}).json()["id"]
        client.post(f"/sessions/{sid}/run")
        wait_terminal(client, sid)
        full = client.get(f"/sessions/{sid}/diagnostics?since=-1").json()["events"]
        collected, cursor = [], -1
        for _ in range(1000):
            page = client.get(f"/sessions/{sid}/diagnostics?since={cursor}").json()
            if not page["events"]:
                break
            collected.extend(page["events"][:3])  # small pages
            cursor = page["events"][:3][-1]["event_id"]
        assert [e["event_id"] for e in collected] == [e["event_id"] for e in full]

    def test_diff_between_sessions(self, service):
        client, _ = service
        ids = []
        for strategy in ("layer_batched", "cell_interleaved"):
            doc = dome_doc_small(nx=8, ny=8, nz=3, n_report=4)
            doc["sampling"]["strategy"] = strategy
            doc["fluids"]["density_closure"] = {
                "kind": "constant_compressibility",
                "reference_pressure": "150 bar",
                "compressibility": {"water": 1e-10, "oil": 1e-10}}
            sid = client.post("/sessions", json={"spec": doc,
                                                 "policy": "autonomous"}).json()["id"]
            client.post(f"/sessions/{sid}/run")
            wait_terminal(client, sid)
            ids.append(sid)
        r = client.post("/diffs", json={"ref": {"session": ids[0]},
                                        "cand": {"session": ids[1]}})
        report = r.json()
        assert report["differing_keys"] == ["sampling_strategy"]
        assert not report["fields"]["hash_equal"]["permeability"]

    def test_search_endpoint(self, service):
        client, _ = service
        r = client.get("/search?q=relative permeability&k=3")
        assert r.status_code == 200
        assert any("relative_permeability" in hit["entry_id"]
                   for hit in r.json()["results"])

    def test_restart_preserves_session_data(self, service, tmp_path):
        client, store = service
        sid = client.post("/sessions", json={"spec": small_waterflood(),
                                             "policy": "autonomous"}).json()["id"]
        client.post(f"/sessions/{sid}/run")
        wait_terminal(client, sid)
        # a fresh app over the same store sees the session and its artifacts
        with TestClient(create_app(store)) as client2:
            st = client2.get(f"/sessions/{sid}").json()
            assert st["id"] == sid
            events = client2.get(f"/sessions/{sid}/diagnostics?since=-1").json()["events"]
            assert events[0]["kind"] == "spec-received"
            bundle = load_run_bundle(store.session_dir(sid))
            assert bundle.result.certificate


class TestStore:
    def test_create_reopen_round_trip(self, tmp_path):
        store = SessionStore(tmp_path)
        rec = store.create({"meta": {"title": "x"}}, policy="autonomous")
        again = store.load(rec.session_id)
        assert again.session_id == rec.session_id
        assert again.spec == {"meta": {"title": "x"}}
        assert again.policy == "autonomous"

    def test_atomic_write_never_torn(self, tmp_path):
        # a leftover temp file (simulated crash mid-write) does not corrupt
        # the previous version
        store = SessionStore(tmp_path)
        rec = store.create({"a": 1})
        d = store.session_dir(rec.session_id)
        (d / "record.json.tmp999").write_text('{"version": "torn', encoding="utf-8")
        again = store.load(rec.session_id)
        assert again.session_id == rec.session_id

    def test_torn_event_tail_quarantined(self, tmp_path):
        store = SessionStore(tmp_path)
        rec = store.create({"a": 1})
        store.append_event(rec.session_id, {"event_id": 0, "kind": "spec-received",
                                            "payload": {}, "payload_hash": "x"})
        path = store.session_dir(rec.session_id) / "events.ndjson"
        with open(path, "a") as fh:
            fh.write('{"event_id": 1, "kind": "trunc')  # crash mid-append
        events = store.read_events(rec.session_id)
        assert len(events) == 1

    def test_corrupt_record_quarantined_from_listing(self, tmp_path):
        store = SessionStore(tmp_path)
        good = store.create({"a": 1})
        bad = store.create({"b": 2})
        (store.session_dir(bad.session_id) / "record.json").write_text("{broken")
        listed = [r.session_id for r in store.list_sessions()]
        assert good.session_id in listed
        assert bad.session_id not in listed

    def test_unknown_session(self, tmp_path):
        store = SessionStore(tmp_path)
        with pytest.raises(NotFoundError):
            store.load("missing")


class TestArtifacts:
    def test_run_dir_round_trip(self, tmp_path):
        config, ledger = resolve(parse_spec(small_waterflood()), AUTONOMOUS)
        sim = run_config(config)
        manifest = save_run_dir(tmp_path / "run", sim, ledger)
        assert manifest["certificate"]
        bundle = load_run_bundle(tmp_path / "run")
        assert bundle.config.content_hash == config.content_hash
        assert bundle.result.certificate
        assert bundle.pore_volume == pytest.approx(sim.pore_volume)
        wells_txt = (tmp_path / "run" / "results" / "wells.txt").read_text()
        assert wells_txt.startswith("# time_s well rate_water_m3s")
        assert (tmp_path / "run" / "grid.txt").read_text().startswith("groundloop-grid v1")
