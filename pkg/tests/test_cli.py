import json

import pytest

from fixtures import dome_doc_small, waterflood_doc
from groundloop.hashing import canonical_json
from groundloop.service.cli import main


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(canonical_json(doc), encoding="utf-8")
    return str(path)


def small_waterflood():
    doc = waterflood_doc()
    doc["mesh"]["nx"] = 40
    doc["wells"]["producers"]["placement"] = [[39, 0]]
    doc["schedule"]["n_report_steps"] = 6
    return doc


class TestCli:
    def test_resolve_writes_config_and_ledger(self, tmp_path, capsys):
        spec = write_spec(tmp_path, small_waterflood())
        rc = main(["resolve", spec, "--policy", "autonomous",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["entries"] == 20
        assert (tmp_path / "out" / "config.json").exists()
        assert (tmp_path / "out" / "ledger.json").exists()

    def test_simulate_writes_run_dir_with_certificate(self, tmp_path, capsys):
        spec = write_spec(tmp_path, small_waterflood())
        main(["resolve", spec, "--out", str(tmp_path / "o")])
        capsys.readouterr()
        rc = main(["simulate", str(tmp_path / "o" / "config.json"),
                   "--ledger", str(tmp_path / "o" / "ledger.json"),
                   "--out", str(tmp_path / "run")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["certificate"] is True
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["certificate"] is True

    def test_diff_identical_dirs_all_equal(self, tmp_path, capsys):
        spec = write_spec(tmp_path, small_waterflood())
        main(["resolve", spec, "--out", str(tmp_path / "o")])
        main(["simulate", str(tmp_path / "o" / "config.json"),
              "--out", str(tmp_path / "run")])
        capsys.readouterr()
        rc = main(["diff", str(tmp_path / "run"), str(tmp_path / "run")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["all_equal"] is True and out["differing_keys"] == []

    def test_degrade_then_reconstruct(self, tmp_path, capsys):
        spec = write_spec(tmp_path, dome_doc_small())
        rc = main(["degrade", spec, "--level", "journal",
                   "--out", str(tmp_path / "journal.json")])
        assert rc == 0
        capsys.readouterr()
        degraded = json.loads((tmp_path / "journal.json").read_text())
        assert degraded["meta"]["level"] == "journal"
        assert "sampling" not in degraded
        rc = main(["reconstruct", spec, "--level", "report",
                   "--out", str(tmp_path / "recon")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert "sampling_seed" in out["agent_defaults"]

    def test_audit_reports_tacit_closure(self, tmp_path, capsys):
        # a hand-assembled ledger that misses the closure decision
        from groundloop.modelspec import assemble_unaudited, parse_spec
        doc = dome_doc_small()
        spec_path = write_spec(tmp_path, doc)
        config, ledger = assemble_unaudited(parse_spec(doc))
        (tmp_path / "config.json").write_text(
            canonical_json(config.to_document()), encoding="utf-8")
        (tmp_path / "ledger.json").write_text(canonical_json(
            {"config_hash": ledger.config_hash,
             "entries": ledger.to_records()}), encoding="utf-8")
        rc = main(["audit", str(tmp_path / "config.json"), str(tmp_path / "ledger.json")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert "density_closure" in out["tacit_keys"]

    def test_search(self, capsys):
        rc = main(["search", "well", "-k", "5"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["results"][0]["entry_id"] == "doc:wells_guide"

    def test_replay(self, tmp_path, capsys):
        from groundloop.modelspec import AUTONOMOUS
        from groundloop.orchestration import run_loop
        state, session = run_loop(small_waterflood(), AUTONOMOUS)
        log_path = tmp_path / "events.ndjson"
        log_path.write_text(session.log.to_ndjson(), encoding="utf-8")
        rc = main(["replay", str(log_path)])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["phase"] == "done"
        assert out["config_hash"] == state.config.content_hash

    def test_domain_error_exit_one_with_json_stderr(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"mesh": {"nx": -2}}), encoding="utf-8")
        rc = main(["resolve", str(bad)])
        assert rc == 1
        err = json.loads(capsys.readouterr().err)
        assert "code" in err and "message" in err

    def test_usage_error_exit_two(self):
        with pytest.raises(SystemExit) as ei:
            main(["frobnicate"])
        assert ei.value.code == 2
