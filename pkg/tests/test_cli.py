"""CLI subcommands, exit codes, and CLI/API event-log equivalence."""

import pytest

from tapecat.cli import main


def run_cli(tmp_path, *argv):
    """Invoke the CLI against a store under tmp_path, capturing nothing;
    returns the exit code."""
    store = str(tmp_path / "catalog.tlog")
    prefix = ["--store", store, "--id-source", "seq"]
    return main(prefix + list(argv))


def test_unknown_subcommand_exits_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2


def test_missing_required_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["accession"])   # --id is required
    assert err.value.code == 2


def test_operator_and_accession_flow(tmp_path, capsys):
    assert run_cli(tmp_path, "operator-add", "--name", "Maria Nowak") == 0
    operator = capsys.readouterr().out.strip()
    assert operator.startswith("urn:tapecat:")

    code = run_cli(tmp_path, "--operator", operator, "accession",
                   "--id", "FHKD-0001", "--part", "tape", "--part", "inlay",
                   "--source-name", "Anna Nowak",
                   "--timespan", "2024-05-01T10:00/2024-05-01T10:20")
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("set urn:tapecat:")
    assert out.count("part urn:tapecat:") == 2
    assert "identifier urn:tapecat:" in out
    assert "source urn:tapecat:" in out


def test_domain_error_exits_1(tmp_path, capsys):
    run_cli(tmp_path, "operator-add", "--name", "Maria")
    operator = capsys.readouterr().out.strip()
    args = ["--operator", operator, "accession", "--id", "FHKD-0001",
            "--part", "tape", "--timespan", "2024/2024"]
    assert run_cli(tmp_path, *args) == 0
    capsys.readouterr()
    assert run_cli(tmp_path, *args) == 1   # duplicate inventory id
    assert "already in use" in capsys.readouterr().err


def test_report_backlog_empty(tmp_path, capsys):
    assert run_cli(tmp_path, "report", "backlog") == 0
    out = capsys.readouterr().out
    assert "# backlog (0 rows)" in out


def test_workflow_without_operator_is_refused(tmp_path, capsys):
    code = run_cli(tmp_path, "accession", "--id", "X-1", "--part", "tape")
    assert code == 1
    assert "no operator configured" in capsys.readouterr().err


def test_full_session_and_reports(tmp_path, capsys):
    run_cli(tmp_path, "operator-add", "--name", "Maria")
    operator = capsys.readouterr().out.strip()
    base = ["--operator", operator]
    ts = ["--timespan", "2024-05-01T10:00/2024-05-01T11:00"]

    run_cli(tmp_path, *base, "accession", "--id", "FHKD-0001",
            "--part", "tape", "--part", "inlay", *ts)
    out = capsys.readouterr().out
    tape = [line.split()[1] for line in out.splitlines()
            if line.startswith("part")][0]

    run_cli(tmp_path, *base, "equipment-add", "--name", "Unitra M531", *ts)
    recorder = capsys.readouterr().out.strip()

    assert run_cli(tmp_path, "report", "backlog") == 0
    assert tape in capsys.readouterr().out

    assert run_cli(tmp_path, *base, "digitize", "--tape", tape,
                   "--recorder", recorder, "--file", "/nas/a.wav",
                   "--place", "NAS", *ts) == 0
    audio = capsys.readouterr().out.strip()

    assert run_cli(tmp_path, "report", "backlog") == 0
    assert tape not in capsys.readouterr().out

    assert run_cli(tmp_path, "report", "unverified") == 0
    assert audio in capsys.readouterr().out

    assert run_cli(tmp_path, "audit", tape) == 0
    audit_out = capsys.readouterr().out
    assert "accession" in audit_out and "digitization" in audit_out

    assert run_cli(tmp_path, "show", tape) == 0
    show_out = capsys.readouterr().out
    assert "a E22" in show_out and "P106" in show_out

    assert run_cli(tmp_path, "report", "consistency") == 0
    assert "(0 rows)" in capsys.readouterr().out


def test_ingest_tosec_manifest(tmp_path, capsys):
    run_cli(tmp_path, "operator-add", "--name", "Maria")
    operator = capsys.readouterr().out.strip()
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("Amidar (1982)(Parker Brothers)(US)[!].bin\n"
                        "Zybex (1988)(Zeppelin Games)(EU).tzx\n"
                        "broken.bin\n", encoding="utf-8")
    code = run_cli(tmp_path, "--operator", operator, "ingest-tosec",
                   "--manifest", str(manifest),
                   "--timespan", "2024/2024")
    captured = capsys.readouterr()
    assert code == 1   # partial failure surfaces in the exit code
    assert "ok 2, errors 1" in captured.out
    assert "broken.bin" in captured.err


def test_export_import_roundtrip_files(tmp_path, capsys):
    run_cli(tmp_path, "operator-add", "--name", "Maria")
    operator = capsys.readouterr().out.strip()
    run_cli(tmp_path, "--operator", operator, "accession", "--id", "RT-1",
            "--part", "tape", "--timespan", "2024/2024")
    capsys.readouterr()
    export_path = tmp_path / "dump.ttl"
    assert run_cli(tmp_path, "export", "-o", str(export_path)) == 0
    assert export_path.exists()

    other = tmp_path / "other"
    other.mkdir()
    assert main(["--store", str(other / "catalog.tlog"), "--id-source", "seq",
                 "import", str(export_path)]) == 0
    out = capsys.readouterr().out
    assert "imported" in out
    # importing into the now-populated store is refused
    assert main(["--store", str(other / "catalog.tlog"), "--id-source", "seq",
                 "import", str(export_path)]) == 1


def test_config_file_and_env(tmp_path, capsys, monkeypatch):
    config = tmp_path / "tapecat.conf"
    store = tmp_path / "from-config.tlog"
    config.write_text(f"store_path = {store}\nid_source = seq\n",
                      encoding="utf-8")
    assert main(["--config", str(config), "operator-add", "--name", "X"]) == 0
    capsys.readouterr()
    assert store.exists()

    env_store = tmp_path / "from-env.tlog"
    monkeypatch.setenv("TAPECAT_STORE", str(env_store))
    monkeypatch.setenv("TAPECAT_ID_SOURCE", "seq")
    assert main(["operator-add", "--name", "Y"]) == 0
    capsys.readouterr()
    assert env_store.exists()
    # flags beat the environment
    flag_store = tmp_path / "from-flag.tlog"
    assert main(["--store", str(flag_store), "operator-add", "--name", "Z"]) == 0
    capsys.readouterr()
    assert flag_store.exists()


def test_cli_and_api_produce_identical_logs(tmp_path, capsys):
    """Same inputs through either surface yield byte-identical event logs."""
    from fastapi.testclient import TestClient
    from tapecat.config import Config, open_store
    from tapecat.service import create_app

    ts = "2024-05-01T10:00/2024-05-01T10:20"
    cli_store = tmp_path / "via-cli.tlog"
    main(["--store", str(cli_store), "--id-source", "seq",
          "operator-add", "--name", "Maria Nowak"])
    operator = capsys.readouterr().out.strip()
    main(["--store", str(cli_store), "--id-source", "seq",
          "--operator", operator, "accession", "--id", "FHKD-0001",
          "--part", "tape", "--part", "inlay", "--source-name", "Anna Nowak",
          "--source-address", "", "--source-kind", "donor",
          "--timespan", ts])
    capsys.readouterr()

    api_store = tmp_path / "via-api.tlog"
    graph = open_store(Config(store_path=str(api_store), id_source="seq"))
    client = TestClient(create_app(graph))
    response = client.post("/api/operators", json={"name": "Maria Nowak"})
    operator_api = response.json()["data"]["iri"]
    response = client.post("/api/workflows/accession", json={
        "operator": operator_api, "inventory_id": "FHKD-0001",
        "parts": [{"kind": "tape"}, {"kind": "inlay"}],
        "source": {"name": "Anna Nowak", "address": "", "kind": "donor"},
        "timespan": ts})
    assert response.status_code == 201
    graph.sink.close()

    assert cli_store.read_bytes() == api_store.read_bytes()
