"""CLI surface: subcommands, exit codes, artifact locations."""

import json

import pytest

from lcpbridge.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_capabilities_for_one_platform(capsys):
    code, out, _ = run_cli(capsys, "capabilities", "--platform", "mendix")
    assert code == 0
    assert "Mendix" in out
    assert "export" in out and "import" in out
    assert "JSON" in out and "XLSX" in out


def test_capabilities_lists_all_ten(capsys):
    code, out, _ = run_cli(capsys, "capabilities")
    assert code == 0
    for token in ("Mendix", "OutSystems", "PowerApps", "Appian", "ServiceNow",
                  "Salesforce", "Pegasystems", "Zoho", "ReTool", "Oracle Apex"):
        assert token in out


def test_unknown_platform_is_domain_error(capsys):
    code, _, err = run_cli(capsys, "capabilities", "--platform", "excel")
    assert code == 1
    assert "UNKNOWN_PLATFORM" in err


def test_plan_prints_json(capsys):
    code, out, _ = run_cli(capsys, "plan", "--from", "mendix", "--to", "powerapps")
    assert code == 0
    payload = json.loads(out)
    assert payload["chain"] == ["mendix-json", "workbook"]


def test_migrate_writes_expected_artifacts(tmp_path, capsys, mendix_library_path):
    out_dir = tmp_path / "out"
    code, out, err = run_cli(
        capsys, "migrate", "--from", "mendix", "--to", "powerapps",
        "--input", str(mendix_library_path), "--out", str(out_dir))
    assert code == 0
    for name in ("model.bml", "model.xlsx", "model.xlsx.manifest.json",
                 "loss-report.json"):
        assert (out_dir / name).exists(), name
        assert name in out
    assert "ASSOCIATIONS_UNKNOWN" in err


def test_migrate_without_arguments_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["migrate"])
    assert exit_info.value.code == 2


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["frobnicate"])
    assert exit_info.value.code == 2


def test_help_on_every_subcommand(capsys):
    for sub in ("capabilities", "plan", "migrate", "import", "export", "validate"):
        with pytest.raises(SystemExit) as exit_info:
            main([sub, "--help"])
        assert exit_info.value.code == 0
        assert capsys.readouterr().out


def test_validate_accepts_good_model(tmp_path, capsys):
    model_file = tmp_path / "m.bml"
    model_file.write_text("model M\nclass A {}\n")
    code, out, _ = run_cli(capsys, "validate", "--model", str(model_file))
    assert code == 0
    assert "ok" in out


def test_validate_rejects_bad_model(tmp_path, capsys):
    model_file = tmp_path / "m.bml"
    model_file.write_text("model M\nclass A {}\nclass A {}\n")
    code, _, err = run_cli(capsys, "validate", "--model", str(model_file))
    assert code == 1
    assert "DUPLICATE_CLASS_NAME" in err


def test_import_subcommand(tmp_path, capsys, mendix_library_path):
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(capsys, "import", "mendix-json",
                           "--input", str(mendix_library_path),
                           "--out", str(out_dir))
    assert code == 0
    assert (out_dir / "model.bml").exists()


def test_export_subcommand_reads_what_import_wrote(tmp_path, capsys,
                                                   mendix_library_path):
    work = tmp_path / "work"
    run_cli(capsys, "import", "mendix-json", "--input", str(mendix_library_path),
            "--out", str(work))
    out_dir = tmp_path / "sql"
    code, out, _ = run_cli(capsys, "export", "apex-sql",
                           "--model", str(work / "model.bml"),
                           "--out", str(out_dir), "--dialect", "ansi")
    assert code == 0
    script = (out_dir / "model.sql").read_text()
    assert "CREATE TABLE" in script


def test_export_determinism_through_cli(tmp_path, capsys, mendix_library_path):
    work = tmp_path / "work"
    run_cli(capsys, "import", "mendix-json", "--input", str(mendix_library_path),
            "--out", str(work))
    for out_name in ("a", "b"):
        run_cli(capsys, "export", "workbook", "--model", str(work / "model.bml"),
                "--out", str(tmp_path / out_name))
    assert (tmp_path / "a" / "model.xlsx").read_bytes() == \
        (tmp_path / "b" / "model.xlsx").read_bytes()


def test_missing_input_is_domain_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "import", "mendix-json", "--out", str(tmp_path))
    assert code == 1
    assert "MISSING_INPUT" in err


def test_no_sample_row_flag(tmp_path, capsys, mendix_library_path):
    work = tmp_path / "work"
    run_cli(capsys, "import", "mendix-json", "--input", str(mendix_library_path),
            "--out", str(work))
    out_dir = tmp_path / "book"
    code, _, _ = run_cli(capsys, "export", "workbook",
                         "--model", str(work / "model.bml"),
                         "--out", str(out_dir), "--no-sample-row")
    assert code == 0
    manifest = json.loads((out_dir / "model.xlsx.manifest.json").read_text())
    assert all(s["sample_row"] is None for s in manifest["sheets"])


def test_config_file_supplies_replay_dir(tmp_path, capsys, csv_paths,
                                         screenshot_path, replay_dir,
                                         monkeypatch):
    config = tmp_path / "lcpbridge.toml"
    config.write_text(f"""
[llm]
mode = "replay"
replay_dir = "{replay_dir}"
""", encoding="utf-8")
    out_dir = tmp_path / "out"
    argv = ["migrate", "--from", "powerapps", "--to", "apex",
            "--input"] + [str(p) for p in csv_paths] + \
           ["--image", str(screenshot_path), "--out", str(out_dir),
            "--dialect", "ansi", "--config", str(config)]
    code = main(argv)
    capsys.readouterr()
    assert code == 0
    assert (out_dir / "model.sql").exists()
    assert (out_dir / "merge-report.json").exists()
