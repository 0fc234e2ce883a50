"""Command-line behavior: flags, output formats, exit codes, evidence logs."""

import json
import sys

import pytest

from ltlsplit.cli import EXIT_AUDIT, EXIT_ENGINE, EXIT_INPUT, EXIT_OK, RunConfig, main
from helpers import spec_text


@pytest.fixture
def intro_file(tmp_path):
    path = tmp_path / "intro.spec"
    path.write_text(spec_text("intro"), encoding="utf-8")
    return path


def write_spec(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestRunConfig:
    def test_defaults(self, intro_file):
        config = RunConfig(intro_file)
        assert config.output_format == "text"
        assert config.order == "decl"

    def test_state_cap_validated(self, intro_file):
        with pytest.raises(ValueError):
            RunConfig(intro_file, state_cap=0)

    def test_external_command_validated(self, intro_file):
        with pytest.raises(ValueError):
            RunConfig(intro_file, engine="external: ")


class TestMain:
    def test_intro_defaults(self, intro_file, capsys):
        assert main([str(intro_file)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "block 1: {t}" in out
        assert "block 2: {v, w, z}" in out
        assert "solver queries: 6" in out

    def test_pair_blocks(self, tmp_path, capsys):
        path = write_spec(tmp_path, "pair.spec", spec_text("pair"))
        assert main([str(path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "block 1: {a}" in out
        assert "block 2: {b}" in out

    def test_json_output(self, intro_file, capsys):
        assert main([str(intro_file), "--format", "json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["env"] == ["p"]
        assert payload["sys"] == ["t", "v", "w", "z"]
        assert payload["blocks"] == [["t"], ["v", "w", "z"]]
        assert payload["queries"] == 6
        assert payload["audits"] == {}

    def test_json_stable_across_runs(self, intro_file, capsys):
        main([str(intro_file), "--format", "json"])
        first = capsys.readouterr().out
        main([str(intro_file), "--format", "json"])
        assert capsys.readouterr().out == first

    def test_verify_flag(self, intro_file, capsys):
        assert main([str(intro_file), "--verify"]) == EXIT_OK
        assert "audit soundness: pass" in capsys.readouterr().out

    def test_minimality_flag(self, intro_file, capsys):
        assert main([str(intro_file), "--verify", "--audit-minimality"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "audit soundness: pass" in out
        assert "audit minimality: pass" in out

    def test_quiet(self, intro_file, capsys):
        assert main([str(intro_file), "--quiet"]) == EXIT_OK
        assert capsys.readouterr().out == ""

    def test_evidence_file(self, intro_file, capsys):
        assert main([str(intro_file), "--log-queries"]) == EXIT_OK
        evidence = intro_file.with_name("intro.spec.evidence.jsonl")
        assert evidence.exists()
        records = [json.loads(line) for line in evidence.read_text().splitlines()]
        assert len(records) == 6
        for record in records:
            assert record["verdict"] in ("SAT", "UNSAT")
            assert (record["witness"] is None) == (record["verdict"] == "UNSAT")
            assert record["millis"] >= 0

    def test_missing_file(self, tmp_path, capsys):
        assert main([str(tmp_path / "nope.spec")]) == EXIT_INPUT
        assert "cannot read" in capsys.readouterr().err

    def test_undeclared_atom_diagnostic(self, tmp_path, capsys):
        path = write_spec(tmp_path, "bad.spec",
                          "env: p\nsys: a\nformula: G(p -> q)\n")
        assert main([str(path)]) == EXIT_INPUT
        err = capsys.readouterr().err
        assert "q" in err and "3:" in err

    def test_syntax_error_exit(self, tmp_path, capsys):
        path = write_spec(tmp_path, "bad.spec", "env: p\nsys: a\nformula: G(p ->\n")
        assert main([str(path)]) == EXIT_INPUT

    def test_state_cap_exhaustion(self, intro_file, capsys):
        assert main([str(intro_file), "--state-cap", "2"]) == EXIT_ENGINE
        assert "state cap" in capsys.readouterr().err

    def test_external_engine(self, intro_file, capsys):
        command = (f"{sys.executable} -c \"import sys; "
                   "from ltlsplit.engine import serve_stdin_queries; "
                   "serve_stdin_queries(sys.stdin, sys.stdout)\"")
        assert main([str(intro_file), "--engine", f"external:{command}"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "block 2: {v, w, z}" in out

    def test_external_engine_failure(self, intro_file, capsys):
        command = f"{sys.executable} -c \"import sys; sys.exit(1)\""
        assert main([str(intro_file), "--engine", f"external:{command}"]) == EXIT_ENGINE

    def test_lex_order(self, intro_file, capsys):
        assert main([str(intro_file), "--order", "lex"]) == EXIT_OK
        assert "block 2: {v, w, z}" in capsys.readouterr().out

    def test_empty_sys_partition(self, tmp_path, capsys):
        path = write_spec(tmp_path, "none.spec", "env: p\nsys:\nformula: G p\n")
        assert main([str(path), "--format", "json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["blocks"] == []
