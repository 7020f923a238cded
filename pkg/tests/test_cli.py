import json
import os

import numpy as np
import pytest

from kinplap.cli import main
from kinplap.fields import Field


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestExponentsCommand:
    def test_reference_json(self, workdir, capsys):
        assert main(["exponents", "--d", "1", "--p", "2/1", "--mu", "2/1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["table"]["q"]["rational"] == "3/1"
        assert payload["table"]["beta"]["rational"] == "3/2"
        assert payload["table"]["admissible"] is True
        assert payload["p_window"] == ["8/5", "4/1"]

    def test_transfer_block(self, workdir, capsys):
        assert main(["exponents", "--d", "1", "--p", "2/1", "--q", "5/2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["transfer"]["s"]["rational"] == "2/15"
        assert payload["transfer"]["alpha_s"]["rational"] == "2/3"

    def test_sweep_csv(self, workdir):
        assert main(["exponents", "--sweep", "--out", "sweep.csv",
                     "--p-range", "8/5:4:6", "--mu-range", "11/10:5:6"]) == 0
        lines = open("sweep.csv").read().splitlines()
        assert lines[0].startswith("p,mu,admissible,reason,q,beta")
        assert len(lines) == 1 + 36

    def test_missing_config_file_exit2(self, workdir):
        assert main(["exponents", "--config", "nope.json"]) == 2

    def test_unknown_config_keys_rejected(self, workdir):
        with open("cfg.json", "w") as fh:
            json.dump({"bogus_key": 1}, fh)
        assert main(["exponents", "--config", "cfg.json"]) == 2


class TestFastLemmaCommand:
    def test_reference_converges(self, workdir, capsys):
        assert main(["fast-lemma", "--C1", "1", "--b", "2", "--delta", "1",
                     "--Y0", "1/2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["converged"] is True
        assert payload["delta0"] == 0.5

    def test_trace_csv(self, workdir):
        assert main(["fast-lemma", "--C1", "1", "--b", "2", "--delta", "1",
                     "--Y0", "1/4", "--out", "lemma.json"]) == 0
        assert os.path.exists("lemma.json")
        assert os.path.exists("lemma_trace.csv")


class TestSolveCommand:
    def test_writes_field_and_diagnostics(self, workdir):
        assert main(["solve", "--p", "2.0", "--t-end", "0.1", "--nx", "24",
                     "--nv", "24"]) == 0
        f = Field.load("solution.kpf")
        assert f.shape[1] == 24
        lines = open("solve_diagnostics.csv").read().splitlines()
        assert lines[0].startswith("step,t,mass,l2,max,cfl_dt")
        assert lines.__len__() > 3

    def test_config_file_overrides_flags(self, workdir):
        with open("cfg.json", "w") as fh:
            json.dump({"nx": 16, "nv": 16, "t_end": 0.05}, fh)
        assert main(["solve", "--nx", "64", "--config", "cfg.json"]) == 0
        assert Field.load("solution.kpf").shape[1] == 16


class TestDeterminism:
    def test_byte_identical_reports(self, workdir):
        args = ["trajectory-check", "--beta", "1.5", "--samples", "9",
                "--seed", "11", "--out", "a.csv"]
        assert main(args) == 0
        a = open("a.csv", "rb").read()
        args[-1] = "b.csv"
        assert main(args) == 0
        assert a == open("b.csv", "rb").read()

    def test_reports_embed_hash_and_version(self, workdir):
        assert main(["kernel-norms", "--taus", "0.5,1.0,2.0", "--n", "16",
                     "--out", "kn.csv"]) == 0
        header, first = open("kn.csv").read().splitlines()[:2]
        assert header.endswith("config_hash,version")
        assert first.split(",")[-1] == "0.1.0"

    def test_csv_lf_endings(self, workdir):
        assert main(["kernel-norms", "--taus", "0.5,1.0", "--n", "12",
                     "--out", "kn.csv"]) == 0
        raw = open("kn.csv", "rb").read()
        assert b"\r" not in raw


class TestVerifySubcommands:
    def test_mollify_check(self, workdir):
        assert main(["mollify-check", "--out", "m.csv"]) == 0
        rows = open("m.csv").read().splitlines()
        assert any("kernel_unit_mass" in r for r in rows)

    def test_verify_energy(self, workdir):
        assert main(["verify-energy", "--p", "2.0", "--nx", "40", "--nv", "32",
                     "--out", "e.csv"]) == 0
        assert any(r.startswith("C_meas") for r in open("e.csv").read().splitlines())

    def test_verify_transfer(self, workdir):
        assert main(["verify-transfer", "--n", "64", "--out", "t.csv"]) == 0
        lines = open("t.csv").read().splitlines()
        assert lines[0].startswith("h,quotient,s")
