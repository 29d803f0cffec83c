import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from steercoh import __version__, cli, measures, states, validation


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith(f"# steercoh {__version__} seed=")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


@pytest.fixture
def state_file(tmp_path):
    def make(psi):
        path = tmp_path / "state.json"
        states.save_state(psi, path)
        return str(path)
    return make


class TestMeasures:
    def test_bell(self, capsys, state_file, bell):
        code, out, _ = run(capsys, "measures", state_file(bell))
        doc = json.loads(out)
        m = doc["measures"]
        assert code == 0 and doc["version"] == __version__ and doc["seed"] == 0
        assert m["c1"] == 0 and m["c2_subfid"] == pytest.approx(1) and m["ca_tracenorm"] == pytest.approx(1)
        assert m["c3_newton"] is None

    def test_ghz(self, capsys, state_file, ghz):
        _, out, _ = run(capsys, "measures", state_file(ghz))
        m = json.loads(out)["measures"]
        assert m["c1"] == 0 and m["c2_subfid"] == 0

    def test_mzi(self, capsys, state_file):
        _, out, _ = run(capsys, "measures", state_file(states.mzi_state(0.5)), "--format", "csv")
        (row,) = csv_rows(out)
        assert float(row["c1"]) == pytest.approx(0.5)
        assert float(row["ca_tracenorm"]) == pytest.approx(0.5)
        assert row["c2_subfid"] == "" and (row["dA"], row["dB"], row["dE"]) == ("1", "2", "2")

    def test_qutrit(self, capsys, state_file):
        _, out, _ = run(capsys, "measures", state_file(states.haar_sample((3, 2, 2), 5)))
        m = json.loads(out)["measures"]
        assert m["c3_newton"] == pytest.approx(m["ca_tracenorm"], abs=1e-8)

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "measures", str(tmp_path / "nope.json"))
        assert code == 2 and "error" in err

    def test_bad_norm(self, capsys, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"dims": [1, 2, 1], "amplitudes": [[2, 0], [0, 0]]}))
        code, _, err = run(capsys, "measures", str(path))
        assert code == 2 and "norm" in err

    def test_bad_json(self, capsys, tmp_path):
        path = tmp_path / "s.json"
        path.write_text("{not json")
        assert run(capsys, "measures", str(path))[0] == 2


class TestEnsemble:
    def test_csv_row(self, capsys):
        code, out, _ = run(capsys, "ensemble", "--a", "1", "--K", "1", "--samples", "20000", "--seed", "42")
        (row,) = csv_rows(out)
        assert code == 0
        for key in ("a", "K", "samples", "seed", "mc_mean", "mc_stderr", "closed_form", "z_score"):
            assert key in row
        assert float(row["closed_form"]) == pytest.approx(0.7853982, abs=1e-7)
        assert abs(float(row["z_score"])) <= 4

    def test_c2_k2(self, capsys):
        _, out, _ = run(capsys, "ensemble", "--a", "2", "--K", "2", "--samples", "1000")
        cf = float(csv_rows(out)[0]["closed_form"])
        assert cf == pytest.approx(31 * math.pi / 128, abs=1e-15)
        assert cf == pytest.approx(0.760854, abs=1e-6)

    def test_byte_identical(self, capsys):
        argv = ("ensemble", "--a", "3", "--K", "2", "--samples", "3000", "--seed", "9")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_workers_do_not_change_bytes(self, capsys):
        argv = ("ensemble", "--a", "2", "--K", "2", "--samples", "12000", "--seed", "9")
        assert run(capsys, *argv)[1] == run(capsys, *argv, "--workers", "3")[1]

    def test_fifteen_digits(self, capsys):
        _, out, _ = run(capsys, "ensemble", "--a", "1", "--K", "1", "--samples", "100")
        cf = csv_rows(out)[0]["closed_form"]
        assert cf == f"{math.pi / 4:.15g}"

    def test_json(self, capsys):
        _, out, _ = run(capsys, "ensemble", "--a", "1", "--K", "2", "--samples", "100",
                        "--seed", "3", "--format", "json")
        doc = json.loads(out)
        assert doc["seed"] == 3 and doc["ensemble"]["K"] == 2

    def test_tripartite_reading(self, capsys):
        _, out, _ = run(capsys, "ensemble", "--a", "1", "--K", "1", "--samples", "200",
                        "--reading", "tripartite")
        row = csv_rows(out)[0]
        assert row["effective_K"] == "2" and row["alice_dim"] == "2"

    @pytest.mark.parametrize("argv", [
        ("--a", "1", "--K", "0"),
        ("--a", "1", "--K", "1", "--samples", "5"),
        ("--a", "2", "--K", "1", "--reading", "tripartite"),
    ])
    def test_invalid(self, capsys, argv):
        assert run(capsys, "ensemble", *argv)[0] == 2


class TestMzi:
    def test_steering_rows(self, capsys):
        code, out, _ = run(capsys, "mzi", "--gamma-step", "0.1")
        rows = csv_rows(out)
        assert code == 0 and len(rows) == 11
        first, last = rows[0], rows[-1]
        assert float(first["gamma"]) == 0 and float(first["c1"]) == 0
        assert float(first["c2"]) == pytest.approx(1, abs=1e-12)
        assert float(last["c1"]) == pytest.approx(1, abs=1e-12)
        for r in rows:
            assert float(r["c1"]) == pytest.approx(float(r["gamma"]), abs=1e-12)

    def test_environment_marker(self, capsys):
        _, out, _ = run(capsys, "mzi", "--gamma-end", "0", "--marker", "environment")
        (row,) = csv_rows(out)
        assert float(row["c1"]) == 0 and float(row["c2"]) == 0

    @pytest.mark.parametrize("argv", [
        ("--gamma-start", "0.8", "--gamma-end", "0.2"),
        ("--gamma-step", "0"),
        ("--gamma-end", "1.5"),
    ])
    def test_bad_grid(self, capsys, argv):
        assert run(capsys, "mzi", *argv)[0] == 2


class TestSelftest:
    def test_mutation_caught(self, capsys, monkeypatch):
        def broken(x, y):
            a, b = np.asarray(x.matrix), np.asarray(y.matrix)
            t = np.trace(a @ b).real
            return t + math.sqrt(max(t * t - np.trace(a @ b @ a @ b).real, 0.0))

        monkeypatch.setattr(measures, "sub_fidelity", broken)
        monkeypatch.setattr(validation, "SCALES", {"quick": dict(
            theorem=20, c3=20, steer_states=2, steer_budget=500, mc_samples=1000,
            fid_pairs=20, pure_pairs=20, struct=20)})
        code, out, _ = run(capsys, "selftest", "--scale", "quick")
        assert code == 1
        assert "[FAIL] 1 theorem" in out

    def test_unknown_scale_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["selftest", "--scale", "huge"])
        assert exc.value.code == 2


class TestMakeState:
    @pytest.mark.parametrize("kind, dims", [("bell", [2, 2, 1]), ("ghz", [2, 2, 2]),
                                            ("mzi", [1, 2, 2]), ("haar", [2, 2, 2])])
    def test_kinds(self, capsys, kind, dims):
        _, out, _ = run(capsys, "make-state", kind)
        assert states.state_from_json(json.loads(out)).dims.as_tuple() == tuple(dims)

    def test_out_file_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        run(capsys, "make-state", "mzi-steering", "--gamma", "0.3", "--out", str(path))
        _, out, _ = run(capsys, "measures", str(path))
        m = json.loads(out)["measures"]
        assert m["c1"] == pytest.approx(0.3) and m["c2_subfid"] == pytest.approx(1)


def test_c3_probe(capsys):
    code, out, _ = run(capsys, "c3-probe", "--K", "2", "--samples", "30")
    doc = json.loads(out)["c3_probe"]
    assert code == 0 and doc["max_dev_uhlmann"] < 1e-8


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "steercoh", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
