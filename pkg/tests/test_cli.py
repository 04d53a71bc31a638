import json
import subprocess
import sys

import numpy as np
import pytest

from almostsd import io as aio
from almostsd.cli import main
from almostsd.errors import InputError
from almostsd.scenarios import get_scenario, simulate_pair


def write(path, text):
    path.write_text(text)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pair(tmp_path):
    x, y = simulate_pair(get_scenario("2"), 400, seed=1, run=0)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    aio.write_sample_csv(x.sorted_values, p1, "wage")
    aio.write_sample_csv(y.sorted_values, p2, "wage")
    return str(p1), str(p2)


class TestIngest:
    def test_headerless(self, tmp_path):
        s, rep = aio.ingest(write(tmp_path / "x.csv", "1\n3\n"))
        assert s.sorted_values.tolist() == [1.0, 3.0]
        assert rep.n == 2 and rep.skipped == 0 and rep.mean == 2.0

    def test_header_and_blank(self, tmp_path):
        s, rep = aio.ingest(write(tmp_path / "x.csv", "wage\n1.5\n\n2.5\nNA\n4\n"), "wage")
        assert rep.n == 3 and rep.skipped == 2
        assert (rep.min, rep.max) == (1.5, 4.0)

    def test_tsv_two_columns(self, tmp_path):
        path = write(tmp_path / "x.tsv", "a\tb\n1\t5\n2\t\n3\t7\n")
        (xa, ra), (xb, rb) = aio.read_columns(path, ["a", "b"])
        assert xa.tolist() == [1, 2, 3] and xb.tolist() == [5, 7] and rb.skipped == 1

    def test_column_by_index(self, tmp_path):
        path = write(tmp_path / "x.csv", "1,10\n2,20\n")
        (x, rep), = aio.read_columns(path, ["1"])
        assert x.tolist() == [10, 20]

    def test_round_trip(self, tmp_path):
        x = get_scenario("3").pop1.sample(500, np.random.default_rng(3))
        aio.write_sample_csv(x, tmp_path / "s.csv")
        s, _ = aio.ingest(tmp_path / "s.csv")
        np.testing.assert_array_equal(s.sorted_values, np.sort(x))

    @pytest.mark.parametrize("text", ["x\nabc\n", "", "wage\n\n"])
    def test_errors(self, tmp_path, text):
        with pytest.raises(InputError):
            aio.ingest(write(tmp_path / "x.csv", text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            aio.ingest(tmp_path / "nope.csv")


class TestCommands:
    def test_test_json(self, pair, capsys):
        code, out, _ = run(["test", *pair, "--B", "100", "--epsilon", "0.1"], capsys)
        doc = json.loads(out)
        assert code == 0
        assert doc["schema_version"] == aio.SCHEMA_VERSION
        assert isinstance(doc["result"]["reject"], bool)
        assert 0 <= doc["result"]["epsilon_hat0"] <= 1
        assert doc["config"]["B"] == 100 and doc["seed"] == 0

    def test_deterministic_bytes(self, pair, tmp_path, capsys):
        outs = []
        for i, w in enumerate(("1", "3")):
            target = tmp_path / f"o{i}.json"
            assert run(["test", *pair, "--B", "60", "--seed", "5", "--workers", w, "--out", str(target)],
                       capsys)[0] == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]

    def test_both_directions_case2(self, pair, capsys):
        code, out, _ = run(["test", *pair, "--B", "50", "--method", "case2", "--direction", "both"], capsys)
        res = json.loads(out)["result"]["by_direction"]
        assert code == 0 and set(res) == {"12", "21"}
        assert res["12"]["statistic"] is not None

    def test_unsupported_combination(self, pair, capsys):
        code, out, err = run(["test", *pair, "--method", "case2", "--variant", "b"], capsys)
        assert code != 0 and out == ""
        assert json.loads(err)["error"]["category"] == "parameter"

    def test_bad_input_category(self, tmp_path, capsys):
        bad = write(tmp_path / "bad.csv", "x\nfoo\n")
        code, _, err = run(["index", bad, bad], capsys)
        assert code == 3 and json.loads(err)["error"]["category"] == "input"

    def test_precondition_category(self, tmp_path, capsys):
        neg = write(tmp_path / "neg.csv", "-1\n2\n")
        code, _, err = run(["index", neg, neg, "--order", "lorenz"], capsys)
        assert json.loads(err)["error"]["category"] == "precondition" and code == 4

    def test_index_and_mvr(self, pair, capsys):
        code, out, _ = run(["index", *pair, "--order", "second"], capsys)
        doc = json.loads(out)["result"]
        assert code == 0 and abs(doc["index"]["signed"]) <= doc["index"]["abs"]
        code, out, _ = run(["mvr", *pair, "--B", "50"], capsys)
        d = json.loads(out)["result"]["directions"]
        assert d["12"]["epsilon_hat0"] + d["21"]["epsilon_hat0"] == pytest.approx(1.0)
        assert d["12"]["ci"][0] <= d["12"]["ci"][1]

    def test_single_file_two_columns(self, tmp_path, capsys):
        path = write(tmp_path / "two.csv", "men,women\n1,2\n3,4\n5,\n")
        code, out, _ = run(["index", path, "--columns", "men,women"], capsys)
        doc = json.loads(out)["result"]
        assert code == 0 and doc["ingest"][1]["skipped"] == 1

    def test_simulate_csv(self, capsys):
        code, out, _ = run(["simulate", "--scenario", "2", "--n", "200", "--N", "3", "--B", "20",
                            "--epsilons", "0.02,0.1", "--format", "csv", "--workers", "1"], capsys)
        lines = out.strip().splitlines()
        assert code == 0 and lines[0] == "epsilon,rejection_rate" and len(lines) == 3

    def test_oracle(self, capsys):
        code, out, _ = run(["oracle", "--scenario", "2"], capsys)
        row = json.loads(out)["result"]["scenarios"][0]
        assert code == 0 and row["epsilon0"] == pytest.approx(0.036160, abs=1e-4)

    def test_diagnose(self, pair, capsys):
        code, out, _ = run(["diagnose", *pair], capsys)
        doc = json.loads(out)["result"]
        assert code == 0 and set(doc["orders"]) == {"first", "second", "stop_loss", "lorenz"}
        assert doc["tail"]["warnings"]

    def test_plot_data_and_figures(self, pair, tmp_path, capsys):
        d = tmp_path / "plots"
        code, _, _ = run(["test", *pair, "--B", "40", "--plot-data", str(d), "--figures"], capsys)
        assert code == 0
        meta = json.loads((d / "plot_meta.json").read_text())
        assert "log_scale_hint" in meta
        for name in meta["files"]:
            assert (d / name).stat().st_size > 0
        assert (d / "index_cloud_12.png").exists()
        header = (d / "index_cloud_12.csv").read_text().splitlines()[0]
        assert header == "replicate,signed,abs,mvr"

    def test_power_curve_plot(self, tmp_path, capsys):
        d = tmp_path / "pc"
        code, _, _ = run(["simulate", "--n", "100", "--N", "2", "--B", "10", "--epsilons", "0.1,0.3",
                          "--plot-data", str(d), "--figures", "--workers", "1", "--out", str(tmp_path / "o.json")],
                         capsys)
        assert code == 0 and (d / "power_curve.png").exists()
        assert (d / "power_curve.csv").read_text().startswith("epsilon,rejection_rate")

    def test_figures_need_plot_dir(self, pair, capsys):
        code, _, err = run(["index", *pair, "--figures"], capsys)
        assert code == 2 and "plot-data" in err

    def test_module_entry_point(self, pair):
        proc = subprocess.run([sys.executable, "-m", "almostsd", "index", *pair], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["command"] == "index"
