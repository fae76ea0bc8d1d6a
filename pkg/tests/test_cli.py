import json

import numpy as np
import pytest

from recombination import DiscreteMeasure, validate_reduction
from recombination.cli import main, read_table, InputError


@pytest.fixture
def points_csv(tmp_path):
    rng = np.random.default_rng(0)
    data = np.column_stack([rng.standard_normal((400, 3)), rng.exponential(size=400)])
    path = tmp_path / "pts.csv"
    np.savetxt(path, data, delimiter=",", header="a,b,c,wcol", comments="", fmt="%.17g")
    return path, data


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestReduce:
    @pytest.mark.parametrize("algo", ["basic", "greedy", "greedy-reset", "det", "dnc", "hybrid"])
    def test_json_is_valid(self, capsys, points_csv, algo):
        path, data = points_csv
        code, out, _ = run(capsys, "reduce", path, "--header", "--weights", "wcol", "--algo", algo,
                           "--seed", 7, "--groups", 40)
        assert code == 0
        result = json.loads(out)
        assert set(result) == {"method", "n", "N", "indices", "weights", "tau", "resets",
                               "fallback_used", "wall_time_ms", "max_moment_error"}
        assert (result["n"], result["N"]) == (3, 400)
        m = DiscreteMeasure.from_masses(data[:, :3], data[:, 3])

        class Sol:
            indices = np.array(result["indices"])
            weights = np.array(result["weights"])

        assert validate_reduction(m, Sol).passed

    def test_weight_column_by_index(self, capsys, points_csv):
        path, _ = points_csv
        by_name = run(capsys, "reduce", path, "--header", "--weights", "wcol", "--algo", "greedy")[1]
        by_index = run(capsys, "reduce", path, "--header", "--weights", "3", "--algo", "greedy")[1]
        assert by_name == by_index

    def test_byte_identical(self, capsys, points_csv):
        path, _ = points_csv
        outs = {run(capsys, "reduce", path, "--header", "--algo", "hybrid", "--seed", 3)[1] for _ in range(2)}
        assert len(outs) == 1
        assert json.loads(outs.pop())["wall_time_ms"] is None

    def test_timing(self, capsys, points_csv):
        path, _ = points_csv
        out = run(capsys, "reduce", path, "--header", "--timing")[1]
        assert json.loads(out)["wall_time_ms"] >= 0

    def test_seed_from_environment(self, capsys, points_csv, monkeypatch):
        path, _ = points_csv
        explicit = run(capsys, "reduce", path, "--header", "--algo", "basic", "--seed", 11)[1]
        monkeypatch.setenv("RECOMBINE_SEED", "11")
        assert run(capsys, "reduce", path, "--header", "--algo", "basic")[1] == explicit

    def test_output_file(self, capsys, points_csv, tmp_path):
        path, _ = points_csv
        target = tmp_path / "out.json"
        assert run(capsys, "reduce", path, "--header", "--out", target)[0] == 0
        assert json.loads(target.read_text())["method"] == "hybrid"

    def test_malformed_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3,4\n5,oops\n")
        code, _, err = run(capsys, "reduce", bad)
        assert code == 1
        assert "bad.csv:3" in err

    def test_ragged_line(self, capsys, tmp_path):
        bad = tmp_path / "ragged.csv"
        bad.write_text("1,2\n3\n")
        code, _, err = run(capsys, "reduce", bad)
        assert code == 1 and "ragged.csv:2" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "reduce", tmp_path / "nope.csv")[0] == 1

    def test_escalation_exit_code(self, capsys, tmp_path):
        # a duplicated coordinate defeats every random basis of plain greedy
        rng = np.random.default_rng(1)
        x = rng.standard_normal((300, 3))
        path = tmp_path / "dup.csv"
        np.savetxt(path, np.column_stack([x, x[:, 0]]), delimiter=",")
        code, out, err = run(capsys, "reduce", path, "--algo", "greedy")
        assert code == 2 and out == "" and "SingularBasisPersistent" in err
        code, out, _ = run(capsys, "reduce", path, "--algo", "hybrid")
        assert code == 0 and json.loads(out)["fallback_used"] is True

    def test_read_table_header(self, points_csv):
        path, data = points_csv
        table, names = read_table(path, header=True)
        assert names == ["a", "b", "c", "wcol"]
        np.testing.assert_array_equal(table, data)
        with pytest.raises(InputError):
            read_table(path, header=False)


class TestLsq:
    def test_synthetic(self, capsys):
        code, out, _ = run(capsys, "lsq", "--synth", "N=100000", "d=2", "seed=3")
        assert code == 0
        result = json.loads(out)
        assert len(result["coreset_indices"]) <= 7
        assert result["residual_coreset"] == pytest.approx(result["residual_full"], rel=1e-6)
        np.testing.assert_allclose(result["solution"], result["solution_full"], rtol=1e-6)

    def test_csv_with_deterministic(self, capsys, tmp_path):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((500, 2))
        y = X @ [1.0, -1.0] + 0.1 * rng.standard_normal(500)
        path = tmp_path / "reg.csv"
        np.savetxt(path, np.column_stack([y, X]), delimiter=",", header="y,x1,x2", comments="", fmt="%.17g")
        code, out, _ = run(capsys, "lsq", path, "--header", "--target", "y", "--algo", "deterministic")
        assert code == 0
        result = json.loads(out)
        assert result["method"] == "deterministic"
        np.testing.assert_allclose(result["solution"], result["solution_full"], rtol=1e-6)

    def test_bad_synth(self, capsys):
        assert run(capsys, "lsq", "--synth", "N=ten")[0] == 1
        assert run(capsys, "lsq")[0] == 1


class TestBench:
    def test_rows(self, capsys):
        code, out, _ = run(capsys, "bench", "--gen", "gauss15", "--algos", "basic,greedy",
                           "--reps", 5, "--Ns", "1000,10000")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# gen=gauss15")
        assert lines[1] == "algo,N,n,seed,tau,resets,wall_time_ms,valid"
        rows = [line.split(",") for line in lines[2:]]
        assert len(rows) == 20
        assert all(r[-1] == "true" for r in rows)
        # both algorithms see the same instance seed
        seeds = {(r[1], r[3]) for r in rows}
        assert len(seeds) == 10

    def test_byte_identical(self, capsys):
        argv = ("bench", "--gen", "expmix20", "--algos", "greedy,hybrid", "--reps", 2, "--Ns", "500")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_metadata_mentions_generator(self, capsys):
        out = run(capsys, "bench", "--gen", "expmix20", "--algos", "det", "--reps", 1, "--Ns", "300")[1]
        assert "sign drawn once per run" in out.splitlines()[0]

    def test_unknown_algo(self, capsys):
        assert run(capsys, "bench", "--algos", "magic", "--reps", 1, "--Ns", "100")[0] == 1
