"""Command-line contract: subcommands, output formats, exit codes.

Exit codes: 0 success, 1 usage errors, 2 data errors.
"""

import pytest

from hierclust import cli_main


@pytest.fixture
def line_csv(tmp_path):
    path = tmp_path / "line.csv"
    path.write_text("0.0\n1.0\n5.0\n")
    return str(path)


def run(capsys, argv):
    code = cli_main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ----------------------------------------------------------------------
# exit codes


def test_unknown_flag_is_usage_error(capsys, line_csv):
    code, _, err = run(capsys, ["cluster", "--points", line_csv, "--algo", "bkm", "--bogus"])
    assert code == 1
    assert "usage" in err


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, err = run(capsys, ["frobnicate"])
    assert code == 1


def test_missing_file_is_data_error(capsys):
    code, _, err = run(capsys, ["cluster", "--points", "/no/such.csv", "--algo", "avg"])
    assert code == 2
    assert "error" in err


def test_bad_tree_file_is_data_error(capsys, tmp_path, line_csv):
    bad = tmp_path / "t.txt"
    bad.write_text("((0,1)")
    code, _, err = run(
        capsys, ["eval", "--objective", "revenue", "--points", line_csv, "--tree-file", str(bad)]
    )
    assert code == 2


def test_enumerate_opt_size_cap(capsys, tmp_path):
    big = tmp_path / "big.csv"
    big.write_text("\n".join(str(float(i)) for i in range(9)) + "\n")
    code, _, err = run(capsys, ["enumerate-opt", "--objective", "revenue", "--points", str(big)])
    assert code == 2


# ----------------------------------------------------------------------
# pipelines


def test_cluster_emits_tree(capsys, line_csv):
    code, out, _ = run(
        capsys, ["cluster", "--points", line_csv, "--algo", "bkm", "--solver", "exhaustive"]
    )
    assert code == 0
    assert out.strip() == "((0,1),2)"


def test_eval_prints_per_split_csv(capsys, tmp_path, line_csv):
    tree_file = tmp_path / "t.txt"
    tree_file.write_text("((0,1),2)\n")
    code, out, _ = run(
        capsys,
        ["eval", "--objective", "revenue", "--points", line_csv, "--tree-file", str(tree_file)],
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "parent_size,left_size,right_size,value"
    assert lines[-1] == "total,,,3.0"


def test_eval_ckmm(capsys, tmp_path, line_csv):
    tree_file = tmp_path / "t.txt"
    tree_file.write_text("((0,1),2)\n")
    code, out, _ = run(
        capsys,
        ["eval", "--objective", "ckmm", "--points", line_csv, "--tree-file", str(tree_file)],
    )
    assert code == 0
    assert out.strip().splitlines()[-1] == "total,,,29.0"


def test_enumerate_opt_output(capsys, line_csv):
    code, out, _ = run(capsys, ["enumerate-opt", "--objective", "revenue", "--points", line_csv])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "objective,revenue"
    assert lines[1] == "optimal_value,3.0"
    assert lines[2] == "tree,((0,1),2)"


def test_gen_ultrametric_embed_cluster_roundtrip(capsys, tmp_path):
    spec_file = tmp_path / "spec.txt"
    points_file = tmp_path / "pts.csv"
    code, _, _ = run(
        capsys, ["gen-ultrametric", "--n", "6", "--seed", "5", "--out", str(spec_file)]
    )
    assert code == 0
    assert ":" in spec_file.read_text()
    code, _, _ = run(capsys, ["embed", "--spec", str(spec_file), "--out", str(points_file)])
    assert code == 0
    rows = points_file.read_text().strip().splitlines()
    assert len(rows) == 6 and len(rows[0].split(",")) == 10
    code, out, _ = run(
        capsys,
        ["cluster", "--points", str(points_file), "--algo", "bkm", "--solver", "exhaustive"],
    )
    assert code == 0


def test_synth_writes_points(capsys, tmp_path):
    out_file = tmp_path / "pts.csv"
    code, _, _ = run(
        capsys,
        ["synth", "--k", "2", "--n", "10", "--dim", "3", "--seed", "4", "--out", str(out_file)],
    )
    assert code == 0
    rows = out_file.read_text().strip().splitlines()
    assert len(rows) == 10 and len(rows[0].split(",")) == 3


def test_synth_deterministic_bytes(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["synth", "--k", "3", "--n", "30", "--dim", "2", "--seed", "8"]
    assert run(capsys, args + ["--out", str(a)])[0] == 0
    assert run(capsys, args + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_random_algo_seeded(capsys, line_csv):
    code, out1, _ = run(capsys, ["cluster", "--points", line_csv, "--algo", "random", "--seed", "5"])
    code2, out2, _ = run(capsys, ["cluster", "--points", line_csv, "--algo", "random", "--seed", "5"])
    assert code == code2 == 0
    assert out1 == out2


def test_experiment_table1(capsys, tmp_path):
    report = tmp_path / "rep.csv"
    args = [
        "experiment", "table1",
        "--synth-k", "2", "--synth-n", "50", "--synth-dim", "2", "--synth-seed", "1",
        "--subsample", "20", "--runs", "2", "--seed", "3",
        "--algo", "random", "--objective", "revenue",
        "--out", str(report),
    ]
    code, _, _ = run(capsys, args)
    assert code == 0
    text = report.read_text()
    assert "# summary" in text
    assert "upper_bound,revenue,190.0,0.0" in text


def test_experiment_table1_needs_input(capsys):
    code, _, err = run(capsys, ["experiment", "table1", "--subsample", "10"])
    assert code == 1


def test_experiment_random_bad(capsys):
    code, out, _ = run(
        capsys, ["experiment", "random-bad", "--sizes", "3,4", "--trials", "10", "--seed", "2"]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,mean_ratio,std_ratio,reference_ratio"
    assert len(lines) == 3
    for line in lines[1:]:
        assert line.split(",")[3] == "1.0"


def test_ingest_reporting_on_stderr(capsys, tmp_path):
    mixed = tmp_path / "mixed.csv"
    mixed.write_text("1.0,red\n2.0,blue\n")
    code, out, err = run(capsys, ["cluster", "--points", str(mixed), "--algo", "single"])
    assert code == 0
    assert "dropped 1" in err
