"""CLI behaviour through main(argv): records, formats, exits, determinism."""

import json

import pytest

from kingman.cli import CSV_COLUMNS, SIMULATION_METHODS, main, simulate_records


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def canonical(records):
    return [{k: v for k, v in r.items() if k != "elapsed_us"} for r in records]


def test_simulate_jsonl_records(capsys):
    code, out, err = run_cli(
        capsys, "simulate", "--method", "direct", "--n", "6", "--p", "0.5",
        "--trials", "3", "--seed", "1",
    )
    assert code == 0 and err == ""
    lines = out.strip().splitlines()
    assert len(lines) == 3
    for t, line in enumerate(lines):
        rec = json.loads(line)
        assert set(rec) == set(CSV_COLUMNS)
        assert rec["trial"] == t and rec["n"] == 6 and rec["method"] == "direct"
        assert 1 <= rec["tree_count"] <= 6
        assert sum(rec["sizes"]) == 6
        assert rec["height"] >= 0


def test_simulate_csv_format(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--method", "direct", "--n", "5", "--p", "0.4",
        "--trials", "2", "--seed", "3", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "0" and first[3] == "direct"
    assert ";" in first[6] or first[6].isdigit()  # sizes column is ;-joined


def test_simulate_walk_has_no_structure_fields(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--method", "walk", "--n", "50", "--p", "0.3",
        "--trials", "2", "--seed", "0",
    )
    assert code == 0
    for line in out.strip().splitlines():
        rec = json.loads(line)
        assert rec["height"] is None and rec["sizes"] == []

    code, out, _ = run_cli(
        capsys, "simulate", "--method", "walk", "--n", "50", "--p", "0.3",
        "--trials", "1", "--seed", "0", "--format", "csv",
    )
    row = out.strip().splitlines()[1].split(",")
    assert row[CSV_COLUMNS.index("height")] == ""
    assert row[CSV_COLUMNS.index("sizes")] == ""


@pytest.mark.parametrize("method", SIMULATION_METHODS)
def test_all_methods_run(capsys, method):
    code, out, err = run_cli(
        capsys, "simulate", "--method", method, "--n", "12", "--p", "0.4",
        "--trials", "2", "--seed", "5",
    )
    assert code == 0, err
    assert len(out.strip().splitlines()) == 2


def test_thread_count_does_not_change_canonical_records():
    seq = simulate_records("direct", 10, 0.5, 8, seed=2, threads=1)
    par = simulate_records("direct", 10, 0.5, 8, seed=2, threads=4)
    assert canonical(seq) == canonical(par)


def test_per_trial_streams_are_stable():
    # trial t depends only on (seed, t), so a longer run extends a shorter one
    short = simulate_records("erp", 9, 0.5, 3, seed=7)
    long = simulate_records("erp", 9, 0.5, 6, seed=7)
    assert canonical(short) == canonical(long)[:3]


def test_walk_and_coupling_share_tree_counts():
    # both draw the walk first from the same stream, so tree_count agrees
    # trial by trial and the coupling only adds structure
    walk = simulate_records("walk", 40, 0.3, 5, seed=9)
    coupled = simulate_records("urrt-coupling", 40, 0.3, 5, seed=9)
    for w, c in zip(walk, coupled):
        assert w["tree_count"] == c["tree_count"]
        assert sum(c["sizes"]) == 40 and len(c["sizes"]) == c["tree_count"]


def test_simulate_output_file(tmp_path, capsys):
    out_path = tmp_path / "records.jsonl"
    code, out, _ = run_cli(
        capsys, "simulate", "--method", "walk", "--n", "30", "--p", "0.2",
        "--trials", "2", "--seed", "0", "--output", str(out_path),
    )
    assert code == 0 and out == ""
    assert len(out_path.read_text().strip().splitlines()) == 2


def test_simulate_validation_exits_2(capsys):
    for argv in (
        ["simulate", "--method", "direct", "--n", "0", "--p", "0.5"],
        ["simulate", "--method", "direct", "--n", "4", "--p", "1.5"],
        ["simulate", "--method", "direct", "--n", "4", "--p", "0.5", "--trials", "0"],
        ["simulate", "--method", "walk", "--n", "4", "--p", "0.0"],
        ["simulate", "--method", "urrt-coupling", "--n", "4", "--p", "1.0"],
        ["simulate", "--method", "nope", "--n", "4", "--p", "0.5"],
        ["simulate", "--method", "direct", "--n", "4", "--p", "0.5", "--threads", "0"],
    ):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
        capsys.readouterr()


def test_threads_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("KINGMAN_THREADS", "3")
    code, out, _ = run_cli(
        capsys, "simulate", "--method", "direct", "--n", "8", "--p", "0.5",
        "--trials", "4", "--seed", "1",
    )
    assert code == 0 and len(out.strip().splitlines()) == 4

    monkeypatch.setenv("KINGMAN_THREADS", "soon")
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--method", "direct", "--n", "8", "--p", "0.5"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_verify_counting_exits_0(capsys):
    code, out, err = run_cli(capsys, "verify", "counting")
    assert code == 0, err
    reports = [json.loads(line) for line in out.strip().splitlines()]
    assert all(r["pass"] for r in reports)
    assert {"suite", "statistic", "p_value", "threshold", "pass", "trials", "seed", "notes"} <= set(
        reports[0]
    )


def test_verify_unknown_suite_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "perpetual-motion"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_verify_seed_changes_reports(capsys):
    _, out_a, _ = run_cli(capsys, "verify", "equivalence", "--n", "4", "--trials", "2000", "--seed", "1")
    _, out_b, _ = run_cli(capsys, "verify", "equivalence", "--n", "4", "--trials", "2000", "--seed", "1")
    _, out_c, _ = run_cli(capsys, "verify", "equivalence", "--n", "4", "--trials", "2000", "--seed", "2")
    assert out_a == out_b
    assert out_a != out_c


def test_verify_output_file(tmp_path, capsys):
    path = tmp_path / "reports.jsonl"
    code, out, _ = run_cli(capsys, "verify", "phi", "--output", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text().strip().splitlines()[0])["pass"] is True


def test_verify_bounds_emits_data_rows(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "bounds", "--n", "120", "--p", "0.2", "--trials", "200",
    )
    assert code == 0
    rows = [json.loads(line) for line in out.strip().splitlines()]
    kinds = {row.get("kind") for row in rows}
    assert "bound-curve" in kinds and "excess-decay" in kinds


def test_oracle_exact_text(capsys):
    code, out, err = run_cli(capsys, "oracle", "--n", "2", "--p", "0.5")
    assert code == 0 and err == ""
    assert out == '{"support":[1,2],"prob":[0.5,0.5]}\n'


def test_oracle_point_mass_at_p_one(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--n", "5", "--p", "1.0")
    assert code == 0
    assert json.loads(out) == {"support": [1], "prob": [1.0]}


def test_oracle_capacity_exit_1(capsys):
    code, out, err = run_cli(capsys, "oracle", "--n", "7", "--p", "0.5")
    assert code == 1 and out == ""
    assert "n <= 6" in err


def test_oracle_validation_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["oracle", "--n", "4", "--p", "-0.5"])
    assert exc.value.code == 2
    capsys.readouterr()
