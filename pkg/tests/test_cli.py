import json
import os
import subprocess
import sys

import numpy as np
import pytest

from cifc.channel import channel_from_kernel, channel_to_dict, save_channel
from cifc.cli import main
from cifc.schemes import emit_table, scheme_clipper_22, table_to_csv
from cifc.channel import asymmetric_clipper


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def region_rows(doc):
    return sorted((tuple(sorted(c["coeffs"].items())), c["rhs"]) for c in doc["region"]["constraints"])


def test_eval_det_example_one(capsys):
    code, out, _ = run(["eval", "--channel", "builtin:asymmetric_clipper", "--bound", "det",
                        "--input", "uniform:4x8"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert region_rows(doc) == sorted([((("R1", 1),), 2.0), ((("R2", 1),), 3.0),
                                       ((("R1", 1), ("R2", 1)), 4.0)])
    assert [2, 2] in doc["region"]["vertices"] and [1, 3] in doc["region"]["vertices"]


def test_eval_det_example_two(capsys):
    code, out, _ = run(["eval", "--channel", "builtin:symmetric_clipper", "--bound", "det",
                        "--input", "table:exII", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines() == ["R1,R2", "0,0", "1,0", "1,2", "0,2"]


def test_eval_with_embedded_assignment(capsys):
    code, out, _ = run(["eval", "--channel", "builtin:asymmetric_clipper", "--bound", "rtd_inner",
                        "--input", "uniform:4x8", "--assignment", "embed:U1pb=y1,U2pb=y2"], capsys)
    assert code == 0
    assert [2, 2] in json.loads(out)["region"]["vertices"]


def test_eval_channel_file(tmp_path, capsys):
    path = tmp_path / "ch.json"
    k = np.random.default_rng(0).dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2)
    save_channel(channel_from_kernel(k), str(path))
    code, out, _ = run(["eval", "--channel", str(path), "--bound", "marginal_outer",
                        "--input", "uniform:2x2"], capsys)
    assert code == 0 and json.loads(out)["region"]["vertices"]


@pytest.mark.parametrize("args", [
    ["eval", "--channel", "/nonexistent/ch.json", "--bound", "det", "--input", "uniform:2x2"],
    ["eval", "--channel", "builtin:nope", "--bound", "det", "--input", "uniform:2x2"],
    ["eval", "--channel", "builtin:asymmetric_clipper", "--bound", "det", "--input", "uniform:9x9"],
    ["eval", "--channel", "builtin:asymmetric_clipper", "--bound", "det", "--input", "bogus"],
    ["frontier", "--channel", "builtin:asymmetric_clipper", "--bound", "det", "--weights", "1"],
    ["classify", "--channel", "builtin:asymmetric_clipper", "--budget", "0"],
    ["eval", "--channel", "builtin:asymmetric_clipper", "--bound", "nosuch"],
])
def test_input_errors_exit_2(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2 and err


def noisy_spec(seed=1):
    k = np.random.default_rng(seed).dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2)
    return json.dumps(channel_to_dict(channel_from_kernel(k)))


def test_eval_on_wrong_channel_class_exits_3(capsys):
    code, _, err = run(["eval", "--channel", noisy_spec(), "--bound", "det", "--input", "uniform:2x2"],
                       capsys)
    assert code == 3 and err


def test_frontier_det_corners(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, _, _ = run(["frontier", "--channel", "builtin:asymmetric_clipper", "--bound", "det",
                      "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "lambda,R1,R2,value"
    pts = {tuple(map(float, l.split(",")[1:3])) for l in lines[1:]}
    assert (2.0, 2.0) in pts and (1.0, 3.0) in pts
    meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
    assert meta["seed"] == 0 and meta["budget"] == 200 and meta["cardinalities"]["X1"] == 4


def test_frontier_unsupported_bound_exits_3(capsys):
    code, _, err = run(["frontier", "--channel", noisy_spec(), "--bound", "semidet", "--budget", "1"], capsys)
    assert code == 3 and "SEMIDET" in err


def test_frontier_budget_one_twice_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(["frontier", "--channel", "builtin:symmetric_clipper", "--bound", "rtd_inner",
                    "--budget", "1", "--weights", "5", "--seed", "4", "--out", str(p)], capsys)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def _cli(args, threads):
    env = dict(os.environ, CIFC_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "cifc", *args], env=env, capture_output=True)


def test_frontier_identical_across_thread_counts(tmp_path):
    outs = []
    for i, t in enumerate((1, 4, 4)):
        p = tmp_path / f"{i}.csv"
        r = _cli(["frontier", "--channel", "builtin:symmetric_clipper", "--bound", "wu_outer",
                  "--budget", "20", "--weights", "5", "--seed", "2", "--out", str(p)], t)
        assert r.returncode == 0, r.stderr
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_classify_reports_violations_with_exit_0(capsys):
    code, out, _ = run(["classify", "--channel", "builtin:symmetric_clipper", "--budget", "100"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["very_strong"]["status"] == "VIOLATED" and doc["very_strong"]["witness"]


def test_classify_identity_outputs_strong_holds(capsys):
    kernel = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            kernel[a, b, a ^ b, a ^ b] = 1.0
    spec = json.dumps(channel_to_dict(channel_from_kernel(kernel)))
    code, out, _ = run(["classify", "--channel", spec, "--budget", "50"], capsys)
    assert code == 0 and json.loads(out)["strong"]["status"] == "HOLDS_AT_BUDGET"


@pytest.mark.parametrize("name,rates", [("clipper13", [1.0, 3.0]), ("clipper22", [2.0, 2.0]),
                                        ("symmetric12", [1.0, 2.0])])
def test_verify_builtin(name, rates, capsys):
    code, out, _ = run(["verify", "--scheme", name], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and doc["rates"] == rates


def test_verify_corrupted_csv_exits_4(tmp_path, capsys):
    rows = emit_table(asymmetric_clipper(), scheme_clipper_22())
    # message pair (1, 1) reuses the inputs of (0, 1)
    rows[5] = rows[5][:2] + rows[1][2:]
    path = tmp_path / "bad.csv"
    table_to_csv(rows, str(path))
    code, out, _ = run(["verify", "--channel", "builtin:asymmetric_clipper", "--scheme", str(path)], capsys)
    assert code == 4
    assert json.loads(out)["collisions"]


def test_verify_table_as_csv(capsys):
    code, out, _ = run(["verify", "--scheme", "symmetric12", "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[1] == "0,0,3,0,0,0,0,0"


def test_module_entry_point_help():
    r = subprocess.run([sys.executable, "-m", "cifc", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "frontier" in r.stdout
