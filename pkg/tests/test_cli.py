import csv
import io
import json
import shutil
import subprocess

import numpy as np
import pytest

from oracles import rand_mat
from posmaps.choi import transposition_choi
from posmaps.choifamily import choi_map_classic
from posmaps.cli import main, matrix_to_json, operator_to_json, parse_matrix_file
from posmaps.matcore import bipartite, partial_transpose


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def gen(capsys, tmp_path, name, *args):
    path = tmp_path / f"{name}{'_'.join(args)}.json"
    code, _, _ = run(capsys, "gen", name, *args, "--out", str(path))
    assert code == 0
    return str(path)


# --- file format -------------------------------------------------------------


def test_round_trip_is_bit_exact(rng):
    m = rand_mat(rng, 6) * np.array([1e-300, 1.0, 3e7, -2.5, np.pi, 1 / 3])
    back, d1, d2 = parse_matrix_file(matrix_to_json(m, 2, 3))
    assert (d1, d2) == (2, 3) and np.array_equal(back, m)
    back, d1, d2 = parse_matrix_file(matrix_to_json(m, 6))
    assert (d1, d2) == (6, None) and np.array_equal(back, m)


def test_emitted_fixtures_round_trip(capsys, tmp_path):
    for name, args in [("w", []), ("wminus", []), ("choi_classic", []), ("random_symmetry", []), ("s0", [])]:
        text = open(gen(capsys, tmp_path, name, *args)).read()
        m, d1, d2 = parse_matrix_file(text)
        assert matrix_to_json(m, d1, d2) == text


def test_file_layout():
    obj = json.loads(operator_to_json(transposition_choi(2)))
    assert obj["dim1"] == 2 and obj["dim2"] == 2 and len(obj["data"]) == 16
    assert obj["data"][6] == [1.0, 0.0]  # row 1, column 2


# --- gen -----------------------------------------------------------------------


def test_gen_swap(capsys, tmp_path):
    m, d1, d2 = parse_matrix_file(open(gen(capsys, tmp_path, "w", "3")).read())
    assert (d1, d2) == (3, 3) and np.array_equal(m, transposition_choi(3).matrix)


def test_gen_rho_half_matches_classic_partial_transpose(capsys, tmp_path):
    m, _, _ = parse_matrix_file(open(gen(capsys, tmp_path, "rho_lambda", "0.5")).read())
    assert np.abs(m - partial_transpose(choi_map_classic()).matrix).max() <= 1e-15


def test_gen_random_symmetry_is_reproducible(capsys):
    _, a, _ = run(capsys, "gen", "random_symmetry", "--seed", "7")
    _, b, _ = run(capsys, "gen", "random_symmetry", "--seed", "7")
    _, c, _ = run(capsys, "gen", "random_symmetry", "--seed", "8")
    assert a == b and a != c


@pytest.mark.parametrize("argv", [["gen", "nope"], ["gen", "rho_lambda", "2"], ["gen", "eii", "5"], ["gen", "rho_lambda"]])
def test_gen_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "error" in err


# --- analyze -------------------------------------------------------------------


def test_analyze_w_minus(capsys, tmp_path):
    code, out, _ = run(capsys, "analyze", gen(capsys, tmp_path, "wminus"), "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["involution"] == "symmetry" and rep["block_positive"] is False
    assert rep["min_product_value"] <= -0.25 + 1e-9
    assert abs(rep["alpha"] - 5 / 3) <= 1e-6


def test_analyze_r_text(capsys, tmp_path):
    code, out, _ = run(capsys, "analyze", gen(capsys, tmp_path, "r"))
    assert code == 0
    fields = {line[:17].strip(): line[17:].strip() for line in out.splitlines()}
    assert fields["D membership"] == "member" and fields["CP"] == "yes"


def test_analyze_garbage(capsys, tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("{not json")
    assert run(capsys, "analyze", str(path))[0] == 1
    path.write_text(json.dumps({"dim1": 2, "dim2": 2, "data": [[0, 0]] * 3}))
    assert run(capsys, "analyze", str(path))[0] == 1
    assert run(capsys, "analyze", str(tmp_path / "missing.json"))[0] == 1


# --- reduce --------------------------------------------------------------------


def test_reduce_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce", gen(capsys, tmp_path, "s0"), "--json")
    assert code == 0 and json.loads(out)["reconstruction_error"] <= 1e-9
    assert run(capsys, "reduce", gen(capsys, tmp_path, "w"))[0] == 0
    code, out, _ = run(capsys, "reduce", gen(capsys, tmp_path, "wminus"))
    assert code == 2 and "partial-transpose not rank-one" in out


def test_reduce_rejects_wrong_dimension(capsys, tmp_path):
    assert run(capsys, "reduce", gen(capsys, tmp_path, "w", "4"))[0] == 1


# --- sweep ---------------------------------------------------------------------


def test_sweep_half_step(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, err = run(capsys, "sweep-choi", "--grid-step", "0.5", "--out", str(out))
    assert code == 0 and "DISAGREEMENT" not in err
    text = out.read_bytes()
    assert b"\r" not in text
    rows = list(csv.reader(io.StringIO(text.decode())))
    assert rows[0] == ["a", "b", "c", "cond", "cert", "min_value"]
    assert len(rows) == 1 + 343
    assert all(r[3] in ("pos", "neg", "edge") and r[4] in ("pos", "neg") for r in rows[1:])


def test_sweep_segment(capsys):
    code, out, _ = run(capsys, "sweep-choi", "--segment")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["lambda", "cond", "cert", "min_value"] and len(rows) == 12
    for r in rows[1:]:
        assert r[2] == ("member" if float(r[0]) >= 0.5 else "non_member")


def test_sweep_empty_grid(capsys):
    code, out, _ = run(capsys, "sweep-choi", "--grid-step", "4")
    assert code == 0 and out == "a,b,c,cond,cert,min_value\n"


def test_sweep_is_deterministic(capsys):
    a = run(capsys, "sweep-choi", "--grid-step", "1", "--seed", "5")[1]
    b = run(capsys, "sweep-choi", "--grid-step", "1", "--seed", "5")[1]
    assert a == b


def test_sweep_rejects_bad_step(capsys):
    assert run(capsys, "sweep-choi", "--grid-step", "0")[0] == 1


# --- arveson -------------------------------------------------------------------


def test_arveson_overlapping_family(capsys, tmp_path):
    paths = [gen(capsys, tmp_path, "koverlap", str(i)) for i in (1, 2, 3)]
    code, out, _ = run(capsys, "arveson", *paths, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["renormalized"] and rep["cstar_extreme"] is False
    code, text, _ = run(capsys, "arveson", *paths)
    assert "K1 K3 =" in text and "0.137486" in text and "-0.0138889" in text


def test_arveson_choi_and_units(capsys, tmp_path):
    choi_paths = [gen(capsys, tmp_path, "kchoi", str(i)) for i in (1, 2, 3)]
    rep = json.loads(run(capsys, "arveson", *choi_paths, "--json")[1])
    assert rep["verdict"] == "not_extreme"
    unit_paths = [gen(capsys, tmp_path, "eii", str(i)) for i in (1, 2, 3)]
    rep = json.loads(run(capsys, "arveson", *unit_paths, "--json")[1])
    assert rep["verdict"] == "extreme" and rep["cstar_extreme"] and not rep["renormalized"]


def test_arveson_rejects_mismatched_sizes(capsys, tmp_path):
    a = gen(capsys, tmp_path, "eii", "1", "2")
    b = gen(capsys, tmp_path, "eii", "1", "3")
    assert run(capsys, "arveson", a, b)[0] == 1


# --- argument handling ---------------------------------------------------------


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["gen", "w", "--seed", "-1"], ["analyze"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_console_script_entry_point(tmp_path):
    exe = shutil.which("posmaps")
    if exe is None:
        pytest.skip("console script not installed")
    res = subprocess.run([exe, "gen", "w", "2"], capture_output=True, text=True, check=True)
    m, _, _ = parse_matrix_file(res.stdout)
    assert np.array_equal(m, bipartite(transposition_choi(2).matrix, 2).matrix)
