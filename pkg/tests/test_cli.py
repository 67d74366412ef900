import csv
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonclass import cli
from nonclass.states import (
    coherent,
    even_cat,
    make_vac_fock_mixture,
    number_state,
    squeezed,
    state_to_dict,
)


def write_state(tmp_path, spec, name="state.json", wrap=False):
    data = state_to_dict(spec)
    path = tmp_path / name
    path.write_text(json.dumps({"state": data} if wrap else data), encoding="utf-8")
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 and out.strip() else None), err


def test_depth_of_vacuum(tmp_path, capsys):
    code, rep, _ = run(["depth", write_state(tmp_path, number_state(0))], capsys)
    assert code == 0 and rep["tau_m"] == 0.0


def test_depth_of_one_photon_mixture(tmp_path, capsys):
    path = write_state(tmp_path, make_vac_fock_mixture(0.3, 1), wrap=True)
    code, rep, _ = run(["depth", path, "--tol-tau", "1e-4", "--no-rules"], capsys)
    assert code == 0 and abs(rep["tau_m"] - 0.7) <= 1e-4


def test_depth_of_squeezed_with_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    code, rep, _ = run(["depth", write_state(tmp_path, squeezed(0.0, 1.0)), "--trace-csv", str(trace)], capsys)
    assert code == 0
    assert abs(rep["tau_m"] - math.tanh(1.0) / (1 + math.tanh(1.0))) < 1e-15
    assert trace.exists()


@pytest.mark.parametrize("spec,want", [(number_state(1), 1 - math.exp(-1)), (coherent(0.5j), 0.0)])
def test_distance_examples(tmp_path, capsys, spec, want):
    code, rep, _ = run(["distance", write_state(tmp_path, spec)], capsys)
    assert code == 0 and abs(rep["d_m"] - want) < 1e-6


def test_distance_of_large_cat(tmp_path, capsys):
    code, rep, _ = run(["distance", write_state(tmp_path, even_cat(2.7)), "--seed", "0.5,0"], capsys)
    assert code == 0
    assert abs(abs(rep["beta_star"][0]) - 2.7) < 1e-3 and abs(rep["beta_star"][1]) < 1e-3
    assert 0.4 < rep["d_m"] < 0.5


def test_distance_rejects_mixed_state(tmp_path, capsys):
    code, _, err = run(["distance", write_state(tmp_path, make_vac_fock_mixture(0.5, 1))], capsys)
    assert code == 2 and "pure" in err


@pytest.mark.parametrize("text", ["{not json", '{"type": "fock", "coeffs": []}', '{"type": "nope"}'])
def test_bad_input_exits_2(tmp_path, capsys, text):
    path = tmp_path / "bad.json"
    path.write_text(text, encoding="utf-8")
    code, _, err = run(["depth", str(path)], capsys)
    assert code == 2 and err.startswith("error:")


def test_missing_file_exits_2(tmp_path, capsys):
    code, _, _ = run(["diag", str(tmp_path / "absent.json")], capsys)
    assert code == 2


def test_rfunc_writes_grid(tmp_path, capsys):
    out = tmp_path / "w.csv"
    code, rep, _ = run(["rfunc", write_state(tmp_path, number_state(1)), "--tau", "0.5",
                        "--window", "-3:3:-3:3", "--res", "61", "--out", str(out)], capsys)
    assert code == 0
    assert abs(rep["min"] + 2 / math.pi) < 1e-12 and rep["argmin"] == [0.0, 0.0]
    rows = list(csv.reader(out.open(encoding="utf-8")))
    assert rows[0] == ["x", "y", "value"] and len(rows) == 61 * 61 + 1


def test_rfunc_singular_regime_exits_3(tmp_path, capsys):
    code, _, err = run(["rfunc", write_state(tmp_path, squeezed(0.0, 1.0)), "--tau", "0.3",
                        "--res", "11", "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 3 and "SingularRegimeError" in err


def test_rfunc_tau_domain(tmp_path, capsys):
    code, _, _ = run(["rfunc", write_state(tmp_path, number_state(1)), "--tau", "1.5",
                      "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 2


def test_diag(tmp_path, capsys):
    code, rep, _ = run(["diag", write_state(tmp_path, number_state(3))], capsys)
    assert code == 0 and rep["mandel_q"] == -1.0 and rep["mean_n"] == 3.0
    code, rep, _ = run(["diag", write_state(tmp_path, number_state(0))], capsys)
    assert code == 0 and rep["mandel_q"] is None


def write_sweep(tmp_path, data):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def read_csv(path):
    return list(csv.reader(open(path, encoding="utf-8")))


def test_sweep_depth_of_mixture_family(tmp_path, capsys):
    out = tmp_path / "mix.csv"
    spec = write_sweep(tmp_path, {"family": "vac_fock_mixture", "measure": "depth", "tol_tau": 1e-4,
                                  "param_grid": [[1, 0.2], [1, 0.6]], "output_path": str(out)})
    code, rep, _ = run(["sweep", spec], capsys)
    assert code == 0 and rep == {"output_path": str(out), "rows": 2, "failed": 0}
    rows = read_csv(out)
    assert rows[0] == ["n", "xi", "tau_m", "d_m"]
    assert abs(float(rows[1][2]) - 0.8) <= 1e-4 and abs(float(rows[2][2]) - 0.4) <= 1e-4
    assert rows[1][3] == ""


def test_sweep_axes_and_both_measures(tmp_path, capsys):
    out = tmp_path / "sq.csv"
    spec = write_sweep(tmp_path, {"family": "squeezed", "measure": "both", "axes": {"r": [0.5, 1.0]}})
    code, _, _ = run(["sweep", spec, "--out", str(out)], capsys)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["r", "theta", "tau_m", "d_m"]
    assert abs(float(rows[2][2]) - math.tanh(1) / (1 + math.tanh(1))) < 1e-15
    assert abs(float(rows[2][3]) - (1 - 1 / math.cosh(1))) < 1e-15


def test_sweep_distance_on_mixed_family_exits_2(tmp_path, capsys):
    spec = write_sweep(tmp_path, {"family": "vac_fock_mixture", "measure": "distance",
                                  "param_grid": [[1, 0.5]], "output_path": str(tmp_path / "o.csv")})
    code, _, _ = run(["sweep", spec], capsys)
    assert code == 2


@pytest.mark.parametrize("bad", [
    {"family": "ghost", "param_grid": [[1]]},
    {"family": "cat_even", "param_grid": []},
    {"family": "cat_even", "param_grid": [[-1.0]]},
    {"family": "vac_fock_mixture", "param_grid": [[1.5, 0.3]]},
    {"family": "squeezed", "measure": "speed", "param_grid": [[0.1]]},
])
def test_sweep_validation(tmp_path, capsys, bad):
    spec = write_sweep(tmp_path, dict(bad, output_path=str(tmp_path / "o.csv")))
    code, _, _ = run(["sweep", spec], capsys)
    assert code == 2


def test_parallel_sweep_matches_serial(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("NONCLASS_JOBS", raising=False)
    grid = {"family": "vac_fock_superposition", "measure": "both", "param_grid": [[1, x] for x in (0.1, 0.4, 0.7)]}
    spec = write_sweep(tmp_path, grid)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sweep", spec, "--out", str(a)], capsys)[0] == 0
    assert run(["sweep", spec, "--out", str(b), "--jobs", "2"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_jobs_environment_override(monkeypatch):
    monkeypatch.setenv("NONCLASS_JOBS", "3")
    assert cli._jobs(1) == 3
    monkeypatch.setenv("NONCLASS_JOBS", "many")
    with pytest.raises(cli.DomainError):
        cli._jobs(1)
    monkeypatch.delenv("NONCLASS_JOBS")
    with pytest.raises(cli.DomainError):
        cli._jobs(0)


@pytest.mark.parametrize("bad_rows,code", [(1, 0), (2, 3)])
def test_sweep_failure_threshold(tmp_path, capsys, monkeypatch, bad_rows, code):
    # 1 failure in 10 rows stays within the 10% budget, 2 do not
    real = cli.sweep_row

    def flaky(family, params, measure, tol_tau, tol_R):
        if params[0] <= bad_rows * 0.1:
            return math.nan, None, "NumericError: injected"
        return real(family, params, measure, tol_tau, tol_R)

    monkeypatch.setattr(cli, "sweep_row", flaky)
    out = tmp_path / "r.csv"
    spec = write_sweep(tmp_path, {"family": "squeezed", "measure": "depth",
                                  "axes": {"r": [0.1 * k for k in range(1, 11)]}})
    got, _, err = run(["sweep", spec, "--out", str(out)], capsys)
    assert got == code
    assert err.count("warning:") == bad_rows
    assert [r[2] for r in read_csv(out)[1:]].count("NaN") == bad_rows


JSONISH = st.recursive(
    st.none() | st.booleans() | st.integers(-10 ** 6, 10 ** 6)
    | st.floats(allow_nan=False, allow_infinity=False) | st.text(max_size=8),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=20,
)


@given(JSONISH)
def test_canonical_json_round_trips(obj):
    text = cli.canonical_json(obj)
    assert cli.canonical_json(json.loads(text)) == text


def test_canonical_json_nonfinite():
    assert cli.canonical_json({"b": math.nan, "a": [math.inf, 0.1]}) == \
        '{\n  "a": [\n    null,\n    0.10000000000000001\n  ],\n  "b": null\n}'


def test_module_entry_point(tmp_path):
    path = write_state(tmp_path, number_state(1))
    out = subprocess.run([sys.executable, "-m", "nonclass", "diag", path],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["mean_n"] == 1.0
