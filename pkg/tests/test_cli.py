import csv
import io
import json
import math
import subprocess
import sys

import pytest

from halfscatter.cli import main

LN3 = math.log(3)
PI2 = math.pi / 2


def run(tmp_path, capsys, command, cfg, *extra, raw=None):
    path = tmp_path / "run.json"
    path.write_text(raw if raw is not None else json.dumps(cfg))
    code = main([command, "--config", str(path), *extra])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def delta_cfg(z, **extra):
    return {"problem": "delta", "params": {"z": z, "a": 1.0, "bc": "dirichlet"}, **extra}


def test_reflect_row_count_and_header(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "reflect", delta_cfg([0.5, 0.1], sweep={"from": 0.1, "to": 3, "steps": 100}))
    assert code == 0
    meta = [line for line in out.splitlines() if line.startswith("#")]
    assert any("config_sha256" in m for m in meta) and any("halfscatter" in m for m in meta)
    table = rows(out)
    assert len(table) == 100
    assert list(table[0]) == ["k", "re_R", "im_R", "abs2_R", "arg_R", "flag"]


def test_reflect_hard_wall(tmp_path, capsys):
    cfg = {"problem": "delta", "params": {"z": 0, "a": 1.0, "bc": {"gamma": 1}},
           "sweep": {"from": 0.5, "to": 3, "steps": 7}}
    for r in rows(run(tmp_path, capsys, "reflect", cfg)[1]):
        assert float(r["re_R"]) == pytest.approx(-1) and float(r["im_R"]) == pytest.approx(0, abs=1e-15)


def test_reflect_flags_singularity(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "reflect", delta_cfg([0, PI2], sweep={"values": [1.0, PI2, 2.0]}))
    assert code == 0
    assert [r["flag"] for r in rows(out)] == ["", "SS", ""]


def test_spectrum_bound_state(tmp_path, capsys):
    region = {"re_min": -2, "re_max": 2, "im_min": -2, "im_max": 2}
    table = rows(run(tmp_path, capsys, "spectrum", delta_cfg(-2, region=region))[1])
    bound = [r for r in table if r["kind"] == "BoundState"]
    assert len(bound) == 1
    assert float(bound[0]["im_k"]) == pytest.approx(0.7968121300200199, abs=1e-9)
    # z = -1 with the wall at distance 1 sits exactly at the binding threshold
    table = rows(run(tmp_path, capsys, "spectrum", delta_cfg(-1, region=region))[1])
    assert not [r for r in table if r["kind"] == "BoundState"]


def test_spectrum_empty_potential(tmp_path, capsys):
    cfg = {"problem": "potential", "params": {"pieces": [], "bc": "dirichlet"},
           "region": {"re_min": -2, "re_max": 2, "im_min": -2, "im_max": 2}}
    code, out, _ = run(tmp_path, capsys, "spectrum", cfg)
    assert code == 0 and rows(out) == []
    assert out.splitlines()[-1] == "kind,re_k,im_k,residual,physical"


def test_spectrum_gain_delta(tmp_path, capsys):
    cfg = delta_cfg([0, PI2], region={"re_min": 0.5, "re_max": 3, "im_min": -0.5, "im_max": 0.5})
    ss = [r for r in rows(run(tmp_path, capsys, "spectrum", cfg)[1]) if r["kind"] == "SpectralSingularity"]
    assert [float(r["re_k"]) for r in ss] == pytest.approx([PI2], abs=1e-9)


def test_absorb(tmp_path, capsys):
    table = rows(run(tmp_path, capsys, "absorb", delta_cfg([0, -PI2], interval=[1, 2]))[1])
    assert [float(r["k"]) for r in table] == pytest.approx([PI2], abs=1e-10)


def laser_cfg(eps, lo=2, hi=12):
    return {"problem": "slab-laser", "params": {"eta": 2, "L": 1, "a": 0.3, "eps_mirror": eps},
            "modes": {"from": lo, "to": hi}}


def test_laser_perfect_mirror(tmp_path, capsys):
    code, out, err = run(tmp_path, capsys, "laser", laser_cfg(0))
    assert code == 0
    table = rows(out)
    assert len(table) >= 3
    assert "no solution" in err  # labels without a mode are reported
    for r in table:
        assert float(r["g_approx"]) == pytest.approx(LN3, abs=1e-14)
        # the self-consistent gain differs from ln 3 only through kappa = g/2k
        g, k = float(r["g"]), float(r["k"])
        assert abs(g - LN3) < g / (2 * k)
        assert float(r["g_exact"]) == pytest.approx(g, rel=1e-10)


def test_laser_imperfect_mirror_lowers_gain(tmp_path, capsys):
    base = rows(run(tmp_path, capsys, "laser", laser_cfg(0))[1])
    lossy = rows(run(tmp_path, capsys, "laser", laser_cfg([0.05, 0]))[1])
    assert all(float(r["g_approx"]) < LN3 for r in lossy)
    assert min(float(r["g"]) for r in lossy) < min(float(r["g"]) for r in base)


def test_laser_empty_range(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "laser", laser_cfg(0, 5, 4))
    assert code == 0 and rows(out) == []


def kerr_cfg(sigma=(0, 0.8), **sweep):
    return {"problem": "kerr",
            "params": {"b": 0.01, "k": 1.55, "re_eps": 2.25, "sigma": list(sigma), "m": 6},
            "sweep": sweep or {"parameter": "dg", "from": 0, "to": 0.5, "steps": 6}}


def test_kerr_threshold_and_slope(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "kerr", kerr_cfg())
    assert code == 0
    table = rows(out)
    g0 = 1 / (0.01 * 2.25)
    assert float(table[0]["g"]) == pytest.approx(g0) and float(table[0]["I"]) == 0
    gs = [float(r["g"]) for r in table]
    Is = [float(r["I"]) for r in table]
    slope = 1 / (2 * 0.01 * 1.55 * g0 * 0.8)
    for g, I in zip(gs, Is):
        assert I == pytest.approx(slope * (g - g0), rel=1e-12, abs=1e-15)
    for r in table[1:]:
        assert r["source"] == "exact"
        assert float(r["abs_A_plus"]) ** 2 / 2 == pytest.approx(float(r["I"]), rel=1e-9)
        assert float(r["dk_over_k"]) == 0


def test_kerr_detuned_sigma(tmp_path, capsys):
    table = rows(run(tmp_path, capsys, "kerr", kerr_cfg((0.2, 0.8)))[1])
    shifts = [float(r["dk_over_k"]) for r in table]
    assert shifts[0] == 0 and all(s < 0 for s in shifts[1:])


@pytest.mark.parametrize("sigma", [(1, 0), (0, -0.5)])
def test_kerr_refuses_nonsaturating(tmp_path, capsys, sigma):
    code, out, err = run(tmp_path, capsys, "kerr", kerr_cfg(sigma))
    assert code == 1 and out == ""
    assert "sigma" in err


def test_deterministic_output(tmp_path, capsys):
    cfg = delta_cfg([0.3, -0.2], sweep={"from": 0.1, "to": 3, "steps": 50})
    for fmt in ("csv", "json"):
        a = run(tmp_path, capsys, "reflect", cfg, "--format", fmt)[1]
        b = run(tmp_path, capsys, "reflect", cfg, "--format", fmt)[1]
        assert a == b


def test_threads_keep_order(tmp_path, capsys, monkeypatch):
    cfg = delta_cfg([0.3, -0.2], sweep={"from": 0.1, "to": 3, "steps": 64})
    serial = run(tmp_path, capsys, "reflect", cfg)[1]
    monkeypatch.setenv("SCATTER_THREADS", "4")
    assert run(tmp_path, capsys, "reflect", cfg)[1] == serial
    monkeypatch.setenv("SCATTER_THREADS", "many")
    assert run(tmp_path, capsys, "reflect", cfg)[0] == 1


def test_json_mirrors_csv(tmp_path, capsys):
    cfg = delta_cfg([0, PI2], sweep={"values": [1.0, PI2]})
    doc = json.loads(run(tmp_path, capsys, "reflect", cfg, "--format", "json")[1])
    text_rows = rows(run(tmp_path, capsys, "reflect", cfg)[1])
    assert doc["columns"] == list(text_rows[0])
    assert doc["rows"][0]["re_R"] == float(text_rows[0]["re_R"])
    assert doc["rows"][1]["flag"] == "SS" and doc["rows"][1]["abs2_R"] == "inf"
    assert "config_sha256" in doc["meta"]


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "table.csv"
    code, out, _ = run(tmp_path, capsys, "reflect", delta_cfg(1, sweep={"values": [1.0]}), "--out", str(dest))
    assert code == 0 and out == ""
    assert len(rows(dest.read_text())) == 1


def test_csv_round_trips_floats(tmp_path, capsys):
    from halfscatter.delta import DeltaHalfLine, delta_halfline_reflection
    from halfscatter import BoundaryCondition
    r = rows(run(tmp_path, capsys, "reflect", delta_cfg([0.3, -0.2], sweep={"values": [1.234]}))[1])[0]
    R = delta_halfline_reflection(DeltaHalfLine(0.3 - 0.2j, 1.0, BoundaryCondition.dirichlet()), 1.234)
    assert float(r["re_R"]) == R.real and float(r["im_R"]) == R.imag


def test_json_syntax_error_has_line(tmp_path, capsys):
    raw = '{"problem": "delta",\n "params": {"z": [0,1], "a": 1.0 "bc": 1}}'
    code, _, err = run(tmp_path, capsys, "reflect", None, raw=raw)
    assert code == 1
    assert "line 2" in err


@pytest.mark.parametrize("params, field", [
    ({"z": "x", "a": 1.0, "bc": "dirichlet"}, "params.z"),
    ({"z": 1, "bc": "dirichlet"}, "params.a"),
    ({"z": 1, "a": 1.0, "bc": "robin"}, "params.bc"),
    ({"z": 1, "a": -1.0, "bc": "dirichlet"}, "params.a"),
])
def test_field_errors_name_the_field(tmp_path, capsys, params, field):
    cfg = {"problem": "delta", "params": params, "sweep": {"from": 1, "to": 2, "steps": 2}}
    code, _, err = run(tmp_path, capsys, "reflect", cfg)
    assert code == 1 and field in err


def test_sweep_steps_must_be_positive(tmp_path, capsys):
    code, _, err = run(tmp_path, capsys, "reflect", delta_cfg(1, sweep={"from": 1, "to": 2, "steps": 0}))
    assert code == 1 and "sweep.steps" in err


def test_numerical_failure_exit_code(tmp_path, capsys, monkeypatch):
    import halfscatter.cli as cli
    from halfscatter import ConvergenceError

    def diverge(*args, **kwargs):
        raise ConvergenceError("no fixed point", trace=[1.0, 2.0])

    monkeypatch.setattr(cli, "solve_exact_lasing_point", diverge)
    code, out, err = run(tmp_path, capsys, "laser", laser_cfg(0))
    assert code == 2 and out == ""
    assert "numerical failure" in err and "ConvergenceError" in err


def test_module_entry_point(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(delta_cfg(1, sweep={"values": [1.0, 2.0]})))
    proc = subprocess.run([sys.executable, "-m", "halfscatter.cli", "reflect", "--config", str(path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(rows(proc.stdout)) == 2
