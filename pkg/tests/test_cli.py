import math
import textwrap

import numpy as np
import pytest

from hermlab.cli import (
    ConfigError,
    SCENARIO_KINDS,
    list_catalogs,
    load_config,
    main,
    run_config,
    run_scenario,
    write_curve_csv,
)
from hermlab.growth import function_catalog, growth_curve, log_abs
from hermlab.metrics import flat_chart

PASSING_CONFIG = textwrap.dedent("""
    [[scenario]]
    kind = "three-circle"
    name = "flat-circles"
    metric = { name = "flat", params = { n = 1 } }
    functions = [ { name = "z1" }, { name = "1+z1" } ]
    radii = { min = 0.2, max = 2.0, count = 5 }
    sampler = { directions = 8, seed = 0 }

    [[scenario]]
    kind = "comparison-ode"
    name = "ode"
    profile = { name = "inverse-cube", params = { C = 2.0 } }

    [[scenario]]
    kind = "dimension-count"
    name = "dims"
""")

FAILING_CONFIG = textwrap.dedent("""
    [[scenario]]
    kind = "three-circle"
    name = "conformal-circles"
    metric = { name = "radial-conformal", params = { n = 1, a = 1.0, b = 0.0 } }
    functions = [ { name = "z1" } ]
    radii = { min = 0.1, max = 0.5, count = 7 }
    sampler = { directions = 8, seed = 0, refine = false }
""")


def _write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_config_valid(tmp_path):
    scenarios, defaults = load_config(_write(tmp_path, PASSING_CONFIG))
    assert [s.kind for s in scenarios] == ["three-circle", "comparison-ode",
                                           "dimension-count"]
    assert scenarios[0].name == "flat-circles"
    assert scenarios[0].sampler["directions"] == 8
    assert scenarios[1].sampler["directions"] == 64  # default
    assert scenarios[1].sampler["refine"] is True
    assert defaults["out_dir"] is None
    radii = scenarios[0].radii_array(0.1, 3.0, 10)
    assert len(radii) == 5 and radii[0] == 0.2 and radii[-1] == 2.0


@pytest.mark.parametrize("snippet,fragment", [
    ('[[scenario]]\nkind = "unknown-kind"', "unknown kind"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'metric = { name = "fubini" }', "unknown metric"),
    ('[[scenario]]\nkind = "monotonicity"\n'
     'profile = { name = "gaussian" }', "unknown profile"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'radii = { min = 0.0, max = 1.0 }', "radii.min"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'radii = { min = 2.0, max = 1.0 }', "radii.max"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'radii = { min = 0.1, max = 1.0, count = 2 }', "count"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'radii = { min = 0.1, max = 1.0, spacing = "cubic" }', "spacing"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'sampler = { directions = 4 }', "directions"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'tolerances = { bogus = 1.0 }', "tolerance"),
    ('[[scenario]]\nkind = "three-circle"\n'
     'functions = [ { degree = 3 } ]', "function spec"),
])
def test_load_config_rejects(tmp_path, snippet, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_config(_write(tmp_path, snippet))


def test_load_config_no_scenarios(tmp_path):
    with pytest.raises(ConfigError, match="no"):
        load_config(_write(tmp_path, 'out_dir = "x"\n'))


def test_load_config_bad_toml(tmp_path):
    with pytest.raises(ConfigError, match="TOML"):
        load_config(_write(tmp_path, "[[scenario]\nkind ="))


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.toml"))


def test_unknown_function_name_surfaces_at_resolution(tmp_path):
    text = PASSING_CONFIG.replace('{ name = "z1" }', '{ name = "zzz" }')
    scenarios, _ = load_config(_write(tmp_path, text))
    with pytest.raises(ConfigError, match="unknown function"):
        scenarios[0].resolve_functions(1)


def test_write_curve_csv_roundtrip(tmp_path):
    chart = flat_chart(1)
    curve = growth_curve(chart, np.zeros(1, dtype=complex),
                         log_abs(function_catalog(1)[0]),
                         np.geomspace(0.3, 2.0, 5), count=8)
    path = write_curve_csv(str(tmp_path / "curve.csv"), curve)
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "r,abscissa,M,log_M,second_diff,argmax_dir_index"
    assert len(lines) == 6
    for j, line in enumerate(lines[1:]):
        r, t, m, log_m, second, arg = line.split(",")
        assert float(r) == curve.radii[j]
        assert float(t) == curve.t[j]
        assert float(log_m) == curve.values[j]
        assert float(m) == math.exp(curve.values[j])
        assert float(second) == curve.second_diff[j]
        assert int(arg) == curve.argmax[j]


def test_run_config_passes_and_writes_artifacts(tmp_path):
    config = _write(tmp_path, PASSING_CONFIG)
    out = tmp_path / "out"
    code, text = run_config(config, out_dir=str(out))
    assert code == 0
    assert "overall: PASS" in text
    assert (out / "report.txt").read_text(encoding="utf-8") == text
    csvs = sorted(p.name for p in out.glob("*.csv"))
    assert csvs == ["flat-circles_flat-n-1_1+z1.csv",
                    "flat-circles_flat-n-1_z1.csv"]
    # 2 curves + 1 ode profile + 15 dimension pairs
    assert text.count("[PASS]") == 18
    assert "[FAIL]" not in text


def test_run_config_deterministic_artifacts(tmp_path):
    config = _write(tmp_path, PASSING_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_config(config, out_dir=str(out1))
    run_config(config, out_dir=str(out2))
    for p1 in sorted(out1.glob("*.csv")):
        p2 = out2 / p1.name
        assert p1.read_bytes() == p2.read_bytes()


def test_run_config_detects_violation(tmp_path):
    config = _write(tmp_path, FAILING_CONFIG)
    out = tmp_path / "out"
    code, text = run_config(config, out_dir=str(out))
    assert code == 1
    assert "overall: FAIL" in text
    assert "[FAIL] log-convexity:radial-conformal" in text


def test_run_config_seed_and_directions_override(tmp_path):
    config = _write(tmp_path, PASSING_CONFIG)
    code, text = run_config(config, out_dir=str(tmp_path / "out"),
                            seed=5, directions=9)
    assert code == 0
    assert "seed=5" in text
    assert "directions=9" in text
    with pytest.raises(ConfigError, match="directions"):
        run_config(config, out_dir=str(tmp_path / "out2"), directions=4)


def test_run_config_env_out_dir(tmp_path, monkeypatch):
    env_dir = tmp_path / "env-out"
    monkeypatch.setenv("HERMLAB_OUT_DIR", str(env_dir))
    monkeypatch.chdir(tmp_path)
    config = _write(tmp_path, PASSING_CONFIG)
    code, _ = run_config(config)
    assert code == 0
    assert (env_dir / "report.txt").exists()


def test_run_scenario_captures_numerical_abort(tmp_path):
    text = FAILING_CONFIG.replace("max = 0.5", "max = 2.5")
    scenarios, _ = load_config(_write(tmp_path, text))
    doc, artifacts = run_scenario(scenarios[0], str(tmp_path))
    assert not doc.ok
    assert "injectivity floor" in doc.error
    assert artifacts == []
    assert "scenario aborted" in doc.render()


def test_main_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, PASSING_CONFIG, "good.toml")
    assert main(["run", good, "--out-dir", str(tmp_path / "o1")]) == 0
    assert "overall: PASS" in capsys.readouterr().out

    bad = _write(tmp_path, '[[scenario]]\nkind = "nope"', "bad.toml")
    assert main(["run", bad, "--out-dir", str(tmp_path / "o2")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_main_list_catalogs(capsys):
    assert main(["list-catalogs"]) == 0
    out = capsys.readouterr().out
    for name in ("flat", "poincare-ball", "radial-conformal", "poly-perturbed",
                 "zero", "constant", "bump", "inverse-cube", "log-weak",
                 "exp-z1", "z1*z2"):
        assert name in out
    for kind in SCENARIO_KINDS:
        assert kind in out
    assert out == list_catalogs() + "\n"
