import json
from pathlib import Path

import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from failsafekit.cli import main
from failsafekit.demos import clayton_pair, gumbel_barnett_pair

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def _validator(name):
    resources = []
    for path in SCHEMA_DIR.glob("*.schema.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    registry = Registry().with_resources(resources)
    schema = json.loads((SCHEMA_DIR / name).read_text())
    return Draft202012Validator(schema, registry=registry)


def write_system(path, sys_spec):
    path.write_text(json.dumps(sys_spec.to_json()))
    return str(path)


@pytest.fixture()
def demo_files(tmp_path):
    sx, sy = gumbel_barnett_pair()
    cx, cy = clayton_pair()
    return {
        "gb_x": write_system(tmp_path / "gbx.json", sx),
        "gb_y": write_system(tmp_path / "gby.json", sy),
        "cl_x": write_system(tmp_path / "clx.json", cx),
        "cl_y": write_system(tmp_path / "cly.json", cy),
        "dir": tmp_path,
    }


# -------------------------------------------------------------- preorder
def test_preorder_demo_vectors(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = main(["preorder", "--a", "0.12,0.28,0.51,0.62,0.73",
                 "--b", "0.21,0.42,0.73,0.89,0.92", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["relations"]["p_larger"]["a_over_b"] is True
    _validator("order_report.schema.json").validate(rep)


def test_preorder_equal_vectors_all_relations(capsys):
    assert main(["preorder", "--a", "1,2,3", "--b", "3,2,1"]) == 0
    rep = json.loads(capsys.readouterr().out)
    for rel in rep["relations"].values():
        assert rel["a_over_b"] is True and rel["b_over_a"] is True


def test_preorder_mismatched_lengths_exit_2(capsys):
    assert main(["preorder", "--a", "1,2", "--b", "1,2,3"]) == 2


def test_preorder_vector_file(tmp_path, capsys):
    f = tmp_path / "vec.txt"
    f.write_text("0.5 1.5\n")
    assert main(["preorder", "--a-file", str(f), "--b", "1.0,1.0"]) == 0


# ----------------------------------------------------------------- curve
def test_curve_paired_gap_nonnegative(demo_files, tmp_path):
    out = tmp_path / "pair.csv"
    code = main(["curve", demo_files["gb_x"], "--paired", demo_files["gb_y"],
                 "--points", "400", "--x-min", "0", "--x-max", "10",
                 "--out", str(out)])
    assert code == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "x,survival_x,survival_y,gap"
    gaps = np.array([float(r.split(",")[3]) for r in rows[1:]])
    assert gaps.min() >= -1e-10


def test_curve_single_matches_library(demo_files, tmp_path):
    from failsafekit import survival_x2n
    from failsafekit.demos import gumbel_barnett_pair
    out = tmp_path / "one.csv"
    code = main(["curve", demo_files["gb_x"], "--points", "50",
                 "--x-min", "0.1", "--x-max", "5.0", "--out", str(out)])
    assert code == 0
    rows = out.read_text().strip().splitlines()[1:]
    xs = np.array([float(r.split(",")[0]) for r in rows])
    vals = np.array([float(r.split(",")[1]) for r in rows])
    sx, _ = gumbel_barnett_pair()
    np.testing.assert_array_equal(vals, survival_x2n(sx, xs))


def test_curve_malformed_spec_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["curve", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    bad2 = tmp_path / "bad2.json"
    bad2.write_text(json.dumps({"n": 2}))
    assert main(["curve", str(bad2), "--out", str(tmp_path / "y.csv")]) == 2


def test_emit_figures_layout(tmp_path, capsys):
    out_dir = tmp_path / "figs"
    assert main(["curve", "--emit-figures", "--out-dir", str(out_dir)]) == 0
    names = sorted(p.name for p in out_dir.glob("*.csv"))
    assert names == ["cable_fail_safe.csv", "clayton_near_tangency.csv",
                     "gumbel_barnett_dominance.csv"]


# ---------------------------------------------------------------- verify
def test_verify_t1_demo_pass_exit_0(demo_files, tmp_path):
    out = tmp_path / "rep.json"
    code = main(["verify", "t1", demo_files["gb_x"], demo_files["gb_y"],
                 "--points", "300", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["overall"] is True
    _validator("condition_report.schema.json").validate(rep)


def test_verify_t1_log_convex_generator_exit_1(demo_files, capsys):
    code = main(["verify", "t1", demo_files["cl_x"], demo_files["cl_y"],
                 "--points", "300"])
    assert code == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["overall"] is False
    _validator("condition_report.schema.json").validate(rep)


def test_verify_t2_counterexample_exit_3(tmp_path, capsys):
    from failsafekit import BaselineSpec, GeneratorSpec, SemiParamModel, SystemSpec
    m = SemiParamModel("location", BaselineSpec("gen_pareto", (1.0,)))
    gen = GeneratorSpec("clayton", 2.0)
    fx = write_system(tmp_path / "x.json",
                      SystemSpec(3, m, (1.0, 2.0, 4.0), gen))
    fy = write_system(tmp_path / "y.json",
                      SystemSpec(3, m, (1.5, 2.0, 3.0), gen))
    code = main(["verify", "t2", fx, fy, "--points", "300"])
    assert code == 3
    captured = capsys.readouterr()
    rep = json.loads(captured.out)
    assert rep["overall"] is True  # hypotheses verified, dominance failed
    _validator("condition_report.schema.json").validate(rep)
    assert "INCONSISTENT" in captured.err


def test_verify_malformed_exit_2(demo_files, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["verify", "t1", str(bad), demo_files["gb_y"]]) == 2


def test_verify_p_ls_hypothesis_fail_exit_1(tmp_path, capsys):
    from failsafekit import BaselineSpec, GeneratorSpec, SemiParamModel, SystemSpec
    m = SemiParamModel("ls", BaselineSpec("gen_gamma", (0.5, 0.5)), lam=1.0)
    gen = GeneratorSpec("gumbel_barnett", 0.5)
    fx = write_system(tmp_path / "x.json", SystemSpec(3, m, (0.3, 0.8, 1.5), gen))
    fy = write_system(tmp_path / "y.json", SystemSpec(3, m, (0.5, 0.8, 1.0), gen))
    # the x*hazard monotonicity hypothesis fails for every real baseline
    assert main(["verify", "p-ls", fx, fy, "--points", "200"]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["overall"] is False


def test_verify_p_mphrs_mismatched_fixed_exit_2(tmp_path, capsys):
    from failsafekit import BaselineSpec, GeneratorSpec, SemiParamModel, SystemSpec
    b = BaselineSpec("gen_gamma", (0.5, 0.5))
    gen = GeneratorSpec("gumbel_barnett", 0.5)
    mx = SemiParamModel("mphrs", b, alpha=0.5, lam=1.0)
    my = SemiParamModel("mphrs", b, alpha=0.7, lam=1.0)
    fx = write_system(tmp_path / "x.json", SystemSpec(2, mx, (0.5, 1.0), gen))
    fy = write_system(tmp_path / "y.json", SystemSpec(2, my, (0.5, 1.0), gen))
    assert main(["verify", "p-mphrs", fx, fy]) == 2


# -------------------------------------------------------------- simulate
def test_simulate_deterministic_and_close(tmp_path):
    from failsafekit import BaselineSpec, GeneratorSpec, SemiParamModel, SystemSpec
    m = SemiParamModel("scale", BaselineSpec("exponential", (1.0,)))
    spec = write_system(tmp_path / "s.json",
                        SystemSpec(3, m, (1.0, 2.0, 3.0), GeneratorSpec("clayton", 2.0)))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", spec, "--count", "20000", "--seed", "5",
                 "--out", str(out1)]) == 0
    assert main(["simulate", spec, "--count", "20000", "--seed", "5",
                 "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
    last = out1.read_text().strip().splitlines()[-1]
    assert last.startswith("max_abs_deviation")
    assert float(last.split(",")[3]) < 0.03


def test_simulate_unsupported_generator_exit_2(tmp_path, capsys):
    from failsafekit import BaselineSpec, GeneratorSpec, SemiParamModel, SystemSpec
    m = SemiParamModel("scale", BaselineSpec("exponential", (1.0,)))
    spec = write_system(tmp_path / "s.json",
                        SystemSpec(2, m, (1.0, 2.0), GeneratorSpec("gumbel_barnett", 0.5)))
    assert main(["simulate", spec, "--count", "100", "--seed", "1"]) == 2
    assert "unsupported" in capsys.readouterr().err


def test_simulate_env_seed(tmp_path, monkeypatch):
    from failsafekit import BaselineSpec, GeneratorSpec, SemiParamModel, SystemSpec
    m = SemiParamModel("scale", BaselineSpec("exponential", (1.0,)))
    spec = write_system(tmp_path / "s.json",
                        SystemSpec(2, m, (1.0, 2.0), GeneratorSpec("independence")))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("FAILSAFEKIT_SEED", "77")
    assert main(["simulate", spec, "--count", "5000", "--out", str(out1)]) == 0
    assert main(["simulate", spec, "--count", "5000", "--seed", "77",
                 "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()


# ------------------------------------------------------------------- fit
def _write_wide_dataset(path, seed=3, cables=12, wires=6):
    # positively dependent columns (clayton frailty) with weibull-shaped
    # marginals, so the copula stage sees an attainable positive tau
    from failsafekit import GeneratorSpec, sample_copula
    u = sample_copula(GeneratorSpec("clayton", 1.5), wires, cables, seed=seed).uniforms
    mat = 341.0 * (-np.log1p(-u)) ** (1.0 / 5.0)
    header = ",".join(f"w{j+1}" for j in range(wires))
    lines = [header] + [",".join(f"{v:.6f}" for v in row) for row in mat]
    path.write_text("\n".join(lines))
    return str(path)


def test_fit_pipeline_end_to_end(tmp_path):
    data = _write_wide_dataset(tmp_path / "wide.csv")
    out_dir = tmp_path / "out"
    code = main(["fit", data, "--boot", "100", "--seed", "11",
                 "--subsets", "w1,w2,w3;w4,w5,w6",
                 "--reference", "--out-dir", str(out_dir)])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    _validator("fit_report.schema.json").validate(report)
    assert set(report["copula_gof"]) == {"clayton", "gumbel", "frank"}
    assert (out_dir / "marginal_fits.csv").exists()
    assert (out_dir / "copula_gof.csv").exists()
    assert "recommendation" in report["subsets"]
    assert "aic_order_matches" in report["reference_comparison"]


def test_fit_deterministic(tmp_path, capsys):
    data = _write_wide_dataset(tmp_path / "wide.csv")
    assert main(["fit", data, "--boot", "100", "--seed", "4",
                 "--copulas", "clayton"]) == 0
    first = capsys.readouterr().out
    assert main(["fit", data, "--boot", "100", "--seed", "4",
                 "--copulas", "clayton"]) == 0
    assert capsys.readouterr().out == first


def test_fit_missing_file_exit_2(capsys):
    assert main(["fit", "/nonexistent/file.csv"]) == 2


def test_fit_too_few_observations_exit_2(tmp_path, capsys):
    path = tmp_path / "tiny.csv"
    path.write_text("w1,w2\n1.0,2.0\n1.1,2.1\n")
    assert main(["fit", str(path)]) == 2


def test_fit_bad_subset_label_exit_2(tmp_path, capsys):
    data = _write_wide_dataset(tmp_path / "wide.csv")
    assert main(["fit", data, "--boot", "100", "--subsets", "w1,w2;w3,nope"]) == 2


# ---------------------------------------------------------------- config
def test_config_supplies_defaults_flags_override(tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"points": 37}))
    sx, _ = gumbel_barnett_pair()
    spec = write_system(tmp_path / "s.json", sx)
    out = tmp_path / "c.csv"
    assert main(["--config", str(conf), "curve", spec, "--x-min", "0.1",
                 "--x-max", "2.0", "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 38  # header + 37
    assert main(["--config", str(conf), "curve", spec, "--x-min", "0.1",
                 "--x-max", "2.0", "--points", "11", "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 12
