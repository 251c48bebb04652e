import json

import pytest

from pslconj.cli import main
from pslconj.inference import parse_lp
from pslconj.joint import JointDistribution


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def strip_timing(text):
    report = json.loads(text)
    report.pop("timing", None)
    return report


def test_infer_chain(run, model_files):
    code, out, _ = run("infer", model_files["chain"], "--blend", "1")
    assert code == 0
    report = json.loads(out)
    assert set(report) >= {"command", "inputs", "atoms", "objective", "seed", "timing"}
    assert report["objective"] == pytest.approx(1.0, abs=1e-3)
    assert report["atoms"]["B"] == pytest.approx(1.0, abs=1e-3)


def test_infer_oracle_gap(run, model_files):
    code, out, _ = run("infer", model_files["conflict"], "--oracle", "--resolution", "0.05")
    report = json.loads(out)
    assert code == 0
    assert abs(report["oracle"]["gap"]) <= 1e-3


def test_infer_oracle_skipped_for_large_models(run, model_files):
    code, out, _ = run("infer", model_files["voting"], "--oracle")
    assert code == 0
    assert "skipped" in json.loads(out)["oracle"]


def test_infer_malformed_file(run, tmp_path):
    bad = tmp_path / "bad.psl"
    bad.write_text("predicate A\nrule 1.0 A -> A\n")
    code, out, err = run("infer", bad)
    assert code == 2
    assert out == ""
    assert f"{bad}:2:10: syntax:" in err


def test_infer_missing_file(run, tmp_path):
    code, _, err = run("infer", tmp_path / "nope.psl")
    assert code == 2 and "cannot read" in err


def test_infer_nonconvex_exponent_is_solver_error(run, model_files):
    code, _, err = run("infer", model_files["chain"], "--exponent", "0.5")
    assert code == 3 and "exponent" in err


@pytest.mark.parametrize(
    "argv, verdict",
    [
        (("min", "--arity", "2"), "logical-not-convex"),
        (("family:1.0", "--arity", "3", "--samples", "2000"), "convex-and-logical"),
        (("family:0.0", "--arity", "2"), "convex-not-logical"),
        (("product", "--arity", "2", "--samples", "500"), "logical-not-convex"),
        (("family:0.5", "--arity", "4", "--samples", "500"), "convex-not-logical"),
    ],
)
def test_audit_verdicts(run, argv, verdict):
    code, out, _ = run("audit", *argv)
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == verdict
    assert report["matches_expected"] is True


def test_audit_counterexample_key(run):
    _, out, _ = run("audit", "min")
    cx = json.loads(out)["counterexample"]
    assert cx["x"] == [1.0, 0.0] and cx["y"] == [0.0, 1.0] and cx["gap"] == 0.5


@pytest.mark.parametrize(
    "argv",
    [("max",), ("family:1.5",), ("family:abc",), ("min", "--arity", "1"), ()],
)
def test_audit_usage_errors(run, argv):
    code, _, _ = run("audit", *argv)
    assert code == 2


def test_audit_exit_one_on_mismatch(run, monkeypatch):
    # pretend the family member is not convex: the audit must exit 1
    import pslconj.cli as cli

    real = cli.uniqueness_audit

    def fake(op, arity, samples, seed, **kw):
        from pslconj.convexity import product_tnorm

        return real(product_tnorm, arity, samples, seed, **kw)

    monkeypatch.setattr(cli, "uniqueness_audit", fake)
    code, out, _ = run("audit", "family:1.0", "--samples", "100")
    assert code == 1
    assert json.loads(out)["matches_expected"] is False


def test_decompose(run):
    code, out, _ = run("decompose", "0.9", "0.8")
    report = json.loads(out)
    assert code == 0
    weights = {t["vertex"]: t["weight"] for t in report["terms"]}
    assert weights["11"] == pytest.approx(0.7, abs=1e-12)
    assert report["ones_weight"] == pytest.approx(0.7, abs=1e-12)
    assert report["regime"] == "upper"


def test_decompose_rejects_out_of_range(run):
    code, _, _ = run("decompose", "1.2", "0.5")
    assert code == 2


def test_joint_csv_stdout(run):
    code, out, _ = run("joint", "0.5", "0.5", "--target", "0.25")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "pattern,mass"
    assert len(lines) == 5  # header + 4 rows
    j = JointDistribution.from_csv(out)
    assert all(m == pytest.approx(0.25) for m in j.atoms.values())


def test_joint_to_file(run, tmp_path):
    path = tmp_path / "j.csv"
    code, out, _ = run("joint", "0.3", "0.9", "0.6", "--target", "0.2", "--out", path)
    assert code == 0
    report = json.loads(out)
    assert report["conjunction"] == pytest.approx(0.2, abs=1e-12)
    assert JointDistribution.from_csv(path.read_text()).conjunction_prob() == pytest.approx(0.2, abs=1e-12)


def test_joint_infeasible(run):
    code, out, err = run("joint", "0.5", "0.5", "--target", "0.6")
    assert code == 2 and out == ""
    assert "Frechet" in err


def test_export_lp(run, model_files, tmp_path):
    code, out, _ = run("export-lp", model_files["chain"])
    assert code == 0
    assert out.startswith("#")
    lp = parse_lp(out)
    assert lp.objective == {0: 2.0, 1: 1.0}
    path = tmp_path / "chain.lp"
    code, out, _ = run("export-lp", model_files["chain"], "--blend", "0.5", "--out", path)
    assert code == 0 and json.loads(out)["rows"] == 4
    assert path.read_text().startswith("# hinge-loss LP")


def test_export_lp_needs_linear_loss(run, model_files):
    code, _, err = run("export-lp", model_files["chain"], "--exponent", "2")
    assert code == 2 and "exponent 1" in err


def _floats(obj):
    if isinstance(obj, float):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _floats(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _floats(v)


def test_reports_use_twelve_significant_digits(run):
    _, out, _ = run("decompose", "0.1", "0.2", "0.3")
    report = strip_timing(out)
    values = list(_floats(report))
    assert values
    assert all(v == float(f"{v:.12g}") for v in values)
