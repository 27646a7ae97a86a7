import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bdsiw import BivMaxParams, joint_cdf
from bdsiw.cli import (
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    UsageError,
    cmd_compare,
    cmd_fit,
    cmd_simulate,
    cmd_tabulate,
    format_p,
    main,
)
from bdsiw.datasets import FOOTBALL, load_embedded
from bdsiw.report import parse

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def structured(capsys, *argv):
    code, out, err = run(capsys, "--format", "structured", *argv)
    assert code == EXIT_OK, err
    return parse(out)


def _close(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return a == pytest.approx(b, rel=1e-13)
    if isinstance(a, list):
        return len(a) == len(b) and all(_close(x, y) for x, y in zip(a, b))
    return a == b


def assert_same_document(a, b):
    # float fields may differ in the last bits across platforms
    assert a.command == b.command and a.version == b.version
    assert [s.name for s in a.sections] == [s.name for s in b.sections]
    for sa, sb in zip(a.sections, b.sections):
        assert sa.fields.keys() == sb.fields.keys()
        assert all(_close(sa.fields[k], sb.fields[k]) for k in sa.fields)
        assert sa.columns == sb.columns
        assert _close(sa.rows, sb.rows)


@pytest.mark.parametrize(
    "golden,argv",
    [
        ("datasets.txt", ["datasets"]),
        ("tabulate_cdf.txt", ["tabulate", "--params", "0.5,0.5,0.5,1", "--grid-max", "2", "--quantity", "cdf"]),
    ],
)
def test_golden_structured_output(capsys, golden, argv):
    expected = parse((GOLDEN / golden).read_text())
    assert_same_document(structured(capsys, *argv), expected)


def test_fit_football(capsys):
    doc = structured(capsys, "fit", "--data", "football", "--family", "bdsiw")
    fit = doc.section("fit").fields
    assert fit["neg_log_lik"] == pytest.approx(61.96, abs=0.1)
    assert fit["converged"] is True and fit["k"] == 4
    assert doc.section("data").fields["n"] == 26


def test_fit_marginals(capsys):
    doc = structured(capsys, "fit", "--data", "football", "--marginals")
    rows = {r["variable"]: r for r in doc.section("marginals").records()}
    assert rows["x1"]["theta"] == pytest.approx(0.237, abs=0.02)
    assert rows["x1"]["zeta"] == pytest.approx(2.798, abs=0.02)
    assert set(rows) == {"x1", "x2", "min"}


def test_fit_fixed_shape(capsys):
    doc = structured(capsys, "fit", "--data", "nasal", "--fix-shape", "2")
    fit = doc.section("fit").fields
    assert fit["model"] == "bdsir" and fit["zeta"] == 2.0 and fit["k"] == 3


def test_table_format_is_default(capsys):
    code, out, _ = run(capsys, "fit", "--data", "football", "--starts", "2")
    assert code == EXIT_OK
    assert "== fit ==" in out and "neg_log_lik" in out


def test_compare_football():
    doc = cmd_compare(load_embedded("football"), ["bdsiw", "bdsie", "bdsir"])
    aic = doc.section("comparison").column("aic")
    assert aic == sorted(aic)
    assert doc.section("comparison").column("model")[0] == "bdsiw"
    lrt = {r["restricted"]: r for r in doc.section("lrt").records()}
    assert lrt["bdsie"]["lambda"] == pytest.approx(33.15, abs=0.3)
    assert lrt["bdsie"]["p_display"] == "<0.01"
    assert lrt["bdsir"]["lambda"] == pytest.approx(4.29, abs=0.3)
    assert lrt["bdsir"]["p_value"] == pytest.approx(0.0384, abs=0.002)


def test_compare_competitor_nesting():
    doc = cmd_compare(load_embedded("football"), ["bdsw", "bdse", "bdsr", "bdsiw"], starts=4)
    pairs = {(r["full"], r["restricted"]) for r in doc.section("lrt").records()}
    assert pairs == {("bdsw", "bdse"), ("bdsw", "bdsr")}


def test_compare_usage_errors(capsys):
    code, _, err = run(capsys, "compare", "--data", "football", "--models", "bdsiw")
    assert code == EXIT_USAGE and "two" in err
    code, _, _ = run(capsys, "compare", "--data", "football", "--models", "bdsiw,poisson")
    assert code == EXIT_USAGE
    with pytest.raises(UsageError):
        cmd_compare(load_embedded("football"), ["bdsiw", "bdsiw"])


def test_format_p():
    assert format_p(0.0001) == "<0.01"
    assert format_p(0.0384) == "0.0384"


def test_simulate_determinism(capsys):
    argv = ["simulate", "--truth", "0.8,0.4,0.4,0.5", "--sizes", "50,100", "--reps", "10", "--seed", "7"]
    a = run(capsys, "--format", "structured", *argv)
    b = run(capsys, "--format", "structured", *argv)
    assert a[0] == EXIT_OK and a[1] == b[1]
    doc = parse(a[1])
    assert doc.section("results").column("n") == [50, 100]
    assert doc.section("study").fields["seed"] == 7


def test_global_flags_after_subcommand(capsys):
    argv = ["simulate", "--truth", "0.8,0.4,0.4,0.5", "--sizes", "30", "--reps", "3"]
    a = run(capsys, "--seed", "5", "--format", "structured", *argv)
    b = run(capsys, *argv, "--seed", "5", "--format", "structured")
    assert a[1] == b[1]
    assert parse(a[1]).section("study").fields["seed"] == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--truth", "0.8,0.4,0.4,0.5", "--reps", "0"],
        ["simulate", "--truth", "0.8,0.4,0.4"],
        ["simulate", "--truth", "0.8,0.4,1.4,0.5", "--reps", "2"],
        ["simulate", "--truth", "0.8,0.4,0.4,0.5", "--sizes", "100,50", "--reps", "2"],
        ["tabulate", "--params", "0.5,0.5,0.5"],
        ["tabulate", "--from-fit"],
        ["tabulate", "--params", "0.5,0.5,0.5,1", "--quantity", "density"],
        ["fit"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2\n1,2\n2.5,1\n")
    code, _, err = run(capsys, "fit", "--data", str(bad))
    assert code == EXIT_PARSE
    assert "row 3, column 0" in err
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run(capsys, "fit", "--data", str(empty))[0] == EXIT_PARSE
    assert run(capsys, "fit", "--data", str(tmp_path / "none.csv"))[0] == EXIT_PARSE


def test_non_convergence_exit_code(capsys, monkeypatch):
    from bdsiw import inference

    monkeypatch.setattr(inference, "_NM_OPTIONS", {**inference._NM_OPTIONS, "maxiter": 3, "maxfev": 3})
    code, _, err = run(capsys, "fit", "--data", "football", "--starts", "2")
    assert code == EXIT_NONCONVERGENCE
    assert "best point" in err


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NONCONVERGENCE}) == 4


def test_csv_input(capsys, tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text("home,away\n" + "".join(f"{a},{b}\n" for a, b in FOOTBALL))
    doc = structured(capsys, "fit", "--data", str(path), "--col1", "home", "--col2", "away", "--starts", "4")
    assert doc.section("fit").fields["neg_log_lik"] == pytest.approx(61.96, abs=0.1)
    assert doc.section("data").fields["source"] == str(path)


def test_tabulate_pmf_telescopes():
    p = BivMaxParams(0.8, 0.4, 0.4, 0.5)
    for g in (0, 3, 12):
        doc = cmd_tabulate(p, g, "pmf")
        assert sum(doc.section("grid").column("value")) == pytest.approx(joint_cdf(p, g, g), abs=1e-12)
        assert len(doc.section("grid").rows) == (g + 1) ** 2


@pytest.mark.parametrize("quantity", ["bhrf", "reliability", "cdf"])
def test_tabulate_quantities_nonnegative(quantity):
    doc = cmd_tabulate(BivMaxParams(0.3, 0.7, 0.5, 1.7), 8, quantity)
    vals = np.array(doc.section("grid").column("value"))
    assert np.all(vals >= 0)


def test_tabulate_from_fit_mode_on_diagonal(capsys):
    doc = structured(capsys, "tabulate", "--from-fit", "--data", "football", "--grid-max", "4")
    rows = doc.section("grid").rows
    x1, x2, _ = max(rows, key=lambda r: r[2])
    assert x1 == x2 == 1  # the most frequent score in the data is 1-1
    assert "football" in doc.section("params").fields["source"]


def test_fit_report_function():
    doc = cmd_fit(load_embedded("nasal"), "bdsie", starts=2)
    assert doc.section("fit").fields["model"] == "bdsie"


def test_simulate_function_rejects_bad_reps():
    with pytest.raises(UsageError):
        cmd_simulate((0.8, 0.4, 0.4, 0.5), (50,), 0)


def test_module_and_console_entry_points():
    out = subprocess.run([sys.executable, "-m", "bdsiw", "datasets"], capture_output=True, text=True)
    assert out.returncode == 0 and "football" in out.stdout
    out = subprocess.run([sys.executable, "-m", "bdsiw", "compare", "--data", "football", "--models", "bdsiw"],
                         capture_output=True, text=True)  # fmt: skip
    assert out.returncode == EXIT_USAGE
    out = subprocess.run([sys.executable, "-m", "bdsiw", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("bdsiw")
