import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from tvpgar import __version__
from tvpgar.dates import format_quarter
from tvpgar.cli import load_run_config, main
from tvpgar.errors import ConfigError
from tvpgar.pipeline import RegressionDataset

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("TVPGAR_REGEN_GOLDEN") == "1"


def _write_inputs(d: Path, drop_stress=False):
    rng = np.random.default_rng(0)
    n = 160
    dates = [f"{1900 + i // 4}-Q{i % 4 + 1}" for i in range(n)]
    gdp = 100 * np.exp(np.cumsum(0.005 + 0.01 * rng.standard_normal(n)))
    q = pd.DataFrame({"date": dates, "gdp": gdp})
    if not drop_stress:
        q["stress"] = np.cumsum(rng.standard_normal(n))
    q.to_csv(d / "quarterly.csv", index=False)
    years = np.arange(1899, 1941)
    a = pd.DataFrame({"date": years.astype(str),
                      "credit_to_gdp": 50 * np.exp(np.cumsum(0.02 * rng.standard_normal(years.size))),
                      "house_price": 100 * np.exp(np.cumsum(0.03 * rng.standard_normal(years.size)))})
    a.to_csv(d / "annual.csv", index=False)


def _config(d: Path, body: str) -> Path:
    p = d / "run.ini"
    p.write_text(body)
    return p


CSV_CONFIG = """
[data]
quarterly = quarterly.csv
annual = annual.csv
hp_lambda = 1600

[run]
horizons = 1 4
variant = {variant}
output = out
seed = 3
"""

SYNTH_CONFIG = """
[data]
source = synthetic

[synthetic]
T = 100
K = 2
beta_path = random_walk
v = 0.05
vol = sv
seed = 7

[run]
horizons = 1
probs = 0.05 0.95
output = out
seed = 11
min_train = 80
stride = 2

[sampler]
n_draws = 150
burn_in = 100
thin = 1

[decomposition]
window = 6

[periods]
early = :1920-Q4
late = 1921-Q1:

[dispersion_periods]
all = :

[girtest]
T = 8
n_draws = 200
"""


def run(cfg, *cmd, capsys=None, extra=()):
    code = main([cmd[0], "--config", str(cfg), *extra])
    out = capsys.readouterr() if capsys is not None else None
    return code, out


def test_preprocess_baseline_and_extended(tmp_path, capsys):
    _write_inputs(tmp_path)
    cfg = _config(tmp_path, CSV_CONFIG.format(variant="baseline"))
    code, _ = run(cfg, "preprocess", capsys=capsys)
    assert code == 0
    d1 = RegressionDataset.from_csv(tmp_path / "out/data/dataset_baseline_h1.csv", horizon=1)
    d4 = RegressionDataset.from_csv(tmp_path / "out/data/dataset_baseline_h4.csv", horizon=4)
    assert d1.columns == ("intercept", "lag_growth", "stress")
    # every origin from 1900-Q2 on has the lagged growth and the stress cycle
    assert len(d1) == 159 == len(d4)
    obs1, obs4 = int((~d1.forecast_only).sum()), int((~d4.forecast_only).sum())
    assert obs1 - obs4 == 3
    man = json.loads((tmp_path / "out/data/manifest.json").read_text())
    assert man["command"] == "preprocess" and man["version"] == __version__ and man["seed"] == 3
    assert man["date_ranges"]["h4"]["observed"] == obs4
    assert man["config"]["data"]["hp_lambda"] == "1600"

    cfg = _config(tmp_path, CSV_CONFIG.format(variant="extended"))
    assert run(cfg, "preprocess", capsys=capsys)[0] == 0
    e1 = RegressionDataset.from_csv(tmp_path / "out/data/dataset_extended_h1.csv", horizon=1)
    assert e1.K == 5 and e1.columns[-2:] == ("credit_growth", "house_growth")
    # three-year growth needs 12 quarters after the first spline quarter (1899-Q4)
    assert format_quarter(int(e1.origins[0])) == "1902-Q4"


def test_missing_column_schema_error(tmp_path, capsys):
    _write_inputs(tmp_path, drop_stress=True)
    cfg = _config(tmp_path, CSV_CONFIG.format(variant="baseline"))
    code, out = run(cfg, "preprocess", capsys=capsys)
    assert code == 2
    err = json.loads(out.err)
    assert err["error"] == "schema_error" and err["column"] == "stress" and err["command"] == "preprocess"


def test_bad_row_schema_error(tmp_path, capsys):
    _write_inputs(tmp_path)
    text = (tmp_path / "quarterly.csv").read_text().splitlines()
    parts = text[5].split(",")
    parts[1] = "n/a?"
    text[5] = ",".join(parts)
    (tmp_path / "quarterly.csv").write_text("\n".join(text) + "\n")
    code, out = run(_config(tmp_path, CSV_CONFIG.format(variant="baseline")), "preprocess", capsys=capsys)
    err = json.loads(out.err)
    assert code == 2 and err["column"] == "gdp" and err["row"] == 6


def test_dependency_errors(tmp_path, capsys):
    cfg = _config(tmp_path, SYNTH_CONFIG)
    code, out = run(cfg, "evaluate", capsys=capsys)
    err = json.loads(out.err)
    assert code == 2 and err["error"] == "dependency_error" and err["producer"] == "forecast"
    code, out = run(cfg, "fit", capsys=capsys)
    assert code == 2 and json.loads(out.err)["producer"] == "preprocess"
    code, out = run(cfg, "decompose", capsys=capsys)
    assert code == 2 and json.loads(out.err)["producer"] == "forecast"


def test_config_errors(tmp_path, capsys):
    cfg = _config(tmp_path, "[data]\nquarterly = nope.csv\n")
    code, out = run(cfg, "preprocess", capsys=capsys)
    assert code == 2 and json.loads(out.err)["error"] == "config_error"
    code, out = run(tmp_path / "missing.ini", "preprocess", capsys=capsys)
    assert code == 2 and json.loads(out.err)["error"] == "config_error"
    cfg = _config(tmp_path, SYNTH_CONFIG)
    code, out = run(cfg, "fit", capsys=capsys, extra=("--threads", "0"))
    assert code == 2
    with pytest.raises(ConfigError):
        load_run_config(_config(tmp_path, "[data]\nsource = synthetic\n[run]\nprobs = 0.05 1.5\n"))


def test_seed_and_output_overrides(tmp_path):
    cfg = _config(tmp_path, SYNTH_CONFIG)
    rc = load_run_config(cfg, seed=99, output=tmp_path / "elsewhere")
    assert rc.seed == 99 and rc.sampler.seed == 99 and rc.output == tmp_path / "elsewhere"
    assert load_run_config(cfg).output == tmp_path / "out"


def test_girtest_report(tmp_path, capsys):
    cfg = _config(tmp_path, SYNTH_CONFIG)
    code, out = run(cfg, "girtest", capsys=capsys)
    assert code == 0
    assert out.out.startswith("getting-it-right PASS") or out.out.startswith("getting-it-right FAIL")
    rep = json.loads((tmp_path / "out/girtest/report.json").read_text())
    assert rep["n_draws"] == 200 and len(rep["statistics"]) == 48 and "passed" in rep


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory):
    d = tmp_path_factory.mktemp("pipe")
    cfg = _config(d, SYNTH_CONFIG)
    for cmd in ("preprocess", "fit", "forecast", "evaluate", "decompose"):
        assert main([cmd, "--config", str(cfg)]) == 0, cmd
    return d, cfg


GOLDEN_FILES = [
    "data/dataset_baseline_h1.csv",
    "forecast/quantiles_tvp_h1.csv",
    "forecast/quantiles_qr_h1.csv",
    "evaluation/scores.csv",
    "evaluation/table1.txt",
    "decomposition/decomposition_tvp.csv",
]


def test_pipeline_artifacts(pipeline_run):
    d, _ = pipeline_run
    out = d / "out"
    for rel in GOLDEN_FILES + ["fit/baseline_h1/manifest.json", "fit/baseline_h1/states_tilde.csv",
                               "evaluation/dispersion.csv", "evaluation/recursive_paths.csv"]:
        assert (out / rel).is_file(), rel
    for stage in ("data", "fit", "forecast", "evaluation", "decomposition"):
        man = json.loads((out / stage / "manifest.json").read_text())
        assert man["seed"] == 11 and man["version"] == __version__
        assert man["config"]["synthetic"]["seed"] == "7"
    q = pd.read_csv(out / "forecast/quantiles_tvp_h1.csv")
    assert q.origin.nunique() == 10 and set(q.prob) == {0.05, 0.95}
    dec = pd.read_csv(out / "decomposition/decomposition_tvp.csv")
    fitted = dec.groupby(["window_end", "prob"]).agg(c=("contribution", "sum"), f=("fitted", "first"))
    np.testing.assert_allclose(fitted.c, fitted.f, atol=1e-10)


@pytest.mark.parametrize("rel", GOLDEN_FILES)
def test_golden_files(pipeline_run, rel):
    d, _ = pipeline_run
    got = d / "out" / rel
    ref = GOLDEN / rel.replace("/", "__")
    if REGEN:
        ref.write_bytes(got.read_bytes())
    assert ref.is_file(), f"golden file {ref.name} missing; regenerate with TVPGAR_REGEN_GOLDEN=1"
    if rel.endswith(".csv"):
        a, b = pd.read_csv(got), pd.read_csv(ref)
        assert list(a.columns) == list(b.columns)
        num = a.select_dtypes("number").columns
        np.testing.assert_allclose(a[num].to_numpy(float), b[num].to_numpy(float), rtol=1e-9, atol=1e-10)
        other = [c for c in a.columns if c not in num]
        assert a[other].equals(b[other])
    else:
        assert got.read_text() == ref.read_text()


def test_idempotent_rerun(pipeline_run):
    d, cfg = pipeline_run
    out = d / "out"
    before = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    assert main(["forecast", "--config", str(cfg)]) == 0
    assert main(["decompose", "--config", str(cfg)]) == 0
    after = {p: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    assert before == after


def test_console_script_version():
    r = subprocess.run([sys.executable, "-m", "tvpgar.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and __version__ in r.stdout
