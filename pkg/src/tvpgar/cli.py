"""Command-line pipeline: preprocess, fit, forecast, evaluate, decompose, girtest.

Each subcommand reads the INI config given by ``--config``, writes its
products under the output directory and drops a ``manifest.json`` next to
them (config echo, master seed, package version). Failures print one JSON
object on stderr and exit nonzero.

Layout under the output directory::

    data/dataset_<variant>_h<h>.csv       preprocess
    fit/<variant>_h<h>/                   fit (posterior draws)
    forecast/quantiles_<model>_h<h>.csv   forecast (tvp model and QR baseline)
    evaluation/                           evaluate
    decomposition/                        decompose
    girtest/                              girtest
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from . import __version__
from .dates import format_quarter, parse_quarter
from .decomposition import DEFAULT_WINDOW, HAC_LAGS, linear_posterior_summary, local_projections
from .errors import ConfigError, DependencyError, DomainError, SchemaError, TvpGarError
from .evaluation import DISPERSION_PERIODS, TABLE1_PERIODS, Period, evaluate, periods_from_config
from .forecast import DEFAULT_PROBS, MIN_TRAINING, QuantilePath, recursive_forecast
from .model import TvpSvModelSpec, model_spec_from_config, read_config
from .pipeline import (
    BASELINE_COLUMNS,
    EXTENDED_COLUMNS,
    HP_LAMBDA_SLOW,
    RegressionDataset,
    assemble_dataset,
    build_predictors,
    read_annual_csv,
    read_quarterly_csv,
)
from .qr import recursive_quantile_regression
from .sampler.chain import SamplerConfig, run_chain, stream
from .sampler.geweke import DEFAULT_CHAIN_LENGTH, getting_it_right
from .synthetic import DgpSpec, dgp_from_config, simulate_dgp

log = logging.getLogger("tvpgar")

MODEL_NAMES = {"baseline": ("tvp", "qr"), "extended": ("tvp_plus", "qr_plus")}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    """Everything one pipeline run needs, parsed from the INI file."""

    source: str = "csv"
    quarterly: Path | None = None
    annual: Path | None = None
    gdp: str = "gdp"
    gdp_is_log: bool = False
    stress: str = "stress"
    credit: str = "credit_to_gdp"
    house: str = "house_price"
    hp_lambda: float = HP_LAMBDA_SLOW
    knot_quarter: int = 4
    standardize_stress: bool = False
    horizons: tuple[int, ...] = (1, 4)
    probs: tuple[float, ...] = DEFAULT_PROBS
    variant: str = "baseline"
    output: Path = Path("output")
    seed: int = 0
    recursive_start: str | None = None
    recursive_end: str | None = None
    min_train: int = MIN_TRAINING
    stride: int = 1
    warm_start: bool = False
    qr_method: str = "irls"
    eval_tau: float = 0.05
    window: int = DEFAULT_WINDOW
    cov: str = "classical"
    hac_lags: int = HAC_LAGS
    lp_dates: tuple[str, ...] = ()
    periods: tuple[Period, ...] = TABLE1_PERIODS
    dispersion_periods: tuple[Period, ...] = DISPERSION_PERIODS
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    dgp: DgpSpec = field(default_factory=DgpSpec)
    gir_T: int = 24
    gir_K: int = 2
    gir_draws: int = 20000
    gir_chain_length: int = DEFAULT_CHAIN_LENGTH
    raw: configparser.ConfigParser | None = None

    def __post_init__(self):
        if self.source not in ("csv", "synthetic"):
            raise ConfigError(f"data source must be csv or synthetic, got {self.source!r}")
        if self.variant not in MODEL_NAMES:
            raise ConfigError(f"variant must be baseline or extended, got {self.variant!r}")
        if not self.horizons or min(self.horizons) < 1:
            raise ConfigError("horizons must be >= 1")
        if not all(0 < p < 1 for p in self.probs):
            raise ConfigError("probs must lie in (0, 1)")
        if self.source == "csv":
            for name in ("quarterly", "annual"):
                path = getattr(self, name)
                if path is not None and not Path(path).is_file():
                    raise ConfigError(f"{name} data file not found: {path}")
            if self.quarterly is None:
                raise ConfigError("[data] quarterly is required for csv input")

    @property
    def columns(self) -> tuple[str, ...]:
        return BASELINE_COLUMNS if self.variant == "baseline" else EXTENDED_COLUMNS

    @property
    def tvp_name(self) -> str:
        return MODEL_NAMES[self.variant][0]

    @property
    def qr_name(self) -> str:
        return MODEL_NAMES[self.variant][1]

    def echo(self) -> dict:
        if self.raw is None:
            return {}
        return {s: dict(self.raw[s]) for s in self.raw.sections()}


def load_run_config(path: str | Path, seed: int | None = None, output: str | Path | None = None) -> RunConfig:
    cp = read_config(path)
    base = Path(path).resolve().parent
    kw: dict = {"raw": cp}

    def rel(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    if cp.has_section("data"):
        d = cp["data"]
        kw["source"] = d.get("source", "csv")
        for key in ("quarterly", "annual"):
            if d.get(key):
                kw[key] = rel(d[key])
        for key in ("gdp", "stress", "credit", "house"):
            if key in d:
                kw[key] = d[key]
        if "gdp_is_log" in d:
            kw["gdp_is_log"] = _bool(d["gdp_is_log"])
        if "hp_lambda" in d:
            kw["hp_lambda"] = float(d["hp_lambda"])
        if "knot_quarter" in d:
            kw["knot_quarter"] = int(d["knot_quarter"])
        if "standardize_stress" in d:
            kw["standardize_stress"] = _bool(d["standardize_stress"])
    if cp.has_section("run"):
        r = cp["run"]
        if "horizons" in r:
            kw["horizons"] = _ints(r["horizons"])
        if "probs" in r:
            kw["probs"] = _floats(r["probs"])
        for key in ("variant", "recursive_start", "recursive_end", "qr_method"):
            if r.get(key):
                kw[key] = r[key].strip()
        if "output" in r:
            kw["output"] = rel(r["output"])
        for key in ("seed", "min_train", "stride"):
            if key in r:
                kw[key] = int(r[key])
        if "warm_start" in r:
            kw["warm_start"] = _bool(r["warm_start"])
    if cp.has_section("evaluation"):
        e = cp["evaluation"]
        if "tau" in e:
            kw["eval_tau"] = float(e["tau"])
    if cp.has_section("periods"):
        kw["periods"] = periods_from_config(cp["periods"], TABLE1_PERIODS)
    if cp.has_section("dispersion_periods"):
        kw["dispersion_periods"] = periods_from_config(cp["dispersion_periods"], DISPERSION_PERIODS)
    if cp.has_section("decomposition"):
        dd = cp["decomposition"]
        if "window" in dd:
            kw["window"] = int(dd["window"])
        if "cov" in dd:
            kw["cov"] = dd["cov"].strip()
        if "hac_lags" in dd:
            kw["hac_lags"] = int(dd["hac_lags"])
        if dd.get("lp_dates"):
            kw["lp_dates"] = tuple(dd["lp_dates"].replace(",", " ").split())
    sampler = SamplerConfig()
    if cp.has_section("sampler"):
        s = cp["sampler"]
        upd = {}
        for key in ("n_draws", "burn_in", "thin", "seed"):
            if key in s:
                upd[key] = int(s[key])
        if "mh_target_acceptance" in s:
            upd["mh_target_acceptance"] = float(s["mh_target_acceptance"])
        for key in ("asis", "sv_interweave"):
            if key in s:
                upd[key] = _bool(s[key])
        sampler = replace(sampler, **upd)
    if cp.has_section("synthetic"):
        kw["dgp"] = dgp_from_config(cp["synthetic"])
    if cp.has_section("girtest"):
        g = cp["girtest"]
        for key, name in (("T", "gir_T"), ("K", "gir_K"), ("n_draws", "gir_draws"), ("chain_length", "gir_chain_length")):
            if key.lower() in g:
                kw[name] = int(g[key.lower()])
    # the master seed drives every stream; --seed overrides the file
    master = kw.get("seed", 0) if seed is None else int(seed)
    kw["seed"] = master
    kw["sampler"] = replace(sampler, seed=master)
    if output is not None:
        kw["output"] = Path(output)
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# helpers


def _write_manifest(directory: Path, command: str, rc: RunConfig, inputs: Sequence[Path], outputs: Sequence[Path],
                    extra: dict | None = None) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    man = {
        "command": command,
        "version": __version__,
        "seed": int(rc.seed),
        "config": rc.echo(),
        "inputs": sorted(str(Path(p).relative_to(rc.output)) if _inside(p, rc.output) else str(p) for p in inputs),
        "outputs": sorted(str(Path(p).relative_to(rc.output)) if _inside(p, rc.output) else str(p) for p in outputs),
    }
    if extra:
        man.update(extra)
    (directory / "manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True, default=str))


def _inside(p, root) -> bool:
    try:
        Path(p).resolve().relative_to(Path(root).resolve())
        return True
    except ValueError:
        return False


def _dataset_path(rc: RunConfig, h: int) -> Path:
    return rc.output / "data" / f"dataset_{rc.variant}_h{h}.csv"


def _load_dataset(rc: RunConfig, h: int) -> RegressionDataset:
    path = _dataset_path(rc, h)
    if not path.is_file():
        raise DependencyError(f"dataset {path} not found; run preprocess first", producer="preprocess")
    return RegressionDataset.from_csv(path, horizon=h)


def _quantile_path(rc: RunConfig, model: str, h: int) -> Path:
    return rc.output / "forecast" / f"quantiles_{model}_h{h}.csv"


def _model_spec(rc: RunConfig, h: int, K: int) -> TvpSvModelSpec:
    cp = rc.raw if rc.raw is not None else configparser.ConfigParser()
    return model_spec_from_config(cp, horizon=h, K=K)


def _start_origin(rc: RunConfig, data: RegressionDataset) -> int:
    if rc.recursive_start:
        return parse_quarter(rc.recursive_start)
    # earliest origin whose training set reaches min_train rows
    for o in data.origins:
        if len(data.observed_through(int(o))) >= rc.min_train:
            return int(o)
    raise ConfigError(f"dataset too short for min_train = {rc.min_train}")


# ---------------------------------------------------------------------------
# commands


def cmd_preprocess(rc: RunConfig, threads: int = 1) -> list[Path]:
    out_dir = rc.output / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs, inputs, extra = [], [], {}
    if rc.source == "synthetic":
        for h in rc.horizons:
            data, _ = simulate_dgp(replace(rc.dgp, horizon=h))
            path = _dataset_path(rc, h)
            data.to_csv(path)
            outputs.append(path)
        extra["transforms"] = {"synthetic": asdict(rc.dgp)}
    else:
        quarterly = {s.name: s for s in read_quarterly_csv(rc.quarterly)}
        annual = {s.name: s for s in read_annual_csv(rc.annual)} if rc.annual else {}
        inputs = [rc.quarterly] + ([rc.annual] if rc.annual else [])
        if rc.gdp not in quarterly:
            raise SchemaError(f"{rc.quarterly}: missing column {rc.gdp!r}", column=rc.gdp)
        gdp = quarterly[rc.gdp]
        if not rc.gdp_is_log:
            if np.any(gdp.values <= 0):
                raise DomainError(f"column {rc.gdp!r} must be positive to take logs")
            gdp = type(gdp)(gdp.name, gdp.start, np.log(gdp.values))
        preds = build_predictors(
            quarterly, annual, stress=rc.stress,
            credit=rc.credit if rc.variant == "extended" else None,
            house=rc.house if rc.variant == "extended" else None,
            hp_lambda=rc.hp_lambda, knot_quarter=rc.knot_quarter, standardize_stress=rc.standardize_stress,
        )
        ranges = {}
        for h in rc.horizons:
            data = assemble_dataset(gdp, preds, h, rc.columns)
            path = _dataset_path(rc, h)
            data.to_csv(path)
            outputs.append(path)
            ranges[f"h{h}"] = {"first_origin": format_quarter(int(data.origins[0])),
                               "last_origin": format_quarter(int(data.origins[-1])),
                               "rows": len(data), "observed": int((~data.forecast_only).sum())}
        extra["transforms"] = {"hp_lambda": rc.hp_lambda, "knot_quarter": rc.knot_quarter,
                               "standardize_stress": rc.standardize_stress, "gdp_is_log": rc.gdp_is_log,
                               "columns": list(rc.columns)}
        extra["date_ranges"] = ranges
    _write_manifest(out_dir, "preprocess", rc, inputs, outputs, extra)
    return outputs


def cmd_fit(rc: RunConfig, threads: int = 1) -> list[Path]:
    outputs, inputs = [], []
    for h in rc.horizons:
        data = _load_dataset(rc, h)
        inputs.append(_dataset_path(rc, h))
        spec = _model_spec(rc, h, data.K)
        draws = run_chain(spec, data, rc.sampler, rng=stream(rc.seed, 0, h))
        d = rc.output / "fit" / f"{rc.variant}_h{h}"
        draws.save(d)
        outputs.append(d)
    _write_manifest(rc.output / "fit", "fit", rc, inputs, outputs, {"sampler": asdict(rc.sampler)})
    return outputs


def cmd_forecast(rc: RunConfig, threads: int = 1) -> list[Path]:
    outputs, inputs = [], []
    (rc.output / "forecast").mkdir(parents=True, exist_ok=True)
    for h in rc.horizons:
        data = _load_dataset(rc, h)
        inputs.append(_dataset_path(rc, h))
        spec = _model_spec(rc, h, data.K)
        start = _start_origin(rc, data)
        tvp = recursive_forecast(
            data, spec, rc.sampler, start, rc.probs, rc.min_train, rc.recursive_end, rc.stride,
            rc.warm_start, model=rc.tvp_name, workers=max(1, threads),
        )
        qr = recursive_quantile_regression(
            data, start, rc.probs, rc.min_train, rc.recursive_end, rc.stride, model=rc.qr_name, method=rc.qr_method,
        )
        for path_obj, name in ((tvp, rc.tvp_name), (qr, rc.qr_name)):
            p = _quantile_path(rc, name, h)
            path_obj.to_csv(p)
            outputs.append(p)
    _write_manifest(rc.output / "forecast", "forecast", rc, inputs, outputs, {"sampler": asdict(rc.sampler)})
    return outputs


def _available_paths(rc: RunConfig) -> dict[str, QuantilePath]:
    fdir = rc.output / "forecast"
    found: dict[str, list[QuantilePath]] = {}
    if fdir.is_dir():
        for f in sorted(fdir.glob("quantiles_*_h*.csv")):
            name = f.stem[len("quantiles_"):].rsplit("_h", 1)[0]
            found.setdefault(name, []).append(QuantilePath.from_csv(f, name))
    out = {}
    for name, parts in found.items():
        acc = parts[0]
        for p in parts[1:]:
            acc = acc.concat(p)
        out[name] = acc
    return out


def cmd_evaluate(rc: RunConfig, threads: int = 1) -> list[Path]:
    paths = _available_paths(rc)
    if not paths:
        raise DependencyError(f"no forecasts under {rc.output / 'forecast'}; run forecast first", producer="forecast")
    baseline = "qr" if "qr" in paths else ("qr_plus" if "qr_plus" in paths else None)
    if baseline is None:
        raise DependencyError("no QR baseline forecasts found; run forecast first", producer="forecast")
    tvp_models = [n for n in paths if n.startswith("tvp")]
    report = evaluate(paths, baseline, rc.eval_tau, rc.periods, rc.dispersion_periods, tvp_models)
    d = rc.output / "evaluation"
    d.mkdir(parents=True, exist_ok=True)
    outputs = [d / "scores.csv", d / "table1.txt", d / "dispersion.csv", d / "recursive_paths.csv"]
    report.to_csv(outputs[0])
    outputs[1].write_text(report.to_text())
    if report.dispersion is not None:
        report.dispersion.to_csv(outputs[2], index=False, float_format="%.10g")
    rec = [pd.DataFrame({"series": k, "origin": [format_quarter(int(o)) for o in v.index], "ratio": v.to_numpy()})
           for k, v in report.paths.items()]
    pd.concat(rec, ignore_index=True).to_csv(outputs[3], index=False, float_format="%.10g")
    inputs = sorted((rc.output / "forecast").glob("quantiles_*.csv"))
    _write_manifest(d, "evaluate", rc, inputs, outputs, {"baseline": baseline, "tau": rc.eval_tau})
    sys.stdout.write(report.to_text())
    return outputs


def cmd_decompose(rc: RunConfig, threads: int = 1) -> list[Path]:
    d = rc.output / "decomposition"
    d.mkdir(parents=True, exist_ok=True)
    outputs, inputs = [], []
    frames = []
    lp_parts = []
    for h in rc.horizons:
        qpath = _quantile_path(rc, rc.tvp_name, h)
        if not qpath.is_file():
            raise DependencyError(f"forecasts {qpath} not found; run forecast first", producer="forecast")
        data = _load_dataset(rc, h)
        inputs += [qpath, _dataset_path(rc, h)]
        path = QuantilePath.from_csv(qpath, rc.tvp_name)
        for p in path.probs:
            res = linear_posterior_summary(path, data, float(p), rc.window, rc.cov, rc.hac_lags)
            frames.append(res.to_frame())
            if rc.lp_dates:
                lp_parts.append((float(p), int(h), res))
    out = d / f"decomposition_{rc.tvp_name}.csv"
    pd.concat(frames, ignore_index=True).to_csv(out, index=False)
    outputs.append(out)
    if rc.lp_dates:
        tables = []
        for p in sorted({p for p, _, _ in lp_parts}):
            by_h = {h: r for q, h, r in lp_parts if q == p}
            tables.append(local_projections(by_h, rc.lp_dates))
        lp = d / f"local_projections_{rc.tvp_name}.csv"
        pd.concat(tables, ignore_index=True).to_csv(lp, index=False)
        outputs.append(lp)
    _write_manifest(d, "decompose", rc, inputs, outputs, {"window": rc.window, "cov": rc.cov})
    return outputs


def cmd_girtest(rc: RunConfig, threads: int = 1) -> list[Path]:
    spec = _model_spec(rc, 1, rc.gir_K)
    cfg = rc.sampler
    report = getting_it_right(spec, rc.gir_T, cfg, n_draws=rc.gir_draws, chain_length=rc.gir_chain_length)
    d = rc.output / "girtest"
    d.mkdir(parents=True, exist_ok=True)
    outputs = [d / "report.json", d / "statistics.csv"]
    outputs[0].write_text(report.to_json())
    report.rows.to_csv(outputs[1], index=False, float_format="%.10g")
    _write_manifest(d, "girtest", rc, [], outputs, {"passed": report.passed(), "T": rc.gir_T, "K": rc.gir_K})
    sys.stdout.write(report.summary() + "\n")
    return outputs


COMMANDS = {
    "preprocess": cmd_preprocess,
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "decompose": cmd_decompose,
    "girtest": cmd_girtest,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tvpgar", description="Growth-at-risk with a TVP-SV regression.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
        p.add_argument("--threads", type=int, default=1, help="worker processes for recursive origins")
        p.add_argument("--output", default=None, help="output directory (overrides the config)")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        rc = load_run_config(args.config, seed=args.seed, output=args.output)
        COMMANDS[args.command](rc, threads=args.threads)
    except TvpGarError as exc:
        payload = exc.to_dict()
        payload["command"] = args.command
        sys.stderr.write(json.dumps(payload) + "\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - report anything else as JSON too
        payload = {"error": "internal_error", "type": type(exc).__name__, "message": str(exc), "command": args.command}
        sys.stderr.write(json.dumps(payload) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
