"""``vineflood`` command line interface.

Every subcommand takes ``--config`` (versioned JSON) plus optional
``--seed`` / ``--out`` overrides. Stages exchange serialized artifacts —
marginal JSON, vine JSON, forecast CSV — each embedding the ordered
column signature so mismatched artifacts are rejected rather than
silently combined. Exit codes: 0 success, 2 validation error,
3 numerical failure.
"""

import datetime as dt
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from .copulas import DEFAULT_FAMILIES
from .errors import NumericalError, ValidationError, VinefloodError
from .forecast import (
    DEFAULT_SPLIT_DATE,
    ForecastConfig,
    FittedMarginals,
    fit_marginals,
    rolling_forecast,
)
from .marginals import marginal_from_dict, marginal_from_spec
from .metrics import EvaluationRow, EvaluationTable, dcor, mis, mse, nnse
from .sentiment import Lexicon, aggregate_daily, score_corpus
from .timeseries import ingest
from .vine import RVineCopula, independence_vine

CONFIG_VERSION = 1
MODEL_LABELS = ("independence", "gaussian", "full")


# --------------------------------------------------------------------- config
def _load_config(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"config file not found: {p}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON ({exc})") from None
    if cfg.get("version") != CONFIG_VERSION:
        raise ValidationError(
            f"{p}: unsupported config version {cfg.get('version')!r}; expected {CONFIG_VERSION}"
        )
    return cfg


def _parse_date(s):
    try:
        return dt.date.fromisoformat(str(s))
    except ValueError:
        raise ValidationError(f"unparseable ISO date {s!r}") from None


def _forecast_config(cfg: dict) -> ForecastConfig:
    f = cfg.get("forecast", {})
    refit = f.get("refit_policy", "fit_once")
    if isinstance(refit, dict):
        refit = ("refit_every", int(refit["refit_every"]))
    mode = f.get("mode", "joint_unconditional")
    if isinstance(mode, dict):
        mode = ("conditional_on_subset", tuple(mode["conditional_on_subset"]))
    return ForecastConfig(
        M=int(f.get("M", 10000)),
        alpha=float(f.get("alpha", 0.05)),
        split_date=_parse_date(f.get("split_date", DEFAULT_SPLIT_DATE.isoformat())),
        refit_policy=refit,
        mode=mode,
    )


def _seed(cfg: dict, override) -> int:
    if override is not None:
        return int(override)
    if "seed" not in cfg:
        raise ValidationError("config must carry a seed (or pass --seed)")
    return int(cfg["seed"])


def _out_dir(cfg: dict, override) -> Path:
    out = Path(override) if override is not None else Path(cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _marginal_specs(cfg: dict, columns) -> dict:
    spec_block = cfg.get("columns")
    if not spec_block:
        raise ValidationError("config must map every data column under 'columns'")
    specs = {}
    for name, block in spec_block.items():
        specs[name] = marginal_from_spec(dict(block))
    missing = [c for c in columns if c not in specs]
    if missing:
        raise ValidationError(f"no marginal spec for column(s) {missing}")
    return specs


def _ingest(cfg: dict):
    if "data" not in cfg:
        raise ValidationError("config must name a 'data' CSV")
    return ingest(cfg["data"], forward_fill=bool(cfg.get("forward_fill", False)))


# ------------------------------------------------------------------ artifacts
def _signature(fitted: FittedMarginals) -> list:
    return [[name, model.kind] for name, model in zip(fitted.names, fitted.models)]


def _check_signature(expected, found, what: str):
    if [list(x) for x in expected] != [list(x) for x in found]:
        raise ValidationError(
            f"column-signature mismatch in {what}: artifact carries {found}, "
            f"current pipeline has {expected}"
        )


def _write_marginals(fitted: FittedMarginals, fcfg: ForecastConfig, path: Path):
    doc = {
        "version": 1,
        "split_date": fcfg.split_date.isoformat(),
        "columns": _signature(fitted),
        "models": {name: m.to_dict() for name, m in zip(fitted.names, fitted.models)},
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_marginals(path: Path, frame, seed: int, fcfg: ForecastConfig) -> FittedMarginals:
    if not path.exists():
        raise ValidationError(f"marginal artifact not found: {path} (run fit-marginals first)")
    doc = json.loads(path.read_text())
    if doc.get("version") != 1:
        raise ValidationError(f"{path}: unsupported artifact version {doc.get('version')!r}")
    if doc["split_date"] != fcfg.split_date.isoformat():
        raise ValidationError(
            f"{path}: artifact fitted at split {doc['split_date']}, config says {fcfg.split_date}"
        )
    models = {name: marginal_from_dict(d) for name, d in doc["models"].items()}
    names = [c[0] for c in doc["columns"]]
    expected = [[c, models[c].kind if c in models else "?"] for c in frame.columns]
    _check_signature(expected, doc["columns"], str(path))
    from .marginals import clamp_u
    from .rng import substream

    fit_frame, _ = frame.split(fcfg.split_date)
    u_cols = [
        clamp_u(models[name].pit(fit_frame.column(name), rng=substream(seed, "marginal-pit", name)))
        for name in names
    ]
    burn = max(len(fit_frame) - len(u) for u in u_cols)
    u = np.column_stack([col[len(col) - (len(fit_frame) - burn):] for col in u_cols])
    return FittedMarginals(names=tuple(names), models=tuple(models[n] for n in names), u_data=u)


def _vine_spec(cfg: dict):
    block = cfg.get("vine", {})
    fams = tuple(block.get("families", DEFAULT_FAMILIES))
    return RVineCopula(
        families=fams,
        criterion=block.get("criterion", "aic"),
        independence_level=block.get("independence_level", 0.05),
        trunc_level=block.get("trunc_level"),
    )


def _vine_doc_with_signature(vine: RVineCopula, fitted: FittedMarginals) -> dict:
    doc = vine.to_dict()
    doc["columns"] = _signature(fitted)
    return doc


def _load_vine(path: Path, fitted: FittedMarginals) -> RVineCopula:
    if not path.exists():
        raise ValidationError(f"vine artifact not found: {path} (run fit-vine first)")
    doc = json.loads(path.read_text())
    _check_signature(_signature(fitted), doc.get("columns", []), str(path))
    return RVineCopula.from_dict(doc)


# ------------------------------------------------------------------- evaluate
def _evaluate_tracks(tracks: dict, alpha: float) -> EvaluationTable:
    """tracks: model label -> list of ForecastPoint-like records."""
    rows = []
    for label in tracks:
        per_var = {}
        for p in tracks[label]:
            per_var.setdefault(p.variable, []).append(p)
        for var in sorted(per_var):
            pts = per_var[var]
            obs = np.array([p.observed for p in pts], dtype=float)
            pred = np.array([p.point for p in pts], dtype=float)
            lo = np.array([p.lower for p in pts], dtype=float)
            hi = np.array([p.upper for p in pts], dtype=float)
            rows.append(
                EvaluationRow(
                    variable=var,
                    model_label=label,
                    mse=mse(obs, pred),
                    mis=mis(obs, lo, hi, alpha),
                    nnse=nnse(obs, pred),
                    dcor=dcor(obs, pred),
                )
            )
    table = EvaluationTable(rows=rows)
    table.flag_best()
    return table


def _read_track_csv(path: Path):
    import csv as _csv
    from dataclasses import dataclass as _dc

    @_dc
    class _Row:
        variable: str
        date: str
        observed: float
        point: float
        lower: float
        upper: float

    if not path.exists():
        raise ValidationError(f"forecast CSV not found: {path}")
    out = []
    with open(path, newline="") as fh:
        reader = _csv.DictReader(fh)
        need = {"date", "variable", "observed", "point", "lower", "upper"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise ValidationError(f"{path}: forecast CSV must have columns {sorted(need)}")
        for row in reader:
            out.append(
                _Row(
                    variable=row["variable"],
                    date=row["date"],
                    observed=float(row["observed"]) if row["observed"] else np.nan,
                    point=float(row["point"]),
                    lower=float(row["lower"]),
                    upper=float(row["upper"]),
                )
            )
    return out


# ----------------------------------------------------------------------- CLI
@click.group()
def main():
    """Vine-copula forecasting pipeline."""


def _common(fn):
    fn = click.option("--config", "config_path", required=True, type=click.Path())(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default=None)(fn)
    return fn


def _run(stage, fn):
    try:
        fn()
    except NumericalError as exc:
        click.echo(f"error [{stage}] (numerical): {exc}", err=True)
        sys.exit(3)
    except VinefloodError as exc:
        click.echo(f"error [{stage}]: {exc}", err=True)
        sys.exit(2)


@main.command("fit-marginals")
@_common
def cmd_fit_marginals(config_path, seed, out_dir):
    """Fit per-column marginals on the training window."""

    def go():
        cfg = _load_config(config_path)
        s = _seed(cfg, seed)
        out = _out_dir(cfg, out_dir)
        frame = _ingest(cfg)
        fcfg = _forecast_config(cfg)
        fit_frame, _ = frame.split(fcfg.split_date)
        fitted = fit_marginals(fit_frame, _marginal_specs(cfg, frame.columns), seed=s)
        _write_marginals(fitted, fcfg, out / "marginals.json")
        click.echo(f"wrote {out / 'marginals.json'}")

    _run("fit-marginals", go)


@main.command("fit-vine")
@_common
def cmd_fit_vine(config_path, seed, out_dir):
    """Fit the R-vine on the marginals' u-data."""

    def go():
        cfg = _load_config(config_path)
        s = _seed(cfg, seed)
        out = _out_dir(cfg, out_dir)
        frame = _ingest(cfg)
        fcfg = _forecast_config(cfg)
        fitted = _load_marginals(out / "marginals.json", frame, s, fcfg)
        vine = _vine_spec(cfg).fit(fitted.u_data)
        (out / "vine_full.json").write_text(
            json.dumps(_vine_doc_with_signature(vine, fitted), indent=2, sort_keys=True) + "\n"
        )
        click.echo(f"wrote {out / 'vine_full.json'}")

    _run("fit-vine", go)


@main.command("forecast")
@_common
def cmd_forecast(config_path, seed, out_dir):
    """Rolling one-day-ahead forecasts from fitted artifacts."""

    def go():
        cfg = _load_config(config_path)
        s = _seed(cfg, seed)
        out = _out_dir(cfg, out_dir)
        frame = _ingest(cfg)
        fcfg = _forecast_config(cfg)
        fitted = _load_marginals(out / "marginals.json", frame, s, fcfg)
        vine = _load_vine(out / "vine_full.json", fitted)
        specs = {name: m for name, m in zip(fitted.names, fitted.models)}
        track = rolling_forecast(
            frame, specs, fcfg, seed=s, vine=vine, stream="forecast-full", fitted=fitted
        )
        track.to_csv(out / "forecast_full.csv")
        click.echo(f"wrote {out / 'forecast_full.csv'}")

    _run("forecast", go)


@main.command("evaluate")
@_common
def cmd_evaluate(config_path, seed, out_dir):
    """Metric table (MSE, MIS, NNSE, dCor) from forecast CSVs."""

    def go():
        cfg = _load_config(config_path)
        out = _out_dir(cfg, out_dir)
        fcfg = _forecast_config(cfg)
        sources = cfg.get("forecasts")
        if not sources:
            sources = {"full": str(out / "forecast_full.csv")}
        tracks = {label: _read_track_csv(Path(p)) for label, p in sorted(sources.items())}
        table = _evaluate_tracks(tracks, fcfg.alpha)
        table.to_csv(out / "evaluation.csv")
        table.to_json(out / "evaluation.json")
        click.echo(f"wrote {out / 'evaluation.csv'}")

    _run("evaluate", go)


@main.command("sentiment")
@_common
def cmd_sentiment(config_path, seed, out_dir):
    """Daily population-scaled sentiment series from a corpus CSV."""

    def go():
        cfg = _load_config(config_path)
        out = _out_dir(cfg, out_dir)
        block = cfg.get("sentiment")
        if not block:
            raise ValidationError("config must carry a 'sentiment' block")
        for key in ("corpus", "lexicon", "lexicon_kind", "population"):
            if key not in block:
                raise ValidationError(f"sentiment config missing {key!r}")
        lex = Lexicon.from_tsv(block["lexicon"], kind=block["lexicon_kind"])
        docs = score_corpus(block["corpus"], lex)
        series = aggregate_daily(
            docs,
            population=int(block["population"]),
            start=_parse_date(block["start"]) if "start" in block else None,
            end=_parse_date(block["end"]) if "end" in block else None,
        )
        column = block.get("column", "sentiment")
        lines = [f"date,{column}"]
        for ts, val in series.items():
            lines.append(f"{ts.date().isoformat()},{val!r}")
        path = out / f"{column}.csv"
        path.write_text("\n".join(lines) + "\n")
        click.echo(f"wrote {path}")

    _run("sentiment", go)


def _run_compare(cfg: dict, s: int, out: Path):
    frame = _ingest(cfg)
    fcfg = _forecast_config(cfg)
    fit_frame, _ = frame.split(fcfg.split_date)
    fitted = fit_marginals(fit_frame, _marginal_specs(cfg, frame.columns), seed=s)
    _write_marginals(fitted, fcfg, out / "marginals.json")
    specs = {name: m for name, m in zip(fitted.names, fitted.models)}

    vines = {
        "independence": independence_vine(fitted.u_data.shape[1]),
        "gaussian": RVineCopula(families=("gaussian",), independence_level=None).fit(fitted.u_data),
        "full": _vine_spec(cfg).fit(fitted.u_data),
    }
    for label, vine in vines.items():
        (out / f"vine_{label}.json").write_text(
            json.dumps(_vine_doc_with_signature(vine, fitted), indent=2, sort_keys=True) + "\n"
        )

    def one(label):
        return rolling_forecast(
            frame, specs, fcfg, seed=s, vine=vines[label],
            stream=f"forecast-{label}", fitted=fitted,
        )

    with ThreadPoolExecutor(max_workers=len(MODEL_LABELS)) as pool:
        futures = {label: pool.submit(one, label) for label in MODEL_LABELS}
        tracks = {label: futures[label].result() for label in MODEL_LABELS}

    for label in MODEL_LABELS:
        tracks[label].to_csv(out / f"forecast_{label}.csv")
    table = _evaluate_tracks({k: v.points for k, v in tracks.items()}, fcfg.alpha)
    table.to_csv(out / "evaluation.csv")
    table.to_json(out / "evaluation.json")
    return table


@main.command("compare")
@_common
def cmd_compare(config_path, seed, out_dir):
    """Three-model comparison: independence vs Gaussian vs full vine."""

    def go():
        cfg = _load_config(config_path)
        s = _seed(cfg, seed)
        out = _out_dir(cfg, out_dir)
        _run_compare(cfg, s, out)
        click.echo(f"wrote {out / 'evaluation.csv'}")

    _run("compare", go)


@main.command("synth", hidden=True)
@_common
def cmd_synth(config_path, seed, out_dir):
    """Generate a seeded synthetic acceptance dataset."""

    def go():
        from .synth import SYSTEMS

        cfg = _load_config(config_path)
        s = _seed(cfg, seed)
        out = _out_dir(cfg, out_dir)
        block = cfg.get("synth", {})
        system = block.get("system")
        if system not in SYSTEMS:
            raise ValidationError(f"synth system must be one of {sorted(SYSTEMS)}, got {system!r}")
        kwargs = {}
        for key in ("n_train", "n_holdout"):
            if key in block:
                kwargs[key] = int(block[key])
        if "split_date" in block:
            kwargs["split_date"] = _parse_date(block["split_date"])
        frame, specs, _, _ = SYSTEMS[system](seed=s, **kwargs)
        lines = ["date," + ",".join(frame.columns)]
        for i, ts in enumerate(frame.dates):
            vals = ",".join(repr(float(frame.data.iloc[i][c])) for c in frame.columns)
            lines.append(f"{ts.date().isoformat()},{vals}")
        path = out / "data.csv"
        path.write_text("\n".join(lines) + "\n")
        click.echo(f"wrote {path}")

    _run("synth", go)


if __name__ == "__main__":
    main()
