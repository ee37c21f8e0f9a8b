"""CSV ingestion for empirical series and experiment-file parsing.

The empirical CSV contract: a header row, one row per period carrying a
date label, the period's excess return, and the predictor level observed at
the end of the period.  Lag alignment happens here, once: response t is
paired with the predictor level from row t-1, so downstream code receives a
ready :class:`RegressionSample` (with levels attached for the differenced
estimators).

Experiment files are flat JSON documents that map one-to-one onto
:class:`~cauchypred.experiments.ExperimentGrid`; unknown keys are errors.
"""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import CsvFormatError, InsufficientDataError, SchemaError
from .estimators import RegressionSample
from .experiments import ExperimentGrid

FREQUENCIES = ("monthly", "quarterly", "yearly")

_MIN_ROWS = 10


def _date_key(label: str):
    """Chronological sort key: numeric, ISO-date, or plain-string fallback."""
    try:
        return (0, float(label))
    except ValueError:
        pass
    for fmt in ("%Y-%m-%d", "%Y-%m", "%Y/%m/%d"):
        try:
            return (1, datetime.datetime.strptime(label, fmt))
        except ValueError:
            continue
    return (2, label)


@dataclass(frozen=True)
class EmpiricalDataset:
    """Aligned raw series as read from disk (one entry per period)."""

    dates: tuple[str, ...]
    y: np.ndarray
    x: np.ndarray
    frequency: str = "monthly"

    def __post_init__(self) -> None:
        if self.frequency not in FREQUENCIES:
            raise SchemaError(f"frequency must be one of {FREQUENCIES}")
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if not (len(self.dates) == y.shape[0] == x.shape[0]):
            raise CsvFormatError("dates, y and x must have equal length")
        if y.shape[0] < _MIN_ROWS:
            raise InsufficientDataError(
                f"need at least {_MIN_ROWS} usable rows, got {y.shape[0]}"
            )
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise CsvFormatError("series contain non-finite values")
        keys = [_date_key(d) for d in self.dates]
        kinds = {k[0] for k in keys}
        if len(kinds) > 1:
            raise CsvFormatError("date labels mix incompatible formats")
        for i in range(1, len(keys)):
            if not keys[i - 1] < keys[i]:
                raise CsvFormatError(
                    f"dates must be strictly increasing; row {i + 1} "
                    f"({self.dates[i]!r}) does not follow {self.dates[i - 1]!r}"
                )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n_periods(self) -> int:
        return self.y.shape[0]

    def to_regression_sample(self) -> RegressionSample:
        """Pair each response with the previous period's predictor level.

        Row 0's response has no lagged predictor and is dropped; the full
        predictor column becomes the level sequence x_0..x_T.
        """
        return RegressionSample(y=self.y[1:], x_lag=self.x[:-1], x_level=self.x)


def parse_csv(
    path: str | Path,
    date_col: str = "date",
    y_col: str = "y",
    x_col: str = "x",
    frequency: str = "monthly",
) -> EmpiricalDataset:
    """Read an empirical dataset from a headed CSV file.

    Malformed or missing numeric cells are reported with their row number
    and column name; fewer than 10 data rows is an error.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CsvFormatError(f"{path}: file is empty")
        for col in (date_col, y_col, x_col):
            if col not in reader.fieldnames:
                raise CsvFormatError(
                    f"{path}: column {col!r} not found in header {reader.fieldnames}"
                )
        dates: list[str] = []
        ys: list[float] = []
        xs: list[float] = []
        for i, row in enumerate(reader, start=2):  # header is line 1
            date = (row.get(date_col) or "").strip()
            if not date:
                raise CsvFormatError(f"{path}: row {i}: empty {date_col!r} cell")
            values = {}
            for col in (y_col, x_col):
                cell = (row.get(col) or "").strip()
                if not cell:
                    raise CsvFormatError(f"{path}: row {i}: missing value in column {col!r}")
                try:
                    values[col] = float(cell)
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: row {i}: column {col!r}: {cell!r} is not numeric"
                    ) from None
            dates.append(date)
            ys.append(values[y_col])
            xs.append(values[x_col])
    if len(dates) < _MIN_ROWS:
        raise InsufficientDataError(
            f"{path}: need at least {_MIN_ROWS} usable rows, got {len(dates)}"
        )
    return EmpiricalDataset(
        dates=tuple(dates), y=np.array(ys), x=np.array(xs), frequency=frequency
    )


def dataset_to_csv_text(
    ds: EmpiricalDataset, date_col: str = "date", y_col: str = "y", x_col: str = "x"
) -> str:
    """Serialize a dataset back to CSV with full float round-trip precision."""
    lines = [f"{date_col},{y_col},{x_col}"]
    for d, yv, xv in zip(ds.dates, ds.y, ds.x):
        lines.append(f"{d},{float(yv)!r},{float(xv)!r}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# experiment files

_REQUIRED_KEYS = {
    "name",
    "dgp_kind",
    "beta_values",
    "kappa_values",
    "T_values",
    "vol_models",
    "methods",
    "n_reps",
    "master_seed",
}
_OPTIONAL_KEYS = {
    "alpha": 0.05,
    "sided": None,  # default depends on dgp_kind
    "delta": 1.0 / 12.0,
    "rho_vw": -0.98,
    "rho_wz": -0.4,
    "jump_intensity": 0.0,
    "jump_sd": 0.0,
    "ma_order": 2,
    "slope_scale": "per_sample",
    "rho": -0.98,
    "endogeneity": "v",
}
_CONTINUOUS_ONLY = {"delta", "rho_vw", "rho_wz", "jump_intensity", "jump_sd"}
_DISCRETE_ONLY = {"ma_order", "slope_scale", "rho", "endogeneity"}


def config_to_grid(config: dict) -> ExperimentGrid:
    """Validate a config mapping and build the experiment grid."""
    if not isinstance(config, dict):
        raise SchemaError("experiment config must be a JSON object")
    unknown = set(config) - _REQUIRED_KEYS - set(_OPTIONAL_KEYS)
    if unknown:
        raise SchemaError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(config)
    if missing:
        raise SchemaError(f"missing config keys: {sorted(missing)}")
    kind = config["dgp_kind"]
    if kind not in ("continuous", "discrete"):
        raise SchemaError(f"dgp_kind must be 'continuous' or 'discrete', got {kind!r}")
    wrong_kind = _DISCRETE_ONLY if kind == "continuous" else _CONTINUOUS_ONLY
    misplaced = wrong_kind & set(config)
    if misplaced:
        raise SchemaError(
            f"keys {sorted(misplaced)} do not apply to the {kind} design"
        )
    if not isinstance(config["name"], str) or not config["name"]:
        raise SchemaError("name must be a nonempty string")

    def floats(key):
        v = config[key]
        if not isinstance(v, list) or not v or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
        ):
            raise SchemaError(f"{key} must be a nonempty list of numbers")
        return tuple(float(x) for x in v)

    def strings(key):
        v = config[key]
        if not isinstance(v, list) or not v or not all(isinstance(x, str) for x in v):
            raise SchemaError(f"{key} must be a nonempty list of strings")
        return tuple(v)

    n_reps = config["n_reps"]
    master_seed = config["master_seed"]
    for key, v in (("n_reps", n_reps), ("master_seed", master_seed)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise SchemaError(f"{key} must be a nonnegative integer")
    sided = config.get("sided")
    if sided is None:
        sided = "two" if kind == "continuous" else "right"
    grid = ExperimentGrid(
        dgp_kind=kind,
        beta_values=floats("beta_values"),
        kappa_values=floats("kappa_values"),
        T_values=floats("T_values"),
        vol_models=strings("vol_models"),
        methods=strings("methods"),
        n_reps=n_reps,
        alpha=float(config.get("alpha", 0.05)),
        sided=sided,
        master_seed=master_seed,
        delta=float(config.get("delta", _OPTIONAL_KEYS["delta"])),
        rho_vw=float(config.get("rho_vw", -0.98)),
        rho_wz=float(config.get("rho_wz", -0.4)),
        jump_intensity=float(config.get("jump_intensity", 0.0)),
        jump_sd=float(config.get("jump_sd", 0.0)),
        ma_order=int(config.get("ma_order", 2)),
        slope_scale=config.get("slope_scale", "per_sample"),
        rho=float(config.get("rho", -0.98)),
        endogeneity=config.get("endogeneity", "v"),
    )
    grid.validate()
    return grid


def grid_to_config(grid: ExperimentGrid, name: str) -> dict:
    """Full config echo, sufficient to reproduce a run bitwise."""
    config = {
        "name": name,
        "dgp_kind": grid.dgp_kind,
        "beta_values": list(grid.beta_values),
        "kappa_values": list(grid.kappa_values),
        "T_values": list(grid.T_values),
        "vol_models": list(grid.vol_models),
        "methods": list(grid.methods),
        "n_reps": grid.n_reps,
        "alpha": grid.alpha,
        "sided": grid.sided,
        "master_seed": grid.master_seed,
    }
    if grid.dgp_kind == "continuous":
        config.update(
            delta=grid.delta,
            rho_vw=grid.rho_vw,
            rho_wz=grid.rho_wz,
            jump_intensity=grid.jump_intensity,
            jump_sd=grid.jump_sd,
        )
    else:
        config.update(
            ma_order=grid.ma_order,
            slope_scale=grid.slope_scale,
            rho=grid.rho,
            endogeneity=grid.endogeneity,
        )
    return config


def load_experiment_file(path: str | Path) -> tuple[str, ExperimentGrid]:
    """Load an experiment JSON file (or a run manifest) into a grid.

    A manifest produced by the table command wraps the config under a
    ``config`` key; it is accepted directly so a run can be reproduced from
    its own output.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from None
    if isinstance(payload, dict) and "config" in payload and "tool" in payload:
        payload = payload["config"]
    grid = config_to_grid(payload)
    return payload["name"], grid


def bundled_config_names() -> list[str]:
    files = resources.files("cauchypred").joinpath("configs")
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def resolve_config_path(name_or_path: str) -> Path:
    """Interpret the argument as a filesystem path, else a bundled name."""
    p = Path(name_or_path)
    if p.exists():
        return p
    candidate = resources.files("cauchypred").joinpath("configs", f"{name_or_path}.json")
    if candidate.is_file():
        return Path(str(candidate))
    raise SchemaError(
        f"config {name_or_path!r} is neither a file nor a bundled config; "
        f"bundled: {bundled_config_names()}"
    )
