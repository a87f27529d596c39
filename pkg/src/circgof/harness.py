"""Command implementations behind the CLI.

Each ``cmd_*`` function returns plain rows (lists of dicts) plus the
underlying result object, so the CLI only has to pick an output format.
Every emitted artifact carries a :class:`RunManifest`.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import re
import time
from dataclasses import asdict, dataclass, field
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__, datasets
from .alternatives import parse_alternative
from .bootstrap import BootstrapConfig, PowerResult, ScenarioConfig, TestReport, classical_bootstrap, warp_speed_power
from .circular import circular_correlation, rad2deg, wrap
from .errors import DataError, DegenerateSample
from .gof import DEFAULT_LAMBDAS, statistic_names
from .ingest import ingest_csv, ingest_dwd_wind, ingest_series_csv, pair_series
from .regression import FitConfig, FitResult, PairedSample, conditional_mean, fit_mle

FORMATS = ("csv", "text", "json")


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: int | None
    version: str = __version__
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)

    @classmethod
    def start(cls, command: str, config: dict, seed: int | None = None) -> "RunManifest":
        blob = json.dumps(config, sort_keys=True, default=str).encode()
        m = cls(command, hashlib.sha256(blob).hexdigest()[:16], seed, config=config)
        m._t0 = time.perf_counter()
        return m

    def finish(self) -> "RunManifest":
        self.wall_time = round(time.perf_counter() - getattr(self, "_t0", time.perf_counter()), 3)
        return self

    def to_dict(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# inputs


def load_sample(data: str, unit: str = "deg", x_col: str = "x", y_col: str = "y") -> PairedSample:
    """An embedded dataset id or a CSV path."""
    if data in datasets.DATASETS:
        return datasets.get(data).sample()
    path = Path(data)
    if not path.exists():
        raise DataError(f"{data!r} is neither a dataset id ({', '.join(datasets.DATASETS)}) nor a file")
    return ingest_csv(path, unit, x_col, y_col)


def _parse_date(text: str | None) -> date | None:
    if text is None:
        return None
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise DataError(f"bad date {text!r}; expected YYYY-MM-DD") from None


def load_dwd_pair(
    x_path,
    y_path,
    x_hour: int,
    y_hour: int,
    weekday: int | None = 2,
    start: str | None = None,
    end: str | None = None,
    last: int | None = None,
) -> tuple[PairedSample, list[date]]:
    sel = dict(weekday=weekday, start=_parse_date(start), end=_parse_date(end))
    xs = ingest_dwd_wind(x_path, hour=x_hour, **sel)
    ys = ingest_dwd_wind(y_path, hour=y_hour, **sel)
    return pair_series(xs, ys, last=last)


def load_series(
    path, unit: str = "deg", col: str = "angle", dwd: bool = False, hour: int | None = None,
    weekday: int | None = 2, start: str | None = None, end: str | None = None,
) -> np.ndarray:
    if dwd:
        return ingest_dwd_wind(path, hour=hour, weekday=weekday, start=_parse_date(start), end=_parse_date(end)).angles
    return ingest_series_csv(path, unit, col)


# --------------------------------------------------------------------------
# commands

QUARTER = math.pi / 4.0


def fit_row(fit: FitResult, n: int) -> dict:
    p = fit.params
    return {
        "n": n,
        "theta0": p.theta0,
        "theta1": p.theta1,
        "r": p.r,
        "delta": p.delta,
        "loglik": fit.loglik,
        "mu_pi_4": conditional_mean(p, QUARTER),
        "mu_3pi_4": conditional_mean(p, 3.0 * QUARTER),
        "converged": fit.converged,
    }


def cmd_fit(sample: PairedSample, config: FitConfig | None = None) -> tuple[FitResult, list[dict]]:
    fit = fit_mle(sample, config)
    return fit, [fit_row(fit, len(sample))]


def cmd_gof(
    sample: PairedSample,
    B: int = 1000,
    seed: int = 0,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    threads: int = 1,
) -> tuple[TestReport, list[dict]]:
    cfg = BootstrapConfig(B=B, seed=seed, lambdas=tuple(lambdas), threads=threads)
    report = classical_bootstrap(sample, cfg)
    obs = report.observed.as_dict()
    rows = [
        {"statistic": name, "observed": obs[name], "p_value": report.p_values[name]}
        for name in statistic_names(cfg.lambdas)
    ]
    return report, rows


def cmd_autocorr(series, max_lag: int = 1) -> list[dict]:
    """Circular correlation between the series and its lagged copies."""
    a = np.asarray(series, dtype=float)
    rows = []
    for lag in range(max_lag + 1):
        if a.size - lag < 3:
            break
        rho, p = circular_correlation(a[: a.size - lag], a[lag:])
        rows.append({"lag": lag, "n": a.size - lag, "rho": rho, "p_value": p})
    if not rows:
        raise DegenerateSample(f"series of length {a.size} is too short for a correlation")
    return rows


def cmd_stackplot_data(angles, unit: str = "deg", resolution: float | None = None) -> list[dict]:
    """Coordinates of a circular stack plot: each repeated angle gets stack 1, 2, ...

    ``resolution`` (in ``unit``) bins angles before stacking; by default
    values are stacked when they agree to 1e-9.
    """
    a = wrap(np.atleast_1d(np.asarray(angles, dtype=float)))
    vals = rad2deg(a) if unit == "deg" else a
    full = 360.0 if unit == "deg" else 2.0 * math.pi
    step = resolution or 1e-9
    keys = np.round(vals / step).astype(np.int64)
    if resolution:
        keys %= max(1, int(round(full / step)))
    order = np.lexsort((np.arange(a.size), keys))
    counts: dict[int, int] = {}
    rows = []
    for i in order:
        k = int(keys[i])
        counts[k] = counts.get(k, 0) + 1
        angle = float(k * step) if resolution else float(vals[i])
        rows.append({"angle": angle, "stack": counts[k]})
    return rows


# --------------------------------------------------------------------------
# power study

_PI_EXPR = re.compile(r"\s*(?:([-+]?\d*\.?\d*)\s*\*?\s*)?pi\s*(?:/\s*(\d*\.?\d+))?\s*")


def parse_angle(value) -> float:
    """Numbers in radians, or expressions like ``"pi/4"`` and ``"3pi/4"``."""
    if isinstance(value, (int, float)):
        return float(value)
    m = _PI_EXPR.fullmatch(str(value))
    if m is None:
        try:
            return float(value)
        except ValueError:
            raise DataError(f"cannot parse angle {value!r}") from None
    num = m.group(1)
    coef = 1.0 if num in (None, "", "+") else -1.0 if num == "-" else float(num)
    den = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / den


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def expand_scenarios(spec: dict, B=None, seed=None, alphas=None, lambdas=None, threads=1) -> list[ScenarioConfig]:
    """Expand a scenario document into cells.

    The document has top-level defaults (``B``, ``seed``, ``alphas``,
    ``lambdas``) and a ``scenarios`` list; inside a scenario, list-valued
    ``beta1_r``, ``n`` or ``innovation`` fields expand as a product.
    Explicit arguments override the document.
    """
    B = B if B is not None else spec.get("B", 1000)
    seed = seed if seed is not None else spec.get("seed", 0)
    alphas = tuple(alphas or spec.get("alphas", (0.05,)))
    lambdas = tuple(lambdas or spec.get("lambdas", DEFAULT_LAMBDAS))
    cells = []
    for sc in spec.get("scenarios", []):
        try:
            beta0 = parse_angle(sc["beta0"])
            theta1 = parse_angle(sc["beta1_theta"])
            grid = itertools.product(_as_list(sc["beta1_r"]), _as_list(sc["n"]), _as_list(sc["innovation"]))
        except KeyError as exc:
            raise DataError(f"scenario is missing field {exc}") from None
        for r, n, innov in grid:
            cells.append(
                ScenarioConfig(
                    beta0=beta0,
                    beta1_r=float(r),
                    beta1_theta=theta1,
                    n=int(n),
                    innovation=parse_alternative(innov),
                    B=int(B),
                    alphas=alphas,
                    seed=int(sc.get("seed", seed)),
                    lambdas=lambdas,
                    threads=threads,
                )
            )
    if not cells:
        raise DataError("scenario document defines no scenarios")
    return cells


def load_scenarios(ref: str) -> dict:
    """A scenario document from a path or a bundled name (``size-grid``, ``power-grid``)."""
    path = Path(ref)
    if path.exists():
        text = path.read_text()
    else:
        name = ref if ref.endswith(".json") else f"{ref}.json"
        try:
            text = resources.files("circgof.scenarios").joinpath(name).read_text()
        except FileNotFoundError:
            raise DataError(f"no scenario file or bundled grid named {ref!r}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{ref}: invalid JSON ({exc})") from None


def power_rows(results: Sequence[PowerResult]) -> list[dict]:
    """Long format: one row per (scenario, alpha, statistic), rates in percent."""
    rows = []
    for res in results:
        sc = res.scenario
        for alpha, rates in res.rates.items():
            for stat, rate in rates.items():
                rows.append(
                    {
                        "beta0": sc.beta0,
                        "beta1_r": sc.beta1_r,
                        "beta1_theta": sc.beta1_theta,
                        "n": sc.n,
                        "innovation": sc.label(),
                        "alpha": alpha,
                        "statistic": stat,
                        "rate_pct": 100.0 * rate,
                        "B": sc.B,
                        "redraws": res.redraws,
                    }
                )
    return rows


def power_table(rows: Sequence[dict]) -> list[dict]:
    """Wide layout: one row per (beta, alpha, innovation), columns per n and statistic."""
    out: dict[tuple, dict] = {}
    for r in rows:
        key = (r["beta0"], r["beta1_r"], r["beta1_theta"], r["alpha"], r["innovation"])
        row = out.setdefault(
            key,
            {"beta0": r["beta0"], "beta1_r": r["beta1_r"], "beta1_theta": r["beta1_theta"],
             "alpha": r["alpha"], "innovation": r["innovation"]},
        )
        row[f"n={r['n']} {r['statistic']}"] = round(r["rate_pct"])
    return list(out.values())


def cmd_power(spec: dict, **overrides) -> tuple[list[PowerResult], list[dict]]:
    results = [warp_speed_power(cell) for cell in expand_scenarios(spec, **overrides)]
    return results, power_rows(results)


# --------------------------------------------------------------------------
# output


def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{v:.6g}"
    return str(v)


def render(rows: Sequence[dict], fmt: str, manifest: RunManifest | None = None, extra: dict | None = None) -> str:
    """CSV (with ``#`` manifest comments), aligned text, or a JSON document."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "json":
        doc = {"manifest": manifest.to_dict() if manifest else None, "rows": list(rows)}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, default=_json_default) + "\n"
    cols = _columns(rows)
    buf = io.StringIO()
    if manifest is not None:
        for k, v in manifest.to_dict().items():
            if k != "config":
                buf.write(f"# {k}: {v}\n")
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([r.get(c, "") for c in cols])
        return buf.getvalue()
    cells = [[_fmt(r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    buf.write("  ".join(c.rjust(w) for c, w in zip(cols, widths)) + "\n")
    for row in cells:
        buf.write("  ".join(v.rjust(w) for v, w in zip(row, widths)) + "\n")
    return buf.getvalue()


def _columns(rows: Iterable[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, date):
        return o.isoformat()
    return str(o)
