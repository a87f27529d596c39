"""Reading angle data from CSV files and DWD hourly wind products."""

from __future__ import annotations

import csv
import io
import logging
import zipfile
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path

import numpy as np

from .circular import deg2rad, wrap
from .errors import EmptySelection, FormatError, ParseError, UnitError
from .regression import PairedSample

log = logging.getLogger(__name__)

UNITS = ("deg", "rad")
DWD_MISSING = (-999, 990)


def _to_radians(values: np.ndarray, unit: str, name: str, rows: list[int]) -> np.ndarray:
    if unit not in UNITS:
        raise UnitError(f"unknown angle unit {unit!r}; use 'deg' or 'rad'")
    if unit == "deg":
        bad = np.flatnonzero(np.abs(values) > 360.0)
        if bad.size:
            k = bad[0]
            raise UnitError(f"value {values[k]} in column {name!r} (row {rows[k]}) exceeds 360 degrees")
        return deg2rad(values)
    return wrap(values)


def _read_columns(path, columns: list[str]) -> tuple[dict[str, np.ndarray], list[int]]:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError(f"{path}: file is empty", row=1)
    dialect = csv.Sniffer().sniff(lines[0], delimiters=",;\t") if any(c in lines[0] for c in ",;\t") else csv.excel
    reader = csv.reader(lines, dialect)
    header = [h.strip() for h in next(reader)]
    idx = {}
    for col in columns:
        if col in header:
            idx[col] = header.index(col)
        elif col.isdigit() and int(col) < len(header):
            idx[col] = int(col)
        else:
            raise ParseError(f"{path}: no column {col!r} in header {header}", row=1, column=col)
    out = {c: [] for c in columns}
    rows = []
    for rowno, rec in enumerate(reader, start=2):
        for col in columns:
            j = idx[col]
            if j >= len(rec):
                raise ParseError(f"{path}: short record", row=rowno, column=col)
            try:
                v = float(rec[j])
            except ValueError:
                raise ParseError(f"{path}: not a number: {rec[j]!r}", row=rowno, column=col) from None
            if not np.isfinite(v):
                raise ParseError(f"{path}: non-finite value", row=rowno, column=col)
            out[col].append(v)
        rows.append(rowno)
    if not rows:
        raise ParseError(f"{path}: no data rows", row=2)
    return {c: np.asarray(v, dtype=float) for c, v in out.items()}, rows


def ingest_csv(path, unit: str = "deg", x_col: str = "x", y_col: str = "y") -> PairedSample:
    """Read a paired (covariate, response) sample from a delimited text file."""
    cols, rows = _read_columns(path, [x_col, y_col])
    x = _to_radians(cols[x_col], unit, x_col, rows)
    y = _to_radians(cols[y_col], unit, y_col, rows)
    log.info("read %d rows from %s", len(rows), path)
    return PairedSample(x, y)


def ingest_series_csv(path, unit: str = "deg", col: str = "angle") -> np.ndarray:
    cols, rows = _read_columns(path, [col])
    log.info("read %d rows from %s", len(rows), path)
    return _to_radians(cols[col], unit, col, rows)


@dataclass(frozen=True)
class WindSeries:
    """Wind directions (radians) indexed by observation time."""

    station: str
    timestamps: tuple[datetime, ...]
    angles: np.ndarray

    def __len__(self):
        return len(self.timestamps)

    def __iter__(self):
        return iter(zip(self.timestamps, self.angles))

    def by_date(self) -> dict[date, float]:
        return {t.date(): float(a) for t, a in self}

    def last(self, n: int) -> "WindSeries":
        return WindSeries(self.station, self.timestamps[-n:], self.angles[-n:])


def _dwd_text(path) -> str:
    path = Path(path)
    if path.suffix == ".zip":
        with zipfile.ZipFile(path) as zf:
            names = [n for n in zf.namelist() if n.startswith("produkt") and n.endswith(".txt")]
            if not names:
                raise FormatError(f"{path}: no produkt_*.txt member in archive")
            return zf.read(names[0]).decode("latin-1")
    return path.read_text(encoding="latin-1")


def ingest_dwd_wind(
    path,
    station: str | None = None,
    hour: int | None = None,
    weekday: int | None = 2,
    start: date | None = None,
    end: date | None = None,
    require_decadal: bool = True,
) -> WindSeries:
    """Read wind directions from a DWD hourly wind file (``produkt_ff_stunde_*.txt``).

    Layout is semicolon separated with columns ``STATIONS_ID``,
    ``MESS_DATUM`` (``yyyymmddhh``), ``QN_3``, ``F`` and ``D`` (degrees).
    Rows are kept for the requested hour and weekday (Monday = 0, default
    Wednesday) inside ``[start, end]``; directions equal to -999 or 990 are
    dropped as missing.  With ``require_decadal`` every kept direction must
    be a multiple of 10 degrees.
    """
    reader = csv.reader(io.StringIO(_dwd_text(path)), delimiter=";")
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise FormatError(f"{path}: empty file") from None
    try:
        i_sta, i_time, i_dir = header.index("STATIONS_ID"), header.index("MESS_DATUM"), header.index("D")
    except ValueError:
        raise FormatError(f"{path}: expected STATIONS_ID, MESS_DATUM and D columns, got {header}") from None

    stamps, dirs, found = [], [], None
    for rowno, rec in enumerate(reader, start=2):
        if not rec or not "".join(rec).strip():
            continue
        try:
            sid = rec[i_sta].strip()
            ts = datetime.strptime(rec[i_time].strip(), "%Y%m%d%H")
            d = float(rec[i_dir])
        except (IndexError, ValueError) as exc:
            raise FormatError(f"{path}: bad record at row {rowno}: {exc}") from None
        found = found or sid
        if station is not None and sid.lstrip("0") != str(station).lstrip("0"):
            continue
        if hour is not None and ts.hour != hour:
            continue
        if weekday is not None and ts.weekday() != weekday:
            continue
        if start is not None and ts.date() < start:
            continue
        if end is not None and ts.date() > end:
            continue
        if d in DWD_MISSING:
            continue
        if not 0.0 <= d <= 360.0:
            raise FormatError(f"{path}: direction {d} out of range at row {rowno}")
        if require_decadal and d % 10.0 != 0.0:
            raise FormatError(f"{path}: direction {d} at row {rowno} is not a multiple of 10 degrees")
        stamps.append(ts)
        dirs.append(d)
    if not stamps:
        raise EmptySelection(f"{path}: no observations match the selection")
    log.info("selected %d observations from %s", len(stamps), path)
    return WindSeries(str(station or found), tuple(stamps), deg2rad(np.asarray(dirs)))


def pair_series(x: WindSeries, y: WindSeries, last: int | None = None) -> tuple[PairedSample, list[date]]:
    """Join two series on calendar date; optionally keep the most recent ``last`` pairs."""
    xd, yd = x.by_date(), y.by_date()
    days = sorted(set(xd) & set(yd))
    if last is not None:
        days = days[-last:]
    if not days:
        raise EmptySelection("the two series share no dates")
    return PairedSample(np.array([xd[d] for d in days]), np.array([yd[d] for d in days])), days
