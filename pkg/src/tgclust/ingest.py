"""OHLC price ingestion, return computation, panel alignment and segmentation.

Input files are UTF-8 CSVs with a ``Date,Open,High,Low,Close,Volume`` header
(``Date,Close`` also accepted), ISO-8601 dates, one file per ticker with the
filename stem as the ticker symbol.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .errors import DataError

MIN_SEGMENT_DATES = 5
MIN_PANEL_DATES = 3

_EXTRA_COLUMNS = ("open", "high", "low", "volume")

ReturnMode = Literal["simple", "log"]


@dataclass(frozen=True)
class PriceSeries:
    """Daily closing prices for one ticker, sorted ascending by date."""

    ticker: str
    dates: tuple[date, ...]
    closes: np.ndarray
    extras: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.ticker:
            raise DataError("ticker must be non-empty")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError(f"{self.ticker}: dates must be strictly increasing")
        if len(self.dates) != len(self.closes):
            raise DataError(f"{self.ticker}: date/close length mismatch")
        if np.any(np.asarray(self.closes) <= 0):
            raise DataError(f"{self.ticker}: non-positive price in series")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """One-period relative price changes, each dated with the later day."""

    ticker: str
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if not self.ticker:
            raise DataError("ticker must be non-empty")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError(f"{self.ticker}: dates must be strictly increasing")
        if len(self.dates) != len(self.values):
            raise DataError(f"{self.ticker}: date/value length mismatch")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class AlignedPanel:
    """Return vectors for several tickers restricted to common trading dates."""

    dates: tuple[date, ...]
    columns: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        if len(self.dates) < MIN_PANEL_DATES:
            raise DataError(
                f"insufficient overlap: panel has {len(self.dates)} common dates, "
                f"need at least {MIN_PANEL_DATES}"
            )
        for ticker, col in self.columns.items():
            if len(col) != len(self.dates):
                raise DataError(f"{ticker}: column length does not match panel dates")

    @property
    def tickers(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class SegmentSpec:
    """Chronologically ordered, non-overlapping (start, end) date windows."""

    boundaries: tuple[tuple[date, date], ...]

    def __post_init__(self) -> None:
        for start, end in self.boundaries:
            if end < start:
                raise DataError(f"segment [{start}..{end}] ends before it starts")
        for (_, prev_end), (next_start, _) in zip(self.boundaries, self.boundaries[1:]):
            if next_start <= prev_end:
                raise DataError(
                    f"segments overlap or are out of order near {prev_end}"
                )

    @property
    def m(self) -> int:
        return len(self.boundaries)


def parse_ohlc(text: str, ticker: str) -> PriceSeries:
    """Parse one ticker's OHLC CSV text into a PriceSeries.

    Rows are sorted ascending by date regardless of file order. Missing or
    duplicate dates and non-positive closes reject the whole row set.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if any(cell.strip() for cell in row)]
    if not rows:
        raise DataError(f"{ticker}: empty file")

    header = [cell.strip().lower() for cell in rows[0]]
    try:
        date_col = header.index("date")
        close_col = header.index("close")
    except ValueError:
        raise DataError(
            f"{ticker}: unparseable header {rows[0]!r}: need Date and Close columns"
        ) from None
    extra_cols = {name: header.index(name) for name in _EXTRA_COLUMNS if name in header}

    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if date_col >= len(row) or not row[date_col].strip():
            raise DataError(f"{ticker}: line {lineno}: missing date")
        raw_date = row[date_col].strip()
        try:
            day = date.fromisoformat(raw_date)
        except ValueError:
            raise DataError(f"{ticker}: line {lineno}: invalid date {raw_date!r}") from None
        if close_col >= len(row) or not row[close_col].strip():
            raise DataError(f"{ticker}: missing close on {day}")
        try:
            close = float(row[close_col])
        except ValueError:
            raise DataError(
                f"{ticker}: invalid close {row[close_col]!r} on {day}"
            ) from None
        if close <= 0:
            raise DataError(f"{ticker}: non-positive price {close} on {day}")
        extras = {}
        for name, col in extra_cols.items():
            try:
                extras[name] = float(row[col]) if col < len(row) and row[col].strip() else np.nan
            except ValueError:
                extras[name] = np.nan
        records.append((day, close, extras))

    if not records:
        raise DataError(f"{ticker}: no data rows")
    seen: set[date] = set()
    for day, _, _ in records:
        if day in seen:
            raise DataError(f"{ticker}: duplicate date {day}")
        seen.add(day)

    records.sort(key=lambda rec: rec[0])
    dates = tuple(rec[0] for rec in records)
    closes = np.array([rec[1] for rec in records], dtype=float)
    extras_out = {
        name: np.array([rec[2][name] for rec in records], dtype=float)
        for name in extra_cols
    }
    return PriceSeries(ticker=ticker, dates=dates, closes=closes, extras=extras_out)


def compute_returns(prices: PriceSeries, mode: ReturnMode = "simple") -> ReturnSeries:
    """Per-day returns P(k)/P(k-1) - 1, or ln of the ratio in log mode."""
    if mode not in ("simple", "log"):
        raise ValueError(f"unknown return mode {mode!r}")
    if len(prices) < 2:
        raise DataError(
            f"{prices.ticker}: need at least 2 price records to compute returns"
        )
    ratio = prices.closes[1:] / prices.closes[:-1]
    values = ratio - 1.0 if mode == "simple" else np.log(ratio)
    return ReturnSeries(prices.ticker, prices.dates[1:], values)


def align_panel(series: Sequence[ReturnSeries]) -> AlignedPanel:
    """Restrict all return series to their common dates, columns in ticker order."""
    if len(series) < 2:
        raise DataError("need at least 2 return series to build a panel")
    tickers = [s.ticker for s in series]
    if len(set(tickers)) != len(tickers):
        dupes = sorted({t for t in tickers if tickers.count(t) > 1})
        raise DataError(f"duplicate tickers: {', '.join(dupes)}")

    common: set[date] = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    if len(common) < MIN_PANEL_DATES:
        raise DataError(
            f"insufficient overlap: only {len(common)} common dates across "
            f"{len(series)} tickers"
        )
    dates = tuple(sorted(common))

    columns: dict[str, np.ndarray] = {}
    for s in sorted(series, key=lambda s: s.ticker):
        index = {d: i for i, d in enumerate(s.dates)}
        columns[s.ticker] = s.values[[index[d] for d in dates]]
    return AlignedPanel(dates=dates, columns=columns)


def restrict_panel(panel: AlignedPanel, start: date, end: date) -> AlignedPanel:
    """Sub-panel containing only dates in [start, end]."""
    keep = [i for i, d in enumerate(panel.dates) if start <= d <= end]
    if len(keep) < MIN_PANEL_DATES:
        raise DataError(
            f"window [{start}..{end}] captures only {len(keep)} panel dates"
        )
    dates = tuple(panel.dates[i] for i in keep)
    columns = {t: col[keep] for t, col in panel.columns.items()}
    return AlignedPanel(dates=dates, columns=columns)


def segment_panel(panel: AlignedPanel, spec: SegmentSpec) -> list[AlignedPanel]:
    """Slice the panel into one sub-panel per (start, end) window."""
    out = []
    for number, (start, end) in enumerate(spec.boundaries, start=1):
        keep = [i for i, d in enumerate(panel.dates) if start <= d <= end]
        if len(keep) < MIN_SEGMENT_DATES:
            raise DataError(
                f"segment {number} [{start}..{end}] captures {len(keep)} dates; "
                f"need at least {MIN_SEGMENT_DATES}"
            )
        dates = tuple(panel.dates[i] for i in keep)
        columns = {t: col[keep] for t, col in panel.columns.items()}
        out.append(AlignedPanel(dates=dates, columns=columns))
    return out


def load_price_dir(
    data_dir: str | Path, tickers: Iterable[str] | None = None
) -> list[PriceSeries]:
    """Load every ``*.csv`` in a directory; the filename stem is the ticker."""
    base = Path(data_dir)
    if not base.is_dir():
        raise DataError(f"data directory not found: {base}")
    wanted = set(tickers) if tickers is not None else None
    out = []
    for path in sorted(base.glob("*.csv")):
        ticker = path.stem
        if wanted is not None and ticker not in wanted:
            continue
        out.append(parse_ohlc(path.read_text(encoding="utf-8"), ticker))
    if not out:
        raise DataError(f"no input files in {base}")
    if wanted is not None:
        missing = wanted - {s.ticker for s in out}
        if missing:
            raise DataError(f"no CSV file for tickers: {', '.join(sorted(missing))}")
    return out


def write_panel_csv(panel: AlignedPanel, path: str | Path, config_hash: str = "") -> None:
    """Cache the aligned returns panel: Date column then one column per ticker."""
    lines = []
    if config_hash:
        lines.append(f"# config={config_hash}")
    lines.append(",".join(["Date", *panel.tickers]))
    for i, d in enumerate(panel.dates):
        row = [d.isoformat()] + [repr(float(panel.columns[t][i])) for t in panel.tickers]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
