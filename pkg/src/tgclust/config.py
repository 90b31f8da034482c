"""Run configuration: declarative JSON file plus flag overrides, a provenance
hash over the analysis parameters, and the segmentation rules.
"""

from __future__ import annotations

import calendar
import hashlib
import json
import warnings
from dataclasses import dataclass, fields, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

from .errors import DataError, UsageError
from .ingest import SegmentSpec

DEFAULT_ALPHA = 0.05
DEFAULT_K = 3


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run depends on besides the data itself."""

    data_dir: str = "."
    out_dir: str = "out"
    tickers: tuple[str, ...] | None = None
    start: date | None = None
    end: date | None = None
    segment: str = "bimonthly"
    alpha: float = DEFAULT_ALPHA
    delta: float | None = None
    sign: str = "positive"
    linkage: str = "complete"
    cut_height: float | None = None
    lag: int | None = None
    return_mode: str = "simple"
    k: int = DEFAULT_K
    stock: str | None = None
    include_outliers: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise UsageError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.sign not in ("positive", "negative"):
            raise UsageError(f"sign must be positive or negative, got {self.sign!r}")
        if self.linkage not in ("complete", "average", "single"):
            raise UsageError(f"unknown linkage {self.linkage!r}")
        if self.return_mode not in ("simple", "log"):
            raise UsageError(f"unknown return mode {self.return_mode!r}")
        if self.k < 1:
            raise UsageError("k must be a positive integer")


# analysis parameters only: where the data lives and where output goes do not
# change results, so they stay out of the provenance hash
_HASH_EXCLUDE = ("data_dir", "out_dir")


def config_hash(cfg: RunConfig) -> str:
    payload = {}
    for f in fields(cfg):
        if f.name in _HASH_EXCLUDE:
            continue
        value = getattr(cfg, f.name)
        if isinstance(value, date):
            value = value.isoformat()
        elif isinstance(value, tuple):
            value = list(value)
        payload[f.name] = value
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def load_config_file(path: str | Path) -> dict:
    """Read a declarative JSON config; keys match RunConfig field names."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError(f"config file {path} must contain a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return raw


def resolve_config(file_values: dict | None, overrides: dict) -> RunConfig:
    """Defaults, then config-file values, then explicit flag overrides."""
    merged: dict = {}
    if file_values:
        merged.update(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("start", "end"):
        if isinstance(merged.get(key), str):
            try:
                merged[key] = date.fromisoformat(merged[key])
            except ValueError:
                raise UsageError(f"{key}: invalid ISO date {merged[key]!r}") from None
    if isinstance(merged.get("tickers"), (list, tuple)):
        merged["tickers"] = tuple(merged["tickers"])
    elif isinstance(merged.get("tickers"), str):
        merged["tickers"] = tuple(
            t.strip() for t in merged["tickers"].split(",") if t.strip()
        )
    return RunConfig(**merged)


def with_window(cfg: RunConfig, panel_dates: Sequence[date]) -> RunConfig:
    """Fill missing start/end from the panel's own date range."""
    start = cfg.start if cfg.start is not None else panel_dates[0]
    end = cfg.end if cfg.end is not None else panel_dates[-1]
    if end < start:
        raise UsageError(f"window end {end} precedes start {start}")
    return replace(cfg, start=start, end=end)


# -- segmentation rules ----------------------------------------------------------

def add_months(d: date, months: int) -> date:
    month_index = d.month - 1 + months
    year = d.year + month_index // 12
    month = month_index % 12 + 1
    day = min(d.day, calendar.monthrange(year, month)[1])
    return date(year, month, day)


def bimonthly_spec(start: date, end: date) -> SegmentSpec:
    """Consecutive 2-calendar-month windows from the window start."""
    boundaries = []
    cursor = start
    while cursor <= end:
        nxt = add_months(cursor, 2)
        segment_end = min(nxt - timedelta(days=1), end)
        boundaries.append((cursor, segment_end))
        cursor = nxt
    return SegmentSpec(boundaries=tuple(boundaries))


def fixed_days_spec(panel_dates: Sequence[date], n_days: int) -> SegmentSpec:
    """Consecutive blocks of exactly n_days panel dates; a shorter trailing
    remainder is dropped with a warning."""
    if n_days < 5:
        raise UsageError("fixed-days segments need at least 5 dates")
    total = len(panel_dates)
    full = total // n_days
    if full == 0:
        raise DataError(
            f"panel has {total} dates, fewer than one {n_days}-day segment"
        )
    leftover = total - full * n_days
    if leftover:
        warnings.warn(
            f"dropping {leftover} trailing dates that do not fill a "
            f"{n_days}-day segment",
            stacklevel=2,
        )
    boundaries = tuple(
        (panel_dates[i * n_days], panel_dates[(i + 1) * n_days - 1])
        for i in range(full)
    )
    return SegmentSpec(boundaries=boundaries)


def boundary_file_spec(path: str | Path) -> SegmentSpec:
    """Explicit boundaries: one ``start,end`` ISO date pair per line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"segment boundary file not found: {path}") from None
    boundaries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'start,end', got {line!r}")
        try:
            boundaries.append((date.fromisoformat(parts[0]), date.fromisoformat(parts[1])))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: invalid ISO date in {line!r}") from None
    if not boundaries:
        raise UsageError(f"segment boundary file {path} defines no segments")
    return SegmentSpec(boundaries=tuple(boundaries))


def make_segment_spec(cfg: RunConfig, panel_dates: Sequence[date]) -> SegmentSpec:
    """Turn the configured segmentation rule into concrete date windows."""
    rule = cfg.segment
    if rule == "bimonthly":
        return bimonthly_spec(cfg.start, cfg.end)
    if rule.startswith("days:"):
        try:
            n_days = int(rule.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad segment rule {rule!r}: days:N needs an integer") from None
        window = [d for d in panel_dates if cfg.start <= d <= cfg.end]
        return fixed_days_spec(window, n_days)
    if rule.startswith("file:"):
        return boundary_file_spec(rule.split(":", 1)[1])
    raise UsageError(
        f"unknown segment rule {rule!r}; use bimonthly, days:N or file:PATH"
    )
