"""Seeded synthetic price panels: groups of stocks sharing a common factor
tuned to a target pairwise within-group correlation. Used by the acceptance
suite in place of historical market data.
"""

from __future__ import annotations

import math
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import UsageError
from .ingest import PriceSeries

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def trading_days(start: date, count: int) -> tuple[date, ...]:
    """The first ``count`` weekdays on or after ``start``."""
    days = []
    cursor = start
    while len(days) < count:
        if cursor.weekday() < 5:
            days.append(cursor)
        cursor += timedelta(days=1)
    return tuple(days)


def synthetic_prices(
    group_sizes: Sequence[int],
    days: int,
    rho: float,
    seed: int,
    start: date = date(2008, 6, 2),
    vol: float = 0.02,
    initial_price: float = 100.0,
) -> list[PriceSeries]:
    """Generate one PriceSeries per stock with planted correlation groups.

    Within group g, returns follow sqrt(rho) * factor_g + sqrt(1-rho) * noise,
    so the within-group pairwise correlation targets rho and cross-group
    correlations target zero. ``days`` counts price rows; each series yields
    ``days - 1`` returns.
    """
    if not 0.0 < rho < 1.0:
        raise UsageError(f"target correlation must lie in (0, 1), got {rho}")
    if days < 2:
        raise UsageError("need at least 2 price days")
    if any(s < 1 for s in group_sizes) or not group_sizes:
        raise UsageError("group sizes must be positive")
    if max(group_sizes) > len(_LETTERS):
        raise UsageError(f"group size above {len(_LETTERS)} not supported")

    rng = np.random.default_rng(seed)
    dates = trading_days(start, days)
    n_returns = days - 1
    out = []
    for g, size in enumerate(group_sizes, start=1):
        factor = rng.standard_normal(n_returns)
        for i in range(size):
            noise = rng.standard_normal(n_returns)
            returns = vol * (math.sqrt(rho) * factor + math.sqrt(1.0 - rho) * noise)
            closes = initial_price * np.cumprod(np.concatenate([[1.0], 1.0 + returns]))
            out.append(
                PriceSeries(
                    ticker=f"G{g}{_LETTERS[i]}",
                    dates=dates,
                    closes=closes,
                )
            )
    return out


def planted_groups(group_sizes: Sequence[int]) -> dict[str, int]:
    """Ticker -> group index map matching synthetic_prices naming."""
    labels = {}
    for g, size in enumerate(group_sizes, start=1):
        for i in range(size):
            labels[f"G{g}{_LETTERS[i]}"] = g
    return labels


def write_price_csvs(series: Sequence[PriceSeries], out_dir: str | Path) -> list[Path]:
    """One OHLCV CSV per ticker, named after the ticker."""
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    paths = []
    for s in series:
        lines = ["Date,Open,High,Low,Close,Volume"]
        for day, close in zip(s.dates, s.closes):
            c = repr(float(close))
            lines.append(f"{day.isoformat()},{c},{c},{c},{c},0")
        path = base / f"{s.ticker}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths
