"""Price ingestion, return/moment estimation, and synthetic data.

CSV layout: header `date,<asset>,...`, one row per trading period, ISO
dates strictly ascending, strictly positive prices. Returns are simple
returns p_t / p_{t-1} - 1; moments are the sample mean and the unbiased
(1/(T-1)) covariance of those returns.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .model import DataError, _as_readonly


@dataclass(frozen=True)
class PriceTable:
    dates: tuple[str, ...]
    asset_ids: tuple[str, ...]
    prices: np.ndarray  # shape (T_prices, n), strictly positive

    def __post_init__(self):
        object.__setattr__(self, "prices", _as_readonly(self.prices))


@dataclass(frozen=True)
class ReturnsDataset:
    asset_ids: tuple[str, ...]
    returns: np.ndarray  # shape (T, n)
    mu_hat: np.ndarray  # sample mean, shape (n,)
    cov_hat: np.ndarray  # unbiased sample covariance, shape (n, n)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("returns", "mu_hat", "cov_hat"):
            object.__setattr__(self, name, _as_readonly(getattr(self, name)))
        t, n = self.returns.shape
        if t < 2:
            raise DataError("need at least 2 return periods")
        if self.mu_hat.shape != (n,) or self.cov_hat.shape != (n, n):
            raise DataError("moment shapes do not match returns")
        if len(self.asset_ids) != n:
            raise DataError("asset id count does not match returns")

    @property
    def n(self) -> int:
        return self.returns.shape[1]

    @property
    def periods(self) -> int:
        return self.returns.shape[0]


def fingerprint(dataset: ReturnsDataset) -> str:
    """sha256 over the return matrix's shape and raw bytes."""
    t, n = dataset.returns.shape
    h = hashlib.sha256()
    h.update(f"{t},{n};".encode())
    h.update(np.ascontiguousarray(dataset.returns).tobytes())
    return h.hexdigest()


def _moments(returns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Unbiased covariance; symmetrized so downstream symmetry checks are
    # exact rather than at the mercy of BLAS rounding.
    t = returns.shape[0]
    mu_hat = returns.mean(axis=0)
    d = returns - mu_hat
    cov = (d.T @ d) / (t - 1)
    cov = 0.5 * (cov + cov.T)
    return mu_hat, cov


def load_prices_csv(source) -> PriceTable:
    """Parse and validate a price CSV from a path or an open text stream.

    Raises DataError naming the offending line (1-based, header is line 1)
    and column for: malformed rows, invalid or non-ascending dates,
    missing or nonpositive prices, fewer than 3 price rows.
    """
    if hasattr(source, "read"):
        return _parse_prices(source, name=getattr(source, "name", "<stream>"))
    with open(Path(source), newline="") as fh:
        return _parse_prices(fh, name=str(source))


def _parse_prices(fh, name: str) -> PriceTable:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{name}: empty file") from None
    header = [c.strip() for c in header]
    if len(header) < 2 or header[0] != "date":
        raise DataError(
            f"{name}: header must be 'date,<asset>,...', got {header!r}"
        )
    asset_ids = tuple(header[1:])
    if len(set(asset_ids)) != len(asset_ids):
        raise DataError(f"{name}: duplicate asset column names")

    dates: list[str] = []
    rows: list[list[float]] = []
    prev: date | None = None
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue  # tolerate blank lines
        if len(cells) != len(header):
            raise DataError(
                f"{name}: line {lineno}: expected {len(header)} cells, "
                f"got {len(cells)}"
            )
        raw_date = cells[0].strip()
        try:
            d = date.fromisoformat(raw_date)
        except ValueError:
            raise DataError(
                f"{name}: line {lineno}: invalid ISO date {raw_date!r}"
            ) from None
        if prev is not None and d <= prev:
            raise DataError(
                f"{name}: line {lineno}: non-ascending dates "
                f"({raw_date!r} after {dates[-1]!r})"
            )
        prev = d
        row = []
        for col, cell in zip(asset_ids, cells[1:]):
            cell = cell.strip()
            if not cell:
                raise DataError(
                    f"{name}: line {lineno}: missing price in column {col!r}"
                )
            try:
                p = float(cell)
            except ValueError:
                raise DataError(
                    f"{name}: line {lineno}: bad price {cell!r} "
                    f"in column {col!r}"
                ) from None
            if not np.isfinite(p) or p <= 0.0:
                raise DataError(
                    f"{name}: line {lineno}: nonpositive price {cell!r} "
                    f"in column {col!r}"
                )
            row.append(p)
        dates.append(raw_date)
        rows.append(row)

    if len(rows) < 3:
        raise DataError(f"{name}: need at least 3 price rows, got {len(rows)}")
    return PriceTable(
        dates=tuple(dates), asset_ids=asset_ids, prices=np.asarray(rows)
    )


def load_prices_csv_text(text: str, name: str = "<inline>") -> PriceTable:
    """Same as load_prices_csv, for CSV content already in memory."""
    return _parse_prices(io.StringIO(text), name=name)


def compute_returns(table: PriceTable, meta: dict | None = None) -> ReturnsDataset:
    """Simple returns and sample moments from a validated price table."""
    p = table.prices
    if p.shape[0] < 3:
        raise DataError("need at least 3 price rows to form 2 return periods")
    returns = p[1:] / p[:-1] - 1.0
    mu_hat, cov_hat = _moments(returns)
    info = {"source": "prices_csv", "periods": returns.shape[0]}
    if meta:
        info.update(meta)
    return ReturnsDataset(
        asset_ids=table.asset_ids,
        returns=returns,
        mu_hat=mu_hat,
        cov_hat=cov_hat,
        meta=info,
    )


def generate_synthetic(
    n: int, periods: int, seed: int, sector_count: int
) -> ReturnsDataset:
    """Seeded sector-factor return panel.

    Asset i belongs to sector i mod sector_count; returns are
    asset mean + loading * sector factor + idiosyncratic noise, with per-asset
    means spread over roughly [-0.05, 0.9] per period so minimum-return
    levels like 0.1 or 0.2 are attainable. Same arguments, same dataset.
    """
    if n < 1:
        raise DataError("n must be at least 1")
    if periods < 2:
        raise DataError("periods must be at least 2")
    if sector_count < 1:
        raise DataError("sector_count must be at least 1")
    rng = np.random.default_rng(seed)
    sectors = np.arange(n) % sector_count
    sector_base = rng.uniform(0.0, 0.7, size=sector_count)
    asset_mean = sector_base[sectors] + rng.uniform(-0.05, 0.2, size=n)
    loadings = rng.uniform(0.5, 1.5, size=n)
    factors = rng.normal(0.0, 0.08, size=(periods, sector_count))
    idio = rng.normal(0.0, 0.05, size=(periods, n))
    returns = asset_mean + loadings * factors[:, sectors] + idio
    # Keep implied price paths positive: a simple return below -1 would
    # flip the price sign.
    returns = np.maximum(returns, -0.95)
    mu_hat, cov_hat = _moments(returns)
    asset_ids = tuple(f"A{i:03d}" for i in range(n))
    return ReturnsDataset(
        asset_ids=asset_ids,
        returns=returns,
        mu_hat=mu_hat,
        cov_hat=cov_hat,
        meta={
            "source": "synthetic",
            "n": n,
            "periods": periods,
            "seed": seed,
            "sectors": sector_count,
        },
    )
