import io
from datetime import date, timedelta

import numpy as np
import pytest

from sparsefolio import (
    DataError,
    PriceTable,
    ReturnsDataset,
    compute_returns,
    fingerprint,
    generate_synthetic,
    load_prices_csv,
)
from sparsefolio.data import load_prices_csv_text

THREE_ROWS = "date,A,B\n2024-01-02,100,50\n2024-01-03,110,50\n2024-01-04,121,55\n"


def test_parse_well_formed():
    table = load_prices_csv_text(THREE_ROWS)
    assert table.asset_ids == ("A", "B")
    assert table.prices.shape == (3, 2)
    assert table.dates == ("2024-01-02", "2024-01-03", "2024-01-04")
    assert table.prices[0, 0] == 100.0


def test_parse_from_path_and_stream(tmp_path):
    f = tmp_path / "prices.csv"
    f.write_text(THREE_ROWS)
    assert load_prices_csv(f).prices.shape == (3, 2)
    assert load_prices_csv(io.StringIO(THREE_ROWS)).prices.shape == (3, 2)


def test_zero_price_names_row_and_column():
    bad = "date,A,B\n2024-01-02,100,50\n2024-01-03,0,50\n2024-01-04,121,55\n"
    with pytest.raises(DataError) as exc:
        load_prices_csv_text(bad, name="bad.csv")
    msg = str(exc.value)
    assert "bad.csv" in msg and "line 3" in msg and "'A'" in msg


def test_duplicate_dates_rejected():
    bad = "date,A\n2024-01-02,100\n2024-01-02,110\n2024-01-03,121\n"
    with pytest.raises(DataError, match="non-ascending dates"):
        load_prices_csv_text(bad)


def test_descending_dates_rejected():
    bad = "date,A\n2024-01-03,100\n2024-01-02,110\n2024-01-04,121\n"
    with pytest.raises(DataError, match="non-ascending dates"):
        load_prices_csv_text(bad)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("", "empty file"),
        ("time,A\n2024-01-02,1\n2024-01-03,1\n2024-01-04,1\n", "header"),
        ("date\n2024-01-02\n2024-01-03\n2024-01-04\n", "header"),
        ("date,A,A\n2024-01-02,1,1\n2024-01-03,1,1\n2024-01-04,1,1\n", "duplicate"),
        ("date,A\n2024-01-02,1,9\n", "expected 2 cells"),
        ("date,A\nJan 2 2024,1\n", "invalid ISO date"),
        ("date,A\n2024-01-02,\n", "missing price"),
        ("date,A\n2024-01-02,abc\n", "bad price"),
        ("date,A\n2024-01-02,-3\n", "nonpositive price"),
        ("date,A\n2024-01-02,nan\n", "nonpositive price"),
        ("date,A\n2024-01-02,1\n2024-01-03,1\n", "at least 3 price rows"),
    ],
)
def test_validation_messages(text, fragment):
    with pytest.raises(DataError, match=fragment):
        load_prices_csv_text(text)


def test_returns_arithmetic():
    ds = compute_returns(load_prices_csv_text(THREE_ROWS))
    assert ds.periods == 2 and ds.n == 2
    assert ds.returns == pytest.approx(
        np.array([[0.10, 0.00], [0.10, 0.10]]), abs=1e-12
    )
    assert ds.mu_hat == pytest.approx([0.10, 0.05], abs=1e-12)
    assert ds.cov_hat == pytest.approx(
        np.array([[0.0, 0.0], [0.0, 0.005]]), abs=1e-12
    )


def test_constant_price_column_gives_zero_variance():
    text = "date,A,B\n2024-01-02,7,50\n2024-01-03,7,52\n2024-01-04,7,51\n"
    ds = compute_returns(load_prices_csv_text(text))
    assert np.all(ds.returns[:, 0] == 0.0)
    assert np.all(ds.cov_hat[0, :] == 0.0)
    assert np.all(ds.cov_hat[:, 0] == 0.0)


def test_moments_recomputable():
    ds = generate_synthetic(7, 40, seed=9, sector_count=3)
    assert ds.mu_hat == pytest.approx(ds.returns.mean(axis=0), rel=1e-15)
    d = ds.returns - ds.returns.mean(axis=0)
    cov = d.T @ d / (ds.periods - 1)
    assert ds.cov_hat == pytest.approx(0.5 * (cov + cov.T), rel=1e-12)
    assert np.array_equal(ds.cov_hat, ds.cov_hat.T)
    assert np.all(np.diag(ds.cov_hat) >= 0.0)


def test_dataset_requires_two_periods():
    with pytest.raises(DataError):
        ReturnsDataset(
            asset_ids=("A",),
            returns=np.zeros((1, 1)),
            mu_hat=np.zeros(1),
            cov_hat=np.zeros((1, 1)),
        )


def test_synthetic_deterministic_and_seed_sensitive():
    a = generate_synthetic(100, 120, seed=42, sector_count=10)
    b = generate_synthetic(100, 120, seed=42, sector_count=10)
    c = generate_synthetic(100, 120, seed=43, sector_count=10)
    assert a.n == 100 and a.periods == 120
    assert np.array_equal(a.returns, b.returns)
    assert fingerprint(a) == fingerprint(b)
    assert not np.array_equal(a.returns, c.returns)
    assert fingerprint(a) != fingerprint(c)


def test_synthetic_single_asset():
    ds = generate_synthetic(1, 10, seed=0, sector_count=1)
    assert ds.cov_hat.shape == (1, 1)
    assert ds.cov_hat[0, 0] >= 0.0


def test_synthetic_mean_range():
    # asset means are spread so r_min levels of 0.1 / 0.2 stay attainable
    ds = generate_synthetic(100, 120, seed=42, sector_count=10)
    assert ds.mu_hat.min() > -0.15
    assert ds.mu_hat.max() < 1.0
    assert ds.mu_hat.max() > 0.2


def test_synthetic_covariance_psd():
    for seed in (1, 7, 42):
        ds = generate_synthetic(30, 60, seed=seed, sector_count=5)
        eigmin = float(np.linalg.eigvalsh(ds.cov_hat).min())
        assert eigmin >= -1e-10


def test_round_trip_through_prices():
    """Rebuild the implied price path and recover the same returns."""
    ds = generate_synthetic(5, 25, seed=4, sector_count=2)
    prices = np.empty((ds.periods + 1, ds.n))
    prices[0] = 1.0
    for t in range(ds.periods):
        prices[t + 1] = prices[t] * (1.0 + ds.returns[t])
    start = date(2020, 1, 1)
    dates = tuple(str(start + timedelta(days=t)) for t in range(ds.periods + 1))
    table = PriceTable(dates=dates, asset_ids=ds.asset_ids, prices=prices)
    back = compute_returns(table)
    assert np.max(np.abs(back.returns - ds.returns)) < 1e-12


def test_fingerprint_tracks_content():
    ds = generate_synthetic(4, 12, seed=2, sector_count=2)
    same = ReturnsDataset(
        asset_ids=ds.asset_ids,
        returns=ds.returns.copy(),
        mu_hat=ds.mu_hat,
        cov_hat=ds.cov_hat,
    )
    assert fingerprint(ds) == fingerprint(same)
    bumped = ds.returns.copy()
    bumped[0, 0] += 1e-9
    other = ReturnsDataset(
        asset_ids=ds.asset_ids,
        returns=bumped,
        mu_hat=ds.mu_hat,
        cov_hat=ds.cov_hat,
    )
    assert fingerprint(ds) != fingerprint(other)


def test_synthetic_meta_echo():
    ds = generate_synthetic(6, 20, seed=5, sector_count=2)
    assert ds.meta == {
        "source": "synthetic",
        "n": 6,
        "periods": 20,
        "seed": 5,
        "sectors": 2,
    }
