import datetime as dt

import numpy as np
import pytest

from epipolicy.data_io import (
    Field,
    RegressionSeries,
    parse_case_csv,
    sample_data_path,
    select_series,
    to_log_cumulative,
)

CHINA_WINDOW = (dt.date(2020, 1, 22), dt.date(2020, 3, 10))
KOREA_WINDOW = (dt.date(2020, 2, 20), dt.date(2020, 4, 30))
SWEDEN_WINDOW = (dt.date(2020, 1, 31), dt.date(2020, 3, 31))


@pytest.fixture(scope="session")
def sample_table():
    return parse_case_csv(sample_data_path().read_bytes())


@pytest.fixture(scope="session")
def china_series(sample_table):
    return to_log_cumulative(
        select_series(sample_table, "China", CHINA_WINDOW, Field.CONFIRMED))


@pytest.fixture(scope="session")
def korea_series(sample_table):
    return to_log_cumulative(
        select_series(sample_table, "South Korea", KOREA_WINDOW, Field.CONFIRMED))


def synthetic_changepoint_series(seed: int, n_points: int = 100):
    """Piecewise-linear log series with StudentT(2) noise, continuous at tau.

    Returns the series and the generating (w1, w2, tau) in normalized units.
    """
    rng = np.random.default_rng(seed)
    span = n_points - 1
    w1_day = rng.uniform(0.15, 0.35)
    w2_day = rng.uniform(0.005, 0.03)
    tau = rng.uniform(0.35, 0.75)
    w1, w2 = w1_day * span, w2_day * span
    b1 = rng.uniform(1.0, 3.0)
    b2 = b1 + (w1 - w2) * tau
    t = np.linspace(0.0, 1.0, n_points)
    y = np.where(t < tau, w1 * t + b1, w2 * t + b2)
    y = y + rng.standard_t(2, n_points) * 0.03
    d0 = dt.date(2020, 1, 1)
    series = RegressionSeries(
        t=t, y=y, date_range=(d0, d0 + dt.timedelta(days=span)))
    return series, (w1, w2, tau)
