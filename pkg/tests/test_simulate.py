import json

import numpy as np
import pytest

from garchnet import moments as mc
from garchnet.errors import FormatError, NonStationary, SeriesTooShort
from garchnet.moments import GarchParams
from garchnet.pathsim import EmpiricalStats, estimate_stats, read_series_csv, simulate, write_series_csv

REF = GarchParams(1e-4, 0.1, 0.8)


@pytest.fixture(scope="module")
def long_path():
    return simulate(REF, 1_000_000, burn_in=1000, seed=2024)


def test_iid_limit():
    x = simulate(GarchParams(2e-4, 0.0, 0.0), 200_000, seed=1)
    assert x.var() == pytest.approx(2e-4, rel=0.02)
    # white noise: lag-1 correlation of levels is negligible
    assert abs(np.corrcoef(x[:-1], x[1:])[0, 1]) < 0.01


def test_deterministic():
    np.testing.assert_array_equal(simulate(REF, 5000, seed=3), simulate(REF, 5000, seed=3))
    assert not np.array_equal(simulate(REF, 5000, seed=3), simulate(REF, 5000, seed=4))


def test_burn_in_discards_prefix():
    full = simulate(REF, 1100, burn_in=0, seed=9)
    np.testing.assert_array_equal(simulate(REF, 100, burn_in=1000, seed=9), full[1000:])


def test_nonstationary_rejected():
    p = GarchParams.__new__(GarchParams)
    object.__setattr__(p, "alpha0", 1e-4)
    object.__setattr__(p, "alpha1", 0.3)
    object.__setattr__(p, "beta1", 0.7)
    with pytest.raises(NonStationary):
        simulate(p, 10)


def test_mean_square_within_three_long_run_standard_errors(long_path):
    # x^2 is autocorrelated; its long-run variance is Var(x^2) (1 + 2 sum_k rho_k)
    s2 = mc.second_moment(REF)
    g4 = mc.gamma4_closed(REF.alpha1, REF.beta1)
    g1 = mc.autocov_hat(REF.alpha1, REF.beta1, 1)
    lrv = s2**2 * ((g4 - 1) + 2 * g1 / (1 - REF.alpha1 - REF.beta1))
    se = np.sqrt(lrv / long_path.size)
    assert abs(np.mean(long_path**2) - s2) < 3 * se


def test_constant_magnitude_series():
    x = 0.3 * np.where(np.arange(100) % 2 == 0, 1.0, -1.0)
    s = estimate_stats(x, [1, 2])
    assert s.second_moment == pytest.approx(0.09, rel=1e-14)
    assert s.gamma4 == pytest.approx(1.0, rel=1e-14)
    assert s.autocov_hat[1] == pytest.approx(0.0, abs=1e-14)


def test_gaussian_series():
    z = np.random.default_rng(77).standard_normal(1_000_000)
    s = estimate_stats(z, [1, 2, 6, 10])
    assert s.gamma4 == pytest.approx(3.0, abs=0.05)
    assert s.gamma6 == pytest.approx(15.0, rel=0.05)
    for lag in (1, 2, 6, 10):
        assert abs(s.autocov_hat[lag]) < 0.01


def test_autocov_geometric_ratio(long_path):
    s = estimate_stats(long_path, [1, 2])
    assert s.autocov_hat[2] / s.autocov_hat[1] == pytest.approx(0.9, rel=0.10)


def test_long_path_matches_analytic(long_path):
    s = estimate_stats(long_path, [1, 2])
    assert s.second_moment == pytest.approx(mc.second_moment(REF), rel=0.05)
    assert s.gamma4 == pytest.approx(mc.gamma4_closed(0.1, 0.8), rel=0.05)
    for lag in (1, 2):
        assert s.autocov_hat[lag] == pytest.approx(mc.autocov_hat(0.1, 0.8, lag), rel=0.10)


def test_burn_in_choice_within_tolerance():
    a = estimate_stats(simulate(REF, 1_000_000, burn_in=1000, seed=11), [1])
    b = estimate_stats(simulate(REF, 1_000_000, burn_in=5000, seed=11), [1])
    assert a.second_moment == pytest.approx(b.second_moment, rel=0.05)
    assert a.gamma4 == pytest.approx(b.gamma4, rel=0.05)
    assert a.autocov_hat[1] == pytest.approx(b.autocov_hat[1], rel=0.10)


def test_series_too_short():
    with pytest.raises(SeriesTooShort):
        estimate_stats(np.ones(5), [10])


def test_stats_dict_roundtrip():
    s = estimate_stats(simulate(REF, 5000, seed=1), [1, 6])
    back = EmpiricalStats.from_dict(json.loads(json.dumps(s.to_dict())))
    assert back == s
    assert set(s.to_dict()) >= {"second_moment", "gamma4", "gamma6", "autocov_hat_1", "autocov_hat_6", "n_obs"}


@pytest.mark.parametrize("doc", [[1, 2], {"gamma4": 3.1}, {"second_moment": "x", "gamma4": 3.2}])
def test_stats_dict_errors(doc):
    with pytest.raises(FormatError):
        EmpiricalStats.from_dict(doc)


def test_series_csv_roundtrip(tmp_path):
    x = simulate(REF, 300, seed=5)
    path = tmp_path / "x.csv"
    write_series_csv(path, x, provenance={"seed": 5})
    np.testing.assert_array_equal(read_series_csv(path), x)
    path.write_text("x\n1.0\nabc\n")
    with pytest.raises(FormatError):
        read_series_csv(path)
