from datetime import date, timedelta

import numpy as np
import pytest

from spillnet.connectedness import SystemLayout
from spillnet.errors import ConfigError, DataError, NumericalError
from spillnet.realized import DailyMeasures, build_panel
from spillnet.rolling import (
    RollingConfig,
    SpilloverSeries,
    bootstrap_ci,
    run_rolling,
)
from spillnet.rolling import test_hypotheses as evaluate_hypotheses

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def make_panel(rs_pos, rs_neg, assets=None, start=date(2012, 1, 2)):
    rs_pos = np.asarray(rs_pos, dtype=float)
    rs_neg = np.asarray(rs_neg, dtype=float)
    T, N = rs_pos.shape
    assets = assets or [f"a{j}" for j in range(N)]
    ms = []
    for i in range(T):
        d = start + timedelta(days=i)
        for j, a in enumerate(assets):
            ms.append(DailyMeasures(a, d, rs_pos[i, j] + rs_neg[i, j],
                                    rs_neg[i, j], rs_pos[i, j]))
    panel, _ = build_panel(ms, assets)
    return panel


def factor_panel(rng, T, n_assets=2, asym=0.0):
    """Lognormal semivariance panels sharing one AR factor."""
    f = np.empty(T)
    f[0] = 0.0
    eps = rng.standard_normal(T)
    for t in range(1, T):
        f[t] = 0.8 * f[t - 1] + eps[t]
    pos = np.empty((T, n_assets))
    neg = np.empty((T, n_assets))
    for j in range(n_assets):
        pos[:, j] = np.exp(-10.5 + 0.4 * f + 0.3 * rng.standard_normal(T))
        neg[:, j] = np.exp(-10.5 + (0.4 + asym) * f + 0.3 * rng.standard_normal(T))
    return pos, neg


CFG = RollingConfig(window_length=30, horizon=10, lag_order=2, mode="signed",
                    bootstrap_reps=0, block_length=10, rng_seed=3)


def test_panel_equal_to_window_yields_one_snapshot():
    rng = np.random.default_rng(50)
    pos, neg = factor_panel(rng, 30)
    series = run_rolling(make_panel(pos, neg), CFG)
    assert len(series.snapshots) == 1
    assert series.snapshots[0].window_end == make_panel(pos, neg).days[-1]


def test_snapshot_count_and_consecutive_dates():
    rng = np.random.default_rng(51)
    pos, neg = factor_panel(rng, 40)
    panel = make_panel(pos, neg)
    series = run_rolling(panel, CFG)
    assert len(series.snapshots) == 11
    ends = [s.window_end for s in series.snapshots]
    assert ends == list(panel.days[29:])
    assert all(a < b for a, b in zip(ends, ends[1:]))


def test_snapshot_depends_only_on_its_window():
    rng = np.random.default_rng(52)
    pos, neg = factor_panel(rng, 45)
    full = run_rolling(make_panel(pos, neg), CFG)
    # drop the first 15 rows: every remaining window sees identical data
    trimmed = run_rolling(make_panel(pos[15:], neg[15:],
                                     start=date(2012, 1, 2) + timedelta(days=15)), CFG)
    tail = {s.window_end: s for s in full.snapshots}
    for snap in trimmed.snapshots:
        ref = tail[snap.window_end]
        assert snap.total == ref.total
        assert np.array_equal(snap.to, ref.to)
        assert snap.sam == ref.sam


def test_gap_window_recorded_not_crashed():
    rng = np.random.default_rng(53)
    pos, neg = factor_panel(rng, 45)
    pos[:30] = 1e-5  # first window sees only constant upside columns
    panel = make_panel(pos, neg)
    series = run_rolling(panel, CFG)
    assert series.gaps, "expected at least one gap record"
    covered = {s.window_end for s in series.snapshots} | {g.window_end for g in series.gaps}
    assert covered == set(panel.days[29:])
    assert len(covered) == len(series.snapshots) + len(series.gaps)


def test_panel_shorter_than_window_errors():
    rng = np.random.default_rng(54)
    pos, neg = factor_panel(rng, 20)
    with pytest.raises(DataError, match="shorter"):
        run_rolling(make_panel(pos, neg), CFG)


def test_plain_mode_series():
    rng = np.random.default_rng(55)
    pos, neg = factor_panel(rng, 36, n_assets=3)
    cfg = RollingConfig(window_length=30, lag_order=1, mode="plain", bootstrap_reps=0)
    series = run_rolling(make_panel(pos, neg), cfg)
    assert len(series.snapshots) == 7
    for snap in series.snapshots:
        assert snap.sam is None
        assert abs(snap.net.sum()) <= 1e-8
        assert 0.0 <= snap.total <= 100.0


def test_serial_and_parallel_agree_exactly():
    rng = np.random.default_rng(56)
    pos, neg = factor_panel(rng, 40)
    cfg = RollingConfig(window_length=30, lag_order=2, mode="signed",
                        bootstrap_reps=25, block_length=10, rng_seed=11)
    panel = make_panel(pos, neg)
    serial = run_rolling(panel, cfg, jobs=1)
    parallel = run_rolling(panel, cfg, jobs=2)
    assert len(serial.snapshots) == len(parallel.snapshots)
    for a, b in zip(serial.snapshots, parallel.snapshots):
        assert a.window_end == b.window_end
        assert a.total == b.total
        assert np.array_equal(a.dsam, b.dsam)
    for d in serial.cis:
        assert serial.cis[d].sam == parallel.cis[d].sam
        assert np.array_equal(serial.cis[d].dsam, parallel.cis[d].dsam)


# --- bootstrap --------------------------------------------------------------


def test_bootstrap_deterministic_under_seed():
    rng = np.random.default_rng(57)
    pos, neg = factor_panel(rng, 60)
    window = np.hstack([pos, neg])
    cfg = RollingConfig(window_length=60, mode="signed", bootstrap_reps=50,
                        block_length=15, rng_seed=21)
    a = bootstrap_ci(window, cfg, rng=np.random.default_rng(99))
    b = bootstrap_ci(window, cfg, rng=np.random.default_rng(99))
    assert a.sam == b.sam
    assert np.array_equal(a.dsam, b.dsam)
    assert np.array_equal(a.to, b.to)


def test_bootstrap_two_reps_gives_min_max():
    rng = np.random.default_rng(58)
    pos, neg = factor_panel(rng, 60)
    window = np.hstack([pos, neg])
    cfg = RollingConfig(window_length=60, mode="signed", bootstrap_reps=2,
                        block_length=15, rng_seed=5)
    ci = bootstrap_ci(window, cfg, rng=np.random.default_rng(1))
    assert ci.sam[0] <= ci.sam[1]
    # percentile interval over two replicates degenerates to their range,
    # so a third run with the same draws must not widen it
    assert np.all(ci.dsam[:, 0] <= ci.dsam[:, 1])
    assert np.all(ci.to[:, 0] <= ci.to[:, 1])


def test_bootstrap_interval_orders_and_brackets_most_draws():
    rng = np.random.default_rng(59)
    pos, neg = factor_panel(rng, 80)
    window = np.hstack([pos, neg])
    cfg = RollingConfig(window_length=80, mode="signed", bootstrap_reps=100,
                        block_length=20, rng_seed=7)
    ci = bootstrap_ci(window, cfg, rng=np.random.default_rng(2))
    assert ci.sam[0] <= ci.sam[1]
    assert np.all(ci.to >= 0.0)


def test_bootstrap_redraw_cap_errors_on_unfittable_window():
    T = 40
    window = np.ones((T, 4))  # constant columns: every refit is collinear
    cfg = RollingConfig(window_length=T, mode="signed", bootstrap_reps=3,
                        block_length=10, rng_seed=9)
    with pytest.raises(NumericalError, match="attempts"):
        bootstrap_ci(window, cfg, rng=np.random.default_rng(3))


def test_bootstrap_requires_signed_layout():
    window = np.ones((40, 3))
    cfg = RollingConfig(window_length=40, mode="plain", bootstrap_reps=3, block_length=10)
    with pytest.raises(DataError, match="even number"):
        bootstrap_ci(window, cfg)


def test_config_validation():
    with pytest.raises(ConfigError):
        RollingConfig(window_length=50, block_length=60, bootstrap_reps=10).validate()
    with pytest.raises(ConfigError):
        RollingConfig(ci_level=1.5).validate()
    with pytest.raises(ConfigError):
        RollingConfig(mode="other").validate()
    with pytest.raises(ConfigError):
        RollingConfig(window_length=20, mode="signed").validate(dim=12)


# --- hypothesis flags -------------------------------------------------------


def _series_with_ci(sam_ci, dsam_ci, to_ci):
    from spillnet.connectedness import SpilloverSnapshot
    from spillnet.rolling import WindowCI

    layout = SystemLayout(2, "signed")
    d = date(2013, 5, 1)
    snap = SpilloverSnapshot(
        window_end=d, total=50.0, to=np.zeros(4), from_=np.zeros(4),
        net=np.zeros(2), stationary=True, sam=0.5, dsam=np.array([0.2, 0.3]),
    )
    series = SpilloverSeries(layout=layout, assets=("a", "b"),
                             variables=("a_pos", "b_pos", "a_neg", "b_neg"))
    series.snapshots.append(snap)
    series.cis[d] = WindowCI(sam=sam_ci, dsam=np.asarray(dsam_ci), to=np.asarray(to_ci))
    return series


def test_hypotheses_zero_outside_interval_rejects():
    series = _series_with_ci((-5.0, -1.0), [[-2.0, 3.0], [0.5, 2.0]],
                             [[0.1, 2.0], [0.0, 2.0], [-1.0, 1.0], [0.2, 0.3]])
    flags = evaluate_hypotheses(series)
    assert len(flags) == 1
    f = flags[0]
    assert f.h1_reject
    assert list(f.h3_reject) == [False, True]
    assert list(f.h2_reject) == [True, False, False, True]


def test_hypotheses_zero_inside_interval_accepts():
    series = _series_with_ci((-2.0, 3.0), [[-1.0, 1.0], [-1.0, 1.0]],
                             [[0.0, 2.0]] * 4)
    f = evaluate_hypotheses(series)[0]
    assert not f.h1_reject
    assert not f.h3_reject.any()


def test_hypotheses_require_cis():
    layout = SystemLayout(2, "signed")
    series = SpilloverSeries(layout=layout, assets=("a", "b"),
                             variables=("a_pos", "b_pos", "a_neg", "b_neg"))
    with pytest.raises(DataError, match="intervals"):
        evaluate_hypotheses(series)


# --- symmetry null through the full engine ----------------------------------


def test_duplicated_blocks_yield_exactly_zero_sam():
    rng = np.random.default_rng(60)
    pos, _ = factor_panel(rng, 45)
    panel = make_panel(pos, pos.copy())
    series = run_rolling(panel, CFG)
    assert series.snapshots
    for snap in series.snapshots:
        assert abs(snap.sam) <= 1e-10
        assert np.max(np.abs(snap.dsam)) <= 1e-10


def test_block_swap_negates_sam_through_engine():
    rng = np.random.default_rng(61)
    pos, neg = factor_panel(rng, 40, asym=0.3)
    panel = make_panel(pos, neg)
    default = run_rolling(panel, CFG)
    swapped = run_rolling(panel, CFG,
                          layout=SystemLayout(2, "signed", positive_first=False))
    for a, b in zip(default.snapshots, swapped.snapshots):
        assert b.sam == pytest.approx(-a.sam, abs=1e-10)
        assert np.allclose(b.dsam, -a.dsam, atol=1e-10)
