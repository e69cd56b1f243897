import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hvac_phm.dataset import (
    HEADER,
    DataFormatError,
    DataValidationError,
    Representation,
    TimeSeries,
    Trend,
    WindowView,
    channel_stats,
    compute_stats,
    export_csv,
    import_csv,
    make_reference,
    reference_segment,
    render,
    run_scenario,
    windows,
)
from hvac_phm.scenarios import continual_scenario, default_scenario
from hvac_phm.sim import CHANNELS, SimConfig

from oracles import stats_oracle


@pytest.fixture(scope="module")
def series():
    return run_scenario(default_scenario())


def test_default_scenario_shape(series):
    assert len(series) == 240
    assert list(series.timestamps) == list(range(240))
    # three distinct faults, overlapping somewhere
    assert series.labels[:, 1:].any(axis=0).all()
    assert (series.labels[:, 1:].sum(axis=1) >= 2).any()


def test_continual_scenario_shape():
    s = run_scenario(continual_scenario())
    assert len(s) == 480
    assert not s.labels[:, 1].any() and not s.labels[:, 2].any()
    assert s.labels[:, 3].any()
    # each filter event lasts at most a day
    runs, cur = [], 0
    for flag in s.labels[:, 3]:
        if flag:
            cur += 1
        elif cur:
            runs.append(cur)
            cur = 0
    assert runs and max(runs) <= 24


def test_no_faults_no_labels():
    s = run_scenario(SimConfig(duration_hours=50))
    assert not s.labels.any()


@pytest.mark.parametrize("n, w, expected", [(240, 36, 205), (240, 24, 217), (240, 48, 193), (10, 24, 0)])
def test_window_counts(n, w, expected):
    s = run_scenario(SimConfig(duration_hours=n))
    assert len(windows(s, w, 1)) == expected


@given(n=st.integers(1, 80), w=st.integers(2, 40), stride=st.integers(1, 5))
@settings(deadline=None, max_examples=40)
def test_window_latest_steps_by_stride(n, w, stride):
    s = TimeSeries(np.arange(n), np.zeros((n, 9)), np.zeros((n, 4), bool))
    views = windows(s, w, stride)
    if stride == 1:
        assert len(views) == max(0, n - w + 1)
    for a, b in zip(views, views[1:]):
        assert b.t - a.t == stride
    for v in views:
        assert len(v.history) == w
        assert v.history.record(w - 1) == v.latest


def test_window_arguments_validated(series):
    with pytest.raises(ValueError):
        windows(series, 1)
    with pytest.raises(ValueError):
        windows(series, 24, 0)


def test_stats_constant():
    s = channel_stats([5, 5, 5, 5])
    assert s.min == s.max == s.mean == s.median == 5
    assert s.std == 0 and s.trend is Trend.STABLE


def test_stats_ramp():
    s = channel_stats([1, 2, 3, 4])
    assert (s.mean, s.median, s.p25, s.p75) == (2.5, 2.5, 1.75, 3.25)
    assert s.trend is Trend.RISING


def test_stats_falling():
    assert channel_stats([9, 7, 4, 0.5]).trend is Trend.FALLING


def test_stats_match_sort_based_oracle():
    rng = np.random.default_rng(99)
    for _ in range(200):
        x = rng.normal(rng.uniform(-50, 50), rng.uniform(0.01, 20), size=int(rng.integers(2, 60)))
        got = channel_stats(x)
        want = stats_oracle(list(x))
        for k, v in want.items():
            assert getattr(got, k) == pytest.approx(v, abs=1e-9, rel=1e-9)
        assert got.min <= got.p25 <= got.median <= got.p75 <= got.max


def test_compute_stats_covers_all_channels(series):
    stats = compute_stats(windows(series, 24)[0])
    assert tuple(stats) == CHANNELS


# ---------------------------------------------------------------------------
# reference


def test_reference_segment_is_clean_prefix(series):
    ref = reference_segment(series)
    assert len(ref) == 72
    assert not ref.anomaly.any()


def test_reference_requires_minimum(series):
    with pytest.raises(DataValidationError):
        reference_segment(series, min_hours=100)


def test_make_reference_window(series):
    ref = make_reference(series, 36)
    assert ref.window.size == 36 and ref.window.t == 71


# ---------------------------------------------------------------------------
# rendering


@pytest.fixture(scope="module")
def view(series):
    return windows(series, 24)[50]


def test_render_statistics_only(view):
    blocks = render(view, compute_stats(view), Representation("stats"))
    assert blocks.sensor_data == "" and blocks.statistics
    assert blocks.reference_data == blocks.reference_statistics == ""


def test_render_both(series, view):
    ref = make_reference(series, 24)
    blocks = render(view, compute_stats(view), Representation("both", "both"), ref)
    assert blocks.sensor_data and blocks.statistics and blocks.reference_data and blocks.reference_statistics


def test_render_raw_table_layout(view):
    text = render(view, compute_stats(view), Representation("raw")).sensor_data
    lines = text.splitlines()
    assert lines[0] == "t," + ",".join(CHANNELS)
    assert len(lines) == 25
    first = lines[1].split(",")
    assert int(first[0]) == view.t - 23
    assert all(len(cell.split(".")[1]) == 2 for cell in first[1:])


def test_render_stats_lists_eight_descriptors(view):
    text = render(view, compute_stats(view), Representation("stats")).statistics
    lines = text.splitlines()
    assert len(lines) == 9
    for c, line in zip(CHANNELS, lines):
        assert line.startswith(c + ":")
        for key in ("min=", "max=", "mean=", "std=", "median=", "p25=", "p75=", "trend="):
            assert key in line


def test_reference_presence_must_match_mode(view):
    with pytest.raises(ValueError):
        render(view, compute_stats(view), Representation("stats", "raw"), None)


@settings(deadline=None, max_examples=30)
@given(
    cells=st.lists(st.integers(-5000, 5000), min_size=36, max_size=36),
    idx=st.integers(0, 35),
    bump=st.integers(1, 300),
    mode=st.sampled_from(["raw", "stats", "both"]),
)
def test_render_deterministic_and_injective(cells, idx, bump, mode):
    base = np.array(cells, float).reshape(4, 9) / 100  # values with two decimals
    other = base.copy()
    other.flat[idx] += bump / 100
    s1 = TimeSeries(np.arange(4), base, np.zeros((4, 4), bool))
    s2 = TimeSeries(np.arange(4), other, np.zeros((4, 4), bool))
    v1, v2 = WindowView(s1, 3, 4), WindowView(s2, 3, 4)
    rep = Representation(mode)
    r1 = render(v1, compute_stats(v1), rep)
    assert r1 == render(v1, compute_stats(v1), rep)
    if mode != "stats":
        assert r1 != render(v2, compute_stats(v2), rep)


# ---------------------------------------------------------------------------
# CSV


def test_csv_round_trip(series, tmp_path):
    path = tmp_path / "s.csv"
    export_csv(series, path)
    back = import_csv(path)
    assert back == series
    assert path.read_text().splitlines()[0] == ",".join(HEADER)


def test_csv_missing_column(series, tmp_path):
    path = tmp_path / "s.csv"
    export_csv(series.slice(0, 5), path)
    lines = path.read_text().splitlines()
    cut = [",".join(l.split(",")[:3] + l.split(",")[4:]) for l in lines]
    path.write_text("\n".join(cut))
    with pytest.raises(DataFormatError) as err:
        import_csv(path)
    assert err.value.line == 1 and "P_comp" in str(err.value)


def test_csv_non_monotonic_timestamps(series, tmp_path):
    path = tmp_path / "s.csv"
    export_csv(series.slice(0, 5), path)
    lines = path.read_text().splitlines()
    lines[3], lines[4] = lines[4], lines[3]
    path.write_text("\n".join(lines))
    with pytest.raises(DataValidationError) as err:
        import_csv(path)
    assert err.value.line == 4


def test_csv_bad_number_reports_line(series, tmp_path):
    path = tmp_path / "s.csv"
    export_csv(series.slice(0, 5), path)
    lines = path.read_text().splitlines()
    parts = lines[2].split(",")
    parts[2] = "warm"
    lines[2] = ",".join(parts)
    path.write_text("\n".join(lines))
    with pytest.raises(DataFormatError) as err:
        import_csv(path)
    assert err.value.line == 3


def test_csv_inconsistent_labels(series, tmp_path):
    path = tmp_path / "s.csv"
    export_csv(series.slice(0, 3), path)
    lines = path.read_text().splitlines()
    lines[1] = lines[1][: -len("0,0,0,0")] + "1,0,0,0"
    path.write_text("\n".join(lines))
    with pytest.raises(DataValidationError):
        import_csv(path)
