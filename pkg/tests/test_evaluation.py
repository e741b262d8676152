import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlcloc.evaluation import (
    DEFAULT_THRESHOLDS,
    TABLE2_ORDER,
    EvalReport,
    ErrorSample,
    accuracy_curve,
    accuracy_rate,
    parse_csv,
    parse_markdown,
    ped,
    ped_array,
    render_report,
)

errors_st = st.lists(st.floats(0, 20, allow_nan=False), min_size=1, max_size=60)


def test_ped_examples():
    assert ped((1, 1), (1.3, 1.4)) == pytest.approx(0.5, abs=1e-12)
    assert ped((2, 2), (2, 2)) == 0.0
    assert ped((0, 0), (1, 1)) == pytest.approx(1.41421, abs=1e-5)
    assert ErrorSample((0, 0), (3, 4)).error == 5.0


def test_ped_array_matches_scalar():
    rng = np.random.default_rng(0)
    a, b = rng.uniform(0, 10, (20, 2)), rng.uniform(0, 10, (20, 2))
    assert np.allclose(ped_array(a, b), [ped(p, q) for p, q in zip(a, b)], rtol=0, atol=1e-12)


def test_accuracy_rate_examples():
    assert accuracy_rate([0.05, 0.2, 0.4], 0.3) == pytest.approx(2 / 3)
    assert accuracy_rate([0.01, 0.02], 0.3) == 1.0
    assert accuracy_rate([0.3], 0.3) == 0.0


def test_accuracy_rate_rejects_empty():
    with pytest.raises(ValueError):
        accuracy_rate([], 0.3)


def test_accuracy_curve_examples():
    assert len(accuracy_curve([0.2, 0.6])) == 5
    assert accuracy_curve([0.0]) == [1.0] * 5
    assert accuracy_curve([10.0]) == [0.0] * 5


def test_accuracy_curve_rejects_unsorted():
    with pytest.raises(ValueError):
        accuracy_curve([0.1], [0.3, 0.1])


@given(errors_st, st.randoms())
def test_accuracy_monotone_and_permutation_invariant(errors, rnd):
    row = accuracy_curve(errors, DEFAULT_THRESHOLDS)
    assert all(b >= a for a, b in zip(row, row[1:]))
    shuffled = errors[:]
    rnd.shuffle(shuffled)
    assert accuracy_curve(shuffled, DEFAULT_THRESHOLDS) == row


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_translation_leaves_ped_unchanged(dx, dy):
    rng = np.random.default_rng(1)
    p, t = rng.uniform(0, 10, (10, 2)), rng.uniform(0, 10, (10, 2))
    shift = np.array([dx, dy])
    assert np.allclose(ped_array(p + shift, t + shift), ped_array(p, t), atol=1e-9)


def full_report():
    rep = EvalReport()
    rng = np.random.default_rng(0)
    for m in TABLE2_ORDER:
        rep.add(m, rng.uniform(0, 1.2, 100))
    return rep


def test_full_report_layout():
    rep = full_report()
    csv_text = render_report(rep, "csv")
    lines = csv_text.strip().splitlines()
    assert lines[0] == "method,ped_0.1,ped_0.3,ped_0.5,ped_0.7,ped_0.9,n_samples"
    assert len(lines) == 12
    assert [ln.split(",")[0] for ln in lines[1:]] == list(TABLE2_ORDER)
    md = render_report(rep, "markdown")
    assert len([ln for ln in md.splitlines() if ln.startswith("|")]) == 13


def test_markdown_round_trip():
    rep = full_report()
    back = parse_markdown(render_report(rep, "markdown"))
    assert back.thresholds == rep.thresholds
    for m, row in rep.rows.items():
        assert back.rows[m] == [round(a, 3) for a in row]


def test_csv_round_trip():
    rep = full_report()
    back = parse_csv(render_report(rep, "csv"))
    assert back.n_samples == rep.n_samples
    assert back.rows == {m: [round(a, 3) for a in r] for m, r in rep.rows.items()}


def test_subset_report_keeps_header():
    rep = EvalReport()
    rep.add("WiFi with KNN", [0.2])
    rep.add("VLC-81 with SVM", [0.4])
    lines = render_report(rep, "csv").splitlines()
    assert lines[0].startswith("method,ped_0.1")
    assert [ln.split(",")[0] for ln in lines[1:]] == ["VLC-81 with SVM", "WiFi with KNN"]


def test_failed_rows_marked():
    rep = EvalReport()
    rep.add("VLC-81 with KNN", [0.0])
    rep.mark_failed("VLC-81 with SVM", "boom")
    text = render_report(rep, "markdown")
    assert "| VLC-81 with SVM | FAILED" in text


def test_custom_thresholds():
    rep = EvalReport(thresholds=[0.2, 0.4])
    rep.add("x", [0.1, 0.3])
    assert rep.rows["x"] == [0.5, 1.0]
    assert render_report(rep, "csv").splitlines()[0] == "method,ped_0.2,ped_0.4,n_samples"


def test_bad_format():
    with pytest.raises(ValueError):
        render_report(EvalReport(), "html")
