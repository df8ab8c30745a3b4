from fractions import Fraction

from loosecycle.sweep import CSV_HEADER, plan, summary, summary_csv, sweep, threshold, to_csv


def test_threshold_value():
    assert threshold(4, 1) == Fraction(11, 36)


def test_plan_skips_bad_cells():
    jobs, skipped = plan([9, 10, 12, 45], [4], [1, 2], ["1/2"], [0])
    reasons = {(s.n, s.ell): s.reason for s in skipped}
    assert reasons[(10, 1)] == "indivisible"
    assert reasons[(9, 2)] == "not-loose"
    assert reasons[(45, 1)] == "over-cap"
    assert {(j.n, j.delta) for j in jobs} == {(9, "1/2"), (12, "1/2"), (9, "control:complete"),
                                            (9, "control:extremal"), (12, "control:complete"),
                                            (12, "control:extremal")}


def test_csv_shape_and_controls():
    rows, _ = sweep([9], [4], [1], ["0", "1"], [0, 1])
    text = to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 4 * 2
    by = {s["delta_fraction"]: s for s in summary(rows)}
    assert by["control:complete"]["fraction"] == 1
    assert by["control:extremal"]["fraction"] == 0
    assert by["1"]["fraction"] == 1
    assert all(r.millis == "" for r in rows)
    assert "11/36" in summary_csv(rows)


def test_timeouts_are_unknown():
    rows, _ = sweep([15], [4], [1], ["1/10"], [0], budget=5, controls=False)
    assert rows[0].hamiltonian == "unknown"
    assert summary(rows)[0]["fraction"] is None


def test_worker_count_does_not_change_output():
    args = ([9, 12], [4], [1], ["1/5", "2/5"], [0, 1, 2])
    assert to_csv(sweep(*args, workers=1)[0]) == to_csv(sweep(*args, workers=2)[0])


def test_timing_fills_millis():
    rows, _ = sweep([9], [4], [1], ["1"], [0], controls=False, timing=True)
    assert float(rows[0].millis) >= 0
