import random

import pytest
from hypothesis import given, strategies as st

from loosecycle.gen import extremal_example
from loosecycle.hgraph import complete
from loosecycle.walks import (ArityError, MissingEdgeError, WalkError, ends, format_walks,
                              parse_walk_line, validate, validate_cycle, validate_path)

import oracles


def test_complete_path_size():
    P = validate_path(complete(10, 4), range(10), 1)
    assert P.size == 3
    assert P.edges == [(0, 1, 2, 3), (3, 4, 5, 6), (6, 7, 8, 9)]


def test_path_arity_error():
    with pytest.raises(ArityError):
        validate_path(complete(11, 4), range(11), 1)


def test_missing_window_reported():
    H = extremal_example(12, 4, 1)
    with pytest.raises(MissingEdgeError) as err:
        validate_path(H, range(1, 8), 1)
    # both windows miss A = {0}; the first failing one is reported
    assert err.value.window == 0
    assert err.value.edge == (1, 2, 3, 4)
    assert not H.has_edge((4, 5, 6, 7))


def test_cycle_sizes_and_divisibility():
    C = validate_cycle(complete(12, 4), range(12), 1)
    assert C.size == 4
    assert C.edges[-1] == (0, 9, 10, 11)
    with pytest.raises(ArityError):
        validate_cycle(complete(10, 4), range(10), 1)


def test_repeated_vertex_and_bad_ell():
    H = complete(8, 4)
    with pytest.raises(WalkError):
        validate_path(H, [0, 1, 2, 0], 1)
    with pytest.raises(WalkError):
        validate_path(H, range(4), 4)


def test_ends():
    P = validate_path(complete(7, 4), [6, 5, 4, 3, 2, 1, 0], 1)
    assert ends(P).head == (6,)
    assert ends(P).tail == (0,)
    Q = validate_path(complete(8, 5), [0, 1, 2, 3, 4, 5, 6, 7], 2)
    assert ends(Q).head == (0, 1) and ends(Q).tail == (6, 7)
    with pytest.raises(WalkError):
        ends(validate_cycle(complete(6, 4), range(6), 1))


def test_walk_line_round_trip():
    P = validate(complete(7, 4), "path", range(7), 1)
    kind, ell, seq = parse_walk_line(format_walks([P]).strip())
    assert (kind, ell, seq) == ("path", 1, P.seq)
    with pytest.raises(WalkError):
        parse_walk_line("loop 1 0 1 2")


@st.composite
def cycle_case(draw):
    k = draw(st.integers(3, 6))
    ell = draw(st.integers(1, k - 1))
    step = k - ell
    lo = max(2, -(-k // step))
    m = draw(st.integers(lo, lo + 3))
    n = m * step
    perm = draw(st.permutations(range(n)))
    return complete(n, k), tuple(perm), ell


@given(cycle_case(), st.integers(0, 10))
def test_cycle_closed_under_rotation_and_reversal(case, r):
    H, seq, ell = case
    C = validate_cycle(H, seq, ell)
    for D in (C.rotated(r), C.reversed()):
        again = validate_cycle(H, D.seq, ell)
        assert sorted(again.edges) == sorted(C.edges)


@given(st.integers(0, 10_000))
def test_validator_matches_definition(seed):
    rng = random.Random(seed)
    k = rng.randint(3, 5)
    ell = rng.randint(1, k - 1)
    n = rng.randint(k, 11)
    H = complete(n, k) if rng.random() < 0.3 else extremal_example(n, k, min(ell, (k - 1) // 2))
    kind = rng.choice(["path", "cycle"])
    seq = rng.sample(range(n), rng.randint(1, n))
    try:
        validate(H, kind, seq, ell)
        ok = True
    except WalkError:
        ok = False
    assert ok == oracles.windows_ok(H, seq, ell, kind)
