import itertools
from math import comb

import pytest

from loosecycle.connect import (ConnectRequest, ReservoirError, connect_all,
                                find_extendable_triples, link_pairs_in, min_link_into,
                                reservoir_bound, reservoir_select, triple_bound_report)
from loosecycle.gen import random_implicit
from loosecycle.hgraph import InvalidQueryError, complete, empty
from loosecycle.walks import ends, validate_path


def check_paths(H, req, out):
    assert out.ok
    used = set()
    for (X, Y), T in zip(req.pairs, out.paths):
        validate_path(H, T.seq, req.ell)
        assert ends(T).head == X and ends(T).tail == Y
        assert 1 <= T.size <= 4
        inner = T.vertices - set(X) - set(Y)
        assert inner <= set(req.R)
        assert not T.vertices & used
        used |= T.vertices


def test_complete_4_1_two_pairs():
    H = complete(40, 4)
    req = ConnectRequest.make([((0,), (1,)), ((2,), (3,))], range(20, 40))
    check_paths(H, req, connect_all(H, req))


def test_6_2_single_edge():
    H = complete(40, 6)
    req = ConnectRequest.make([((0, 1), (2, 3)), ((4, 5), (6, 7))], range(8, 40))
    out = connect_all(H, req)
    check_paths(H, req, out)
    assert [T.size for T in out.paths] == [1, 1]
    assert len(out.paths[0].seq) == 6


def test_5_2_gadget_intersections():
    H = complete(40, 5)
    req = ConnectRequest.make([((0, 1), (2, 3))], range(4, 40))
    out = connect_all(H, req)
    check_paths(H, req, out)
    T = out.paths[0]
    assert T.size == 4
    E = [set(e) for e in itertools.islice((T.seq[i:i + 5] for i in range(0, 13, 3)), 4)]
    assert all(len(a & b) == 2 for a, b in zip(E, E[1:]))


def test_failure_names_pair_and_stage():
    H = empty(20, 5)
    out = connect_all(H, ConnectRequest.make([((0, 1), (2, 3))], range(4, 20)))
    assert not out.ok
    assert out.failure.pair_index == 0
    assert out.failure.stage
    out = connect_all(empty(20, 4), ConnectRequest.make([((0,), (1,))], range(2, 20)))
    assert not out.ok


def test_request_validation():
    with pytest.raises(InvalidQueryError):
        ConnectRequest.make([((0, 1), (1, 2))], range(3, 9))
    with pytest.raises(InvalidQueryError):
        ConnectRequest.make([((0,), (1, 2))], range(3, 9))
    with pytest.raises(InvalidQueryError):
        ConnectRequest.make([((0,), (1,))], range(3, 9), eta=0)


def test_triples_complete_all_qualify():
    H = complete(14, 5)
    R = range(4, 14)
    got = list(find_extendable_triples(H, (0, 1), (2, 3), R))
    assert len(got) == 10 * 9 * 8


def test_triples_empty():
    assert list(find_extendable_triples(empty(14, 5), (0, 1), (2, 3), range(4, 14))) == []


def test_triple_bound_on_random():
    H = random_implicit(64, 5, 0.5, seed=11)
    rep = triple_bound_report(H, (0, 1), (2, 3), range(4, 64), eta=0.3)
    assert rep.min_count > 0
    assert rep.hypothesis and rep.ok
    assert rep.min_count >= (0.3 * 60 / 8) ** 2


def test_reservoir_complete_accepts_first_sample():
    res = reservoir_select(complete(60, 4), 0.5, 1.0, m=1, seed=4)
    assert res.attempts == 1 and len(res.R) == 30


def test_reservoir_empty_fails():
    with pytest.raises(ReservoirError):
        reservoir_select(empty(30, 4), 0.5, 0.5, m=1, retries=5)


def test_reservoir_size_bound_enforced_on_request():
    with pytest.raises(ReservoirError):
        reservoir_select(complete(30, 4), 0.5, 1.0, m=2, enforce_size=True)
    assert reservoir_bound(4, 2, 1.0) == 256


def test_reservoir_dense_random_accepts_and_verifies():
    H = random_implicit(60, 4, 0.7, seed=2).materialize()
    for seed in range(20):
        res = reservoir_select(H, 0.4, 0.3, m=1, seed=seed, retries=10)
        assert res.attempts <= 10
        low = min(link_pairs_in(H, K, res.R) for K in itertools.combinations(range(60), 2))
        assert low == res.min_link >= 0.15 * comb(len(res.R), 2)


def test_min_link_explicit_matches_implicit():
    I = random_implicit(16, 4, 0.6, seed=1)
    E = I.materialize()
    R = list(range(0, 16, 2))
    assert min_link_into(I, R) == min_link_into(E, R)
