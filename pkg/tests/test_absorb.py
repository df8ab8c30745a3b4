import pytest

from loosecycle.absorb import (absorbs_check, count_absorbers, find_absorber, split_sizes,
                               split_target)
from loosecycle.gen import extremal_example, random_implicit
from loosecycle.hgraph import Hypergraph, InvalidQueryError, complete, empty
from loosecycle.walks import ends, validate_path

import oracles


@pytest.mark.parametrize("k, ell, sizes", [(4, 1, (2, 1, 0)), (5, 2, (2, 2, 1)), (7, 3, (3, 3, 2))])
def test_split_examples(k, ell, sizes):
    sp = split_target(range(k - ell), k, ell)
    assert (sp.s1, sp.s2, sp.s3) == sizes
    assert set(sp.S1) | set(sp.S2) == set(range(k - ell))
    assert len(set(sp.S1) & set(sp.S2)) == sp.s3


def test_split_constraints_exhaustive():
    for k in range(4, 13):
        for ell in range(1, (k + 1) // 2):
            if 2 * ell >= k:
                continue
            opts = split_sizes(k, ell)
            assert opts, (k, ell)
            for s1, s2, s3 in opts:
                assert s1 + s2 - s3 == k - ell
                assert s1 >= s2 >= ell and s2 >= s1 - 1
                assert ell - s3 > 0


def test_split_wrong_size():
    with pytest.raises(InvalidQueryError):
        split_target((0, 1), 4, 1)


def test_absorber_in_complete():
    A = find_absorber(complete(20, 4), (17, 18, 19))
    assert A is not None
    assert len(A.P.vertices) == 10 == A.q
    assert all(A.check_invariants(complete(20, 4)).values())


def test_absorber_none_without_edges():
    assert find_absorber(empty(13, 4), (0, 1, 2)) is None


def test_absorber_respects_forbidden():
    A = find_absorber(complete(20, 4), (0, 1, 2), forbidden=range(3, 8))
    assert not A.P.vertices & set(range(3, 8))


def test_absorber_on_extremal_cross_validates():
    H = extremal_example(20, 4, 1)
    A = find_absorber(H, (10, 11, 12))
    if A is not None:
        assert all(A.check_invariants(H).values())
        Q = absorbs_check(H, A.P, A.S)
        assert Q is not None and ends(Q) == ends(A.P)


@pytest.mark.parametrize("k, ell, n", [(5, 2, 16), (7, 3, 24)])
def test_absorber_larger_uniformity(k, ell, n):
    H = complete(n, k)
    A = find_absorber(H, range(n - (k - ell), n), ell=ell)
    assert A is not None
    assert all(A.check_invariants(H).values())
    assert absorbs_check(H, A.P, A.S, cap=40) is not None


def test_absorbs_check_identity_and_refusals():
    H = complete(13, 4)
    A = find_absorber(H, (0, 1, 2))
    assert absorbs_check(H, A.P, ()) is A.P
    with pytest.raises(InvalidQueryError):
        absorbs_check(H, A.P, (0, 1))
    with pytest.raises(InvalidQueryError):
        absorbs_check(H, A.P, sorted(A.P.vertices)[:3])


def test_absorbs_check_returns_pprime_equivalent():
    H = complete(13, 4)
    A = find_absorber(H, (10, 11, 12))
    Q = absorbs_check(H, A.P, A.S)
    assert Q.vertices == A.Pprime.vertices
    assert ends(Q) == ends(A.P)
    validate_path(H, Q.seq, 1)


def test_absorbs_check_needs_extra_edges():
    H = complete(13, 4)
    A = find_absorber(H, (10, 11, 12))
    bare = Hypergraph(13, 4, A.P.edges)
    assert absorbs_check(bare, A.P, A.S) is None


def test_count_empty_and_complete():
    assert count_absorbers(empty(13, 4), (0, 1, 2)) == 0
    # frozen from the block-level counter; the ordered-path oracle agrees on sparse inputs
    assert count_absorbers(complete(13, 4), (0, 1, 2)) == 3628800


def test_count_matches_oracle():
    H = random_implicit(13, 4, 0.1, seed=3).materialize()
    assert count_absorbers(H, (0, 1, 2)) == oracles.count_absorbers(H, (0, 1, 2), 1) == 2160


def test_count_refused_above_cap():
    with pytest.raises(InvalidQueryError):
        count_absorbers(complete(14, 4), (0, 1, 2))


def test_count_density_ratio_single_point():
    # q + k - ell = 13 is also the cap, so the ratio sequence has one term
    q = 3 * 4 - 2
    ratios = [count_absorbers(complete(n, 4), range(3)) / n ** q for n in range(q + 3, 14)]
    assert ratios == sorted(ratios) and len(ratios) == 1
