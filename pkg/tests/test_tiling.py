from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from loosecycle.gen import cherry, extremal_example, extremality_check, random_implicit
from loosecycle.hgraph import Hypergraph, InvalidQueryError, complete, empty
from loosecycle.tiling import (HomTiling, building_block, cherry_edges, edge_mass,
                               fractional_extremality, improvement_moves, max_tiling_lp,
                               parse_tiling, tiling_validate)

import oracles

C = (0, 1, 2, 3, 4, 5)
C2 = (6, 7, 8, 9, 10, 11)
BASE = [(0, 1, 2, 3), (2, 3, 4, 5), (6, 7, 8, 9), (8, 9, 10, 11)]


def move_fixture(link, extra=(), w=F(1, 2)):
    """Two cherries C, C2 and K = {12, 13} whose link between them is ``link``."""
    R = Hypergraph(14, 4, BASE + [tuple(sorted((12, 13) + p)) for p in link] + list(extra))
    return R, HomTiling.build(4, 1, F(1, 2), [(C, w), (C2, w)])


MATCHING = [(0, 6), (1, 7), (4, 10)]
FOUR = [(0, 6), (0, 7), (1, 8), (1, 9)]
STAR = [(0, j) for j in C2] + [(i, 6) for i in C[1:]]


def test_cherry_edges_positions():
    assert cherry_edges(C, 4, 1) == ((0, 1, 2, 3), (2, 3, 4, 5))
    assert cherry_edges((0, 1, 2, 3, 4, 5, 6, 7), 5, 1) == ((0, 1, 2, 3, 4), (3, 4, 5, 6, 7))


def test_skewed_block():
    h = building_block((0, 1, 2, 3), 1, 1)
    assert h.beta == F(1, 4)
    assert h.loads(4) == [1, 1, F(1, 2), F(1, 2)]
    assert tiling_validate(complete(4, 4), h).ok


def test_even_block():
    h = building_block((0, 1, 2, 3), 1, 1, "even")
    assert h.beta == F(1, 6)
    assert h.loads(4) == [1, 1, 1, 1]
    assert tiling_validate(complete(4, 4), h).ok


@pytest.mark.parametrize("k, ell", [(4, 1), (5, 1), (5, 2), (6, 2), (7, 2), (7, 3)])
@pytest.mark.parametrize("q", [F(1), F(1, 3)])
def test_skewed_block_sum(k, ell, q):
    h = building_block(range(k), ell, q)
    loads = h.loads(k)
    assert loads[:k - 2] == [q] * (k - 2)
    assert loads[k - 2:] == [q * F(k - 2, 2 * (k - ell - 1))] * 2
    assert h.weight == F((k - 2) * (k - ell), k - ell - 1) * q
    assert tiling_validate(complete(k, k), h).ok


def test_validate_cases():
    R = complete(8, 4)
    assert tiling_validate(R, HomTiling(4, 1, F(1, 4), ())).weight == 0
    two = building_block((0, 1, 2, 3), 1, 1) + building_block((4, 5, 6, 7), 1, 1)
    assert tiling_validate(R, two).ok
    clash = building_block((0, 1, 2, 3), 1, 1) + building_block((0, 4, 5, 6), 1, 1)
    rep = tiling_validate(R, clash)
    assert not rep.ok and rep.vertex == 0


def test_validate_rejects_non_edges_and_granularity():
    R = Hypergraph(6, 4, [(0, 1, 2, 3)])
    rep = tiling_validate(R, HomTiling.build(4, 1, F(1, 4), [(C, F(1, 4))]))
    assert not rep.ok and "not an edge" in rep.violation
    bad = HomTiling.build(4, 1, F(1, 4), [((0, 1, 2, 3, 0, 1), F(1, 3))])
    assert "multiple" in tiling_validate(complete(6, 4), bad).violation


def test_tiling_text_round_trip():
    h = building_block((0, 1, 2, 3), 1, 1) + building_block((4, 5, 6, 7), 1, F(1, 2))
    h = h.with_beta(F(1, 8))
    h2, t = parse_tiling(h.to_text(8))
    assert t == 8 and h2 == h


def test_lp_on_single_cherry_matches_oracle():
    R = cherry(4, 1)
    res = max_tiling_lp(R, 1, F(1, 4))
    assert res.fractional == pytest.approx(oracles.cherry_lp_value(R, 1))
    assert res.rounded == 6
    assert tiling_validate(R, res.tiling).ok


def test_lp_empty():
    res = max_tiling_lp(empty(8, 4), 1, F(1, 16))
    assert res.rounded == 0 and res.fractional == 0


def test_lp_refused_above_cap():
    with pytest.raises(InvalidQueryError):
        max_tiling_lp(complete(17, 4), 1, F(1, 16))


@settings(max_examples=8)
@given(st.integers(0, 1000), st.floats(0.3, 0.9))
def test_lp_bounds_on_random(seed, p):
    R = random_implicit(7, 4, p, seed).materialize()
    beta = F(1, 8)
    res = max_tiling_lp(R, 1, beta)
    assert tiling_validate(R, res.tiling).ok
    assert res.fractional + 1e-9 >= float(res.rounded)
    assert float(res.rounded) >= res.fractional - 7 * float(beta) * 6 - 1e-9
    assert res.fractional == pytest.approx(oracles.cherry_lp_value(R, 1), abs=1e-7)


def test_move_a_three_matching():
    R, h = move_fixture(MATCHING)
    r = improvement_moves(R, h, moves=("a",), use_padding=False)
    assert r.kind == "three-matching" and r.K == (12, 13)
    k, ell = 4, 1
    assert r.gain == (k - 2 - F((4 * k - 4 * ell - 6) * (k - 2), 6 * (k - ell - 1))) * h.beta
    assert tiling_validate(R, r.tiling).ok


def test_move_b_four_neighbours():
    R, h = move_fixture(FOUR)
    assert improvement_moves(R, h, moves=("a",), use_padding=False) is None
    r = improvement_moves(R, h, moves=("b",), use_padding=False)
    assert r.kind == "four-neighbours" and r.gain == F(3, 8)
    assert tiling_validate(R, r.tiling).ok


def test_move_c_weight_shift():
    R, h = move_fixture(STAR, [(2, 3, 8, 9)], w=F(1))
    assert improvement_moves(R, h, moves=("a", "b")) is None
    r = improvement_moves(R, h, moves=("c",))
    assert r.kind == "weight-shift" and r.gain == F(2, 5)
    assert r.detail["special"] == (0, 0)
    assert tiling_validate(R, r.tiling).ok


def test_move_from_empty_tiling():
    r = improvement_moves(complete(8, 4), HomTiling(4, 1, F(1, 4), ()))
    assert r is not None and r.kind == "three-matching" and r.gain > 0


def test_no_move_without_link():
    R, h = move_fixture([])
    assert improvement_moves(R, h, use_padding=False) is None


@pytest.mark.parametrize("link, extra, w, moves", [
    (MATCHING, (), F(1, 2), ("a",)), (FOUR, (), F(1, 2), ("b",)),
    (STAR, [(2, 3, 8, 9)], F(1), ("c",)), (MATCHING, (), F(1, 2), ("a", "b", "c"))])
def test_moves_leave_other_vertices_alone(link, extra, w, moves):
    R, h = move_fixture(link, extra, w)
    r = improvement_moves(R, h, moves=moves)
    before, after = h.loads(14), r.tiling.loads(14)
    touched = set(r.K) | set(r.cherries[0]) | set(r.cherries[1])
    assert all(after[v] >= before[v] for v in range(14) if v not in touched)
    assert max(after) <= 1


def test_binary_extremality_examples():
    R = extremal_example(12, 4, 1)
    b = fractional_extremality(R, 1, F(1, 4), F(1, 5))
    assert b is not None and b.b[0] == 0 and sum(b.b) == 10
    assert fractional_extremality(complete(10, 4), 1, F(1, 4), F(1, 100)) is None
    assert fractional_extremality(complete(10, 4), 1, F(1, 4), 1) is not None


@pytest.mark.parametrize("t", [6, 12])
@pytest.mark.parametrize("seed", range(4))
def test_binary_agrees_with_gen(t, seed):
    R = random_implicit(t, 4, 0.5, seed).materialize()
    for xi in (F(1, 20), F(1, 10), F(1, 4)):
        w = fractional_extremality(R, 1, F(1, 4), xi)
        assert (w is not None) == (extremality_check(R, 1, xi).extremal == "yes")


def test_continuous_extremality_finds_planted_witness():
    R = extremal_example(12, 4, 1)
    w = fractional_extremality(R, 1, F(1, 4), F(1, 5), mode="continuous", restarts=5,
                               iterations=60)
    assert w is not None
    assert w.mass >= 10 - 1e-9
    assert w.edge_mass == pytest.approx(edge_mass(R, w.b))
    assert all(x == 0 or 0.25 - 1e-12 <= x <= 1 for x in w.b)
