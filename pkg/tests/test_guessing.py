import json
import math
from itertools import permutations

import numpy as np
import pytest

from hintlock.guessing import (
    GuessingFunction,
    arikan_bounds,
    ceil_moment,
    encoder_guess_moment,
    guess_moment,
    optimal_guess_moment,
    optimal_guesser,
    random_joint,
    side_info_encoder,
    side_info_lower_bound,
    stochastic_side_info_moment,
)
from hintlock.prob import JointPmf, Pmf


def test_optimal_guesser_tie_break_and_order():
    j = JointPmf.from_marginal(Pmf.uniform(4))
    g = optimal_guesser(j)
    assert g.ranks[0] == (1, 2, 3, 4)
    j2 = JointPmf.from_marginal(Pmf.of([0.5, 0.3, 0.2]))
    assert optimal_guesser(j2).ranks[0] == (1, 2, 3)
    j3 = JointPmf.from_marginal(Pmf.of([0.2, 0.5, 0.3]))
    assert optimal_guesser(j3).ranks[0] == (3, 1, 2)


def test_zero_posterior_ranks_after_positive():
    j = JointPmf.from_marginal(Pmf.of([0.0, 0.6, 0.0, 0.4]))
    assert optimal_guesser(j).ranks[0] == (3, 1, 4, 2)


def test_guess_moment_examples():
    j = JointPmf.from_marginal(Pmf.uniform(4))
    g = optimal_guesser(j)
    assert guess_moment(g, j, 1.0) == pytest.approx(2.5)
    assert guess_moment(g, j, 2.0) == pytest.approx(7.5)
    det = JointPmf.of([[0.5, 0.0], [0.0, 0.5]])
    assert optimal_guess_moment(det, 1.0) == pytest.approx(1.0)


def test_arikan_bound_examples():
    j = JointPmf.from_marginal(Pmf.uniform(4))
    lo, hi = arikan_bounds(j, 1.0)
    assert hi == pytest.approx(4.0)
    assert lo == pytest.approx(4 / (1 + math.log(4)))
    assert lo <= 2.5 <= hi
    det = JointPmf.of([[0.5, 0.0], [0.0, 0.5]])
    lo, hi = arikan_bounds(det, 1.0)
    assert lo == pytest.approx(1.0, abs=1e-12) and hi == pytest.approx(1.0, abs=1e-12)
    skew = JointPmf.from_marginal(Pmf.of([0.5, 0.25, 0.25]))
    _, hi = arikan_bounds(skew, 1.0)
    assert hi == pytest.approx(2 ** 1.5431066063272239, rel=1e-9)
    moment = optimal_guess_moment(skew, 1.0)
    assert moment == pytest.approx(1.75)
    assert moment <= hi


def test_sandwich_on_random_joints():
    rng = np.random.default_rng(42)
    for _ in range(50):
        j = random_joint(rng, int(rng.integers(2, 8)), int(rng.integers(1, 5)))
        for rho in (0.5, 1.0, 2.0):
            lo, hi = arikan_bounds(j, rho)
            opt = optimal_guess_moment(j, rho)
            assert lo - 1e-9 <= opt <= hi + 1e-9


def test_optimal_beats_random_permutations():
    rng = np.random.default_rng(2024)
    for _ in range(30):
        nx, nc = int(rng.integers(2, 8)), int(rng.integers(1, 5))
        j = random_joint(rng, nx, nc)
        for rho in (0.5, 1.0, 2.0):
            opt = optimal_guess_moment(j, rho)
            for _ in range(60):
                rows = []
                for _ in range(nc):
                    perm = rng.permutation(nx) + 1
                    rows.append(tuple(int(v) for v in perm))
                g = GuessingFunction(j.x_alphabet, j.y_alphabet, tuple(rows))
                assert guess_moment(g, j, rho) >= opt - 1e-12


def test_side_info_encoder_examples():
    j = JointPmf.from_marginal(Pmf.uniform(4))
    # z_count=1: constant map, moment unchanged
    enc1 = side_info_encoder(j, 1)
    assert set(enc1.values()) == {0}
    assert encoder_guess_moment(j, enc1, 1.0) == pytest.approx(2.5)
    # z_count=2: ceil moment 1.5 attained exactly
    enc2 = side_info_encoder(j, 2)
    assert ceil_moment(j, 2, 1.0) == pytest.approx(1.5)
    assert encoder_guess_moment(j, enc2, 1.0) == pytest.approx(1.5, abs=1e-12)
    # z_count=|X|: every symbol first-guessed
    enc4 = side_info_encoder(j, 4)
    assert encoder_guess_moment(j, enc4, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_side_info_floor_examples():
    j = JointPmf.from_marginal(Pmf.uniform(4))
    assert side_info_lower_bound(j, 2, 1.0) == pytest.approx(1.25)
    assert side_info_lower_bound(j, 4, 1.0) == pytest.approx(1.0)
    assert side_info_lower_bound(j, 1, 1.0) == pytest.approx(2.5)
    assert encoder_guess_moment(j, side_info_encoder(j, 2), 1.0) >= 1.25


def test_constructed_encoder_beats_random_z_laws():
    rng = np.random.default_rng(99)
    for _ in range(10):
        nx, nc = int(rng.integers(3, 7)), int(rng.integers(1, 4))
        j = random_joint(rng, nx, nc)
        for z, rho in ((2, 1.0), (3, 2.0)):
            achieved = encoder_guess_moment(j, side_info_encoder(j, z), rho)
            assert achieved == pytest.approx(ceil_moment(j, z, rho), abs=1e-12)
            for _ in range(50):
                rows = rng.dirichlet(np.ones(z), size=(nx, nc))
                assert stochastic_side_info_moment(j, rows, rho) >= achieved - 1e-9


def test_equiv_exponential_bound():
    # constructed-encoder moment < 1 + 2^(rho (H - log|Z| + 1))
    rng = np.random.default_rng(5)
    from hintlock.prob import RenyiOrder, renyi_cond_entropy

    for _ in range(20):
        j = random_joint(rng, int(rng.integers(2, 7)), int(rng.integers(1, 4)))
        for rho in (0.5, 1.0, 2.0):
            h = renyi_cond_entropy(j, RenyiOrder.from_rho(rho))
            for z in (2, 3, 5):
                achieved = encoder_guess_moment(j, side_info_encoder(j, z), rho)
                assert achieved < 1 + 2 ** (rho * (h - math.log2(z) + 1))


def test_serialization():
    j = JointPmf.from_marginal(Pmf.of([0.2, 0.5, 0.3]))
    g = optimal_guesser(j)
    doc = json.loads(g.to_json())
    assert doc["0"] == [1, 2, 0]
    assert g.order(0) == (1, 2, 0)


def test_rank_table_validation():
    with pytest.raises(Exception):
        GuessingFunction((0, 1), (0,), ((1, 1),))
