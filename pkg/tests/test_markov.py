import math

import numpy as np
import pytest

from entdyn.bipartition_markov import (
    markov_report,
    monte_carlo_occupation,
    second_eigenvalue_modulus,
    stationary_distribution,
    swap_action,
    transition_matrix,
    verify_ergodicity,
)
from entdyn.entanglement import Bipartition
from entdyn.errors import ParameterError


def test_swap_action_interior_bond_is_identity():
    bp = Bipartition.from_sites(6, (1, 2, 3))
    assert swap_action(bp, 1).sites == bp.sites  # both ends inside A
    assert swap_action(bp, 4).sites == bp.sites  # both ends outside A


def test_swap_action_straddling_bond_moves_cut():
    bp = Bipartition.from_sites(6, (1, 2, 3))
    out = swap_action(bp, 3)
    assert out.sites == (1, 2, 4)


def test_swap_action_canonicalizes():
    # swapping site 1 out produces a set without site 1; the canonical
    # representative is the complement
    bp = Bipartition.from_sites(4, (1, 3))
    out = swap_action(bp, 1)
    assert 1 in out.sites


def test_transition_matrix_l4_exact():
    tm = transition_matrix(4)
    expected = np.array(
        [
            [2 / 3, 1 / 3, 0.0],
            [1 / 3, 0.0, 2 / 3],
            [0.0, 2 / 3, 1 / 3],
        ]
    )
    assert tm.n == 3
    assert [bp.sites for bp in tm.states] == [(1, 2), (1, 3), (1, 4)]
    assert np.max(np.abs(tm.P - expected)) < 1e-15


def test_transition_matrix_stochastic_and_symmetric():
    for L in (4, 6, 8, 10):
        tm = transition_matrix(L)
        assert tm.n == math.comb(L, L // 2) // 2
        assert np.max(np.abs(tm.P - tm.P.T)) < 1e-14
        assert np.max(np.abs(tm.P.sum(axis=0) - 1.0)) < 1e-14
        assert np.max(np.abs(tm.P.sum(axis=1) - 1.0)) < 1e-14


def test_transition_matrix_rejects_degenerate_sizes():
    with pytest.raises(ParameterError):
        transition_matrix(2)  # single-state chain
    with pytest.raises(ParameterError):
        transition_matrix(5)


def test_stationary_uniform():
    for L in (4, 6, 8):
        tm = transition_matrix(L)
        pi = stationary_distribution(tm.P)
        assert np.max(np.abs(pi - 1.0 / tm.n)) < 1e-12


def test_ergodicity_report():
    rep = verify_ergodicity(transition_matrix(4))
    assert rep.irreducible
    assert rep.aperiodic
    assert rep.period == 1
    assert rep.has_self_loop
    rep8 = verify_ergodicity(transition_matrix(8))
    assert rep8.irreducible and rep8.aperiodic


def test_l4_middle_state_has_no_self_loop():
    tm = transition_matrix(4)
    i = tm.index_of(Bipartition.from_sites(4, (1, 3)))
    assert tm.P[i, i] == 0.0


def test_second_eigenvalue_modulus():
    tm = transition_matrix(4)
    slem = second_eigenvalue_modulus(tm.P)
    eigs = np.sort(np.abs(np.linalg.eigvals(tm.P)))[::-1]
    assert abs(slem - eigs[1]) < 1e-12
    assert slem < 1.0


def test_monte_carlo_occupation_converges():
    rng = np.random.default_rng(11)
    res = monte_carlo_occupation(4, 1_000_000, 10_000, rng)
    assert res.tv_distance < 0.01
    assert res.counts.sum() == 990_000


def test_monte_carlo_occupation_l8():
    rng = np.random.default_rng(12)
    res = monte_carlo_occupation(8, 10_000_000, 10_000, rng)
    assert res.tv_distance < 0.02


def test_monte_carlo_deterministic_per_seed():
    a = monte_carlo_occupation(6, 100_000, 1000, np.random.default_rng(3))
    b = monte_carlo_occupation(6, 100_000, 1000, np.random.default_rng(3))
    assert np.array_equal(a.counts, b.counts)
    assert a.tv_distance == b.tv_distance


def test_monte_carlo_validates():
    with pytest.raises(ParameterError):
        monte_carlo_occupation(4, 100, 100, np.random.default_rng(0))


def test_markov_report_keys():
    rep = markov_report(4, 200_000, 1000, np.random.default_rng(1))
    assert set(rep) == {
        "L",
        "N",
        "symmetric",
        "doubly_stochastic",
        "irreducible",
        "aperiodic",
        "slem",
        "tv_distance",
        "stationary",
    }
    assert rep["L"] == 4 and rep["N"] == 3
    assert rep["symmetric"] and rep["doubly_stochastic"]
    assert rep["irreducible"] and rep["aperiodic"]
    assert np.max(np.abs(np.array(rep["stationary"]) - 1 / 3)) < 1e-12
