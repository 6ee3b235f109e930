import math

import numpy as np
import pytest

import blip


def test_two_group_relaxation():
    x, obj = blip.solve_relaxed([0.8, 0.45], [[(0, 0.2), (1, 0.1)], [(0, 1.0), (1, 1.0)]], [0.15, 1.0])
    assert x == pytest.approx([0.5, 0.5], abs=1e-8)
    assert obj == pytest.approx(0.625, abs=1e-12)


def test_susie_aggregation_and_local_fdr():
    alpha = np.tile([0.5, 0.5, 0.0, 0.0], (4, 1))
    groups = [blip.index_group([0]), blip.index_group([1]), blip.index_group([0, 1])]
    groups = blip.pips_from_susie(alpha, groups)
    assert [g.pip for g in groups] == pytest.approx([0.9375, 0.9375, 1.0])
    det = blip.run_blip(groups, error="local-fdr", level=0.1)
    assert sorted(tuple(g.indices) for g in det.groups) == [(0,), (1,)]
    assert det.certified()


def test_pips_from_samples_counts():
    groups = blip.contiguous_groups([0, 1, 2], 2)
    assert len(groups) == 5
    out = blip.pips_from_samples([[0], [0, 2], [], [1]], groups)
    by = {tuple(g.indices): g.pip for g in out}
    assert by[(0,)] == 0.5
    assert by[(1, 2)] == 0.5
    assert by[(0, 1)] == 0.75


def test_end_to_end_regression():
    X = blip.gen_ark_design(80, 20, 3, seed=1)
    y, beta, signals = blip.gen_sparse_glm(X, 0.1, tau2=4.0, seed=2)
    assert len(signals) == 2
    rows, chains = blip.lss_gibbs(X, y, n_iter=300, burn_in=50, chains=2, seed=3)
    assert len(rows) == 500 and sorted(set(chains)) == [0, 1]
    groups = blip.pips_from_samples(rows, blip.contiguous_groups(list(range(20)), 4))
    det = blip.run_blip(groups, error="fdr", level=0.1)
    assert det.objective <= det.upper_bound + 1e-6
    assert det.certified()
    metrics = blip.evaluate(det, signals)
    assert 0.0 <= metrics["fdp"] <= 1.0


def test_truncated_normal_tail():
    draws = blip.sample_truncated_normal(0.0, 1.0, 8.0, math.inf, n=20000, seed=5)
    assert min(draws) >= 8.0
    assert abs(np.mean(draws) - 8.1176) < 0.02


def test_validation_errors_surface():
    with pytest.raises(ValueError):
        blip.sample_truncated_normal(0.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        blip.changepoint_design(1)


def test_groups_roundtrip():
    groups = blip.contiguous_groups([3, 4, 5], 3)
    text = blip.groups_to_jsonl(groups)
    back = blip.groups_from_jsonl(text)
    assert [g.id for g in back] == [g.id for g in groups]
    assert blip.groups_to_jsonl(back) == text
