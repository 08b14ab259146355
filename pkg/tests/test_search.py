"""Tests for the experiment harness: solve-all, estimates, searches."""

from dataclasses import replace

import numpy as np
import pytest

from homsearch.oracle import univariate_roots
from homsearch.projective import condition_mu, riemann_distance
from homsearch.rng import substream
from homsearch.search import (
    ExperimentConfig,
    estimate_avg_steps,
    one_root_experiment,
    screen_by_avg_steps,
    screen_by_condition,
    solve_all,
)
from homsearch.start_systems import (
    fekete_quartic,
    sample_sphere,
    total_degree,
)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(degrees=(4,), mode="nope", seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(degrees=(4,), mode="one_root", seed=0, tracker="fastest")
    with pytest.raises(ValueError):
        ExperimentConfig(degrees=(2, 2), mode="by_condition", seed=0, include_fekete=True)
    with pytest.raises(ValueError):
        ExperimentConfig(degrees=(4,), mode="by_condition", seed=0, num_targets=0)


def test_solve_all_identity_start():
    # target equals the start family: the seeded rotation makes T > 0
    pair = total_degree((4,), 1.0)
    roots = solve_all(pair.g, "certified", seed=9)
    assert len(roots) == 4
    for expected in pair.starts:
        assert any(riemann_distance(z, expected) <= 1e-10 for z in roots)


def test_solve_all_matches_companion_oracle():
    f = sample_sphere((4,), substream(601))
    roots = solve_all(f)
    oracle = univariate_roots(f.polys[0])
    for z in roots:
        assert any(riemann_distance(z, w) <= 1e-8 for w in oracle.roots)


def test_solve_all_quadric_pairs_root_count():
    for i in range(10):
        f = sample_sphere((2, 2), substream(602, i))
        assert len(solve_all(f)) == 4


def test_solve_all_rejects_bad_tracker():
    f = sample_sphere((2,), substream(603))
    with pytest.raises(ValueError):
        solve_all(f, "fastest")


def test_estimate_avg_steps_seed_stability():
    pair = fekete_quartic()
    a = estimate_avg_steps(pair, 30, "certified", seed=1)
    b = estimate_avg_steps(pair, 30, "certified", seed=2)
    assert a.num_failed_targets == 0
    # different seeds agree within 3 joint standard errors
    gap = abs(a.mean - b.mean)
    assert gap <= 3 * (a.stderr**2 + b.stderr**2) ** 0.5


def test_estimate_avg_steps_worker_independence():
    pair = fekete_quartic()
    a = estimate_avg_steps(pair, 12, "certified", seed=5, workers=1)
    b = estimate_avg_steps(pair, 12, "certified", seed=5, workers=2)
    assert a == b


def test_estimate_flag_threshold():
    pair = fekete_quartic()
    est = estimate_avg_steps(pair, 10, "certified", seed=3)
    assert not est.flagged


def test_one_root_ordering_small():
    config = ExperimentConfig(degrees=(2, 2), mode="one_root", seed=11, num_targets=40)
    report = one_root_experiment(config)
    stats = report.one_root["certified"]
    assert stats["good"].mean < stats["total"].mean < stats["random"].mean
    for kind in ("good", "total", "random"):
        assert np.isfinite(stats[kind].mean) and stats[kind].mean > 0
    # the random pair adds a sampling source, so its spread dominates
    assert stats["random"].stderr == max(s.stderr for s in stats.values())


def test_one_root_worker_independence():
    config = ExperimentConfig(degrees=(2,), mode="one_root", seed=12, num_targets=10)
    r1 = one_root_experiment(config)
    r2 = one_root_experiment(replace(config, workers=2))
    assert r1.one_root == r2.one_root


def test_screen_by_condition_structure():
    config = ExperimentConfig(
        degrees=(4,), mode="by_condition", seed=13,
        num_candidates=40, keep=3, num_targets=15, include_fekete=True,
    )
    report = screen_by_condition(config)
    assert len(report.candidates) == 3
    mus = [c.mu for c in report.candidates]
    assert mus == sorted(mus)
    for c in report.candidates:
        assert len(c.per_root_mu) == 4
        assert c.mu == max(c.per_root_mu)
        assert c.avg_steps_certified is not None
        # keeper conditioning was computed from its own root set
        roots = solve_all(c.system)
        recomputed = max(condition_mu(c.system, z) for z in roots)
        assert recomputed == pytest.approx(c.mu, rel=1e-9)
    ids = [c.system_id for c in report.constructed]
    assert "g_total(r=1)" in ids and "g_Fekete" in ids
    # optimal radius for one quartic equals 1: no duplicate r* row
    assert len([i for i in ids if i.startswith("g_total")]) == 1
    assert any("coincides" in note for note in report.notes)


def test_screen_keepers_beat_discards():
    config = ExperimentConfig(
        degrees=(2,), mode="by_condition", seed=14,
        num_candidates=25, keep=2, num_targets=8,
        include_total_r1=False, include_total_ropt=False,
    )
    report = screen_by_condition(config)
    worst_keeper = report.candidates[-1].mu
    # recompute all candidate mus independently
    all_mus = []
    from homsearch.rng import DOMAIN_CANDIDATE

    for i in range(config.num_candidates):
        g = sample_sphere((2,), substream(14, DOMAIN_CANDIDATE, i))
        roots = solve_all(g)
        all_mus.append(max(condition_mu(g, z) for z in roots))
    assert worst_keeper <= min(sorted(all_mus)[config.keep :])


@pytest.mark.slow
def test_screen_by_avg_steps_orders_by_pilot():
    config = ExperimentConfig(
        degrees=(4,), mode="by_avg_steps", seed=15,
        num_candidates=12, keep=3, num_targets=30, pilot_targets=12,
        include_total_ropt=False,
    )
    report = screen_by_avg_steps(config)
    pilots = [c.pilot_mean for c in report.candidates]
    assert pilots == sorted(pilots)
    assert all(c.avg_steps_certified is not None for c in report.candidates)
    total_row = [c for c in report.constructed if c.system_id == "g_total(r=1)"][0]
    best = report.candidates[0]
    assert best.avg_steps_certified.mean < total_row.avg_steps_certified.mean


@pytest.mark.slow
def test_pilot_ranking_stability():
    # pilot and final estimates agree on the best keeper in most repeats
    hits = 0
    repeats = 5
    for rep in range(repeats):
        config = ExperimentConfig(
            degrees=(4,), mode="by_avg_steps", seed=100 + rep,
            num_candidates=8, keep=3, num_targets=40, pilot_targets=15,
            include_total_r1=False, include_total_ropt=False,
        )
        report = screen_by_avg_steps(config)
        by_pilot = report.candidates[0]
        by_final = min(report.candidates, key=lambda c: c.avg_steps_certified.mean)
        hits += by_pilot.system_id == by_final.system_id
    assert hits >= 0.6 * repeats


def test_fekete_certified_estimate_matches_direct_run():
    pair = fekete_quartic()
    est = estimate_avg_steps(pair, 25, "certified", seed=21)
    assert est.num_targets == 25
    assert est.mean > 0 and np.isfinite(est.stderr)
