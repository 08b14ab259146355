"""Tests for the geodesic homotopy and both trackers."""

import math

import numpy as np
import pytest

from homsearch.errors import DegeneratePairError
from homsearch.polynomials import PolySystem, bw_inner_system, bw_norm
from homsearch.projective import newton_refine, riemann_distance
from homsearch.rng import substream
from homsearch.start_systems import (
    fekete_quartic,
    random_initial_pair,
    sample_sphere,
    total_degree,
)
from homsearch.tracking import (
    STEP_RULE_CONSTANT,
    HeuristicSettings,
    homotopy_at,
    homotopy_derivative_at,
    make_aligned_homotopy,
    make_linear_homotopy,
    path_length_c0,
    track_certified,
    track_heuristic,
    _track_certified_generic,
)


def _random_homotopy(degrees, seed):
    f = sample_sphere(degrees, substream(seed, 0))
    g = sample_sphere(degrees, substream(seed, 1))
    return make_linear_homotopy(f, g)


def test_homotopy_endpoints_and_unit_speed():
    H = _random_homotopy((2, 2), 501)
    h0 = homotopy_at(H, 0.0)
    assert h0 == H.g  # sin(0) contribution vanishes exactly
    hT = homotopy_at(H, H.T)
    for pa, pb in zip(hT.polys, H.f.polys):
        for key in set(pa.coeffs) | set(pb.coeffs):
            assert abs(pa.coefficient(key) - pb.coefficient(key)) < 1e-12
    for t in (0.0, H.T / 3, H.T / 2, H.T):
        assert bw_norm(homotopy_at(H, t)) == pytest.approx(1.0, abs=1e-12)
        assert bw_norm(homotopy_derivative_at(H, t)) == pytest.approx(1.0, abs=1e-12)
    assert bw_norm(H.w) == pytest.approx(1.0, abs=1e-12)
    assert bw_inner_system(H.g, H.w).real == pytest.approx(0.0, abs=1e-12)


def test_homotopy_position_velocity_orthogonal():
    H = _random_homotopy((3,), 502)
    assert homotopy_derivative_at(H, 0.0) == H.w
    for t in np.linspace(0.0, H.T, 7):
        h = homotopy_at(H, float(t))
        hdot = homotopy_derivative_at(H, float(t))
        assert bw_inner_system(h, hdot).real == pytest.approx(0.0, abs=1e-12)


def test_homotopy_orthogonal_pair_has_quarter_turn():
    f = sample_sphere((2,), substream(503, 0))
    g = sample_sphere((2,), substream(503, 1))
    c = bw_inner_system(f, g)
    # orthogonalize f against g in the real sense
    f_perp = PolySystem(
        (pf - c.real * pg) * (1.0 / math.sqrt(1 - c.real**2))
        for pf, pg in zip(f.polys, g.polys)
    )
    H = make_linear_homotopy(f_perp, g)
    assert H.T == pytest.approx(math.pi / 2, abs=1e-12)


def test_homotopy_rejects_bad_inputs():
    g = sample_sphere((2,), substream(504, 0))
    with pytest.raises(DegeneratePairError):
        make_linear_homotopy(g, g)
    anti = PolySystem(p * (-1.0) for p in g.polys)
    with pytest.raises(DegeneratePairError):
        make_linear_homotopy(anti, g)
    unnormalized = PolySystem(p * 2.0 for p in g.polys)
    with pytest.raises(ValueError):
        make_linear_homotopy(unnormalized, g)
    H = _random_homotopy((2,), 505)
    with pytest.raises(ValueError):
        homotopy_at(H, -0.1)
    with pytest.raises(ValueError):
        homotopy_at(H, H.T + 0.1)


def test_aligned_homotopy_minimal_arc():
    f = sample_sphere((2, 2), substream(506, 0))
    g = sample_sphere((2, 2), substream(506, 1))
    H = make_aligned_homotopy(f, g)
    c = bw_inner_system(f, g)
    assert H.T == pytest.approx(math.acos(abs(c)), abs=1e-12)
    assert H.T <= math.pi / 2 + 1e-12


def test_certified_step_rule_and_sum():
    pair = total_degree((4,), 1.0)
    f = sample_sphere((4,), substream(507))
    H = make_aligned_homotopy(f, pair.g)
    result = track_certified(H, pair.starts[0])
    assert result.status == "converged"
    assert result.num_steps == len(result.step_sizes)
    t = result.step_sizes
    phi = result.phi_trace
    d15 = 4**1.5
    # non-final steps sit exactly at the admissible upper endpoint
    np.testing.assert_allclose(t[:-1] * d15 * phi[:-1], STEP_RULE_CONSTANT, atol=1e-12)
    # every step is inside the admissible interval (final one truncated)
    assert np.all(t * d15 * phi <= STEP_RULE_CONSTANT * (1 + 1e-12))
    assert float(t.sum()) == pytest.approx(H.T, abs=1e-12)


def test_certified_random_quadrics_step_band():
    # single path from a random pair on two quadrics: order of magnitude
    pair = random_initial_pair((2, 2), substream(508))
    f = sample_sphere((2, 2), substream(509))
    H = make_aligned_homotopy(f, pair.g)
    result = track_certified(H, pair.starts[0])
    assert result.status == "converged"
    assert 300 <= result.num_steps <= 3000


def test_certified_endpoint_is_approximate_zero():
    pair = fekete_quartic()
    f = sample_sphere((4,), substream(510))
    H = make_aligned_homotopy(f, pair.g)
    result = track_certified(H, pair.starts[1])
    trace = newton_refine(H.f, result.endpoint, 3)
    # quadratic decay of successive Newton distances at the endpoint
    d = trace.distances
    assert d[0] < 1e-3
    assert d[1] <= max(10 * d[0] ** 2, 1e-14)


def test_certified_specialized_path_matches_generic():
    pair = total_degree((4,), 1.0)
    f = sample_sphere((4,), substream(511))
    H = make_aligned_homotopy(f, pair.g)
    for z in pair.starts:
        fast = track_certified(H, z)
        ref = _track_certified_generic(
            H, z, step_scale=1.0, retain_trace=True, max_steps=10**6
        )
        assert fast.num_steps == ref.num_steps
        np.testing.assert_allclose(fast.phi_trace, ref.phi_trace, rtol=1e-9)
        assert riemann_distance(fast.endpoint, ref.endpoint) < 1e-10


def test_certified_trace_retention_flag():
    pair = total_degree((2,), 1.0)
    f = sample_sphere((2,), substream(512))
    H = make_aligned_homotopy(f, pair.g)
    with_trace = track_certified(H, pair.starts[0])
    assert with_trace.s_nodes is not None
    assert len(with_trace.points) == with_trace.num_steps + 1
    assert with_trace.s_nodes[0] == 0.0
    assert with_trace.s_nodes[-1] == pytest.approx(H.T)
    bare = track_certified(H, pair.starts[0], retain_trace=False)
    assert bare.s_nodes is None and bare.points is None
    assert bare.num_steps == with_trace.num_steps


def test_path_length_bounds_step_count():
    pair = total_degree((2, 2), 1.0)
    f = sample_sphere((2, 2), substream(513))
    H = make_aligned_homotopy(f, pair.g)
    for z in pair.starts:
        result = track_certified(H, z)
        c0 = path_length_c0(result, H)
        assert result.c0_estimate == c0
        bound = math.ceil(71 * 2**1.5 * c0)
        assert result.num_steps <= 1.10 * bound
        # crude lower quadrature sanity: length exceeds T times min node value
        assert c0 >= H.T * 0.0


def test_path_length_quadrature_convergence():
    pair = total_degree((4,), 1.0)
    f = sample_sphere((4,), substream(514))
    H = make_aligned_homotopy(f, pair.g)
    coarse = track_certified(H, pair.starts[2])
    fine = track_certified(H, pair.starts[2], step_scale=0.5)
    assert fine.num_steps > coarse.num_steps
    c_coarse = path_length_c0(coarse, H)
    c_fine = path_length_c0(fine, H)
    assert abs(c_fine - c_coarse) / c_fine < 0.02


def test_path_length_requires_trace():
    pair = total_degree((2,), 1.0)
    f = sample_sphere((2,), substream(515))
    H = make_aligned_homotopy(f, pair.g)
    result = track_certified(H, pair.starts[0], retain_trace=False)
    with pytest.raises(ValueError):
        path_length_c0(result, H)


def test_certified_rejects_bad_step_scale():
    pair = total_degree((2,), 1.0)
    f = sample_sphere((2,), substream(516))
    H = make_aligned_homotopy(f, pair.g)
    with pytest.raises(ValueError):
        track_certified(H, pair.starts[0], step_scale=1.5)


def test_heuristic_fewer_steps_same_endpoint():
    pair = total_degree((4,), 1.0)
    f = sample_sphere((4,), substream(517))
    H = make_aligned_homotopy(f, pair.g)
    for z in pair.starts:
        cert = track_certified(H, z)
        heur = track_heuristic(H, z)
        assert heur.status == "converged"
        assert heur.num_steps < cert.num_steps
        ec = newton_refine(H.f, cert.endpoint, 3).final
        eh = newton_refine(H.f, heur.endpoint, 3).final
        assert riemann_distance(ec, eh) <= 1e-6


def test_heuristic_step_sizes_sum_to_T():
    pair = total_degree((2, 2), 1.0)
    f = sample_sphere((2, 2), substream(518))
    H = make_aligned_homotopy(f, pair.g)
    result = track_heuristic(H, pair.starts[0])
    assert result.status == "converged"
    assert float(result.step_sizes.sum()) == pytest.approx(H.T, abs=1e-12)
    # solves include at least one predictor per accepted step
    assert result.num_steps >= len(result.step_sizes) * 2


def test_heuristic_tolerance_monotonicity():
    pair = total_degree((4,), 1.0)
    f = sample_sphere((4,), substream(519))
    H = make_aligned_homotopy(f, pair.g)
    loose = track_heuristic(H, pair.starts[0], HeuristicSettings(corrector_tolerance=1e-7))
    tight = track_heuristic(H, pair.starts[0], HeuristicSettings(corrector_tolerance=1e-8))
    assert tight.num_steps >= loose.num_steps


def test_heuristic_settings_validation():
    with pytest.raises(ValueError):
        HeuristicSettings(step_expand=0.9)
    with pytest.raises(ValueError):
        HeuristicSettings(step_shrink=1.1)
    with pytest.raises(ValueError):
        HeuristicSettings(min_step=-1.0)
    with pytest.raises(ValueError):
        HeuristicSettings(max_corrector_iters=0)


def test_heuristic_underflow_status():
    pair = total_degree((4,), 1.0)
    f = sample_sphere((4,), substream(520))
    H = make_aligned_homotopy(f, pair.g)
    # an absurd tolerance cannot be met: the step collapses to min_step
    result = track_heuristic(
        H, pair.starts[0],
        HeuristicSettings(corrector_tolerance=1e-17, min_step=1e-4),
    )
    assert result.status == "step_underflow"
