"""Experiment engine: solve-all, average step estimation, start-system search.

Every stochastic quantity is a pure function of (config, seed): targets,
candidates and random pairs each draw from their own derived stream, and
parallel runs aggregate in fixed index order, so reports do not depend on
worker count or scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePairError, RootCountError
from .polynomials import PolySystem, bezout_number, normalize_to_sphere
from .projective import ProjectivePoint, condition_mu, newton_refine, riemann_distance
from .rng import DOMAIN_CANDIDATE, DOMAIN_PAIR, DOMAIN_SOLVE, DOMAIN_TARGET, substream
from .start_systems import (
    InitialPair,
    cached_optimal_r,
    fekete_quartic,
    good_initial_pair,
    random_initial_pair,
    sample_sphere,
    total_degree,
    total_degree_rotated,
)
from .tracking import (
    STATUS_CONVERGED,
    HeuristicSettings,
    TrackResult,
    make_aligned_homotopy,
    track_certified,
    track_heuristic,
)

MODES = ("by_condition", "by_avg_steps", "one_root")
TRACKERS = ("certified", "heuristic", "both")

# Distinct target indices for pilot estimates so keeper selection and the
# final estimate do not share draws.
_PILOT_OFFSET = 1_000_000

# Endpoints closer than this are treated as the same root.
_DEDUP_SEP = 1e-8


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs of one experiment; defaults are desk scale, not paper scale."""

    degrees: tuple[int, ...]
    mode: str
    seed: int
    num_candidates: int = 2000
    keep: int = 5
    num_targets: int = 500
    pilot_targets: int = 50
    tracker: str = "certified"
    include_total_r1: bool = True
    include_total_ropt: bool = True
    include_good: bool = False
    include_fekete: bool = False
    include_random: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if not self.degrees or any(d < 1 for d in self.degrees):
            raise ValueError("degrees must be positive integers")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.tracker not in TRACKERS:
            raise ValueError(f"tracker must be one of {TRACKERS}")
        for name in ("num_candidates", "keep", "num_targets", "pilot_targets", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.include_fekete and self.degrees != (4,):
            raise ValueError("the Fekete quartic exists only for degrees (4,)")

    @property
    def bezout(self) -> int:
        return bezout_number(self.degrees)


@dataclass(frozen=True)
class AvgSteps:
    """Mean per-target total step count with its standard error."""

    mean: float
    stderr: float
    num_targets: int
    num_failed_targets: int
    num_failed_paths: int

    @property
    def flagged(self) -> bool:
        # More than 1% excluded targets makes the estimate unreliable.
        total = self.num_targets + self.num_failed_targets
        return total > 0 and self.num_failed_targets / total > 0.01


@dataclass(frozen=True)
class CandidateReport:
    """One table column: a system with its conditioning and step estimates."""

    system_id: str
    per_root_mu: tuple[float, ...]
    mu: float
    avg_steps_certified: AvgSteps | None = None
    avg_steps_heuristic: AvgSteps | None = None
    num_paths_failed: int = 0
    draw_index: int | None = None
    system: PolySystem | None = field(default=None, repr=False)
    pilot_mean: float | None = None


@dataclass(frozen=True)
class SearchReport:
    """Everything one experiment produced, reproducible from (config, seed)."""

    config: ExperimentConfig
    candidates: tuple[CandidateReport, ...] = ()
    constructed: tuple[CandidateReport, ...] = ()
    one_root: dict | None = None
    num_discarded_candidates: int = 0
    notes: tuple[str, ...] = ()
    wall_seconds: float = 0.0


def _map_tasks(fn, args_list, workers: int):
    """Map preserving input order; processes only when workers > 1."""
    if workers <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    chunk = max(1, len(args_list) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list, chunksize=chunk))


def _track_one(H, start: ProjectivePoint, tracker: str) -> TrackResult:
    if tracker == "certified":
        return track_certified(H, start, retain_trace=False)
    return track_heuristic(H, start, HeuristicSettings())


def solve_all(f: PolySystem, tracker: str = "certified", seed: int = 0) -> list[ProjectivePoint]:
    """All Bezout-many roots of a regular system by continuation.

    Tracks from the best-conditioned total-degree family, Newton-refines
    every endpoint, and verifies pairwise distinctness.  If f happens to
    be (anti)parallel to the start family, a seeded diagonal phase
    rotation of the start (same closed-form roots) restores a
    non-degenerate geodesic.

    Args:
        f: the target system (normalized internally; roots are scale-free).
        tracker: "certified" or "heuristic".
        seed: only consumed by the degenerate-start rotation.

    Returns:
        Exactly bezout_number(f.degrees) distinct refined roots, in the
        deterministic order of the start roots they were tracked from.

    Raises:
        RootCountError: a path failed or two endpoints coincide
            (suspected path jump or singular target).
    """
    if tracker not in ("certified", "heuristic"):
        raise ValueError("tracker must be 'certified' or 'heuristic'")
    f = normalize_to_sphere(f)
    r = cached_optimal_r(f.degrees)
    pair = total_degree(f.degrees, r)
    try:
        H = make_aligned_homotopy(f, pair.g)
    except DegeneratePairError:
        pair = total_degree_rotated(f.degrees, r, substream(seed, DOMAIN_SOLVE))
        H = make_aligned_homotopy(f, pair.g)

    endpoints: list[ProjectivePoint] = []
    for start in pair.starts:
        result = _track_one(H, start, tracker)
        if result.status != STATUS_CONVERGED:
            raise RootCountError(f"path from {start!r} ended with {result.status}")
        endpoints.append(newton_refine(f, result.endpoint, 3).final)
    expected = bezout_number(f.degrees)
    for i in range(len(endpoints)):
        for j in range(i + 1, len(endpoints)):
            if riemann_distance(endpoints[i], endpoints[j]) < _DEDUP_SEP:
                raise RootCountError(
                    f"endpoints {i} and {j} coincide: {len(endpoints)} paths "
                    f"yielded fewer than {expected} distinct roots"
                )
    return endpoints


def _avg_steps_task(args) -> tuple[int, int, int]:
    """Worker: (total steps, failed paths, 1 if target failed) for one target."""
    pair, degrees, seed, index, tracker = args
    f = sample_sphere(degrees, substream(seed, DOMAIN_TARGET, index))
    try:
        H = make_aligned_homotopy(f, pair.g)
    except DegeneratePairError:
        return (0, len(pair.starts), 1)
    total = 0
    failed_paths = 0
    for start in pair.starts:
        result = _track_one(H, start, tracker)
        if result.status != STATUS_CONVERGED:
            failed_paths += 1
        else:
            total += result.num_steps
    if failed_paths:
        return (0, failed_paths, 1)
    return (total, 0, 0)


def estimate_avg_steps(
    pair: InitialPair,
    num_targets: int,
    tracker: str = "certified",
    seed: int = 0,
    *,
    workers: int = 1,
    target_offset: int = 0,
) -> AvgSteps:
    """Mean and standard error of the per-target total step count.

    Each target draws from its own (seed, index) stream, so two systems
    estimated with the same seed face identical targets (paired
    comparisons).  Targets with any failed path are excluded and counted;
    more than 1% of them flags the estimate.

    Args:
        pair: start system with its complete root set.
        num_targets: how many random targets to average over.
        tracker: "certified" or "heuristic".
        seed: master seed; target index t uses stream (seed, TARGET, t).
        workers: process count; results are identical for any value.
        target_offset: shifts target indices (pilot runs use a disjoint
            block so keeper selection does not bias the final estimate).

    Returns:
        AvgSteps with the mean, its standard error, and failure counts.
    """
    degrees = pair.g.degrees
    args = [(pair, degrees, seed, target_offset + t, tracker) for t in range(num_targets)]
    rows = _map_tasks(_avg_steps_task, args, workers)
    totals = np.array([r[0] for r in rows if r[2] == 0], dtype=np.float64)
    failed_paths = sum(r[1] for r in rows)
    failed_targets = sum(r[2] for r in rows)
    if totals.size == 0:
        raise RootCountError("every target failed; the start pair is unusable")
    stderr = float(totals.std(ddof=1) / math.sqrt(totals.size)) if totals.size > 1 else math.inf
    return AvgSteps(
        mean=float(totals.mean()),
        stderr=stderr,
        num_targets=int(totals.size),
        num_failed_targets=failed_targets,
        num_failed_paths=failed_paths,
    )


def _candidate_mu_task(args):
    """Worker: (index, per-root mu tuple) or (index, None) on failure."""
    degrees, seed, index = args
    g = sample_sphere(degrees, substream(seed, DOMAIN_CANDIDATE, index))
    try:
        roots = solve_all(g, "certified", seed)
    except RootCountError:
        return (index, None)
    return (index, tuple(condition_mu(g, z) for z in roots))


def _candidate_pilot_task(args):
    """Worker: (index, per-root mu, pilot mean) or (index, None, None)."""
    degrees, seed, index, pilot_targets, tracker = args
    g = sample_sphere(degrees, substream(seed, DOMAIN_CANDIDATE, index))
    try:
        roots = solve_all(g, "certified", seed)
        pair = InitialPair(g, tuple(roots))
        pilot = estimate_avg_steps(
            pair, pilot_targets, tracker, seed, target_offset=_PILOT_OFFSET
        )
    except RootCountError:
        return (index, None, None)
    return (index, tuple(condition_mu(g, z) for z in roots), pilot.mean)


def _constructed_pairs(config: ExperimentConfig) -> tuple[list[tuple[str, InitialPair]], list[str]]:
    """Reference systems with complete root sets for screening modes."""
    rows: list[tuple[str, InitialPair]] = []
    notes: list[str] = []
    if config.include_total_r1:
        rows.append(("g_total(r=1)", total_degree(config.degrees, 1.0)))
    if config.include_total_ropt:
        r = cached_optimal_r(config.degrees)
        if config.include_total_r1 and abs(r - 1.0) < 1e-9:
            notes.append("optimal radius is 1; g_total(r*) row coincides with g_total(r=1)")
        else:
            rows.append((f"g_total(r={r:.6f})", total_degree(config.degrees, r)))
    if config.include_fekete:
        rows.append(("g_Fekete", fekete_quartic()))
    if config.include_good:
        notes.append("good pair has a single isolated zero; skipped in all-roots mode")
    if config.include_random:
        notes.append("random pair has one known root; skipped in all-roots mode")
    return rows, notes


def _estimate_row(
    config: ExperimentConfig,
    system_id: str,
    pair: InitialPair,
    per_root_mu: tuple[float, ...],
    draw_index: int | None = None,
    pilot_mean: float | None = None,
) -> CandidateReport:
    certified = heuristic = None
    failed = 0
    if config.tracker in ("certified", "both"):
        certified = estimate_avg_steps(
            pair, config.num_targets, "certified", config.seed, workers=config.workers
        )
        failed += certified.num_failed_paths
    if config.tracker in ("heuristic", "both"):
        heuristic = estimate_avg_steps(
            pair, config.num_targets, "heuristic", config.seed, workers=config.workers
        )
        failed += heuristic.num_failed_paths
    return CandidateReport(
        system_id=system_id,
        per_root_mu=per_root_mu,
        mu=max(per_root_mu),
        avg_steps_certified=certified,
        avg_steps_heuristic=heuristic,
        num_paths_failed=failed,
        draw_index=draw_index,
        system=pair.g,
        pilot_mean=pilot_mean,
    )


def _screen(config: ExperimentConfig, by_steps: bool) -> SearchReport:
    t_start = time.perf_counter()
    if by_steps:
        args = [
            (config.degrees, config.seed, i, config.pilot_targets,
             "certified" if config.tracker == "both" else config.tracker)
            for i in range(config.num_candidates)
        ]
        rows = _map_tasks(_candidate_pilot_task, args, config.workers)
        kept = [(r[2], r[0], r[1]) for r in rows if r[1] is not None]
        kept.sort(key=lambda x: (x[0], x[1]))  # pilot mean, then draw index
    else:
        args = [(config.degrees, config.seed, i) for i in range(config.num_candidates)]
        rows = _map_tasks(_candidate_mu_task, args, config.workers)
        kept = [(max(r[1]), r[0], r[1]) for r in rows if r[1] is not None]
        kept.sort(key=lambda x: (x[0], x[1]))
    discarded = config.num_candidates - len(kept)

    keepers = []
    for rank, (score, index, per_root_mu) in enumerate(kept[: config.keep], start=1):
        g = sample_sphere(config.degrees, substream(config.seed, DOMAIN_CANDIDATE, index))
        roots = solve_all(g, "certified", config.seed)
        pair = InitialPair(g, tuple(roots))
        keepers.append(
            _estimate_row(
                config, f"g{rank}", pair, per_root_mu, draw_index=index,
                pilot_mean=score if by_steps else None,
            )
        )

    constructed_rows, notes = _constructed_pairs(config)
    constructed = []
    for system_id, pair in constructed_rows:
        per_root_mu = tuple(condition_mu(pair.g, z) for z in pair.starts)
        constructed.append(_estimate_row(config, system_id, pair, per_root_mu))

    return SearchReport(
        config=config,
        candidates=tuple(keepers),
        constructed=tuple(constructed),
        num_discarded_candidates=discarded,
        notes=tuple(notes),
        wall_seconds=time.perf_counter() - t_start,
    )


def screen_by_condition(config: ExperimentConfig) -> SearchReport:
    """Search for start systems by smallest condition number.

    Draws candidates, solves each for its full root set, keeps the best
    conditioned, then estimates average steps for keepers and for the
    requested constructed systems.
    """
    if config.mode != "by_condition":
        raise ValueError("config.mode must be 'by_condition'")
    return _screen(config, by_steps=False)


def screen_by_avg_steps(config: ExperimentConfig) -> SearchReport:
    """Search by estimated average complexity.

    A cheap pilot estimate ranks all candidates; the keepers are then
    re-estimated at full num_targets alongside the constructed systems.
    Pilot draws use a disjoint target stream.
    """
    if config.mode != "by_avg_steps":
        raise ValueError("config.mode must be 'by_avg_steps'")
    return _screen(config, by_steps=True)


def _one_root_task(args):
    """Worker: per-kind (steps, failed) for a single target index."""
    degrees, seed, index, trackers = args
    f = sample_sphere(degrees, substream(seed, DOMAIN_TARGET, index))
    good = good_initial_pair(degrees)
    total = total_degree(degrees, 1.0)
    rand = random_initial_pair(degrees, substream(seed, DOMAIN_PAIR, index))
    # Total-degree single path starts at the all-ones root, which is the
    # first point in the deterministic enumeration for r = 1.
    starts = {"good": (good, good.starts[0]), "total": (total, total.starts[0]),
              "random": (rand, rand.starts[0])}
    out = {}
    for tracker in trackers:
        for kind, (pair, start) in starts.items():
            steps = 0
            ok = False
            try:
                H = make_aligned_homotopy(f, pair.g)
                result = _track_one(H, start, tracker)
                ok = result.status == STATUS_CONVERGED
                steps = result.num_steps
            except DegeneratePairError:
                pass
            out[(tracker, kind)] = (steps if ok else 0, 0 if ok else 1)
    return (index, out)


def one_root_experiment(config: ExperimentConfig) -> SearchReport:
    """Single-path comparison of the good, total-degree, and random pairs.

    For every target tracks exactly one path per pair kind (the good
    pair's e_0 root, the all-ones total-degree root, a fresh random
    pair) and reports per-kind means.
    """
    if config.mode != "one_root":
        raise ValueError("config.mode must be 'one_root'")
    t_start = time.perf_counter()
    trackers = ("certified", "heuristic") if config.tracker == "both" else (config.tracker,)
    args = [(config.degrees, config.seed, t, trackers) for t in range(config.num_targets)]
    rows = _map_tasks(_one_root_task, args, config.workers)

    summary: dict[str, dict[str, AvgSteps]] = {}
    for tracker in trackers:
        per_kind = {}
        for kind in ("good", "total", "random"):
            steps = np.array(
                [out[(tracker, kind)][0] for _, out in rows if out[(tracker, kind)][1] == 0],
                dtype=np.float64,
            )
            failures = sum(out[(tracker, kind)][1] for _, out in rows)
            if steps.size == 0:
                raise RootCountError(f"every {kind} path failed")
            stderr = float(steps.std(ddof=1) / math.sqrt(steps.size)) if steps.size > 1 else math.inf
            per_kind[kind] = AvgSteps(
                mean=float(steps.mean()),
                stderr=stderr,
                num_targets=int(steps.size),
                num_failed_targets=failures,
                num_failed_paths=failures,
            )
        summary[tracker] = per_kind

    return SearchReport(
        config=config,
        one_root=summary,
        wall_seconds=time.perf_counter() - t_start,
    )


def run_experiment(config: ExperimentConfig) -> SearchReport:
    """Dispatch on config.mode."""
    if config.mode == "by_condition":
        return screen_by_condition(config)
    if config.mode == "by_avg_steps":
        return screen_by_avg_steps(config)
    return one_root_experiment(config)
