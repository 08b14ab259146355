"""Geodesic linear homotopies on the unit sphere and the two path trackers.

The certified tracker takes the largest admissible step of the rule
t = C / (d^(3/2) * phi) with C = 0.04804448, where phi multiplies the two
operator-norm factors computed from the Jacobian stacked over the point
row.  The heuristic tracker is a conventional tangent-predictor /
Newton-corrector baseline with adaptive step control; it exists for
step-count comparisons only and certifies nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePairError, SingularSystemError
from .polynomials import PolySystem, bw_inner_system, bw_norm, multinomial
from .projective import ProjectivePoint

# Step-size rule constant of the certified tracker.
STEP_RULE_CONSTANT = 0.04804448

# Operator norms beyond this mean the stacked matrix left the regime
# where double precision is meaningful.
_CHI_LIMIT = 1e14

STATUS_CONVERGED = "converged"
STATUS_SINGULAR = "singular_failure"
STATUS_UNDERFLOW = "step_underflow"


class GeodesicHomotopy:
    """Arc-length parametrized great-circle segment from g (t=0) to f (t=T)."""

    __slots__ = ("f", "g", "w", "T", "_arrays")

    def __init__(self, f: PolySystem, g: PolySystem, w: PolySystem, T: float):
        self.f = f
        self.g = g
        self.w = w
        self.T = float(T)
        self._arrays = None

    def __repr__(self) -> str:
        return f"GeodesicHomotopy(degrees={self.g.degrees}, T={self.T:.6f})"

    def arrays(self) -> "_PathArrays":
        if self._arrays is None:
            self._arrays = _PathArrays(self.g, self.w)
        return self._arrays

    def __getstate__(self):
        return (self.f, self.g, self.w, self.T)

    def __setstate__(self, state):
        self.f, self.g, self.w, self.T = state
        self._arrays = None


def make_linear_homotopy(f: PolySystem, g: PolySystem) -> GeodesicHomotopy:
    """Build the geodesic segment between two unit-norm systems.

    Rejects pairs that are parallel or antiparallel up to 1e-12: those
    span no unique great circle.
    """
    if f.degrees != g.degrees:
        raise ValueError(f"degree vectors differ: {f.degrees} vs {g.degrees}")
    for name, h in (("target", f), ("start", g)):
        norm = bw_norm(h)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"{name} system norm {norm!r} is not 1; normalize first")
    c = bw_inner_system(f, g).real
    if abs(c) >= 1.0 - 1e-12:
        raise DegeneratePairError(f"systems are (anti)parallel: Re<f,g> = {c!r}")
    scale = 1.0 / math.sqrt(1.0 - c * c)
    w = PolySystem((pf - c * pg) * scale for pf, pg in zip(f.polys, g.polys))
    return GeodesicHomotopy(f, g, w, math.acos(c))


def make_aligned_homotopy(f: PolySystem, g: PolySystem) -> GeodesicHomotopy:
    """Geodesic to the phase-rotated target lambda*f with <lambda*f, g> real >= 0.

    lambda*f defines the same projective zero set as f, and the rotation
    picks the minimal great-circle arc between the two projective classes
    (T = arccos |<f,g>| <= pi/2).  The experiment harness tracks along
    these minimal arcs.
    """
    c = bw_inner_system(f, g)
    if abs(c) > 1e-300:
        lam = c.conjugate() / abs(c)
        f = PolySystem(p * lam for p in f.polys)
    return make_linear_homotopy(f, g)


def _check_param(H: GeodesicHomotopy, t: float) -> float:
    if not -1e-12 <= t <= H.T + 1e-12:
        raise ValueError(f"parameter {t!r} outside [0, {H.T!r}]")
    return min(max(t, 0.0), H.T)


def homotopy_at(H: GeodesicHomotopy, t: float) -> PolySystem:
    """The system g cos(t) + w sin(t); equals g at 0 and f at T."""
    t = _check_param(H, t)
    ct, st = math.cos(t), math.sin(t)
    return PolySystem(pg * ct + pw * st for pg, pw in zip(H.g.polys, H.w.polys))


def homotopy_derivative_at(H: GeodesicHomotopy, t: float) -> PolySystem:
    """The velocity -g sin(t) + w cos(t); unit norm for all t."""
    t = _check_param(H, t)
    ct, st = math.cos(t), math.sin(t)
    return PolySystem(pw * ct - pg * st for pg, pw in zip(H.g.polys, H.w.polys))


@dataclass(frozen=True)
class HeuristicSettings:
    """Adaptive step control for the predictor-corrector baseline.

    `initial_step = None` means T/100 for the path at hand.  The corrector
    tolerance default is deliberately tight so endpoint quality is
    comparable to the certified tracker's.
    """

    initial_step: float | None = None
    min_step: float = 1e-8
    corrector_tolerance: float = 1e-8
    max_corrector_iters: int = 3
    step_expand: float = 1.5
    step_shrink: float = 0.5

    def __post_init__(self):
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be positive")
        if self.min_step <= 0 or self.corrector_tolerance <= 0:
            raise ValueError("min_step and corrector_tolerance must be positive")
        if self.max_corrector_iters < 1:
            raise ValueError("need at least one corrector iteration")
        if not self.step_expand > 1.0:
            raise ValueError("step_expand must exceed 1")
        if not 0.0 < self.step_shrink < 1.0:
            raise ValueError("step_shrink must lie in (0, 1)")


@dataclass
class TrackResult:
    """Outcome of tracking one path.

    For the certified tracker `num_steps == len(step_sizes)` (every step is
    one projective Newton step).  For the heuristic tracker `num_steps`
    counts every linear solve (predictor and corrector alike) for
    comparability, while `step_sizes` lists only the accepted parameter
    increments; their sum is still T on convergence.
    """

    endpoint: ProjectivePoint
    num_steps: int
    step_sizes: np.ndarray
    phi_trace: np.ndarray
    status: str
    c0_estimate: float | None = None
    s_nodes: np.ndarray | None = field(default=None, repr=False)
    points: list | None = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.status == STATUS_CONVERGED


class _PathArrays:
    """Stacked coefficient/exponent arrays for fast evaluation along a path.

    All systems on the circle share the monomial support of (g, w); per
    step only the coefficient vector changes, as a cos/sin combination,
    so the monomial values and derivative products at the current point
    are computed once and reused by every solve of that step.
    """

    __slots__ = (
        "k", "n", "dmax", "expo", "expo_m1", "col_idx", "starts",
        "gc", "wc", "binv", "sqrt_deg", "dtil", "gram_gg", "gram_ww", "gram_gw",
        "exp_range",
    )

    def __init__(self, g: PolySystem, w: PolySystem):
        self.n = g.n
        self.k = g.num_vars
        self.dmax = g.max_degree
        expo_blocks = []
        gc_blocks = []
        wc_blocks = []
        binv_blocks = []
        starts = []
        offset = 0
        for pg, pw in zip(g.polys, w.polys):
            support = sorted(set(pg.coeffs) | set(pw.coeffs), reverse=True)
            if not support:
                raise ValueError("zero component polynomial cannot be tracked")
            starts.append(offset)
            offset += len(support)
            expo_blocks.extend(support)
            gc_blocks.extend(pg.coefficient(a) for a in support)
            wc_blocks.extend(pw.coefficient(a) for a in support)
            binv_blocks.extend(1.0 / multinomial(pg.degree, a) for a in support)
        self.expo = np.array(expo_blocks, dtype=np.int64)
        self.expo_m1 = np.maximum(self.expo - 1, 0)
        self.col_idx = np.arange(self.k)[None, :]
        self.starts = np.array(starts, dtype=np.intp)
        self.gc = np.array(gc_blocks, dtype=np.complex128)
        self.wc = np.array(wc_blocks, dtype=np.complex128)
        self.binv = np.array(binv_blocks, dtype=np.float64)
        self.sqrt_deg = np.sqrt(np.asarray(g.degrees, dtype=np.float64))
        self.dtil = np.concatenate([self.sqrt_deg, [1.0]])
        self.exp_range = np.arange(self.dmax + 1)
        self.gram_gg = float(np.sum(self.binv * _abs2(self.gc)))
        self.gram_ww = float(np.sum(self.binv * _abs2(self.wc)))
        self.gram_gw = float(np.sum(self.binv * (self.gc * self.wc.conjugate())).real)

    def mono_terms(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Monomial values and per-variable derivative products at z."""
        table = np.empty((self.k, self.dmax + 1), dtype=np.complex128)
        table[:, 0] = 1.0
        for e in range(1, self.dmax + 1):
            np.multiply(table[:, e - 1], z, out=table[:, e])
        cols = table[self.col_idx, self.expo]
        mono = cols.prod(axis=1)
        pref = np.ones_like(cols)
        np.cumprod(cols[:, :-1], axis=1, out=pref[:, 1:])
        suff = np.ones_like(cols)
        if self.k > 1:
            np.cumprod(cols[:, :0:-1], axis=1, out=suff[:, -2::-1])
        down = table[self.col_idx, self.expo_m1]
        terms = self.expo * down * pref * suff
        return mono, terms

    def values(self, coefs: np.ndarray, mono: np.ndarray) -> np.ndarray:
        return np.add.reduceat(coefs * mono, self.starts)

    def jac(self, coefs: np.ndarray, terms: np.ndarray) -> np.ndarray:
        return np.add.reduceat(coefs[:, None] * terms, self.starts, axis=0)

    def coeffs_at(self, ct: float, st: float) -> np.ndarray:
        return self.gc * ct + self.wc * st

    def dcoeffs_at(self, ct: float, st: float) -> np.ndarray:
        return self.wc * ct - self.gc * st

    def norm_at(self, ct: float, st: float) -> float:
        return math.sqrt(
            max(ct * ct * self.gram_gg + st * st * self.gram_ww
                + 2.0 * ct * st * self.gram_gw, 0.0)
        )

    def dnorm_sq_at(self, ct: float, st: float) -> float:
        return max(
            st * st * self.gram_gg + ct * ct * self.gram_ww
            - 2.0 * ct * st * self.gram_gw, 0.0,
        )


def _abs2(v: np.ndarray) -> np.ndarray:
    return v.real * v.real + v.imag * v.imag


def track_certified(
    H: GeodesicHomotopy,
    z0: ProjectivePoint,
    *,
    step_scale: float = 1.0,
    retain_trace: bool = True,
    max_steps: int = 2_000_000,
) -> TrackResult:
    """Track one path with the certified step rule.

    z0 must be an approximate zero of the start system (caller contract).
    `step_scale` shrinks the step-rule constant; values below 1 are valid
    (any point in the admissible interval is) and serve quadrature
    refinement, values above 1 would void the certificate and are
    rejected.
    """
    if not 0.0 < step_scale <= 1.0:
        raise ValueError("step_scale must lie in (0, 1]")
    pa = H.arrays()
    if pa.k == 2:
        # One equation: closed-form 2x2 algebra avoids per-step LAPACK
        # overhead, which dominates at this size.
        return _track_certified_one_equation(
            H, z0, step_scale=step_scale, retain_trace=retain_trace, max_steps=max_steps
        )
    return _track_certified_generic(
        H, z0, step_scale=step_scale, retain_trace=retain_trace, max_steps=max_steps
    )


def _track_certified_generic(
    H: GeodesicHomotopy,
    z0: ProjectivePoint,
    *,
    step_scale: float,
    retain_trace: bool,
    max_steps: int,
) -> TrackResult:
    pa = H.arrays()
    n, k = pa.n, pa.k
    T = H.T
    dmax15 = pa.dmax**1.5
    cap = STEP_RULE_CONSTANT * step_scale
    underflow = 1e-12 * T

    z = z0.coords.copy()
    s = 0.0
    steps: list[float] = []
    phis: list[float] = []
    s_nodes = [0.0]
    points = [z.copy()]
    status = STATUS_CONVERGED

    mat = np.empty((k, k), dtype=np.complex128)
    rhs = np.empty(k, dtype=np.complex128)

    while True:
        if len(steps) >= max_steps:
            raise RuntimeError(f"certified tracker exceeded {max_steps} steps")
        ct, st = math.cos(s), math.sin(s)
        mono, terms = pa.mono_terms(z)

        mat[:n] = pa.jac(pa.coeffs_at(ct, st), terms)
        mat[n] = z.conjugate()
        try:
            inv = np.linalg.inv(mat)
        except np.linalg.LinAlgError:
            status = STATUS_SINGULAR
            break
        chi1 = np.linalg.svd(inv * pa.dtil, compute_uv=False)[0]
        if not np.isfinite(chi1) or chi1 > _CHI_LIMIT:
            status = STATUS_SINGULAR
            break

        dcoefs = pa.dcoeffs_at(ct, st)
        rhs[:n] = pa.values(dcoefs, mono)
        rhs[n] = 0.0
        root_velocity = inv @ rhs
        chi2 = math.sqrt(
            pa.dnorm_sq_at(ct, st) + float(_abs2(root_velocity).sum())
        )
        phi = chi1 * chi2
        t_i = cap / (dmax15 * phi)

        if t_i >= T - s:
            t_i = T - s
            s_new = T
            last = True
        else:
            if t_i < underflow:
                status = STATUS_UNDERFLOW
                break
            s_new = s + t_i
            last = False

        ct2, st2 = math.cos(s_new), math.sin(s_new)
        coefs2 = pa.coeffs_at(ct2, st2)
        mat[:n] = pa.jac(coefs2, terms)
        rhs[:n] = pa.values(coefs2, mono)
        try:
            correction = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            status = STATUS_SINGULAR
            break
        z = z - correction
        z /= np.linalg.norm(z)

        steps.append(t_i)
        phis.append(phi)
        s = s_new
        if retain_trace:
            s_nodes.append(s)
            points.append(z.copy())
        if last:
            break

    return TrackResult(
        endpoint=ProjectivePoint(z),
        num_steps=len(steps),
        step_sizes=np.asarray(steps, dtype=np.float64),
        phi_trace=np.asarray(phis, dtype=np.float64),
        status=status,
        s_nodes=np.asarray(s_nodes, dtype=np.float64) if retain_trace else None,
        points=points if retain_trace else None,
    )


def _track_certified_one_equation(
    H: GeodesicHomotopy,
    z0: ProjectivePoint,
    *,
    step_scale: float,
    retain_trace: bool,
    max_steps: int,
) -> TrackResult:
    """k = 2 specialization of the certified loop (identical semantics).

    The stacked matrix is 2x2: its inverse, the largest singular value of
    inv * Diag(sqrt(d), 1) and both solves are evaluated in closed form.
    The three coefficient contractions per system are batched into one
    (3 x m) @ (m x .) product.
    """
    pa = H.arrays()
    T = H.T
    d = pa.dmax
    s_root = math.sqrt(float(d))
    dmax15 = d**1.5
    cap = STEP_RULE_CONSTANT * step_scale
    underflow = 1e-12 * T
    e0 = pa.expo[:, 0]
    e1 = pa.expo[:, 1]
    e0m = pa.expo_m1[:, 0]
    e1m = pa.expo_m1[:, 1]
    e0f = e0.astype(np.float64)
    e1f = e1.astype(np.float64)
    m = e0.shape[0]
    stack = np.empty((3, m), dtype=np.complex128)  # rows: mono, d/dX0, d/dX1
    coeff_pair = np.empty((m, 2), dtype=np.complex128)

    z0c, z1c = complex(z0.coords[0]), complex(z0.coords[1])
    s = 0.0
    steps: list[float] = []
    phis: list[float] = []
    s_nodes = [0.0]
    points = [np.array([z0c, z1c])]
    status = STATUS_CONVERGED

    while True:
        if len(steps) >= max_steps:
            raise RuntimeError(f"certified tracker exceeded {max_steps} steps")
        ct, st = math.cos(s), math.sin(s)
        zvec = np.array([z0c, z1c])
        table = np.power.outer(zvec, pa.exp_range)
        c0 = table[0][e0]
        c1 = table[1][e1]
        stack[0] = c0 * c1
        stack[1] = e0f * table[0][e0m] * c1
        stack[2] = e1f * table[1][e1m] * c0

        np.multiply(pa.gc, ct, out=coeff_pair[:, 0])
        coeff_pair[:, 0] += pa.wc * st
        np.multiply(pa.wc, ct, out=coeff_pair[:, 1])
        coeff_pair[:, 1] -= pa.gc * st
        con = stack @ coeff_pair  # (3, 2): columns for h_s and hdot_s
        a, b = complex(con[1, 0]), complex(con[2, 0])
        vdot = complex(con[0, 1])

        zb0, zb1 = z0c.conjugate(), z1c.conjugate()
        det = a * zb1 - b * zb0
        det2_abs = det.real * det.real + det.imag * det.imag
        if det2_abs == 0.0:
            status = STATUS_SINGULAR
            break
        # largest singular value of [[zb1*s_root, -b], [-zb0*s_root, a]] / det
        fro = (s_root * s_root + abs(a) ** 2 + abs(b) ** 2) / det2_abs
        min2 = s_root * s_root / det2_abs  # |det of scaled matrix|^2
        disc = max(fro * fro - 4.0 * min2, 0.0)
        chi1 = math.sqrt((fro + math.sqrt(disc)) / 2.0)
        if not math.isfinite(chi1) or chi1 > _CHI_LIMIT:
            status = STATUS_SINGULAR
            break
        # y = inv @ (vdot, 0); |y|^2 = |vdot|^2 (|z0|^2 + |z1|^2) / |det|^2
        y2 = (vdot.real * vdot.real + vdot.imag * vdot.imag) / det2_abs
        chi2 = math.sqrt(pa.dnorm_sq_at(ct, st) + y2)
        phi = chi1 * chi2
        t_i = cap / (dmax15 * phi)

        if t_i >= T - s:
            t_i = T - s
            s_new = T
            last = True
        else:
            if t_i < underflow:
                status = STATUS_UNDERFLOW
                break
            s_new = s + t_i
            last = False

        ct2, st2 = math.cos(s_new), math.sin(s_new)
        np.multiply(pa.gc, ct2, out=coeff_pair[:, 0])
        coeff_pair[:, 0] += pa.wc * st2
        con2 = stack @ coeff_pair[:, 0]
        v2, a2, b2 = complex(con2[0]), complex(con2[1]), complex(con2[2])
        det_new = a2 * zb1 - b2 * zb0
        if det_new == 0:
            status = STATUS_SINGULAR
            break
        z0c -= zb1 * v2 / det_new
        z1c -= -zb0 * v2 / det_new
        inorm = 1.0 / math.sqrt(
            z0c.real * z0c.real + z0c.imag * z0c.imag
            + z1c.real * z1c.real + z1c.imag * z1c.imag
        )
        z0c *= inorm
        z1c *= inorm

        steps.append(t_i)
        phis.append(phi)
        s = s_new
        if retain_trace:
            s_nodes.append(s)
            points.append(np.array([z0c, z1c]))
        if last:
            break

    return TrackResult(
        endpoint=ProjectivePoint(np.array([z0c, z1c])),
        num_steps=len(steps),
        step_sizes=np.asarray(steps, dtype=np.float64),
        phi_trace=np.asarray(phis, dtype=np.float64),
        status=status,
        s_nodes=np.asarray(s_nodes, dtype=np.float64) if retain_trace else None,
        points=points if retain_trace else None,
    )


def track_heuristic(
    H: GeodesicHomotopy,
    z0: ProjectivePoint,
    settings: HeuristicSettings | None = None,
    *,
    retain_trace: bool = False,
) -> TrackResult:
    """Tangent predictor + Newton corrector along the same geodesic.

    Counts every linear solve as one step so totals are comparable with
    the certified tracker's Newton-step count.
    """
    st_cfg = settings or HeuristicSettings()
    pa = H.arrays()
    n, k = pa.n, pa.k
    T = H.T
    step = st_cfg.initial_step if st_cfg.initial_step is not None else T / 100.0
    if step <= st_cfg.min_step:
        raise ValueError("initial step must exceed min_step")

    z = z0.coords.copy()
    s = 0.0
    solves = 0
    accepted: list[float] = []
    s_nodes = [0.0]
    points = [z.copy()]
    status = STATUS_CONVERGED

    mat = np.empty((k, k), dtype=np.complex128)
    rhs = np.empty(k, dtype=np.complex128)

    while s < T:
        dt = min(step, T - s)
        ct, st_ = math.cos(s), math.sin(s)
        mono, terms = pa.mono_terms(z)
        mat[:n] = pa.jac(pa.coeffs_at(ct, st_), terms)
        mat[n] = z.conjugate()
        rhs[:n] = pa.values(pa.dcoeffs_at(ct, st_), mono)
        rhs[n] = 0.0
        try:
            velocity = -np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            status = STATUS_SINGULAR
            break
        solves += 1

        s_new = T if dt >= T - s else s + dt
        ct2, st2 = math.cos(s_new), math.sin(s_new)
        coefs2 = pa.coeffs_at(ct2, st2)

        trial = z + dt * velocity
        trial /= np.linalg.norm(trial)
        ok = False
        for _ in range(st_cfg.max_corrector_iters):
            mono_t, terms_t = pa.mono_terms(trial)
            mat[:n] = pa.jac(coefs2, terms_t)
            mat[n] = trial.conjugate()
            rhs[:n] = pa.values(coefs2, mono_t)
            try:
                update = np.linalg.solve(mat, rhs)
            except np.linalg.LinAlgError:
                status = STATUS_SINGULAR
                break
            solves += 1
            trial = trial - update
            trial /= np.linalg.norm(trial)
            mono_t, _ = pa.mono_terms(trial)
            residual = np.linalg.norm(pa.values(coefs2, mono_t))
            if residual <= st_cfg.corrector_tolerance:
                ok = True
                break
        if status == STATUS_SINGULAR:
            break

        if ok:
            z = trial
            s = s_new
            accepted.append(dt)
            step = step * st_cfg.step_expand
            if retain_trace:
                s_nodes.append(s)
                points.append(z.copy())
        else:
            step = dt * st_cfg.step_shrink
            if step < st_cfg.min_step:
                status = STATUS_UNDERFLOW
                break

    return TrackResult(
        endpoint=ProjectivePoint(z),
        num_steps=solves,
        step_sizes=np.asarray(accepted, dtype=np.float64),
        phi_trace=np.asarray([], dtype=np.float64),
        status=status,
        s_nodes=np.asarray(s_nodes, dtype=np.float64) if retain_trace else None,
        points=points if retain_trace else None,
    )


def path_length_c0(result: TrackResult, H: GeodesicHomotopy) -> float:
    """Trapezoidal estimate of the condition-metric length of a tracked path.

    At every retained node the integrand is the condition number at
    (h_s, z_s) times the speed of the lifted path (system velocity is
    unit by arc length; the root velocity is the implicit-derivative
    solve).  Stores the estimate on the result and returns it.
    """
    if result.s_nodes is None or result.points is None:
        raise ValueError("tracking trace was not retained; re-track with retain_trace=True")
    if result.status != STATUS_CONVERGED:
        raise ValueError(f"path length is defined for converged paths, not {result.status!r}")
    pa = H.arrays()
    n = pa.n
    rhs = np.empty(pa.k, dtype=np.complex128)
    mat = np.empty((pa.k, pa.k), dtype=np.complex128)
    integrand = np.empty(result.s_nodes.shape[0], dtype=np.float64)
    for i, (s, z) in enumerate(zip(result.s_nodes, result.points)):
        ct, st = math.cos(s), math.sin(s)
        mono, terms = pa.mono_terms(z)
        mat[:n] = pa.jac(pa.coeffs_at(ct, st), terms)
        mat[n] = z.conjugate()
        try:
            inv = np.linalg.inv(mat)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"singular stacked matrix at node {i}") from exc
        sigma = np.linalg.svd(inv[:, :n] * pa.sqrt_deg, compute_uv=False)[0]
        mu = pa.norm_at(ct, st) * float(sigma)
        rhs[:n] = pa.values(pa.dcoeffs_at(ct, st), mono)
        rhs[n] = 0.0
        velocity = inv @ rhs
        speed = math.sqrt(pa.dnorm_sq_at(ct, st) + float(_abs2(velocity).sum()))
        integrand[i] = mu * speed
    diffs = np.diff(result.s_nodes)
    c0 = float(np.sum((integrand[1:] + integrand[:-1]) * diffs) / 2.0)
    result.c0_estimate = c0
    return c0
