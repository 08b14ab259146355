"""Projective points, Riemann distance, projective Newton, condition numbers.

The restricted-Jacobian inverse is realized throughout via the square
matrix that stacks the Jacobian over the conjugated point row: solving
[Dh(z); z*] y = [b; 0] yields the unique y with Dh(z) y = b orthogonal
to z.  One factorization of that matrix serves the Newton step and both
condition-number style norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularSystemError
from .polynomials import PolySystem, bw_norm

# Stacked matrices with 2-norm condition beyond this are treated as
# singular: double precision cannot be trusted past it.
SINGULAR_COND_LIMIT = 1e14


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of complex projective space held as a unit-norm representative."""

    coords: np.ndarray

    def __eq__(self, other: object) -> bool:
        # Exact representative equality; use riemann_distance for the
        # phase-insensitive projective comparison.
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return bool(np.array_equal(self.coords, other.coords))

    def __init__(self, coords):
        coords = np.array(coords, dtype=np.complex128)
        if coords.ndim != 1 or coords.shape[0] < 2:
            raise ValueError("a projective point needs at least two coordinates")
        if not np.all(np.isfinite(coords.view(np.float64))):
            raise ValueError("non-finite coordinate")
        norm = np.linalg.norm(coords)
        if norm < 1e-150:
            raise ValueError("zero vector does not define a projective point")
        object.__setattr__(self, "coords", coords / norm)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __repr__(self) -> str:
        entries = ", ".join(f"{c:.6g}" for c in self.coords)
        return f"ProjectivePoint([{entries}])"


def _coords(z) -> np.ndarray:
    if isinstance(z, ProjectivePoint):
        return z.coords
    return np.asarray(z, dtype=np.complex128)


@dataclass(frozen=True)
class NewtonCertificateTrace:
    """Iterates of repeated projective Newton steps with successive distances."""

    iterates: tuple[ProjectivePoint, ...]
    distances: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if len(self.distances) != max(len(self.iterates) - 1, 0):
            raise ValueError("need one distance per consecutive iterate pair")
        if any(d < 0 for d in self.distances):
            raise ValueError("distances must be non-negative")

    @property
    def final(self) -> ProjectivePoint:
        return self.iterates[-1]


def riemann_distance(z, zp) -> float:
    """arccos of |<z, z'>| / (|z| |z'|), in [0, pi/2].

    Invariant under unit-scalar rescaling of either argument; the inner
    product magnitude is clamped to [0, 1] since rounding can push it a
    few ulp above one.
    """
    a = _coords(z)
    b = _coords(zp)
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    ratio = abs(np.vdot(b, a)) / denom
    return math.acos(min(max(ratio, 0.0), 1.0))


def stacked_matrix(h: PolySystem, z) -> np.ndarray:
    """The (n+1) x (n+1) matrix [Dh(z); conj(z)^T]."""
    zc = _coords(z)
    k = h.num_vars
    out = np.empty((k, k), dtype=np.complex128)
    out[: k - 1] = h.jacobian(zc)
    out[k - 1] = zc.conjugate()
    return out


def _checked_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > SINGULAR_COND_LIMIT:
        raise SingularSystemError(f"stacked matrix condition {cond:.3e} beyond trust limit")
    return np.linalg.solve(mat, rhs)


def augmented_solve(h: PolySystem, z, b) -> np.ndarray:
    """Solve Dh(z) y = b subject to <y, z> = 0.

    This is the action of the inverse of the Jacobian restricted to the
    orthogonal complement of z.
    """
    zc = _coords(z)
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (h.n,):
        raise ValueError(f"right-hand side must have {h.n} entries")
    rhs = np.concatenate([b, [0.0]])
    return _checked_solve(stacked_matrix(h, zc), rhs)


def projective_newton_step(h: PolySystem, z) -> ProjectivePoint:
    """One projective Newton step, renormalized to the unit sphere."""
    zc = _coords(z)
    y = augmented_solve(h, zc, h.evaluate(zc))
    return ProjectivePoint(zc - y)


def newton_refine(h: PolySystem, z, iters: int) -> NewtonCertificateTrace:
    """Run `iters` projective Newton steps, recording successive distances.

    No convergence is promised far from a root; the trace simply reports
    what happened.  Singular restricted Jacobians propagate as errors.
    """
    if iters < 1:
        raise ValueError("iters must be positive")
    current = z if isinstance(z, ProjectivePoint) else ProjectivePoint(z)
    iterates = [current]
    distances = []
    for _ in range(iters):
        nxt = projective_newton_step(h, current)
        distances.append(riemann_distance(current, nxt))
        iterates.append(nxt)
        current = nxt
    return NewtonCertificateTrace(tuple(iterates), tuple(distances))


def condition_mu(h: PolySystem, z) -> float:
    """Normalized condition number of h at z (unit representative assumed).

    Computed as |h| times the largest singular value of the map
    b -> (Dh(z) restricted to z-perp)^{-1} Diag(sqrt(d_i)) b; returns +inf
    when the stacked matrix is numerically singular.
    """
    zc = _coords(z)
    mat = stacked_matrix(h, zc)
    try:
        inv = np.linalg.inv(mat)
    except np.linalg.LinAlgError:
        return math.inf
    scale = np.sqrt(np.asarray(h.degrees, dtype=np.float64))
    action = inv[:, : h.n] * scale[None, :]
    sigma = np.linalg.svd(action, compute_uv=False)[0]
    # Consistency with the solve-path singularity rule: an operator norm
    # this large means the stacked matrix failed the condition test.
    if not np.isfinite(sigma) or sigma * np.linalg.norm(mat, 2) > SINGULAR_COND_LIMIT:
        return math.inf
    return bw_norm(h) * float(sigma)


def mu_system(h: PolySystem, roots) -> float:
    """Condition number of the system: max of condition_mu over the given roots.

    The caller supplies the complete root set; this function just takes
    the supremum over whatever it is given.
    """
    roots = list(roots)
    if not roots:
        raise ValueError("mu_system needs at least one root")
    return max(condition_mu(h, z) for z in roots)
