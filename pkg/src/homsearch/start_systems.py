"""Constructors for start systems and initial pairs.

Everything returned here lives on the unit sphere of the Bombieri-Weyl
norm, paired with explicitly known roots, so the trackers can start from
a certified zero.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import oracle
from .polynomials import (
    HomoPoly,
    PolySystem,
    bw_norm,
    kernel_poly,
    monomial_exponents,
    multinomial,
    normalize_to_sphere,
)
from .projective import ProjectivePoint, mu_system

START_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class InitialPair:
    """A unit-norm start system with one or more of its known zeros."""

    g: PolySystem
    starts: tuple[ProjectivePoint, ...]

    def __post_init__(self):
        if not self.starts:
            raise ValueError("an initial pair needs at least one start point")
        norm = bw_norm(self.g)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"start system norm {norm!r} is not 1")
        for z in self.starts:
            residual = np.linalg.norm(self.g.evaluate(z.coords))
            if residual > START_RESIDUAL_TOL:
                raise ValueError(f"listed start has residual {residual:.3e}")


def _unit_degrees(degrees) -> tuple[int, ...]:
    degrees = tuple(int(d) for d in degrees)
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("degrees must be positive integers")
    return degrees


def total_degree(degrees, r: float = 1.0) -> InitialPair:
    """The start family (X_i^d_i - r^d_i X_0^d_i) with its scaled roots of unity.

    Root enumeration is deterministic: for root-of-unity indices
    (k_1, ..., k_n) the rightmost index advances fastest.
    """
    degrees = _unit_degrees(degrees)
    if not r > 0:
        raise ValueError("r must be positive")
    n = len(degrees)
    k = n + 1
    polys = []
    for i, d in enumerate(degrees):
        lead = [0] * k
        lead[i + 1] = d
        base = [0] * k
        base[0] = d
        polys.append(HomoPoly(d, k, {tuple(lead): 1.0, tuple(base): -(r**d)}))
    system = normalize_to_sphere(PolySystem(polys))

    starts = []
    for indices in itertools.product(*(range(d) for d in degrees)):
        coords = np.empty(k, dtype=np.complex128)
        coords[0] = 1.0
        for i, (d, j) in enumerate(zip(degrees, indices)):
            coords[i + 1] = r * np.exp(2j * np.pi * j / d)
        starts.append(ProjectivePoint(coords))
    return InitialPair(system, tuple(starts))


def total_degree_rotated(degrees, r: float, rng: np.random.Generator) -> InitialPair:
    """Total-degree family after a random diagonal phase change of variables.

    Used when a target happens to be (anti)parallel to the plain family:
    the rotation keeps the closed-form roots and the condition numbers
    while moving the system off the degenerate geodesic.
    """
    degrees = _unit_degrees(degrees)
    n = len(degrees)
    k = n + 1
    theta = rng.uniform(0.0, 2.0 * np.pi, size=k)
    polys = []
    for i, d in enumerate(degrees):
        lead = [0] * k
        lead[i + 1] = d
        base = [0] * k
        base[0] = d
        polys.append(
            HomoPoly(
                d,
                k,
                {
                    tuple(lead): np.exp(1j * d * theta[i + 1]),
                    tuple(base): -(r**d) * np.exp(1j * d * theta[0]),
                },
            )
        )
    system = normalize_to_sphere(PolySystem(polys))

    starts = []
    for indices in itertools.product(*(range(d) for d in degrees)):
        coords = np.empty(k, dtype=np.complex128)
        coords[0] = 1.0
        for i, (d, j) in enumerate(zip(degrees, indices)):
            coords[i + 1] = r * np.exp(2j * np.pi * j / d) * np.exp(1j * (theta[0] - theta[i + 1]))
        starts.append(ProjectivePoint(coords))
    return InitialPair(system, tuple(starts))


def good_initial_pair(degrees) -> InitialPair:
    """The conjectured low-complexity pair: (sqrt(d_i) X_0^(d_i - 1) X_i) with root e_0.

    Only e_0 is an isolated zero (the rest of the zero set is the
    hyperplane X_0 = 0), so the pair carries a single start.
    """
    degrees = _unit_degrees(degrees)
    n = len(degrees)
    k = n + 1
    polys = []
    for i, d in enumerate(degrees):
        alpha = [0] * k
        alpha[0] = d - 1
        alpha[i + 1] += 1
        polys.append(HomoPoly(d, k, {tuple(alpha): math.sqrt(d)}))
    system = normalize_to_sphere(PolySystem(polys))
    e0 = np.zeros(k, dtype=np.complex128)
    e0[0] = 1.0
    return InitialPair(system, (ProjectivePoint(e0),))


def gaussian_system(degrees, rng: np.random.Generator) -> PolySystem:
    """Unnormalized draw: each coefficient is a centered complex Gaussian
    with variance equal to its multinomial coefficient.

    Equivalently, the system is standard Gaussian in a Bombieri-Weyl
    orthonormal basis, which makes the induced measure invariant under
    unitary changes of variables.
    """
    degrees = _unit_degrees(degrees)
    k = len(degrees) + 1
    polys = []
    for d in degrees:
        basis = monomial_exponents(k, d)
        raw = rng.standard_normal((len(basis), 2))
        xi = (raw[:, 0] + 1j * raw[:, 1]) / math.sqrt(2.0)
        coeffs = {
            alpha: complex(xi[j]) * math.sqrt(multinomial(d, alpha))
            for j, alpha in enumerate(basis)
        }
        polys.append(HomoPoly(d, k, coeffs))
    return PolySystem(polys)


def sample_sphere(degrees, rng: np.random.Generator) -> PolySystem:
    """A uniformly distributed system on the unit sphere."""
    return normalize_to_sphere(gaussian_system(degrees, rng))


def random_initial_pair(degrees, rng: np.random.Generator) -> InitialPair:
    """Random pair: uniform root first, then a Gaussian system conditioned on it.

    Draws z uniformly on the unit sphere of C^(n+1), then projects a
    Gaussian system onto the subspace vanishing at z using the reproducing
    kernel, and normalizes.  The projection makes g(z) = 0 exact up to
    rounding without ever solving a system.
    """
    degrees = _unit_degrees(degrees)
    k = len(degrees) + 1
    for _ in range(10):
        raw = rng.standard_normal((k, 2))
        z = raw[:, 0] + 1j * raw[:, 1]
        z /= np.linalg.norm(z)
        h = gaussian_system(degrees, rng)
        projected = []
        for p in h.polys:
            value = p.evaluate(z)
            projected.append(p - value * kernel_poly(z, p.degree))
        candidate = PolySystem(projected)
        if bw_norm(candidate) >= 1e-12:
            return InitialPair(normalize_to_sphere(candidate), (ProjectivePoint(z),))
    raise RuntimeError("random pair construction kept degenerating; check the generator")


def fekete_quartic() -> InitialPair:
    """The quartic X1 (X1^3 - 2 sqrt(2) X0^3) whose roots are Fekete points.

    Its four projective roots, the vertices of a regular tetrahedron under
    stereographic projection, are computed by the companion-matrix oracle
    and Newton-refined.
    """
    p = HomoPoly(4, 2, {(0, 4): 1.0, (3, 1): -2.0 * math.sqrt(2.0)})
    roots = oracle.univariate_roots(p)
    system = normalize_to_sphere(PolySystem([p]))
    return InitialPair(system, roots.roots)


def _total_degree_mu(degrees, r: float) -> float:
    pair = total_degree(degrees, r)
    return mu_system(pair.g, pair.starts)


def optimize_r(degrees, bracket: tuple[float, float] = (0.05, 5.0)) -> tuple[float, float]:
    """Radius minimizing the total-degree condition number over the bracket.

    Coarse localization by bounded scalar minimization, then the
    first-order condition is solved on a central-difference derivative,
    which pins the minimizer far below the sqrt(eps) limit of
    value-only minimization.
    """
    degrees = _unit_degrees(degrees)

    def phi(r: float) -> float:
        return _total_degree_mu(degrees, r)

    res = minimize_scalar(phi, bounds=bracket, method="bounded", options={"xatol": 1e-9})
    r_star = float(res.x)

    delta = 1e-5 * max(r_star, 1.0)

    def dphi(r: float) -> float:
        return (phi(r + delta) - phi(r - delta)) / (2.0 * delta)

    lo = max(bracket[0] + delta, r_star - 100 * delta)
    hi = min(bracket[1] - delta, r_star + 100 * delta)
    if dphi(lo) < 0.0 < dphi(hi):
        r_star = float(brentq(dphi, lo, hi, xtol=1e-12))
    return r_star, phi(r_star)


def cached_optimal_r(degrees) -> float:
    """Memoized optimize_r radius for repeated solve-all calls."""
    return _cached_optimal_r(_unit_degrees(degrees))


@functools.lru_cache(maxsize=64)
def _cached_optimal_r(degrees: tuple[int, ...]) -> float:
    return optimize_r(degrees)[0]
