"""Independent root-finding oracles used for testing and root-list seeding.

Two deliberately homotopy-free methods: companion-matrix eigenvalues for
one equation in two variables, and multi-start projective Newton with
deduplication for small systems.  Agreement between tracker endpoints and
these oracles is the package's path-jump-freedom check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RootCountError, SingularSystemError
from .polynomials import HomoPoly, PolySystem, bezout_number, normalize_to_sphere
from .projective import ProjectivePoint, projective_newton_step, riemann_distance
from .rng import DOMAIN_ORACLE, substream

# Oracle roots closer than this are treated as one root (non-square-free input).
DISTINCT_ROOT_SEP = 1e-8


@dataclass(frozen=True)
class OracleRootSet:
    """Roots found by an oracle, with residuals of the unit-normalized system."""

    roots: tuple[ProjectivePoint, ...]
    residuals: tuple[float, ...]
    method: str

    def __post_init__(self):
        if len(self.roots) != len(self.residuals):
            raise ValueError("one residual per root required")

    def __len__(self) -> int:
        return len(self.roots)


def _refine(system: PolySystem, point: ProjectivePoint, iters: int = 3) -> ProjectivePoint:
    for _ in range(iters):
        try:
            point = projective_newton_step(system, point)
        except SingularSystemError:
            break
    return point


def _residual(system: PolySystem, point: ProjectivePoint) -> float:
    return float(np.linalg.norm(system.evaluate(point.coords)))


def univariate_roots(p: HomoPoly) -> OracleRootSet:
    """All projective roots of one binary form via the companion matrix.

    Dehomogenizes at X0 = 1, takes eigenvalues of the (balanced) companion
    matrix, re-homogenizes, and adds the point at infinity (0, 1) once per
    vanishing leading coefficient.  Only square-free input is supported;
    coincident oracle roots are reported as an error.
    """
    if p.num_vars != 2:
        raise ValueError("univariate oracle expects a binary form")
    if p.is_zero:
        raise ValueError("zero polynomial has no isolated roots")
    d = p.degree
    # coeffs_desc[j] multiplies X1^(d-j) after setting X0 = 1.
    coeffs_desc = np.array([p.coefficient((j, d - j)) for j in range(d + 1)], dtype=np.complex128)
    finite = np.roots(coeffs_desc)  # np.roots trims vanishing leading coefficients
    infinity_mult = d - finite.shape[0]

    system = normalize_to_sphere(PolySystem([p]))
    roots = []
    for r in finite:
        roots.append(_refine(system, ProjectivePoint([1.0, r])))
    for _ in range(infinity_mult):
        roots.append(_refine(system, ProjectivePoint([0.0, 1.0])))

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if riemann_distance(roots[i], roots[j]) < DISTINCT_ROOT_SEP:
                raise RootCountError(
                    f"roots {i} and {j} coincide: input is not square-free"
                )
    residuals = tuple(_residual(system, z) for z in roots)
    return OracleRootSet(tuple(roots), residuals, "companion")


def multistart_roots(h: PolySystem, attempts: int | None = None, seed: int = 0) -> OracleRootSet:
    """Roots of a small regular system by Newton from random starts.

    Probabilistic: undercounts raise instead of returning a wrong answer,
    and the caller may retry with more attempts.
    """
    if h.n > 3:
        raise ValueError("multistart oracle is scoped to at most 3 equations")
    expected = bezout_number(h.degrees)
    if expected > 64:
        raise ValueError("multistart oracle is scoped to Bezout number <= 64")
    if attempts is None:
        attempts = 50 * expected

    system = normalize_to_sphere(h)
    k = h.num_vars
    found: list[ProjectivePoint] = []
    for j in range(attempts):
        rng = substream(seed, DOMAIN_ORACLE, j)
        raw = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        point = ProjectivePoint(raw)
        converged = False
        for _ in range(50):
            try:
                point = projective_newton_step(system, point)
            except SingularSystemError:
                break
            if _residual(system, point) <= 1e-10:
                converged = True
                break
        if not converged:
            continue
        if all(riemann_distance(point, z) >= DISTINCT_ROOT_SEP for z in found):
            found.append(point)
            if len(found) == expected:
                break
    if len(found) != expected:
        raise RootCountError(
            f"found {len(found)} of {expected} roots after {attempts} starts; raise attempts"
        )
    residuals = tuple(_residual(system, z) for z in found)
    return OracleRootSet(tuple(found), residuals, "multistart")
