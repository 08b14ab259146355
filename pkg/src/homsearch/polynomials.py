"""Dense homogeneous complex polynomials and their Bombieri-Weyl geometry.

A polynomial is stored as a mapping from exponent tuples to complex
coefficients (absent monomial = zero coefficient), mirrored into numpy
arrays in a fixed lexicographic-descending monomial order so that
evaluation, differentiation and random sampling are deterministic.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ZeroSystemError

MultiIndex = tuple[int, ...]


def monomial_exponents(num_vars: int, degree: int) -> list[MultiIndex]:
    """All exponent tuples of length `num_vars` summing to `degree`.

    The order is lexicographic descending, e.g. for two variables and
    degree 2: (2,0), (1,1), (0,2).  Every routine that iterates a dense
    basis uses this order, which is what makes seeded sampling and file
    output reproducible.
    """
    if num_vars < 1:
        raise ValueError("need at least one variable")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    out: list[MultiIndex] = []

    def rec(prefix: MultiIndex, remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), degree, num_vars)
    return out


def multinomial(degree: int, alpha: Iterable[int]) -> int:
    """Multinomial coefficient degree! / (alpha_0! ... alpha_n!)."""
    alpha = tuple(alpha)
    if sum(alpha) != degree:
        raise ValueError(f"exponents {alpha} do not sum to degree {degree}")
    coef = 1
    rest = degree
    for a in alpha:
        coef *= math.comb(rest, a)
        rest -= a
    return coef


def _power_table(z: np.ndarray, max_degree: int) -> np.ndarray:
    """P[v, e] = z[v]**e for e = 0..max_degree."""
    table = np.empty((z.shape[0], max_degree + 1), dtype=np.complex128)
    table[:, 0] = 1.0
    for e in range(1, max_degree + 1):
        np.multiply(table[:, e - 1], z, out=table[:, e])
    return table


def _check_point(z: np.ndarray, num_vars: int) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (num_vars,):
        raise ValueError(f"point has {z.shape} coordinates, expected ({num_vars},)")
    return z


class HomoPoly:
    """A homogeneous polynomial of fixed degree in `num_vars` variables.

    Immutable after construction.  The zero polynomial (empty coefficient
    map) is representable; callers that cannot accept it check `is_zero`.
    """

    __slots__ = ("degree", "num_vars", "_coeffs", "_expo", "_coef")

    def __init__(self, degree: int, num_vars: int, coeffs: Mapping[MultiIndex, complex]):
        if degree < 1:
            raise ValueError("degree must be a positive integer")
        if num_vars < 2:
            raise ValueError("homogeneous setting needs at least two variables")
        clean: dict[MultiIndex, complex] = {}
        for alpha, value in coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != num_vars:
                raise ValueError(f"exponent {alpha} has wrong length for {num_vars} variables")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            if sum(alpha) != degree:
                raise ValueError(f"exponent {alpha} does not sum to degree {degree}")
            value = complex(value)
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ValueError(f"non-finite coefficient at {alpha}")
            if value != 0:
                clean[alpha] = value
        self.degree = int(degree)
        self.num_vars = int(num_vars)
        # Lexicographic-descending key order fixes iteration order everywhere.
        self._coeffs = dict(sorted(clean.items(), reverse=True))
        m = len(self._coeffs)
        self._expo = np.array(list(self._coeffs), dtype=np.int64).reshape(m, num_vars)
        self._coef = np.array(list(self._coeffs.values()), dtype=np.complex128)

    @property
    def coeffs(self) -> dict[MultiIndex, complex]:
        return dict(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, alpha: MultiIndex) -> complex:
        return self._coeffs.get(tuple(alpha), 0.0 + 0.0j)

    def terms(self) -> Iterator[tuple[MultiIndex, complex]]:
        return iter(self._coeffs.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomoPoly):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.num_vars == other.num_vars
            and self._coeffs == other._coeffs
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.num_vars, tuple(self._coeffs.items())))

    def __repr__(self) -> str:
        return f"HomoPoly(degree={self.degree}, num_vars={self.num_vars}, terms={len(self._coeffs)})"

    def __add__(self, other: "HomoPoly") -> "HomoPoly":
        self._check_compatible(other)
        merged = dict(self._coeffs)
        for alpha, value in other._coeffs.items():
            merged[alpha] = merged.get(alpha, 0.0) + value
        return HomoPoly(self.degree, self.num_vars, merged)

    def __sub__(self, other: "HomoPoly") -> "HomoPoly":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "HomoPoly":
        scalar = complex(scalar)
        return HomoPoly(
            self.degree,
            self.num_vars,
            {alpha: scalar * value for alpha, value in self._coeffs.items()},
        )

    __rmul__ = __mul__

    def _check_compatible(self, other: "HomoPoly") -> None:
        if self.degree != other.degree or self.num_vars != other.num_vars:
            raise ValueError(
                f"incompatible polynomials: degree {self.degree} vs {other.degree}, "
                f"{self.num_vars} vs {other.num_vars} variables"
            )

    def evaluate(self, z) -> complex:
        z = _check_point(z, self.num_vars)
        if self.is_zero:
            return 0.0 + 0.0j
        table = _power_table(z, self.degree)
        cols = table[np.arange(self.num_vars)[None, :], self._expo]
        return complex(self._coef @ cols.prod(axis=1))

    def gradient(self, z) -> np.ndarray:
        """Vector of partial derivatives evaluated at z."""
        z = _check_point(z, self.num_vars)
        if self.is_zero:
            return np.zeros(self.num_vars, dtype=np.complex128)
        table = _power_table(z, self.degree)
        return _gradient_rows(self._expo, self._coef, table)


def _gradient_rows(expo: np.ndarray, coef: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Gradient of one polynomial given its exponent/coefficient arrays.

    Handles zero coordinates exactly: the monomial term for variable v is
    alpha_v * z_v^(alpha_v - 1) * prod_{u != v} z_u^alpha_u, assembled from
    prefix/suffix products so no division by a coordinate occurs.
    """
    m, k = expo.shape
    idx = np.arange(k)[None, :]
    cols = table[idx, expo]
    pref = np.ones_like(cols)
    np.cumprod(cols[:, :-1], axis=1, out=pref[:, 1:])
    suff = np.ones_like(cols)
    if k > 1:
        np.cumprod(cols[:, :0:-1], axis=1, out=suff[:, -2::-1])
    down = table[idx, np.maximum(expo - 1, 0)]
    terms = expo * down * pref * suff
    return coef @ terms


class PolySystem:
    """A square system: n homogeneous polynomials in n+1 variables."""

    __slots__ = ("degrees", "polys")

    def __init__(self, polys: Iterable[HomoPoly]):
        polys = tuple(polys)
        if not polys:
            raise ValueError("a system needs at least one polynomial")
        num_vars = polys[0].num_vars
        if num_vars != len(polys) + 1:
            raise ValueError(
                f"square system needs {num_vars - 1} polynomials in {num_vars} variables, "
                f"got {len(polys)}"
            )
        for p in polys:
            if p.num_vars != num_vars:
                raise ValueError("all polynomials must share the variable count")
        self.polys = polys
        self.degrees = tuple(p.degree for p in polys)

    @property
    def n(self) -> int:
        return len(self.polys)

    @property
    def num_vars(self) -> int:
        return self.n + 1

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolySystem):
            return NotImplemented
        return self.polys == other.polys

    def __hash__(self) -> int:
        return hash(self.polys)

    def __repr__(self) -> str:
        return f"PolySystem(degrees={self.degrees})"

    def evaluate(self, z) -> np.ndarray:
        """Component values h_i(z) as a length-n complex vector."""
        z = _check_point(z, self.num_vars)
        table = _power_table(z, self.max_degree)
        idx = np.arange(self.num_vars)[None, :]
        out = np.empty(self.n, dtype=np.complex128)
        for i, p in enumerate(self.polys):
            if p.is_zero:
                out[i] = 0.0
            else:
                cols = table[idx, p._expo]
                out[i] = p._coef @ cols.prod(axis=1)
        return out

    def jacobian(self, z) -> np.ndarray:
        """The n x (n+1) matrix of partials d h_i / d X_j at z."""
        z = _check_point(z, self.num_vars)
        table = _power_table(z, self.max_degree)
        out = np.zeros((self.n, self.num_vars), dtype=np.complex128)
        for i, p in enumerate(self.polys):
            if not p.is_zero:
                out[i] = _gradient_rows(p._expo, p._coef, table)
        return out


def bw_inner(v: HomoPoly, w: HomoPoly) -> complex:
    """Bombieri-Weyl product: sum over monomials of a * conj(b) / multinomial."""
    v._check_compatible(w)
    small, large = (v, w) if len(v._coeffs) <= len(w._coeffs) else (w, v)
    total = 0.0 + 0.0j
    for alpha, a in small._coeffs.items():
        b = large._coeffs.get(alpha)
        if b is None:
            continue
        av, bv = (a, b) if small is v else (b, a)
        total += av * bv.conjugate() / multinomial(v.degree, alpha)
    return total


def bw_norm_poly(p: HomoPoly) -> float:
    total = 0.0
    for alpha, a in p._coeffs.items():
        total += (a.real * a.real + a.imag * a.imag) / multinomial(p.degree, alpha)
    return math.sqrt(total)


def bw_inner_system(h: PolySystem, hp: PolySystem) -> complex:
    """Componentwise sum of Bombieri-Weyl products; requires equal degree vectors."""
    if h.degrees != hp.degrees:
        raise ValueError(f"degree vectors differ: {h.degrees} vs {hp.degrees}")
    return sum((bw_inner(a, b) for a, b in zip(h.polys, hp.polys)), 0.0 + 0.0j)


def bw_norm(h: PolySystem) -> float:
    return math.sqrt(sum(bw_norm_poly(p) ** 2 for p in h.polys))


def normalize_to_sphere(h: PolySystem) -> PolySystem:
    """Scale h to unit Bombieri-Weyl norm; rejects the zero system."""
    norm = bw_norm(h)
    if norm < 1e-300:
        raise ZeroSystemError("cannot normalize the zero system")
    return PolySystem(p * (1.0 / norm) for p in h.polys)


def bezout_number(degrees: Iterable[int]) -> int:
    """Product of the equation degrees: the generic root count."""
    degrees = tuple(int(d) for d in degrees)
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("degrees must be a nonempty sequence of positive integers")
    return math.prod(degrees)


def kernel_poly(z, degree: int) -> HomoPoly:
    """Reproducing kernel at a unit point: K_z = (conj(z) . X)^degree.

    Satisfies <p, K_z> = p(z) for every p of the same degree, and has unit
    Bombieri-Weyl norm when z is unit.  Used to project Gaussian draws onto
    the subspace of systems vanishing at z.
    """
    z = np.asarray(z, dtype=np.complex128)
    if abs(np.linalg.norm(z) - 1.0) > 1e-10:
        raise ValueError("kernel point must have unit norm")
    k = z.shape[0]
    zc = z.conjugate()
    coeffs: dict[MultiIndex, complex] = {}
    for alpha in monomial_exponents(k, degree):
        value = complex(multinomial(degree, alpha))
        for v, a in enumerate(alpha):
            if a:
                value *= zc[v] ** a
        coeffs[alpha] = value
    return HomoPoly(degree, k, coeffs)
