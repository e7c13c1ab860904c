"""Exact integer/rational algebra for hyperbolic automorphisms of the 2-torus.

This module provides:
  * eigendata of hyperbolic matrices in SL(2,Z) with positive trace
    (closed-form eigenvalues, oriented unit eigenvectors);
  * exact enumeration of periodic points of a product automorphism on T^4
    via a 2x2 Smith normal form over the integers;
  * the non-resonance check for an ordered quadruple of expansion rates.

Everything here is exact (Python integers / rationals) except the eigendata,
which is float with closed-form error control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    EnumerationCapExceeded,
    NegativeEigenvalues,
    NotHyperbolic,
    NotUnimodular,
    ValidationError,
)

IntMatrix = tuple[tuple[int, int], tuple[int, int]]

DEFAULT_ENUMERATION_CAP = 2_000_000
DEFAULT_RESONANCE_RTOL = 1e-9


def _as_int_matrix(matrix) -> IntMatrix:
    m = np.asarray(matrix)
    if m.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.equal(m, np.round(np.asarray(m, dtype=float)))):
        raise ValidationError("matrix entries must be integers")
    return (
        (int(m[0, 0]), int(m[0, 1])),
        (int(m[1, 0]), int(m[1, 1])),
    )


def _det2(m: IntMatrix) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _matmul2(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _matpow2(m: IntMatrix, n: int) -> IntMatrix:
    """m**n for n >= 0 by binary exponentiation over Python ints."""
    if n < 0:
        raise ValidationError("negative power not supported here")
    result: IntMatrix = ((1, 0), (0, 1))
    base = m
    e = n
    while e > 0:
        if e & 1:
            result = _matmul2(result, base)
        base = _matmul2(base, base)
        e >>= 1
    return result


def _inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a det=+1 integer matrix."""
    if _det2(m) != 1:
        raise NotUnimodular("inverse requires det = +1")
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


@dataclass(frozen=True)
class ToralAutomorphism:
    """A hyperbolic element of SL(2,Z) together with its eigendata.

    ``small_eig * large_eig == 1`` exactly in the algebraic sense; the stored
    floats satisfy it to ~1e-16.  Eigenvectors are unit vectors oriented so
    that the first nonzero component is positive.
    """

    matrix: IntMatrix
    det: int
    trace: int
    small_eig: float
    large_eig: float
    e_s: np.ndarray
    e_u: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "e_s", _readonly(self.e_s))
        object.__setattr__(self, "e_u", _readonly(self.e_u))

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def inverse_matrix(self) -> IntMatrix:
        return _inverse_unimodular(self.matrix)

    def power(self, n: int) -> IntMatrix:
        """Exact integer matrix power, negative n via the exact inverse."""
        if n >= 0:
            return _matpow2(self.matrix, n)
        return _matpow2(self.inverse_matrix(), -n)


def _readonly(v: np.ndarray) -> np.ndarray:
    out = np.array(v, dtype=float)
    out.setflags(write=False)
    return out


def _eigenvector(m: IntMatrix, eig: float) -> np.ndarray:
    """Unit eigenvector of a 2x2 matrix for a simple real eigenvalue."""
    (a, b), (c, d) = m
    # rows of (m - eig I) are both orthogonal to the eigenvector; pick the
    # better-conditioned one
    cand1 = np.array([b, eig - a])
    cand2 = np.array([eig - d, c])
    v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    v = v / np.linalg.norm(v)
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    return v


def hyperbolic_eigen(matrix) -> ToralAutomorphism:
    """Closed-form eigendata for a hyperbolic matrix in SL(2,Z).

    Requires trace > 2: only positive-eigenvalue automorphisms are supported
    (trace < -2 would give two negative eigenvalues, which the rest of the
    library does not model).

    Raises:
        NotHyperbolic: if |trace| <= 2.
        NotUnimodular: if det != 1.
        NegativeEigenvalues: if trace < -2.
    """
    m = _as_int_matrix(matrix)
    tr = m[0][0] + m[1][1]
    if abs(tr) <= 2:
        raise NotHyperbolic(f"|trace| must exceed 2, got trace = {tr}")
    det = _det2(m)
    if det != 1:
        raise NotUnimodular(f"determinant must be +1, got {det}")
    if tr < 0:
        raise NegativeEigenvalues(
            f"trace = {tr} < -2 gives negative eigenvalues; unsupported"
        )
    disc = math.sqrt(tr * tr - 4.0)
    large = 0.5 * (tr + disc)
    small = 1.0 / large  # exact algebraic relation; avoids cancellation
    return ToralAutomorphism(
        matrix=m,
        det=det,
        trace=tr,
        small_eig=small,
        large_eig=large,
        e_s=_eigenvector(m, small),
        e_u=_eigenvector(m, large),
    )


# -- periodic points of the linear product model ------------------------------

@dataclass(frozen=True, slots=True)
class RationalTorusPoint:
    """A point of T^4 with rational coordinates num[i]/den in [0, 1)."""

    numerators: tuple[int, int, int, int]
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator <= 0:
            raise ValidationError("denominator must be positive")
        if any(not (0 <= p < self.denominator) for p in self.numerators):
            raise ValidationError("numerators must satisfy 0 <= p < denominator")

    def as_float(self) -> np.ndarray:
        return np.array(self.numerators, dtype=float) / float(self.denominator)


def _snf2(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form of a nonsingular 2x2 integer matrix.

    Returns (U, S, V) with U*m*V = S, S = diag(s1, s2), s1 | s2, s1, s2 > 0,
    and U, V unimodular (det = +-1).
    """
    if _det2(m) == 0:
        raise ValidationError("singular matrix has no Smith normal form here")
    a = [list(row) for row in m]
    u = [[1, 0], [0, 1]]
    v = [[1, 0], [0, 1]]

    def row_op(i, j, k):  # row_i += k * row_j
        a[i][0] += k * a[j][0]
        a[i][1] += k * a[j][1]
        u[i][0] += k * u[j][0]
        u[i][1] += k * u[j][1]

    def col_op(i, j, k):  # col_i += k * col_j
        a[0][i] += k * a[0][j]
        a[1][i] += k * a[1][j]
        v[0][i] += k * v[0][j]
        v[1][i] += k * v[1][j]

    def swap_rows():
        a[0], a[1] = a[1], a[0]
        u[0], u[1] = u[1], u[0]

    def swap_cols():
        a[0][0], a[0][1] = a[0][1], a[0][0]
        a[1][0], a[1][1] = a[1][1], a[1][0]
        v[0][0], v[0][1] = v[0][1], v[0][0]
        v[1][0], v[1][1] = v[1][1], v[1][0]

    def diagonalize():
        # Euclidean reduction with the pivot |a00| strictly decreasing on
        # every non-divisible step, so the loop terminates; once the pivot
        # divides both off-diagonal first entries they are cleared exactly.
        if a[0][0] == 0:
            if a[1][0] != 0:
                swap_rows()
            else:
                swap_cols()
        while a[1][0] != 0 or a[0][1] != 0:
            if a[1][0] % a[0][0] != 0:
                q = a[1][0] // a[0][0]
                row_op(1, 0, -q)
                swap_rows()
                continue
            if a[0][1] % a[0][0] != 0:
                q = a[0][1] // a[0][0]
                col_op(1, 0, -q)
                swap_cols()
                continue
            if a[1][0] != 0:
                row_op(1, 0, -(a[1][0] // a[0][0]))
            if a[0][1] != 0:
                col_op(1, 0, -(a[0][1] // a[0][0]))

    diagonalize()
    while a[1][1] % a[0][0] != 0:
        # restore the divisibility condition s1 | s2 and re-reduce
        row_op(0, 1, 1)
        diagonalize()

    # make the diagonal positive
    if a[0][0] < 0:
        a[0][0] = -a[0][0]
        u[0][0], u[0][1] = -u[0][0], -u[0][1]
    if a[1][1] < 0:
        a[1][1] = -a[1][1]
        u[1][0], u[1][1] = -u[1][0], -u[1][1]
    U = ((u[0][0], u[0][1]), (u[1][0], u[1][1]))
    V = ((v[0][0], v[0][1]), (v[1][0], v[1][1]))
    S = ((a[0][0], 0), (0, a[1][1]))
    return U, S, V


def _torsion_points(m: IntMatrix) -> tuple[int, Iterator[tuple[int, int, int]]]:
    """All v in [0,1)^2 with m*v integral, as (p1, p2, den) triples.

    The solution group is Z^2 / m Z^2, of order |det m|; with U m V = S =
    diag(s1, s2) the solutions are V * (j1/s1, j2/s2) mod 1.
    """
    d = abs(_det2(m))
    _, S, V = _snf2(m)
    s1, s2 = S[0][0], S[1][1]
    assert s1 * s2 == d

    def gen() -> Iterator[tuple[int, int, int]]:
        # common denominator s1*s2 keeps arithmetic integral
        den = s1 * s2
        for j1 in range(s1):
            for j2 in range(s2):
                p1 = (V[0][0] * j1 * s2 + V[0][1] * j2 * s1) % den
                p2 = (V[1][0] * j1 * s2 + V[1][1] * j2 * s1) % den
                yield p1, p2, den

    return d, gen()


def linear_periodic_count(A: ToralAutomorphism, B: ToralAutomorphism, n: int) -> int:
    """|det(A^n - I)| * |det(B^n - I)|, exactly."""
    if n < 1:
        raise ValidationError("period must be >= 1")
    da = abs(_det2(_sub_identity(A.power(n))))
    db = abs(_det2(_sub_identity(B.power(n))))
    return da * db


def _sub_identity(m: IntMatrix) -> IntMatrix:
    return ((m[0][0] - 1, m[0][1]), (m[1][0], m[1][1] - 1))


def periodic_points_linear(
    A: ToralAutomorphism,
    B: ToralAutomorphism,
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[RationalTorusPoint]:
    """All z in T^4 with (A^n x, B^n y) = (x, y) mod 1, exactly.

    Solves (M^n - I) v in Z^2 per factor through the Smith normal form; the
    returned list has exactly |det(A^n - I)| * |det(B^n - I)| points, ordered
    deterministically.

    Raises:
        EnumerationCapExceeded: when that count exceeds ``cap``.
    """
    count = linear_periodic_count(A, B, n)
    if count > cap:
        raise EnumerationCapExceeded(
            f"{count} periodic points exceed the enumeration cap {cap}"
        )
    _, gen_a = _torsion_points(_sub_identity(A.power(n)))
    pts_a = sorted(set(_reduce_triple(t) for t in gen_a))
    _, gen_b = _torsion_points(_sub_identity(B.power(n)))
    pts_b = sorted(set(_reduce_triple(t) for t in gen_b))

    out: list[RationalTorusPoint] = []
    for p1, p2, da in pts_a:
        for q1, q2, db in pts_b:
            den = da * db // gcd(da, db)
            fa, fb = den // da, den // db
            out.append(
                RationalTorusPoint(
                    numerators=(p1 * fa, p2 * fa, q1 * fb, q2 * fb),
                    denominator=den,
                )
            )
    return out


def _reduce_triple(t: tuple[int, int, int]) -> tuple[int, int, int]:
    p1, p2, den = t
    g = gcd(gcd(p1, p2), den)
    return (p1 // g, p2 // g, den // g)


def periodic_points_as_array(points: Sequence[RationalTorusPoint]) -> np.ndarray:
    """Float (len, 4) array of rational torus points."""
    out = np.empty((len(points), 4), dtype=float)
    for i, p in enumerate(points):
        d = float(p.denominator)
        out[i, 0] = p.numerators[0] / d
        out[i, 1] = p.numerators[1] / d
        out[i, 2] = p.numerators[2] / d
        out[i, 3] = p.numerators[3] / d
    return out


# -- rate quadruples and non-resonance ----------------------------------------

@dataclass(frozen=True)
class EigenQuadruple:
    """Strictly ordered rate quadruple mu_hat < mu < 1 < lam < lam_hat."""

    mu_hat: float
    mu: float
    lam: float
    lam_hat: float

    def __post_init__(self) -> None:
        if not (0.0 < self.mu_hat < self.mu < 1.0 < self.lam < self.lam_hat):
            raise ValidationError(
                "rates must satisfy 0 < mu_hat < mu < 1 < lam < lam_hat, got "
                f"({self.mu_hat}, {self.mu}, {self.lam}, {self.lam_hat})"
            )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mu_hat, self.mu, self.lam, self.lam_hat)

    def center_product(self) -> float:
        return self.mu * self.lam


def _signed_exponent_tuples(max_degree: int) -> list[tuple[int, int, int, int]]:
    rng = range(-max_degree, max_degree + 1)
    out = []
    for a0 in rng:
        for a1 in rng:
            for a2 in rng:
                for a3 in rng:
                    if abs(a0) + abs(a1) + abs(a2) + abs(a3) <= max_degree:
                        out.append((a0, a1, a2, a3))
    return out


def check_nonresonance(
    q: EigenQuadruple,
    max_degree: int = 3,
    rtol: float = DEFAULT_RESONANCE_RTOL,
) -> list[tuple[int, tuple[int, int, int, int]]]:
    """All multiplicative near-resonances rate_i = rates**alpha.

    Scans every alpha in Z^4 with |alpha|_1 <= max_degree, alpha != e_i, and
    reports (i, alpha) whenever |rate_i - rates**alpha| < rtol * rate_i.
    An empty list certifies non-resonance at this tolerance.  Indices i are
    0-based into (mu_hat, mu, lam, lam_hat).
    """
    rates = q.as_tuple()
    logs = [math.log(r) for r in rates]
    violations: list[tuple[int, tuple[int, int, int, int]]] = []
    for alpha in _signed_exponent_tuples(max_degree):
        log_prod = sum(a * l for a, l in zip(alpha, logs))
        for i in range(4):
            if alpha == tuple(1 if j == i else 0 for j in range(4)):
                continue
            # |r_i - prod| < rtol*r_i  <=>  |exp(log_prod - log r_i) - 1| < rtol
            if abs(math.exp(log_prod - logs[i]) - 1.0) < rtol:
                violations.append((i, alpha))
    violations.sort()
    return violations
