"""Finite trigonometric representations of maps T^2 -> R^2.

A ``TrigMap`` stores a sparse set of Fourier coefficients c_k in C^2, with
value semantics  phi(x) = sum_k c_k exp(2*pi*i <k, x>).  Reality of the values
is enforced structurally: every stored frequency k comes paired with -k
carrying the conjugate coefficient.  Coefficient bookkeeping under the
transpose action of a toral automorphism (the transport that solves twisted
coboundary equations) lives here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import RealityViolation, ValidationError
from .torus import IntMatrix, ToralAutomorphism, _inverse_unimodular, _matpow2

Freq = tuple[int, int]
Coeff = tuple[complex, complex]

REALITY_ABS_TOL = 1e-12
EVAL_IMAG_TOL = 1e-9
TWO_PI = 2.0 * np.pi


def pushforward_frequency(A: ToralAutomorphism, k, n: int) -> Freq:
    """(A^T)^n k in exact integer arithmetic; negative n via the exact inverse."""
    k1, k2 = int(k[0]), int(k[1])
    m = A.matrix if n >= 0 else _inverse_unimodular(A.matrix)
    p = _matpow2(m, abs(n))
    # transpose action: row vector times matrix
    return (p[0][0] * k1 + p[1][0] * k2, p[0][1] * k1 + p[1][1] * k2)


@dataclass(frozen=True)
class TrigMap:
    """Immutable sparse trigonometric polynomial T^2 -> R^2.

    ``terms`` is canonically sorted by frequency; construct through
    :meth:`from_terms` (or the convenience constructors) so the reality
    pairing and truncation metadata are enforced.
    """

    terms: tuple[tuple[Freq, Coeff], ...]
    trunc_eps: float | None = None
    _arrays: tuple = field(default=None, repr=False, compare=False)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_terms(
        terms: Mapping[Freq, Iterable[complex]] | Iterable[tuple[Freq, Iterable[complex]]],
        trunc_eps: float | None = None,
        validate: bool = True,
    ) -> "TrigMap":
        """Canonicalize a frequency -> coefficient mapping.

        Merges duplicate frequencies, drops terms below ``trunc_eps`` (when
        given), and checks the reality pairing c_{-k} = conj(c_k).
        """
        acc: dict[Freq, np.ndarray] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for k, c in items:
            key = (int(k[0]), int(k[1]))
            vec = np.asarray(c, dtype=complex)
            if vec.shape != (2,):
                raise ValidationError("coefficients must be 2-vectors")
            acc[key] = acc.get(key, np.zeros(2, dtype=complex)) + vec
        if trunc_eps is not None:
            acc = {
                k: v
                for k, v in acc.items()
                if float(np.max(np.abs(v))) >= trunc_eps
            }
        if validate:
            scale = max(
                (float(np.max(np.abs(v))) for v in acc.values()), default=1.0
            )
            tol = REALITY_ABS_TOL * max(scale, 1.0)
            for k, v in acc.items():
                mk = (-k[0], -k[1])
                if mk not in acc:
                    raise RealityViolation(f"frequency {k} lacks its mirror {mk}")
                if float(np.max(np.abs(acc[mk] - np.conj(v)))) > tol:
                    raise RealityViolation(
                        f"coefficients at {k} and {mk} are not conjugate"
                    )
            if (0, 0) in acc and float(np.max(np.abs(acc[0, 0].imag))) > tol:
                raise RealityViolation("zero-frequency coefficient must be real")
        ordered = tuple(
            (k, (complex(v[0]), complex(v[1]))) for k, v in sorted(acc.items())
        )
        return TrigMap(terms=ordered, trunc_eps=trunc_eps)

    @staticmethod
    def zero() -> "TrigMap":
        return TrigMap.from_terms({})

    @staticmethod
    def constant(vec) -> "TrigMap":
        v = np.asarray(vec, dtype=float)
        return TrigMap.from_terms({(0, 0): v.astype(complex)})

    @staticmethod
    def cosine_pair(k, vec) -> "TrigMap":
        """Coefficient ``vec`` placed at both k and -k.

        Pointwise this is 2*vec*cos(2*pi*<k,x>); the unit-coefficient
        normalization is the one under which transported coefficients carry
        no extra factor 1/2.
        """
        key = (int(k[0]), int(k[1]))
        if key == (0, 0):
            raise ValidationError("cosine_pair requires a nonzero frequency")
        v = np.asarray(vec, dtype=float).astype(complex)
        return TrigMap.from_terms({key: v, (-key[0], -key[1]): np.conj(v)})

    @staticmethod
    def cosine(k, vec) -> "TrigMap":
        """vec * cos(2*pi*<k,x>), i.e. coefficients vec/2 at +-k."""
        v = 0.5 * np.asarray(vec, dtype=float)
        return TrigMap.cosine_pair(k, v)

    # -- bookkeeping ----------------------------------------------------------

    def as_dict(self) -> dict[Freq, np.ndarray]:
        return {k: np.array(c, dtype=complex) for k, c in self.terms}

    def coefficient(self, k) -> np.ndarray:
        key = (int(k[0]), int(k[1]))
        for kk, cc in self.terms:
            if kk == key:
                return np.array(cc, dtype=complex)
        return np.zeros(2, dtype=complex)

    @property
    def nterms(self) -> int:
        return len(self.terms)

    def max_coeff(self) -> float:
        if not self.terms:
            return 0.0
        return max(float(np.max(np.abs(np.asarray(c)))) for _, c in self.terms)

    def _eval_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        cached = self._arrays
        if cached is None:
            freqs = np.array([k for k, _ in self.terms], dtype=float).reshape(-1, 2)
            coeffs = np.array([c for _, c in self.terms], dtype=complex).reshape(-1, 2)
            cached = (freqs, coeffs)
            object.__setattr__(self, "_arrays", cached)
        return cached

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other: "TrigMap") -> "TrigMap":
        acc = self.as_dict()
        for k, c in other.terms:
            acc[k] = acc.get(k, np.zeros(2, dtype=complex)) + np.asarray(c)
        return TrigMap.from_terms(acc, validate=False)

    def __sub__(self, other: "TrigMap") -> "TrigMap":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "TrigMap":
        return TrigMap.from_terms(
            {k: np.asarray(c) * factor for k, c in self.terms}, validate=False
        )

    def matrix_apply(self, m) -> "TrigMap":
        """Apply a real 2x2 matrix to every coefficient vector (i.e. to values)."""
        mm = np.asarray(m, dtype=float)
        return TrigMap.from_terms(
            {k: mm @ np.asarray(c) for k, c in self.terms}, validate=False
        )

    def compose_linear(self, A: ToralAutomorphism, n: int = 1) -> "TrigMap":
        """Exact coefficients of x -> phi(A^n x): transport k to (A^T)^n k."""
        return TrigMap.from_terms(
            {pushforward_frequency(A, k, n): np.asarray(c) for k, c in self.terms},
            validate=False,
        )

    # -- evaluation -------------------------------------------------------------

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def jacobian(self, x) -> np.ndarray:
        """d(value)/dx, shape (..., 2, 2); exact analytic derivative."""
        xs = np.asarray(x, dtype=float)
        single = xs.ndim == 1
        pts = np.atleast_2d(xs)
        freqs, coeffs = self._eval_arrays()
        if freqs.size == 0:
            out = np.zeros(pts.shape[:-1] + (2, 2))
            return out[0] if single else out
        phases = pts @ freqs.T
        waves = np.exp(1j * TWO_PI * phases)
        # d value_j / d x_m = sum_k c_jk * 2 pi i k_m * e^{2 pi i <k,x>}
        deriv = np.einsum(
            "...t,tj,tm->...jm", waves, coeffs, 1j * TWO_PI * freqs
        )
        out = np.real(deriv)
        return out[0] if single else out


def evaluate(f: TrigMap, x) -> np.ndarray:
    """Real value(s) of ``f`` at torus point(s) ``x`` of shape (..., 2).

    Raises:
        RealityViolation: if the imaginary residue of the sum exceeds 1e-9.
    """
    xs = np.asarray(x, dtype=float)
    single = xs.ndim == 1
    pts = np.atleast_2d(xs)
    freqs, coeffs = f._eval_arrays()
    if freqs.size == 0:
        out = np.zeros(pts.shape[:-1] + (2,))
        return out[0] if single else out
    phases = pts @ freqs.T
    vals = np.exp(1j * TWO_PI * phases) @ coeffs
    resid = float(np.max(np.abs(vals.imag)))
    if resid > EVAL_IMAG_TOL:
        raise RealityViolation(f"imaginary residue {resid:.3e} exceeds 1e-9")
    out = vals.real
    return out[0] if single else out


@dataclass(frozen=True)
class FrequencyOrbit:
    """The frequencies +-(A^T)^n k0 for n = 0..length, with growth metadata.

    ``growth_constant`` is the measured K > 0 with |elements[n]| >= K / lam^n,
    lam being the contracting eigenvalue of A (so 1/lam expands).
    """

    seed: Freq
    elements: tuple[Freq, ...]
    growth_constant: float

    @staticmethod
    def generate(A: ToralAutomorphism, k0, length: int) -> "FrequencyOrbit":
        seed = (int(k0[0]), int(k0[1]))
        if seed == (0, 0):
            raise ValidationError("frequency orbit requires a nonzero seed")
        elems = [pushforward_frequency(A, seed, n) for n in range(length + 1)]
        lam = A.small_eig
        # K = min_n |k_n| * lam^n  certifies |k_n| >= K * lam^{-n}
        K = min(
            float(np.hypot(float(k[0]), float(k[1]))) * lam**n
            for n, k in enumerate(elems)
        )
        if K <= 0:
            raise ValidationError("degenerate frequency orbit")
        return FrequencyOrbit(seed=seed, elements=tuple(elems), growth_constant=K)

    def norms(self) -> np.ndarray:
        return np.array(
            [np.hypot(float(k[0]), float(k[1])) for k in self.elements]
        )
