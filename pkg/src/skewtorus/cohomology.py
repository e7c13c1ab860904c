"""Twisted coboundary equations psi(Ax) - B psi(x) = g(x) in Fourier space.

The right-hand side is decomposed along the eigenbasis of B, which splits the
vector equation into two scalar equations with multipliers 1/mu and mu
(mu = contracting eigenvalue of B).  Each scalar equation is solved by the
one-sided series that converges:

  * expanding multiplier:  psi_u = -sum_{n>=0} mu^{n+1} g_u o A^n
  * contracting multiplier: psi_s = +sum_{n>=1} mu^{n-1} g_s o A^{-n}

realized exactly on Fourier coefficients by transporting each frequency along
its orbit under A^T and truncating once the geometric factor drops below the
requested epsilon.  Zero-frequency (constant) components are solved by the
closed geometric-series formula.

The solution defines the fiber-shear conjugacy h(x, y) = (x, y + psi(x))
between the skew products built from phi_0 and phi_1 = phi_0 + g, and its
Hoelder exponent log(mu)/log(lam) is estimated two independent ways
(increment scaling and coefficient decay).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    InsufficientScales,
    MeanObstruction,
    NoConvergence,
    ValidationError,
)
from .fits import LineFit, fit_line, r2_sequence
from .fourier import Freq, TrigMap, evaluate, pushforward_frequency
from .torus import ToralAutomorphism

ORBIT_CAP = 10_000
RESIDUAL_GRID = 128
ALPHA_WINDOW = (0.0, 1.5)
TRUST_R2 = 0.9
TRUST_ALPHA_MARGIN = 0.02


@dataclass(frozen=True)
class CohomologySolution:
    """Solution psi with its measured functional-equation residual."""

    psi: TrigMap
    residual_sup: float
    trunc_eps: float
    predicted_alpha: float


@dataclass(frozen=True)
class ConjugacyMap:
    """The fiber shear h(x, y) = (x, y + psi(x)) on T^4."""

    psi: TrigMap
    residual_sup: float

    def apply(self, z) -> np.ndarray:
        zz = np.atleast_2d(np.asarray(z, dtype=float))
        out = zz.copy()
        out[:, 2:] = np.mod(out[:, 2:] + evaluate(self.psi, zz[:, :2]), 1.0)
        return out[0] if np.asarray(z).ndim == 1 else out

    def apply_inverse(self, z) -> np.ndarray:
        zz = np.atleast_2d(np.asarray(z, dtype=float))
        out = zz.copy()
        out[:, 2:] = np.mod(out[:, 2:] - evaluate(self.psi, zz[:, :2]), 1.0)
        return out[0] if np.asarray(z).ndim == 1 else out


@dataclass(frozen=True)
class HolderEstimate:
    """A fitted regularity exponent with its diagnostics.

    ``fit_points`` rows are (abscissa, value, fit residual) in the log-log
    coordinates of the chosen method, ready for CSV export.
    """

    alpha_hat: float
    method: Literal["increments", "fourier_decay"]
    fit_r2: float
    scale_range: tuple[float, float]
    trusted: bool
    fit_points: tuple[tuple[float, float, float], ...]


def _eigenbasis(B: ToralAutomorphism) -> np.ndarray:
    return np.column_stack([B.e_s, B.e_u])


def _orbit_length(coeff_mag: float, mu: float, trunc_eps: float, nseeds: int) -> int:
    """Smallest N with mu^(N+1) * coeff_mag below the per-seed budget."""
    budget = trunc_eps / max(2 * nseeds, 1)
    if coeff_mag == 0.0:
        return 0
    n = max(0, int(math.ceil(math.log(budget / coeff_mag) / math.log(mu))) - 1)
    if n > ORBIT_CAP:
        raise NoConvergence(
            f"orbit length {n} exceeds the cap {ORBIT_CAP}; coefficients decay "
            "too slowly for the requested truncation"
        )
    return n


def solve_cohomology(
    A: ToralAutomorphism,
    B: ToralAutomorphism,
    g: TrigMap,
    trunc_eps: float = 1e-12,
) -> CohomologySolution:
    """Solve psi o A - B psi = g by one-sided Fourier series.

    Requires the base to dominate the fiber: 0 < small_eig(A) < small_eig(B).

    Raises:
        NoConvergence: orbit transport does not reach the truncation level
            within the configured cap.
        MeanObstruction: defensive; a unit multiplier would make the constant
            component unsolvable, which hyperbolicity of B excludes.
    """
    lam, mu = A.small_eig, B.small_eig
    if not (0.0 < lam < mu < 1.0):
        raise ValidationError(
            f"need 0 < small_eig(A)={lam:.6f} < small_eig(B)={mu:.6f} < 1"
        )
    if abs(1.0 - mu) < 1e-12:
        raise MeanObstruction("fiber multiplier too close to 1")

    basis = _eigenbasis(B)
    basis_inv = np.linalg.inv(basis)

    # scalar components: g_k = gs_k * e_s(B) + gu_k * e_u(B)
    gs: dict[Freq, complex] = {}
    gu: dict[Freq, complex] = {}
    for k, c in g.terms:
        comps = basis_inv @ np.asarray(c)
        if comps[0] != 0:
            gs[k] = complex(comps[0])
        if comps[1] != 0:
            gu[k] = complex(comps[1])

    psi_s: dict[Freq, complex] = {}
    psi_u: dict[Freq, complex] = {}

    # expanding component: psi_u = -sum_{n>=0} mu^{n+1} g_u o A^n
    nseeds_u = max(len(gu), 1)
    for k, c in sorted(gu.items()):
        if k == (0, 0):
            psi_u[k] = psi_u.get(k, 0.0) - c * mu / (1.0 - mu)
            continue
        N = _orbit_length(abs(c), mu, trunc_eps, nseeds_u)
        freq = k
        for n in range(N + 1):
            psi_u[freq] = psi_u.get(freq, 0.0) - mu ** (n + 1) * c
            freq = pushforward_frequency(A, freq, 1)

    # contracting component: psi_s = +sum_{n>=1} mu^{n-1} g_s o A^{-n}
    nseeds_s = max(len(gs), 1)
    for k, c in sorted(gs.items()):
        if k == (0, 0):
            psi_s[k] = psi_s.get(k, 0.0) + c / (1.0 - mu)
            continue
        N = _orbit_length(abs(c) / mu, mu, trunc_eps, nseeds_s)
        freq = k
        for n in range(1, N + 2):
            freq = pushforward_frequency(A, freq, -1)
            psi_s[freq] = psi_s.get(freq, 0.0) + mu ** (n - 1) * c

    coeffs: dict[Freq, np.ndarray] = {}
    for k, c in psi_s.items():
        coeffs[k] = coeffs.get(k, np.zeros(2, dtype=complex)) + c * B.e_s
    for k, c in psi_u.items():
        coeffs[k] = coeffs.get(k, np.zeros(2, dtype=complex)) + c * B.e_u
    psi = TrigMap.from_terms(coeffs, trunc_eps=trunc_eps)

    residual = residual_sup(A, B, psi, g, grid=RESIDUAL_GRID)
    return CohomologySolution(
        psi=psi,
        residual_sup=residual,
        trunc_eps=trunc_eps,
        predicted_alpha=math.log(mu) / math.log(lam),
    )


def residual_sup(
    A: ToralAutomorphism,
    B: ToralAutomorphism,
    psi: TrigMap,
    g: TrigMap,
    grid: int = RESIDUAL_GRID,
) -> float:
    """sup over a grid of |psi(Ax) - B psi(x) - g(x)| (Euclidean norm)."""
    r = psi.compose_linear(A, 1) - psi.matrix_apply(B.as_array()) - g
    ticks = np.arange(grid) / grid
    xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    vals = evaluate(r, pts)
    return float(np.max(np.hypot(vals[:, 0], vals[:, 1])))


def build_conjugacy(
    phi0: TrigMap,
    phi1: TrigMap,
    A: ToralAutomorphism,
    B: ToralAutomorphism,
    trunc_eps: float = 1e-12,
) -> ConjugacyMap:
    """Conjugacy h(x,y) = (x, y + psi(x)) intertwining the two skew products.

    The conjugation residual sup|h o L0 - L1 o h| over a grid equals the
    functional-equation residual of psi (the base components agree exactly and
    the fiber difference is psi o A - B psi - (phi1 - phi0)).
    """
    sol = solve_cohomology(A, B, phi1 - phi0, trunc_eps=trunc_eps)
    return ConjugacyMap(psi=sol.psi, residual_sup=sol.residual_sup)


# -- regularity estimation -----------------------------------------------------

def estimate_holder(
    psi: TrigMap,
    method: Literal["increments", "fourier_decay"],
    A: ToralAutomorphism,
    scale_range: tuple[int, int] = (3, 17),
    nsamples: int = 4096,
) -> HolderEstimate:
    """Fit the Hoelder exponent of psi from increments or coefficient decay.

    increments: M(h) = sup over a low-discrepancy sample of
    |psi(x + h e_u(A)) - psi(x)| for dyadic h = 2^-j, j in scale_range;
    the exponent is the slope of log M against log h.

    fourier_decay: slope of log|psi_k| against -log|k| over the stored
    nonzero frequencies.

    Raises:
        InsufficientScales: fewer than 4 usable scales or coefficients.
    """
    if psi.nterms == 0 or (psi.nterms == 1 and psi.terms[0][0] == (0, 0)):
        raise ValidationError("regularity estimate requires a nonconstant map")
    if method == "increments":
        xs, ys = _increment_data(psi, A, scale_range, nsamples)
        scale_lo, scale_hi = 2.0 ** -scale_range[1], 2.0 ** -scale_range[0]
    elif method == "fourier_decay":
        xs, ys = _decay_data(psi)
        scale_lo, scale_hi = float(np.min(xs)), float(np.max(xs))
    else:
        raise ValidationError(f"unknown method {method!r}")
    fit = fit_line(xs, ys, min_points=4)
    alpha = min(max(fit.slope, ALPHA_WINDOW[0] + 1e-9), ALPHA_WINDOW[1] - 1e-9)
    trusted = (
        fit.r2 >= TRUST_R2
        and TRUST_ALPHA_MARGIN <= alpha <= 1.0 - TRUST_ALPHA_MARGIN
    )
    points = tuple(
        (float(x), float(y), float(y - (fit.slope * x + fit.intercept)))
        for x, y in zip(xs, ys)
    )
    return HolderEstimate(
        alpha_hat=alpha,
        method=method,
        fit_r2=fit.r2,
        scale_range=(scale_lo, scale_hi),
        trusted=trusted,
        fit_points=points,
    )


def _increment_data(
    psi: TrigMap,
    A: ToralAutomorphism,
    scale_range: tuple[int, int],
    nsamples: int,
) -> tuple[np.ndarray, np.ndarray]:
    j_lo, j_hi = scale_range
    if j_hi - j_lo + 1 < 4:
        raise InsufficientScales("need at least 4 dyadic scales")
    base = r2_sequence(nsamples, 2)
    vals0 = evaluate(psi, base)
    xs, ys = [], []
    for j in range(j_lo, j_hi + 1):
        h = 2.0**-j
        shifted = np.mod(base + h * A.e_u[None, :], 1.0)
        diff = evaluate(psi, shifted) - vals0
        m = float(np.max(np.hypot(diff[:, 0], diff[:, 1])))
        if m <= 0.0:
            continue
        xs.append(math.log(h))
        ys.append(math.log(m))
    if len(xs) < 4:
        raise InsufficientScales("fewer than 4 usable dyadic scales")
    return np.asarray(xs), np.asarray(ys)


def _decay_data(psi: TrigMap) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    for k, c in psi.terms:
        if k == (0, 0):
            continue
        mag = float(np.linalg.norm(np.asarray(c)))
        if mag <= 0.0:
            continue
        xs.append(-math.log(math.hypot(float(k[0]), float(k[1]))))
        ys.append(math.log(mag))
    if len(xs) < 4:
        raise InsufficientScales("fewer than 4 nonzero frequencies")
    return np.asarray(xs), np.asarray(ys)
