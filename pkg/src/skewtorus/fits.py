"""Small deterministic regression helpers shared by the estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientScales


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r2: float
    npoints: int


def fit_line(x: Sequence[float], y: Sequence[float], min_points: int = 4) -> LineFit:
    """Least-squares line y = slope*x + intercept with coefficient R^2.

    Raises:
        InsufficientScales: with fewer than ``min_points`` samples.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InsufficientScales("fit_line needs matching 1-d samples")
    n = xs.size
    if n < min_points:
        raise InsufficientScales(f"need at least {min_points} points, got {n}")
    xm = xs.mean()
    ym = ys.mean()
    sxx = float(np.sum((xs - xm) ** 2))
    if sxx == 0.0:
        raise InsufficientScales("degenerate abscissa (all x equal)")
    sxy = float(np.sum((xs - xm) * (ys - ym)))
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_res = float(np.sum((ys - (slope * xs + intercept)) ** 2))
    ss_tot = float(np.sum((ys - ym) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LineFit(slope=slope, intercept=intercept, r2=r2, npoints=n)


def log_decay_rate(
    values: Sequence[float],
    indices: Sequence[int] | None = None,
    floor: float = 0.0,
    min_points: int = 4,
) -> LineFit:
    """Fit log|values[n]| ~ rate*n + const, skipping entries <= floor."""
    vals = np.asarray(values, dtype=float)
    idx = np.arange(vals.size) if indices is None else np.asarray(indices)
    mask = np.abs(vals) > floor
    if int(mask.sum()) < min_points:
        raise InsufficientScales(
            f"only {int(mask.sum())} values above the floor {floor}"
        )
    return fit_line(idx[mask], np.log(np.abs(vals[mask])), min_points=min_points)


def r2_sequence(npoints: int, dim: int = 2) -> np.ndarray:
    """Deterministic low-discrepancy points in [0,1)^dim (additive recurrence).

    Uses the generalized-golden-ratio increments, seedless and reproducible.
    """
    # unique positive root of x**(dim+1) = x + 1
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (dim + 1))
    alpha = np.array([(1.0 / phi) ** (k + 1) for k in range(dim)])
    n = np.arange(1, npoints + 1, dtype=float)[:, None]
    return np.mod(0.5 + n * alpha[None, :], 1.0)


def geometric_tail_limit(values: Sequence[float]) -> tuple[float, float]:
    """Accelerated limit of a sequence a_n = a + C*rho^n, |rho| < 1.

    Estimates rho from successive differences and removes the leading
    geometric error from the last usable entry; falls back to the plain mean
    of the last five entries when the differences are too noisy to trust.
    Returns (limit, rho_estimate); rho_estimate is nan for the fallback.
    """
    a = np.asarray(values, dtype=float)
    if a.size < 3:
        return float(a[-1]), float("nan")
    tail_mean = float(np.mean(a[-min(5, a.size):]))
    d = np.diff(a)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    usable = np.abs(d) > 1e-14 * max(scale, 1e-300)
    if int(usable.sum()) < 3:
        return tail_mean, float("nan")
    # ratios of consecutive differences estimate rho; require a stable tail
    idx = np.nonzero(usable)[0]
    ratios = []
    for i, j in zip(idx[:-1], idx[1:]):
        if j == i + 1:
            ratios.append(d[j] / d[i])
    if len(ratios) < 3:
        return tail_mean, float("nan")
    rho = float(np.median(np.asarray(ratios)[-7:]))
    if not (1e-6 < abs(rho) < 0.999):
        return tail_mean, float("nan")
    k = int(idx[-1])  # last usable difference d[k] = a[k+1] - a[k]
    limit = float(a[k + 1] + d[k] * rho / (1.0 - rho))
    return limit, rho
