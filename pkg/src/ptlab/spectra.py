"""Dense Hermitian spectra and statistics of their empirical distributions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .laws import SpectralLaw, law_cdf

__all__ = [
    "Spectrum",
    "Histogram",
    "hermitian_eigenvalues",
    "rescale",
    "interval_fraction",
    "central_moment",
    "ks_distance",
    "make_histogram",
    "extremes",
]

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a Hermitian matrix, sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("a spectrum is a nonempty 1-d array")
        if np.any(np.diff(v) < 0):
            v = np.sort(v)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    def __len__(self):
        return self.dim


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    normalized_density: np.ndarray
    below: int = 0
    above: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.below + self.above


def hermitian_eigenvalues(m, tol: float = HERMITIAN_TOL) -> Spectrum:
    """All eigenvalues of a dense Hermitian matrix (LAPACK, tridiagonal reduction).

    Raises ``ValueError`` if ``m`` deviates from Hermitian by more than
    ``tol`` relative to its largest entry.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > tol * scale:
        raise ValueError(f"matrix is not Hermitian: max |M - M^H| = {dev:.3g}")
    try:
        vals = scipy.linalg.eigvalsh(m, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigensolver failed: {exc}") from exc
    return Spectrum(vals)


def rescale(spec: Spectrum, factor: float) -> Spectrum:
    if not factor > 0:
        raise ValueError(f"factor must be positive, got {factor}")
    return Spectrum(spec.values * factor)


def interval_fraction(spec: Spectrum, a: float, b: float) -> float:
    """Fraction of eigenvalues in the closed interval ``[a, b]``."""
    if a > b:
        raise ValueError(f"empty interval [{a}, {b}]")
    v = spec.values
    inside = np.searchsorted(v, b, side="right") - np.searchsorted(v, a, side="left")
    return inside / v.size


def central_moment(spec: Spectrum, center: float, k: int) -> float:
    return float(np.mean((spec.values - center) ** k))


def ks_distance(spec: Spectrum, law: SpectralLaw) -> float:
    """Kolmogorov-Smirnov distance between the spectrum's ESD and ``law``."""
    v = spec.values
    n = v.size
    cdf = np.asarray(law_cdf(law, v), dtype=float)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def make_histogram(spec: Spectrum, bins: int, range: tuple[float, float]) -> Histogram:
    """Equal-width histogram over ``range``; values outside are tallied apart.

    The normalized density is relative to the full sample size, so it
    integrates to the in-range fraction.
    """
    lo, hi = range
    if bins < 1 or not hi > lo:
        raise ValueError(f"need bins >= 1 and a nonempty range, got {bins}, {range}")
    v = spec.values
    counts, edges = np.histogram(v, bins=bins, range=(lo, hi))
    below = int(np.count_nonzero(v < lo))
    above = int(np.count_nonzero(v > hi))
    density = counts / (v.size * np.diff(edges))
    return Histogram(edges, counts, density, below, above)


def extremes(spec: Spectrum) -> tuple[float, float]:
    return float(spec.values[0]), float(spec.values[-1])
