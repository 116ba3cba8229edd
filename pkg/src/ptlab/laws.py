"""
Reference limit laws for rescaled spectra.

``SC(a, sigma2)`` is the semicircle law centred at ``a`` with variance
``sigma2``. ``MP(alpha)`` is the Marchenko-Pastur law normalized to mean 1
and variance ``1/alpha``: the limit of the spectrum of ``d^2 rho`` for a
random induced state with ``s = alpha d^2``. Only ``alpha >= 1`` is
supported, so MP never has an atom at zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate

__all__ = [
    "LawKind",
    "SpectralLaw",
    "semicircle",
    "marchenko_pastur",
    "support",
    "sc_density",
    "sc_cdf",
    "catalan",
    "sc_central_moment",
    "mp_density",
    "law_density",
    "law_cdf",
    "law_central_moment",
]

MP_NORMALIZATION = "mean-1 (limit of d^2 rho for s = alpha d^2)"

_CATALAN_MAX = 30


class LawKind(str, Enum):
    SEMICIRCLE = "semicircle"
    MARCHENKO_PASTUR = "marchenko_pastur"


@dataclass(frozen=True)
class SpectralLaw:
    kind: LawKind
    a: float = 0.0
    sigma2: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind is LawKind.SEMICIRCLE and not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if self.kind is LawKind.MARCHENKO_PASTUR and not self.alpha >= 1:
            raise ValueError(f"Marchenko-Pastur requires alpha >= 1, got {self.alpha}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def semicircle(a: float, sigma2: float) -> SpectralLaw:
    return SpectralLaw(LawKind.SEMICIRCLE, a=float(a), sigma2=float(sigma2))


def marchenko_pastur(alpha: float) -> SpectralLaw:
    return SpectralLaw(LawKind.MARCHENKO_PASTUR, alpha=float(alpha))


def support(law: SpectralLaw) -> tuple[float, float]:
    if law.kind is LawKind.SEMICIRCLE:
        return law.a - 2 * law.sigma, law.a + 2 * law.sigma
    r = 1 / math.sqrt(law.alpha)
    return (1 - r) ** 2, (1 + r) ** 2


def _require(law, kind):
    if law.kind is not kind:
        raise ValueError(f"expected a {kind.value} law, got {law.kind.value}")


def sc_density(law: SpectralLaw, x):
    """Semicircle density ``sqrt(4 sigma^2 - (x - a)^2) / (2 pi sigma^2)``."""
    _require(law, LawKind.SEMICIRCLE)
    x = np.asarray(x, dtype=float)
    r2 = 4 * law.sigma2 - (x - law.a) ** 2
    out = np.sqrt(np.clip(r2, 0, None)) / (2 * np.pi * law.sigma2)
    return out if out.ndim else float(out)


def sc_cdf(law: SpectralLaw, x):
    _require(law, LawKind.SEMICIRCLE)
    u = np.clip((np.asarray(x, dtype=float) - law.a) / (2 * law.sigma), -1.0, 1.0)
    out = 0.5 + (u * np.sqrt(1 - u * u) + np.arcsin(u)) / np.pi
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def catalan(k: int) -> int:
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k > _CATALAN_MAX:
        raise OverflowError(f"catalan({k}) exceeds the supported range k <= {_CATALAN_MAX}")
    return math.comb(2 * k, k) // (k + 1)


def sc_central_moment(law: SpectralLaw, k: int) -> float:
    """``E[(X - a)^k]``: zero for odd ``k``, ``C_{k/2} sigma^k`` for even ``k``."""
    _require(law, LawKind.SEMICIRCLE)
    if k % 2:
        return 0.0
    return catalan(k // 2) * law.sigma2 ** (k // 2)


def mp_density(law: SpectralLaw, x):
    _require(law, LawKind.MARCHENKO_PASTUR)
    lo, hi = support(law)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    xs = np.where(inside, x, 1.0)
    out = np.where(
        inside,
        law.alpha / (2 * np.pi * xs) * np.sqrt(np.clip((hi - xs) * (xs - lo), 0, None)),
        0.0,
    )
    return out if out.ndim else float(out)


def law_density(law: SpectralLaw, x):
    if law.kind is LawKind.SEMICIRCLE:
        return sc_density(law, x)
    return mp_density(law, x)


def _mp_cdf_scalar(law, x):
    lo, hi = support(law)
    if x <= lo:
        return 0.0
    if x >= hi:
        return 1.0
    # x = lo + 2r sin^2(phi/2) removes both square-root edges from the integrand;
    # the half-angle form stays finite at the hard edge lo = 0 (alpha = 1)
    r = 0.5 * (hi - lo)
    phi_x = 2 * math.asin(math.sqrt(min((x - lo) / (2 * r), 1.0)))

    def f(phi):
        sh2 = math.sin(0.5 * phi) ** 2
        ch2 = 1.0 - sh2
        denom = lo + 2 * r * sh2
        ratio = sh2 / denom if denom > 0 else 1 / (2 * r)
        return law.alpha * r * r * 2 * ch2 * ratio / math.pi

    val, err = integrate.quad(f, 0.0, phi_x, epsabs=1e-12, epsrel=1e-12, limit=200)
    if err > 1e-9:
        raise ArithmeticError(f"Marchenko-Pastur CDF quadrature did not converge at x={x}")
    return min(max(val, 0.0), 1.0)


def law_cdf(law: SpectralLaw, x):
    """CDF of ``law``: closed form for SC, adaptive quadrature for MP."""
    if law.kind is LawKind.SEMICIRCLE:
        return sc_cdf(law, x)
    x = np.asarray(x, dtype=float)
    out = np.vectorize(lambda v: _mp_cdf_scalar(law, v), otypes=[float])(x)
    return out if out.ndim else float(out)


def law_central_moment(law: SpectralLaw, k: int, center: float = 1.0) -> float:
    """``E[(X - center)^k]``; exact for SC about its centre, quadrature otherwise."""
    if law.kind is LawKind.SEMICIRCLE and center == law.a:
        return sc_central_moment(law, k)
    lo, hi = support(law)
    val, _ = integrate.quad(lambda v: (v - center) ** k * law_density(law, v), lo, hi,
                            epsabs=1e-13, limit=200)
    return val
