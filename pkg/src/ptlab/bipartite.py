"""Partial transpose, partial trace and the PPT test on C^d1 ⊗ C^d2."""
from __future__ import annotations

import numpy as np

__all__ = [
    "PPT_TOL",
    "partial_transpose",
    "partial_trace",
    "is_ppt",
    "is_separable_small",
]

PPT_TOL = 1e-10

_EXACT_SPLITS = {(2, 2), (2, 3), (3, 2)}


def _split_of(rho, d1, d2):
    if d1 is None or d2 is None:
        try:
            d1, d2 = rho.d1, rho.d2
        except AttributeError:
            raise ValueError("a split (d1, d2) is required for a bare array") from None
    return int(d1), int(d2)


def partial_transpose(rho, d1: int | None = None, d2: int | None = None,
                      sys: int = 1) -> np.ndarray:
    """Transpose one tensor factor of an operator on C^d1 ⊗ C^d2.

    With ``sys=1`` (the default) the second factor is transposed, i.e. every
    ``d2 x d2`` block of the ``d1 x d1`` block matrix is transposed in place.
    ``sys=0`` transposes the first factor instead. Leading batch axes are
    carried through unchanged.

    Parameters
    ----------
    rho : array_like or DensityMatrix
        Operator(s) of shape ``(..., d1*d2, d1*d2)``.
    d1, d2 : int, optional
        Factor dimensions; read from ``rho`` when it is a ``DensityMatrix``.
    sys : {0, 1}
        Which factor to transpose.
    """
    d1, d2 = _split_of(rho, d1, d2)
    m = np.asarray(rho)
    n = d1 * d2
    if m.shape[-2:] != (n, n):
        raise ValueError(f"shape {m.shape} does not match split ({d1}, {d2})")
    batch = m.shape[:-2]
    t = m.reshape(batch + (d1, d2, d1, d2))
    k = len(batch)
    axes = list(range(k))
    if sys == 1:
        axes += [k, k + 3, k + 2, k + 1]
    elif sys == 0:
        axes += [k + 2, k + 1, k, k + 3]
    else:
        raise ValueError(f"sys must be 0 or 1, got {sys}")
    return t.transpose(axes).reshape(batch + (n, n))


def partial_trace(m, a: int, b: int, over_second: bool = True) -> np.ndarray:
    """Trace out one factor of an operator on C^a ⊗ C^b.

    Returns an ``a x a`` matrix when ``over_second`` is true, otherwise ``b x b``.
    """
    m = np.asarray(m)
    if m.shape != (a * b, a * b):
        raise ValueError(f"shape {m.shape} does not match split ({a}, {b})")
    t = m.reshape(a, b, a, b)
    if over_second:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def is_ppt(rho, tol: float = PPT_TOL, d1: int | None = None,
           d2: int | None = None) -> tuple[bool, float]:
    """Return ``(lambda_min(rho^Γ) >= -tol, lambda_min(rho^Γ))``."""
    pt = partial_transpose(rho, d1, d2)
    lam_min = float(np.linalg.eigvalsh(pt)[0])
    return lam_min >= -tol, lam_min


def is_separable_small(rho, tol: float = PPT_TOL, d1: int | None = None,
                       d2: int | None = None) -> bool:
    """Exact separability test for 2⊗2 and 2⊗3 states (PPT criterion).

    Any other split raises ``ValueError``: beyond these dimensions PPT states
    can be entangled and this test would silently overstate separability.
    """
    d1, d2 = _split_of(rho, d1, d2)
    if (d1, d2) not in _EXACT_SPLITS:
        raise ValueError(
            f"separability is only decided for 2x2 and 2x3 systems, got {d1}x{d2}")
    return is_ppt(rho, tol, d1, d2)[0]
