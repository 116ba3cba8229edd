"""
Convex geometry of the separable set on C^d ⊗ C^d.

Operators live in the real space of trace-zero Hermitian matrices with the
Hilbert-Schmidt inner product ``<x, y> = tr(x y)``; a state ``rho`` is the
point ``rho - I/n``, so the maximally mixed state is the origin.

The support function of the separable set is maximized over product pure
states by alternating top-eigenvector updates. This always gives a lower
bound. The gauge is exact only on 2⊗2, where membership is decided by the
PPT test. All Monte Carlo loops are batched over directions and restarts,
with each element iterated independently, so a direction's result does not
depend on the batch it was computed in.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import PPT_TOL, partial_transpose
from .ensembles import _complex_normal, make_stream

__all__ = [
    "WidthEstimate",
    "sample_direction",
    "support_separable",
    "support_states",
    "gauge_separable_2x2",
    "mean_width_separable",
    "mean_width_states",
    "mean_width_polar_2x2",
    "threshold_s0_estimate",
]

DEFAULT_RESTARTS = 32
DEFAULT_PRECISION = 1e-8
GAUGE_CAP = 1e6

_ALT_TOL = 1e-12
_ALT_MAX_ITER = 2000
_CHUNK = 512


@dataclass(frozen=True)
class WidthEstimate:
    mean: float
    stderr: float
    num_directions: int
    seed: int
    diagnostics: dict = field(default_factory=dict)


def _estimate(values, seed, **diagnostics):
    values = np.asarray(values, dtype=float)
    n = values.size
    stderr = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return WidthEstimate(float(values.mean()), stderr, n, int(seed), diagnostics)


def sample_direction(n: int, rng) -> np.ndarray:
    """Uniform random unit vector of the trace-zero Hermitian ``n x n`` matrices."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    g = _complex_normal((n, n), rng)
    h = 0.5 * (g + g.conj().T)
    h -= (np.trace(h).real / n) * np.eye(n)
    return h / np.linalg.norm(h)


def _random_unit_vectors(shape, d, rng):
    v = _complex_normal(tuple(shape) + (d,), rng)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _top_eigvec_2x2(h):
    p, r = h[:, 0, 0].real, h[:, 1, 1].real
    q = 0.5 * (h[:, 0, 1] + np.conj(h[:, 1, 0]))
    half = 0.5 * (p - r)
    lam = 0.5 * (p + r) + np.hypot(half, np.abs(q))
    # of the two null-space candidates, keep the better conditioned one
    v1 = np.stack([q, lam - p], axis=-1)
    v2 = np.stack([lam - r, np.conj(q)], axis=-1)
    use1 = (np.abs(q) ** 2 + (lam - p) ** 2) >= (np.abs(q) ** 2 + (lam - r) ** 2)
    v = np.where(use1[:, None], v1, v2).astype(complex)
    norm = np.linalg.norm(v, axis=-1)
    degenerate = norm == 0
    v[degenerate] = [1, 0]
    norm[degenerate] = 1
    return lam, v / norm[:, None]


def _top_eigvec(h):
    if h.shape[-1] == 2:
        return _top_eigvec_2x2(h)
    h = 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))
    w, v = np.linalg.eigh(h)
    return w[..., -1], v[..., :, -1]


def _alternating_max(u, b0):
    """Run alternating maximization of ``<a⊗b|u|a⊗b>``.

    ``u`` has shape ``(N, d, d, d, d)`` (indices ``i, j, k, l`` of
    ``u_{(ij),(kl)}``), ``b0`` has shape ``(N, R, d)``. Returns the converged
    values, shape ``(N, R)``.
    """
    N, R, d = b0.shape
    flat_u = np.repeat(u, R, axis=0)
    b = b0.reshape(N * R, d).copy()
    val = np.full(N * R, -np.inf)
    active = np.arange(N * R)
    for _ in range(_ALT_MAX_ITER):
        if active.size == 0:
            break
        ua, ba = flat_u[active], b[active]
        _, a = _top_eigvec(np.einsum("mj,mijkl,ml->mik", ba.conj(), ua, ba))
        new, bn = _top_eigvec(np.einsum("mi,mijkl,mk->mjl", a.conj(), ua, a))
        gain = new - val[active]
        b[active] = bn
        val[active] = np.maximum(val[active], new)
        active = active[~(gain < _ALT_TOL)]
    return val.reshape(N, R)


def support_separable(u, d: int, restarts: int = DEFAULT_RESTARTS, rng=None) -> float:
    """Lower bound on the support function of the separable set in direction ``u``.

    Starting vectors are drawn from ``rng`` in sequence, so a larger
    ``restarts`` with an identically seeded stream extends the same start set.
    """
    u = np.asarray(u)
    if u.shape != (d * d, d * d):
        raise ValueError(f"direction of shape {u.shape} does not match d={d}")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    if rng is None:
        rng = make_stream(0)
    b0 = _random_unit_vectors((1, restarts), d, rng)
    vals = _alternating_max(u.reshape(1, d, d, d, d), b0)
    return float(vals.max())


def support_states(u) -> float:
    """Support function of the full state set: ``lambda_max(u)``."""
    return float(np.linalg.eigvalsh(np.asarray(u))[-1])


def _separable_2x2(x, t, tol):
    m = np.eye(4) / 4 + x / t[:, None, None]
    lam = np.linalg.eigvalsh(m)[:, 0]
    lam_pt = np.linalg.eigvalsh(partial_transpose(m, 2, 2))[:, 0]
    return (lam >= -tol) & (lam_pt >= -tol)


def _gauge_batch(x, precision, tol=PPT_TOL):
    N = x.shape[0]
    out = np.zeros(N)
    nonzero = np.max(np.abs(x), axis=(1, 2)) > 0
    idx = np.flatnonzero(nonzero)
    if idx.size == 0:
        return out
    xs = x[idx]
    hi = np.ones(idx.size)
    ok = _separable_2x2(xs, hi, tol)
    while not ok.all():
        hi = np.where(ok, hi, 2 * hi)
        if np.any(hi > GAUGE_CAP):
            raise ArithmeticError("gauge bisection exceeded the cap; input is not traceless Hermitian?")
        ok = _separable_2x2(xs, hi, tol)
    lo = np.where(hi > 1, hi / 2, 0.0)
    while True:
        open_ = hi - lo > precision
        if not open_.any():
            break
        j = np.flatnonzero(open_)
        mid = 0.5 * (lo[j] + hi[j])
        inside = _separable_2x2(xs[j], mid, tol)
        hi[j] = np.where(inside, mid, hi[j])
        lo[j] = np.where(inside, lo[j], mid)
    out[idx] = 0.5 * (lo + hi)
    return out


def gauge_separable_2x2(x, precision: float = DEFAULT_PRECISION) -> float:
    """Gauge of the separable 2⊗2 set (centred at ``I/4``) at traceless ``x``.

    Bisection on ``t`` for membership of ``I/4 + x/t`` in the separable set,
    decided exactly by positivity and the PPT test. The result is within
    ``precision/2`` of the true gauge.
    """
    x = np.asarray(x)
    if x.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got shape {x.shape}")
    if np.max(np.abs(x - x.conj().T)) > 1e-12 or abs(np.trace(x)) > 1e-12:
        raise ValueError("x must be traceless Hermitian")
    return float(_gauge_batch(x[None], precision)[0])


def _directions(n, num_dirs, seed, start, stop):
    streams = [make_stream(seed, i) for i in range(start, stop)]
    return streams, np.stack([sample_direction(n, r) for r in streams])


def mean_width_separable(d: int, num_dirs: int, restarts: int = DEFAULT_RESTARTS,
                         seed: int = 0) -> WidthEstimate:
    """Monte Carlo mean width of the separable set (a lower-bound estimator).

    Direction ``i`` and its starting vectors come from stream ``(seed, i)``.
    ``diagnostics["restart_agreement"]`` is the fraction of directions whose
    best value was reached by at least two restarts.
    """
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    n = d * d
    vals = np.empty(num_dirs)
    agree = np.empty(num_dirs, dtype=bool)
    for start in range(0, num_dirs, _CHUNK):
        stop = min(start + _CHUNK, num_dirs)
        streams, u = _directions(n, num_dirs, seed, start, stop)
        b0 = np.stack([_random_unit_vectors((restarts,), d, r) for r in streams])
        per_start = _alternating_max(u.reshape(-1, d, d, d, d), b0)
        best = per_start.max(axis=1)
        vals[start:stop] = best
        agree[start:stop] = np.sum(per_start >= best[:, None] - 1e-9, axis=1) >= 2
    return _estimate(vals, seed, restarts=restarts,
                     restart_agreement=float(agree.mean()))


def mean_width_states(d: int, num_dirs: int, seed: int = 0) -> WidthEstimate:
    """Mean width of the full state set over the same directions as above."""
    n = d * d
    vals = np.empty(num_dirs)
    for start in range(0, num_dirs, _CHUNK):
        stop = min(start + _CHUNK, num_dirs)
        _, u = _directions(n, num_dirs, seed, start, stop)
        vals[start:stop] = np.linalg.eigvalsh(u)[:, -1]
    return _estimate(vals, seed)


def mean_width_polar_2x2(num_dirs: int, precision: float = DEFAULT_PRECISION,
                         seed: int = 0, d: int = 2) -> WidthEstimate:
    """Monte Carlo mean width of the polar of the separable 2⊗2 set.

    The integrand is the gauge of the separable set, by bipolarity.
    """
    if d != 2:
        raise ValueError("the polar mean width is only computed for d = 2")
    vals = np.empty(num_dirs)
    for start in range(0, num_dirs, _CHUNK):
        stop = min(start + _CHUNK, num_dirs)
        _, u = _directions(4, num_dirs, seed, start, stop)
        vals[start:stop] = _gauge_batch(u, precision)
    return _estimate(vals, seed, precision=precision)


def threshold_s0_estimate(width: WidthEstimate) -> tuple[float, float]:
    """Square the polar mean width; first-order error propagation."""
    return width.mean ** 2, 2 * abs(width.mean) * width.stderr
