"""
Seeded samplers for Ginibre/Wishart matrices, uniform pure states and the
random mixed-state ensembles built from them.

Every sampler takes an explicit random stream. Streams are counter-based
(Philox keyed by ``(seed, stream_index)``), so a trial's randomness depends
only on its own index and never on how many other streams exist.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DensityMatrix",
    "RngStream",
    "SamplingError",
    "make_stream",
    "sample_ginibre",
    "sample_pure_state",
    "sample_induced_state_wishart",
    "sample_induced_state_trace",
    "sample_mixture_state",
    "density_log_weight",
]

_UINT64_MAX = 2**64 - 1

# above this many entries the pure-state projector is not materialized
_MAX_PROJECTOR_DIM = 1024

# mixture states accumulate this many pure states per BLAS call
_MIXTURE_CHUNK = 1024


class SamplingError(RuntimeError):
    """A draw produced a degenerate object (zero trace or zero norm)."""


class RngStream(np.random.Generator):
    """A numpy ``Generator`` bound to a Philox key ``(seed, stream_index)``.

    Two streams with the same key produce identical draws; distinct keys
    select disjoint Philox streams.
    """

    def __init__(self, seed: int, stream_index: int = 0):
        if not 0 <= seed <= _UINT64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if not 0 <= stream_index <= _UINT64_MAX:
            raise ValueError(f"stream_index must fit in 64 bits, got {stream_index}")
        key = np.array([seed, stream_index], dtype=np.uint64)
        super().__init__(np.random.Philox(key=key))
        self.seed = int(seed)
        self.stream_index = int(stream_index)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"


def make_stream(seed: int, stream_index: int = 0) -> RngStream:
    """Return the random stream identified by ``(seed, stream_index)``."""
    return RngStream(int(seed), int(stream_index))


@dataclass(frozen=True)
class DensityMatrix:
    """A state on C^d1 ⊗ C^d2 stored as a dense ``n x n`` complex array."""

    matrix: np.ndarray
    d1: int
    d2: int

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if self.d1 * self.d2 != m.shape[0]:
            raise ValueError(
                f"split ({self.d1}, {self.d2}) does not match dimension {m.shape[0]}")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d1, self.d2)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def check(self, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
              psd_tol: float = 1e-10) -> None:
        """Raise ``ValueError`` unless Hermitian, unit trace and PSD within tolerance."""
        m = self.matrix
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > herm_tol:
            raise ValueError(f"not Hermitian: max deviation {herm_err:.3g}")
        tr = np.trace(m)
        if abs(tr - 1) > trace_tol:
            raise ValueError(f"trace is {tr}, expected 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -psd_tol:
            raise ValueError(f"not positive semidefinite: lambda_min = {lam_min:.3g}")


def _complex_normal(shape, rng) -> np.ndarray:
    # real and imaginary parts have variance 1/2, so E|z|^2 = 1
    x = rng.standard_normal(size=tuple(shape) + (2,))
    z = np.empty(shape, dtype=np.complex128)
    z.real = x[..., 0]
    z.imag = x[..., 1]
    z *= np.sqrt(0.5)
    return z


def _check_split(n, split):
    d1, d2 = split
    if d1 < 1 or d2 < 1 or d1 * d2 != n:
        raise ValueError(f"split {split} does not factor n = {n}")
    return int(d1), int(d2)


def _hermitize(m):
    return 0.5 * (m + m.conj().T)


def sample_ginibre(n: int, s: int, rng) -> np.ndarray:
    """Draw an ``n x s`` matrix of i.i.d. standard complex Gaussians.

    Entries have independent real and imaginary parts of variance 1/2, so
    ``E|G_ij|^2 = 1``. Entries are drawn in row-major order.
    """
    if n < 1 or s < 1:
        raise ValueError(f"dimensions must be positive, got n={n}, s={s}")
    return _complex_normal((n, s), rng)


def sample_pure_state(dim: int, rng) -> np.ndarray:
    """Draw a unit vector uniformly distributed on the sphere of C^dim."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    psi = _complex_normal((dim,), rng)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise SamplingError("Gaussian vector has zero norm")
    return psi / norm


def sample_induced_state_wishart(n: int, s: int, split, rng,
                                 scale: float = 1.0) -> DensityMatrix:
    """Sample from the induced measure via a trace-normalized Wishart matrix.

    ``rho = G G^† / tr(G G^†)`` with ``G`` an ``n x s`` Ginibre matrix.
    ``scale`` multiplies ``G`` before normalization and cannot change the
    result's distribution; it exists so that invariance can be tested.
    """
    d1, d2 = _check_split(n, split)
    g = sample_ginibre(n, s, rng)
    if scale != 1.0:
        g *= scale
    w = g @ g.conj().T
    tr = np.trace(w).real
    if not tr > 0:
        raise SamplingError("Wishart matrix has zero trace")
    return DensityMatrix(_hermitize(w) / tr, d1, d2)


def sample_induced_state_trace(n: int, s: int, split, rng) -> DensityMatrix:
    """Sample from the induced measure as a partial trace of a pure state.

    A uniform ``psi`` on C^n ⊗ C^s is drawn and the ancilla factor C^s is
    traced out.
    """
    from .bipartite import partial_trace

    d1, d2 = _check_split(n, split)
    if s < 1:
        raise ValueError(f"s must be positive, got {s}")
    psi = sample_pure_state(n * s, rng)
    if n * s <= _MAX_PROJECTOR_DIM:
        rho = partial_trace(np.outer(psi, psi.conj()), n, s, over_second=True)
    else:
        # tr_2 |psi><psi| = Psi Psi^† with Psi the (n, s) amplitude array
        amp = psi.reshape(n, s)
        rho = amp @ amp.conj().T
    rho = _hermitize(rho)
    return DensityMatrix(rho / np.trace(rho).real, d1, d2)


def sample_mixture_state(n: int, s: int, split, rng) -> DensityMatrix:
    """Average of ``s`` independent uniform pure projectors on C^n."""
    d1, d2 = _check_split(n, split)
    if s < 1:
        raise ValueError(f"s must be positive, got {s}")
    rho = np.zeros((n, n), dtype=np.complex128)
    for start in range(0, s, _MIXTURE_CHUNK):
        stop = min(start + _MIXTURE_CHUNK, s)
        # row i of `block` is the i-th pure state
        block = np.stack([sample_pure_state(n, rng) for _ in range(start, stop)])
        rho += block.T @ block.conj()
    rho = _hermitize(rho) / s
    return DensityMatrix(rho / np.trace(rho).real, d1, d2)


def density_log_weight(rho, s: int) -> float:
    """Unnormalized log-density ``(s - n) log det rho`` of the induced measure.

    Returns 0 when ``s == n`` (the Hilbert-Schmidt uniform case) and ``-inf``
    for a singular ``rho`` when ``s > n``.
    """
    m = np.asarray(rho)
    n = m.shape[0]
    if s < n:
        raise ValueError(f"log-density is only defined for s >= n, got s={s}, n={n}")
    if s == n:
        return 0.0
    lam = np.linalg.eigvalsh(m)
    if lam[0] <= 0:
        return -np.inf
    return float((s - n) * np.sum(np.log(lam)))
