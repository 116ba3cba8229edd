import numpy as np
import pytest

from conftest import bell_projector, random_density
from ptlab.bipartite import is_ppt, is_separable_small, partial_trace, partial_transpose
from ptlab.ensembles import DensityMatrix


def brute_force_pt(m, d1, d2):
    """Entry-by-entry definition: <i j|rho^Γ|k l> = <i l|rho|k j>."""
    out = np.empty_like(m)
    for i in range(d1):
        for j in range(d2):
            for k in range(d1):
                for l in range(d2):
                    out[i * d2 + j, k * d2 + l] = m[i * d2 + l, k * d2 + j]
    return out


SPLITS = [(2, 2), (2, 3), (3, 2), (3, 4), (1, 5)]


@pytest.mark.parametrize("d1,d2", SPLITS)
def test_matches_entrywise_definition(d1, d2):
    rng = np.random.default_rng(d1 * 10 + d2)
    m = rng.standard_normal((d1 * d2,) * 2) + 1j * rng.standard_normal((d1 * d2,) * 2)
    assert np.array_equal(partial_transpose(m, d1, d2), brute_force_pt(m, d1, d2))


def test_identity_invariant():
    assert np.array_equal(partial_transpose(np.eye(4) / 4, 2, 2), np.eye(4) / 4)


def test_product_operators():
    rng = np.random.default_rng(0)
    t1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    t2 = np.array([[0, 1], [0, 0]], dtype=complex)
    t2 = t2 + 0.3j * t2.T
    assert np.allclose(partial_transpose(np.kron(t1, t2), 2, 2), np.kron(t1, t2.T), atol=0)
    assert np.allclose(partial_transpose(np.kron(t1, t2), 2, 2, sys=0), np.kron(t1.T, t2), atol=0)


def test_bell_partial_transpose_spectrum():
    # (|phi+><phi+|)^Γ is half the swap operator: eigenvalues ±1/2
    lam = np.linalg.eigvalsh(partial_transpose(bell_projector(), 2, 2))
    assert np.allclose(lam, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        partial_trace(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        partial_transpose(np.eye(4))


def test_reads_split_from_density_matrix():
    rho = DensityMatrix(bell_projector(), 2, 2)
    assert np.array_equal(partial_transpose(rho), partial_transpose(bell_projector(), 2, 2))


def test_batched_input():
    rng = np.random.default_rng(3)
    stack = np.stack([random_density(rng, 6) for _ in range(4)])
    batched = partial_transpose(stack, 2, 3)
    for k in range(4):
        assert np.array_equal(batched[k], partial_transpose(stack[k], 2, 3))


def test_operator_algebra_properties_on_random_inputs():
    rng = np.random.default_rng(2024)
    for trial in range(500):
        d1, d2 = SPLITS[trial % len(SPLITS)]
        n = d1 * d2
        rho = random_density(rng, n, rank=int(rng.integers(1, n + 1)))
        pt = partial_transpose(rho, d1, d2)
        assert np.max(np.abs(partial_transpose(pt, d1, d2) - rho)) <= 1e-14
        assert abs(np.trace(pt) - np.trace(rho)) <= 1e-14
        assert np.max(np.abs(pt - pt.conj().T)) <= 1e-14
        assert abs(np.trace(pt @ pt) - np.trace(rho @ rho)) <= 1e-12
        other = partial_transpose(rho, d1, d2, sys=0)
        assert np.allclose(other, pt.T, atol=0)
        assert np.max(np.abs(np.linalg.eigvalsh(other) - np.linalg.eigvalsh(pt))) <= 1e-10


def test_partial_trace_product_rule():
    rng = np.random.default_rng(5)
    a = random_density(rng, 2)
    b = 3.0 * random_density(rng, 3)
    m = np.kron(a, b)
    assert np.allclose(partial_trace(m, 2, 3, over_second=True), a * np.trace(b), atol=1e-15)
    assert np.allclose(partial_trace(m, 2, 3, over_second=False), b * np.trace(a), atol=1e-15)


def test_partial_trace_pure_product_marginal():
    e = np.zeros(6)
    e[0] = 1
    marg = partial_trace(np.outer(e, e), 2, 3)
    assert np.array_equal(marg, np.diag([1.0, 0.0]))
    rng = np.random.default_rng(6)
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    psi = np.kron(a, b)
    assert np.allclose(partial_trace(np.outer(psi, psi.conj()), 3, 4), np.outer(a, a.conj()))
    assert np.allclose(partial_trace(np.outer(psi, psi.conj()), 3, 4, over_second=False),
                       np.outer(b, b.conj()))


def test_partial_trace_preserves_trace_and_positivity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        m = random_density(rng, 12) * 2.5
        for over_second in (True, False):
            r = partial_trace(m, 3, 4, over_second)
            assert abs(np.trace(r) - np.trace(m)) < 1e-13
            assert np.linalg.eigvalsh(r)[0] > -1e-12


def test_is_ppt_examples(bell):
    ok, lam = is_ppt(DensityMatrix(np.eye(4) / 4, 2, 2))
    assert ok and lam == pytest.approx(0.25, abs=1e-15)
    ok, lam = is_ppt(bell)
    assert not ok and lam == pytest.approx(-0.5, abs=1e-14)


def test_product_states_are_ppt():
    rng = np.random.default_rng(8)
    for _ in range(20):
        rho = np.kron(random_density(rng, 3), random_density(rng, 3))
        assert is_ppt(rho, d1=3, d2=3)[0]


@pytest.mark.parametrize("p", [0.0, 0.1, 0.2, 0.3, 0.34, 0.5, 0.9, 1.0])
def test_werner_states(werner, p):
    # λ_min of the Werner partial transpose is 1/4 - 3p/4 (closed form)
    rho = werner(p)
    ok, lam = is_ppt(rho)
    assert lam == pytest.approx(0.25 - 0.75 * p, abs=1e-14)
    assert is_separable_small(rho) == (p <= 1 / 3)


def test_separable_small_on_2x3():
    assert is_separable_small(DensityMatrix(np.eye(6) / 6, 2, 3))
    assert is_separable_small(DensityMatrix(np.eye(6) / 6, 3, 2))


def test_separable_small_refuses_large_systems():
    with pytest.raises(ValueError):
        is_separable_small(DensityMatrix(np.eye(9) / 9, 3, 3))
    with pytest.raises(ValueError):
        is_separable_small(DensityMatrix(np.eye(8) / 8, 2, 4))
