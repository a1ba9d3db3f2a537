import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from psfilters import fock
from psfilters.errors import ValidationError


def expm_displacement(gamma, dim):
    """Reference displacement block from the matrix exponential.

    Built at an enlarged truncation so the top-left block carries the exact
    infinite-dimensional matrix elements to machine precision.
    """
    big = max(dim + 40, int(4 * abs(gamma) ** 2) + dim + 40)
    a = np.diag(np.sqrt(np.arange(1, big)), 1)
    return expm(gamma * a.conj().T - np.conjugate(gamma) * a)[:dim, :dim]


@pytest.mark.parametrize("gamma", [0.0, 0.3, 2.0, 5.0, 8.0, -1.5 + 2.5j,
                                   9.5 * np.exp(0.7j), 3.0 - 4.0j])
def test_displacement_matches_expm(gamma):
    got = fock.displacement_matrix(gamma, 36)
    ref = expm_displacement(gamma, 36)
    assert np.max(np.abs(got - ref)) < 5e-13


def test_displacement_batch_equals_single():
    rng = np.random.default_rng(5)
    g = rng.normal(size=7) + 1j * rng.normal(size=7)
    batch = fock.displacement_matrices(g, 25)
    for i, gi in enumerate(g):
        assert np.array_equal(batch[i], fock.displacement_matrix(gi, 25))


def test_displacement_zero_is_identity():
    assert_allclose(fock.displacement_matrix(0.0, 12), np.eye(12))


def test_displacement_group_properties():
    # D(g)^dag = D(-g), and low-index columns are orthonormal despite truncation
    g = 1.2 - 0.7j
    D = fock.displacement_matrix(g, 60)
    assert np.max(np.abs(D.conj().T - fock.displacement_matrix(-g, 60))) < 1e-13
    gram = (D.conj().T @ D)[:20, :20]
    assert np.max(np.abs(gram - np.eye(20))) < 1e-12


def test_displacement_on_vacuum_is_coherent():
    alpha = 0.8 + 0.4j
    D = fock.displacement_matrix(alpha, 40)
    assert_allclose(D[:, 0], fock.coherent_vector(alpha, 40), atol=1e-14)


def test_coherent_vector_normalization():
    v = fock.coherent_vector(1.5 - 0.5j, 60)
    assert abs(np.vdot(v, v).real - 1.0) < 1e-12
    # overlap rule |<a|b>|^2 = exp(-|a-b|^2)
    w = fock.coherent_vector(0.5, 60)
    assert abs(abs(np.vdot(v, w)) ** 2 - np.exp(-abs(1.5 - 0.5j - 0.5) ** 2)) < 1e-12


def test_coherent_vectors_stack():
    alphas = np.array([0.0, 1.0, -2.0j])
    stack = fock.coherent_vectors(alphas, 30)
    for i, a in enumerate(alphas):
        assert_allclose(stack[i], fock.coherent_vector(a, 30), atol=1e-15)


def test_validate_density_matrix_accepts_and_rejects():
    rho = np.diag([0.6, 0.4, 0.0]).astype(complex)
    fock.validate_density_matrix(rho)
    with pytest.raises(ValidationError):
        fock.validate_density_matrix(rho * 2.0)  # trace 2
    bad = rho.copy()
    bad[0, 1] = 0.9  # not Hermitian
    with pytest.raises(ValidationError):
        fock.validate_density_matrix(bad)
    with pytest.raises(ValidationError):
        fock.validate_density_matrix(np.diag([1.5, -0.5, 0.0]).astype(complex))


def test_fidelity_and_trace_distance_basics():
    v = fock.coherent_vector(0.7, 40)
    w = fock.coherent_vector(-0.2 + 0.1j, 40)
    rho, sig = np.outer(v, v.conj()), np.outer(w, w.conj())
    # pure states: F = |<v|w>|^2 and D = sqrt(1 - F); the eigenvalue route
    # carries a sqrt(machine eps) noise floor, so don't pin tighter
    F = fock.fidelity(rho, sig)
    assert abs(F - abs(np.vdot(v, w)) ** 2) < 5e-7
    assert abs(fock.trace_distance(rho, sig) - np.sqrt(1 - F)) < 1e-8
    assert abs(fock.fidelity(rho, rho) - 1.0) < 1e-7
    assert fock.trace_distance(rho, rho) < 1e-12


def test_fidelity_mixed_oracle():
    # commuting case reduces to (sum sqrt(p q))^2
    p = np.array([0.5, 0.3, 0.2])
    q = np.array([0.2, 0.5, 0.3])
    F = fock.fidelity(np.diag(p).astype(complex), np.diag(q).astype(complex))
    assert abs(F - np.sum(np.sqrt(p * q)) ** 2) < 1e-12


def test_purity_and_hermitize():
    rho = np.diag([0.5, 0.5]).astype(complex)
    assert abs(fock.purity(rho) - 0.5) < 1e-15
    m = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
    h = fock.hermitize(m)
    assert fock.hermiticity_defect(h) == 0.0


@pytest.mark.parametrize("eta", [0.5, 0.8, 1.0])
def test_loss_channel_coherent_amplitude_convention(eta):
    """Coherent input |a> maps to |eta a>: eta scales the amplitude."""
    alpha = 1.1 + 0.3j
    v = fock.coherent_vector(alpha, 50)
    out = fock.loss_channel(np.outer(v, v.conj()), eta)
    w = fock.coherent_vector(eta * alpha, 50)
    assert np.max(np.abs(out - np.outer(w, w.conj()))) < 1e-12


def test_loss_channel_preserves_trace_and_physicality():
    rho = np.diag(np.exp(-0.7 * np.arange(30)))
    rho = (rho / rho.trace()).astype(complex)
    out = fock.loss_channel(rho, 0.6)
    assert abs(out.trace().real - 1.0) < 1e-12
    assert np.linalg.eigvalsh(out).min() > -1e-14


def test_loss_channel_validates_eta():
    rho = np.eye(2, dtype=complex) / 2
    for eta in (0.0, -0.2, 1.3):
        with pytest.raises(ValidationError):
            fock.loss_channel(rho, eta)


def test_position_distribution_normalized_and_even():
    # Fock-2 spatial density integrates to 1 and is symmetric
    x = np.linspace(-8, 8, 1601)
    p = fock.position_distribution(np.diag([0.0, 0.0, 1.0]).astype(complex), x)
    assert abs(np.trapezoid(p, x) - 1.0) < 1e-10
    assert_allclose(p, p[::-1], atol=1e-14)


def test_truncation_leakage_flags_edge_weight():
    v = fock.coherent_vector(3.0, 12)  # nbar 9 barely fits in 12 levels
    rho = np.outer(v, v.conj())
    assert fock.truncation_leakage(rho) > 1e-3
    v2 = fock.coherent_vector(0.5, 12)
    assert fock.truncation_leakage(np.outer(v2, v2.conj())) < 1e-12


def test_require_dim_rejects_bad_values():
    with pytest.raises(ValidationError):
        fock.require_dim(0)
    with pytest.raises(ValidationError):
        fock.require_dim(-3)
    fock.require_dim(5)
