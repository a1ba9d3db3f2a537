import numpy as np
import pytest
from numpy.testing import assert_allclose

from psfilters import states
from psfilters.errors import ValidationError
from psfilters.fock import displacement_matrices
from psfilters.physicality import state_physicality_check

CATALOG = [
    states.Vacuum(),
    states.Coherent(1.0 - 0.5j),
    states.Fock(1),
    states.Fock(3),
    states.Thermal(0.5),
    states.Squeezed(0.4),
    states.Squeezed(0.3, phase=1.1),
    states.Cat(1.5, parity=+1),
    states.Cat(1.5, parity=-1),
]

rng = np.random.default_rng(314)
PROBE = (rng.normal(size=40) + 1j * rng.normal(size=40)) * 1.3


def numeric_charfn(state, xi, dim=60):
    """Oracle: Tr[rho D(xi)] evaluated with explicit truncated operators."""
    rho = state.fock_matrix(dim)
    D = displacement_matrices(xi, dim)
    return np.einsum("pmn,nm->p", D, rho)


@pytest.mark.parametrize("state", CATALOG, ids=lambda s: s.label)
def test_charfn_closed_form_matches_operator_trace(state):
    got = state.charfn()(PROBE)
    ref = numeric_charfn(state, PROBE)
    assert np.max(np.abs(got - ref)) < 1e-12


@pytest.mark.parametrize("state", CATALOG, ids=lambda s: s.label)
def test_charfn_symmetry_and_origin(state):
    phi = state.charfn()
    assert abs(phi(np.array([0.0j]))[0] - 1.0) < 1e-14
    # Phi(-xi) = conj(Phi(xi)) for Hermitian rho
    vals = phi(PROBE)
    flipped = phi(-PROBE)
    assert np.max(np.abs(flipped - vals.conj())) < 1e-13


@pytest.mark.parametrize("state", CATALOG, ids=lambda s: s.label)
def test_charfn_passes_state_bochner_sweep(state):
    report = state_physicality_check(state.charfn(), n_sets=40, seed=9)
    assert report.min_eigenvalue > -1e-9


@pytest.mark.parametrize("state", CATALOG, ids=lambda s: s.label)
def test_fock_matrix_is_a_state(state):
    rho = state.fock_matrix(50)
    assert abs(np.trace(rho).real + state.truncation_leakage(50) - 1.0) < 1e-8
    assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_mean_photons():
    assert states.Vacuum().mean_photons() == 0.0
    assert abs(states.Coherent(2.0).mean_photons() - 4.0) < 1e-14
    assert states.Fock(3).mean_photons() == 3.0
    assert abs(states.Thermal(0.7).mean_photons() - 0.7) < 1e-14
    assert abs(states.Squeezed(0.4).mean_photons() - np.sinh(0.4) ** 2) < 1e-14


def test_squeezed_variances():
    """Quadrature variances e^{-2r}/2 and e^{2r}/2 from the fock matrix."""
    r = 0.35
    rho = states.Squeezed(r).fock_matrix(60)
    dim = 60
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    x = (a + a.conj().T) / np.sqrt(2)
    p = (a - a.conj().T) / (1j * np.sqrt(2))
    vx = np.trace(rho @ x @ x).real
    vp = np.trace(rho @ p @ p).real
    assert abs(vx - np.exp(-2 * r) / 2) < 1e-10
    assert abs(vp - np.exp(2 * r) / 2) < 1e-10


def test_cat_components_interfere():
    even = states.Cat(1.5, parity=+1).fock_vector(40)
    odd = states.Cat(1.5, parity=-1).fock_vector(40)
    assert np.max(np.abs(even[1::2])) < 1e-14
    assert np.max(np.abs(odd[0::2])) < 1e-14
    assert abs(np.vdot(even, even).real - 1.0) < 1e-12


def test_cat_null_state_rejected():
    with pytest.raises(ValidationError):
        states.Cat(0.0, parity=-1)  # odd cat with alpha 0 has zero norm


def test_thermal_validates_nbar():
    with pytest.raises(ValidationError):
        states.Thermal(-0.1)
    assert_allclose(states.Thermal(0.0).fock_matrix(5),
                    states.Vacuum().fock_matrix(5), atol=1e-15)


def test_numeric_state_roundtrip():
    rho = states.Thermal(0.6).fock_matrix(30)
    num = states.NumericState(rho)
    ref = states.Thermal(0.6).charfn()(PROBE)
    assert np.max(np.abs(num.charfn()(PROBE) - ref)) < 1e-8
    assert not num.is_pure


def test_numeric_state_validates():
    with pytest.raises(ValidationError):
        states.NumericState(np.eye(3, dtype=complex))  # trace 3


@pytest.mark.parametrize("spec,expected", [
    ("vacuum", states.Vacuum),
    ("coherent:re=1,im=-0.5", states.Coherent),
    ("fock:n=2", states.Fock),
    ("thermal:nbar=0.5", states.Thermal),
    ("squeezed:r=0.4", states.Squeezed),
    ("squeezed:r=0.4,phase=0.7", states.Squeezed),
    ("cat:re=1.5,im=0,parity=-1", states.Cat),
])
def test_parse_state(spec, expected):
    st = states.parse_state(spec)
    assert isinstance(st, expected)
    # labels are parseable descriptions, not opaque reprs
    assert st.label


@pytest.mark.parametrize("spec", [
    "unknown", "fock", "fock:m=2", "fock:n=2,extra=1", "coherent:re=x",
    "thermal:nbar=-1", "fock:n=-1", "cat:re=0,im=0,parity=-1",
])
def test_parse_state_rejects(spec):
    with pytest.raises(ValidationError):
        states.parse_state(spec)


def test_parse_state_matches_direct_construction():
    a = states.parse_state("coherent:re=0.3,im=-0.2").charfn()(PROBE)
    b = states.Coherent(0.3 - 0.2j).charfn()(PROBE)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("state", CATALOG, ids=lambda s: s.label)
def test_spec_roundtrip(state):
    assert states.parse_state(state.spec()) == state


def test_numeric_state_has_no_spec():
    num = states.NumericState(states.Thermal(0.3).fock_matrix(20))
    with pytest.raises(ValidationError):
        num.spec()
