import numpy as np
import pytest

from psfilters import filters, physicality, states
from psfilters.errors import ValidationError


def klauder_profile_1d(u, L):
    """1D Klauder profile e^{-f(u-L) - f(-u-L)} with one-sided f."""
    def f(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0, x, 1.0)
        return np.where(x > 0, safe ** 4 * np.exp(-1.0 / safe ** 2), 0.0)
    u = np.asarray(u, dtype=float)
    return np.exp(-f(u - L) - f(-u - L))


@pytest.mark.parametrize("L", [0.5, 1.0, 2.0])
def test_klauder_translates_determinant_identity(L):
    """det of the 3-point matrix reduces to -(Omega(2L) - 1)^2 exactly."""
    filt = filters.KlauderFilter(L)
    pts = physicality.klauder_translates(L)
    M = physicality.bochner_matrix(filt, pts, eta_nw=0.0)
    omega_2L = float(klauder_profile_1d(2 * L, L))
    assert abs(np.linalg.det(M).real + (omega_2L - 1.0) ** 2) < 1e-10
    assert physicality.min_eigenvalue(filt, pts, eta_nw=0.0) < 0


def test_klauder_witness_is_eta_independent():
    # collinear translates kill the symplectic phase, so the same matrix
    # appears at every eta
    filt = filters.KlauderFilter(1.0)
    pts = physicality.klauder_translates(1.0)
    m0 = physicality.bochner_matrix(filt, pts, eta_nw=0.0)
    m4 = physicality.bochner_matrix(filt, pts, eta_nw=4.0)
    assert np.max(np.abs(m0 - m4)) < 1e-14


def test_bochner_matrix_vacuum_charfn_is_psd():
    phi = states.Vacuum().charfn()
    rng = np.random.default_rng(0)
    for _ in range(20):
        pts = physicality.gaussian_cloud(1.5, int(rng.integers(2, 9)), rng)
        assert physicality.min_eigenvalue(phi, pts, eta_nw=2.0) > -1e-12


def test_bochner_matrix_is_hermitian_with_unit_diagonal():
    filt = filters.GaussianFilter(1.0)
    pts = physicality.lattice_set(0.8, (3, 3))
    M = physicality.bochner_matrix(filt, pts, eta_nw=2.0)
    assert np.max(np.abs(M - M.conj().T)) < 1e-14
    assert np.max(np.abs(np.diag(M) - 1.0)) < 1e-14


@pytest.mark.parametrize("filt", [
    filters.GaussianFilter(0.5),
    filters.GaussianFilter(1.0),
    filters.GaussianFilter(2.0),
    filters.NonclassicalityFilter(1.0, 3.0),
    filters.NonclassicalityFilter(2.0, 4.0),
], ids=lambda f: f.label)
def test_cptp_families_pass_sweep(filt):
    result = physicality.nw_spectrum_test(filt, eta_nw=0.0, n_sets=120, seed=5)
    assert result.passed
    assert result.min_eigenvalue > -1e-9
    assert result.n_failures == 0


def test_klauder_fails_sweep():
    result = physicality.nw_spectrum_test(filters.KlauderFilter(1.0),
                                          eta_nw=0.0, n_sets=120, seed=5)
    assert not result.passed
    assert result.min_eigenvalue < -1e-6
    # worst_set reproduces the reported eigenvalue
    again = physicality.min_eigenvalue(filters.KlauderFilter(1.0),
                                       result.worst_set, eta_nw=0.0)
    assert abs(again - result.min_eigenvalue) < 1e-12


def test_narcowich_counterexample_splits_eta_levels():
    """Fails the map test at eta 0 yet passes the state test at eta 4."""
    filt = filters.NarcowichCounterexampleFilter()
    fail = physicality.nw_spectrum_test(filt, eta_nw=0.0, n_sets=200, seed=11)
    assert fail.min_eigenvalue < -0.01
    ok = physicality.nw_spectrum_test(filt, eta_nw=4.0, n_sets=200, seed=11)
    assert ok.passed


def test_narcowich_needs_2d_point_sets():
    # collinear sets cannot witness this filter: its transform integrated
    # along one axis is nonnegative
    filt = filters.NarcowichCounterexampleFilter()
    worst = 0.0
    for spacing in np.linspace(0.2, 2.5, 12):
        pts = physicality.PointSet(np.linspace(-2, 2, 5) * spacing + 0.0j,
                                   origin="collinear")
        worst = min(worst, physicality.min_eigenvalue(filt, pts, eta_nw=0.0))
    assert worst > -1e-9
    lat = physicality.lattice_set(1.0, (3, 4))
    assert physicality.min_eigenvalue(filt, lat, eta_nw=0.0) < -0.1


def test_certify_cptp_verdicts():
    rep = physicality.certify_cptp(filters.GaussianFilter(1.0), n_sets=60, seed=2)
    assert rep.verdict == "cptp-evidence"
    assert "necessary" in rep.notes.lower()
    rep = physicality.certify_cptp(filters.KlauderFilter(1.0), n_sets=60, seed=2)
    assert rep.verdict == "not-cp"
    assert rep.witness is not None
    pts, eta, eig = rep.witness
    assert eta == 0.0 and eig < 0
    wd = rep.to_dict()["witness"]
    assert wd["points"]["origin"]
    assert wd["min_eigenvalue"] < 0


def test_classify_filter_three_way():
    assert physicality.classify_filter(
        filters.GaussianFilter(1.0), n_sets=60, seed=3).verdict == "cptp-evidence"
    assert physicality.classify_filter(
        filters.NarcowichCounterexampleFilter(), n_sets=120, seed=3).verdict \
        == "positive-not-cp-candidate"
    assert physicality.classify_filter(
        filters.KlauderFilter(1.0), n_sets=60, seed=3).verdict == "not-cp"


def test_fourier_scan_flags_negative_transform():
    scan = physicality.fourier_scan(filters.NarcowichCounterexampleFilter())
    assert scan.min_value < -0.01
    scan_ok = physicality.fourier_scan(filters.GaussianFilter(1.0))
    assert scan_ok.min_value > -1e-12


def test_point_set_validation():
    with pytest.raises(ValidationError):
        physicality.PointSet(np.array([0.0j]), origin="too-small")
    with pytest.raises(ValidationError):
        physicality.PointSet(np.zeros(20, dtype=complex), origin="too-big")
    ps = physicality.lattice_set(0.5, (2, 3))
    assert len(ps.points) == 6
    assert "lattice" in ps.origin


def test_standard_point_sets_deterministic():
    a = physicality.standard_point_sets(30, seed=9)
    b = physicality.standard_point_sets(30, seed=9)
    assert len(a) == 30
    for sa, sb in zip(a, b):
        assert np.array_equal(sa.points, sb.points)


def test_symmetry_defect_is_noise_level():
    # the +-eta matrices are conjugates, hence isospectral; defect ~ eps
    assert physicality.symmetry_defect(filters.GaussianFilter(1.0), eta_nw=2.0) < 1e-12
    assert physicality.symmetry_defect(filters.KlauderFilter(1.0), eta_nw=2.0) < 1e-12


def test_asymmetric_kernel_rejected():
    class Lopsided(filters.Filter):
        label = "lopsided"

        def __call__(self, xi):
            return np.exp(-np.abs(xi) ** 2 / 2 + 0.2 * xi.real)

    pts = physicality.gaussian_cloud(1.0, 4, np.random.default_rng(0))
    with pytest.raises(ValidationError):
        physicality.bochner_matrix(Lopsided(), pts, eta_nw=0.0)


def test_state_physicality_check_flags_fake_state():
    # |Phi| exceeding the Gaussian bound cannot be a state charfn at eta 2
    fake = states.CharFn(lambda xi: np.exp(np.abs(xi) ** 2 / 4 - np.abs(xi) ** 4 / 8),
                         "fake", 1.0)
    rep = physicality.state_physicality_check(fake, n_sets=80, seed=13)
    assert rep.min_eigenvalue < -1e-6
