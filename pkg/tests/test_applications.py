import json

import numpy as np
import pytest

from psfilters import applications, bounds, filtering, filters, fock, states
from psfilters.errors import (UnsupportedRouteError, ValidationError)


@pytest.mark.parametrize("eta", [0.0, -0.5, 1.2])
def test_loss_channel_validates_eta(eta):
    with pytest.raises(ValidationError):
        applications.LossChannel(eta)


def test_loss_channel_amplitude_scaling():
    ch = applications.LossChannel(0.7)
    np.testing.assert_allclose(ch.coherent_amplitude(np.array([2.0 + 1j])),
                               [1.4 + 0.7j])
    assert ch.to_config() == {"kind": "loss", "eta": 0.7}


@pytest.mark.parametrize("state,eta", [
    (states.Thermal(0.5), 0.8),
    (states.Coherent(1.0), 0.5),
])
def test_loss_output_grid_matches_kraus_route(state, eta):
    """Mixing lossy coherent responses over the P grid equals exact Kraus."""
    filt = filters.GaussianFilter(1.0)
    grid = filtering.regularized_p_grid(state, filt, half_extent=6.0, n_points=101)
    est = applications.channel_output_estimate(grid, applications.LossChannel(eta),
                                               dim=30)
    rho_f = filtering.apply_filter_fock(state, filt, dim=30).rho
    ref = applications.LossChannel(eta).apply(rho_f)
    assert fock.trace_distance(est.rho, ref) < 1e-3
    assert abs(est.trace_value - 1.0) < 1e-3
    assert est.min_eigenvalue > -1e-6
    assert est.n_cells == 101 * 101


def test_generic_channel_route_matches_loss_fast_path():
    state, filt, eta = states.Coherent(0.8), filters.GaussianFilter(1.0), 0.6
    grid = filtering.regularized_p_grid(state, filt, half_extent=5.0, n_points=41)

    def response(alpha, dim):
        v = fock.coherent_vector(eta * alpha, dim)
        return np.outer(v, v.conj())

    slow = applications.channel_output_estimate(
        grid, applications.CoherentResponseChannel(response, "loss-by-hand"), dim=15)
    fast = applications.channel_output_estimate(
        grid, applications.LossChannel(eta), dim=15)
    assert np.max(np.abs(slow.rho - fast.rho)) < 1e-10
    assert slow.channel_config["kind"] == "coherent-response"


def test_channel_output_rejects_wigner_grid():
    from psfilters import pqd
    grid = pqd.spqd_grid(states.Vacuum(), s=0.0, half_extent=5.0, n_points=41)
    with pytest.raises(ValidationError):
        applications.channel_output_estimate(grid, applications.LossChannel(0.8))


def test_channel_output_distance_bound_is_certificate():
    cert = applications.channel_output_distance_bound(states.Coherent(1.0),
                                                      filters.GaussianFilter(1.0))
    assert cert.method == "quadrature"
    assert abs(cert.trace_distance_bound - np.sqrt(1 - cert.f_e)) < 1e-15


def test_sample_husimi_reproducible_and_calibrated():
    st = states.Thermal(0.6)
    a = applications.sample_husimi(st, 50_000, seed=3)
    b = applications.sample_husimi(st, 50_000, seed=3)
    assert np.array_equal(a.alphas, b.alphas)
    assert 0.0 < a.acceptance <= 1.0
    assert a.envelope > 0 and a.seed == 3
    # E_Q |alpha|^2 = nbar + 1
    m2 = np.abs(a.alphas) ** 2
    se = m2.std(ddof=1) / np.sqrt(len(m2))
    assert abs(m2.mean() - (st.mean_photons() + 1.0)) < 4 * se


def test_sample_husimi_vacuum_moment():
    a = applications.sample_husimi(states.Vacuum(), 50_000, seed=1)
    m2 = np.abs(a.alphas) ** 2
    se = m2.std(ddof=1) / np.sqrt(len(m2))
    assert abs(m2.mean() - 1.0) < 4 * se


@pytest.mark.parametrize("n", [-1, 1.5])
def test_povm_rejects_bad_photon_number(n):
    with pytest.raises(ValidationError):
        applications.povm_regularized_p(n, filters.GaussianFilter(1.0),
                                        np.array([0j]))


def test_povm_radial_table_matches_2d_transform():
    filt = filters.GaussianFilter(1.0)
    alphas = np.array([0.0, 0.5 + 0.5j, 1.5, -2.0j, 2.5 + 1.0j])
    for n in (0, 2):
        table = applications.povm_regularized_p(n, filt, alphas)
        brute = applications.povm_regularized_p(n, _NonRadialWrapper(filt), alphas,
                                                allow_slow_2d=True)
        np.testing.assert_allclose(table, brute, atol=5e-6)


class _NonRadialWrapper(filters.Filter):
    """Same profile, radial fast path disabled; forces the 2d transform."""

    label = "wrapped"
    is_radial = False

    def __init__(self, inner):
        self.inner = inner
        self.gauss_margin = inner.gauss_margin

    def __call__(self, xi):
        return self.inner(xi)


def test_povm_gates_non_radial_filters():
    with pytest.raises(UnsupportedRouteError):
        applications.povm_regularized_p(0, _NonRadialWrapper(filters.GaussianFilter(1.0)),
                                        np.array([0j]))


def test_heterodyne_estimate_consistent_with_oracle():
    est = applications.heterodyne_estimate(states.Coherent(1.0),
                                           filters.GaussianFilter(1.0),
                                           n_max=5, n_samples=20_000, seed=9)
    assert est.oracle is not None and len(est.oracle) == 6
    z = (est.estimates - est.oracle) / est.stderrs
    assert np.max(np.abs(z)) < 5.0
    assert np.mean(np.abs(z)) < 2.0
    assert est.seed == 9 and est.n_samples == 20_000
    assert 0.0 < est.acceptance <= 1.0
    assert abs(est.trace_distance_bound - np.sqrt(1 - est.f_e)) < 1e-15
    d = json.loads(est.to_json())
    assert d["n_values"] == [0, 1, 2, 3, 4, 5]


def test_heterodyne_estimate_reproducible():
    kw = dict(n_max=3, n_samples=5_000, seed=21)
    a = applications.heterodyne_estimate(states.Thermal(0.4),
                                         filters.GaussianFilter(1.0), **kw)
    b = applications.heterodyne_estimate(states.Thermal(0.4),
                                         filters.GaussianFilter(1.0), **kw)
    assert np.array_equal(a.estimates, b.estimates)


@pytest.mark.parametrize("state,filt", [
    (states.Fock(1), filters.GaussianFilter(1.0)),
    (states.Thermal(0.5), filters.NonclassicalityFilter(2.0, 4.0)),
])
def test_probability_distance_bound_holds(state, filt):
    rep = applications.probability_distance_bound(state, filt, dim=40)
    assert rep.slack > -1e-12
    assert rep.half_l1 >= 0.0
    assert abs(rep.bound - np.sqrt(1 - rep.certificate.f_e)) < 1e-15
    d = rep.to_dict()
    assert d["half_l1"] == rep.half_l1
