"""Truncated Fock-space linear algebra: displacements, metrics, loss.

All operators are plain numpy arrays on the number basis {|0>, ..., |N-1>}.
Truncation is explicit: every routine that builds a state records how much
probability the truncation leaves out, and the validation helpers treat
small negative eigenvalues (within a relative tolerance) as numerical noise
rather than physics.
"""

from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import TruncationError, ValidationError

#: relative tolerance for "positive semidefinite within numerical noise"
EPS_PSD = 1e-8


def _log_factorials(dim: int) -> np.ndarray:
    return gammaln(np.arange(dim) + 1.0)


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    """Number-basis amplitudes <n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!)."""
    n = np.arange(dim)
    if alpha == 0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    mag = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - _log_factorials(dim) / 2)
    return mag * np.exp(1j * n * np.angle(alpha))


def coherent_vectors(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Stack of coherent vectors, shape (len(alphas), dim)."""
    alphas = np.asarray(alphas, dtype=complex).ravel()
    n = np.arange(dim)
    r = np.abs(alphas)
    safe = np.where(r > 0, r, 1.0)
    mag = np.exp(-r[:, None] ** 2 / 2 + n[None, :] * np.log(safe[:, None])
                 - _log_factorials(dim)[None, :] / 2)
    phase = np.exp(1j * n[None, :] * np.angle(alphas)[:, None])
    out = mag * phase
    zero = r == 0
    if np.any(zero):
        out[zero] = 0.0
        out[zero, 0] = 1.0
    return out


def displacement_matrix(gamma: complex, dim: int) -> np.ndarray:
    """Matrix elements <m|D(gamma)|n> of the displacement operator.

    Evaluated from the closed form

        <m|D(gamma)|n> = sqrt(n!/m!) gamma^{m-n} e^{-|gamma|^2/2}
                         L_n^{(m-n)}(|gamma|^2)          (m >= n)

    with the associated Laguerre polynomials generated by their upward
    recurrence in the degree and the factorial prefactor assembled in log
    space. A naive recurrence on the matrix elements themselves loses all
    accuracy beyond |gamma| ~ 4 at this truncation; this route stays at
    machine precision because every L value carries only polynomial error
    and the prefactor is exact. The entries are the exact
    infinite-dimensional matrix elements projected onto the truncation, so
    the matrix is unitary only up to truncation leakage: columns with index
    well below dim are nearly orthonormal, columns near the edge are not.

    Parameters
    ----------
    gamma : complex displacement amplitude.
    dim : Fock-space truncation.

    Returns
    -------
    (dim, dim) complex ndarray.
    """
    return displacement_matrices(np.array([gamma]), dim)[0]


@lru_cache(maxsize=8)
def _displacement_tables(dim: int):
    lf = _log_factorials(dim)
    m_idx, n_idx = np.indices((dim, dim))
    k_idx = np.minimum(m_idx, n_idx)
    a_idx = np.abs(m_idx - n_idx)
    log_fact = 0.5 * (lf[k_idx] - lf[np.maximum(m_idx, n_idx)])
    sign = np.where(m_idx >= n_idx, 1.0, (-1.0) ** a_idx)
    return k_idx, a_idx, sign * np.exp(log_fact), a_idx.astype(float)


def displacement_matrices(gammas: np.ndarray, dim: int) -> np.ndarray:
    """Batched displacement matrices, shape (len(gammas), dim, dim)."""
    g = np.asarray(gammas, dtype=complex).ravel()
    p = len(g)
    t = np.abs(g) ** 2

    # L[j, k, a] = L_k^{(a)}(t_j) by the three-term recurrence in k.
    lag = np.zeros((p, dim, dim))
    lag[:, 0, :] = 1.0
    if dim > 1:
        a = np.arange(dim)[None, :]
        lag[:, 1, :] = 1.0 + a - t[:, None]
        for k in range(1, dim - 1):
            lag[:, k + 1, :] = ((2 * k + 1 + a - t[:, None]) * lag[:, k, :]
                                - (k + a) * lag[:, k - 1, :]) / (k + 1.0)

    k_idx, a_idx, pref, a_f = _displacement_tables(dim)
    # split sqrt(min!/max!) |gamma|^|m-n| e^{-t/2} into a static factorial
    # table and a per-point exponential; both stay inside double range for
    # any |gamma| at truncations up to a few hundred.
    r = np.abs(g)
    safe = np.where(r > 0, r, 1.0)
    mag = np.exp(-t[:, None, None] / 2.0
                 + a_f[None, :, :] * np.log(safe)[:, None, None])
    # phase e^{i(m-n) arg g} as an outer product of per-index phases
    u = np.exp(1j * np.arange(dim)[None, :] * np.angle(g)[:, None])
    out = ((pref[None, :, :] * mag * lag[:, k_idx, a_idx]).astype(complex)
           * u[:, :, None] * u.conj()[:, None, :])
    zero = r == 0
    if np.any(zero):
        out[zero] = np.eye(dim)
    return out


def hermitize(rho: np.ndarray) -> np.ndarray:
    """(rho + rho^dagger) / 2."""
    return 0.5 * (rho + rho.conj().T)


def hermiticity_defect(rho: np.ndarray) -> float:
    return float(np.max(np.abs(rho - rho.conj().T)))


def validate_density_matrix(rho: np.ndarray, eps_psd: float = EPS_PSD,
                            trace_tol: float = 1e-6) -> np.ndarray:
    """Check Hermiticity, unit trace, and PSD-within-tolerance.

    Negative eigenvalues larger than -eps_psd (relative to the largest
    eigenvalue) are treated as numerical noise. Returns the eigenvalues so
    callers can reuse them.
    """
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    defect = hermiticity_defect(rho)
    if defect > 1e-10 * max(1.0, float(np.abs(rho).max())):
        raise ValidationError(f"matrix not Hermitian: defect {defect:.3e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"trace {tr:.10f} deviates from 1 beyond {trace_tol:g}")
    ev = np.linalg.eigvalsh(hermitize(rho))
    floor = -eps_psd * max(ev.max(), 1e-300)
    if ev.min() < floor:
        raise ValidationError(
            f"matrix not positive semidefinite: min eigenvalue {ev.min():.3e}")
    return ev


def fidelity(rho: np.ndarray, sigma: np.ndarray, eps_psd: float = EPS_PSD) -> float:
    """Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Both inputs must be valid density matrices of equal dimension (Hermitian,
    unit trace within tolerance, PSD within eps_psd). Eigenvalues within the
    tolerance band below zero are clipped to zero before the square roots.
    """
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    validate_density_matrix(rho, eps_psd)
    validate_density_matrix(sigma, eps_psd)
    w, U = np.linalg.eigh(hermitize(rho))
    sq = (U * np.sqrt(np.clip(w, 0.0, None))) @ U.conj().T
    ev = np.linalg.eigvalsh(hermitize(sq @ sigma @ sq))
    return float(np.sum(np.sqrt(np.clip(ev, 0.0, None))) ** 2)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D(rho, sigma) = (1/2) Tr |rho - sigma| for Hermitian arguments."""
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    ev = np.linalg.eigvalsh(hermitize(rho - sigma))
    return float(0.5 * np.sum(np.abs(ev)))


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def truncation_leakage(rho: np.ndarray) -> float:
    """Probability mass missing from the truncation, 1 - Tr rho."""
    return float(1.0 - np.trace(rho).real)


def loss_channel(rho: np.ndarray, eta: float) -> np.ndarray:
    """Pure loss with amplitude factor eta: E(|a><a|) = |eta a><eta a|.

    Note the convention: eta multiplies the coherent amplitude, so the
    intensity transmissivity is tau = eta^2 (some references write
    sqrt(eta) for the amplitude factor instead).

    Kraus operators on the number basis:
        <m|K_k|n> = delta_{n, m+k} sqrt(binom(n, k)) (1-tau)^{k/2} tau^{m/2}.
    """
    if not 0.0 < eta <= 1.0:
        raise ValidationError(f"amplitude factor eta must be in (0, 1], got {eta}")
    dim = rho.shape[0]
    tau = eta ** 2
    if tau == 1.0:
        return rho.astype(complex, copy=True)
    out = np.zeros((dim, dim), dtype=complex)
    lf = _log_factorials(dim)
    for k in range(dim):
        m = np.arange(dim - k)
        nk = m + k
        logc = 0.5 * (lf[nk] - lf[m] - lf[k]) + 0.5 * k * np.log1p(-tau) \
            + 0.5 * m * np.log(tau)
        Kk = np.zeros((dim, dim))
        Kk[m, nk] = np.exp(logc)
        out += Kk @ rho @ Kk.T
    return out


def tmsv_displaced_overlap(gamma: complex, chi: float) -> float:
    """Overlap <psi| D(gamma) x 1 |psi> for a two-mode squeezed vacuum.

    |psi> = sqrt(1 - chi^2) sum_n chi^n |n, n>, 0 <= chi < 1. Summing the
    geometric series against the diagonal displacement elements gives the
    closed form

        exp(-|gamma|^2 / 2 - chi^2 |gamma|^2 / (1 - chi^2)).

    The mean photon number per mode is chi^2 / (1 - chi^2).
    """
    if not 0.0 <= chi < 1.0:
        raise ValidationError(f"squeezing parameter chi must be in [0, 1), got {chi}")
    g2 = abs(gamma) ** 2
    return float(np.exp(-g2 / 2 - chi ** 2 * g2 / (1 - chi ** 2)))


def position_wavefunctions(xs: np.ndarray, dim: int) -> np.ndarray:
    """Harmonic-oscillator eigenfunctions psi_n(x), a = (x + ip)/sqrt(2).

    Stable recurrence psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}.
    Returns shape (dim, len(xs)).
    """
    xs = np.asarray(xs, dtype=float)
    psi = np.zeros((dim, len(xs)))
    psi[0] = np.pi ** -0.25 * np.exp(-xs ** 2 / 2)
    if dim > 1:
        psi[1] = np.sqrt(2.0) * xs * psi[0]
    for n in range(1, dim - 1):
        psi[n + 1] = np.sqrt(2.0 / (n + 1)) * xs * psi[n] - np.sqrt(n / (n + 1.0)) * psi[n - 1]
    return psi


def position_distribution(rho: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """p(x) = <x| rho |x> on the number basis (real for Hermitian rho)."""
    psi = position_wavefunctions(xs, rho.shape[0])
    return np.einsum("mx,mn,nx->x", psi, rho.real, psi)


def require_dim(dim: int, needed: float = 1, what: str = "a state") -> None:
    """Raise for non-positive dim, or when dim cannot hold the requested object."""
    if int(dim) != dim or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim}")
    if dim < needed:
        raise TruncationError(f"dim {dim} too small for {what} (need >= {needed:.0f})")
