"""Quadrature engines for symplectic Fourier transforms on phase space.

Conventions used throughout the package. Phase-space points are complex
numbers xi = x + iy with area element d^2xi = dx dy. The transform kernel is

    e^{alpha xi* - xi alpha*} = e^{2i (Im(alpha) x - Re(alpha) y)},

and the s-ordered quasiprobability of a characteristic function Phi is

    W_s(alpha) = (1/pi^2) \\int d^2xi  Phi(xi) e^{s |xi|^2 / 2}
                 e^{alpha xi* - xi alpha*}.

All quadratures are Gauss-Legendre tensor rules on a square [-K, K]^2 (or a
radial Gauss-Legendre rule for rotation-invariant integrands). The cutoff K
is chosen adaptively so the integrand magnitude falls below a threshold on
the boundary of the square; if no such K exists within the cap the transform
is refused, which is the numerical test for a singular quasiprobability.
"""

from functools import lru_cache

import numpy as np

from .errors import QuadratureError, SingularPQDError

#: integrand magnitude required at the quadrature boundary
DECAY_THRESHOLD = 1e-12
#: largest cutoff tried before declaring the integrand non-decaying
CUTOFF_CAP = 48.0
#: per-axis node budget for tensor rules
MAX_NODES = 1536


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _boundary_points(K: float, n: int = 241) -> np.ndarray:
    t = np.linspace(-K, K, n)
    # square edges plus the inscribed circle; the circle probes diagonal
    # directions at radius K for anisotropically decaying integrands
    circle = K * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 2 * n, endpoint=False))
    return np.concatenate([t + 1j * K, t - 1j * K, K + 1j * t, -K + 1j * t, circle])


def boundary_magnitude(integrand, K: float) -> float:
    """Largest |integrand| over the boundary of [-K, K]^2 and its inscribed circle."""
    pts = _boundary_points(K)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(integrand(pts))
        inner = np.abs(integrand(pts * 0.995))
    m = float(max(vals.max(), inner.max()))
    # overflow in a growing integrand reads as "has not decayed"
    return m if np.isfinite(m) else np.inf


def find_cutoff(integrand, start: float = 4.0, threshold: float = DECAY_THRESHOLD,
                cap: float = CUTOFF_CAP, error: type = SingularPQDError,
                context: str = "", s: float | None = None):
    """Smallest tested K with |integrand| < threshold on the boundary of [-K, K]^2.

    Raises the given error type (a SingularPQDError subclass) when the
    integrand has not decayed by the cap, carrying the measured boundary
    magnitude (the caller turns this into a "singular PQD" or "filter too
    weak" diagnosis).
    """
    K = float(start)
    while K <= cap:
        m = boundary_magnitude(integrand, K)
        if m < threshold:
            return K
        K *= 1.3
    raise error(
        f"integrand does not decay below {threshold:g} out to |xi| = {cap:g}"
        + (f" ({context})" if context else "")
        + f"; boundary magnitude {m:.3e}",
        s=s, boundary_max=m, cutoff=cap,
    )


def grid_transform(integrand, axis: np.ndarray, K: float, atol: float = 1e-9,
                   n_start: int | None = None):
    """Symplectic Fourier transform of `integrand` onto a square alpha grid.

    Evaluates values[j, i] = (1/pi^2) \\int d^2xi integrand(xi)
    e^{alpha xi* - xi alpha*} at alpha = axis[i] + 1j * axis[j], by a tensor
    Gauss-Legendre rule on [-K, K]^2. The node count doubles until two
    successive refinements agree to `atol` (max abs over the grid).

    Returns
    -------
    values : ndarray, real part of the transform (shape [len(axis)] * 2)
    residual : float, max abs difference between the last two refinements
    """
    amax = float(np.max(np.abs(axis))) if len(axis) else 1.0
    if n_start is None:
        # resolve the kernel oscillation: phase spans 4*amax*K per axis
        n_start = int(max(64, 4.0 * amax * K / np.pi + 48))

    def evaluate(n):
        x, wx = gauss_legendre(-K, K, n)
        G = integrand(x[:, None] + 1j * x[None, :]) * (wx[:, None] * wx[None, :])
        M1 = np.exp(2j * np.outer(axis, x))
        M2 = np.exp(-2j * np.outer(x, axis))
        return (M1 @ G @ M2).real / np.pi ** 2

    n = min(n_start, MAX_NODES)
    prev = evaluate(n)
    while True:
        n2 = min(2 * n, MAX_NODES)
        cur = evaluate(n2)
        residual = float(np.max(np.abs(cur - prev)))
        if residual < atol or n2 >= MAX_NODES:
            if residual >= atol:
                raise QuadratureError(
                    f"grid transform did not converge: residual {residual:.3e} "
                    f"with {n2} nodes per axis")
            return cur, residual
        prev, n = cur, n2


def point_transform(integrand, alphas: np.ndarray, K: float, atol: float = 1e-9,
                    n_start: int | None = None):
    """Same transform as `grid_transform` but at scattered alpha points."""
    alphas = np.asarray(alphas, dtype=complex).ravel()
    amax = float(np.max(np.abs(alphas))) if alphas.size else 1.0
    if n_start is None:
        n_start = int(max(64, 4.0 * amax * K / np.pi + 48))

    def evaluate(n):
        x, wx = gauss_legendre(-K, K, n)
        G = integrand(x[:, None] + 1j * x[None, :]) * (wx[:, None] * wx[None, :])
        # e^{2i(b x - a y)} factorizes per point
        Eb = np.exp(2j * np.outer(alphas.imag, x))
        Ea = np.exp(-2j * np.outer(alphas.real, x))
        return np.einsum("px,xy,py->p", Eb, G, Ea).real / np.pi ** 2

    n = min(n_start, MAX_NODES)
    prev = evaluate(n)
    while True:
        n2 = min(2 * n, MAX_NODES)
        cur = evaluate(n2)
        residual = float(np.max(np.abs(cur - prev)))
        if residual < atol or n2 >= MAX_NODES:
            if residual >= atol:
                raise QuadratureError(
                    f"point transform did not converge: residual {residual:.3e}")
            return cur, residual
        prev, n = cur, n2


def radial_transform(radial_integrand, radii: np.ndarray, K: float,
                     atol: float = 1e-11, n_start: int = 128):
    """Hankel form of the transform for rotation-invariant integrands.

    For g depending only on |xi| the symplectic transform reduces to

        W(|alpha|) = (2/pi) \\int_0^K rho g(rho) J0(2 |alpha| rho) drho.

    Returns (values, residual) with the same adaptive doubling as above.
    """
    from scipy.special import j0

    radii = np.asarray(radii, dtype=float).ravel()

    def evaluate(n):
        rho, w = gauss_legendre(0.0, K, n)
        f = rho * radial_integrand(rho) * w
        return (2.0 / np.pi) * (j0(2.0 * np.outer(radii, rho)) @ f)

    n = n_start
    prev = evaluate(n)
    while True:
        n2 = min(2 * n, MAX_NODES)
        cur = evaluate(n2)
        residual = float(np.max(np.abs(cur - prev)))
        if residual < atol or n2 >= MAX_NODES:
            if residual >= atol:
                raise QuadratureError(
                    f"radial transform did not converge: residual {residual:.3e}")
            return cur, residual
        prev, n = cur, n2


def integrate_2d(f, K: float, atol: float = 1e-11, n_start: int = 96):
    """\\int_{[-K,K]^2} f(alpha) d^2alpha by adaptive tensor Gauss-Legendre.

    f takes a complex array and returns real values.
    """
    def evaluate(n):
        x, w = gauss_legendre(-K, K, n)
        vals = f(x[:, None] + 1j * x[None, :])
        return float(w @ vals @ w)

    n = n_start
    prev = evaluate(n)
    while True:
        n2 = min(2 * n, MAX_NODES)
        cur = evaluate(n2)
        residual = abs(cur - prev)
        if residual < atol or n2 >= MAX_NODES:
            if residual >= atol:
                raise QuadratureError(
                    f"2d integral did not converge: residual {residual:.3e}")
            return cur, residual
        prev, n = cur, n2


def integrate_radial(f, K: float, atol: float = 1e-12, n_start: int = 128):
    """\\int f(|alpha|) d^2alpha = 2 pi \\int_0^K a f(a) da, adaptive."""
    def evaluate(n):
        a, w = gauss_legendre(0.0, K, n)
        return float(2.0 * np.pi * np.sum(a * f(a) * w))

    n = n_start
    prev = evaluate(n)
    while True:
        n2 = min(2 * n, MAX_NODES)
        cur = evaluate(n2)
        residual = abs(cur - prev)
        if residual < atol or n2 >= MAX_NODES:
            if residual >= atol:
                raise QuadratureError(
                    f"radial integral did not converge: residual {residual:.3e}")
            return cur, residual
        prev, n = cur, n2
