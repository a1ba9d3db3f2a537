"""Phase-space filter functions and their Fourier data.

A filter Omega(xi) multiplies a characteristic function before the transform
back to phase space. Its symplectic Fourier transform

    Omega~(alpha) = (1/pi^2) \\int d^2xi Omega(xi) e^{alpha xi* - xi alpha*}

integrates to Omega(0) = 1; when Omega~ is a probability density the induced
map on states is a classical mixture of displacements, hence CPTP, and the
filter can be sampled. The catalog:

* Gaussian          Omega(xi) = e^{-r |xi|^2 / 2}, r > 0
* Nonclassicality   autocorrelation of (1/L) 2^{1/q}
                    sqrt(q / (2 pi Gamma(2/q))) e^{-|xi|^q / L^q}
* Klauder           plateau filter, separable in the doubled quadratures
                    (u, v) = sqrt(2) (Re xi, Im xi)
* SmoothingKernel   Omega = characteristic function of a kernel state
* NarcowichCounterexample  (1 - 3|xi|^2/2) e^{-|xi|^2}

The nonclassicality construction is scale invariant, Omega_L(xi) =
Omega_1(xi / L), so the expensive profiles are built once per exponent q at
unit width and rescaled.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn
from scipy.special import j0

from . import quadrature as quad
from .errors import UnsamplableFilterError, ValidationError
from .states import State, parse_state


class DisplacementSampler:
    """Seeded stream of displacement draws alpha ~ Omega~."""

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def draw(self, n: int) -> np.ndarray:
        raise NotImplementedError


class GaussianDisplacementSampler(DisplacementSampler):
    """Two independent normals with variance r/4 per axis."""

    def __init__(self, r: float, seed: int):
        super().__init__(seed)
        self.sigma = math.sqrt(r / 4.0)

    def draw(self, n: int) -> np.ndarray:
        xy = self._rng.normal(0.0, self.sigma, (2, n))
        return xy[0] + 1j * xy[1]


class RadialInverseCdfSampler(DisplacementSampler):
    """Radius by inverse CDF on a table, angle uniform."""

    def __init__(self, knots: np.ndarray, cdf: np.ndarray, seed: int, scale: float = 1.0):
        super().__init__(seed)
        self.knots = knots
        self.cdf = cdf
        self.scale = scale

    def draw(self, n: int) -> np.ndarray:
        u = self._rng.random(n)
        radius = np.interp(u, self.cdf, self.knots) * self.scale
        theta = self._rng.uniform(0.0, 2.0 * np.pi, n)
        return radius * np.exp(1j * theta)


class Filter:
    """Base class: real, even filter function with Omega(0) = 1."""

    label: str = "filter"
    is_radial: bool = False
    #: Gaussian decay coefficient c with |Omega(xi)| <= C e^{-c |xi|^2 / 2}
    gauss_margin: float = 0.0
    #: None when physicality must be decided numerically; otherwise a
    #: (bool, reason) pair fixed by construction
    cptp_by_construction: tuple[bool, str] | None = None

    def __call__(self, xi) -> np.ndarray:
        raise NotImplementedError

    def fourier(self, alpha) -> np.ndarray:
        """Omega~ evaluated at (an array of) phase-space points."""
        raise NotImplementedError

    def sampler(self, seed: int) -> DisplacementSampler:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError

    @property
    def width(self) -> float:
        """Width parameter for solver families; larger means closer to identity."""
        raise NotImplementedError


class GaussianFilter(Filter):
    """Omega(xi) = e^{-r |xi|^2 / 2} with Omega~ a normal density.

    Omega~(alpha) = (2 / (pi r)) e^{-2 |alpha|^2 / r}, so filtering is a
    Gaussian displacement average with variance r/4 per quadrature axis;
    CPTP for every r > 0.
    """

    is_radial = True

    def __init__(self, r: float):
        if not (r > 0 and math.isfinite(r)):
            raise ValidationError(
                f"Gaussian filter width r must be positive, got {r} "
                "(r = 0 is the identity map whose transform is a delta)")
        self.r = float(r)
        self.label = f"gaussian(r={self.r:g})"
        self.gauss_margin = self.r
        self.cptp_by_construction = (True, "transform is a normal density")

    def __call__(self, xi):
        return np.exp(-self.r * np.abs(np.asarray(xi, dtype=complex)) ** 2 / 2)

    def fourier(self, alpha):
        a2 = np.abs(np.asarray(alpha, dtype=complex)) ** 2
        return 2.0 / (np.pi * self.r) * np.exp(-2.0 * a2 / self.r)

    def sampler(self, seed):
        return GaussianDisplacementSampler(self.r, seed)

    def to_config(self):
        return {"kind": "gaussian", "r": self.r}

    @property
    def width(self):
        return 1.0 / self.r


class _NonclBase:
    """Unit-width (L = 1) profiles of the nonclassicality filter at fixed q.

    omega(rho) = c_q e^{-rho^q} with c_q chosen so the autocorrelation
    Omega = omega * omega has Omega(0) = 1 exactly. The autocorrelation is
    evaluated in the radial domain (Gauss-Legendre in the radius, trapezoid
    in the angle, which is spectrally accurate for the periodic integrand)
    and normalized by the computed Omega(0) to remove quadrature drift. The
    Fourier side is the square of the 1d Hankel transform of omega, which is
    nonnegative by construction.
    """

    N_RADII = 801
    N_RHO = 200
    N_THETA = 256
    CDF_KNOTS = 4096

    def __init__(self, q: float):
        if q < 2:
            raise ValidationError(f"nonclassicality exponent q must be >= 2, got {q}")
        if not math.isfinite(q):
            raise ValidationError("nonclassicality exponent q must be finite")
        self.q = float(q)
        self.c_q = 2 ** (1.0 / q) * math.sqrt(q / (2.0 * math.pi * gamma_fn(2.0 / q)))
        # e^{-rho^q} < 1e-18 beyond this radius
        self.rho_max = (18.0 * math.log(10.0)) ** (1.0 / q)
        self._corr = None
        self._four = None
        self._cdf = None

    def omega(self, rho):
        return self.c_q * np.exp(-np.clip(np.asarray(rho, dtype=float), 0.0, None) ** self.q)

    # -- autocorrelation profile ------------------------------------------
    @property
    def corr(self):
        if self._corr is None:
            self._corr = self._build_corr()
        return self._corr

    def _corr_quad(self, R):
        rho, wr = quad.gauss_legendre(0.0, self.rho_max, self.N_RHO)
        theta = np.arange(self.N_THETA) * (2.0 * np.pi / self.N_THETA)
        w_theta = 2.0 * np.pi / self.N_THETA
        base = rho * self.omega(rho) * wr
        cos_t = np.cos(theta)
        out = np.empty(len(R))
        for i0 in range(0, len(R), 64):
            Rc = R[i0:i0 + 64]
            d2 = (Rc[:, None, None] ** 2 + rho[None, :, None] ** 2
                  - 2.0 * Rc[:, None, None] * rho[None, :, None] * cos_t[None, None, :])
            vals = self.omega(np.sqrt(np.maximum(d2, 0.0)))
            out[i0:i0 + 64] = np.einsum("r,crt->c", base, vals) * w_theta
        return out

    def _build_corr(self):
        r_max = 2.0 * self.rho_max
        radii = np.linspace(0.0, r_max, self.N_RADII)
        vals = self._corr_quad(radii)
        zero = vals[0]
        vals = vals / zero
        spline = CubicSpline(radii, vals)
        # interpolation error probed off-knot against direct quadrature
        probe = radii[:-1][::50] + 0.37 * (radii[1] - radii[0])
        err = float(np.max(np.abs(spline(probe) - self._corr_quad(probe) / zero)))
        return {"radii": radii, "values": vals, "spline": spline,
                "r_max": r_max, "interp_error": err}

    def corr_eval(self, R):
        c = self.corr
        R = np.asarray(R, dtype=float)
        return np.where(R < c["r_max"], c["spline"](np.minimum(R, c["r_max"])), 0.0)

    # -- Fourier profile ---------------------------------------------------
    @property
    def four(self):
        if self._four is None:
            self._four = self._build_fourier()
        return self._four

    def _hankel_omega(self, a):
        rho, wr = quad.gauss_legendre(0.0, self.rho_max, 400)
        f = rho * self.omega(rho) * wr
        return 2.0 * np.pi * (j0(2.0 * np.outer(np.asarray(a, float), rho)) @ f)

    def _build_fourier(self):
        # extend until the annulus mass is negligible; total mass is 1
        a_max = 4.0
        while True:
            a, w = quad.gauss_legendre(a_max, a_max + 2.0, 64)
            seg = float(2.0 * np.pi * np.sum(a * (self._hankel_omega(a) ** 2 / np.pi ** 2) * w))
            if seg < 1e-13:
                a_max += 2.0
                break
            a_max += 2.0
            if a_max > 64:
                break
        knots = np.linspace(0.0, a_max, self.CDF_KNOTS)
        vals = self._hankel_omega(knots) ** 2 / np.pi ** 2
        spline = CubicSpline(knots, vals)
        return {"knots": knots, "values": vals, "spline": spline, "a_max": a_max}

    def fourier_eval(self, a):
        f = self.four
        a = np.asarray(a, dtype=float)
        return np.where(a < f["a_max"], f["spline"](np.minimum(a, f["a_max"])), 0.0)

    @property
    def cdf(self):
        if self._cdf is None:
            f = self.four
            density = 2.0 * np.pi * f["knots"] * f["values"]
            c = cumulative_trapezoid(density, f["knots"], initial=0.0)
            self._cdf = c / c[-1]
        return self._cdf


@lru_cache(maxsize=16)
def _noncl_base(q: float) -> _NonclBase:
    return _NonclBase(q)


class NonclassicalityFilter(Filter):
    """Autocorrelation filter that preserves P-function negativity.

    For q > 2 the profile decays faster than any Gaussian, so the filtered
    P function of any state is a regular function, while the autocorrelation
    structure makes the transform Omega~ = (omega~)^2 / pi^2 >= 0 a
    probability density (CPTP). q = 2 is admitted for cross-checks and
    degenerates to the Gaussian filter with r = 1 / L^2.
    """

    is_radial = True

    def __init__(self, L: float, q: float = 4.0):
        if not (L > 0 and math.isfinite(L)):
            raise ValidationError(f"nonclassicality width L must be positive, got {L}")
        self.L = float(L)
        self.base = _noncl_base(float(q))
        self.q = self.base.q
        self.label = f"noncl(L={self.L:g},q={self.q:g})"
        self.gauss_margin = math.inf if self.q > 2 else 1.0 / self.L ** 2
        self.cptp_by_construction = (True, "transform is a squared Hankel profile")

    def __call__(self, xi):
        return self.base.corr_eval(np.abs(np.asarray(xi, dtype=complex)) / self.L)

    def fourier(self, alpha):
        a = np.abs(np.asarray(alpha, dtype=complex))
        return self.L ** 2 * self.base.fourier_eval(self.L * a)

    def sampler(self, seed):
        f = self.base.four
        return RadialInverseCdfSampler(f["knots"], self.base.cdf, seed, scale=1.0 / self.L)

    def to_config(self):
        return {"kind": "noncl", "L": self.L, "q": self.q}

    @property
    def width(self):
        return self.L

    @property
    def profile_interp_error(self) -> float:
        return self.base.corr["interp_error"]


def _klauder_f(x: np.ndarray) -> np.ndarray:
    """x^4 e^{-1/x^2} for x > 0, else 0; smooth at the origin."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = xp ** 4 * np.exp(-1.0 / xp ** 2)
    return out


class KlauderFilter(Filter):
    """Plateau filter, identically 1 on the square |u|, |v| <= L.

    Works in the doubled quadratures (u, v) = sqrt(2) (Re xi, Im xi):

        Omega(u, v) = exp(-[f(u-L) + f(-u-L) + f(v-L) + f(-v-L)]),
        f(x) = x^4 e^{-1/x^2} (x > 0).

    Infinitely smooth and super-Gaussian, so it regularizes every state,
    but the flat plateau breaks positive semidefiniteness of the induced
    map: the translates {-L, 0, L} along u give a 3x3 Bochner matrix with
    determinant -(Omega(2L, 0) - 1)^2 < 0.
    """

    is_radial = False
    gauss_margin = math.inf

    def __init__(self, L: float):
        if not (L > 0 and math.isfinite(L)):
            raise ValidationError(f"Klauder width L must be positive, got {L}")
        self.L = float(L)
        self.label = f"klauder(L={self.L:g})"
        self.cptp_by_construction = (
            False, "plateau translates give a negative Bochner determinant")

    def _g(self, u):
        return np.exp(-(_klauder_f(u - self.L) + _klauder_f(-u - self.L)))

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=complex)
        u = np.sqrt(2.0) * xi.real
        v = np.sqrt(2.0) * xi.imag
        return self._g(u) * self._g(v)

    def _g_transform(self, w):
        """G(w) = sqrt(2) int_0^inf g(u) cos(sqrt(2) w u) du (even in w)."""
        w = np.abs(np.asarray(w, dtype=float))
        U = self.L + 4.2
        wmax = float(w.max()) if w.size else 1.0
        n = max(256, int(1.3 * math.sqrt(2.0) * wmax * U / math.pi) + 96)
        u, wu = quad.gauss_legendre(0.0, U, n)
        f = self._g(u) * wu
        return math.sqrt(2.0) * (np.cos(math.sqrt(2.0) * np.outer(w, u)) @ f)

    def fourier(self, alpha):
        alpha = np.asarray(alpha, dtype=complex)
        sh = alpha.shape
        flat = alpha.ravel()
        out = (self._g_transform(flat.real) * self._g_transform(flat.imag)) / np.pi ** 2
        return out.reshape(sh)

    def sampler(self, seed):
        raise UnsamplableFilterError(
            "Klauder filters are certified not-cp (negative Bochner witness on "
            "the plateau translates); their transform is not a probability density")

    def to_config(self):
        return {"kind": "klauder", "L": self.L}

    @property
    def width(self):
        return self.L


class NarcowichCounterexampleFilter(Filter):
    """Kernel (1 - 3|xi|^2/2) e^{-|xi|^2}, positive but not CP.

    Its transform (1/pi) e^{-|alpha|^2} (3|alpha|^2/2 - 1/2) is negative at
    the origin, so the induced map is not completely positive; yet the
    kernel passes every Bochner sweep with the symplectic phase at
    eta_nw = 4, the signature of a positive (not completely positive) map.
    """

    is_radial = True
    gauss_margin = 2.0
    label = "narcowich-ce"

    def __init__(self):
        self.cptp_by_construction = (False, "transform is negative at the origin")

    def __call__(self, xi):
        t = np.abs(np.asarray(xi, dtype=complex)) ** 2
        return (1.0 - 1.5 * t) * np.exp(-t)

    def fourier(self, alpha):
        a2 = np.abs(np.asarray(alpha, dtype=complex)) ** 2
        return np.exp(-a2) * (1.5 * a2 - 0.5) / np.pi

    def sampler(self, seed):
        raise UnsamplableFilterError(
            "the counterexample kernel is certified not-cp (transform negative "
            "at the origin); it cannot be sampled as a displacement density")

    def to_config(self):
        return {"kind": "narcowich-ce"}


class SmoothingKernelFilter(Filter):
    """Omega equal to the characteristic function of a kernel state.

    The transform is then the kernel's Wigner function, so the filter is
    CPTP exactly when that Wigner function is nonnegative (e.g. thermal or
    squeezed kernels; Fock kernels are not). The kernel characteristic
    function must be real and even, which holds for parity-symmetric
    kernels; others are rejected.
    """

    def __init__(self, kernel: State):
        self.kernel = kernel
        self._phi = kernel.charfn()
        self.is_radial = kernel.is_phase_symmetric
        self.gauss_margin = self._phi.gauss_margin
        self.label = f"kernel({kernel.label})"
        self._radial_table = None
        # reject kernels whose characteristic function is not real-even
        rng = np.random.default_rng(1234)
        probe = rng.normal(0, 1.5, 32) + 1j * rng.normal(0, 1.5, 32)
        vals = self._phi(probe)
        if np.max(np.abs(vals.imag)) > 1e-10 or np.max(np.abs(vals - self._phi(-probe))) > 1e-10:
            raise ValidationError(
                f"kernel state {kernel.label} has a complex or odd characteristic "
                "function and cannot serve as a real symmetric filter")

    def __call__(self, xi):
        return self._phi(xi).real

    def _build_radial_table(self):
        K = quad.find_cutoff(lambda z: self._phi(z), start=4.0)
        a_max = max(6.0, K)
        knots = np.linspace(0.0, a_max, 2048)
        vals, _ = quad.radial_transform(lambda rho: self._phi(rho + 0j).real, knots, K)
        return {"knots": knots, "values": vals, "spline": CubicSpline(knots, vals),
                "a_max": a_max}

    def fourier(self, alpha):
        alpha = np.asarray(alpha, dtype=complex)
        if self.is_radial:
            if self._radial_table is None:
                self._radial_table = self._build_radial_table()
            t = self._radial_table
            a = np.abs(alpha)
            return np.where(a < t["a_max"], t["spline"](np.minimum(a, t["a_max"])), 0.0)
        K = quad.find_cutoff(lambda z: self._phi(z), start=4.0)
        vals, _ = quad.point_transform(lambda z: self._phi(z), alpha.ravel(), K)
        return vals.reshape(alpha.shape)

    def sampler(self, seed):
        if not self.is_radial:
            raise UnsamplableFilterError(
                "sampling is implemented for phase-symmetric kernels only")
        if self._radial_table is None:
            self._radial_table = self._build_radial_table()
        t = self._radial_table
        if t["values"].min() < -1e-10:
            raise UnsamplableFilterError(
                f"kernel {self.kernel.label} has a negative Wigner function "
                f"(min {t['values'].min():.3e}); the filter is not CPTP and "
                "cannot be sampled")
        density = 2.0 * np.pi * t["knots"] * np.clip(t["values"], 0.0, None)
        cdf = cumulative_trapezoid(density, t["knots"], initial=0.0)
        return RadialInverseCdfSampler(t["knots"], cdf / cdf[-1], seed)

    def to_config(self):
        return {"kind": "kernel", "state": self.kernel.spec()}


def gaussian_family():
    """Width-parameterized Gaussian family for the width solver (width = 1/r)."""
    return lambda width: GaussianFilter(1.0 / width)


def nonclassicality_family(q: float):
    """Width-parameterized nonclassicality family at fixed exponent q."""
    return lambda width: NonclassicalityFilter(width, q)


def parse_filter(spec: str) -> Filter:
    """Parse the filter mini-language.

    Grammar: gaussian:r=<f> | noncl:L=<f>,q=<f> | klauder:L=<f> |
    kernel:state=<statespec> | narcowich-ce.
    """
    text = spec.strip()
    kind, _, rest = text.partition(":")
    if kind == "narcowich-ce":
        if rest:
            raise ValidationError(f"narcowich-ce takes no parameters, got {spec!r}")
        return NarcowichCounterexampleFilter()
    if kind == "kernel":
        key, eq, value = rest.partition("=")
        if key.strip() != "state" or not eq:
            raise ValidationError(f"kernel filter spec must be kernel:state=<statespec>, got {spec!r}")
        return SmoothingKernelFilter(parse_state(value))
    kv = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValidationError(f"malformed filter spec item {item!r} in {spec!r}")
            try:
                kv[key.strip()] = float(value)
            except ValueError as exc:
                raise ValidationError(f"filter spec {spec!r}: {exc}") from None
    if kind == "gaussian":
        if set(kv) != {"r"}:
            raise ValidationError(f"gaussian filter needs exactly r=<f>, got {spec!r}")
        return GaussianFilter(kv["r"])
    if kind == "noncl":
        if not {"L"} <= set(kv) <= {"L", "q"}:
            raise ValidationError(f"noncl filter needs L=<f>[,q=<f>], got {spec!r}")
        return NonclassicalityFilter(kv["L"], kv.get("q", 4.0))
    if kind == "klauder":
        if set(kv) != {"L"}:
            raise ValidationError(f"klauder filter needs exactly L=<f>, got {spec!r}")
        return KlauderFilter(kv["L"])
    raise ValidationError(f"unknown filter kind {kind!r}")


def filter_from_config(config: dict) -> Filter:
    """Rebuild a filter from a to_config() dict, e.g. out of a saved report."""
    kind = config.get("kind")
    if kind == "gaussian":
        return GaussianFilter(config["r"])
    if kind == "noncl":
        return NonclassicalityFilter(config["L"], config.get("q", 4.0))
    if kind == "klauder":
        return KlauderFilter(config["L"])
    if kind == "narcowich-ce":
        return NarcowichCounterexampleFilter()
    if kind == "kernel":
        return SmoothingKernelFilter(parse_state(config["state"]))
    raise ValidationError(f"unknown filter config kind {kind!r}")
