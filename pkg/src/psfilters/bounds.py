"""Fidelity and trace-distance certificates for filtered states.

The workhorse quantity is the overlap

    F_e = Int Omega~(alpha) |Phi(alpha)|^2 d^2alpha,

the entanglement fidelity of the filtering map on the given state. It lower
bounds the fidelity between the state and its filtered version (with
equality for pure states) and hence upper bounds their trace distance via

    D(rho, rho_Omega) <= sqrt(1 - F_e).

F_e only needs the state's characteristic function and the filter's
transform, so certificates are cheap and never touch a Fock truncation;
the Fock-space cross-checks live in `bound_chain_report`.
"""

import json
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .errors import SearchError, ValidationError
from .filters import Filter
from .filtering import apply_filter_fock
from .fock import fidelity, trace_distance
from .quadrature import find_cutoff, integrate_2d, integrate_radial
from .states import State

_MC_CHUNK = 65536


@dataclass
class FidelityCertificate:
    """Certified F_e value with its route and error estimate."""

    state_label: str
    filter_config: dict
    f_e: float
    method: str
    error_estimate: float
    trace_distance_bound: float
    n_samples: int = 0
    seed: int | None = None
    width: float | None = None

    def to_dict(self) -> dict:
        return {"tool_version": __version__, "state": self.state_label,
                "filter": self.filter_config, "f_e": self.f_e,
                "method": self.method, "error_estimate": self.error_estimate,
                "trace_distance_bound": self.trace_distance_bound,
                "n_samples": self.n_samples, "seed": self.seed,
                "width": self.width}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _filter_width(filt: Filter) -> float | None:
    try:
        return float(filt.width)
    except NotImplementedError:
        return None


def entanglement_fidelity(state: State, filt: Filter, method: str = "quadrature",
                          n_samples: int = 200_000, seed: int | None = None,
                          atol: float = 1e-10) -> FidelityCertificate:
    """F_e by deterministic quadrature or by sampling the filter transform.

    The Monte Carlo route averages |Phi|^2 over displacements drawn from
    Omega~ and therefore requires a CPTP filter; quadrature works for any
    filter (F_e then loses its fidelity interpretation but remains the
    defining integral).
    """
    phi = state.charfn()
    n_used, used_seed = 0, None
    if method == "quadrature":
        def h(alpha):
            return filt.fourier(alpha) * np.abs(phi(alpha)) ** 2

        K = find_cutoff(h, threshold=1e-15, context=f"F_e of {phi.label}")
        if filt.is_radial and state.is_phase_symmetric:
            val, resid = integrate_radial(lambda a: h(a + 0j), K, atol=atol)
        else:
            val, resid = integrate_2d(h, K, atol=atol)
        err = resid
    elif method == "mc":
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        sampler = filt.sampler(seed)
        vals = np.empty(n_samples)
        for i in range(0, n_samples, _MC_CHUNK):
            take = min(_MC_CHUNK, n_samples - i)
            vals[i:i + take] = np.abs(phi(sampler.draw(take))) ** 2
        val = float(vals.mean())
        err = float(vals.std(ddof=1) / np.sqrt(n_samples))
        n_used, used_seed = n_samples, seed
    else:
        raise ValidationError(f"unknown method {method!r}; use 'quadrature' or 'mc'")
    return FidelityCertificate(state_label=phi.label, filter_config=filt.to_config(),
                               f_e=float(val), method=method, error_estimate=err,
                               trace_distance_bound=float(np.sqrt(max(0.0, 1.0 - val))),
                               n_samples=n_used, seed=used_seed,
                               width=_filter_width(filt))


@dataclass
class PureFidelityReport:
    """For pure states F(rho, rho_Omega) equals F_e; both routes reported."""

    certificate: FidelityCertificate
    fock_overlap: float
    agreement: float

    def to_dict(self) -> dict:
        return {"certificate": self.certificate.to_dict(),
                "fock_overlap": self.fock_overlap, "agreement": self.agreement}


def pure_state_fidelity_exact(state: State, filt: Filter, dim: int = 40,
                              atol: float = 1e-9) -> PureFidelityReport:
    """Check F_e = <psi| rho_Omega |psi> for a pure state.

    Raises ValidationError for mixed states, where the identity fails and
    only the inequality F_e <= F survives.
    """
    psi = state.fock_vector(dim)
    filtered = apply_filter_fock(state, filt, dim=dim, atol=atol)
    overlap = float(np.real(psi.conj() @ filtered.rho @ psi))
    cert = entanglement_fidelity(state, filt, method="quadrature")
    return PureFidelityReport(certificate=cert, fock_overlap=overlap,
                              agreement=abs(cert.f_e - overlap))


@dataclass
class BoundChainReport:
    """Everything needed to check F_e <= F and D <= sqrt(1 - F_e) at once."""

    certificate: FidelityCertificate
    dim: int
    fidelity_value: float
    trace_distance_value: float
    fidelity_slack: float  # F - F_e, nonnegative when the bound holds
    distance_slack: float  # sqrt(1 - F_e) - D, nonnegative when the bound holds
    filtered_trace: float

    def to_dict(self) -> dict:
        return {"certificate": self.certificate.to_dict(), "dim": self.dim,
                "fidelity": self.fidelity_value,
                "trace_distance": self.trace_distance_value,
                "fidelity_slack": self.fidelity_slack,
                "distance_slack": self.distance_slack,
                "filtered_trace": self.filtered_trace}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def bound_chain_report(state: State, filt: Filter, dim: int = 40,
                       atol: float = 1e-9) -> BoundChainReport:
    """Compute F_e, the Fock-space F and D, and the bound slacks.

    The truncation dim must hold the state and its filtered version; pick it
    so the reported filtered_trace stays within ~1e-6 of one, otherwise the
    slacks measure truncation error instead of the bounds.
    """
    cert = entanglement_fidelity(state, filt, method="quadrature")
    rho = state.fock_matrix(dim)
    filtered = apply_filter_fock(state, filt, dim=dim, atol=atol)
    f = fidelity(rho, filtered.rho)
    d = trace_distance(rho, filtered.rho)
    return BoundChainReport(certificate=cert, dim=dim, fidelity_value=f,
                            trace_distance_value=d,
                            fidelity_slack=f - cert.f_e,
                            distance_slack=cert.trace_distance_bound - d,
                            filtered_trace=filtered.trace_value)


def fidelity_bound_check(state: State, filt: Filter, dim: int = 40,
                         atol: float = 1e-9) -> BoundChainReport:
    """Report for the lower bound F_e <= F(rho, rho_Omega)."""
    return bound_chain_report(state, filt, dim=dim, atol=atol)


def trace_distance_bound_check(state: State, filt: Filter, dim: int = 40,
                               atol: float = 1e-9) -> BoundChainReport:
    """Report for the upper bound D(rho, rho_Omega) <= sqrt(1 - F_e)."""
    return bound_chain_report(state, filt, dim=dim, atol=atol)


@dataclass
class WidthSolution:
    """Smallest width (within bracket resolution) meeting an F_e target."""

    width: float
    certificate: FidelityCertificate
    target: float
    n_evaluations: int
    bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return {"width": self.width, "certificate": self.certificate.to_dict(),
                "target": self.target, "n_evaluations": self.n_evaluations,
                "bracket": list(self.bracket)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def solve_width(state: State, family, epsilon: float,
                max_doublings: int = 16, bisections: int = 40) -> WidthSolution:
    """Find the smallest family width with F_e >= 1 - epsilon for the state.

    `family` maps a width to a Filter (see gaussian_family and
    nonclassicality_family); F_e is monotone in the width for these
    families, so a doubling search brackets the target and a geometric
    bisection pins it down. Raises SearchError when no width up to
    2^max_doublings reaches the target.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must be in (0, 1), got {epsilon}")
    target = 1.0 - epsilon
    evals = 0

    def measure(w: float) -> FidelityCertificate:
        nonlocal evals
        evals += 1
        return entanglement_fidelity(state, family(w), method="quadrature")

    hi = 1.0
    cert_hi = measure(hi)
    if cert_hi.f_e >= target:
        pass_w, pass_cert = hi, cert_hi
        w = hi
        for _ in range(max_doublings):
            w /= 2.0
            c = measure(w)
            if c.f_e < target:
                lo, hi, cert_hi = w, pass_w, pass_cert
                break
            pass_w, pass_cert = w, c
        else:
            # passes even at the smallest width probed
            return WidthSolution(width=pass_w, certificate=pass_cert, target=target,
                                 n_evaluations=evals, bracket=(pass_w, pass_w))
    else:
        lo = hi
        for _ in range(max_doublings):
            hi *= 2.0
            cert_hi = measure(hi)
            if cert_hi.f_e >= target:
                lo = hi / 2.0
                break
            lo = hi
        else:
            raise SearchError(
                f"no width up to {hi:g} reaches F_e >= {target:g} "
                f"(best {cert_hi.f_e:.6f})",
                best_width=hi, best_certificate=cert_hi)
    for _ in range(bisections):
        mid = float(np.sqrt(lo * hi))
        if mid in (lo, hi):
            break
        cert_mid = measure(mid)
        if cert_mid.f_e >= target:
            hi, cert_hi = mid, cert_mid
        else:
            lo = mid
    return WidthSolution(width=hi, certificate=cert_hi, target=target,
                         n_evaluations=evals, bracket=(lo, hi))
