"""Bosonic state catalog and characteristic functions.

Every state exposes its characteristic function Phi(xi) = Tr[rho D(xi)] in
closed form (validated against the numeric trace in the test suite) plus a
number-basis representation at a requested truncation. The catalog covers
vacuum, coherent, Fock, thermal, squeezed vacuum, and even/odd cat states;
arbitrary density matrices enter through NumericState.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fock as fockmod
from .errors import ValidationError


def laguerre(n: int, x: np.ndarray) -> np.ndarray:
    """Laguerre polynomial L_n(x) by upward recurrence in n.

    (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}; stable for the moderate n
    used here.
    """
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x)
    prev = np.ones_like(x)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1.0)
    return cur


@dataclass(frozen=True)
class CharFn:
    """Vectorized characteristic function with decay metadata.

    gauss_margin is the coefficient c in the Gaussian envelope
    |Phi(xi)| <= C e^{-c |xi|^2 / 2} (math.inf for faster-than-Gaussian
    decay). It only seeds quadrature cutoff searches; the numeric boundary
    scan remains the authority on whether a transform exists.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    label: str
    gauss_margin: float = 1.0

    def __call__(self, xi) -> np.ndarray:
        return self.fn(np.asarray(xi, dtype=complex))


def _coherent_overlap(beta: complex, alpha: complex) -> complex:
    # <beta|alpha> = exp(-|beta|^2/2 - |alpha|^2/2 + conj(beta) alpha)
    return np.exp(-abs(beta) ** 2 / 2 - abs(alpha) ** 2 / 2 + np.conjugate(beta) * alpha)


class State:
    """Base class for the state catalog."""

    label: str = "state"
    is_pure: bool = False
    #: characteristic function depends on |xi| only
    is_phase_symmetric: bool = False

    def charfn(self) -> CharFn:
        raise NotImplementedError

    def spec(self) -> str:
        """Canonical mini-language string, parse_state(spec()) == self."""
        raise ValidationError(f"{self.label} has no mini-language spec")

    def fock_matrix(self, dim: int) -> np.ndarray:
        v = self.fock_vector(dim)
        return np.outer(v, v.conj())

    def fock_vector(self, dim: int) -> np.ndarray:
        raise ValidationError(f"{self.label} is not pure, no state vector exists")

    def mean_photons(self) -> float:
        raise NotImplementedError

    def truncation_leakage(self, dim: int) -> float:
        return fockmod.truncation_leakage(self.fock_matrix(dim))


@dataclass(frozen=True)
class Vacuum(State):
    label: str = field(default="vacuum", init=False)
    is_pure = True
    is_phase_symmetric = True

    def charfn(self) -> CharFn:
        return CharFn(lambda xi: np.exp(-np.abs(xi) ** 2 / 2), "vacuum", 1.0)

    def spec(self) -> str:
        return "vacuum"

    def fock_vector(self, dim: int) -> np.ndarray:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v

    def mean_photons(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Coherent(State):
    alpha: complex
    label: str = field(default="coherent", init=False)
    is_pure = True

    def charfn(self) -> CharFn:
        a = complex(self.alpha)

        def fn(xi):
            return np.exp(-np.abs(xi) ** 2 / 2 + xi * np.conjugate(a) - np.conjugate(xi) * a)

        return CharFn(fn, f"coherent({a:g})", 1.0)

    def spec(self) -> str:
        a = complex(self.alpha)
        return f"coherent:re={a.real!r},im={a.imag!r}"

    def fock_vector(self, dim: int) -> np.ndarray:
        return fockmod.coherent_vector(complex(self.alpha), dim)

    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class Fock(State):
    n: int
    label: str = field(default="fock", init=False)
    is_pure = True
    is_phase_symmetric = True

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValidationError(f"Fock index must be a nonnegative integer, got {self.n}")

    def charfn(self) -> CharFn:
        n = int(self.n)

        def fn(xi):
            t = np.abs(xi) ** 2
            return np.exp(-t / 2) * laguerre(n, t)

        return CharFn(fn, f"fock({n})", 1.0)

    def spec(self) -> str:
        return f"fock:n={int(self.n)}"

    def fock_vector(self, dim: int) -> np.ndarray:
        fockmod.require_dim(dim, self.n + 1, f"fock({self.n})")
        v = np.zeros(dim, dtype=complex)
        v[int(self.n)] = 1.0
        return v

    def mean_photons(self) -> float:
        return float(self.n)


@dataclass(frozen=True)
class Thermal(State):
    nbar: float
    label: str = field(default="thermal", init=False)
    is_phase_symmetric = True

    def __post_init__(self):
        if self.nbar < 0:
            raise ValidationError(f"thermal occupation must be >= 0, got {self.nbar}")

    def charfn(self) -> CharFn:
        c = 1.0 + 2.0 * self.nbar

        def fn(xi):
            return np.exp(-c * np.abs(xi) ** 2 / 2)

        return CharFn(fn, f"thermal({self.nbar:g})", c)

    def fock_matrix(self, dim: int) -> np.ndarray:
        n = np.arange(dim)
        if self.nbar == 0:
            p = np.zeros(dim)
            p[0] = 1.0
        else:
            p = np.exp(n * np.log(self.nbar) - (n + 1) * np.log1p(self.nbar))
        return np.diag(p).astype(complex)

    def spec(self) -> str:
        return f"thermal:nbar={float(self.nbar)!r}"

    def mean_photons(self) -> float:
        return float(self.nbar)


@dataclass(frozen=True)
class Squeezed(State):
    """Squeezed vacuum S(z)|0> with z = r e^{i phase}."""

    r: float
    phase: float = 0.0
    label: str = field(default="squeezed", init=False)
    is_pure = True

    def __post_init__(self):
        if self.r < 0:
            raise ValidationError(f"squeezing magnitude must be >= 0, got {self.r}")

    def charfn(self) -> CharFn:
        ch = np.cosh(2 * self.r)
        sh = np.sinh(2 * self.r)
        ph = np.exp(-1j * self.phase)

        def fn(xi):
            return np.exp(-(ch * np.abs(xi) ** 2 + sh * np.real(ph * xi ** 2)) / 2)

        # slowest decay along the anti-squeezed quadrature: coefficient e^{-2r}
        return CharFn(fn, f"squeezed({self.r:g},{self.phase:g})", float(np.exp(-2 * self.r)))

    def fock_vector(self, dim: int) -> np.ndarray:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0 / np.sqrt(np.cosh(self.r))
        ratio = -np.exp(1j * self.phase) * np.tanh(self.r)
        for m in range(0, dim - 2, 2):
            # c_{m+2} / c_m for even m
            v[m + 2] = v[m] * ratio * np.sqrt((m + 1) * (m + 2)) / (m + 2.0)
        return v

    def spec(self) -> str:
        return f"squeezed:r={float(self.r)!r},phase={float(self.phase)!r}"

    def mean_photons(self) -> float:
        return float(np.sinh(self.r) ** 2)


@dataclass(frozen=True)
class Cat(State):
    """Normalized |alpha> + parity |-alpha> superposition, parity = +-1."""

    alpha: complex
    parity: int = 1
    label: str = field(default="cat", init=False)
    is_pure = True

    def __post_init__(self):
        if self.parity not in (-1, 1):
            raise ValidationError(f"cat parity must be +1 or -1, got {self.parity}")
        if self.parity == -1 and self.alpha == 0:
            raise ValidationError("odd cat with zero amplitude is the null state")

    def _norm2(self) -> float:
        return 2.0 * (1.0 + self.parity * np.exp(-2 * abs(self.alpha) ** 2))

    def charfn(self) -> CharFn:
        a = complex(self.alpha)
        p = self.parity
        n2 = self._norm2()

        def fn(xi):
            # <b|D(xi)|c> = e^{(xi c* - xi* c)/2} <b|c + xi>, summed over the
            # four coherent components
            total = np.zeros_like(xi, dtype=complex)
            for b, c, w in ((a, a, 1.0), (a, -a, p), (-a, a, p), (-a, -a, 1.0)):
                half_phase = np.exp((xi * np.conjugate(c) - np.conjugate(xi) * c) / 2)
                ov = np.exp(-abs(b) ** 2 / 2 - np.abs(c + xi) ** 2 / 2
                            + np.conjugate(b) * (c + xi))
                total += w * half_phase * ov
            return total / n2

        return CharFn(fn, f"cat({a:g},{p:+d})", 1.0)

    def spec(self) -> str:
        a = complex(self.alpha)
        return f"cat:re={a.real!r},im={a.imag!r},parity={int(self.parity)}"

    def fock_vector(self, dim: int) -> np.ndarray:
        v = fockmod.coherent_vector(complex(self.alpha), dim)
        w = fockmod.coherent_vector(-complex(self.alpha), dim)
        out = v + self.parity * w
        return out / np.sqrt(self._norm2())

    def mean_photons(self) -> float:
        a2 = abs(self.alpha) ** 2
        e = np.exp(-2 * a2)
        return float(a2 * (1 - self.parity * e) / (1 + self.parity * e))


class NumericState(State):
    """State given directly as a number-basis density matrix."""

    label = "numeric"

    def __init__(self, rho: np.ndarray, validate: bool = True):
        rho = np.asarray(rho, dtype=complex)
        if validate:
            fockmod.validate_density_matrix(rho)
        self.rho = rho

    def charfn(self) -> CharFn:
        rho = self.rho
        dim = rho.shape[0]

        def fn(xi):
            flat = np.asarray(xi, dtype=complex).ravel()
            out = np.empty(len(flat), dtype=complex)
            for i in range(0, len(flat), 512):
                D = fockmod.displacement_matrices(flat[i:i + 512], dim)
                out[i:i + 512] = np.einsum("ij,kji->k", rho, D)
            return out.reshape(np.shape(xi))

        return CharFn(fn, f"numeric(dim={dim})", 1.0)

    def fock_matrix(self, dim: int) -> np.ndarray:
        if dim < self.rho.shape[0]:
            return self.rho[:dim, :dim].copy()
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.rho.shape[0], : self.rho.shape[0]] = self.rho
        return out

    def mean_photons(self) -> float:
        return float(np.sum(np.arange(self.rho.shape[0]) * np.diag(self.rho).real))


def parse_state(spec: str) -> State:
    """Parse the state mini-language.

    Grammar: kind[:key=value[,key=value...]] with kinds
    vacuum | coherent:re=,im= | fock:n= | thermal:nbar= |
    squeezed:r=[,phase=] | cat:re=,im=[,parity=].
    """
    kind, _, rest = spec.strip().partition(":")
    kv = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValidationError(f"malformed state spec item {item!r} in {spec!r}")
            kv[key.strip()] = value.strip()

    def take(key, conv, default=None, required=False):
        if key not in kv:
            if required:
                raise ValidationError(f"state spec {spec!r} missing key {key!r}")
            return default
        try:
            return conv(kv.pop(key))
        except ValueError as exc:
            raise ValidationError(f"state spec {spec!r}: {exc}") from None

    if kind == "vacuum":
        out = Vacuum()
    elif kind == "coherent":
        out = Coherent(take("re", float, 0.0) + 1j * take("im", float, 0.0))
    elif kind == "fock":
        out = Fock(take("n", int, required=True))
    elif kind == "thermal":
        out = Thermal(take("nbar", float, required=True))
    elif kind == "squeezed":
        out = Squeezed(take("r", float, required=True), take("phase", float, 0.0))
    elif kind == "cat":
        out = Cat(take("re", float, 0.0) + 1j * take("im", float, 0.0),
                  take("parity", int, 1))
    else:
        raise ValidationError(f"unknown state kind {kind!r}")
    if kv:
        raise ValidationError(f"state spec {spec!r} has unknown keys: {', '.join(sorted(kv))}")
    return out
