"""s-parametrized quasiprobability distributions on square grids.

W^(s)(alpha) = (1/pi^2) Int Phi(xi) e^{s|xi|^2/2} e^{alpha xi* - alpha* xi} d2xi

with s = 0 the Wigner function, s = -1 the Husimi Q, and s = +1 the
Glauber-Sudarshan P. The integral only converges when the integrand decays,
which for s = +1 requires the characteristic function to beat e^{|xi|^2/2};
unfiltered states generally fail that and raise SingularPQDError.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .errors import SingularPQDError, ValidationError
from .quadrature import find_cutoff, grid_transform
from .states import CharFn, State

_CSV_MAGIC = "psfilters-pqd-grid-v1"


@dataclass
class PQDGrid:
    """Values of an s-parametrized distribution on a centered square grid.

    values[j, i] is the distribution at alpha = axis[i] + 1j * axis[j]
    (rows sweep the imaginary part). norm_residual is the Riemann sum minus
    one; quad_residual is the node-doubling change of the quadrature.
    """

    s: float
    half_extent: float
    n_points: int
    values: np.ndarray
    norm_residual: float
    quad_residual: float
    meta: dict = field(default_factory=dict)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_extent, self.half_extent, self.n_points)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / (self.n_points - 1)

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    def alphas(self) -> np.ndarray:
        ax = self.axis
        return ax[None, :] + 1j * ax[:, None]

    def riemann_sum(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def marginal(self) -> tuple[np.ndarray, np.ndarray]:
        """Marginal over the imaginary axis, mapped to the position
        quadrature x = sqrt(2) Re alpha (valid for the Wigner case s = 0)."""
        dens_alpha = self.values.sum(axis=0) * self.spacing
        x = np.sqrt(2.0) * self.axis
        return x, dens_alpha / np.sqrt(2.0)

    def moment(self, fn) -> float:
        """Riemann estimate of Int fn(alpha) W^(s)(alpha) d2alpha."""
        return float(np.sum(fn(self.alphas()) * self.values).real * self.cell_area)

    def to_csv(self, path=None) -> str | None:
        buf = io.StringIO()
        buf.write(f"# {_CSV_MAGIC}\n")
        buf.write(f"# tool_version: {__version__}\n")
        buf.write(f"# s: {self.s!r}\n")
        buf.write(f"# half_extent: {self.half_extent!r}\n")
        buf.write(f"# n_points: {self.n_points}\n")
        buf.write(f"# spacing: {self.spacing!r}\n")
        buf.write(f"# norm_residual: {self.norm_residual!r}\n")
        buf.write(f"# quad_residual: {self.quad_residual!r}\n")
        for k in sorted(self.meta):
            buf.write(f"# {k}: {self.meta[k]}\n")
        buf.write("# layout: values[j,i] at alpha = axis[i] + 1j*axis[j]; "
                  "rows are Im(alpha) ascending\n")
        np.savetxt(buf, self.values, delimiter=",", fmt="%.17g")
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path_or_text) -> "PQDGrid":
        if isinstance(path_or_text, str) and "\n" in path_or_text:
            lines = path_or_text.splitlines()
        else:
            with open(path_or_text) as fh:
                lines = fh.read().splitlines()
        if not lines or lines[0].lstrip("# ").strip() != _CSV_MAGIC:
            raise ValidationError("not a recognized pqd grid file")
        header, rows = {}, []
        for ln in lines[1:]:
            if ln.startswith("#"):
                body = ln[1:].strip()
                if ":" in body:
                    k, v = body.split(":", 1)
                    header[k.strip()] = v.strip()
            elif ln.strip():
                rows.append(np.array(ln.split(","), dtype=float))
        values = np.vstack(rows)
        known = {"tool_version", "s", "half_extent", "n_points", "spacing",
                 "norm_residual", "quad_residual", "layout"}
        meta = {k: v for k, v in header.items() if k not in known}
        grid = cls(s=float(header["s"]), half_extent=float(header["half_extent"]),
                   n_points=int(header["n_points"]), values=values,
                   norm_residual=float(header["norm_residual"]),
                   quad_residual=float(header["quad_residual"]), meta=meta)
        if grid.values.shape != (grid.n_points, grid.n_points):
            raise ValidationError("grid shape does not match declared n_points")
        return grid


def _as_charfn(state_or_charfn) -> CharFn:
    if isinstance(state_or_charfn, State):
        return state_or_charfn.charfn()
    if isinstance(state_or_charfn, CharFn):
        return state_or_charfn
    raise ValidationError("expected a State or CharFn")


def spqd_grid(state_or_charfn, s: float, half_extent: float = 6.0,
              n_points: int = 257, atol: float = 1e-9) -> PQDGrid:
    """Evaluate W^(s) on a (n_points x n_points) grid by Fourier quadrature.

    Raises SingularPQDError when the integrand does not decay inside the
    cutoff cap, which is the numerical signature of an s too large for the
    state (most prominently s = +1 without filtering).
    """
    phi = _as_charfn(state_or_charfn)
    if not np.isfinite(half_extent) or half_extent <= 0:
        raise ValidationError("half_extent must be positive")
    if n_points < 9:
        raise ValidationError("n_points must be at least 9")

    def integrand(xi):
        return phi(xi) * np.exp((s / 2.0) * np.abs(xi) ** 2)

    context = f"s={s:g} transform of {phi.label}"
    K = find_cutoff(integrand, error=SingularPQDError, context=context, s=s)
    values, resid = grid_transform(integrand, np.linspace(-half_extent, half_extent,
                                                          n_points), K, atol=atol)
    grid = PQDGrid(s=s, half_extent=float(half_extent), n_points=int(n_points),
                   values=values, norm_residual=0.0, quad_residual=resid,
                   meta={"source": phi.label, "cutoff": f"{K:.6g}"})
    grid.norm_residual = grid.riemann_sum() - 1.0
    return grid
