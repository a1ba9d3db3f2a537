"""Command-line front end.

Subcommands map one-to-one onto library operations and emit their JSON or
CSV artifacts; every output embeds the tool version, the full run
configuration, and the numerical tolerances in effect, so a saved artifact
is reproducible byte for byte from its own header.

Exit codes: certify returns 0 for cptp-evidence, 2 for not-cp and 3 for
positive-not-cp-candidate so shell pipelines can branch on the verdict;
all commands return 1 on errors (including usage errors).
"""

import argparse
import json
import os
import sys

import numpy as np

from ._version import __version__
from .applications import (LossChannel, channel_output_distance_bound,
                           channel_output_estimate, heterodyne_estimate)
from .bounds import bound_chain_report, solve_width
from .errors import PhaseSpaceError, ValidationError
from .filtering import regularized_p_grid
from .filters import gaussian_family, nonclassicality_family, parse_filter
from .physicality import classify_filter
from .states import parse_state

_EXIT_BY_VERDICT = {"cptp-evidence": 0, "not-cp": 2, "positive-not-cp-candidate": 3}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would collide with the
    # not-cp verdict code; route all errors to exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _parse_family(spec: str):
    """Family mini-language: gaussian | noncl:q=<f> (width is the solver's knob)."""
    kind, _, rest = spec.strip().partition(":")
    if kind == "gaussian":
        if rest:
            raise ValidationError(
                f"gaussian family takes no parameters (width is solved for), got {spec!r}")
        return gaussian_family()
    if kind == "noncl":
        kv = dict(item.partition("=")[::2] for item in rest.split(",")) if rest else {}
        if set(kv) not in ({"q"}, set()):
            raise ValidationError(f"noncl family takes only q=<f>, got {spec!r}")
        return nonclassicality_family(float(kv.get("q", 4.0)))
    raise ValidationError(f"unknown family kind {kind!r}; use gaussian or noncl:q=<f>")


def _parse_povm(spec: str) -> int:
    kind, _, rest = spec.strip().partition(":")
    key, eq, value = rest.partition("=")
    if kind != "fock" or key.strip() != "nmax" or not eq:
        raise ValidationError(f"povm spec must be fock:nmax=<int>, got {spec!r}")
    return int(value)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _wrap(config: dict, result: dict) -> str:
    return json.dumps({"config": config, "result": result}, indent=2, sort_keys=True)


def _fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy % (2 ** 63))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="psfilters",
                description="Phase-space filtering toolkit: certify filters, "
                            "regularize P functions, bound distances, estimate "
                            "channel outputs and photon statistics.")
    p.add_argument("--version", action="version", version=f"psfilters {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, state=False, filt=False, grid=False, stochastic=False, dim=True):
        if state:
            sp.add_argument("--state", required=True,
                            help="state spec, e.g. fock:n=1 or coherent:re=1,im=0")
        if filt:
            sp.add_argument("--filter", required=True, dest="filter_spec",
                            help="filter spec, e.g. gaussian:r=1 or noncl:L=1.5,q=4")
        if grid:
            sp.add_argument("--grid-extent", type=float, default=6.0)
            sp.add_argument("--grid-points", type=int, default=257)
        if stochastic:
            sp.add_argument("--seed", type=int, default=None,
                            help="RNG seed; generated and recorded when omitted")
            sp.add_argument("--samples", type=int, default=100_000)
        if dim:
            sp.add_argument("--dim", type=int, default=40)
        sp.add_argument("--threads", type=int,
                        default=int(os.environ.get("PSFILTERS_THREADS", "0")) or None,
                        help="cap BLAS worker threads (default: PSFILTERS_THREADS or unlimited)")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=["json", "csv"], default=None)

    sp = sub.add_parser("certify", help="classify a filter's physicality")
    sp.add_argument("--sets", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    add_common(sp, filt=True, dim=False)

    sp = sub.add_parser("regularize", help="regularized P grid of a filtered state")
    add_common(sp, state=True, filt=True, grid=True, dim=False)

    sp = sub.add_parser("bounds", help="F_e, fidelity, trace distance and bound slacks")
    add_common(sp, state=True, filt=True)

    sp = sub.add_parser("solve-width", help="smallest filter width reaching an F_e target")
    sp.add_argument("--family", required=True,
                    help="filter family: gaussian or noncl:q=<f>")
    sp.add_argument("--epsilon", type=float, required=True)
    add_common(sp, state=True, dim=False)

    sp = sub.add_parser("channel-out", help="channel output on a filtered state")
    sp.add_argument("--eta", type=float, required=True,
                    help="loss amplitude transmission (energy transmissivity eta^2)")
    add_common(sp, state=True, filt=True, grid=True)

    sp = sub.add_parser("heterodyne-est",
                        help="filtered photon statistics from Husimi samples")
    sp.add_argument("--povm", default="fock:nmax=5", help="fock:nmax=<int>")
    add_common(sp, state=True, filt=True, stochastic=True)
    return p


def _run(args) -> int:
    cfg = {"command": args.command, "tool_version": __version__}
    for key in ("state", "filter_spec", "dim", "grid_extent", "grid_points",
                "seed", "samples", "threads", "format", "family", "epsilon",
                "eta", "povm", "sets"):
        if hasattr(args, key):
            cfg["filter" if key == "filter_spec" else key] = getattr(args, key)

    if args.command == "certify":
        filt = parse_filter(args.filter_spec)
        cfg["tolerances"] = {"tol_base": 1e-9}
        report = classify_filter(filt, n_sets=args.sets, seed=args.seed)
        _emit(_wrap(cfg, report.to_dict()), args.out)
        return _EXIT_BY_VERDICT[report.verdict]

    if args.command == "regularize":
        state = parse_state(args.state)
        filt = parse_filter(args.filter_spec)
        cfg["tolerances"] = {"grid_atol": 1e-9}
        grid = regularized_p_grid(state, filt, half_extent=args.grid_extent,
                                  n_points=args.grid_points)
        fmt = args.format or "csv"
        if fmt == "csv":
            for k, v in cfg.items():
                grid.meta[f"config_{k}"] = json.dumps(v) if isinstance(v, dict) else v
            _emit(grid.to_csv(), args.out)
        else:
            _emit(_wrap(cfg, {
                "s": grid.s, "half_extent": grid.half_extent,
                "n_points": grid.n_points, "norm_residual": grid.norm_residual,
                "quad_residual": grid.quad_residual, "meta": grid.meta,
                "values": [[float(v) for v in row] for row in grid.values]}),
                args.out)
        return 0

    if args.command == "bounds":
        state = parse_state(args.state)
        filt = parse_filter(args.filter_spec)
        cfg["tolerances"] = {"fe_atol": 1e-10, "grid_atol": 1e-9}
        report = bound_chain_report(state, filt, dim=args.dim)
        _emit(_wrap(cfg, report.to_dict()), args.out)
        return 0

    if args.command == "solve-width":
        state = parse_state(args.state)
        family = _parse_family(args.family)
        cfg["tolerances"] = {"fe_atol": 1e-10}
        solution = solve_width(state, family, args.epsilon)
        _emit(_wrap(cfg, solution.to_dict()), args.out)
        return 0

    if args.command == "channel-out":
        state = parse_state(args.state)
        filt = parse_filter(args.filter_spec)
        channel = LossChannel(args.eta)
        cfg["tolerances"] = {"grid_atol": 1e-9}
        grid = regularized_p_grid(state, filt, half_extent=args.grid_extent,
                                  n_points=args.grid_points)
        est = channel_output_estimate(grid, channel, dim=args.dim)
        cert = channel_output_distance_bound(state, filt)
        _emit(_wrap(cfg, {"estimate": est.to_dict(), "bound": cert.to_dict()}),
              args.out)
        return 0

    if args.command == "heterodyne-est":
        state = parse_state(args.state)
        filt = parse_filter(args.filter_spec)
        n_max = _parse_povm(args.povm)
        if args.seed is None:
            args.seed = cfg["seed"] = _fresh_seed()
        cfg["tolerances"] = {"fe_atol": 1e-10}
        est = heterodyne_estimate(state, filt, n_max=n_max, n_samples=args.samples,
                                  seed=args.seed, dim=args.dim)
        _emit(_wrap(cfg, est.to_dict()), args.out)
        return 0

    raise ValidationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limiter = None
    if getattr(args, "threads", None):
        from threadpoolctl import threadpool_limits
        limiter = threadpool_limits(limits=args.threads)
    try:
        return _run(args)
    except PhaseSpaceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    finally:
        if limiter is not None:
            limiter.unregister()


if __name__ == "__main__":
    sys.exit(main())
