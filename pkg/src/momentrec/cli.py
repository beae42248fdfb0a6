"""Command-line interface.

Subcommands: ``moments`` (forward computation), ``recover`` (field from
moments or samples), ``image`` (thresholded mask of a region recovery),
``discrete`` (distribution recovery from 1-D moments), ``simulate``
(replicated sampling study), ``tables`` (the pinned reproduction runs).

Exit codes: 0 success, 1 a reproduction check missed its tolerance,
2 usage or input errors, 3 precision policy insufficient for the
requested order (rerun with exact-rational or more big-float bits).

Numeric flags that configure exact arithmetic accept rational spellings
such as ``1/2`` as well as decimals.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .errors import MomentRecoveryError, PrecisionInsufficient
from .inversion import (
    InversionParams,
    extrapolated_grid,
    invert_grid,
    kernel_density_grid,
)
from .manifest import write_manifest
from .moments import (
    MomentGrid,
    MomentVector,
    SampleSet,
    empirical_moments,
    polynomial_moments,
    region_moments,
)
from .policy import parse_policy
from .regions import HalfDisc, ParabolicLens, Polygon, QuarterDisc, UnionRegion

_SHAPE_TOKENS = ("poly", "polygon", "quarter-disc", "half-disc", "g3", "union")


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def _parse_vertices(text: str) -> tuple:
    pairs = []
    for chunk in text.replace(";", " ").split():
        x, y = chunk.split(",")
        pairs.append((Fraction(x), Fraction(y)))
    return tuple(pairs)


def _parse_coeffs(text: str) -> dict:
    """"p,q:value;p,q:value" -> {(p, q): Fraction(value)}."""
    out = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, val = chunk.split(":")
        p, q = key.split(",")
        out[(int(p), int(q))] = Fraction(val.strip())
    return out


def _build_shape(args):
    """Returns ("region", region) or ("poly", coeffs dict)."""
    token = args.shape
    if token == "poly":
        if not args.coeffs:
            raise MomentRecoveryError("--shape poly needs --coeffs 'p,q:value;...'")
        return "poly", _parse_coeffs(args.coeffs)
    if token == "polygon":
        if not args.vertices:
            raise MomentRecoveryError(
                "--shape polygon needs --vertices 'x,y x,y x,y ...'"
            )
        return "region", Polygon(_parse_vertices(args.vertices))
    if token == "quarter-disc":
        radius = _parse_fraction(args.radius) if args.radius else Fraction(1)
        return "region", QuarterDisc(radius)
    if token == "half-disc":
        if args.center is None or args.radius is None:
            raise MomentRecoveryError("--shape half-disc needs --center and --radius")
        return "region", HalfDisc(_parse_fraction(args.center), _parse_fraction(args.radius))
    if token == "g3":
        return "region", ParabolicLens()
    if token == "union":
        if not args.members:
            raise MomentRecoveryError(
                "--shape union needs --members JSON, e.g. "
                '\'[{"shape": "polygon", "vertices": "0,0 1/2,0 1/2,1/2"}]\''
            )
        members = []
        for spec in json.loads(args.members):
            ns = argparse.Namespace(
                shape=spec.get("shape"),
                vertices=spec.get("vertices"),
                coeffs=None,
                center=spec.get("center"),
                radius=spec.get("radius"),
                members=None,
            )
            kind, member = _build_shape(ns)
            if kind != "region":
                raise MomentRecoveryError("union members must be regions")
            members.append(member)
        return "region", UnionRegion(tuple(members))
    raise MomentRecoveryError(f"unknown shape {token!r}; choose from {_SHAPE_TOKENS}")


def _shape_moments(args, alpha: int, alpha_prime: int, policy):
    if args.samples:
        samples = SampleSet.load(args.samples)
        return empirical_moments(samples, alpha, alpha_prime, policy or parse_policy("double"))
    kind, shape = _build_shape(args)
    if kind == "poly":
        return polynomial_moments(shape, alpha, alpha_prime, policy or parse_policy("exact"))
    return region_moments(shape, alpha, alpha_prime, policy)


def _add_common(p: argparse.ArgumentParser, shape: bool = True) -> None:
    p.add_argument("--policy", type=parse_policy, default=None,
                   help="exact-rational | big-float(BITS) | machine-double")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: MOMENTREC_THREADS or 1)")
    p.add_argument("--no-plot", action="store_true",
                   help="skip figure rendering next to the delimited output")
    p.add_argument("--out", required=True, help="primary output path")
    if shape:
        p.add_argument("--shape", choices=_SHAPE_TOKENS, default=None)
        p.add_argument("--vertices", help="polygon vertices 'x,y x,y ...' (rationals ok)")
        p.add_argument("--coeffs", help="polynomial coefficients 'p,q:value;...'")
        p.add_argument("--center", help="half-disc center on the bottom edge")
        p.add_argument("--radius", help="disc radius")
        p.add_argument("--members", help="union members as a JSON list")
        p.add_argument("--samples", help="CSV of x,y samples")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("MOMENTREC_THREADS", "")
    return max(1, int(env)) if env.isdigit() and env else 1


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    parser = argparse.ArgumentParser(
        prog="momentrec",
        description="Recover functions, images, and distributions from "
        "finite geometric moment sequences.",
    )
    parser.add_argument("--version", action="version", version=f"momentrec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="compute a moment rectangle")
    _add_common(p)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--alpha-prime", type=int, default=None)

    p = sub.add_parser("recover", help="recover a field on a grid")
    _add_common(p)
    p.add_argument("--moments", help="previously saved moment CSV")
    p.add_argument("--alpha", type=int, default=None)
    p.add_argument("--alpha-prime", type=int, default=None)
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--sampling", choices=("endpoint", "center"), default="endpoint")
    p.add_argument("--extrapolate", default=None,
                   help="order-extrapolation scale in (0,1), e.g. 1/2")

    p = sub.add_parser("image", help="recover a region as a binary mask")
    _add_common(p)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--alpha-prime", type=int, default=None)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--threshold", default="1/2", help="level-set threshold")

    p = sub.add_parser("discrete", help="recover a distribution from 1-D moments")
    _add_common(p, shape=False)
    p.add_argument("--moments", required=True, help="1-D moment CSV")
    p.add_argument("--alpha", type=int, default=None)
    p.add_argument("--support", default=None,
                   help="known atoms 'u1,u2,...' for weight recovery")

    p = sub.add_parser("simulate", help="replicated sampling study")
    _add_common(p, shape=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=2026)
    p.add_argument("--alphas", default="10,15,25", help="comma-separated orders")
    p.add_argument("--density", default="quadratic",
                   help="benchmark density to sample")

    p = sub.add_parser("tables", help="reproduce the pinned error tables")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--only", action="append", type=int, choices=(1, 2, 3),
                   help="run a subset (repeatable)")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=2026)
    p.add_argument("--skip-simulation", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    return parser


def _cmd_moments(args, argv) -> int:
    alpha_prime = args.alpha_prime if args.alpha_prime is not None else args.alpha
    t0 = time.monotonic()
    m = _shape_moments(args, args.alpha, alpha_prime, args.policy)
    m.save(args.out)
    outputs = [args.out]
    if not args.no_plot:
        from .plots import plot_moment_grid

        outputs.append(plot_moment_grid(m, Path(args.out).with_suffix(".png")))
    write_manifest(
        args.out, "moments", argv,
        inputs=[args.samples] if args.samples else [],
        outputs=outputs, policy=m.policy.spell(),
        wall_seconds=time.monotonic() - t0,
    )
    print(f"wrote {args.out} (order ({args.alpha}, {alpha_prime}), {m.policy.spell()})")
    return 0


def _cmd_recover(args, argv) -> int:
    t0 = time.monotonic()
    threads = _threads(args)
    inputs = []
    if args.samples and not args.moments:
        samples = SampleSet.load(args.samples)
        inputs.append(args.samples)
        if args.alpha is None:
            raise MomentRecoveryError("--alpha is required with --samples")
        alpha_prime = args.alpha_prime if args.alpha_prime is not None else args.alpha
        params = InversionParams(args.alpha, alpha_prime, parse_policy("double"))
        field = kernel_density_grid(samples, params, args.resolution, args.sampling)
    else:
        if args.moments:
            m = MomentGrid.load(args.moments)
            inputs.append(args.moments)
        elif args.shape:
            hi = args.alpha if args.alpha is not None else 0
            hi_p = args.alpha_prime if args.alpha_prime is not None else hi
            if args.extrapolate:
                scale = Fraction(args.extrapolate)
                hi = int(Fraction(hi) / scale)
                hi_p = int(Fraction(hi_p) / scale)
            m = _shape_moments(args, hi, hi_p, args.policy)
        else:
            raise MomentRecoveryError("recover needs --moments, --shape, or --samples")
        alpha = args.alpha if args.alpha is not None else m.alpha
        alpha_prime = args.alpha_prime if args.alpha_prime is not None else alpha
        if args.extrapolate:
            field = extrapolated_grid(
                m, alpha, Fraction(args.extrapolate), args.resolution,
                args.sampling, alpha_prime, args.policy, threads,
            )
        else:
            params = InversionParams.create(alpha, alpha_prime, args.policy)
            field = invert_grid(m, params, args.resolution, args.sampling, threads)
    field.save(args.out)
    outputs = [args.out]
    if not args.no_plot:
        from .imaging import render_pgm
        from .plots import plot_field

        outputs.append(plot_field(field, Path(args.out).with_suffix(".png")))
        pgm = Path(args.out).with_suffix(".pgm")
        render_pgm(field, pgm)
        outputs.append(str(pgm))
    write_manifest(
        args.out, "recover", argv, inputs=inputs, outputs=outputs,
        policy=field.params.policy.spell(), wall_seconds=time.monotonic() - t0,
    )
    print(
        f"wrote {args.out} (order ({field.params.alpha}, {field.params.alpha_prime}), "
        f"{field.resolution[0]}x{field.resolution[1]} {field.sampling}, "
        f"{field.params.policy.spell()})"
    )
    return 0


def _cmd_image(args, argv) -> int:
    from .imaging import recover_region_mask, render_pgm, symmetric_difference

    t0 = time.monotonic()
    kind, region = _build_shape(args)
    if kind != "region":
        raise MomentRecoveryError("image needs a region shape, not a density")
    alpha_prime = args.alpha_prime if args.alpha_prime is not None else args.alpha
    threshold_f = Fraction(args.threshold)
    mask, field = recover_region_mask(
        region, args.alpha, alpha_prime, args.resolution,
        float(threshold_f), args.policy, _threads(args),
    )
    mask.save(args.out)
    outputs = [args.out]
    sym = symmetric_difference(mask, region)
    if not args.no_plot:
        from .plots import plot_mask

        outputs.append(plot_mask(mask, Path(args.out).with_suffix(".png"), region=region))
        pgm = Path(args.out).with_suffix(".pgm")
        render_pgm(mask, pgm)
        outputs.append(str(pgm))
    write_manifest(
        args.out, "image", argv, inputs=[], outputs=outputs,
        policy=field.params.policy.spell(), wall_seconds=time.monotonic() - t0,
    )
    print(
        f"wrote {args.out} (order ({args.alpha}, {alpha_prime}), "
        f"measure {mask.measure():.5f}, symmetric difference {sym:.5f})"
    )
    return 0


def _cmd_discrete(args, argv) -> int:
    import csv as _csv

    from .discrete import pmf_recover, recover_cdf_1d
    from .policy import format_value

    t0 = time.monotonic()
    m = MomentVector.load(args.moments)
    alpha = args.alpha if args.alpha is not None else m.alpha
    policy = args.policy if args.policy is not None else m.policy
    outputs = [args.out]
    if args.support:
        support = tuple(Fraction(u) for u in args.support.split(","))
        probs = pmf_recover(m, support, alpha, policy)
        with open(args.out, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["support", "weight"])
            for u, pr in zip(support, probs):
                writer.writerow([u, format_value(pr, policy)])
        what = f"weights on {len(support)} atoms"
    else:
        cdf = recover_cdf_1d(m, alpha, policy)
        with open(args.out, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["cell", "x_low", "value"])
            for kappa, v in enumerate(cdf.cell_values):
                writer.writerow([kappa, Fraction(kappa, alpha) if alpha else 0,
                                 format_value(v, policy)])
        what = "distribution function cells"
    if not args.no_plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        from .policy import to_float

        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        if args.support:
            ax.stem([float(u) for u in support], [to_float(p) for p in probs])
            ax.set_ylabel("weight")
        else:
            xs = [k / alpha for k in range(alpha + 1)]
            ax.step(xs, [to_float(v) for v in cdf.cell_values], where="post")
            ax.set_ylabel("recovered distribution function")
        ax.set_xlabel("x")
        png = Path(args.out).with_suffix(".png")
        fig.savefig(png, dpi=200, bbox_inches="tight")
        plt.close(fig)
        outputs.append(str(png))
    write_manifest(
        args.out, "discrete", argv, inputs=[args.moments], outputs=outputs,
        policy=policy.spell(), wall_seconds=time.monotonic() - t0,
    )
    print(f"wrote {args.out} ({what}, order {alpha}, {policy.spell()})")
    return 0


def _cmd_simulate(args, argv) -> int:
    from .plots import plot_sim_errorbars
    from .sim import SimConfig, simulated_sup_error, write_sim_csv

    t0 = time.monotonic()
    alphas = tuple(int(a) for a in args.alphas.split(","))
    config = SimConfig(args.n, args.reps, args.seed, alphas, args.density)
    report = simulated_sup_error(config)
    write_sim_csv(report, args.out)
    outputs = [args.out]
    if not args.no_plot:
        outputs.append(plot_sim_errorbars(report, Path(args.out).with_suffix(".png")))
    write_manifest(
        args.out, "simulate", argv, inputs=[], outputs=outputs,
        policy="machine-double", seed=args.seed,
        wall_seconds=time.monotonic() - t0,
    )
    for alpha, mean, se in zip(alphas, report.means, report.stderrs):
        print(f"order {alpha}: mean sup error {mean:.4f} (stderr {se:.4f})")
    return 0


def _cmd_tables(args, argv) -> int:
    from .tables import run_table1, run_table2, run_table3

    t0 = time.monotonic()
    only = set(args.only) if args.only else {1, 2, 3}
    threads = args.threads if args.threads is not None else 1
    results = []
    if 1 in only:
        results.append(
            run_table1(args.out, args.reps, args.seed, args.skip_simulation, threads)
        )
    if 2 in only:
        results.append(run_table2(args.out, threads))
    if 3 in only:
        results.append(run_table3(args.out, threads))
    outputs = []
    for r in results:
        outputs.append(r.csv_path)
        outputs.extend(r.plot_paths)
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name}: {status}")
        for line in r.failures:
            print(f"  {line}")
    write_manifest(
        str(Path(args.out) / "tables"), "tables", argv, inputs=[], outputs=outputs,
        seed=args.seed, wall_seconds=time.monotonic() - t0,
    )
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "moments": _cmd_moments,
        "recover": _cmd_recover,
        "image": _cmd_image,
        "discrete": _cmd_discrete,
        "simulate": _cmd_simulate,
        "tables": _cmd_tables,
    }
    try:
        return handlers[args.command](args, argv)
    except PrecisionInsufficient as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(
            "hint: rerun with --policy exact-rational, or raise the "
            "big-float bits, e.g. --policy 'big-float(512)'",
            file=sys.stderr,
        )
        return 3
    except (MomentRecoveryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
