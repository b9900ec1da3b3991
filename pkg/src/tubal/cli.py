"""The ``tubal`` command-line tool.

Subcommands cover the full experiment pipeline: building transform matrices,
generating low-transform-rank tensors, sampling masks, running the
completion solver, sweeping phase grids, and scoring results. All numeric
output uses 17 significant digits so 64-bit values survive a round trip
through text, and every run is a pure function of its arguments and input
files.

Set ``TUBAL_NUM_THREADS`` to pin the BLAS thread pool; it is applied to the
usual vendor variables before numpy first loads.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

from .errors import DomainError, TubalError

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
)


def _configure_threads():
    value = os.environ.get("TUBAL_NUM_THREADS", "").strip()
    if not value:
        return
    try:
        count = int(value)
    except ValueError:
        print(f"warning: ignoring non-integer TUBAL_NUM_THREADS={value!r}",
              file=sys.stderr)
        return
    if count < 1:
        print(f"warning: ignoring non-positive TUBAL_NUM_THREADS={count}",
              file=sys.stderr)
        return
    for var in _THREAD_VARS:
        os.environ.setdefault(var, str(count))


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _parse_dims(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise DomainError(f"dims must be n1,n2,n3 got {text!r}")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise DomainError(f"dims must be integers, got {text!r}") from None
    if any(d < 1 for d in dims):
        raise DomainError(f"dims must be positive, got {dims}")
    return dims


def _parse_range(text, integer=False):
    """MATLAB-style ranges: start:step:stop (inclusive), start:stop, or
    plain values, comma separated."""
    vals = []
    for token in text.split(","):
        parts = token.split(":")
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise DomainError(f"cannot parse range token {token!r}") from None
        if len(parts) == 1:
            vals.append(nums[0])
        elif len(parts) in (2, 3):
            start = nums[0]
            stop = nums[-1]
            step = nums[1] if len(parts) == 3 else 1.0
            if step == 0:
                raise DomainError(f"zero step in range {token!r}")
            span = (stop - start) / step
            count = int(math.floor(span + 1e-9)) + 1
            vals.extend(start + i * step for i in range(max(count, 0)))
        else:
            raise DomainError(f"cannot parse range token {token!r}")
    if integer:
        out = []
        for v in vals:
            if abs(v - round(v)) > 1e-9:
                raise DomainError(f"expected integer range values, got {v}")
            out.append(int(round(v)))
        return out
    return vals


def _load_transform(path):
    from .io import read_matrix
    from .transforms import LinearTransform

    return LinearTransform.from_matrix(read_matrix(path),
                                       name=os.path.basename(str(path)))


def _print_transform_diagnostics(t):
    print(f"kappa={_fmt(t.kappa)}")
    print(f"rho={_fmt(t.rho)}")
    print(f"one_to_two={_fmt(t.one_to_two)}")


def _cmd_transform_build(args):
    from . import transforms
    from .io import write_matrix

    kind = args.kind
    if kind in ("dft", "dct", "dwht"):
        if args.N3 is not None and args.N3 != args.n3:
            t = transforms.slim_columns(kind, args.N3, args.n3)
        elif kind == "dft":
            t = transforms.dft_transform(args.n3)
        elif kind == "dct":
            t = transforms.dct_transform(args.n3)
        else:
            t = transforms.dwht_transform(args.n3)
    elif kind == "rut":
        t = transforms.random_unitary(args.n3, big_n3=args.N3, seed=args.seed)
    elif kind == "cond":
        t = transforms.random_conditioned(args.n3, seed=args.seed,
                                          smin=args.smin, smax=args.smax,
                                          big_n3=args.N3)
    else:
        raise DomainError(f"unknown transform kind {kind!r}")
    write_matrix(args.out, t.matrix)
    _print_transform_diagnostics(t)
    return 0


def _cmd_transform_concat(args):
    from .io import read_matrix, write_matrix
    from .transforms import concat_transforms

    t = concat_transforms(read_matrix(args.a), read_matrix(args.b))
    write_matrix(args.out, t.matrix)
    _print_transform_diagnostics(t)
    return 0


def _cmd_gen(args):
    from .generators import GeneratorConfig, gen_double, gen_single
    from .io import write_tensor

    if (args.transform2 is None) != (args.rank2 is None):
        raise DomainError("--transform2 and --rank2 must be given together")
    dims = _parse_dims(args.dims)
    cfg = GeneratorConfig(seed=args.seed, rank_tol=args.rank_tol,
                          max_iters=args.max_iters)
    t1 = _load_transform(args.transform)
    if args.transform2 is None:
        m = gen_single(t1, dims, args.rank, cfg, real=args.real)
    else:
        t2 = _load_transform(args.transform2)
        m = gen_double(t1, args.rank, t2, args.rank2, dims, cfg,
                       real=args.real)
    write_tensor(args.out, m)
    return 0


def _cmd_mask(args):
    from .generators import bernoulli_mask
    from .io import write_mask

    mask = bernoulli_mask(_parse_dims(args.dims), args.p, seed=args.seed)
    write_mask(args.out, mask)
    print(f"observed={mask.count}")
    print(f"rate={_fmt(mask.rate)}")
    return 0


def _cmd_complete(args):
    from .io import read_mask, read_tensor, write_tensor
    from .solver import SolverConfig, admm_complete, mask_project

    observed = read_tensor(args.input)
    mask = read_mask(args.mask)
    transform = _load_transform(args.transform)
    cfg = SolverConfig(alpha0=args.alpha0, alpha_max=args.alpha_max,
                       rho_growth=args.rho, tol=args.tol,
                       max_iters=args.max_iters)
    x, report = admm_complete(mask_project(observed, mask), mask, transform, cfg)
    write_tensor(args.out, x)
    print(f"converged={'true' if report.converged else 'false'}")
    print(f"iterations={report.iterations}")
    print(f"final_residual={_fmt(report.final_residual)}")
    print(f"objective={_fmt(report.objective)}")
    if args.report:
        with open(args.report, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iterations", "final_residual", "objective",
                             "converged"])
            writer.writerow([report.iterations, _fmt(report.final_residual),
                             _fmt(report.objective),
                             "true" if report.converged else "false"])
    return 0


def _write_phase_csv(cells, double, stream):
    writer = csv.writer(stream, lineterminator="\n")
    if double:
        writer.writerow(["r", "r2", "p", "trials", "successes"])
        for c in cells:
            writer.writerow([c.r, c.r2, _fmt(c.p), c.trials, c.successes])
    else:
        writer.writerow(["r", "p", "trials", "successes"])
        for c in cells:
            writer.writerow([c.r, _fmt(c.p), c.trials, c.successes])


def _cmd_phase(args):
    from .analysis import phase_experiment
    from .generators import GeneratorConfig

    if (args.transform2 is None) != (args.ranks2 is None):
        raise DomainError("--transform2 and --ranks2 must be given together")
    dims = _parse_dims(args.dims)
    ranks = _parse_range(args.ranks, integer=True)
    rates = _parse_range(args.rates)
    t1 = _load_transform(args.transform)
    cfg = GeneratorConfig(rank_tol=args.rank_tol, max_iters=args.max_iters)
    double = args.transform2 is not None
    if double:
        ranks2 = _parse_range(args.ranks2, integer=True)
        if len(ranks2) != len(ranks):
            raise DomainError(
                f"--ranks2 has {len(ranks2)} entries, --ranks has {len(ranks)}")
        spec = (t1, _load_transform(args.transform2))
        rank_list = list(zip(ranks, ranks2))
    else:
        spec = t1
        rank_list = ranks
    cells = phase_experiment(dims, spec, rank_list, rates, trials=args.trials,
                             seed=args.seed, cfg=cfg)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            _write_phase_csv(cells, double, fh)
    else:
        _write_phase_csv(cells, double, sys.stdout)
    return 0


def _cmd_analyze(args):
    from .analysis import incoherence, sampling_bound
    from .io import read_tensor
    from .tensor import tubal_rank

    tensor = read_tensor(args.input)
    transform = _load_transform(args.transform)
    tx = transform.apply(tensor)
    rank = tubal_rank(tx)
    print(f"rank={rank}")
    if rank == 0:
        raise DomainError("transformed tensor is zero; incoherence undefined")
    rep = incoherence(tx, rank, transform)
    bound = sampling_bound(transform, rep.lam, rank, tensor.dims[0],
                           tensor.dims[1], c0=args.c0)
    print(f"mu={_fmt(rep.mu)}")
    print(f"nu={_fmt(rep.nu)}")
    print(f"lam={_fmt(rep.lam)}")
    print(f"kappa={_fmt(transform.kappa)}")
    print(f"rho={_fmt(transform.rho)}")
    print(f"sampling_bound={_fmt(bound)}")
    return 0


def _cmd_metrics(args):
    from .analysis import metrics_report
    from .io import read_tensor

    rep = metrics_report(read_tensor(args.ref), read_tensor(args.test),
                         peak=args.peak)
    print(f"psnr={_fmt(rep.psnr)}")
    print(f"ssim={_fmt(rep.ssim)}")
    print(f"mpsnr={_fmt(rep.mpsnr)}")
    print(f"mssim={_fmt(rep.mssim)}")
    print(f"rel_error={_fmt(rep.rel_error)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubal",
        description="Exact tensor completion under third-mode linear transforms.")
    sub = parser.add_subparsers(dest="command", required=True)

    ptrans = sub.add_parser("transform", help="build or concatenate transforms")
    tsub = ptrans.add_subparsers(dest="subcommand", required=True)

    pbuild = tsub.add_parser("build", help="emit a transform matrix file")
    pbuild.add_argument("--kind", required=True,
                        choices=["dft", "dct", "dwht", "rut", "cond"])
    pbuild.add_argument("--n3", type=int, required=True)
    pbuild.add_argument("--N3", type=int, default=None,
                        help="output rows; > n3 keeps the first n3 columns "
                             "of the N3-point base")
    pbuild.add_argument("--seed", type=int, default=0)
    pbuild.add_argument("--smin", type=float, default=0.5)
    pbuild.add_argument("--smax", type=float, default=2.0)
    pbuild.add_argument("--out", required=True)
    pbuild.set_defaults(func=_cmd_transform_build)

    pconcat = tsub.add_parser("concat", help="vertical stack of two matrices")
    pconcat.add_argument("--a", required=True)
    pconcat.add_argument("--b", required=True)
    pconcat.add_argument("--out", required=True)
    pconcat.set_defaults(func=_cmd_transform_concat)

    pgen = sub.add_parser("gen", help="generate a low-transform-rank tensor")
    pgen.add_argument("--dims", required=True)
    pgen.add_argument("--transform", required=True)
    pgen.add_argument("--rank", type=int, required=True)
    pgen.add_argument("--transform2", default=None)
    pgen.add_argument("--rank2", type=int, default=None)
    pgen.add_argument("--seed", type=int, default=0)
    pgen.add_argument("--rank-tol", type=float, default=1e-8)
    pgen.add_argument("--max-iters", type=int, default=500)
    pgen.add_argument("--real", action="store_true",
                      help="start from a real tensor")
    pgen.add_argument("--out", required=True)
    pgen.set_defaults(func=_cmd_gen)

    pmask = sub.add_parser("mask", help="draw a Bernoulli sampling mask")
    pmask.add_argument("--dims", required=True)
    pmask.add_argument("--p", type=float, required=True)
    pmask.add_argument("--seed", type=int, default=0)
    pmask.add_argument("--out", required=True)
    pmask.set_defaults(func=_cmd_mask)

    pcomp = sub.add_parser("complete", help="run the completion solver")
    pcomp.add_argument("--input", required=True)
    pcomp.add_argument("--mask", required=True)
    pcomp.add_argument("--transform", required=True)
    pcomp.add_argument("--alpha0", type=float, default=1e-2)
    pcomp.add_argument("--alpha-max", type=float, default=1e6)
    pcomp.add_argument("--rho", type=float, default=1.02)
    pcomp.add_argument("--tol", type=float, default=1e-10)
    pcomp.add_argument("--max-iters", type=int, default=3000)
    pcomp.add_argument("--out", required=True)
    pcomp.add_argument("--report", default=None)
    pcomp.set_defaults(func=_cmd_complete)

    pphase = sub.add_parser("phase", help="success-count grid over (r, p)")
    pphase.add_argument("--dims", required=True)
    pphase.add_argument("--transform", required=True)
    pphase.add_argument("--ranks", required=True,
                        help="MATLAB-style range, e.g. 2:2:50")
    pphase.add_argument("--rates", required=True,
                        help="MATLAB-style range, e.g. 0.05:0.05:0.95")
    pphase.add_argument("--transform2", default=None)
    pphase.add_argument("--ranks2", default=None)
    pphase.add_argument("--trials", type=int, default=10)
    pphase.add_argument("--seed", type=int, default=0)
    pphase.add_argument("--rank-tol", type=float, default=1e-8)
    pphase.add_argument("--max-iters", type=int, default=500)
    pphase.add_argument("--out", default=None)
    pphase.set_defaults(func=_cmd_phase)

    panalyze = sub.add_parser("analyze", help="incoherence and sampling bound")
    panalyze.add_argument("--input", required=True)
    panalyze.add_argument("--transform", required=True)
    panalyze.add_argument("--c0", type=float, default=1.0)
    panalyze.set_defaults(func=_cmd_analyze)

    pmetrics = sub.add_parser("metrics", help="score a recovery")
    pmetrics.add_argument("--ref", required=True)
    pmetrics.add_argument("--test", required=True)
    pmetrics.add_argument("--peak", type=float, default=1.0)
    pmetrics.set_defaults(func=_cmd_metrics)

    return parser


def main(argv=None) -> int:
    _configure_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TubalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry():
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
