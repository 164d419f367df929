"""``ctvrpca`` command line: synth, decompose, phase, mu, metrics.

All numerics live in the library; this module only wires files to calls.
Failures exit nonzero with a one-line JSON error object on stderr.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path


from . import __version__, config, io
from .analysis import metric_ergas, metric_psnr, metric_rel_err, report_mu, run_phase_transition
from .errors import ConfigError, CTVError, FormatError, NumericalError
from .solvers import SOLVERS
from .synth import generate

log = logging.getLogger("ctvrpca")

EXIT_CODES = {ConfigError: 2, FormatError: 3, NumericalError: 4}


def _outdir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_synth(args):
    doc = config.load(args.config)
    spec = config.synthetic_spec(doc, seed=args.seed)
    inst = generate(spec)
    out = _outdir(args.out)
    io.write_tensor(out / "M.ctv", inst.M)
    io.write_tensor(out / "X0.ctv", inst.X0)
    io.write_tensor(out / "S0.ctv", inst.S0)
    io.write_json(out / "instance.json", {
        "schema_version": 1,
        "dims": list(spec.dims),
        "spec": spec.to_dict(),
        "support": inst.support,
        "true_rank_upper": inst.true_rank_upper,
    })


def cmd_decompose(args):
    doc = config.load(args.config)
    cfg = config.solver_config(doc, lam=args.lam, seed=args.seed, max_iters=args.max_iters)
    m = io.read_unfolded(args.input)
    res = SOLVERS[args.solver](m, cfg)
    out = _outdir(args.out)
    io.write_tensor(out / "X.ctv", res.X)
    io.write_tensor(out / "S.ctv", res.S)
    io.write_diagnostics_csv(out / "diagnostics.csv", res.diagnostics)
    last = res.diagnostics[-1]
    io.write_json(out / "summary.json", {
        "diagnostics_schema_version": io.DIAGNOSTICS_SCHEMA_VERSION,
        "solver": args.solver,
        "dims": list(m.dims),
        "lambda": res.lam,
        "iterations": res.iters_used,
        "converged": res.converged,
        "objective": res.objective,
        "final": {c: getattr(last, c) for c in io.DIAGNOSTICS_COLUMNS},
        "config": cfg.to_dict(),
    })


def cmd_phase(args):
    doc = config.load(args.config)
    cfg = config.solver_config(doc, max_iters=args.max_iters)
    ph = config.phase_settings(doc, seed=args.seed)
    base = config.synthetic_spec(doc)
    threads = args.threads if args.threads else (os.cpu_count() or 1)

    def progress(n, total):
        log.info("trial %d/%d", n, total)

    grid = run_phase_transition(
        ph["rho_s"], ph["rank_ratio"], trials=ph["trials"], solvers=ph["solvers"],
        cfg=cfg, seed=ph["seed"], threshold=ph["threshold"], base_spec=base,
        threads=threads, progress=progress,
    )
    out = _outdir(args.out)
    io.write_grid_csv(out / "grid.csv", grid)
    summary = grid.summary()
    summary["grid_schema_version"] = io.GRID_SCHEMA_VERSION
    summary["config"] = cfg.to_dict()
    summary["failures"] = sum(1 for r in grid.records if r.error)
    io.write_json(out / "summary.json", summary)


def cmd_mu(args):
    doc = config.load(args.config)
    if args.input:
        x = io.read_unfolded(args.input)
        rep = report_mu(x, args.r)
    else:
        rep = report_mu(generate(config.synthetic_spec(doc, seed=args.seed)), args.r)
    io.write_json(args.out, rep.to_dict())


def cmd_metrics(args):
    x_hat = io.read_tensor(args.x_hat)
    x0 = io.read_tensor(args.x0)
    io.write_json(args.out, {
        "rel_err": metric_rel_err(x_hat, x0),
        "psnr": metric_psnr(x_hat, x0, peak=args.peak),
        "ergas": metric_ergas(x_hat, x0, ratio=args.ratio),
    })


def build_parser():
    p = argparse.ArgumentParser(prog="ctvrpca", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a synthetic instance")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("decompose", help="run a solver on a tensor file")
    s.add_argument("input")
    s.add_argument("--config")
    s.add_argument("--solver", choices=sorted(SOLVERS), default="3dctv")
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("phase", help="phase-transition sweep")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    s.add_argument("--max-iters", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_phase)

    s = sub.add_parser("mu", help="incoherence report")
    s.add_argument("input", nargs="?", help="tensor file; omit to use the synthetic config")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--out", required=True, help="output JSON file")
    s.set_defaults(func=cmd_mu)

    s = sub.add_parser("metrics", help="rel_err / PSNR / ERGAS between two tensors")
    s.add_argument("x_hat")
    s.add_argument("x0")
    s.add_argument("--peak", type=float, default=1.0)
    s.add_argument("--ratio", type=float, default=1.0)
    s.add_argument("--out", required=True, help="output JSON file")
    s.set_defaults(func=cmd_metrics)
    return p


def _fail(exc, code):
    sys.stderr.write(json.dumps({"error": getattr(exc, "kind", "error"), "message": str(exc)}) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except CTVError as exc:
        return _fail(exc, next((c for t, c in EXIT_CODES.items() if isinstance(exc, t)), 1))
    except OSError as exc:
        exc.kind = "io_error"
        return _fail(exc, 5)
    return 0


if __name__ == "__main__":
    sys.exit(main())
