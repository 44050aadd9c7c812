"""Command-line interface."""

import argparse
import logging
import os
import os.path as op
import sys

import numpy as np

from . import __version__
from .config import describe_defaults, load_config
from .crossings import classify_crossing
from .datasets import reference_params
from .io import RunManifest, dump_states, write_grid_csv, write_jsonl
from .loops import RING_ORDER, LoopSpec, classify_loop_family, run_loop
from .search import COORDINATES, find_ep, scan_gap_plane, seed_robustness, trace_ep_curve
from .selftest import run_selftest
from .solvers import NonlinearSolver, ResonanceSolver
from .utils import parse_range

LOGGER = logging.getLogger(__name__)

THREADS_ENV = "PYWSEP_THREADS"

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

# flags whose values may start with a minus sign but are not plain numbers
SPAN_FLAGS = ("--range-invF", "--range-delta", "--range-phi", "--guess", "--start", "--center")


def _range_arg(text):
    try:
        return parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _triple_arg(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"'{text}' must be three comma-separated numbers.")
    try:
        triple = np.array([float(p) for p in parts])
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' must be three comma-separated numbers.")
    if not triple[0] > 0:
        raise argparse.ArgumentTypeError(f"1/F must be > 0 in '{text}'.")
    return triple


def _fixed_arg(text):
    name, sep, value = text.partition("=")
    if not sep or name not in COORDINATES:
        raise argparse.ArgumentTypeError(
            f"'{text}' must have the form name=value with name in {COORDINATES}."
        )
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' has a non-numeric value.")


def _attach_values(argv):
    """Join span flags to values such as '-3.14:3.14:200' so they are not read as options."""
    out = []
    tokens = iter(argv)
    for token in tokens:
        value = next(tokens, None) if token in SPAN_FLAGS else None
        if value is not None and value.startswith("-"):
            out.append(f"{token}={value}")
        else:
            out.extend(t for t in (token, value) if t is not None)
    return out


def _get_parser():
    parser = argparse.ArgumentParser(
        prog="pywsep",
        description="Wannier-Stark resonances and exceptional points of tilted bichromatic "
        "lattices.",
        epilog=describe_defaults(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", default=None, help="Configuration file (section.key = value).")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"Worker threads; the {THREADS_ENV} environment variable takes precedence.",
    )
    parser.add_argument("--output-dir", default=None, help="Directory for outputs.")
    parser.add_argument("--verbose", action="store_true", help="Log debugging messages.")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    def add(name, help):
        return subparsers.add_parser(
            name,
            help=help,
            description=help,
            epilog=describe_defaults(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )

    def add_lattice(sub):
        sub.add_argument("--invF", type=float, default=None, help="Inverse field strength 1/F.")
        sub.add_argument("--delta", type=float, default=None, help="Second-harmonic strength.")
        sub.add_argument("--phi", type=float, default=None, help="Second-harmonic phase.")

    sub = add("spectrum", "Compute the resonances of one configuration.")
    add_lattice(sub)
    sub.add_argument("--all", action="store_true", help="Write every physical state.")
    sub.add_argument("--n-keep", type=int, default=64, help="Physical states kept.")
    sub.add_argument("--dump-states", action="store_true", help="Write eigenvectors.")

    sub = add("scan", "Map the eigenvalue gap on a plane and report EP seeds.")
    sub.add_argument(
        "--fix", type=_fixed_arg, required=True, help="Frozen coordinate, e.g. delta=1."
    )
    sub.add_argument("--range-invF", type=_range_arg, default=None, help="start:stop:count")
    sub.add_argument("--range-delta", type=_range_arg, default=None, help="start:stop:count")
    sub.add_argument("--range-phi", type=_range_arg, default=None, help="start:stop:count")
    sub.add_argument("--certify", action="store_true", help="Run the simplex from each seed.")

    sub = add("find-ep", "Locate an exceptional point by simplex minimization.")
    sub.add_argument("--guess", type=_triple_arg, default=None, help="1/F,delta,phi")
    sub.add_argument(
        "--freeze", choices=COORDINATES, action="append", default=None, help="Frozen coordinate."
    )
    sub.add_argument(
        "--perturb",
        type=int,
        default=0,
        help="Rerun the search from this many random perturbations of the result "
        "(seeded by run.seed).",
    )

    sub = add("trace-ep", "Trace a curve of exceptional points.")
    sub.add_argument("--start", type=_triple_arg, default=None, help="1/F,delta,phi")
    sub.add_argument("--radius", type=float, default=None, help="Shell radius.")
    sub.add_argument("--max-points", type=int, default=200, help="Largest number of points.")
    sub.add_argument("--stop-at-fold", action="store_true", help="Stop at the first fold.")

    sub = add("loop", "Follow the tracked pair around a closed loop.")
    sub.add_argument("--center", type=_triple_arg, default=None, help="1/F,delta,phi")
    sub.add_argument("--radius", type=float, default=0.1, help="Loop radius.")
    sub.add_argument("--offset-invF", type=float, default=0.0, help="Loop centre shift in 1/F.")
    sub.add_argument("--offset-phi", type=float, default=0.0, help="Loop centre shift in phi.")
    sub.add_argument("--steps", type=int, default=128, help="Samples per cycle.")
    sub.add_argument("--cycles", type=int, default=2, help="Number of cycles.")
    sub.add_argument(
        "--family", type=float, default=None, help="Run the 3x3 family with this spacing."
    )

    sub = add("nonlinear", "Follow nonlinear resonances along an F scan.")
    add_lattice(sub)
    sub.add_argument("--g", type=float, required=True, help="Interaction strength.")
    sub.add_argument("--scan-F", type=_range_arg, required=True, help="start:stop:count")
    sub.add_argument("--dump-states", action="store_true", help="Write eigenvectors.")

    add("selftest", "Run the elementary consistency checks.")
    return parser


def _threads(args, config):
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    if args.threads is not None:
        return max(1, args.threads)
    return config.threads


def _lattice(args, config):
    p = config.lattice.replace(g=0.0)
    updates = {}
    if getattr(args, "invF", None) is not None:
        if not args.invF > 0:
            raise ValueError(f"--invF must be > 0, got {args.invF}.")
        updates["F"] = 1.0 / args.invF
    for name in ("delta", "phi"):
        if getattr(args, name, None) is not None:
            updates[name] = getattr(args, name)
    return p.replace(**updates)


def _point(triple, config, default="ep1"):
    if triple is None:
        triple = reference_params(default).triple()
    return config.lattice.replace(g=0.0).with_triple(triple)


def _out(run, name):
    return op.join(run.output_dir, name)


def _spectrum(args, run):
    p = _lattice(args, run.config)
    spectrum = run.solver(n_keep=args.n_keep).solve(p).summary()
    records = spectrum.to_records()
    states = list(spectrum)
    if not args.all:
        pair = spectrum.tracked_pair()
        keep = [i for i, r in enumerate(spectrum) if any(r is s for s in pair)]
        records = [records[i] for i in keep]
        states = [states[i] for i in keep]
    write_jsonl(_out(run, "spectrum.jsonl"), records, run.manifest)
    if args.dump_states:
        dump_states(_out(run, "spectrum_states.bin"), states, spectrum.grid, run.manifest)


def _scan(args, run):
    name, value = args.fix
    given = {"inv_F": args.range_invF, "delta": args.range_delta, "phi": args.range_phi}
    ranges = {axis: given[axis] for axis in COORDINATES if axis != name}
    missing = [axis for axis, value in ranges.items() if value is None]
    if missing:
        flags = {"inv_F": "--range-invF", "delta": "--range-delta", "phi": "--range-phi"}
        raise ValueError(f"scan needs {flags[missing[0]]} when fixing {name}.")

    tol = run.config.tolerances
    scan = scan_gap_plane(
        (name, value),
        ranges,
        template=run.config.lattice,
        solver=run.solver(),
        seed_threshold=tol.seed_threshold,
        certify_seeds=args.certify,
        **tol.search_kwargs(),
    )
    write_grid_csv(_out(run, "gap_scan.csv"), scan.to_df(), run.manifest)
    write_jsonl(_out(run, "seeds.jsonl"), scan.seeds, run.manifest)


def _find_ep(args, run):
    guess = _point(args.guess, run.config)
    tol = run.config.tolerances
    solver = run.solver()
    if args.perturb > 0:
        ep, df = seed_robustness(
            guess,
            n_starts=args.perturb,
            scale=tol.perturbation_radius,
            seed=run.config.seed,
            frozen=args.freeze,
            solver=solver,
            **tol.search_kwargs(),
        )
        write_grid_csv(_out(run, "ep_robustness.csv"), df, run.manifest)
    else:
        ep = find_ep(guess, frozen=args.freeze, solver=solver, **tol.search_kwargs())
    write_jsonl(_out(run, "ep.jsonl"), [ep.to_dict()], run.manifest)
    if not ep.certified:
        LOGGER.warning("The located minimum is not a certified exceptional point.")


def _trace_ep(args, run):
    tol = run.config.tolerances
    solver = run.solver()
    start = find_ep(_point(args.start, run.config), solver=solver, **tol.search_kwargs())
    if not start.certified:
        raise RuntimeError(f"Start point failed certification: {start.to_dict()}.")
    curve = trace_ep_curve(
        start,
        r=args.radius or tol.shell_radius,
        max_points=args.max_points,
        solver=solver,
        stop_at_fold=args.stop_at_fold,
        max_iter=tol.max_iter,
        **tol.certify_kwargs(),
    )
    records = [p.to_dict() for p in curve.points]
    records.append({"termination_reason": curve.termination_reason, "folds": curve.folds})
    write_jsonl(_out(run, "ep_curve.jsonl"), records, run.manifest)


def _loop(args, run):
    center = _point(args.center, run.config)
    kwargs = run.config.tolerances.loop_kwargs()
    solver = run.solver()
    if args.family is not None:
        specs = LoopSpec.family(center, args.radius, args.family, args.steps, args.cycles)
        ring = [specs[i] for i in RING_ORDER]
        report = classify_loop_family(ring, solver=solver, **kwargs)
        write_grid_csv(_out(run, "loop_family.csv"), report.to_df(), run.manifest)
        verdicts = [dict(t.verdict(), loop=RING_ORDER[i] + 1) for i, t in enumerate(report.traces)]
        write_jsonl(_out(run, "loop_verdict.jsonl"), verdicts, run.manifest)
        return

    spec = LoopSpec(
        center,
        args.radius,
        offsets=(args.offset_invF, args.offset_phi),
        steps=args.steps,
        cycles=args.cycles,
    )
    trace = run_loop(spec, solver=solver, **kwargs)
    write_grid_csv(_out(run, "loop.csv"), trace.to_df(), run.manifest)
    write_jsonl(_out(run, "loop_verdict.jsonl"), [trace.verdict()], run.manifest)


def _nonlinear(args, run):
    tol = run.config.tolerances
    p = _lattice(args, run.config).replace(g=args.g)
    start, stop, count = args.scan_F
    solver = NonlinearSolver(run.config.grid, **tol.nonlinear_kwargs(), **tol.linear_kwargs())
    scan = solver.scan(p, np.linspace(start, stop, count), tie_tol=tol.tie_tol)
    report = classify_crossing(
        scan.F,
        scan.mu1,
        scan.mu2,
        g=args.g,
        real_threshold=tol.crossing_threshold,
        imag_threshold=tol.crossing_threshold,
    )
    records = scan.to_records() + [{"crossing": report.to_dict()}]
    write_jsonl(_out(run, "nonlinear.jsonl"), records, run.manifest)
    if args.dump_states:
        states = [s for pair in scan.states for s in pair]
        dump_states(_out(run, "nonlinear_states.bin"), states, run.config.grid, run.manifest)


def _selftest(args, run):
    df = run_selftest()
    write_grid_csv(_out(run, "selftest.csv"), df, run.manifest)
    print(df.to_string(index=False))
    if not df["passed"].all():
        raise RuntimeError(f"{(~df['passed']).sum()} self-test checks failed.")


COMMANDS = {
    "spectrum": _spectrum,
    "scan": _scan,
    "find-ep": _find_ep,
    "trace-ep": _trace_ep,
    "loop": _loop,
    "nonlinear": _nonlinear,
    "selftest": _selftest,
}


class _Run:
    """State shared by one command invocation."""

    def __init__(self, args, config):
        self.config = config
        self.threads = _threads(args, config)
        self.output_dir = args.output_dir or config.output_dir
        arguments = {k: v for k, v in vars(args).items()}
        self.manifest = RunManifest(args.command, arguments, config.to_dict(), __version__)

    def solver(self, **kwargs):
        """Build a linear solver from the configuration."""
        tol = self.config.tolerances
        kwargs = dict(tol.linear_kwargs(), **kwargs)
        return ResonanceSolver(self.config.grid, n_jobs=self.threads, **kwargs)


def run_command(argv=None):
    """Run one command.

    Parameters
    ----------
    argv : None or :obj:`list` of :obj:`str`, optional
        Arguments without the program name. Default = ``sys.argv[1:]``.

    Returns
    -------
    :obj:`int`
        0 on success, 1 on a domain error, 2 on a usage error.
    """
    parser = _get_parser()
    try:
        args = parser.parse_args(_attach_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    logging.getLogger("pywsep").setLevel(logging.DEBUG if args.verbose else logging.INFO)

    run = None
    try:
        run = _Run(args, load_config(args.config))
        os.makedirs(run.output_dir, exist_ok=True)
        COMMANDS[args.command](args, run)
        code = EXIT_OK
    except (ValueError, RuntimeError, OSError) as exc:
        LOGGER.error("%s: %s", type(exc).__name__, exc)
        code = EXIT_DOMAIN

    if run is not None and op.isdir(run.output_dir):
        run.manifest.write(run.output_dir)
    return code


def main():
    """Entry point of the ``pywsep`` console script."""
    logging.basicConfig(format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    logging.captureWarnings(True)
    sys.exit(run_command())
