"""Command-line driver.

    surfthresh simulate --code toric --distance 3,5 --p 0.14,0.155 --trials 1000 --seed 42
    surfthresh count --code toric --distance 3 --k 1,2 --samples 1000 --seed 1
    surfthresh crossing --code toric --distance 5,7 --p 0.14,0.15,0.16 --trials 10000 --seed 3
    surfthresh dump-lattice --code surface --distance 3

Exit status: 0 on success, 1 on a usage or validation error, 2 when an
internal consistency check fails.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
import warnings

from . import experiments as ex
from .decoder import ConsistencyError
from .extraction import (
    ScheduleConflict,
    SyndromeRecord,
    collect_detection_events,
    dump_syndrome,
    run_circuit_round,
    run_ideal_round,
)
from .lattice import CodeKind, CodeSpec, build_lattice, dump_lattice
from .matching import NoPerfectMatching, build_graph, dump_graph, prune_edges
from .pauli_noise import ErrorModel, Extraction, PauliFrame, RngStream, apply_memory_error

COMMANDS = ("simulate", "count", "crossing", "dump-lattice", "dump-syndrome", "dump-graph")
SEED_ENV = "SURFTHRESH_REQUIRE_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(flag):
    def parse(text):
        try:
            vals = [int(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag}: expected comma-separated integers, got {text!r}")
        if not vals:
            raise argparse.ArgumentTypeError(f"{flag}: empty list")
        return vals

    return parse


def _float_list(flag):
    def parse(text):
        try:
            vals = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag}: expected comma-separated numbers, got {text!r}")
        if not vals:
            raise argparse.ArgumentTypeError(f"{flag}: empty list")
        return vals

    return parse


def _k_list(text):
    if text == "all":
        return None
    return _int_list("--k")(text)


def _common(p, rates=True, trials=False):
    p.add_argument("--code", choices=[k.value for k in CodeKind], default="toric")
    p.add_argument("--distance", type=_int_list("--distance"), required=True)
    if rates:
        p.add_argument("--p", dest="p", type=_float_list("--p"), required=True, help="physical error rates p0")
        p.add_argument("--extraction", choices=[e.value for e in Extraction], default="ideal")
        p.add_argument("--time-edge-weight", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None, help="output path (default: stdout)")
    if trials:
        p.add_argument("--trials", type=int, required=True)
        p.add_argument("--cap", type=int, default=ex.DEFAULT_MAX_ROUNDS, help="round cap per trial")
        p.add_argument("--track", choices=["any", "x"], default="any", help="failure classes that end a trial")
        p.add_argument("--workers", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="surfthresh", description="Toric and surface code threshold experiments.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    _common(sub.add_parser("simulate", help="mean time to failure sweep"), trials=True)

    c = sub.add_parser("count", help="k-error failure ratios (ideal extraction)")
    _common(c, rates=False)
    c.add_argument("--extraction", choices=["ideal"], default="ideal")
    c.add_argument("--k", type=_k_list, required=True, help="comma list of k, or 'all'")
    c.add_argument("--samples", type=int, required=True)
    c.add_argument("--workers", type=int, default=None)

    _common(sub.add_parser("crossing", help="sweep and report crossings of successive distances"), trials=True)

    _common(sub.add_parser("dump-lattice", help="stabilizer supports and logical chains"), rates=False)

    for name in ("dump-syndrome", "dump-graph"):
        d = sub.add_parser(name)
        _common(d)
        d.add_argument("--rounds", type=int, default=3)
        if name == "dump-graph":
            d.add_argument("--type", choices=["Z", "X"], default="Z")
            d.add_argument("--prune", action="store_true")
    return parser


def _normalize_argv(argv):
    # `--dump-lattice ...` is accepted as an alias of `dump-lattice ...`
    if argv and argv[0].startswith("--") and argv[0][2:] in COMMANDS:
        return [argv[0][2:], *argv[1:]]
    return argv


def _validate(args):
    for d in args.distance:
        if d < 3 or d % 2 == 0:
            raise UsageError(f"--distance: {d} is not an odd integer >= 3")
    if getattr(args, "p", None) is not None:
        for p in args.p:
            if not 0.0 <= p <= 1.0:
                raise UsageError(f"--p: {p} is outside [0, 1]")
    if getattr(args, "time_edge_weight", 1) < 1:
        raise UsageError("--time-edge-weight: must be a positive integer")
    if getattr(args, "trials", 1) < 1:
        raise UsageError("--trials: must be at least 1")
    if getattr(args, "cap", 1) < 1:
        raise UsageError("--cap: must be at least 1")
    if getattr(args, "samples", 1) < 1:
        raise UsageError("--samples: must be at least 1")
    if getattr(args, "rounds", 1) < 1:
        raise UsageError("--rounds: must be at least 1")
    w = getattr(args, "workers", None)
    if w is not None and w < 1:
        raise UsageError("--workers: must be at least 1")
    if args.command == "crossing" and len(args.distance) < 2:
        raise UsageError("--distance: crossing needs at least two distances")
    if args.seed is None and args.command not in ("dump-lattice",):
        if os.environ.get(SEED_ENV):
            raise UsageError(f"--seed: required when {SEED_ENV} is set")
        args.seed = int(time.time_ns() % (2**63))
        print(f"surfthresh: no --seed given, using {args.seed}", file=sys.stderr)


def _header(args) -> str:
    # Workers and output path do not affect results and are left out so
    # output bytes stay independent of them.
    skip = {"workers", "output", "command"}
    lines = [f"# surfthresh {args.command}"]
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(val, list):
            val = ",".join(repr(v) if isinstance(v, float) else str(v) for v in val)
        elif val is None:
            val = "all"
        lines.append(f"# --{key.replace('_', '-')}={val}")
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".surfthresh-", suffix=".tmp")
    except OSError as e:
        raise UsageError(f"--output: cannot write to {output}: {e.strerror}")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, output)
    except OSError as e:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise UsageError(f"--output: cannot write to {output}: {e.strerror}")


def _fmt(v: float) -> str:
    return repr(float(v))


def _sweep(args):
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        return ex.run_sweep(
            args.code, args.distance, args.p, args.trials, args.seed, args.extraction,
            args.time_edge_weight, args.cap, args.workers, args.track,
        )


def _cmd_simulate(args) -> str:
    res = _sweep(args)
    out = ["code,d,p0,trials,mean_ttf,stderr,censored"]
    for r in res.rows:
        out.append(f"{r.code},{r.d},{_fmt(r.p0)},{r.trials},{_fmt(r.mean_ttf)},{_fmt(r.stderr)},{r.censored}")
    return "\n".join(out) + "\n"


def _cmd_crossing(args) -> str:
    res = _sweep(args)
    ds = sorted(args.distance)
    out = ["code,d_a,d_b,found,p0_cross,stderr"]
    for a, b in zip(ds, ds[1:]):
        c = ex.find_crossing(res.for_distance(a), res.for_distance(b))
        if c.found:
            out.append(f"{args.code},{a},{b},1,{_fmt(c.p0)},{_fmt(c.stderr)}")
        else:
            out.append(f"{args.code},{a},{b},0,nan,nan")
    return "\n".join(out) + "\n"


def _cmd_count(args) -> str:
    try:
        rows = ex.run_count(args.code, args.distance, args.k, args.samples, args.seed, args.workers)
    except ValueError as e:
        raise UsageError(f"--k: {e}")
    out = ["code,d,k,samples,failures,r_k"]
    for code, d, r in rows:
        out.append(f"{code},{d},{r.k},{r.samples},{r.failures},{_fmt(r.r_k)}")
    return "\n".join(out) + "\n"


def _simulate_record(args, d):
    """Run ``--rounds`` rounds and return (lattice, record, frame)."""
    lattice = build_lattice(CodeSpec(args.code, d))
    model = ErrorModel(args.p[0], args.extraction, args.time_edge_weight)
    rng = RngStream(args.seed, (d,)).generator()
    frame = PauliFrame.zeros(lattice.n_qubits)
    rec = SyndromeRecord(lattice)
    for t in range(1, args.rounds + 1):
        if model.extraction is Extraction.CIRCUIT:
            rec.append(*run_circuit_round(lattice, frame, model, rng, round_index=t))
        else:
            for q in range(lattice.n_data):
                apply_memory_error(frame, q, model.p0, rng)
            rec.append(*run_ideal_round(lattice, frame))
    return lattice, model, rec, frame


def _cmd_dump_syndrome(args) -> str:
    parts = []
    for d in args.distance:
        _, _, rec, _ = _simulate_record(args, d)
        parts.append(f"# d={d}\n" + dump_syndrome(rec))
    return "".join(parts)


def _cmd_dump_graph(args) -> str:
    parts = []
    for d in args.distance:
        lattice, model, rec, frame = _simulate_record(args, d)
        if model.extraction is Extraction.CIRCUIT:
            # close the history with one ideal round
            rec.append(*run_ideal_round(lattice, frame))
        events = [e for e in collect_detection_events(rec) if e.kind == args.type]
        graph = build_graph(events, lattice, model)
        if args.prune:
            graph = prune_edges(graph)
        parts.append(f"# d={d} type={args.type}\n" + dump_graph(graph))
    return "".join(parts)


def _cmd_dump_lattice(args) -> str:
    return "".join(dump_lattice(build_lattice(CodeSpec(args.code, d))) for d in args.distance)


_DISPATCH = {
    "simulate": _cmd_simulate,
    "count": _cmd_count,
    "crossing": _cmd_crossing,
    "dump-lattice": _cmd_dump_lattice,
    "dump-syndrome": _cmd_dump_syndrome,
    "dump-graph": _cmd_dump_graph,
}


def parse_and_run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_normalize_argv(argv))
        _validate(args)
        body = _DISPATCH[args.command](args)
        if args.command in ("simulate", "count", "crossing"):
            body = _header(args) + body
        _emit(body, args.output)
    except UsageError as e:
        print(f"surfthresh: error: {e}", file=sys.stderr)
        return 1
    except (ConsistencyError, ScheduleConflict, NoPerfectMatching) as e:
        print(f"surfthresh: internal consistency error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"surfthresh: error: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(parse_and_run())


if __name__ == "__main__":
    main()
