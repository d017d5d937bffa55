"""``seqforge`` command line.

Exit codes
----------
0  success
1  ``evaluate``: a sequence exceeds ``--papr-threshold``
2  validation or usage error
3  I/O error
4  no feasible solution was found
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as seqio
from .baselines import (
    ZcFamilySpec,
    coprime_roots,
    largest_odd_prime_at_most,
    random_gaussian_set,
    select_lowest_coherence_subset,
    zc_generate,
)
from .config import KEYS, build_config, coerce, parse_subcarriers, read_config_file
from .errors import FormatError, SeqforgeError, ValidationError
from .model import SequenceSet, SubcarrierAssignment, build_papr_probes, evaluate, welch_bound
from .solver import run
from .sweep import SweepSpec, default_jobs, parse_axis_values, run_sweep

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NO_FEASIBLE = 4

PROGRESS_EVERY = 100

_FLAG_HELP = {
    "L": "sequence length",
    "N": "number of sequences",
    "papr_threshold": "PAPR ceiling (linear); 'inf' disables the constraint",
    "n_subcarriers": "total subcarriers N_C",
    "n_samples": "time-domain samples N_S (>= N_C)",
    "subcarriers": "'contiguous', 'stride=k' or a comma list of 1-based indices",
    "K": "sequence-collision rounds per iteration",
    "K1": "step-size review period",
    "gamma": "radius step",
    "rho": "step-size adaptation rate",
    "tau_seq": "initial sequence-collision step size",
    "tau_papr": "initial PAPR-collision step size",
    "max_iterations": "iteration limit",
    "stall_limit": "stop after this many iterations without improvement",
    "papr_inner_cap": "max PAPR-resolution rounds per iteration",
    "seed": "random seed",
    "init_file": "warm-start from a sequence-set file",
}


def _add_config_flags(p, exclude=()):
    for key in KEYS:
        if key in exclude:
            continue
        flag = "--" + key.replace("_", "-")
        p.add_argument(flag, dest=key, default=None, help=_FLAG_HELP[key])


def _collect_params(args, exclude=()):
    params = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in KEYS:
        if key in exclude:
            continue
        raw = getattr(args, key, None)
        if raw is not None:
            params[key] = coerce(key, raw)
    return params


def _progress_printer(quiet):
    if quiet:
        return None

    def report(rec):
        if rec.iteration % PROGRESS_EVERY == 0:
            print(
                f"iter {rec.iteration:6d}  mu={rec.mu:.6f}  mu_min={rec.mu_min:.6f}  "
                f"r_seq={rec.r_seq:.6f}  tau_seq={rec.tau_seq:.4g}",
                file=sys.stderr,
            )

    return report


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_generate(args):
    params = _collect_params(args)
    cfg = build_config(params)
    if not args.quiet and not cfg.papr_constrained:
        print("PAPR constraint is vacuous; PAPR stage skipped", file=sys.stderr)
    best, report = run(cfg, progress=_progress_printer(args.quiet))
    report_path = args.report or f"{args.out}.report.json"
    Path(report_path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if best is None:
        print("no feasible solution found", file=sys.stderr)
        return EXIT_NO_FEASIBLE
    seqio.save(args.out, best)
    m = report.final_metrics
    print(f"coherence {m['coherence']:.10f}  max_papr {m['max_papr']:.6f}  "
          f"iterations {report.iterations}  ({report.termination_reason})")
    return EXIT_OK


def cmd_evaluate(args):
    seqset = seqio.load(args.file)
    a = seqset.assignment
    if args.subcarriers or args.n_samples or args.n_subcarriers:
        n_c = int(args.n_subcarriers) if args.n_subcarriers else a.n_subcarriers
        n_s = int(args.n_samples) if args.n_samples else a.n_samples
        if args.subcarriers:
            a = parse_subcarriers(args.subcarriers, seqset.length, n_c, n_s)
        else:
            a = SubcarrierAssignment(a.indices, n_c, n_s)
        seqset = SequenceSet(np.array(seqset.sequences), a)
    metrics = evaluate(seqset, build_papr_probes(a))
    doc = metrics.to_dict()
    doc.update(L=seqset.length, N=seqset.n_sequences,
               n_subcarriers=a.n_subcarriers, n_samples=a.n_samples)
    passed = None
    if args.papr_threshold is not None:
        thr = coerce("papr_threshold", args.papr_threshold)
        passed = bool(metrics.max_papr <= thr + 1e-9)
        doc["papr_threshold"] = "inf" if math.isinf(thr) else thr
        doc["papr_pass"] = passed

    wb = "n/a (N <= L)" if metrics.welch_bound is None else f"{metrics.welch_bound:.10f}"
    lines = [
        f"sequences    {seqset.n_sequences} x {seqset.length}",
        f"coherence    {metrics.coherence:.10f}",
        f"welch_bound  {wb}",
        f"papr min     {doc['min_papr']:.6f}",
        f"papr median  {doc['median_papr']:.6f}",
        f"papr max     {metrics.max_papr:.6f}",
    ]
    if passed is not None:
        lines.append(f"papr check   {'PASS' if passed else 'FAIL'} (threshold {args.papr_threshold})")
    if args.json == "-":
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))
        if args.json:
            Path(args.json).write_text(json.dumps(doc, indent=2) + "\n")
    return EXIT_THRESHOLD if passed is False else EXIT_OK


def _assignment_from(args, length):
    n_c = int(args.n_subcarriers) if args.n_subcarriers else None
    n_s = int(args.n_samples) if args.n_samples else None
    return parse_subcarriers(args.subcarriers, length, n_c, n_s)


def cmd_baseline(args):
    if args.kind == "zc":
        if args.length is None and args.pad_to is None:
            raise ValidationError("zc: give --length and/or --pad-to")
        zc_len = int(args.length) if args.length else largest_odd_prime_at_most(int(args.pad_to))
        target = int(args.pad_to) if args.pad_to else zc_len
        if args.roots == "all":
            roots = coprime_roots(zc_len)
        else:
            try:
                roots = tuple(int(r) for r in args.roots.split(","))
            except ValueError:
                raise ValidationError(f"roots: cannot parse {args.roots!r}") from None
        spec = ZcFamilySpec(zc_len, roots, int(args.shifts))
        seqset = zc_generate(spec, target, _assignment_from(args, target))
    else:
        if args.L is None or args.N is None:
            raise ValidationError("gaussian: --L and --N are required")
        length = int(args.L)
        seqset = random_gaussian_set(length, int(args.N), int(args.seed),
                                     _assignment_from(args, length))
    if args.select is not None:
        seqset = select_lowest_coherence_subset(seqset, int(args.select))
    if args.out == "-":
        sys.stdout.write(seqio.dumps_text(seqset))
    else:
        seqio.save(args.out, seqset)
    return EXIT_OK


def cmd_sweep(args):
    fixed = _collect_params(args, exclude=("seed",))
    spec = SweepSpec(
        axis=args.axis,
        values=parse_axis_values(args.axis, args.values),
        fixed=fixed,
        seeds_per_point=int(args.seeds),
        seed_base=int(args.seed_base),
    )
    jobs = int(args.jobs) if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise ValidationError(f"jobs must be >= 1, got {jobs}")
    text = run_sweep(spec, jobs=jobs, baselines=args.baselines, timing=not args.no_timing)
    _write_text(args.out, text)
    return EXIT_OK


def cmd_welch_bound(args):
    print(f"{welch_bound(int(args.L), int(args.N)):.12f}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="seqforge",
        description="Design low-coherence sequence sets under PAPR constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="design a sequence set")
    g.add_argument("--config", help="key=value configuration file")
    _add_config_flags(g)
    g.add_argument("--out", required=True, help="sequence file (.json for JSON)")
    g.add_argument("--report", help="report JSON path (default: <out>.report.json)")
    g.add_argument("--quiet", action="store_true", help="no progress on stderr")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("evaluate", help="metrics of an existing sequence file")
    e.add_argument("file")
    e.add_argument("--n-samples", dest="n_samples")
    e.add_argument("--n-subcarriers", dest="n_subcarriers")
    e.add_argument("--subcarriers")
    e.add_argument("--papr-threshold", dest="papr_threshold")
    e.add_argument("--json", help="also write metrics JSON here ('-' for stdout only)")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("baseline", help="generate a reference set")
    b.add_argument("kind", choices=("zc", "gaussian"))
    b.add_argument("--length", help="zc: ZC length (default: largest odd prime <= pad-to)")
    b.add_argument("--roots", default="all", help="zc: 'all' or comma list")
    b.add_argument("--shifts", default="1", help="zc: cyclic shifts per root")
    b.add_argument("--pad-to", dest="pad_to", help="zc: zero-pad to this length")
    b.add_argument("--L", dest="L")
    b.add_argument("--N", dest="N")
    b.add_argument("--seed", default="0")
    b.add_argument("--select", help="keep this many sequences (greedy lowest coherence)")
    b.add_argument("--subcarriers")
    b.add_argument("--n-subcarriers", dest="n_subcarriers")
    b.add_argument("--n-samples", dest="n_samples")
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_baseline)

    s = sub.add_parser("sweep", help="sweep one parameter, write CSV")
    s.add_argument("--axis", required=True,
                   choices=("papr_threshold", "sequence_length", "sequence_count"))
    s.add_argument("--values", required=True, help="comma list, strictly increasing")
    s.add_argument("--seeds", default="1", help="seeds per point")
    s.add_argument("--seed-base", dest="seed_base", default="0")
    s.add_argument("--config", help="key=value configuration file")
    _add_config_flags(s, exclude=("seed",))
    s.add_argument("--jobs", help="parallel workers (default: $SEQFORGE_JOBS or 1)")
    s.add_argument("--baselines", action="store_true", help="append baseline rows")
    s.add_argument("--no-timing", dest="no_timing", action="store_true",
                   help="leave wall_time_s empty so output is reproducible byte for byte")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sweep)

    w = sub.add_parser("welch-bound", help="print the Welch bound")
    w.add_argument("--L", dest="L", required=True)
    w.add_argument("--N", dest="N", required=True)
    w.set_defaults(func=cmd_welch_bound)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SeqforgeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
