"""Command line: ``dtangent compute|corpus|explain``.

Exit codes: 0 success, 1 input error, 2 invariant check failure,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .dga import InvariantError, ResourceLimitError
from .jobs import (
    ALL_TASKS,
    EXIT_INPUT,
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_RESOURCE,
    JobError,
    explain,
    parse_job,
    run_corpus,
    run_job,
)
from .poly import NotOnLocusError


def build_parser():
    parser = argparse.ArgumentParser(prog="dtangent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def job_options(p):
        p.add_argument("job", help="job file (YAML)")
        p.add_argument("--max-index", type=int, help="override max_index")
        p.add_argument("--task", action="append", choices=ALL_TASKS, help="override tasks (repeatable)")
        p.add_argument("--seed", type=int, help="override the sweep seed")

    compute = sub.add_parser("compute", help="run a job and print its report")
    job_options(compute)
    fmt = compute.add_mutually_exclusive_group()
    fmt.add_argument("--text", dest="structured", action="store_false", help="human-readable summary (default)")
    fmt.add_argument("--structured", dest="structured", action="store_true", help="canonical JSON report")
    compute.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")
    compute.set_defaults(structured=False)

    corpus = sub.add_parser("corpus", help="check every job in a directory against its golden report")
    corpus.add_argument("directory")

    ex = sub.add_parser("explain", help="print resolution generators and linearized matrices")
    job_options(ex)
    return parser


def _load(args):
    job = parse_job(Path(args.job).read_text(encoding="utf-8"))
    changes = {}
    if args.max_index is not None:
        if args.max_index < 1:
            raise JobError("--max-index must be at least 1")
        changes["max_index"] = args.max_index
    if args.task:
        if "cosection" in args.task and job.cosection is None:
            raise JobError("task 'cosection' needs a 'cosection' field")
        changes["tasks"] = tuple(args.task)
    if args.seed is not None:
        changes["sweep"] = dataclasses.replace(job.sweep, seed=args.seed)
    return dataclasses.replace(job, **changes) if changes else job


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "corpus":
            result = run_corpus(args.directory)
            for line in result.lines:
                print(line)
            print(result.summary())
            return result.exit_code
        job = _load(args)
        if args.verb == "explain":
            sys.stdout.write(explain(job))
            return EXIT_OK
        report = run_job(job, timing=args.timing)
        sys.stdout.write(report.to_json() if args.structured else report.to_text())
        return report.status
    except (JobError, NotOnLocusError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
