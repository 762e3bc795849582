"""Command line entry point: ``run``, ``bounds`` and ``certify-decay``."""

import argparse
import csv
import io
import sys

from .bounds import exponent_table
from .errors import AssocEmpError
from .harness import emit_report, exit_code, load_config, render, run_experiment
from .sequence_gen import build_gaussian_linear_model, minimal_decay_constant, verify_decay_certificate


def parse_model(text):
    """``kind[:key=value,...]``, e.g. ``power_law:alpha=3,j_max=4096``."""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        params[key.strip()] = int(val) if key.strip() == "j_max" else float(val)
    return build_gaussian_linear_model(kind.strip(), **params)


def _table(rows, fmt):
    if not rows:
        return ""
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    cells = [[f"{r[c]:.6g}" if isinstance(r[c], float) else str(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def cmd_run(args):
    cfg = load_config(args.config, seed=args.seed)
    if args.threads is not None:
        cfg.threads = args.threads
    report = run_experiment(cfg)
    out = args.out or cfg.out_dir
    if out:
        emit_report(report, out, args.format)
    sys.stdout.write(render(report, args.format))
    return exit_code(report)


def cmd_bounds(args):
    rows = exponent_table(args.alpha, args.nu, p=args.p)
    sys.stdout.write(_table(rows, "text"))
    if args.csv:
        sys.stdout.write("\n" + _table(rows, "csv"))
    return 0


def cmd_certify(args):
    model = parse_model(args.model)
    k_max = args.k_max or max(model.j_max, 1)
    c_min = minimal_decay_constant(model, args.alpha, k_max)
    C = args.C if args.C is not None else c_min
    cert = verify_decay_certificate(model, C, args.alpha, k_max)
    print(f"model={model.model_id} C={cert.C!r} alpha={cert.alpha!r} K_max={cert.K_max} "
          f"valid={cert.valid} margin={cert.margin!r} worst_k={cert.worst_k} minimal_C={c_min!r}")
    print(f"tail: {cert.tail_note}")
    return 0 if cert.valid else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="assocemp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--out", default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--format", choices=("csv", "jsonl", "text"), default="text")
    run.set_defaults(func=cmd_run)

    b = sub.add_parser("bounds", help="admissibility, exponents and chaining schedule")
    b.add_argument("--alpha", type=float, required=True)
    b.add_argument("--nu", type=float, required=True)
    b.add_argument("--p", type=float, default=None)
    b.add_argument("--csv", action="store_true", help="also print the table as CSV")
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("certify-decay", help="check cov(X_0, X_k) <= C k^-alpha")
    c.add_argument("--model", required=True, help="kind[:key=value,...]")
    c.add_argument("--C", type=float, default=None, help="defaults to the minimal valid constant")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--k-max", type=int, default=None)
    c.set_defaults(func=cmd_certify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AssocEmpError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
