"""Command-line front end.

    python cli.py xhn -h 2 -n 4 --list
    python cli.py epsilon -h 2 sqrt:2 sqrt:3
    python cli.py generate -h 2 -m 1 -q 22 sqrt:2 sqrt:3 sqrt:5 --all
    python cli.py gadic -g 10 --auto-level sqrt:2 sqrt:3 sqrt:5 sqrt:7
    python cli.py verify -h 2 --points "18 22"

stdout carries one JSON document (or a text summary with --text); logs go to
stderr. Exit codes: 0 ok, 2 validation, 3 cap, 4 precision/independence,
5 uncertified parameters, 1 unexpected.
"""
import argparse
import json
import logging
import os
import sys

from errors import SidonError, ValidationError
from json_handler import CommandHandler, load_point_sets, parse_inline_points, render_text

logger = logging.getLogger(__name__)

LOG_LEVEL = os.environ.get('SIDON_LOG_LEVEL', 'INFO').upper()


def configure_logging(quiet=False):
    level = logging.WARNING if quiet else getattr(logging, LOG_LEVEL, logging.INFO)
    logging.basicConfig(level=level,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                        handlers=[logging.StreamHandler()])


def _levels(text):
    # "1-5" or "1,2,4"
    try:
        if '-' in text:
            a, b = text.split('-', 1)
            return list(range(int(a), int(b) + 1))
        return [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--help', action='help', help="show this help and exit")
    common.add_argument('--quiet', action='store_true', help="only log warnings and errors")
    common.add_argument('--text', action='store_true', help="human-readable output instead of JSON")
    common.add_argument('--digits', type=int, default=15, help="significant digits of decimal renderings")
    common.add_argument('--precision-max', type=int, default=None, help="last rung of the precision ladder (bits)")
    common.add_argument('--cap', type=int, default=None, help="enumeration / verification cap")

    # -h is the h parameter, so the automatic help flag is off
    parser = argparse.ArgumentParser(prog='cli.py', description="Finite B_h-sets from Q-independent reals",
                                     add_help=False)
    parser.add_argument('--help', action='help', help="show this help and exit")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('xhn', parents=[common], add_help=False, help="count/list X_{h,n}")
    p.add_argument('-h', type=int, required=True)
    p.add_argument('-n', type=int, required=True)
    p.add_argument('--list', action='store_true', help="list the multi-indices")
    p.add_argument('--diffs', action='store_true', help="list the difference vectors")

    p = sub.add_parser('epsilon', parents=[common], add_help=False, help="enclose epsilon_{h,n}")
    p.add_argument('-h', type=int, required=True)
    p.add_argument('-m', type=int, default=1, help="m used for the reported q_min")
    p.add_argument('theta', nargs='+', help="theta specs, e.g. sqrt:2 (coordinates of a vector joined by ',')")

    p = sub.add_parser('generate', parents=[common], add_help=False, help="build certified B_h-sets")
    p.add_argument('-h', type=int, required=True)
    p.add_argument('-m', type=int, default=1)
    p.add_argument('-q', type=int, default=None, help="modulus; the least certified one when omitted")
    p.add_argument('--all', action='store_true', help="every set of the (2m)^(dn) family")
    p.add_argument('--limit', type=int, default=1024, help="most sets built with --all")
    p.add_argument('--seed', type=int, default=None, help="sample --limit sets when the family is larger")
    p.add_argument('--force', action='store_true', help="build even when q is not certified")
    p.add_argument('--code', default=None, help="choice code (base-2m digits, point-major)")
    p.add_argument('--positivity', action='store_true', help="only positive digits where theta >= 0")
    p.add_argument('--no-independence-claim', dest='independence_claim', action='store_false',
                   help="do not assert Q-independence; sets are never certified")
    p.add_argument('theta', nargs='+')

    p = sub.add_parser('gadic', parents=[common], add_help=False, help="Sidon sets from g-adic truncations")
    p.add_argument('-g', type=int, required=True)
    p.add_argument('-l', '--level', type=int, default=None)
    p.add_argument('--auto-level', action='store_true', help="use the least certified level")
    p.add_argument('--scan', type=_levels, default=None, help="levels to explore, e.g. 1-5")
    p.add_argument('--no-independence-claim', dest='independence_claim', action='store_false',
                   help="do not assert Q-independence; sets are never certified")
    p.add_argument('-h', type=int, default=2)
    p.add_argument('theta', nargs='+')

    p = sub.add_parser('verify', parents=[common], add_help=False, help="check the B_h property")
    p.add_argument('-h', type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument('--points', help="inline points, e.g. \"18 22\" or \"1,0 0,1\"")
    src.add_argument('--file', help="JSON or text point file; '-' reads stdin")
    p.add_argument('--workers', type=int, default=None, help="verification processes")
    return parser


def request_from_args(args):
    """(command, inputs) for CommandHandler.process_request."""
    if args.command == 'xhn':
        return 'xhn', {"h": args.h, "n": args.n, "listing": args.list, "diffs": args.diffs}
    if args.command == 'epsilon':
        return 'epsilon', {"theta": args.theta, "h": args.h, "m": args.m}
    if args.command == 'generate':
        return 'generate', {"theta": args.theta, "h": args.h, "m": args.m, "q": args.q,
                            "enumerate_all": args.all, "limit": args.limit, "seed": args.seed,
                            "force": args.force, "code": args.code, "positivity": args.positivity,
                            "independence_claim": args.independence_claim}
    if args.command == 'gadic':
        return 'gadic', {"theta": args.theta, "g": args.g, "level": args.level,
                         "auto_level": args.auto_level, "h": args.h, "scan": args.scan,
                         "independence_claim": args.independence_claim}
    if args.points is not None:
        sets = [parse_inline_points(args.points)]
    else:
        try:
            if args.file == '-':
                text = sys.stdin.read()
            else:
                with open(args.file) as f:
                    text = f.read()
        except OSError as e:
            raise ValidationError(f"cannot read {args.file}: {e}")
        sets = load_point_sets(text)
    return 'verify', {"h": args.h, "sets": sets}


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.quiet)
    handler = CommandHandler(cap=args.cap, precision_max=args.precision_max, digits=args.digits,
                             workers=getattr(args, 'workers', None))
    try:
        command, inputs = request_from_args(args)
    except SidonError as e:
        logger.error(f"Invalid request: {e}")
        print(f"error: {e}" if args.text else
              json.dumps({"error": e.to_dict()}, sort_keys=True, indent=2))
        return e.exit_code
    doc = handler.process_request(command, inputs)
    print(render_text(doc) if args.text else doc.to_json())
    return CommandHandler.exit_code(doc)


if __name__ == "__main__":
    sys.exit(main())
