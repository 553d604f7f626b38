from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence, TextIO

from diffcipher import __version__
from diffcipher.algebra import NotInvertibleError, TermCapExceeded
from diffcipher.core.settings import DiffCipherSettings, load_settings

from .commands import EXIT_NEGATIVE, EXIT_USAGE, HANDLERS

logger = logging.getLogger(__name__)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("system")
    source.add_argument("--cipher", help="built-in cipher or system name")
    source.add_argument("--file", help="system definition file")
    source.add_argument(
        "--param", action="append", metavar="KEY=VALUE", help="parameter of a built-in (repeatable)"
    )
    run = common.add_argument_group("run")
    run.add_argument("--log-level", help="overrides DIFFCIPHER_LOG_LEVEL")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int)
    run.add_argument("--budget-ms", type=int)
    run.add_argument("--timeout-floor-ms", type=int, help="per-guess timeout before a median exists; 0 disables")
    run.add_argument("--term-cap", type=int)
    run.add_argument("--degree-bound", type=int, help="sugar degree above which solver pairs are dropped")
    run.add_argument("--cut-width", type=int, help="XOR length before cutting in CNF export")
    run.add_argument("--bit-order", choices=("msb", "lsb"))
    run.add_argument("--ledger", help="SQLAlchemy URL of the campaign ledger")
    run.add_argument("--metrics", help="Prometheus textfile written after a campaign")
    return common


def _state_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", help="0-state: hex over GF(2), comma-separated values otherwise")
    parser.add_argument("--key", help="key (hex)")
    parser.add_argument("--iv", help="iv (hex), with --key for stream ciphers")
    parser.add_argument("--block", help="block (hex), with --key for block ciphers")


def _guess_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--guess-vars", help="comma-separated variables, e.g. x68,x71,y3")
    parser.add_argument(
        "--guess-values", action="append", help="values of the guess variables; restricts the guesses (repeatable)"
    )
    parser.add_argument("--guess-as-ideal", action="store_true", help="append guesses as x - a generators")
    parser.add_argument("--shard", help="i/n: process guesses congruent to i modulo n")
    parser.add_argument("--report", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    """Creates the argument parser with one subparser per command."""
    common = _common()
    parser = argparse.ArgumentParser(
        prog="diffcipher",
        description="Difference-equation models of ciphers over GF(p) and algebraic attacks on them.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[common], help="parse and validate a system")

    simulate = sub.add_parser("simulate", parents=[common], help="iterate the state transition")
    _state_args(simulate)
    simulate.add_argument("--steps", type=int, default=0)
    simulate.add_argument("--trace", action="store_true", help="print every state, with the keystream value")

    invert = sub.add_parser("invert", parents=[common], help="print the inverse system")
    invert.add_argument("--method", choices=("auto", "quick", "full"), default="auto")

    per = sub.add_parser("period", parents=[common], help="least d with T^d = id")
    per.add_argument("--strategy", choices=("orbit_lcm", "brute_force", "linear_primitive"), default="orbit_lcm")
    per.add_argument("--key-subsystem", action="store_true", help="period of a block cipher's key subsystem")

    keystream = sub.add_parser("keystream", parents=[common], help="generate keystream values")
    _state_args(keystream)
    keystream.add_argument("--start", type=int, help="first clock (default: the cipher's offset)")
    keystream.add_argument("--count", type=int)

    for name, text in (("encrypt", "encrypt one block"), ("decrypt", "decrypt one block")):
        block = sub.add_parser(name, parents=[common], help=text)
        block.add_argument("--key", required=True)
        block.add_argument("--block", required=True)
        block.add_argument("--rounds", type=int, help="overrides the cipher's final clock")

    stream = sub.add_parser("attack-stream", parents=[common], help="guess-and-determine on a keystream")
    _state_args(stream)
    _guess_args(stream)
    stream.add_argument("--keystream", help="file of keystream values starting at the offset clock")
    stream.add_argument("--target", choices=("offset_state", "initial_state"), default="offset_state")
    stream.add_argument("--cnf", help="export the key equations as DIMACS instead of solving")
    stream.add_argument("--map", help="variable map path (default: <cnf>.map)")

    block_attack = sub.add_parser("attack-block", parents=[common], help="multiple-pair key recovery")
    _guess_args(block_attack)
    block_attack.add_argument("--pairs", help="file of 'plaintext ciphertext' lines")
    block_attack.add_argument("--rounds", type=int, help="clock of the ciphertexts (default: final)")

    keeloq = sub.add_parser("attack-keeloq", parents=[common], help="fixed-point attack on KeeLoq")
    keeloq.add_argument("--pairs", help="file of 'plaintext ciphertext' lines with periodic plaintexts")
    keeloq.add_argument("--low-key", action="append", help="candidate low key values (hex, repeatable)")
    keeloq.add_argument("--low-bits", type=int, default=16)
    keeloq.add_argument("--demo", action="store_true", help="build a key and periodic pairs from --seed")
    keeloq.add_argument("--demo-pairs", type=int, default=2)
    keeloq.add_argument("--report", help="write the JSON report here")

    cnf = sub.add_parser("export-cnf", parents=[common], help="DIMACS export of GF(2) equations")
    cnf.add_argument("--polys", help="file with one polynomial per line")
    cnf.add_argument("--field", type=int, default=2)
    cnf.add_argument("--keystream", help="keystream file; exports the key equations of --cipher/--file")
    cnf.add_argument("--target", choices=("offset_state", "initial_state"), default="offset_state")
    cnf.add_argument("--cnf", help="output path (default: standard output)")
    cnf.add_argument("--map", help="variable map path (default: <cnf>.map)")
    return parser


def resolve_settings(args: argparse.Namespace, base: Optional[DiffCipherSettings] = None) -> DiffCipherSettings:
    base = base or load_settings()
    return base.with_overrides(
        log_level=args.log_level,
        seed=args.seed,
        threads=args.threads,
        budget_ms=args.budget_ms,
        guess_timeout_floor_ms=args.timeout_floor_ms,
        term_cap=args.term_cap,
        degree_bound=args.degree_bound,
        cnf_cut_width=args.cut_width,
        bit_order=args.bit_order,
        ledger_url=args.ledger,
        metrics_path=args.metrics,
    )


def main(
    argv: Optional[Sequence[str]] = None,
    *,
    settings: Optional[DiffCipherSettings] = None,
    out: Optional[TextIO] = None,
) -> int:
    """Runs one command and returns its exit code.

    0 is success, 1 a negative result (not invertible, unknown period,
    key not found) and 2 a usage or input error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = out or sys.stdout
    try:
        resolved = resolve_settings(args, settings)
    except ValueError as exc:
        print(f"diffcipher: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=resolved.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return HANDLERS[args.command](args, resolved, out)
    except NotInvertibleError as exc:
        print(f"diffcipher: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (ValueError, OSError, TermCapExceeded) as exc:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"diffcipher: {exc}", file=sys.stderr)
        return EXIT_USAGE


__all__ = ["build_parser", "main", "resolve_settings"]
