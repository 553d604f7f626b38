"""Subcommand handlers. Each returns the process exit code."""

from __future__ import annotations

import argparse
import asyncio
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from diffcipher.algebra import (
    DifferenceRing,
    DiffSystem,
    Poly,
    Var,
    format_poly,
    format_system,
    invert_system,
    parse_polynomial,
    parse_polynomials,
    parse_system,
    period,
)
from diffcipher.core.settings import DiffCipherSettings
from diffcipher.db import CampaignRepository, DatabaseSessionManager
from diffcipher.schemas import AttackReport, GuessTally
from diffcipher.services.block_attack import (
    block_pair_attack,
    construct_fixed_point_pairs,
    keeloq_attack,
)
from diffcipher.services.cipher import (
    BlockCipher,
    CipherError,
    StreamCipher,
    bits_from_hex,
    block_decrypt,
    block_encrypt,
    block_from_hex,
    block_to_hex,
    build_builtin,
    from_definition,
    keystream_gen,
    load_state,
    system_fingerprint,
)
from diffcipher.services.cnf import CnfFormula, export_cnf
from diffcipher.services.equations import apply_substitutions, key_equations
from diffcipher.services.guessing import (
    GuessPool,
    GuessSpec,
    attack_stream,
    bivium_guess_vars,
    format_state,
)

logger = logging.getLogger(__name__)

Target = Union[StreamCipher, BlockCipher, DiffSystem]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


# Inputs ------------------------------------------------------------------------------------


def _param_value(text: str) -> object:
    try:
        return int(text, 0)
    except ValueError:
        return text


def load_target(args: argparse.Namespace, *, default: Optional[str] = None) -> Target:
    """The system or cipher named by ``--file`` or ``--cipher``.

    Raises:
        CipherError: When neither is given and there is no default.
    """
    if getattr(args, "file", None):
        path = Path(args.file)
        definition = parse_system(path.read_text(encoding="utf-8"))
        return from_definition(definition, name=path.stem)
    name = getattr(args, "cipher", None) or default
    if name is None:
        raise CipherError("one of --cipher or --file is required")
    params: Dict[str, object] = {}
    for item in getattr(args, "param", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise CipherError(f"--param expects key=value, got {item!r}")
        params[key.strip()] = _param_value(value.strip())
    return build_builtin(name, **params)


def system_of(target: Target) -> DiffSystem:
    return target if isinstance(target, DiffSystem) else target.system


def parse_values(text: str, length: int, p: int, *, bit_order: str = "msb", label: str) -> List[int]:
    """Hex over GF(2), comma-separated integers otherwise."""
    if p == 2:
        return bits_from_hex(text, length, bit_order=bit_order, label=label)
    try:
        values = [int(part) % p for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise CipherError(f"invalid values for {label}") from exc
    if len(values) != length:
        raise CipherError(f"{label} needs {length} values, got {len(values)}")
    return values


def parse_block(text: str, length: int, p: int, *, label: str) -> List[int]:
    if p == 2:
        return block_from_hex(text, length, label=label)
    return parse_values(text, length, p, label=label)


def format_block(values: Sequence[int], p: int) -> str:
    return block_to_hex(values) if p == 2 else ",".join(str(int(v)) for v in values)


def parse_vars(ring: DifferenceRing, text: str) -> Tuple[Var, ...]:
    """Comma-separated variable names such as ``x68,y(3)``."""
    out: List[Var] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        poly = parse_polynomial(item, ring)
        if len(poly) != 1 or poly.degree() != 1 or poly.constant_term():
            raise CipherError(f"{item!r} is not a variable")
        out.append(poly.variables()[0])
    return tuple(out)


def parse_shard(text: Optional[str]) -> Tuple[int, int]:
    if not text:
        return (0, 1)
    index, sep, total = text.partition("/")
    try:
        if not sep:
            raise ValueError(text)
        return (int(index), int(total))
    except ValueError as exc:
        raise CipherError(f"shard must look like i/n, got {text!r}") from exc


def read_keystream(path: Path, p: int) -> List[int]:
    text = path.read_text(encoding="utf-8")
    compact = "".join(text.split())
    if p == 2 and compact and set(compact) <= {"0", "1"}:
        return [int(ch) for ch in compact]
    try:
        return [int(part) % p for part in compact.split(",") if part]
    except ValueError as exc:
        raise CipherError(f"{path} does not hold a keystream") from exc


def format_keystream(values: Sequence[int], p: int) -> str:
    if p == 2:
        return "".join(str(int(v)) for v in values)
    return ",".join(str(int(v)) for v in values)


def read_pairs(path: Path, cipher: BlockCipher) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Lines ``plaintext ciphertext``; blank lines and ``#`` comments are skipped."""
    p = cipher.system.p
    pairs = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CipherError(f"{path}:{number}: expected 'plaintext ciphertext'")
        plain = parse_block(parts[0], cipher.block_length, p, label=f"plaintext on line {number}")
        ciph = parse_block(parts[1], cipher.block_length, p, label=f"ciphertext on line {number}")
        pairs.append((tuple(plain), tuple(ciph)))
    if not pairs:
        raise CipherError(f"{path} holds no pairs")
    return pairs


def initial_state(
    args: argparse.Namespace, target: Target, settings: DiffCipherSettings
) -> Tuple[int, ...]:
    """The 0-state from ``--state``, from ``--key``/``--iv`` or from ``--key``/``--block``."""
    system = system_of(target)
    if args.state:
        return tuple(parse_values(args.state, system.r, system.p, label="state"))
    if isinstance(target, StreamCipher) and args.key is not None and args.iv is not None:
        loading = target.loading
        if loading is None:
            raise CipherError(f"cipher {target.name!r} has no key loading; pass --state")
        key = parse_values(
            args.key, len(loading.key_positions), system.p, bit_order=settings.bit_order, label="key"
        )
        iv = parse_values(
            args.iv, len(loading.iv_positions), system.p, bit_order=settings.bit_order, label="iv"
        )
        return load_state(target, key, iv)
    if isinstance(target, BlockCipher) and args.key is not None and getattr(args, "block", None):
        key = parse_block(args.key, target.key_length, system.p, label="key")
        block = parse_block(args.block, target.block_length, system.p, label="block")
        return tuple(key) + tuple(block)
    raise CipherError("an initial state is required: --state, --key with --iv, or --key with --block")


def guess_spec(
    args: argparse.Namespace, ring: DifferenceRing, default: Sequence[Var] = ()
) -> GuessSpec:
    variables = parse_vars(ring, args.guess_vars) if args.guess_vars else tuple(default)
    values = None
    if args.guess_values:
        values = tuple(
            tuple(parse_values(row, len(variables), ring.p, label="guess values"))
            for row in args.guess_values
        )
    return GuessSpec(variables, p=ring.p, values=values, shard=parse_shard(args.shard))


def _pool(settings: DiffCipherSettings) -> GuessPool:
    return GuessPool(
        settings.threads,
        timeout_factor=settings.guess_timeout_factor,
        timeout_floor_ms=settings.guess_timeout_floor_ms,
        degree_bound=settings.degree_bound,
    )


def _finish(report: AttackReport, args: argparse.Namespace, out: TextIO) -> int:
    if args.report:
        path = Path(args.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json() + "\n", encoding="utf-8")
        logger.info("Wrote report to %s", path)
    print(f"outcome {report.outcome}", file=out)
    print(f"tallies {report.tallies.model_dump()}", file=out)
    if report.state_hex:
        print(f"state {report.state_hex}", file=out)
    if report.initial_state_hex:
        print(f"initial_state {report.initial_state_hex}", file=out)
    if report.key_hex:
        print(f"key {report.key_hex}", file=out)
    if not report.recovered:
        print(f"next_index {report.next_index}", file=out)
    return EXIT_OK if report.recovered else EXIT_NEGATIVE


def _write_cnf(formula: CnfFormula, args: argparse.Namespace, out: TextIO) -> None:
    dimacs = formula.to_dimacs()
    if args.cnf in (None, "-"):
        out.write(dimacs)
        return
    path = Path(args.cnf)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dimacs, encoding="utf-8")
    map_path = Path(args.map) if getattr(args, "map", None) else path.with_name(path.name + ".map")
    map_path.write_text(formula.var_map(), encoding="utf-8")
    print(f"cnf {path} variables {formula.num_vars} clauses {len(formula.clauses)}", file=out)


# Handlers ----------------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    target = load_target(args)
    system = system_of(target)
    kind = getattr(target, "kind", None) or ("block" if isinstance(target, BlockCipher) else "system")
    print(f"kind {kind}", file=out)
    print(f"field {system.p}", file=out)
    for name, r in zip(system.streams, system.orders):
        print(f"stream {name} order {r}", file=out)
    print(f"state_length {system.r}", file=out)
    print(f"homogeneous {str(system.is_homogeneous()).lower()}", file=out)
    print(f"fingerprint {system_fingerprint(system)}", file=out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    target = load_target(args)
    system = system_of(target)
    state = initial_state(args, target, settings)
    if args.steps < 0:
        raise CipherError("--steps must be nonnegative")
    if args.trace:
        keystream = target.keystream if isinstance(target, StreamCipher) else None
        for t, current in enumerate(system.stepper.states(state, args.steps + 1)):
            line = f"{t} {format_state(current, system.p)}"
            if keystream is not None:
                line += f" {int(keystream.evaluate(system.assignment(current)))}"
            print(line, file=out)
        return EXIT_OK
    print(format_state(system.stepper.run(state, args.steps), system.p), file=out)
    return EXIT_OK


def cmd_invert(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    system = system_of(load_target(args))
    result = invert_system(system, args.method)
    if result.invertible and result.inverse is not None:
        out.write(format_system(result.inverse))
        return EXIT_OK
    print(f"# not invertible ({result.status.value}, {result.method})", file=out)
    if result.witness is not None:
        for g in result.witness.generators:
            print(f"# {format_poly(g)}", file=out)
    return EXIT_NEGATIVE


def cmd_period(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    target = load_target(args)
    system = target.key_system if isinstance(target, BlockCipher) and args.key_subsystem else system_of(target)
    result = period(system, args.strategy, state_space_cap=settings.state_space_cap)
    if result.period is None:
        print("unknown", file=out)
        return EXIT_NEGATIVE
    print(result.period, file=out)
    return EXIT_OK


def _stream_cipher(target: Target) -> StreamCipher:
    if not isinstance(target, StreamCipher):
        raise CipherError("this command needs a stream cipher")
    return target


def _block_cipher(target: Target) -> BlockCipher:
    if not isinstance(target, BlockCipher):
        raise CipherError("this command needs a block cipher")
    return target


def cmd_keystream(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    cipher = _stream_cipher(load_target(args))
    state = initial_state(args, cipher, settings)
    start = cipher.offset if args.start is None else args.start
    count = settings.keystream_bits if args.count is None else args.count
    print(format_keystream(keystream_gen(cipher, state, start, count), cipher.system.p), file=out)
    return EXIT_OK


def _block_inputs(args: argparse.Namespace) -> Tuple[BlockCipher, List[int], List[int]]:
    cipher = _block_cipher(load_target(args))
    p = cipher.system.p
    key = parse_block(args.key, cipher.key_length, p, label="key")
    block = parse_block(args.block, cipher.block_length, p, label="block")
    return cipher, key, block


def cmd_encrypt(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    cipher, key, block = _block_inputs(args)
    print(format_block(block_encrypt(cipher, key, block, rounds=args.rounds), cipher.system.p), file=out)
    return EXIT_OK


def cmd_decrypt(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    cipher, key, block = _block_inputs(args)
    print(format_block(block_decrypt(cipher, key, block, rounds=args.rounds), cipher.system.p), file=out)
    return EXIT_OK


class _Ledger:
    """Campaign persistence when ``ledger_url`` is configured."""

    def __init__(self, settings: DiffCipherSettings) -> None:
        self.repository: Optional[CampaignRepository] = None
        self.campaign_id: Optional[int] = None
        self._db: Optional[DatabaseSessionManager] = None
        if settings.ledger_url:
            self._db = DatabaseSessionManager(settings.ledger_url)
            self._db.create_all()
            self.repository = CampaignRepository(self._db)

    def resume(
        self, fingerprint: str, guess_vars: Sequence[str], shard: Tuple[int, int]
    ) -> Tuple[int, GuessTally]:
        if self.repository is None:
            return 0, GuessTally()
        handle = self.repository.open_or_resume(fingerprint, guess_vars, shard)
        self.campaign_id = handle.campaign_id
        return handle.next_index, handle.tallies

    def progress(self) -> Optional[Callable[[int, GuessTally], None]]:
        if self.repository is None or self.campaign_id is None:
            return None
        repository, campaign_id = self.repository, self.campaign_id
        return lambda index, tallies: repository.record_progress(campaign_id, index, tallies)

    def finish(self, report: AttackReport) -> None:
        if self.repository is not None and self.campaign_id is not None:
            if report.recovered:
                result_hex = report.state_hex or report.key_hex
                self.repository.record_outcome(self.campaign_id, report.outcome, result_hex)
            else:
                self.repository.record_progress(self.campaign_id, report.next_index, report.tallies)
        if self._db is not None:
            self._db.dispose()


def cmd_attack_stream(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    cipher = _stream_cipher(load_target(args))
    system = cipher.system
    if args.keystream:
        keystream = read_keystream(Path(args.keystream), system.p)[: settings.keystream_bits]
    else:
        state = initial_state(args, cipher, settings)
        keystream = keystream_gen(cipher, state, cipher.offset, settings.keystream_bits)
    default_vars = bivium_guess_vars() if cipher.name == "bivium" else ()
    spec = guess_spec(args, system.ring, default_vars)
    if args.cnf:
        eqs = key_equations(cipher, keystream, args.target, term_cap=settings.term_cap)
        polys: List[Poly] = list(eqs.generators)
        if spec.values is not None and len(spec.values) == 1:
            fixed = {v: system.ring.const(a) for v, a in zip(spec.variables, spec.values[0])}
            polys = apply_substitutions(polys, fixed)
        _write_cnf(export_cnf(polys, cut_width=settings.cnf_cut_width, ring=system.ring), args, out)
        return EXIT_OK
    ledger = _Ledger(settings)
    pool = _pool(settings)
    fingerprint = system_fingerprint(system)
    start, tallies = ledger.resume(fingerprint, [system.ring.var_name(v) for v in spec.variables], spec.shard)
    pool.tallies = tallies
    try:
        report = asyncio.run(
            attack_stream(
                cipher,
                keystream,
                spec,
                pool=pool,
                target=args.target,
                as_ideal=args.guess_as_ideal,
                start=start,
                budget_ms=settings.budget_ms,
                term_cap=settings.term_cap,
                bit_order=settings.bit_order,
                progress=ledger.progress(),
            )
        )
    finally:
        pool.close()
    ledger.finish(report)
    if settings.metrics_path is not None:
        pool.metrics.write(settings.metrics_path)
    return _finish(report, args, out)


def cmd_attack_block(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    cipher = _block_cipher(load_target(args))
    if not args.pairs:
        raise CipherError("--pairs is required")
    pairs = read_pairs(Path(args.pairs), cipher)
    effective = cipher.final if args.rounds is None else args.rounds
    spec = guess_spec(args, cipher.system.ring)
    pool = _pool(settings)
    try:
        report = asyncio.run(
            block_pair_attack(
                cipher,
                pairs,
                effective,
                spec,
                pool=pool,
                as_ideal=args.guess_as_ideal,
                budget_ms=settings.budget_ms,
            )
        )
    finally:
        pool.close()
    if settings.metrics_path is not None:
        pool.metrics.write(settings.metrics_path)
    return _finish(report, args, out)


def cmd_attack_keeloq(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    cipher = _block_cipher(load_target(args, default="keeloq"))
    p = cipher.system.p
    candidates: Optional[List[Tuple[int, ...]]] = None
    if args.low_key:
        candidates = [tuple(parse_block(text, args.low_bits, p, label="low key")) for text in args.low_key]
    if args.demo:
        rng = np.random.default_rng(settings.seed)
        key, blocks = construct_fixed_point_pairs(cipher, rng, args.demo_pairs)
        pairs = [(block, tuple(block_encrypt(cipher, key, block))) for block in blocks]
        print(f"demo_key {format_block(key, p)}", file=out)
        for plain, ciph in pairs:
            print(f"demo_pair {format_block(plain, p)} {format_block(ciph, p)}", file=out)
        if candidates is None:
            candidates = [tuple(key[: args.low_bits])]
    elif args.pairs:
        pairs = read_pairs(Path(args.pairs), cipher)
    else:
        raise CipherError("--pairs or --demo is required")

    def factory() -> GuessPool:
        return GuessPool(
            1,
            timeout_factor=settings.guess_timeout_factor,
            timeout_floor_ms=0,
            degree_bound=settings.degree_bound,
        )

    report = asyncio.run(
        keeloq_attack(
            cipher,
            pairs,
            candidates=candidates,
            low_bits=args.low_bits,
            pool_factory=factory,
            budget_ms=settings.budget_ms,
        )
    )
    return _finish(report, args, out)


def cmd_export_cnf(args: argparse.Namespace, settings: DiffCipherSettings, out: TextIO) -> int:
    if args.polys:
        polys = parse_polynomials(Path(args.polys).read_text(encoding="utf-8"), p=args.field)
        ring = polys[0].ring if polys else None
    else:
        cipher = _stream_cipher(load_target(args))
        if not args.keystream:
            raise CipherError("--keystream or --polys is required")
        keystream = read_keystream(Path(args.keystream), cipher.system.p)[: settings.keystream_bits]
        polys = list(key_equations(cipher, keystream, args.target, term_cap=settings.term_cap).generators)
        ring = cipher.system.ring
    _write_cnf(export_cnf(polys, cut_width=settings.cnf_cut_width, ring=ring), args, out)
    return EXIT_OK


HANDLERS: Dict[str, Callable[[argparse.Namespace, DiffCipherSettings, TextIO], int]] = {
    "check": cmd_check,
    "simulate": cmd_simulate,
    "invert": cmd_invert,
    "period": cmd_period,
    "keystream": cmd_keystream,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "attack-stream": cmd_attack_stream,
    "attack-block": cmd_attack_block,
    "attack-keeloq": cmd_attack_keeloq,
    "export-cnf": cmd_export_cnf,
}

__all__ = ["EXIT_NEGATIVE", "EXIT_OK", "EXIT_USAGE", "HANDLERS", "load_target"]
