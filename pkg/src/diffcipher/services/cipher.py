"""Stream and block ciphers defined by explicit difference systems.

A stream cipher is a system with a keystream polynomial ``f`` and an
offset ``T``: the keystream is ``b(t) = f(v(t))`` for ``t >= T``. A block
cipher is an invertible system whose first ``m`` streams form a key
subsystem; encryption maps the block window of the 0-state to the block
window of the ``T``-state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from diffcipher.algebra.diffpoly import Poly, Var
from diffcipher.algebra.parser import (
    ParseError,
    SystemDefinition,
    format_system,
    parse_polynomial,
    parse_system,
)
from diffcipher.algebra.system import (
    DiffSystem,
    StateVec,
    backstep,
    invert_system,
    simulate,
    subsystem_split,
)
from diffcipher.core.fingerprint import decode_hex, text_fingerprint

logger = logging.getLogger(__name__)


class CipherError(ValueError):
    """Raised for unknown builtins, bad parameters and dimension mismatches."""


# Definitions -----------------------------------------------------------------------------

BIVIUM_DEFINITION = """\
# Bivium: the first two registers of Trivium
field 2
stream x order 93
stream y order 84
update x = y0 + y15 + x24 + y1*y2
update y = x0 + y6 + x27 + x1*x2
keystream = x0 + x27 + y0 + y15
offset 708
"""

TRIVIUM_DEFINITION = """\
field 2
stream x order 93
stream y order 84
stream z order 111
update x = z0 + x24 + z45 + z1*z2
update y = x0 + y6 + x27 + x1*x2
update z = y0 + y15 + z24 + y1*y2
keystream = x0 + x27 + y0 + y15 + z0 + z45
offset 1152
"""

KEELOQ_DEFINITION = """\
# KeeLoq: 64-bit rotating key, 32-bit block, 528 rounds
field 2
stream k order 64
stream x order 32
update k = k0
update x = x0 + x16 + x9 + x1 + x20*x31 + x1*x31 + x20*x26 + x1*x26 + x9*x20 + x1*x9 + x1*x9*x31 + x1*x20*x31 + x9*x26*x31 + x20*x26*x31 + k0
split 1
final 528
"""


@dataclass(frozen=True)
class KeyLoading:
    """Where key and iv bits land in the 0-state, and which bits are set to one.

    ``key_positions[i]`` is the state position of key bit ``i``.
    """

    key_positions: Tuple[int, ...]
    iv_positions: Tuple[int, ...]
    ones: Tuple[int, ...] = ()


@dataclass(frozen=True)
class StreamCipher:
    name: str
    system: DiffSystem
    keystream: Poly
    offset: int
    loading: Optional[KeyLoading] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.keystream.ring != self.system.ring:
            raise CipherError("keystream polynomial belongs to another ring")
        for v in self.keystream.variables():
            if v.clock >= self.system.orders[v.stream]:
                raise CipherError(
                    f"keystream uses {self.system.ring.var_name(v)}, which is not a state variable"
                )
        if self.offset < 0:
            raise CipherError("offset must be nonnegative")

    kind = "stream"

    @property
    def state_length(self) -> int:
        return self.system.r


@dataclass(frozen=True)
class BlockCipher:
    name: str
    system: DiffSystem
    split: int
    final: int

    kind = "block"

    def __post_init__(self) -> None:
        if self.final < 0:
            raise CipherError("final clock must be nonnegative")
        if subsystem_split(self.system, self.split) is None:
            raise CipherError(f"the first {self.split} streams do not form a key subsystem")
        if not invert_system(self.system).invertible:
            raise CipherError(f"system of {self.name!r} is not invertible")

    @property
    def key_length(self) -> int:
        return sum(self.system.orders[: self.split])

    @property
    def block_length(self) -> int:
        return self.system.r - self.key_length

    @property
    def key_system(self) -> DiffSystem:
        sub = subsystem_split(self.system, self.split)
        assert sub is not None
        return sub


CipherSpec = Union[StreamCipher, BlockCipher]


def system_fingerprint(system: DiffSystem) -> str:
    return text_fingerprint(format_system(system))


# Builtins ------------------------------------------------------------------------------


def estream_loading(system: DiffSystem, *, trivium: bool) -> KeyLoading:
    """Key bit ``i`` goes to ``x(92 - i)``, iv bit ``i`` to ``y(83 - i)``;
    Trivium also sets ``z(0), z(1), z(2)``."""
    x, y = system.offsets[0], system.offsets[1]
    key = tuple(x + 92 - i for i in range(80))
    iv = tuple(y + 83 - i for i in range(80))
    ones = tuple(system.offsets[2] + c for c in range(3)) if trivium else ()
    return KeyLoading(key, iv, ones)


@lru_cache(maxsize=None)
def _parse_builtin(text: str) -> SystemDefinition:
    return parse_system(text)


def bivium() -> StreamCipher:
    definition = _parse_builtin(BIVIUM_DEFINITION)
    assert definition.keystream is not None and definition.offset is not None
    return StreamCipher(
        "bivium",
        definition.system,
        definition.keystream,
        definition.offset,
        estream_loading(definition.system, trivium=False),
    )


def trivium() -> StreamCipher:
    definition = _parse_builtin(TRIVIUM_DEFINITION)
    assert definition.keystream is not None and definition.offset is not None
    return StreamCipher(
        "trivium",
        definition.system,
        definition.keystream,
        definition.offset,
        estream_loading(definition.system, trivium=True),
    )


def keeloq() -> BlockCipher:
    definition = _parse_builtin(KEELOQ_DEFINITION)
    assert definition.split is not None and definition.final is not None
    return BlockCipher("keeloq", definition.system, definition.split, definition.final)


def example_2_3(p: int = 7) -> DiffSystem:
    """``x(1) = x(0)^2 + y(0)^2``, ``y(1) = 2 x(0) y(0)`` over an odd prime."""
    if p == 2:
        raise CipherError("the worked example needs an odd characteristic")
    text = f"field {p}\nstream x order 1\nstream y order 1\nupdate x = x0^2 + y0^2\nupdate y = 2*x0*y0\n"
    try:
        return parse_system(text).system
    except ParseError as exc:
        raise CipherError(str(exc)) from exc


def example_closed_form(p: int, a0: int, b0: int, t: int) -> Tuple[int, int]:
    """State of the worked example at clock ``t``:
    ``((a0 + b0)^(2^t) +- (a0 - b0)^(2^t)) / 2``."""
    if p == 2:
        raise CipherError("the closed form divides by 2")

    def power(base: int) -> int:
        base %= p
        if base == 0:
            return 0
        return pow(base, pow(2, t, p - 1), p)

    plus, minus = power(a0 + b0), power(a0 - b0)
    half = pow(2, p - 2, p)
    return (plus + minus) * half % p, (plus - minus) * half % p


def lfsr_combiner(
    lfsrs: Sequence[Tuple[int, Sequence[int]]] = ((4, (0, 1)), (5, (0, 2))),
    combiner: str = "a0*b0 + a1 + b2",
    *,
    p: int = 2,
    offset: int = 0,
) -> StreamCipher:
    """LFSRs ``a, b, c, ...`` with ``x(r) = sum of x(tap)`` and a combining keystream.

    Raises:
        CipherError: When a register misses tap 0 (singular) or the combiner
            uses variables outside the registers' windows.
    """
    if not lfsrs:
        raise CipherError("at least one register is required")
    names = [chr(ord("a") + i) for i in range(len(lfsrs))]
    lines = [f"field {p}"]
    for name, (order, _) in zip(names, lfsrs):
        lines.append(f"stream {name} order {order}")
    for name, (order, taps) in zip(names, lfsrs):
        if 0 not in taps:
            raise CipherError(f"register {name!r} needs tap 0 to be invertible")
        if any(not 0 <= tap < order for tap in taps):
            raise CipherError(f"register {name!r} has taps outside 0..{order - 1}")
        lines.append(f"update {name} = " + " + ".join(f"{name}{tap}" for tap in sorted(set(taps))))
    try:
        system = parse_system("\n".join(lines) + "\n").system
        keystream = parse_polynomial(combiner, system.ring)
    except ParseError as exc:
        raise CipherError(f"invalid register or combiner definition: {exc}") from exc
    return StreamCipher("lfsr_combiner", system, keystream, offset)


BUILTINS: Dict[str, Callable[..., Union[CipherSpec, DiffSystem]]] = {
    "bivium": bivium,
    "trivium": trivium,
    "keeloq": keeloq,
    "lfsr_combiner": lfsr_combiner,
    "example_2_3": example_2_3,
}


def build_builtin(name: str, **params: object) -> Union[CipherSpec, DiffSystem]:
    """Builds a built-in cipher (or, for ``example_2_3``, a bare system).

    Raises:
        CipherError: For unknown names or invalid parameters.
    """
    try:
        factory = BUILTINS[name]
    except KeyError as exc:
        raise CipherError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from exc
    try:
        return factory(**params)
    except TypeError as exc:
        raise CipherError(f"invalid parameters for {name!r}: {exc}") from exc


def from_definition(definition: SystemDefinition, name: str = "custom") -> Union[CipherSpec, DiffSystem]:
    """Cipher described by a parsed system file, or its bare system."""
    if definition.keystream is not None:
        return StreamCipher(name, definition.system, definition.keystream, definition.offset or 0)
    if definition.split is not None:
        return BlockCipher(name, definition.system, definition.split, definition.final or 0)
    return definition.system


# Bit codecs ----------------------------------------------------------------------------


def bits_from_hex(value: str, length: int, *, bit_order: str = "msb", label: str = "value") -> List[int]:
    """Unpacks ``length`` bits from hex.

    ``msb`` reads the number's binary expansion, most significant bit first;
    ``lsb`` takes bit ``i`` from byte ``i // 8`` at position ``i % 8``, as the
    eSTREAM reference code loads keys.
    """
    try:
        raw = decode_hex(value, label=label)
    except ValueError as exc:
        raise CipherError(str(exc)) from exc
    if bit_order == "msb":
        total = int.from_bytes(raw, "big")
        if total >> length:
            raise CipherError(f"{label} does not fit in {length} bits")
        return [(total >> (length - 1 - i)) & 1 for i in range(length)]
    if bit_order == "lsb":
        if len(raw) * 8 < length:
            raw = raw + bytes((length + 7) // 8 - len(raw))
        if any(raw[i // 8] >> (i % 8) & 1 for i in range(length, len(raw) * 8)):
            raise CipherError(f"{label} does not fit in {length} bits")
        return [(raw[i // 8] >> (i % 8)) & 1 for i in range(length)]
    raise CipherError(f"unknown bit order {bit_order!r}")


def bits_to_hex(bits: Sequence[int], *, bit_order: str = "msb") -> str:
    """Packs bits into lowercase hex (the inverse of :func:`bits_from_hex`)."""
    if bit_order == "msb":
        padded = [0] * (-len(bits) % 4) + [int(b) & 1 for b in bits]
        digits = []
        for i in range(0, len(padded), 4):
            nibble = padded[i] << 3 | padded[i + 1] << 2 | padded[i + 2] << 1 | padded[i + 3]
            digits.append(f"{nibble:x}")
        return "".join(digits)
    if bit_order == "lsb":
        out = bytearray((len(bits) + 7) // 8)
        for i, b in enumerate(bits):
            if b & 1:
                out[i // 8] |= 1 << (i % 8)
        return out.hex()
    raise CipherError(f"unknown bit order {bit_order!r}")


def int_to_bits(value: int, length: int) -> List[int]:
    """Bit ``j`` of ``value`` at index ``j``."""
    if value < 0 or value >> length:
        raise CipherError(f"{value:#x} does not fit in {length} bits")
    return [(value >> j) & 1 for j in range(length)]


def bits_to_int(bits: Sequence[int]) -> int:
    return sum((int(b) & 1) << j for j, b in enumerate(bits))


def block_from_hex(value: str, length: int, *, label: str = "block") -> List[int]:
    """Block or key values from hex read as an integer, bit ``j`` at index ``j``."""
    try:
        number = int.from_bytes(decode_hex(value, label=label), "big")
    except ValueError as exc:
        raise CipherError(str(exc)) from exc
    if number >> length:
        raise CipherError(f"{label} does not fit in {length} bits")
    return int_to_bits(number, length)


def block_to_hex(bits: Sequence[int]) -> str:
    return f"{bits_to_int(bits):0{(len(bits) + 3) // 4}x}"


def state_from_hex(system: DiffSystem, value: str, *, bit_order: str = "msb") -> StateVec:
    if system.p != 2:
        raise CipherError("hex states are only defined over GF(2)")
    return tuple(bits_from_hex(value, system.r, bit_order=bit_order, label="state"))


def state_to_hex(state: Sequence[int], *, bit_order: str = "msb") -> str:
    return bits_to_hex(state, bit_order=bit_order)


# Stream ciphers ------------------------------------------------------------------------------


def load_state(cipher: StreamCipher, key: Sequence[int], iv: Sequence[int]) -> StateVec:
    """The 0-state holding ``key`` and ``iv`` under the cipher's loading.

    Raises:
        CipherError: When the cipher has no loading or the lengths differ.
    """
    loading = cipher.loading
    if loading is None:
        raise CipherError(f"cipher {cipher.name!r} has no key loading; pass a full state")
    if len(key) != len(loading.key_positions) or len(iv) != len(loading.iv_positions):
        raise CipherError(
            f"expected {len(loading.key_positions)} key and {len(loading.iv_positions)} iv values"
        )
    state = [0] * cipher.system.r
    for pos, bit in zip(loading.key_positions, key):
        state[pos] = int(bit) % cipher.system.p
    for pos, bit in zip(loading.iv_positions, iv):
        state[pos] = int(bit) % cipher.system.p
    for pos in loading.ones:
        state[pos] = 1
    return tuple(state)


def keystream_gen(cipher: StreamCipher, initial: Sequence[int], start: int, count: int) -> List[int]:
    """Keystream values ``b(start) .. b(start + count - 1)``."""
    if start < 0 or count < 0:
        raise CipherError("start and count must be nonnegative")
    if len(initial) != cipher.system.r:
        raise CipherError(f"state has length {len(initial)}, expected {cipher.system.r}")
    return cipher.system.stepper.evaluations(initial, cipher.keystream, start, count)


# Block ciphers -------------------------------------------------------------------------------


def _check_lengths(cipher: BlockCipher, key: Sequence[int], block: Sequence[int], label: str) -> None:
    if len(key) != cipher.key_length:
        raise CipherError(f"key has length {len(key)}, expected {cipher.key_length}")
    if len(block) != cipher.block_length:
        raise CipherError(f"{label} has length {len(block)}, expected {cipher.block_length}")


def block_encrypt(
    cipher: BlockCipher, key: Sequence[int], plaintext: Sequence[int], *, rounds: Optional[int] = None
) -> List[int]:
    """Block window of the ``T``-state (``rounds`` overrides ``T``)."""
    _check_lengths(cipher, key, plaintext, "plaintext")
    rounds = cipher.final if rounds is None else rounds
    state = simulate(cipher.system, tuple(key) + tuple(plaintext), rounds)
    return list(state[cipher.key_length :])


def block_decrypt(
    cipher: BlockCipher, key: Sequence[int], ciphertext: Sequence[int], *, rounds: Optional[int] = None
) -> List[int]:
    """Runs the key subsystem forward to ``T`` and backsteps the whole system."""
    _check_lengths(cipher, key, ciphertext, "ciphertext")
    rounds = cipher.final if rounds is None else rounds
    key_at_t = simulate(cipher.key_system, tuple(key), rounds)
    state = backstep(cipher.system, tuple(key_at_t) + tuple(ciphertext), rounds)
    return list(state[cipher.key_length :])


def keeloq_encrypt(key: int, block: int) -> int:
    """KeeLoq on integers: bit ``j`` of the key is ``k(j)``, of the block ``x(j)``."""
    cipher = keeloq()
    return bits_to_int(block_encrypt(cipher, int_to_bits(key, 64), int_to_bits(block, 32)))


def keeloq_decrypt(key: int, block: int) -> int:
    cipher = keeloq()
    return bits_to_int(block_decrypt(cipher, int_to_bits(key, 64), int_to_bits(block, 32)))


def block_stream(cipher: BlockCipher) -> List[Var]:
    """State variables of the block streams."""
    return [v for v in cipher.system.state_vars() if v.stream >= cipher.split]


__all__ = [
    "BIVIUM_DEFINITION",
    "BUILTINS",
    "BlockCipher",
    "CipherError",
    "CipherSpec",
    "KEELOQ_DEFINITION",
    "KeyLoading",
    "StreamCipher",
    "TRIVIUM_DEFINITION",
    "bits_from_hex",
    "bits_to_hex",
    "bits_to_int",
    "block_from_hex",
    "block_to_hex",
    "bivium",
    "block_decrypt",
    "block_encrypt",
    "block_stream",
    "build_builtin",
    "estream_loading",
    "example_2_3",
    "example_closed_form",
    "from_definition",
    "int_to_bits",
    "keeloq",
    "keeloq_decrypt",
    "keeloq_encrypt",
    "keystream_gen",
    "lfsr_combiner",
    "load_state",
    "state_from_hex",
    "state_to_hex",
    "system_fingerprint",
    "trivium",
]
