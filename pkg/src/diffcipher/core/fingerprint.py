from __future__ import annotations

import binascii
from typing import Iterable

from blake3 import blake3


def decode_hex(value: str, *, label: str) -> bytes:
    """Decode a hex string, raising a descriptive error when invalid."""
    text = value.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    if len(text) % 2:
        text = "0" + text
    try:
        return binascii.unhexlify(text)
    except (binascii.Error, ValueError) as exc:
        raise ValueError(f"invalid hex value for {label}") from exc


def chunk_fingerprint(chunks: Iterable[bytes]) -> str:
    """Deterministic hexadecimal fingerprint over length-prefixed chunks."""
    hasher = blake3()
    for chunk in chunks:
        hasher.update(len(chunk).to_bytes(4, "big"))
        hasher.update(chunk)
    return hasher.hexdigest()


def text_fingerprint(*parts: str) -> str:
    return chunk_fingerprint(part.encode("utf-8") for part in parts)


__all__ = ["chunk_fingerprint", "decode_hex", "text_fingerprint"]
