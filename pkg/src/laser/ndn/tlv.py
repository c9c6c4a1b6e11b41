"""Minimal NDN-style TLV codec.

Types and lengths use the NDN variable-size number encoding: one octet below
253, otherwise a 0xFD/0xFE/0xFF marker followed by a 2/4/8 octet big-endian
integer.
"""

from __future__ import annotations

from typing import Iterator

# packet and field types
INTEREST = 0x05
DATA = 0x06
NAME = 0x07
NAME_COMPONENT = 0x08
NONCE = 0x0A
INTEREST_LIFETIME = 0x0C
CONTENT = 0x15
SIGNATURE_INFO = 0x16
SIGNATURE_VALUE = 0x17
KEY_LOCATOR = 0x1C
INTEREST_SIGNATURE_INFO = 0x2C
INTEREST_SIGNATURE_VALUE = 0x2E


class TlvError(ValueError):
    pass


def encode_varnum(n: int) -> bytes:
    if n < 0:
        raise TlvError("negative TLV number")
    if n < 253:
        return bytes((n,))
    if n <= 0xFFFF:
        return b"\xfd" + n.to_bytes(2, "big")
    if n <= 0xFFFFFFFF:
        return b"\xfe" + n.to_bytes(4, "big")
    return b"\xff" + n.to_bytes(8, "big")


def decode_varnum(buf: bytes, offset: int) -> tuple[int, int]:
    if offset >= len(buf):
        raise TlvError("truncated TLV number")
    first = buf[offset]
    if first < 253:
        return first, offset + 1
    size = {253: 2, 254: 4, 255: 8}[first]
    end = offset + 1 + size
    if end > len(buf):
        raise TlvError("truncated TLV number")
    return int.from_bytes(buf[offset + 1:end], "big"), end


def encode_tlv(tlv_type: int, value: bytes = b"") -> bytes:
    n = len(value)
    if tlv_type < 253 and n < 253:
        return bytes((tlv_type, n)) + value
    return encode_varnum(tlv_type) + encode_varnum(n) + value


def encode_nonneg(n: int) -> bytes:
    """Shortest of 1/2/4/8 octets, as NDN non-negative integers."""
    for size in (1, 2, 4, 8):
        if n < 1 << (8 * size):
            return n.to_bytes(size, "big")
    raise TlvError("integer too large")


def decode_nonneg(value: bytes) -> int:
    if len(value) not in (1, 2, 4, 8):
        raise TlvError("bad non-negative integer length")
    return int.from_bytes(value, "big")


def decode_tlv(buf: bytes, offset: int = 0) -> tuple[int, bytes, int]:
    """Return ``(type, value, next_offset)``."""
    if offset + 1 < len(buf) and buf[offset] < 253 and buf[offset + 1] < 253:
        tlv_type, length, offset = buf[offset], buf[offset + 1], offset + 2
    else:
        tlv_type, offset = decode_varnum(buf, offset)
        length, offset = decode_varnum(buf, offset)
    end = offset + length
    if end > len(buf):
        raise TlvError("TLV value runs past end of buffer")
    return tlv_type, bytes(buf[offset:end]), end


def iter_tlvs(buf: bytes) -> Iterator[tuple[int, bytes]]:
    offset = 0
    while offset < len(buf):
        tlv_type, value, offset = decode_tlv(buf, offset)
        yield tlv_type, value


def decode_fields(buf: bytes) -> dict[int, bytes]:
    """Decode a flat sequence of TLVs; each type may appear once."""
    fields: dict[int, bytes] = {}
    for tlv_type, value in iter_tlvs(buf):
        if tlv_type in fields:
            raise TlvError(f"duplicate TLV type {tlv_type:#x}")
        fields[tlv_type] = value
    return fields
