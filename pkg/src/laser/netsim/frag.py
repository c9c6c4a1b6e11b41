"""Hop-by-hop fragmentation in the style of NDNLP.

Each fragment carries a 6-octet header: message id (2), fragment index (1),
fragment count (1) and total packet length (2).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

HEADER = struct.Struct(">HBBH")
HEADER_LEN = HEADER.size
MAC_PAYLOAD = 102
FRAGMENT_DATA = MAC_PAYLOAD - HEADER_LEN  # 96
REASSEMBLY_TIMEOUT_S = 2.0


def fragment(packet: bytes, msg_id: int, chunk: int = FRAGMENT_DATA) -> list[bytes]:
    if not packet:
        raise ValueError("cannot fragment an empty packet")
    count = -(-len(packet) // chunk)
    if count > 255 or len(packet) > 0xFFFF:
        raise ValueError("packet too large to fragment")
    msg_id &= 0xFFFF
    return [HEADER.pack(msg_id, i, count, len(packet)) + packet[i * chunk:(i + 1) * chunk]
            for i in range(count)]


def parse_header(frag: bytes) -> tuple[int, int, int, int]:
    if len(frag) < HEADER_LEN:
        raise ValueError("fragment shorter than header")
    return HEADER.unpack_from(frag)


def reassemble(frags: list[bytes]) -> bytes:
    """Stateless reassembly of one complete fragment set (any order)."""
    parts: dict[int, bytes] = {}
    count = total = None
    for f in frags:
        _, idx, cnt, length = parse_header(f)
        count, total = cnt, length
        parts[idx] = f[HEADER_LEN:]
    if count is None or len(parts) != count:
        raise ValueError("incomplete fragment set")
    packet = b"".join(parts[i] for i in range(count))
    if len(packet) != total:
        raise ValueError("reassembled length mismatch")
    return packet


@dataclass
class _Partial:
    count: int
    length: int
    deadline: float
    parts: dict[int, bytes] = field(default_factory=dict)


class Reassembler:
    """Per-receiver reassembly buffers keyed by (link source, message id)."""

    def __init__(self, timeout_s: float = REASSEMBLY_TIMEOUT_S):
        self.timeout_s = timeout_s
        self._partials: dict[tuple[bytes, int], _Partial] = {}
        self.expired = 0

    def __len__(self):
        return len(self._partials)

    def expire(self, now: float):
        dead = [k for k, p in self._partials.items() if p.deadline <= now]
        for k in dead:
            del self._partials[k]
        self.expired += len(dead)

    def accept(self, src: bytes, frag: bytes, now: float) -> Optional[bytes]:
        self.expire(now)
        try:
            msg_id, idx, count, length = parse_header(frag)
        except ValueError:
            return None
        if count == 1:
            body = frag[HEADER_LEN:]
            return body if len(body) == length else None
        key = (src, msg_id)
        partial = self._partials.get(key)
        if partial is None or partial.count != count or partial.length != length:
            partial = _Partial(count, length, now + self.timeout_s)
            self._partials[key] = partial
        partial.parts[idx] = frag[HEADER_LEN:]
        if len(partial.parts) < count:
            return None
        del self._partials[key]
        packet = b"".join(partial.parts[i] for i in range(count))
        return packet if len(packet) == length else None
