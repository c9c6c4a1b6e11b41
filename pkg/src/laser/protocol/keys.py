"""Packet signing and the per-cluster routing key ring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, TypeVar, Union

from .. import crypto
from ..ndn import Data, Interest, Name, Signature
from .messages import MessageError, parse_rak_key_name, rak_key_name

P = TypeVar("P", Interest, Data)


def sign(packet: P, key: bytes, key_name: Name) -> P:
    tag = crypto.hmac_sign(key, packet.signed_portion())
    return packet.with_signature(Signature(key_name, tag))


def verify(packet: Union[Interest, Data], key: bytes, signed_portion: Optional[bytes] = None) -> bool:
    if packet.signature is None:
        return False
    portion = packet.signed_portion() if signed_portion is None else signed_portion
    return crypto.hmac_verify(key, portion, packet.signature.value)


def seal(tek: bytes, tak: bytes, tak_name: Name, name: Name, plaintext: bytes, iv: bytes) -> Data:
    """Encrypt-then-sign: content is IV || AES-CBC(TEK, plaintext), tagged under TAK."""
    content = iv + crypto.channel_encrypt(tek, plaintext, iv)
    return sign(Data(name, content), tak, tak_name)


def unseal(tek: bytes, tak: bytes, data: Data) -> bytes:
    if not verify(data, tak):
        raise crypto.AuthenticationError("bad tag")
    iv, body = data.content[:crypto.IV_LEN], data.content[crypto.IV_LEN:]
    if len(iv) != crypto.IV_LEN:
        raise crypto.AuthenticationError("truncated secure-channel payload")
    return crypto.channel_decrypt(tek, body, iv)


@dataclass
class RakRing:
    """Current routing key plus the previous epoch during its grace window."""

    grace_s: float = 10.0
    current: Optional[crypto.RoutingAuthKey] = None
    previous: Optional[crypto.RoutingAuthKey] = None
    previous_until: float = 0.0

    def install(self, rak: crypto.RoutingAuthKey, now: float) -> bool:
        if self.current is not None:
            if rak.anchor_id != self.current.anchor_id or rak.epoch <= self.current.epoch:
                return False
            self.previous, self.previous_until = self.current, now + self.grace_s
        self.current = rak
        return True

    def key_for(self, anchor_id: str, epoch: int, now: float) -> Optional[bytes]:
        cur = self.current
        if cur is None or cur.anchor_id != anchor_id:
            return None
        if epoch == cur.epoch:
            return cur.rak
        prev = self.previous
        if prev is not None and epoch == prev.epoch and now <= self.previous_until:
            return prev.rak
        return None

    def sign(self, packet: P) -> P:
        if self.current is None:
            raise RuntimeError("no routing key installed")
        return sign(packet, self.current.rak, rak_key_name(self.current.anchor_id, self.current.epoch))

    def verify(self, packet: Union[Interest, Data], now: float, anchor_id: Optional[str] = None) -> bool:
        if packet.signature is None or self.current is None:
            return False
        try:
            locator_anchor, epoch = parse_rak_key_name(packet.signature.key_locator)
        except MessageError:
            return False
        if anchor_id is not None and locator_anchor != anchor_id:
            return False
        key = self.key_for(locator_anchor, epoch, now)
        return key is not None and verify(packet, key)

    def snapshot(self):
        return (self.current, self.previous, self.previous_until)
