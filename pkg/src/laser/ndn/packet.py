from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from . import tlv
from .name import Name

DEFAULT_LIFETIME_MS = 4000


@dataclass(frozen=True)
class Signature:
    key_locator: Name
    value: bytes

    def encode(self, info_type: int, value_type: int) -> bytes:
        info = tlv.encode_tlv(info_type, tlv.encode_tlv(tlv.KEY_LOCATOR, self.key_locator.encode()))
        return info + tlv.encode_tlv(value_type, self.value)

    @staticmethod
    def decode(info: bytes, value: bytes) -> Signature:
        locator = tlv.decode_fields(info).get(tlv.KEY_LOCATOR)
        if locator is None:
            raise tlv.TlvError("signature without KeyLocator")
        return Signature(Name.decode(locator), value)


@dataclass(frozen=True)
class Interest:
    name: Name
    nonce: Optional[int] = None
    lifetime_ms: int = DEFAULT_LIFETIME_MS
    signature: Optional[Signature] = None

    def __post_init__(self):
        if self.lifetime_ms <= 0:
            raise ValueError("Interest lifetime must be positive")

    def signed_portion(self) -> bytes:
        return self.name.encode()

    def with_nonce(self, nonce: int) -> Interest:
        return replace(self, nonce=nonce)

    def with_signature(self, signature: Signature) -> Interest:
        return replace(self, signature=signature)

    def encode(self) -> bytes:
        if self.nonce is None:
            raise ValueError("Interest has no nonce")
        body = (self.name.encode()
                + tlv.encode_tlv(tlv.NONCE, self.nonce.to_bytes(4, "big"))
                + tlv.encode_tlv(tlv.INTEREST_LIFETIME, tlv.encode_nonneg(self.lifetime_ms)))
        if self.signature is not None:
            body += self.signature.encode(tlv.INTEREST_SIGNATURE_INFO, tlv.INTEREST_SIGNATURE_VALUE)
        return tlv.encode_tlv(tlv.INTEREST, body)

    @classmethod
    def decode_value(cls, value: bytes) -> Interest:
        f = tlv.decode_fields(value)
        if tlv.NAME not in f or tlv.NONCE not in f:
            raise tlv.TlvError("Interest missing Name or Nonce")
        if len(f[tlv.NONCE]) != 4:
            raise tlv.TlvError("Interest nonce must be 4 octets")
        sig = None
        if tlv.INTEREST_SIGNATURE_INFO in f or tlv.INTEREST_SIGNATURE_VALUE in f:
            if tlv.INTEREST_SIGNATURE_INFO not in f or tlv.INTEREST_SIGNATURE_VALUE not in f:
                raise tlv.TlvError("signed Interest needs both KeyLocator and tag")
            sig = Signature.decode(f[tlv.INTEREST_SIGNATURE_INFO], f[tlv.INTEREST_SIGNATURE_VALUE])
        lifetime = tlv.decode_nonneg(f[tlv.INTEREST_LIFETIME]) if tlv.INTEREST_LIFETIME in f else DEFAULT_LIFETIME_MS
        return cls(Name.decode_value(f[tlv.NAME]), int.from_bytes(f[tlv.NONCE], "big"), lifetime, sig)


@dataclass(frozen=True)
class Data:
    name: Name
    content: bytes = b""
    signature: Optional[Signature] = None

    def signed_portion(self) -> bytes:
        return self.name.encode() + self.content

    def with_signature(self, signature: Signature) -> Data:
        return replace(self, signature=signature)

    def encode(self) -> bytes:
        # network-layer signatures are mandatory
        if self.signature is None:
            raise ValueError("Data must be signed before encoding")
        body = (self.name.encode() + tlv.encode_tlv(tlv.CONTENT, self.content)
                + self.signature.encode(tlv.SIGNATURE_INFO, tlv.SIGNATURE_VALUE))
        return tlv.encode_tlv(tlv.DATA, body)

    @classmethod
    def decode_value(cls, value: bytes) -> Data:
        f = tlv.decode_fields(value)
        if tlv.NAME not in f:
            raise tlv.TlvError("Data missing Name")
        if tlv.SIGNATURE_INFO not in f or tlv.SIGNATURE_VALUE not in f:
            raise tlv.TlvError("Data must carry a signature")
        sig = Signature.decode(f[tlv.SIGNATURE_INFO], f[tlv.SIGNATURE_VALUE])
        return cls(Name.decode_value(f[tlv.NAME]), f.get(tlv.CONTENT, b""), sig)


Packet = Union[Interest, Data]


def decode_packet(wire: bytes) -> Packet:
    tlv_type, value, end = tlv.decode_tlv(wire)
    if end != len(wire):
        raise tlv.TlvError("trailing octets after packet")
    if tlv_type == tlv.INTEREST:
        return Interest.decode_value(value)
    if tlv_type == tlv.DATA:
        return Data.decode_value(value)
    raise tlv.TlvError(f"unknown packet type {tlv_type:#x}")
