"""Name templates and control payloads for the onboarding/routing messages.

All payloads are flat TLV sequences using the same codec as packets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..ndn import Name, tlv
from ..ndn.packet import Data

DISCOVER = "discover"
WAKEUP = "wakeup"
ONBOARD = "onboard"
AUTH = "auth"
SET_NEXT = "set-next"
SET_PREFIX = "set-prefix"
GET_PREFIX = "get-prefix"
RAK_UPDATE = "rak-update"

CONTROL_COMMANDS = {ONBOARD.encode(), AUTH.encode(), SET_NEXT.encode(),
                    SET_PREFIX.encode(), RAK_UPDATE.encode()}

# payload field types
F_ID_SN = 0x80
F_R_SN = 0x81
F_ID_IM = 0x82
F_R_IM = 0x83
F_MAC = 0x84
F_AD = 0x85
F_ID_AN = 0x86
F_STATUS = 0x87
F_EPOCH = 0x88

INF = math.inf


class MessageError(ValueError):
    pass


def encode_ad(ad: float) -> str:
    return "inf" if ad == INF else str(int(ad))


def decode_ad(text: str) -> float:
    if text == "inf":
        return INF
    if not text.isdigit():
        raise MessageError(f"bad anchor distance {text!r}")
    return int(text)


def hexs(b: bytes) -> str:
    return b.hex()


def unhex(text: str, length: int) -> bytes:
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise MessageError(f"bad hex component {text!r}") from exc
    if len(raw) != length:
        raise MessageError(f"expected {length} octets, got {len(raw)}")
    return raw


def is_control_name(name: Name) -> bool:
    """Session-specific traffic that must never be served from a cache."""
    if not len(name):
        return False
    if name[0] in (DISCOVER.encode(), WAKEUP.encode()):
        return True
    return len(name) > 1 and name[1] in CONTROL_COMMANDS


def admit_to_cache(data: Data) -> bool:
    return not is_control_name(data.name)


# -- names -------------------------------------------------------------------

def discover_name(id_sn: str, r_sn: bytes, ad: float) -> Name:
    return Name([DISCOVER, id_sn, hexs(r_sn), encode_ad(ad)])


def parse_discover(name: Name) -> tuple[str, bytes, float]:
    if len(name) != 4 or name[0] != DISCOVER.encode():
        raise MessageError(f"not a discovery name: {name}")
    return name.text(1), unhex(name.text(2), 16), decode_ad(name.text(3))


def onboard_name(id_im: str, id_sn: str, r_sn: bytes, mac: bytes, ad: float, id_an: str) -> Name:
    return Name([id_im, ONBOARD, id_sn, hexs(r_sn), hexs(mac), encode_ad(ad), id_an])


def parse_onboard(name: Name) -> tuple[str, str, bytes, bytes, float, str]:
    if len(name) != 7 or name[1] != ONBOARD.encode():
        raise MessageError(f"not an onboarding request: {name}")
    return (name.text(0), name.text(2), unhex(name.text(3), 16), unhex(name.text(4), 8),
            decode_ad(name.text(5)), name.text(6))


def auth_name(id_im: str, id_sn: str, r_sn: bytes, r_im: bytes, id_an: str) -> Name:
    return Name([id_im, AUTH, id_sn, hexs(r_sn), hexs(r_im), id_an])


def parse_auth(name: Name) -> tuple[str, str, bytes, bytes, str]:
    if len(name) != 6 or name[1] != AUTH.encode():
        raise MessageError(f"not an SN authentication: {name}")
    return name.text(0), name.text(2), unhex(name.text(3), 16), unhex(name.text(4), 16), name.text(5)


def set_next_name(next_id: str, id_sn: str, mac: bytes) -> Name:
    return Name([next_id, SET_NEXT, id_sn, hexs(mac)])


def parse_set_next(name: Name) -> tuple[str, str, bytes]:
    if len(name) != 4 or name[1] != SET_NEXT.encode():
        raise MessageError(f"not a SetNext: {name}")
    return name.text(0), name.text(2), unhex(name.text(3), 8)


def set_prefix_name(id_im: str, id_sn: str, id_an: str) -> Name:
    return Name([id_im, SET_PREFIX, id_sn, id_an])


def parse_set_prefix(name: Name) -> tuple[str, str, str]:
    if len(name) != 4 or name[1] != SET_PREFIX.encode():
        raise MessageError(f"not a SetPrefix: {name}")
    return name.text(0), name.text(2), name.text(3)


def get_prefix_name(id_im: str, id_sn: str) -> Name:
    return Name([id_im, GET_PREFIX, id_sn])


def parse_get_prefix(name: Name) -> tuple[str, str]:
    if len(name) != 3 or name[1] != GET_PREFIX.encode():
        raise MessageError(f"not a prefix query: {name}")
    return name.text(0), name.text(2)


def wakeup_name(id_sn: str) -> Name:
    return Name([WAKEUP, id_sn])


def rak_update_name(member: str, id_an: str, epoch: int) -> Name:
    return Name([member, RAK_UPDATE, id_an, str(epoch)])


def routable_prefix(id_an: str, id_sn: str) -> Name:
    return Name([id_an, id_sn])


# -- key locators --------------------------------------------------------------

def ak_key_name(id_sn: str) -> Name:
    return Name(["keys", id_sn, "AK"])


def tak_key_name(id_sn: str, r_sn: bytes, r_im: bytes) -> Name:
    return Name(["keys", id_sn, hexs(r_sn), hexs(r_im), "TAK"])


def rak_key_name(id_an: str, epoch: int) -> Name:
    return Name(["keys", id_an, "RAK", str(epoch)])


def parse_rak_key_name(name: Name) -> tuple[str, int]:
    if len(name) != 4 or name[0] != b"keys" or name[2] != b"RAK" or not name.text(3).isdigit():
        raise MessageError(f"not a RAK locator: {name}")
    return name.text(1), int(name.text(3))


# -- payloads ------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkAuth:
    id_sn: str
    r_sn: bytes
    id_im: str
    r_im: bytes
    mac_relay: bytes
    ad_relay: float
    id_an: str

    def encode(self) -> bytes:
        return b"".join([
            tlv.encode_tlv(F_ID_SN, self.id_sn.encode()),
            tlv.encode_tlv(F_R_SN, self.r_sn),
            tlv.encode_tlv(F_ID_IM, self.id_im.encode()),
            tlv.encode_tlv(F_R_IM, self.r_im),
            tlv.encode_tlv(F_MAC, self.mac_relay),
            tlv.encode_tlv(F_AD, encode_ad(self.ad_relay).encode()),
            tlv.encode_tlv(F_ID_AN, self.id_an.encode()),
        ])

    @classmethod
    def decode(cls, buf: bytes) -> NetworkAuth:
        try:
            f = tlv.decode_fields(buf)
            na = cls(f[F_ID_SN].decode(), f[F_R_SN], f[F_ID_IM].decode(), f[F_R_IM],
                     f[F_MAC], decode_ad(f[F_AD].decode()), f[F_ID_AN].decode())
        except (KeyError, UnicodeDecodeError, tlv.TlvError) as exc:
            raise MessageError("malformed network authentication payload") from exc
        if len(na.r_sn) != 16 or len(na.r_im) != 16 or len(na.mac_relay) != 8:
            raise MessageError("bad field length in network authentication payload")
        return na

    def request_name(self) -> Name:
        """The onboarding-request Name this reply originally answered."""
        return onboard_name(self.id_im, self.id_sn, self.r_sn, self.mac_relay, self.ad_relay, self.id_an)


def status_payload(status: str) -> bytes:
    return tlv.encode_tlv(F_STATUS, status.encode())


def parse_status(buf: bytes) -> str:
    try:
        return tlv.decode_fields(buf)[F_STATUS].decode()
    except (KeyError, UnicodeDecodeError, tlv.TlvError) as exc:
        raise MessageError("missing status") from exc


def prefix_payload(prefix: Name) -> bytes:
    return status_payload("ok") + prefix.encode()


def parse_prefix_payload(buf: bytes) -> Name | None:
    f = tlv.decode_fields(buf)
    if f.get(F_STATUS) != b"ok":
        return None
    return Name.decode_value(f[tlv.NAME])


def rak_plaintext(rak: bytes, epoch: int) -> bytes:
    return rak + epoch.to_bytes(8, "big")


def parse_rak_plaintext(buf: bytes) -> tuple[bytes, int]:
    if len(buf) != 24:
        raise MessageError("RAK delivery plaintext must be 24 octets")
    return buf[:16], int.from_bytes(buf[16:], "big")
