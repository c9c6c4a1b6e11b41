"""Per-node protocol state and the message handlers run by SNs and ANs.

Handlers are message-in / message-out; timers and I/O live in ``agent``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Optional

from .. import crypto
from ..ndn import Data, Interest, Name
from . import messages as m
from .config import ProtocolConfig
from .keys import RakRing, sign, unseal, verify


class Phase(enum.IntEnum):
    IDLE = 0
    DISCOVERING = 1
    AUTHENTICATING = 2
    ADVERTISING = 3
    ONBOARDED = 4


class Role(str, enum.Enum):
    SN = "SN"
    AN = "AN"


class Decision(enum.Enum):
    ACCEPT_OFFER = "accept-offer"
    KEEP_WAITING = "keep-waiting"


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class NodeIdentity:
    id: str
    mac: bytes
    pin: Optional[crypto.PresharedKey] = None

    def __post_init__(self):
        if not self.id or "/" in self.id:
            raise ValueError(f"bad node id {self.id!r}")
        if len(self.mac) != 8:
            raise ValueError("link addresses are 8 octets")


@dataclass(frozen=True)
class Offer:
    relay_mac: bytes
    relay_id: str
    relay_ad: float
    anchor_id: str
    im_id: str
    r_sn: bytes
    r_im: bytes

    @property
    def ad(self) -> float:
        return self.relay_ad + 1


@dataclass
class OnboardingState:
    phase: Phase = Phase.IDLE
    best_offer: Optional[Offer] = None
    my_ad: float = m.INF
    next_hop_mac: Optional[bytes] = None
    next_hop_id: Optional[str] = None
    anchor_id: Optional[str] = None
    im_id: Optional[str] = None
    nonces: Optional[tuple[bytes, bytes]] = None
    discovery_nonces: dict[bytes, None] = field(default_factory=dict)
    rounds: int = 0

    def snapshot(self):
        return (self.phase, self.best_offer, self.my_ad, self.next_hop_mac, self.next_hop_id,
                self.anchor_id, self.im_id, self.nonces, tuple(self.discovery_nonces), self.rounds)


class DFB:
    """Downstream forwarding base: node ID -> next-hop link address.

    Every entry remembers the SetNext Name that installed it.
    """

    def __init__(self):
        self.entries: dict[str, bytes] = {}
        self.provenance: dict[str, Name] = {}

    def install(self, node_id: str, mac: bytes, via: Name):
        self.entries[node_id] = mac
        self.provenance[node_id] = via

    def lookup(self, node_id: str) -> Optional[bytes]:
        return self.entries.get(node_id)

    def __contains__(self, node_id):
        return node_id in self.entries

    def __len__(self):
        return len(self.entries)

    def snapshot(self):
        return tuple(sorted(self.entries.items()))


class LaserNode:
    def __init__(self, identity: NodeIdentity, role: Role = Role.SN,
                 config: Optional[ProtocolConfig] = None, im_id: Optional[str] = None):
        self.identity = identity
        self.role = role
        self.config = config or ProtocolConfig()
        self.state = OnboardingState()
        self.rak = RakRing(self.config.rak_grace_s)
        self.dfb = DFB()
        self.transient: Optional[crypto.TransientKeys] = None
        self._long_lived: Optional[crypto.LongLivedKeys] = None
        # onboarding-request Name -> discovery Name it answers
        self.relay_pending: dict[Name, Name] = {}
        # upstream SetNext/SetPrefix Name -> downstream SetNext Names awaiting its ACK
        self.ack_pending: dict[Name, list[Name]] = {}
        self.rejected = 0
        if role is Role.AN:
            self.state.phase = Phase.ONBOARDED
            self.state.my_ad = 0
            self.state.anchor_id = identity.id
            self.state.im_id = im_id

    def __repr__(self):
        return f"LaserNode({self.id}, {self.role.value}, {self.state.phase.name})"

    @property
    def id(self) -> str:
        return self.identity.id

    @property
    def mac(self) -> bytes:
        return self.identity.mac

    @property
    def onboarded(self) -> bool:
        return self.state.phase is Phase.ONBOARDED and self.rak.current is not None

    @property
    def long_lived(self) -> crypto.LongLivedKeys:
        if self._long_lived is None:
            if self.identity.pin is None:
                raise ProtocolError(f"{self.id} has no pre-shared key")
            self._long_lived = crypto.derive_long_lived(self.identity.pin, self.id,
                                                        self.config.pbkdf2_iterations)
        return self._long_lived

    def install_rak(self, rak: crypto.RoutingAuthKey, now: float = 0.0) -> bool:
        return self.rak.install(rak, now)

    # -- phase 1: discovery ------------------------------------------------------

    def start_discovery(self, rng: random.Random) -> Interest:
        st = self.state
        if st.phase not in (Phase.IDLE, Phase.DISCOVERING):
            raise ProtocolError(f"cannot discover in phase {st.phase.name}")
        if st.best_offer is not None:
            st.rounds += 1
        r_sn = crypto.new_nonce(rng)
        st.discovery_nonces[r_sn] = None
        st.phase = Phase.DISCOVERING
        ad = st.best_offer.ad if st.best_offer is not None else st.my_ad
        return Interest(m.discover_name(self.id, r_sn, ad), lifetime_ms=self.config.discovery_lifetime_ms)

    def handle_discovery(self, interest: Interest, now: float = 0.0) -> Optional[Interest]:
        """Relay side: answer a neighbour's discovery with an onboarding request."""
        if not self.onboarded or self.state.im_id is None:
            return None
        try:
            id_sn, r_sn, ad_sn = m.parse_discover(interest.name)
        except m.MessageError:
            return None
        if id_sn == self.id or not self.state.my_ad < ad_sn - 1:
            return None
        name = m.onboard_name(self.state.im_id, id_sn, r_sn, self.mac, self.state.my_ad,
                              self.state.anchor_id)
        self.relay_pending[name] = interest.name
        return self.rak.sign(Interest(name, lifetime_ms=self.config.interest_lifetime_ms))

    def reverse_map(self, data: Data) -> Optional[Data]:
        """Re-publish a network authentication under the waiting discovery Name.

        Payload and signature are carried unchanged; the relay appends its own ID
        so the joining node can address its SetNext.
        """
        discovery = self.relay_pending.pop(data.name, None)
        if discovery is None:
            return None
        return Data(discovery.append(self.id), data.content, data.signature)

    def handle_network_auth(self, data: Data) -> Optional[Decision]:
        """Joining side. Returns None when the message is rejected."""
        st = self.state
        if st.phase is not Phase.DISCOVERING:
            return None
        try:
            na = m.NetworkAuth.decode(data.content)
        except m.MessageError:
            self.rejected += 1
            return None
        name = data.name
        if (len(name) != 5 or name[0] != m.DISCOVER.encode() or name.text(1) != self.id
                or na.id_sn != self.id or name.text(2) != na.r_sn.hex()
                or na.r_sn not in st.discovery_nonces):
            self.rejected += 1
            return None
        if not verify(data, self.long_lived.ak, na.request_name().encode() + data.content):
            self.rejected += 1
            return None
        offer = Offer(na.mac_relay, name.text(4), na.ad_relay, na.id_an, na.id_im, na.r_sn, na.r_im)
        if st.best_offer is None or offer.ad < st.best_offer.ad:
            st.best_offer = offer
        if st.best_offer.ad <= 1 or st.rounds >= self.config.offer_rounds:
            return Decision.ACCEPT_OFFER
        return Decision.KEEP_WAITING

    def commit(self):
        st = self.state
        offer = st.best_offer
        if st.phase is not Phase.DISCOVERING or offer is None:
            raise ProtocolError("no offer to commit to")
        st.next_hop_mac = offer.relay_mac
        st.next_hop_id = offer.relay_id
        st.anchor_id = offer.anchor_id
        st.im_id = offer.im_id
        st.my_ad = offer.ad
        st.nonces = (offer.r_sn, offer.r_im)
        st.discovery_nonces.clear()
        st.phase = Phase.AUTHENTICATING
        self.transient = crypto.derive_transient(self.long_lived.kdk, offer.r_sn, offer.r_im,
                                                 self.config.pbkdf2_iterations)

    def restart(self):
        """Abandon the current attempt and go back to discovery."""
        self.state = OnboardingState(phase=Phase.DISCOVERING)
        self.transient = None

    # -- phase 2: SN authentication ------------------------------------------------

    def make_sn_auth(self) -> Interest:
        st = self.state
        if st.phase is not Phase.AUTHENTICATING or self.transient is None:
            raise ProtocolError("not authenticating")
        r_sn, r_im = st.nonces
        name = m.auth_name(st.im_id, self.id, r_sn, r_im, st.anchor_id)
        return sign(Interest(name, lifetime_ms=self.config.interest_lifetime_ms),
                    self.transient.tak, m.tak_key_name(self.id, r_sn, r_im))

    def handle_rak_delivery(self, data: Data, now: float = 0.0) -> bool:
        st = self.state
        if st.phase is not Phase.AUTHENTICATING or self.transient is None:
            return False
        r_sn, r_im = st.nonces
        if data.name != m.auth_name(st.im_id, self.id, r_sn, r_im, st.anchor_id):
            return False
        try:
            rak, epoch = m.parse_rak_plaintext(unseal(self.transient.tek, self.transient.tak, data))
        except (crypto.AuthenticationError, m.MessageError):
            self.rejected += 1
            return False
        self.rak = RakRing(self.config.rak_grace_s)
        self.rak.install(crypto.RoutingAuthKey(rak, st.anchor_id, epoch), now)
        st.phase = Phase.ADVERTISING
        return True

    # -- phase 3: path advertisement -----------------------------------------------

    def make_set_next(self) -> Interest:
        st = self.state
        if st.phase is not Phase.ADVERTISING:
            raise ProtocolError("not advertising")
        name = m.set_next_name(st.next_hop_id, self.id, self.mac)
        return self.rak.sign(Interest(name, lifetime_ms=self.config.interest_lifetime_ms))

    def handle_set_next(self, interest: Interest, now: float = 0.0) -> Optional[Interest]:
        """Install the downstream route and build the next upstream notification."""
        if not self.onboarded:
            return None
        try:
            dest, id_sn, mac = m.parse_set_next(interest.name)
        except m.MessageError:
            return None
        if dest != self.id or not self.rak.verify(interest, now, self.state.anchor_id):
            self.rejected += 1
            return None
        self.dfb.install(id_sn, mac, interest.name)
        if self.role is Role.AN:
            name = m.set_prefix_name(self.state.im_id, id_sn, self.id)
        else:
            name = m.set_next_name(self.state.next_hop_id, id_sn, self.mac)
        waiting = self.ack_pending.setdefault(name, [])
        if interest.name not in waiting:
            waiting.append(interest.name)
        return self.rak.sign(Interest(name, lifetime_ms=self.config.interest_lifetime_ms))

    def relay_ack(self, data: Data, now: float = 0.0) -> list[Data]:
        waiting = self.ack_pending.get(data.name)
        if waiting is None:
            return []
        if not self.rak.verify(data, now, self.state.anchor_id):
            self.rejected += 1
            return []
        del self.ack_pending[data.name]
        return [self.rak.sign(Data(name, m.status_payload("ack"))) for name in waiting]

    def handle_ack(self, data: Data, now: float = 0.0) -> bool:
        st = self.state
        if st.phase is not Phase.ADVERTISING:
            return False
        if data.name != m.set_next_name(st.next_hop_id, self.id, self.mac):
            return False
        if not self.rak.verify(data, now, st.anchor_id):
            self.rejected += 1
            return False
        st.phase = Phase.ONBOARDED
        return True

    def make_wakeup(self) -> Interest:
        return Interest(m.wakeup_name(self.id), lifetime_ms=self.config.wakeup_lifetime_ms)

    def handle_wakeup(self, interest: Interest) -> bool:
        """True when the wakeup should trigger a (new) discovery attempt."""
        if len(interest.name) < 1 or interest.name[0] != m.WAKEUP.encode():
            return False
        st = self.state
        if self.role is Role.AN:
            return False
        return st.phase is Phase.IDLE or (st.phase is Phase.DISCOVERING and st.best_offer is None)

    # -- maintenance ---------------------------------------------------------------

    def apply_rak_update(self, data: Data, now: float) -> bool:
        if self.transient is None or not self.onboarded:
            return False
        try:
            rak, epoch = m.parse_rak_plaintext(unseal(self.transient.tek, self.transient.tak, data))
        except (crypto.AuthenticationError, m.MessageError):
            self.rejected += 1
            return False
        return self.rak.install(crypto.RoutingAuthKey(rak, self.state.anchor_id, epoch), now)

    def route(self, dest_id: str) -> Optional[bytes]:
        """Link address for a destination ID: DFB first, else toward the anchor."""
        mac = self.dfb.lookup(dest_id)
        if mac is not None:
            return mac
        if self.role is Role.AN:
            return None
        return self.state.next_hop_mac

    def snapshot(self):
        return (self.state.snapshot(), self.dfb.snapshot(), self.rak.snapshot(), self.transient)
