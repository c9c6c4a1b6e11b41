"""Island manager: authenticates joining nodes, hands out cluster routing keys,
records anchor registrations and answers prefix queries."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .. import crypto
from ..ndn import Data, Interest, Name
from . import messages as m
from .config import ProtocolConfig
from .keys import RakRing, seal, sign, verify


@dataclass(frozen=True)
class PendingOffer:
    relay_mac: bytes
    relay_ad: float
    anchor_id: str
    created: float


@dataclass
class Session:
    r_sn: bytes
    r_im: bytes
    keys: crypto.TransientKeys
    anchor_id: str
    established: float
    expires: float


@dataclass
class NodeRecord:
    pin: crypto.PresharedKey
    long_lived: Optional[crypto.LongLivedKeys] = None
    pending: dict[tuple[bytes, bytes], PendingOffer] = field(default_factory=dict)
    session: Optional[Session] = None
    prefix: Optional[Name] = None
    needs_reonboarding: bool = False


@dataclass
class ImRegistry:
    nodes: dict[str, NodeRecord] = field(default_factory=dict)
    raks: dict[str, RakRing] = field(default_factory=dict)

    def snapshot(self):
        nodes = tuple(
            (nid, tuple(rec.pending), None if rec.session is None else
             (rec.session.r_sn, rec.session.r_im, rec.session.anchor_id), rec.prefix,
             rec.needs_reonboarding)
            for nid, rec in sorted(self.nodes.items()))
        raks = tuple((an, ring.snapshot()) for an, ring in sorted(self.raks.items()))
        return nodes, raks


class IslandManager:
    def __init__(self, im_id: str, rng: random.Random, config: Optional[ProtocolConfig] = None):
        self.id = im_id
        self.rng = rng
        self.config = config or ProtocolConfig()
        self.registry = ImRegistry()
        self.parked: list[tuple[Interest, float]] = []
        self.counters: Counter = Counter()

    # -- provisioning -------------------------------------------------------------

    def add_anchor(self, anchor_id: str, now: float = 0.0) -> crypto.RoutingAuthKey:
        ring = RakRing(self.config.rak_grace_s)
        ring.install(crypto.RoutingAuthKey(crypto.new_key(self.rng), anchor_id, 0), now)
        self.registry.raks[anchor_id] = ring
        return ring.current

    def provision(self, node_id: str, pin: crypto.PresharedKey, now: float = 0.0) -> list[Data]:
        """Register a PIN; answers any onboarding requests parked for that node."""
        self.registry.nodes[node_id] = NodeRecord(pin)
        parked, self.parked = self.parked, []
        answers = []
        for interest, deadline in parked:
            if deadline <= now:
                continue
            if m.parse_onboard(interest.name)[1] == node_id:
                data = self.handle_onboarding(interest, now)
                if data is not None:
                    answers.append(data)
            else:
                self.parked.append((interest, deadline))
        return answers

    def _keys(self, node_id: str) -> crypto.LongLivedKeys:
        rec = self.registry.nodes[node_id]
        if rec.long_lived is None:
            rec.long_lived = crypto.derive_long_lived(rec.pin, node_id, self.config.pbkdf2_iterations)
        return rec.long_lived

    def _ring_verify(self, packet, anchor_id: str, now: float) -> bool:
        ring = self.registry.raks.get(anchor_id)
        return ring is not None and ring.verify(packet, now, anchor_id)

    # -- handlers -----------------------------------------------------------------

    def handle(self, interest: Interest, now: float) -> Optional[Data]:
        if len(interest.name) < 2 or interest.name.text(0) != self.id:
            return None
        command = interest.name.text(1)
        handler = {
            m.ONBOARD: self.handle_onboarding,
            m.AUTH: self.handle_sn_auth,
            m.SET_PREFIX: self.handle_set_prefix,
            m.GET_PREFIX: self.get_prefix,
        }.get(command)
        if handler is None:
            self.counters["unknown-command"] += 1
            return None
        return handler(interest, now)

    def handle_onboarding(self, interest: Interest, now: float) -> Optional[Data]:
        try:
            id_im, id_sn, r_sn, mac, ad, id_an = m.parse_onboard(interest.name)
        except m.MessageError:
            self.counters["malformed"] += 1
            return None
        if id_im != self.id or not self._ring_verify(interest, id_an, now):
            self.counters["bad-rak"] += 1
            return None
        rec = self.registry.nodes.get(id_sn)
        if rec is None:
            self.parked.append((interest, now + self.config.park_timeout_s))
            self.counters["parked"] += 1
            return None
        ak = self._keys(id_sn).ak
        horizon = now - self.config.pending_timeout_s
        for key in [k for k, p in rec.pending.items() if p.created <= horizon]:
            del rec.pending[key]
        r_im = crypto.new_nonce(self.rng)
        rec.pending[(r_sn, r_im)] = PendingOffer(mac, ad, id_an, now)
        na = m.NetworkAuth(id_sn, r_sn, self.id, r_im, mac, ad, id_an)
        self.counters["network-auth"] += 1
        return sign(Data(interest.name, na.encode()), ak, m.ak_key_name(id_sn))

    def handle_sn_auth(self, interest: Interest, now: float) -> Optional[Data]:
        try:
            id_im, id_sn, r_sn, r_im, id_an = m.parse_auth(interest.name)
        except m.MessageError:
            self.counters["malformed"] += 1
            return None
        rec = self.registry.nodes.get(id_sn)
        ring = self.registry.raks.get(id_an)
        if id_im != self.id or rec is None or ring is None:
            self.counters["sa-reject"] += 1
            return None
        live = rec.session
        pending = rec.pending.get((r_sn, r_im))
        if live is not None and (live.r_sn, live.r_im) == (r_sn, r_im) and live.expires > now:
            keys = live.keys
        elif pending is not None and pending.anchor_id == id_an:
            keys = crypto.derive_transient(self._keys(id_sn).kdk, r_sn, r_im,
                                           self.config.pbkdf2_iterations)
        else:
            self.counters["sa-replay"] += 1
            return None
        if (interest.signature is None
                or interest.signature.key_locator != m.tak_key_name(id_sn, r_sn, r_im)
                or not verify(interest, keys.tak)):
            self.counters["sa-bad-tag"] += 1
            return None
        if live is None or live.keys is not keys:
            rec.session = Session(r_sn, r_im, keys, id_an, now, now + self.config.session_lifetime_s)
            rec.pending.clear()
            rec.needs_reonboarding = False
        rak = ring.current
        self.counters["rak-delivery"] += 1
        return seal(keys.tek, keys.tak, m.tak_key_name(id_sn, r_sn, r_im), interest.name,
                    m.rak_plaintext(rak.rak, rak.epoch), crypto.new_nonce(self.rng))

    def handle_set_prefix(self, interest: Interest, now: float) -> Optional[Data]:
        try:
            id_im, id_sn, id_an = m.parse_set_prefix(interest.name)
        except m.MessageError:
            self.counters["malformed"] += 1
            return None
        if id_im != self.id or not self._ring_verify(interest, id_an, now):
            self.counters["bad-rak"] += 1
            return None
        rec = self.registry.nodes.get(id_sn)
        if rec is None or rec.session is None or rec.session.anchor_id != id_an:
            self.counters["set-prefix-reject"] += 1
            return None
        rec.prefix = m.routable_prefix(id_an, id_sn)
        self.counters["set-prefix"] += 1
        return self.registry.raks[id_an].sign(Data(interest.name, m.status_payload("ack")))

    def get_prefix(self, interest: Interest, now: float) -> Optional[Data]:
        """Answer ``/<im>/get-prefix/<id>``; the query must be RAK-signed."""
        try:
            id_im, id_sn = m.parse_get_prefix(interest.name)
            anchor, _ = m.parse_rak_key_name(interest.signature.key_locator)
        except (m.MessageError, AttributeError):
            self.counters["malformed"] += 1
            return None
        if id_im != self.id or not self._ring_verify(interest, anchor, now):
            self.counters["bad-rak"] += 1
            return None
        rec = self.registry.nodes.get(id_sn)
        if rec is not None and rec.prefix is not None:
            content = m.prefix_payload(rec.prefix)
        else:
            content = m.status_payload("unknown")
        return self.registry.raks[anchor].sign(Data(interest.name, content))

    # -- maintenance ----------------------------------------------------------------

    def refresh_rak(self, anchor_id: str, now: float) -> list[Data]:
        """Roll the cluster key and seal it to every member with a live session."""
        ring = self.registry.raks[anchor_id]
        new = crypto.RoutingAuthKey(crypto.new_key(self.rng), anchor_id, ring.current.epoch + 1)
        ring.install(new, now)
        pushes = []
        for node_id, rec in self.registry.nodes.items():
            sess = rec.session
            if sess is None or sess.anchor_id != anchor_id:
                continue
            if sess.expires <= now:
                rec.session = None
                rec.prefix = None
                rec.needs_reonboarding = True
                continue
            pushes.append(seal(sess.keys.tek, sess.keys.tak,
                               m.tak_key_name(node_id, sess.r_sn, sess.r_im),
                               m.rak_update_name(node_id, anchor_id, new.epoch),
                               m.rak_plaintext(new.rak, new.epoch), crypto.new_nonce(self.rng)))
        self.counters["rak-refresh"] += 1
        return pushes
