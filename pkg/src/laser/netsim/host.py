"""A simulated node: forwarder, ad-hoc wireless faces and local app faces."""

from __future__ import annotations

import random
from typing import Callable, Optional

from ..ndn import APP, WIRELESS, Data, Face, Forwarder, Interest, Name, TlvError, decode_packet
from ..ndn.forwarder import Action
from .channel import BROADCAST, BaseChannel, Frame
from .engine import Simulator
from .frag import Reassembler, fragment

Observer = Callable[["Host", Face, object], None]


class AppFace:
    """Application-side handle on an internal face (express / put / serve)."""

    def __init__(self, host: Host, face: Face):
        self.host = host
        self.face = face
        self.on_interest: Optional[Callable[[Interest], None]] = None
        self._pending: dict[Name, list[list]] = {}

    def register_prefix(self, prefix: Name):
        self.host.forwarder.fib.add(prefix, self.face.id)

    def express(self, interest: Interest, on_data: Callable[[Data], None],
                on_timeout: Optional[Callable[[Interest], None]] = None) -> Interest:
        if interest.nonce is None:
            interest = interest.with_nonce(self.host.rng.getrandbits(32))
        entry = [on_data, on_timeout, None]
        entry[2] = self.host.sim.after_s(interest.lifetime_ms / 1000.0, self._expire,
                                         interest, entry, node=self.host.node_id)
        self._pending.setdefault(interest.name, []).append(entry)
        self.host.inject(self.face.id, interest)
        return interest

    def put(self, data: Data):
        self.host.inject(self.face.id, data)

    def _expire(self, interest: Interest, entry: list):
        waiting = self._pending.get(interest.name)
        if not waiting or entry not in waiting:
            return
        waiting.remove(entry)
        if not waiting:
            del self._pending[interest.name]
        if entry[1] is not None:
            entry[1](interest)

    def _receive(self, packet):
        if isinstance(packet, Interest):
            if self.on_interest is not None:
                self.on_interest(packet)
            return
        for prefix in packet.name.prefixes():
            for on_data, _, timer in self._pending.pop(prefix, ()):
                timer.cancel()
                on_data(packet)


class Host:
    def __init__(self, sim: Simulator, node_id: str, mac: bytes, channel: Optional[BaseChannel],
                 seed: int = 0, cs_capacity: int = 64,
                 admit: Optional[Callable[[Data], bool]] = None,
                 position: tuple[float, float] = (0.0, 0.0)):
        self.sim = sim
        self.node_id = node_id
        self.mac = mac
        self.position = position
        self.powered = False
        self.rng = random.Random(f"{seed}/{node_id}/proto")
        self.mac_rng = random.Random(f"{seed}/{node_id}/mac")
        self.forwarder = Forwarder(lambda: sim.now, cs_capacity=cs_capacity, admit=admit)
        self.broadcast_face = self.forwarder.add_face(WIRELESS)
        self._peer_faces: dict[bytes, Face] = {}
        self._apps: dict[int, AppFace] = {}
        self.reassembler = Reassembler()
        self.observers: list[Observer] = []
        self.decode_errors = 0
        self._msg_id = 0
        self.channel = channel
        if channel is not None:
            channel.attach(self, position)

    def __repr__(self):
        return f"Host({self.node_id})"

    def power_on(self):
        self.powered = True

    def face_for_mac(self, mac: bytes) -> Face:
        face = self._peer_faces.get(mac)
        if face is None:
            face = self.forwarder.add_face(WIRELESS, peer_addr=mac)
            self._peer_faces[mac] = face
        return face

    def add_app(self) -> AppFace:
        face = self.forwarder.add_face(APP)
        app = AppFace(self, face)
        self._apps[face.id] = app
        return app

    def on_frame(self, frame: Frame):
        if not self.powered:
            return
        wire = self.reassembler.accept(frame.src, frame.payload, self.sim.now)
        if wire is None:
            return
        try:
            packet = decode_packet(wire)
        except (TlvError, ValueError):
            self.decode_errors += 1
            return
        self.inject(self.face_for_mac(frame.src).id, packet)

    def inject(self, face_id: int, packet):
        for observer in self.observers:
            observer(self, self.forwarder.faces[face_id], packet)
        if isinstance(packet, Interest):
            actions = self.forwarder.process_interest(face_id, packet)
        else:
            actions = self.forwarder.process_data(face_id, packet)
        self._execute(actions)

    def _execute(self, actions: list[Action]):
        for face_id, packet in actions:
            app = self._apps.get(face_id)
            if app is not None:
                self.sim.after(0, app._receive, packet, node=self.node_id)
                continue
            face = self.forwarder.faces[face_id]
            self.send_wire(face.peer_addr or BROADCAST, packet.encode())

    def send_wire(self, dst: bytes, wire: bytes):
        if self.channel is None or not self.powered:
            return
        self._msg_id = (self._msg_id + 1) & 0xFFFF
        for frag in fragment(wire, self._msg_id):
            self.channel.send(self, Frame(self.mac, dst, frag))
