"""Shared radio medium.

``WirelessChannel`` runs a simplified slotted CSMA/CA per node and applies a
binary collision rule at each receiver. ``IdealChannel`` delivers frames over
an explicit adjacency without contention or loss, for protocol tests.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

from .engine import FRAME_RX, Simulator
from .frag import MAC_PAYLOAD
from .metrics import DROP, TX, MetricsLog
from .radio import RadioModel

BROADCAST = b"\xff" * 8
MAC_HEADER_LEN = 25          # MAC header + FCS; 25 + 102 = 127-octet PSDU
PHY_OVERHEAD = 6             # preamble, SFD, PHR
UNIT_BACKOFF_NS = 320_000    # 20 symbols at 16 us
TURNAROUND_NS = 192_000
MIN_BE = 3
MAX_BE = 5
MAX_CSMA_BACKOFFS = 4        # 5 clear-channel attempts in total


@dataclass(frozen=True)
class Frame:
    src: bytes
    dst: bytes
    payload: bytes

    def __post_init__(self):
        if len(self.payload) > MAC_PAYLOAD:
            raise ValueError(f"frame payload exceeds {MAC_PAYLOAD} octets")

    @property
    def size(self) -> int:
        return MAC_HEADER_LEN + len(self.payload)


class Endpoint(Protocol):
    node_id: str
    mac: bytes
    powered: bool
    mac_rng: random.Random

    def on_frame(self, frame: Frame) -> None:
        ...


@dataclass
class _Airing:
    src: int
    start: int
    end: int
    frame: Frame


class _MacState:
    __slots__ = ("queue", "busy", "nb", "be")

    def __init__(self):
        self.queue: deque[Frame] = deque()
        self.busy = False
        self.nb = 0
        self.be = MIN_BE


class BaseChannel:
    def __init__(self, sim: Simulator, metrics: Optional[MetricsLog] = None,
                 radio: Optional[RadioModel] = None):
        self.sim = sim
        self.metrics = metrics
        self.radio = radio or RadioModel()
        self.hosts: list[Endpoint] = []
        self._index: dict[bytes, int] = {}
        self._mac: list[_MacState] = []
        self.listeners: list[Callable[[Frame, int], None]] = []
        self.tx_octets: dict[str, int] = {}
        self.delivered = 0
        self.collisions = 0
        self.csma_drops = 0

    def attach(self, host: Endpoint, *args) -> int:
        if host.mac in self._index:
            raise ValueError("duplicate link address")
        idx = len(self.hosts)
        self.hosts.append(host)
        self._index[host.mac] = idx
        self._mac.append(_MacState())
        return idx

    def send(self, host: Endpoint, frame: Frame):
        idx = self._index[host.mac]
        state = self._mac[idx]
        state.queue.append(frame)
        if not state.busy:
            state.busy = True
            self._start(idx)

    def _start(self, idx: int):
        raise NotImplementedError

    def _aired(self, idx: int, frame: Frame):
        host = self.hosts[idx]
        self.tx_octets[host.node_id] = self.tx_octets.get(host.node_id, 0) + frame.size
        if self.metrics is not None:
            self.metrics.append(self.sim.now_ns, TX, host.node_id, frame.size)
        for listener in self.listeners:
            listener(frame, self.sim.now_ns)

    def _next(self, idx: int):
        state = self._mac[idx]
        state.queue.popleft()
        if state.queue and self.hosts[idx].powered:
            self._start(idx)
        else:
            state.queue.clear()
            state.busy = False

    def _deliver(self, rx: int, frame: Frame, at_ns: int):
        host = self.hosts[rx]
        if frame.dst != BROADCAST and frame.dst != host.mac:
            return
        self.delivered += 1
        self.sim.at(at_ns, host.on_frame, frame, kind=FRAME_RX, node=host.node_id)

    def airtime_ns(self, frame: Frame) -> int:
        return self.radio.airtime_ns(PHY_OVERHEAD + frame.size)


class WirelessChannel(BaseChannel):
    """Geometric channel: log-distance reachability, CSMA/CA, collisions."""

    def __init__(self, sim: Simulator, metrics: Optional[MetricsLog] = None,
                 radio: Optional[RadioModel] = None):
        super().__init__(sim, metrics, radio)
        self.positions: list[tuple[float, float]] = []
        self._neighbors: list[list[tuple[int, int]]] = []   # (index, propagation ns)
        self._audible: list[set[int]] = []
        self._air: list[_Airing] = []
        self._max_air = self.radio.airtime_ns(PHY_OVERHEAD + MAC_HEADER_LEN + MAC_PAYLOAD)

    def attach(self, host: Endpoint, position: tuple[float, float] = (0.0, 0.0)) -> int:
        idx = super().attach(host)
        self.positions.append(position)
        self._neighbors.append([])
        self._audible.append(set())
        for other in range(idx):
            d = math.dist(position, self.positions[other])
            if self.radio.in_range(d):
                prop = self.radio.propagation_ns(d)
                self._neighbors[idx].append((other, prop))
                self._neighbors[other].append((idx, prop))
                self._audible[idx].add(other)
                self._audible[other].add(idx)
        return idx

    def neighbors(self, idx: int) -> list[int]:
        return [i for i, _ in self._neighbors[idx]]

    def _busy_at(self, idx: int, now: int) -> bool:
        audible = self._audible[idx]
        return any(a.end > now and (a.src in audible or a.src == idx) for a in self._air)

    def _start(self, idx: int):
        state = self._mac[idx]
        state.nb = 0
        state.be = MIN_BE
        self._backoff(idx)

    def _backoff(self, idx: int):
        state = self._mac[idx]
        slots = self.hosts[idx].mac_rng.randrange(1 << state.be)
        now = self.sim.now_ns
        boundary = -(-now // UNIT_BACKOFF_NS) * UNIT_BACKOFF_NS
        self.sim.at(boundary + slots * UNIT_BACKOFF_NS, self._cca, idx, node=self.hosts[idx].node_id)

    def _cca(self, idx: int):
        state = self._mac[idx]
        if not self.hosts[idx].powered:
            state.queue.clear()
            state.busy = False
            return
        if self._busy_at(idx, self.sim.now_ns):
            state.nb += 1
            state.be = min(state.be + 1, MAX_BE)
            if state.nb > MAX_CSMA_BACKOFFS:
                self.csma_drops += 1
                if self.metrics is not None:
                    self.metrics.append(self.sim.now_ns, DROP, self.hosts[idx].node_id, "csma")
                self._next(idx)
            else:
                self._backoff(idx)
            return
        self.sim.after(TURNAROUND_NS, self._transmit, idx, node=self.hosts[idx].node_id)

    def _transmit(self, idx: int):
        frame = self._mac[idx].queue[0]
        now = self.sim.now_ns
        airing = _Airing(idx, now, now + self.airtime_ns(frame), frame)
        cutoff = now - 2 * self._max_air
        self._air = [a for a in self._air if a.end > cutoff]
        self._air.append(airing)
        self._aired(idx, frame)
        self.sim.at(airing.end, self._end, airing, node=self.hosts[idx].node_id)

    def _end(self, airing: _Airing):
        overlapping = [a for a in self._air
                       if a is not airing and a.start < airing.end and a.end > airing.start]
        for rx, prop in self._neighbors[airing.src]:
            if not self.hosts[rx].powered:
                continue
            audible = self._audible[rx]
            if any(a.src == rx or a.src in audible for a in overlapping):
                self.collisions += 1
                continue
            self._deliver(rx, airing.frame, airing.end + prop)
        self._next(airing.src)


class IdealChannel(BaseChannel):
    """Lossless delivery over explicit links; frames still take airtime."""

    def __init__(self, sim: Simulator, metrics: Optional[MetricsLog] = None,
                 radio: Optional[RadioModel] = None):
        super().__init__(sim, metrics, radio)
        self._links: list[list[int]] = []

    def attach(self, host: Endpoint, *args) -> int:
        idx = super().attach(host)
        self._links.append([])
        return idx

    def link(self, a: bytes, b: bytes):
        ia, ib = self._index[a], self._index[b]
        if ib not in self._links[ia]:
            self._links[ia].append(ib)
            self._links[ib].append(ia)

    def neighbors(self, idx: int) -> list[int]:
        return list(self._links[idx])

    def _start(self, idx: int):
        frame = self._mac[idx].queue[0]
        self._aired(idx, frame)
        self.sim.after(self.airtime_ns(frame), self._end, idx, frame, node=self.hosts[idx].node_id)

    def _end(self, idx: int, frame: Frame):
        for rx in self._links[idx]:
            if self.hosts[rx].powered:
                self._deliver(rx, frame, self.sim.now_ns)
        self._next(idx)
