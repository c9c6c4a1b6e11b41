"""Assemble an island (hosts, channel, agents) and run it to convergence."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .. import crypto
from ..protocol import messages as m
from ..protocol.agent import ImAgent, NodeAgent
from ..protocol.config import ProtocolConfig
from ..protocol.im import IslandManager
from ..protocol.node import LaserNode, NodeIdentity, Role
from .channel import BaseChannel, IdealChannel, WirelessChannel
from .engine import APP_START, NS_PER_S, Simulator, seconds
from .host import Host
from .metrics import END, NODE, ONBOARD, START, MetricsLog
from .radio import RadioModel

DEFAULT_T_MAX_S = 1200.0


@dataclass(frozen=True)
class NodeSpec:
    id: str
    x: float = 0.0
    y: float = 0.0
    start_s: float = 0.0
    role: Role = Role.SN

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


def link_address(index: int) -> bytes:
    return (index + 1).to_bytes(8, "big")


@dataclass
class Network:
    """One island: a single anchor hosting the island manager plus SNs."""

    nodes: Sequence[NodeSpec]
    seed: int = 0
    im_id: str = "im"
    radio: RadioModel = field(default_factory=RadioModel)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    ideal_links: Optional[Sequence[tuple[str, str]]] = None
    trace: bool = False

    def __post_init__(self):
        anchors = [n for n in self.nodes if n.role is Role.AN]
        if len(anchors) != 1:
            raise ValueError("exactly one anchor per island")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids) or self.im_id in ids:
            raise ValueError("node ids must be unique and distinct from the manager id")
        self.sim = Simulator(trace=self.trace)
        self.metrics = MetricsLog()
        if self.ideal_links is None:
            self.channel: BaseChannel = WirelessChannel(self.sim, self.metrics, self.radio)
        else:
            self.channel = IdealChannel(self.sim, self.metrics, self.radio)
        pin_rng = random.Random(f"{self.seed}/pins")
        im_rng = random.Random(f"{self.seed}/{self.im_id}/im")
        self.manager = IslandManager(self.im_id, im_rng, self.protocol)
        self.hosts: dict[str, Host] = {}
        self.agents: dict[str, NodeAgent] = {}
        self.specs = {n.id: n for n in self.nodes}
        for index, spec in enumerate(self.nodes):
            host = Host(self.sim, spec.id, link_address(index), self.channel, seed=self.seed,
                        cs_capacity=self.protocol.cs_capacity, admit=m.admit_to_cache,
                        position=spec.position)
            if spec.role is Role.AN:
                identity = NodeIdentity(spec.id, host.mac)
                node = LaserNode(identity, Role.AN, self.protocol, im_id=self.im_id)
                node.install_rak(self.manager.add_anchor(spec.id))
                self.im_agent = ImAgent(host, self.manager)
                self.anchor = spec.id
            else:
                pin = crypto.PresharedKey(crypto.new_key(pin_rng))
                identity = NodeIdentity(spec.id, host.mac, pin)
                node = LaserNode(identity, Role.SN, self.protocol)
                self.manager.provision(spec.id, pin)
            self.hosts[spec.id] = host
            self.agents[spec.id] = NodeAgent(host, node, self._onboarded)
            self.metrics.append(0, NODE, spec.id, spec.x, spec.y, spec.role.value)
        if self.ideal_links is not None:
            for a, b in self.ideal_links:
                self.channel.link(self.hosts[a].mac, self.hosts[b].mac)
        self._waiting = sum(1 for n in self.nodes if n.role is Role.SN)
        for spec in self.nodes:
            start = 0 if spec.role is Role.AN else seconds(spec.start_s)
            self.sim.at(start, self._power_on, spec.id, kind=APP_START, node=spec.id)

    def _power_on(self, node_id: str):
        self.metrics.append(self.sim.now_ns, START, node_id)
        self.agents[node_id].power_on()

    def _onboarded(self, agent: NodeAgent):
        st = agent.node.state
        self.metrics.append(self.sim.now_ns, ONBOARD, agent.node.id, st.next_hop_id, int(st.my_ad))
        self._waiting -= 1

    @property
    def converged(self) -> bool:
        return self._waiting <= 0

    def run(self, t_max_s: float = DEFAULT_T_MAX_S) -> MetricsLog:
        end = self.sim.run(until_ns=seconds(t_max_s), stop=lambda: self._waiting <= 0)
        self.metrics.append(end, END, "", not self.converged)
        return self.metrics

    def onboarded(self) -> list[str]:
        return [i for i, a in self.agents.items() if a.node.onboarded and a.node.role is Role.SN]

    def parents(self) -> dict[str, str]:
        return {i: a.node.state.next_hop_id for i, a in self.agents.items()
                if a.node.role is Role.SN and a.node.onboarded}

    @property
    def now_s(self) -> float:
        return self.sim.now_ns / NS_PER_S


def run(nodes: Sequence[NodeSpec], seed: int = 0, t_max_s: float = DEFAULT_T_MAX_S,
        **kwargs) -> MetricsLog:
    return Network(nodes, seed, **kwargs).run(t_max_s)
