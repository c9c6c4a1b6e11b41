"""Event-driven glue between the protocol handlers and a simulated host.

The agents own every timer: discovery re-broadcast, offer collection,
SA/SetNext retries and wakeup jitter.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..ndn import Data, Interest, Name
from . import messages as m
from .im import IslandManager
from .node import Decision, LaserNode, Phase, Role
from .strategy import ClusterStrategy, DiscoveryStrategy


class NodeAgent:
    def __init__(self, host, node: LaserNode,
                 on_onboarded: Optional[Callable[["NodeAgent"], None]] = None):
        self.host = host
        self.sim = host.sim
        self.node = node
        self.config = node.config
        self.on_onboarded = on_onboarded
        self.on_app_interest: Optional[Callable[[Interest], None]] = None
        self.app = host.add_app()
        self.app.on_interest = self._on_interest
        fw = host.forwarder
        fw.register_strategy(Name(), ClusterStrategy(host, node))
        discovery = DiscoveryStrategy(host)
        for prefix in (m.DISCOVER, m.WAKEUP):
            fw.register_strategy(Name([prefix]), discovery)
            self.app.register_prefix(Name([prefix]))
        self.app.register_prefix(Name([node.id]))
        self._discovery_timer = None
        self._offer_timer = None
        self._retry_timer = None
        self._wakeup_timer = None
        self.onboarded_at: Optional[float] = None
        self.discoveries = 0

    def __repr__(self):
        return f"NodeAgent({self.node!r})"

    def power_on(self):
        self.host.power_on()
        if self.node.role is Role.SN and self.node.state.phase is Phase.IDLE:
            self.discover()

    @staticmethod
    def _cancel(timer):
        if timer is not None:
            timer.cancel()

    def _after(self, delay_s: float, fn, *args):
        return self.sim.after_s(delay_s, fn, *args, node=self.node.id)

    # -- phase 1 ---------------------------------------------------------------

    def discover(self):
        st = self.node.state
        if st.phase not in (Phase.IDLE, Phase.DISCOVERING):
            return
        self._cancel(self._wakeup_timer)
        self._wakeup_timer = None
        self._cancel(self._discovery_timer)
        interest = self.node.start_discovery(self.host.rng)
        self.discoveries += 1
        self.app.express(interest, self._on_network_auth)
        if st.best_offer is None:
            self._discovery_timer = self._after(self.config.discovery_retry_s, self.discover)
        else:
            self._discovery_timer = None
            self._cancel(self._offer_timer)
            self._offer_timer = self._after(self.config.offer_wait_s, self._commit)

    def _on_network_auth(self, data: Data):
        before = self.node.state.best_offer
        decision = self.node.handle_network_auth(data)
        if decision is None:
            return
        if decision is Decision.ACCEPT_OFFER:
            self._commit()
        elif self.node.state.best_offer is not before:
            # a new or strictly better path: look for an even shorter one
            self.discover()

    def _commit(self):
        self._cancel(self._offer_timer)
        self._cancel(self._discovery_timer)
        self._offer_timer = self._discovery_timer = None
        if self.node.state.phase is not Phase.DISCOVERING or self.node.state.best_offer is None:
            return
        self.node.commit()
        self._send_sn_auth(0)

    def _restart(self):
        self._cancel(self._retry_timer)
        self._retry_timer = None
        self.node.restart()
        self.discover()

    # -- phase 2 ---------------------------------------------------------------

    def _send_sn_auth(self, attempt: int):
        if self.node.state.phase is not Phase.AUTHENTICATING:
            return
        if attempt > self.config.retry_count:
            self._restart()
            return
        self.app.express(self.node.make_sn_auth(), self._on_rak_delivery)
        self._retry_timer = self._after(self.config.retry_interval_s, self._send_sn_auth, attempt + 1)

    def _on_rak_delivery(self, data: Data):
        if self.node.handle_rak_delivery(data, self.sim.now):
            self._cancel(self._retry_timer)
            self._send_set_next(0)

    # -- phase 3 ---------------------------------------------------------------

    def _send_set_next(self, attempt: int):
        if self.node.state.phase is not Phase.ADVERTISING:
            return
        if attempt > self.config.retry_count:
            self._restart()
            return
        self.app.express(self.node.make_set_next(), self._on_ack)
        self._retry_timer = self._after(self.config.retry_interval_s, self._send_set_next, attempt + 1)

    def _on_ack(self, data: Data):
        if not self.node.handle_ack(data, self.sim.now):
            return
        self._cancel(self._retry_timer)
        self._retry_timer = None
        self.onboarded_at = self.sim.now
        if self.on_onboarded is not None:
            self.on_onboarded(self)
        self.app.express(self.node.make_wakeup(), lambda d: None)

    # -- serving neighbours ------------------------------------------------------

    def _on_interest(self, interest: Interest):
        name = interest.name
        now = self.sim.now
        if name[0] == m.DISCOVER.encode():
            # spread the answers of all neighbours hearing the same broadcast
            jitter = self.host.rng.uniform(0.0, self.config.relay_jitter_s)
            self._after(jitter, self._relay_discovery, interest)
        elif name[0] == m.WAKEUP.encode():
            if self.node.handle_wakeup(interest) and self._wakeup_timer is None:
                jitter = self.host.rng.uniform(0.0, self.config.wakeup_jitter_s)
                self._wakeup_timer = self._after(jitter, self.discover)
        elif len(name) > 1 and name[1] == m.SET_NEXT.encode():
            upstream = self.node.handle_set_next(interest, now)
            if upstream is not None:
                self.app.express(upstream, self._on_upstream_ack)
        elif self.on_app_interest is not None:
            self.on_app_interest(interest)

    def _relay_discovery(self, interest: Interest):
        request = self.node.handle_discovery(interest, self.sim.now)
        if request is not None:
            self.app.express(request, self._on_relayed_reply)

    def _on_relayed_reply(self, data: Data):
        reply = self.node.reverse_map(data)
        if reply is not None:
            self.app.put(reply)

    def _on_upstream_ack(self, data: Data):
        for ack in self.node.relay_ack(data, self.sim.now):
            self.app.put(ack)


class ImAgent:
    def __init__(self, host, manager: IslandManager):
        self.host = host
        self.manager = manager
        self.app = host.add_app()
        self.app.on_interest = self._on_interest
        self.app.register_prefix(Name([manager.id]))
        self.received: list[Interest] = []

    def _on_interest(self, interest: Interest):
        self.received.append(interest)
        data = self.manager.handle(interest, self.host.sim.now)
        if data is not None:
            self.app.put(data)
