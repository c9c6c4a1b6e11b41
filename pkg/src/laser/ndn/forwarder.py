"""Forwarding pipeline: CS -> PIT -> FIB + per-prefix strategy."""

from __future__ import annotations

from collections import Counter, OrderedDict
from typing import Callable, NamedTuple, Optional, Protocol, Union

from .name import Name
from .packet import Data, Interest
from .tables import APP, WIRELESS, ContentStore, Face, Fib, FibEntry, Pit

DEDUP_WINDOW_S = 8.0


class Action(NamedTuple):
    face: int
    packet: Union[Interest, Data]


class Strategy(Protocol):
    def after_receive_interest(self, fw: Forwarder, in_face: Face, interest: Interest,
                               fib_entry: Optional[FibEntry]) -> list[int]:
        ...


class MulticastStrategy:
    """Send to every next hop of the matching FIB entry: wireless faces and local apps."""

    def after_receive_interest(self, fw, in_face, interest, fib_entry):
        if fib_entry is None:
            return []
        return list(fib_entry.next_faces)


class BestRouteStrategy:
    """First FIB next hop of any kind (used for plain app-to-app tests)."""

    def after_receive_interest(self, fw, in_face, interest, fib_entry):
        if fib_entry is None:
            return []
        return [f for f in fib_entry.next_faces if f != in_face.id][:1]


class Forwarder:
    def __init__(self, clock: Callable[[], float], cs_capacity: int = 64,
                 admit: Optional[Callable[[Data], bool]] = None,
                 dedup_window: float = DEDUP_WINDOW_S):
        self.clock = clock
        self.faces: dict[int, Face] = {}
        self.pit = Pit()
        self.fib = Fib()
        self.cs = ContentStore(cs_capacity)
        self.admit = admit or (lambda data: True)
        self.dedup_window = dedup_window
        self.counters: Counter = Counter()
        self._strategies: dict[Name, Strategy] = {Name(): MulticastStrategy()}
        self._seen: OrderedDict[tuple[Name, int], float] = OrderedDict()
        self._next_face = 1

    def add_face(self, kind: str = WIRELESS, peer_addr: Optional[bytes] = None) -> Face:
        face = Face(self._next_face, kind, peer_addr)
        self.faces[face.id] = face
        self._next_face += 1
        return face

    def register_strategy(self, prefix: Name, strategy: Strategy):
        self._strategies[prefix] = strategy

    def strategy_for(self, name: Name) -> Strategy:
        for prefix in name.prefixes():
            strategy = self._strategies.get(prefix)
            if strategy is not None:
                return strategy
        raise AssertionError("root strategy is always registered")

    def _duplicate(self, interest: Interest, now: float) -> bool:
        seen = self._seen
        while seen:
            key, expiry = next(iter(seen.items()))
            if expiry > now:
                break
            seen.popitem(last=False)
        key = (interest.name, interest.nonce)
        if key in seen:
            return True
        seen[key] = now + self.dedup_window
        return False

    def process_interest(self, face_id: int, interest: Interest) -> list[Action]:
        now = self.clock()
        self.counters["interest-in"] += 1
        if interest.nonce is not None and self._duplicate(interest, now):
            self.counters["drop-duplicate"] += 1
            return []
        cached = self.cs.lookup(interest.name)
        if cached is not None:
            self.counters["cs-hit"] += 1
            return [Action(face_id, cached)]
        expiry = now + interest.lifetime_ms / 1000.0
        entry = self.pit.get(interest.name, now)
        if entry is not None:
            entry.in_faces[face_id] = None
            entry.expiry = max(entry.expiry, expiry)
            self.counters["pit-aggregate"] += 1
            return []
        fib_entry = self.fib.lookup(interest.name)
        strategy = self.strategy_for(interest.name)
        out = strategy.after_receive_interest(self, self.faces[face_id], interest, fib_entry)
        out = [f for f in dict.fromkeys(out) if f != face_id]
        if not out:
            self.counters["drop-no-route"] += 1
            return []
        self.pit.insert(interest.name, face_id, expiry)
        self.counters["interest-out"] += len(out)
        return [Action(f, interest) for f in out]

    def process_data(self, face_id: int, data: Data) -> list[Action]:
        now = self.clock()
        self.counters["data-in"] += 1
        entries = self.pit.matches(data.name, now)
        if not entries:
            self.counters["drop-unsolicited"] += 1
            return []
        out: dict[int, None] = {}
        for entry in entries:
            out.update(entry.in_faces)
            self.pit.erase(entry.name)
        out.pop(face_id, None)
        if self.admit(data):
            self.cs.insert(data)
        self.counters["data-out"] += len(out)
        return [Action(f, data) for f in out]

    def app_faces(self) -> list[Face]:
        return [f for f in self.faces.values() if f.kind == APP]
