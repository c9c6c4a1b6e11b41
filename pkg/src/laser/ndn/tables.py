"""PIT, FIB, Content Store and Face records."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .name import Name
from .packet import Data

WIRELESS = "wireless-broadcast"
APP = "internal-app"


@dataclass
class Face:
    id: int
    kind: str
    peer_addr: Optional[bytes] = None

    @property
    def is_wireless(self) -> bool:
        return self.kind == WIRELESS


@dataclass
class PitEntry:
    name: Name
    # face id -> unused; a dict keeps insertion order deterministic
    in_faces: dict[int, None] = field(default_factory=dict)
    expiry: float = 0.0


class Pit:
    def __init__(self):
        self._entries: dict[Name, PitEntry] = {}

    def __len__(self):
        return len(self._entries)

    def __contains__(self, name: Name):
        return name in self._entries

    def get(self, name: Name, now: float) -> Optional[PitEntry]:
        entry = self._entries.get(name)
        if entry is not None and entry.expiry <= now:
            del self._entries[name]
            return None
        return entry

    def insert(self, name: Name, face_id: int, expiry: float) -> PitEntry:
        entry = PitEntry(name, {face_id: None}, expiry)
        self._entries[name] = entry
        return entry

    def matches(self, data_name: Name, now: float) -> list[PitEntry]:
        """Live entries whose name is a prefix of ``data_name``, longest first."""
        found = []
        for prefix in data_name.prefixes():
            entry = self.get(prefix, now)
            if entry is not None:
                found.append(entry)
        return found

    def erase(self, name: Name):
        self._entries.pop(name, None)

    def purge(self, now: float):
        for name in [n for n, e in self._entries.items() if e.expiry <= now]:
            del self._entries[name]

    def __iter__(self) -> Iterator[PitEntry]:
        return iter(self._entries.values())


@dataclass
class FibEntry:
    prefix: Name
    next_faces: list[int]


class Fib:
    def __init__(self):
        self._entries: dict[Name, FibEntry] = {}

    def add(self, prefix: Name, face_id: int) -> FibEntry:
        entry = self._entries.setdefault(prefix, FibEntry(prefix, []))
        if face_id not in entry.next_faces:
            entry.next_faces.append(face_id)
        return entry

    def remove(self, prefix: Name, face_id: Optional[int] = None):
        entry = self._entries.get(prefix)
        if entry is None:
            return
        if face_id is None:
            del self._entries[prefix]
            return
        if face_id in entry.next_faces:
            entry.next_faces.remove(face_id)
        if not entry.next_faces:
            del self._entries[prefix]

    def lookup(self, name: Name) -> Optional[FibEntry]:
        for prefix in name.prefixes():
            entry = self._entries.get(prefix)
            if entry is not None:
                return entry
        return None

    def __iter__(self) -> Iterator[FibEntry]:
        return iter(self._entries.values())

    def __len__(self):
        return len(self._entries)


class ContentStore:
    """Exact-name cache with least-recently-used eviction."""

    def __init__(self, capacity: int = 64):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self._entries: OrderedDict[Name, Data] = OrderedDict()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, name: Name):
        return name in self._entries

    def insert(self, data: Data):
        if self.capacity == 0:
            return
        self._entries[data.name] = data
        self._entries.move_to_end(data.name)
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def lookup(self, name: Name) -> Optional[Data]:
        data = self._entries.get(name)
        if data is not None:
            self._entries.move_to_end(name)
        return data

    def names(self) -> list[Name]:
        """Names from least to most recently used."""
        return list(self._entries)
