from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator

NODE = "node"          # (x, y, role)
START = "start"        # ()
TX = "tx"              # (octets,)
ONBOARD = "onboard"    # (parent_id, hops)
DROP = "drop"          # (reason,)
END = "end"            # (t_max_reached,)


@dataclass(frozen=True)
class Record:
    time_ns: int
    kind: str
    node: str
    values: tuple = ()


class MetricsLog:
    """Append-only stream of simulation records."""

    def __init__(self):
        self._records: list[Record] = []

    def append(self, time_ns: int, kind: str, node: str, *values):
        self._records.append(Record(time_ns, kind, node, tuple(values)))

    def __iter__(self) -> Iterator[Record]:
        return iter(self._records)

    def __len__(self):
        return len(self._records)

    def of_kind(self, kind: str) -> list[Record]:
        return [r for r in self._records if r.kind == kind]

    def tx_octets(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for r in self._records:
            if r.kind == TX:
                totals[r.node] = totals.get(r.node, 0) + r.values[0]
        return totals

    def digest(self) -> str:
        h = hashlib.sha256()
        for r in self._records:
            h.update(repr((r.time_ns, r.kind, r.node, r.values)).encode())
        return h.hexdigest()
