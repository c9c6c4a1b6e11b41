"""Named-data core: names, packets, tables and the forwarding pipeline."""

from .forwarder import Action, BestRouteStrategy, Forwarder, MulticastStrategy
from .name import Name
from .packet import Data, Interest, Signature, decode_packet
from .tables import APP, WIRELESS, ContentStore, Face, Fib, FibEntry, Pit, PitEntry
from .tlv import TlvError

__all__ = [
    "Action", "BestRouteStrategy", "Forwarder", "MulticastStrategy", "Name", "Data",
    "Interest", "Signature", "decode_packet", "APP", "WIRELESS", "ContentStore", "Face",
    "Fib", "FibEntry", "Pit", "PitEntry", "TlvError",
]
