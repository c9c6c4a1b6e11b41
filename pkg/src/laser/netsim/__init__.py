"""Deterministic discrete-event model of a low-power wireless island."""

from .channel import BROADCAST, Frame, IdealChannel, WirelessChannel
from .engine import Simulator
from .host import AppFace, Host
from .metrics import MetricsLog, Record
from .network import Network, NodeSpec, run
from .radio import RadioModel

__all__ = [
    "BROADCAST", "Frame", "IdealChannel", "WirelessChannel", "Simulator", "AppFace", "Host",
    "MetricsLog", "Record", "Network", "NodeSpec", "run", "RadioModel",
]
