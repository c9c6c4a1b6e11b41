"""Secure onboarding and hierarchical routing for an NDN IoT island."""

from .agent import ImAgent, NodeAgent
from .config import ProtocolConfig
from .im import IslandManager
from .node import DFB, Decision, LaserNode, NodeIdentity, Offer, Phase, ProtocolError, Role

__all__ = [
    "ImAgent", "NodeAgent", "ProtocolConfig", "IslandManager", "DFB", "Decision",
    "LaserNode", "NodeIdentity", "Offer", "Phase", "ProtocolError", "Role",
]
