"""Secure onboarding and hierarchical routing for NDN IoT islands, plus a
deterministic wireless simulator to evaluate it."""

__version__ = "0.1.0"
