from __future__ import annotations

from dataclasses import dataclass

from ..crypto import DEFAULT_ITERATIONS


@dataclass(frozen=True)
class ProtocolConfig:
    pbkdf2_iterations: int = DEFAULT_ITERATIONS
    interest_lifetime_s: float = 4.0
    discovery_lifetime_s: float = 120.0
    wakeup_lifetime_s: float = 1.0
    discovery_retry_s: float = 30.0
    offer_rounds: int = 2
    offer_wait_s: float = 5.0
    retry_interval_s: float = 5.0
    retry_count: int = 3
    wakeup_jitter_s: float = 2.0
    relay_jitter_s: float = 2.0
    rak_grace_s: float = 10.0
    pending_timeout_s: float = 300.0
    park_timeout_s: float = 300.0
    session_lifetime_s: float = 86400.0
    cs_capacity: int = 64

    def __post_init__(self):
        if self.pbkdf2_iterations < 1:
            raise ValueError("pbkdf2_iterations must be >= 1")
        if self.offer_rounds < 0 or self.retry_count < 0:
            raise ValueError("round and retry counts must be >= 0")
        if self.wakeup_jitter_s < 0 or self.relay_jitter_s < 0:
            raise ValueError("jitter must be >= 0")
        for name in ("interest_lifetime_s", "discovery_lifetime_s", "wakeup_lifetime_s",
                     "discovery_retry_s", "offer_wait_s", "retry_interval_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def interest_lifetime_ms(self) -> int:
        return round(self.interest_lifetime_s * 1000)

    @property
    def discovery_lifetime_ms(self) -> int:
        return round(self.discovery_lifetime_s * 1000)

    @property
    def wakeup_lifetime_ms(self) -> int:
        return round(self.wakeup_lifetime_s * 1000)
