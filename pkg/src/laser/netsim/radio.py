from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class RadioModel:
    """Log-distance path loss with a hard receive threshold."""

    reference_loss_db: float = 40.0
    path_loss_exponent: float = 3.0
    tx_power_dbm: float = 0.0
    rx_sensitivity_dbm: float = -85.0
    bitrate: int = 250_000

    def rx_power_dbm(self, distance_m: float) -> float:
        # the reference distance is 1 m; closer links see the reference loss
        d = max(distance_m, 1.0)
        return self.tx_power_dbm - self.reference_loss_db - 10.0 * self.path_loss_exponent * math.log10(d)

    def in_range(self, distance_m: float) -> bool:
        return self.rx_power_dbm(distance_m) >= self.rx_sensitivity_dbm

    @property
    def range_m(self) -> float:
        budget = self.tx_power_dbm - self.reference_loss_db - self.rx_sensitivity_dbm
        return 10 ** (budget / (10.0 * self.path_loss_exponent))

    def airtime_ns(self, octets: int) -> int:
        return (octets * 8 * 1_000_000_000) // self.bitrate

    @staticmethod
    def propagation_ns(distance_m: float) -> int:
        return round(distance_m / SPEED_OF_LIGHT * 1e9)
