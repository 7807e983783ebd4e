"""Phonon-number-dependent blue-sideband coupling strengths.

The coupling of the |g, n> <-> |e, n+1> transition is

    Omega_n = Omega_car * exp(-eta^2/2) * eta * sqrt(1/(n+1)) * L1_n(eta^2)
           ~= eta * Omega_car * sqrt(n+1)            (Lamb-Dicke regime)

with L1_n the generalized Laguerre polynomial of order 1. The carrier
coupling Omega_car is treated as independent of n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class CouplingSignError(ValueError):
    """The Laguerre factor changed sign; the area mapping assumes positive coupling."""


@dataclass(frozen=True)
class CouplingParams:
    """Lamb-Dicke parameter, carrier coupling and mode label.

    ``eta`` should stay below roughly 0.3 for the sideband treatment to
    apply; ``omega_car`` is the carrier coupling in angular frequency units.
    """

    eta: float
    omega_car: float
    mode_label: str = ""

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if not (self.omega_car > 0 and math.isfinite(self.omega_car)):
            raise ValueError(f"omega_car must be positive and finite, got {self.omega_car}")

    def to_json_dict(self) -> dict:
        return {"eta": self.eta, "omega_car_hz": self.omega_car, "mode": self.mode_label}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CouplingParams":
        return cls(eta=float(doc["eta"]), omega_car=float(doc["omega_car_hz"]),
                   mode_label=doc.get("mode", ""))


def laguerre_assoc(n: int, a: int, x: float) -> float:
    """Generalized Laguerre polynomial L^a_n(x) by upward three-term recurrence.

    Stable for the small arguments used here (x = eta^2 <= ~0.1); accuracy
    against direct series summation is covered by the test suite.
    """
    if n < 0:
        raise ValueError(f"polynomial degree must be non-negative, got {n}")
    if a < 0:
        raise ValueError(f"polynomial order must be non-negative, got {a}")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + a - x
    for k in range(2, n + 1):
        prev, cur = cur, ((2 * k - 1 + a - x) * cur - (k - 1 + a) * prev) / k
    return cur


def bsb_coupling(n: int, cp: CouplingParams) -> float:
    """Blue-sideband coupling strength for the |g, n> <-> |e, n+1> transition.

    Raises
    ------
    CouplingSignError
        If the Laguerre factor is not strictly positive at this n.
    """
    if n < 0:
        raise ValueError(f"phonon number must be non-negative, got {n}")
    x = cp.eta * cp.eta
    lag = laguerre_assoc(n, 1, x)
    if lag <= 0.0:
        raise CouplingSignError(
            f"L1_{n}({x:.6g}) = {lag:.6g} <= 0: coupling sign change at n={n}"
        )
    return cp.omega_car * math.exp(-x / 2.0) * cp.eta * math.sqrt(1.0 / (n + 1)) * lag


def ld_coupling(n: int, cp: CouplingParams) -> float:
    """Lamb-Dicke approximation eta * Omega_car * sqrt(n+1)."""
    if n < 0:
        raise ValueError(f"phonon number must be non-negative, got {n}")
    return cp.eta * cp.omega_car * math.sqrt(n + 1)


def coupling(n: int, cp: CouplingParams, use_full: bool = True) -> float:
    """Sideband coupling, full Laguerre form or Lamb-Dicke approximation."""
    return bsb_coupling(n, cp) if use_full else ld_coupling(n, cp)


def relative_area(n_actual: int, n_target: int, cp: CouplingParams,
                  use_full: bool = True) -> float:
    """Pulse area (radians) experienced on transition ``n_actual`` when each
    pulse is calibrated to area pi on transition ``n_target``."""
    om_target = coupling(n_target, cp, use_full)
    return math.pi * coupling(n_actual, cp, use_full) / om_target
