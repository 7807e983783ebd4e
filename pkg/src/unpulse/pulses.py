"""Resonant two-level pulses and composite-sequence propagators.

A resonant rectangular pulse of area A and phase phi acts on the state
vector (c_ground, c_excited) as the SU(2) rotation

    U(A, phi) = [[cos(A/2),                -i e^{-i phi} sin(A/2)],
                 [-i e^{i phi} sin(A/2),    cos(A/2)            ]]

so that u10 is the ground -> excited amplitude and |u10|^2 = sin^2(A/2).
A composite sequence with phases (phi_1, ..., phi_N) is the ordered
product U_N ... U_2 U_1 of equal-area pulses.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseSequence:
    """Ordered pulse phases (radians) defining a composite sequence."""

    phases: tuple[float, ...]
    name: str | None = None

    def __post_init__(self):
        if len(self.phases) == 0:
            raise ValueError("phase sequence must be non-empty")
        phases = tuple(float(p) for p in self.phases)
        if not all(math.isfinite(p) for p in phases):
            raise ValueError("all phases must be finite")
        object.__setattr__(self, "phases", phases)

    def __len__(self) -> int:
        return len(self.phases)

    @property
    def phases_pi(self) -> tuple[float, ...]:
        """Phases in units of pi."""
        return tuple(p / math.pi for p in self.phases)

    @classmethod
    def from_pi(cls, phases_pi, name: str | None = None) -> "PhaseSequence":
        """Build from phases given in units of pi (the tabulated notation)."""
        return cls(tuple(float(p) * math.pi for p in phases_pi), name=name)

    def canonical(self) -> "PhaseSequence":
        """Return an equivalent sequence with phases reduced mod 2*pi into [0, 2*pi)."""
        return PhaseSequence(tuple(p % TWO_PI for p in self.phases), name=self.name)

    def to_json_dict(self) -> dict:
        return {"name": self.name, "phases_pi": list(self.phases_pi)}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PhaseSequence":
        return cls.from_pi(doc["phases_pi"], name=doc.get("name"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "PhaseSequence":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def rotation(area: float, phase: float) -> np.ndarray:
    """Propagator of a single resonant pulse.

    Parameters
    ----------
    area : float
        Pulse area in radians (time-integrated Rabi coupling).
    phase : float
        Pulse phase in radians.

    Returns
    -------
    np.ndarray
        2x2 complex unitary acting on (c_ground, c_excited).
    """
    if not (math.isfinite(area) and math.isfinite(phase)):
        raise ValueError("area and phase must be finite")
    c = math.cos(area / 2.0)
    s = math.sin(area / 2.0)
    e = np.exp(1j * phase)
    return np.array([[c, -1j * s / e], [-1j * s * e, c]])


def compose(seq: PhaseSequence, area: float) -> np.ndarray:
    """Propagator of a composite sequence of equal-area pulses.

    Returns the ordered product U_N ... U_2 U_1 with U_k = rotation(area, phi_k).
    """
    u = np.eye(2, dtype=complex)
    for phase in seq.phases:
        u = rotation(area, phase) @ u
    return u


def excitation(seq: PhaseSequence, area: float) -> float:
    """Ground -> excited transfer probability |u10|^2 of the composed sequence."""
    areas = excitation_profile(seq, np.asarray([area], dtype=float))
    return float(areas[0])


def excitation_profile(seq: PhaseSequence, areas: np.ndarray) -> np.ndarray:
    """Vectorized excitation probability over an array of pulse areas.

    Carries the four propagator entries as arrays over the area grid;
    one 2x2 product per pulse.
    """
    areas = np.asarray(areas, dtype=float)
    c = np.cos(areas / 2.0)
    s = np.sin(areas / 2.0)
    u00 = np.ones_like(areas, dtype=complex)
    u01 = np.zeros_like(areas, dtype=complex)
    u10 = np.zeros_like(areas, dtype=complex)
    u11 = np.ones_like(areas, dtype=complex)
    for phase in seq.phases:
        p01 = -1j * np.exp(-1j * phase) * s
        p10 = -1j * np.exp(1j * phase) * s
        u00, u01, u10, u11 = (
            c * u00 + p01 * u10,
            c * u01 + p01 * u11,
            p10 * u00 + c * u10,
            p10 * u01 + c * u11,
        )
    p = np.abs(u10) ** 2
    # clip double-precision overshoot, |u10|^2 is a probability
    return np.clip(p, 0.0, 1.0)


def excitation_with_phases(phases: np.ndarray, areas) -> np.ndarray:
    """Excitation for per-run phase arrays, broadcast against areas.

    ``phases`` has the pulse index on the last axis; leading axes (e.g. a
    Monte-Carlo run axis, for per-pulse phase jitter) broadcast with ``areas``.
    """
    phases = np.asarray(phases, dtype=float)
    areas = np.asarray(areas, dtype=float)
    shape = np.broadcast_shapes(phases.shape[:-1], areas.shape)
    c = np.broadcast_to(np.cos(areas / 2.0), shape)
    s = np.broadcast_to(np.sin(areas / 2.0), shape)
    u00 = np.ones(shape, dtype=complex)
    u01 = np.zeros(shape, dtype=complex)
    u10 = np.zeros(shape, dtype=complex)
    u11 = np.ones(shape, dtype=complex)
    for k in range(phases.shape[-1]):
        ph = np.broadcast_to(phases[..., k], shape)
        p01 = -1j * np.exp(-1j * ph) * s
        p10 = -1j * np.exp(1j * ph) * s
        u00, u01, u10, u11 = (
            c * u00 + p01 * u10,
            c * u01 + p01 * u11,
            p10 * u00 + c * u10,
            p10 * u01 + c * u11,
        )
    return np.clip(np.abs(u10) ** 2, 0.0, 1.0)


def unitarity_defect(u: np.ndarray) -> float:
    """Max entrywise deviation of U^dag U from the identity."""
    return float(np.abs(u.conj().T @ u - np.eye(2)).max())
