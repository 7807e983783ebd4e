"""Phonon-number distributions: Fock, thermal and coherent (Poisson) states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAIL_MASS = 1e-8


class TruncationError(ValueError):
    """The requested truncation leaves too much probability in the tail."""


@dataclass(frozen=True)
class PhononDistribution:
    """Probability table over Fock states n = 0..n_max.

    Tables are truncated so the discarded tail is below 1e-8 of the total
    mass, then renormalized.
    """

    kind: str
    parameter: float
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probability table must be a non-empty 1-d array")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "probs", p)

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    def mean(self) -> float:
        return float(np.arange(len(self.probs)) @ self.probs)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.choice(len(self.probs), size=size, p=self.probs)

    @classmethod
    def fock(cls, n: int) -> "PhononDistribution":
        if n < 0:
            raise ValueError("Fock index must be non-negative")
        p = np.zeros(n + 1)
        p[n] = 1.0
        return cls(kind="fock", parameter=float(n), probs=p)

    @classmethod
    def thermal(cls, nbar: float, n_max: int | None = None) -> "PhononDistribution":
        """Thermal (geometric) number distribution with mean nbar."""
        if nbar < 0:
            raise ValueError("mean phonon number must be non-negative")
        if nbar == 0:
            return cls(kind="thermal", parameter=0.0, probs=np.ones(1))
        r = nbar / (1.0 + nbar)
        if n_max is None:
            # geometric tail: r^(n_max+1) < 1e-3 * TAIL_MASS, with margin so the
            # truncated mean stays within 1e-6 of nbar
            n_max = int(np.ceil(np.log(1e-3 * TAIL_MASS) / np.log(r)))
        n = np.arange(n_max + 1)
        p = (1.0 - r) * r ** n
        return cls._truncated("thermal", nbar, p)

    @classmethod
    def poisson_coherent(cls, nbar: float, n_max: int | None = None) -> "PhononDistribution":
        """Poisson number statistics of a coherent state with mean nbar."""
        if nbar < 0:
            raise ValueError("mean phonon number must be non-negative")
        if nbar == 0:
            return cls(kind="poisson_coherent", parameter=0.0, probs=np.ones(1))
        if n_max is None:
            n_max = int(np.ceil(nbar + 12.0 * np.sqrt(nbar) + 20.0))
        p = poisson_pmf(nbar, n_max)
        return cls._truncated("poisson_coherent", nbar, p)

    @classmethod
    def _truncated(cls, kind: str, parameter: float, p: np.ndarray) -> "PhononDistribution":
        tail = 1.0 - p.sum()
        if tail > TAIL_MASS:
            raise TruncationError(
                f"truncated {kind} table leaves {tail:.3g} in the tail (> {TAIL_MASS:g})")
        return cls(kind=kind, parameter=float(parameter), probs=p / p.sum())

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PhononDistribution":
        kind = doc["kind"]
        param = float(doc["parameter"])
        n_max = doc.get("n_max")
        if kind == "fock":
            return cls.fock(int(param))
        if kind == "thermal":
            return cls.thermal(param, n_max)
        if kind == "poisson_coherent":
            return cls.poisson_coherent(param, n_max)
        raise ValueError(f"unknown distribution kind {kind!r}")


def poisson_pmf(lam: float, n_max: int) -> np.ndarray:
    """Poisson probabilities for k = 0..n_max (stable recurrence, no factorials)."""
    p = np.empty(n_max + 1)
    p[0] = np.exp(-lam)
    for k in range(1, n_max + 1):
        p[k] = p[k - 1] * lam / k
    return p
