"""Exact and Monte-Carlo simulation of the three motional-state detection
protocols: Fock-state confusion matrices, sequential single-shot probing,
and band filtering with triple detection.

A "probe" is one composite pulse set on the blue sideband, calibrated to
area pi on a target transition, followed by binary fluorescence detection.
A dark outcome (no fluorescence) is the positive result and indicates the
electronic state was transferred; in the ideal model a positive probe
leaves the ion excited with one extra phonon, while a negative probe is
non-disruptive.

Noise model conventions:
  - detection_error_dark: probability a genuinely dark outcome reads bright
    (false negative); detection_error_bright: probability a bright outcome
    reads dark (false positive).
  - heating adds Poisson-distributed quanta at ``heating_rate`` over each
    probe's elapsed time (pulses plus detection window).
  - preparation error leaves the prepared state one quantum high.
  - phase jitter draws an independent Gaussian phase offset per pulse
    (Monte-Carlo paths only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingParams, CouplingSignError, coupling, relative_area
from .distributions import PhononDistribution, TruncationError, poisson_pmf
from .profiles import _coupling_values
from .pulses import PhaseSequence, excitation, excitation_profile, excitation_with_phases

HEATING_TAIL = 1e-12


@dataclass(frozen=True)
class NoiseModel:
    detection_error_bright: float = 0.0
    detection_error_dark: float = 0.0
    heating_rate: float = 0.0          # quanta per second
    pulse_duration: float = 0.0        # seconds per pulse in a composite set
    detection_window: float = 0.0      # seconds per fluorescence detection
    phase_jitter_sigma: float = 0.0    # radians per pulse
    preparation_error: float = 0.0

    def __post_init__(self):
        for name in ("detection_error_bright", "detection_error_dark",
                     "preparation_error"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        for name in ("heating_rate", "pulse_duration", "detection_window",
                     "phase_jitter_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls()

    @classmethod
    def from_json_dict(cls, doc: dict) -> "NoiseModel":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown noise fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in doc.items()})

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class ProbeOutcome:
    """Result of one probe: the phonon number probed, the binary outcome and
    the post-measurement state descriptor (true phonon number / excitation)."""

    probe_n: int
    positive: bool
    phonon_after: int
    excited_after: bool


def detection_probability(m: int, n_target: int, seq: PhaseSequence,
                          cp: CouplingParams, use_full: bool = True) -> float:
    """Probability that a probe targeted at ``n_target`` fires when the true
    phonon number is ``m`` (no detection noise)."""
    if m < 0 or n_target < 0:
        raise ValueError("phonon numbers must be non-negative")
    return excitation(seq, relative_area(m, n_target, cp, use_full))


def observed_positive(p_transfer: float, noise: NoiseModel) -> float:
    """Fold binary detection errors into a transfer probability."""
    return (p_transfer * (1.0 - noise.detection_error_dark)
            + (1.0 - p_transfer) * noise.detection_error_bright)


def confusion_matrix(m_range, n_range, seq: PhaseSequence, cp: CouplingParams,
                     noise: NoiseModel | None = None,
                     use_full: bool = True) -> np.ndarray:
    """Probability of a positive outcome for each (prepared m, probed n) pair.

    Rows are prepared states, columns probed states (row-major export order).
    """
    noise = noise or NoiseModel.ideal()
    m_range = list(m_range)
    n_range = list(n_range)
    if not m_range or not n_range:
        raise ValueError("state ranges must be non-empty")
    out = np.empty((len(m_range), len(n_range)))
    for j, n in enumerate(n_range):
        om_ref = coupling(n, cp, use_full)
        areas = np.array([math.pi * coupling(m, cp, use_full) / om_ref
                          for m in m_range])
        out[:, j] = observed_positive_arr(excitation_profile(seq, areas), noise)
    return out


def observed_positive_arr(p: np.ndarray, noise: NoiseModel) -> np.ndarray:
    return (p * (1.0 - noise.detection_error_dark)
            + (1.0 - p) * noise.detection_error_bright)


def _validate_probes(probes):
    probes = list(probes)
    if not probes:
        raise ValueError("need at least one probe")
    targets = [n for n, _ in probes]
    if any(n < 0 for n in targets):
        raise ValueError("probe targets must be non-negative")
    if targets != sorted(targets):
        raise ValueError("probes must be ordered by ascending target")
    return probes


def _transfer_table(seq: PhaseSequence, omega_ref: float, cp: CouplingParams,
                    n_max: int, use_full: bool) -> np.ndarray:
    """Transfer probability for true phonon number n = 0..n_max under pulses
    calibrated to area pi on the reference coupling."""
    om = _coupling_values(n_max, cp, use_full)
    if np.any(om <= 0):
        bad = int(np.flatnonzero(om <= 0)[0])
        raise CouplingSignError(
            f"coupling sign change at n={bad} inside the simulated range")
    return excitation_profile(seq, math.pi * om / omega_ref)


def _poisson_kernel(lam: float) -> np.ndarray:
    if lam == 0.0:
        return np.array([1.0])
    k_max = 1
    while poisson_pmf(lam, k_max)[-1] > HEATING_TAIL or k_max < lam + 3:
        k_max += 1
    pk = poisson_pmf(lam, k_max)
    return pk / pk.sum()


def single_shot_run(dist: PhononDistribution, probes, noise: NoiseModel | None,
                    cp: CouplingParams, rng_seed: int,
                    use_full: bool = True) -> list[ProbeOutcome]:
    """One sequential probing run: probe ascending phonon numbers, stop at the
    first positive outcome. Deterministic under a fixed seed."""
    noise = noise or NoiseModel.ideal()
    probes = _validate_probes(probes)
    rng = np.random.default_rng(rng_seed)

    n = int(dist.sample(rng))
    if noise.preparation_error and rng.random() < noise.preparation_error:
        n += 1
    excited = False
    outcomes: list[ProbeOutcome] = []
    for n_target, seq in probes:
        probe_time = len(seq) * noise.pulse_duration + noise.detection_window
        if noise.heating_rate and probe_time:
            n += int(rng.poisson(noise.heating_rate * probe_time))
        om_ref = coupling(n_target, cp, use_full)
        if excited:
            # a missed positive left the ion excited; the sideband now drives
            # the transition back down
            area = 0.0 if n == 0 else math.pi * coupling(n - 1, cp, use_full) / om_ref
        else:
            area = math.pi * coupling(n, cp, use_full) / om_ref
        if noise.phase_jitter_sigma:
            phases = np.asarray(seq.phases) + rng.normal(
                0.0, noise.phase_jitter_sigma, size=len(seq))
            p = float(excitation_with_phases(phases, np.asarray(area)))
        else:
            p = float(excitation_profile(seq, np.array([area]))[0])
        transferred = rng.random() < p
        if transferred:
            if excited:
                excited, n = False, n - 1
            else:
                excited, n = True, n + 1
        dark = excited
        if dark:
            positive = rng.random() >= noise.detection_error_dark
        else:
            positive = rng.random() < noise.detection_error_bright
        outcomes.append(ProbeOutcome(probe_n=n_target, positive=positive,
                                     phonon_after=n, excited_after=excited))
        if positive:
            break
    return outcomes


def single_shot_exact(dist: PhononDistribution, probes,
                      noise: NoiseModel | None, cp: CouplingParams,
                      use_full: bool = True) -> dict:
    """Exact outcome chain for sequential probing.

    Tracks the joint distribution over (electronic state, phonon number)
    conditioned on all previous outcomes being negative, folding in
    detection errors, preparation error and heating. Phase jitter has no
    closed form here and is rejected.
    """
    noise = noise or NoiseModel.ideal()
    if noise.phase_jitter_sigma:
        raise ValueError("exact chain does not support phase jitter; use Monte Carlo")
    probes = _validate_probes(probes)

    n_probes = len(probes)
    kernels = []
    for n_target, seq in probes:
        probe_time = len(seq) * noise.pulse_duration + noise.detection_window
        kernels.append(_poisson_kernel(noise.heating_rate * probe_time))
    n_span = dist.n_max + 1 + n_probes + sum(len(k) - 1 for k in kernels) + 1

    w_ground = np.zeros(n_span)
    w_ground[:dist.n_max + 1] = dist.probs
    if noise.preparation_error:
        shifted = np.zeros(n_span)
        shifted[1:] = w_ground[:-1]
        w_ground = (1.0 - noise.preparation_error) * w_ground \
            + noise.preparation_error * shifted
    w_excited = np.zeros(n_span)

    eb, ed = noise.detection_error_bright, noise.detection_error_dark
    positives = np.zeros(n_probes)
    reached = np.zeros(n_probes)
    for k, (n_target, seq) in enumerate(probes):
        kern = kernels[k]
        if len(kern) > 1:
            w_ground = np.convolve(w_ground, kern)[:n_span]
            w_excited = np.convolve(w_excited, kern)[:n_span]
        reached[k] = w_ground.sum() + w_excited.sum()
        q = _transfer_table(seq, coupling(n_target, cp, use_full), cp,
                            n_span - 1, use_full)
        # ground population: probe drives n -> excited n+1
        up = w_ground * q
        stay_g = w_ground * (1.0 - q)
        # excited population: probe drives n -> ground n-1
        down = np.zeros(n_span)
        down[:-1] = w_excited[1:] * q[:-1]
        stay_e = w_excited.copy()
        stay_e[1:] *= (1.0 - q[:-1])
        new_excited = np.zeros(n_span)
        new_excited[1:] += up[:-1]
        new_excited += stay_e
        new_ground = stay_g + down
        # dark (= excited) outcomes read positive unless flipped
        p_pos = new_excited.sum() * (1.0 - ed) + new_ground.sum() * eb
        positives[k] = p_pos
        w_excited = new_excited * ed
        w_ground = new_ground * (1.0 - eb)

    conditional = np.divide(positives, reached, out=np.zeros(n_probes),
                            where=reached > 0)
    return {
        "probe_n": [n for n, _ in probes],
        "positive_prob": positives.tolist(),
        "reach_prob": reached.tolist(),
        "conditional_prob": conditional.tolist(),
        "all_negative_prob": float(reached[-1] - positives[-1]),
    }


def single_shot_statistics(dist: PhononDistribution, probes,
                           noise: NoiseModel | None, cp: CouplingParams,
                           n_runs: int, seed: int,
                           use_full: bool = True) -> dict:
    """Aggregate sequential probing over many Monte-Carlo runs.

    Vectorized over runs; reproducible bit-exactly from the seed. Reports
    per-probe flow counts (reached / positive / negative) and conditional
    positive frequencies.
    """
    noise = noise or NoiseModel.ideal()
    probes = _validate_probes(probes)
    if n_runs < 1:
        raise ValueError("need at least one run")
    rng = np.random.default_rng(seed)

    ns = np.asarray(dist.sample(rng, size=n_runs), dtype=np.int64)
    if noise.preparation_error:
        ns += rng.random(n_runs) < noise.preparation_error
    excited = np.zeros(n_runs, dtype=bool)
    active = np.ones(n_runs, dtype=bool)
    stopped_at = np.full(n_runs, -1, dtype=np.int64)

    for k, (n_target, seq) in enumerate(probes):
        probe_time = len(seq) * noise.pulse_duration + noise.detection_window
        if noise.heating_rate and probe_time:
            ns = ns + rng.poisson(noise.heating_rate * probe_time, size=n_runs)
        om_ref = coupling(n_target, cp, use_full)
        q_of_n = _transfer_table(seq, om_ref, cp, int(ns.max()) + 1, use_full)
        # effective transition index: excited ions are driven back down
        idx = np.where(excited, np.maximum(ns - 1, 0), ns)
        if noise.phase_jitter_sigma:
            phases = np.asarray(seq.phases) + rng.normal(
                0.0, noise.phase_jitter_sigma, size=(n_runs, len(seq)))
            areas = math.pi * _coupling_values(int(ns.max()), cp, use_full)[idx] / om_ref
            q = excitation_with_phases(phases, areas)
        else:
            q = q_of_n[idx]
        q = np.where(excited & (ns == 0), 0.0, q)
        transferred = rng.random(n_runs) < q
        dark = np.where(transferred, ~excited, excited)
        flips = rng.random(n_runs)
        positive = np.where(dark, flips >= noise.detection_error_dark,
                            flips < noise.detection_error_bright)
        # state update only matters for active runs
        upd = active & transferred
        ns = np.where(upd & ~excited, ns + 1, np.where(upd & excited, ns - 1, ns))
        excited = np.where(upd, ~excited, excited)
        stopped_at = np.where(active & positive, k, stopped_at)
        active = active & ~positive

    reached = np.array([(stopped_at >= k).sum() + (stopped_at == -1).sum()
                        for k in range(len(probes))], dtype=np.int64)
    positives = np.array([(stopped_at == k).sum() for k in range(len(probes))],
                         dtype=np.int64)
    conditional = np.divide(positives, reached, out=np.zeros(len(probes)),
                            where=reached > 0)
    return {
        "runs": n_runs,
        "seed": seed,
        "probe_n": [n for n, _ in probes],
        "reached": reached.tolist(),
        "positives": positives.tolist(),
        "negatives": (reached - positives).tolist(),
        "conditional_freq": conditional.tolist(),
        "all_negative": int((stopped_at == -1).sum()),
    }


def triple_detection(m: int, band_target: int | None, bsb_seq: PhaseSequence,
                     cp: CouplingParams, noise: NoiseModel | None = None,
                     carrier_seq: PhaseSequence | None = None,
                     omega_ref: float | None = None, single_set: bool = False,
                     use_full: bool = True) -> float:
    """Probability of the dark / dark / bright signature for a true phonon
    number ``m``.

    Stage 1 drives the sideband set (in-band population transfers up and
    reads dark), stage 2 is the carrier depump set that shelves residual
    ground-state population so only genuine transfers stay dark, and stage 3
    drives the sideband set again to bring the population back down, reading
    bright. Out-of-band phonon numbers must leak through the sideband set
    twice, which squares the single-set suppression. ``single_set=True``
    returns the probability after the first dark outcome only.

    The pulse calibration reference is the coupling at ``band_target``
    unless ``omega_ref`` is given explicitly.
    """
    if m < 0:
        raise ValueError("phonon number must be non-negative")
    noise = noise or NoiseModel.ideal()
    if omega_ref is None:
        if band_target is None:
            raise ValueError("need either band_target or omega_ref")
        omega_ref = coupling(band_target, cp, use_full)
    if carrier_seq is None:
        from .data import get_sequence
        carrier_seq = get_sequence("UN3")
    c_carrier = float(excitation_profile(carrier_seq, np.array([math.pi]))[0])
    eb, ed = noise.detection_error_bright, noise.detection_error_dark

    stage_time = lambda seq: len(seq) * noise.pulse_duration + noise.detection_window
    kern_1 = _poisson_kernel(noise.heating_rate * stage_time(bsb_seq))
    kern_2 = _poisson_kernel(noise.heating_rate * stage_time(carrier_seq))
    n_span = m + 8 + 2 * (len(kern_1) - 1) + (len(kern_2) - 1)

    q = _transfer_table(bsb_seq, omega_ref, cp, n_span, use_full)

    w_g = np.zeros(n_span + 1)
    w_g[m] = 1.0
    w_e = np.zeros(n_span + 1)

    def bsb_stage(w_g, w_e):
        up = w_g * q[:len(w_g)]
        stay_g = w_g * (1.0 - q[:len(w_g)])
        down = np.zeros_like(w_g)
        down[:-1] = w_e[1:] * q[:len(w_g) - 1]
        stay_e = w_e.copy()
        stay_e[1:] *= (1.0 - q[:len(w_g) - 1])
        new_e = stay_e.copy()
        new_e[1:] += up[:-1]
        return stay_g + down, new_e

    def require_dark(w_g, w_e):
        return w_g * eb, w_e * (1.0 - ed)

    def heat(w_g, w_e, kern):
        if len(kern) == 1:
            return w_g, w_e
        n = len(w_g)
        return np.convolve(w_g, kern)[:n], np.convolve(w_e, kern)[:n]

    # stage 1: sideband up, require dark
    w_g, w_e = bsb_stage(w_g, w_e)
    w_g, w_e = require_dark(w_g, w_e)
    if single_set:
        return float(w_g.sum() + w_e.sum())
    w_g, w_e = heat(w_g, w_e, kern_1)

    # stage 2: carrier depump of ground population, require dark
    w_e = w_e + w_g * c_carrier
    w_g = w_g * (1.0 - c_carrier)
    w_g, w_e = require_dark(w_g, w_e)
    w_g, w_e = heat(w_g, w_e, kern_2)

    # stage 3: sideband back down, require bright
    w_g, w_e = bsb_stage(w_g, w_e)
    return float(w_g.sum() * (1.0 - eb) + w_e.sum() * ed)


def coherent_scan(nbar_grid, bsb_seq: PhaseSequence, cp: CouplingParams,
                  noise: NoiseModel | None = None,
                  carrier_seq: PhaseSequence | None = None,
                  band_target: int | None = None, omega_ref: float | None = None,
                  amplitude_scale: float = 1.0,
                  use_full: bool = True) -> np.ndarray:
    """Expected triple-detection pass probability versus mean phonon number
    of a coherently excited (Poisson-distributed) motional state.

    ``amplitude_scale`` < 1 models decoherence or drive imperfections that
    lower the measured peak without changing the band shape.
    """
    nbar_grid = np.asarray(list(nbar_grid), dtype=float)
    if np.any(nbar_grid < 0):
        raise ValueError("mean phonon numbers must be non-negative")
    if not (0.0 < amplitude_scale <= 1.0):
        raise ValueError("amplitude scale must lie in (0, 1]")
    nbar_max = float(nbar_grid.max(initial=0.0))
    m_max = int(np.ceil(nbar_max + 12.0 * math.sqrt(max(nbar_max, 1.0)) + 20.0))
    if use_full:
        # truncate before the Laguerre sign change; the per-nbar tail check
        # below rejects scans where that cut discards real probability mass
        om = _coupling_values(m_max + 8, cp, use_full)
        bad = np.flatnonzero(om <= 0)
        if bad.size:
            m_max = min(m_max, int(bad[0]) - 1 - 8)
            if m_max < 1:
                raise TruncationError(
                    "coupling sign change too close to n=0 for this scan")
    try:
        pass_prob = np.array([
            triple_detection(m, band_target, bsb_seq, cp, noise,
                             carrier_seq=carrier_seq, omega_ref=omega_ref,
                             use_full=use_full)
            for m in range(m_max + 1)
        ])
    except CouplingSignError as exc:
        raise TruncationError(
            f"simulated range crosses the coupling sign change: {exc}") from exc
    curve = np.empty(len(nbar_grid))
    for i, nbar in enumerate(nbar_grid):
        if nbar == 0.0:
            curve[i] = amplitude_scale * pass_prob[0]
            continue
        p = poisson_pmf(nbar, m_max)
        tail = 1.0 - p.sum()
        if tail > 1e-6:
            raise TruncationError(
                f"nbar={nbar:g} leaves {tail:.3g} beyond the simulated range")
        curve[i] = amplitude_scale * float(p @ pass_prob) / p.sum()
    return curve
