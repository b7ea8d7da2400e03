"""Synthetic multi-modal motor signal generator.

Produces windowed vibration / stator-current / acoustic recordings of an
induction motor under configurable speed and load profiles, with eight
machine-health classes expressed as additive spectral signatures on top of a
shared healthy baseline. Signals are deterministic functions of
(condition, fault, seed).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

VIB_RATE = 5120
CUR_RATE = 5120
ACO_RATE = 44100
SEGMENT_S = 0.2
VIB_LEN = round(VIB_RATE * SEGMENT_S)  # 1024
CUR_LEN = round(CUR_RATE * SEGMENT_S)  # 1024
ACO_LEN = round(ACO_RATE * SEGMENT_S)  # 8820
VIB_CHANNELS = 3
CUR_CHANNELS = 3
ACO_CHANNELS = 6

LINE_FREQ_HZ = 50.0
WARMUP_S = 10.0
REF_RPM = 1800.0

MODALITIES = ("vibration", "current", "acoustic")

MODALITY_RATES = {"vibration": VIB_RATE, "current": CUR_RATE, "acoustic": ACO_RATE}
MODALITY_LENS = {"vibration": VIB_LEN, "current": CUR_LEN, "acoustic": ACO_LEN}
MODALITY_CHANNELS = {
    "vibration": VIB_CHANNELS,
    "current": CUR_CHANNELS,
    "acoustic": ACO_CHANNELS,
}

# Per-modality noise level (dB of clean-channel RMS over noise RMS).
DEFAULT_SNR_DB = {"vibration": 10.0, "current": 20.0, "acoustic": 5.0}

# Slow sinusoidal amplitude modulation depth applied to every component.
AMP_JITTER_DEPTH = 0.1

# Vibration/acoustic energy grows with speed; current energy follows load.
SPEED_GAIN_EXP = 0.5

_DEFAULT_GAINS = {
    "vibration": (1.0, 0.85, 0.6),
    "current": (1.0, 1.0, 1.0),
    "acoustic": (1.0, 0.9, 0.8, 0.95, 0.85, 0.75),
}

# Mechanical / acoustic frequency response per channel: a flat floor plus a few
# Gaussian resonance bumps, (center_hz, width_hz, height). A component's gain
# follows the response at its instantaneous frequency, so relative signature
# amplitudes and the channel energy balance change with speed while the set of
# excited orders stays the same. Current is electrically flat on purpose.
_RESPONSE_FLOOR = {"vibration": 0.75, "current": 1.0, "acoustic": 0.5}
_RESPONSE_PEAKS = {
    "vibration": (
        ((32.0, 14.0, 0.55), (180.0, 90.0, 0.35)),
        ((26.0, 12.0, 0.60), (140.0, 70.0, 0.30)),
        ((40.0, 16.0, 0.50), (260.0, 120.0, 0.35)),
    ),
    "current": ((), (), ()),
    "acoustic": (
        ((250.0, 120.0, 0.80),),
        ((420.0, 160.0, 0.70),),
        ((700.0, 220.0, 0.60),),
        ((320.0, 140.0, 0.70),),
        ((550.0, 180.0, 0.65),),
        ((850.0, 260.0, 0.70),),
    ),
}


def _channel_response(modality: str, channel: int, freq_hz: np.ndarray) -> np.ndarray:
    """Gain of one channel's transfer function at |freq_hz|."""
    f = np.abs(freq_hz)
    gain = np.full(f.shape, _RESPONSE_FLOOR[modality])
    for center, width, height in _RESPONSE_PEAKS[modality][channel]:
        gain = gain + height * np.exp(-(((f - center) / width) ** 2))
    return gain


# Each operating condition is treated as a separate recording session with its
# own sensor mounting. A session permutes a fixed channel-sensitivity pattern
# (which sensor sits on the stiff mount vs the flexible bracket changes between
# installs, the sensitivity values themselves do not) and shifts the overall
# level a little (coupling/torque-of-the-stud). Neither effect is a smooth
# function of speed. The pattern has unit mean square, so levels stay
# calibrated up to the session factor. Current sensors are calibrated exactly.
_SESSION_PATTERN = {
    "vibration": (1.38, 1.00, 0.72),
    "current": None,
    "acoustic": (1.52, 1.24, 1.06, 0.94, 0.81, 0.66),
}
_SESSION_LEVEL_RANGE = {"vibration": (0.78, 1.28), "current": None, "acoustic": (0.72, 1.38)}
_SESSION_SALT = b"motor pad"


def _session_gains(modality: str, condition_id: str, n_channels: int) -> np.ndarray:
    pattern = _SESSION_PATTERN[modality]
    if pattern is None:
        return np.ones(n_channels)
    ss = np.random.SeedSequence(
        (zlib.crc32(_SESSION_SALT), zlib.crc32(condition_id.encode()), zlib.crc32(modality.encode()))
    )
    rng = np.random.default_rng(ss)
    base = np.asarray(pattern, dtype=np.float64)
    g = rng.permutation(base) / np.sqrt(np.mean(base**2))
    lo, hi = _SESSION_LEVEL_RANGE[modality]
    return g * rng.uniform(lo, hi)

# Three-phase current: fundamental offsets of -2*pi/3 per phase.
_CURRENT_PHASE_OFFSETS = np.array([0.0, -2.0 * np.pi / 3.0, 2.0 * np.pi / 3.0])


@dataclass(frozen=True)
class Profile:
    """Piecewise-linear profile of time: constant, or a lo->hi->lo triangle wave.

    ``rate`` is the absolute slope in units per second; 0 means constant at
    ``lo`` (which must then equal ``hi``).
    """

    lo: float
    hi: float
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("profile rate must be >= 0")
        if self.rate == 0 and self.lo != self.hi:
            raise ValueError("constant profile requires lo == hi")
        if self.rate > 0 and not self.lo < self.hi:
            raise ValueError("ramp profile requires lo < hi")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.rate == 0:
            return np.full(t.shape, float(self.lo))
        span = self.hi - self.lo
        pos = np.mod(t * self.rate, 2.0 * span)
        return self.lo + np.where(pos <= span, pos, 2.0 * span - pos)


@dataclass(frozen=True)
class ConditionSpec:
    """One operating condition: speed profile (RPM), load profile (%), duration."""

    id: str
    speed_profile: Profile
    load_profile: Profile
    duration_s: float


def make_condition(
    speed_rpm_range: tuple[float, float],
    speed_rate: float,
    load_range: tuple[float, float],
    load_rate: float,
    duration_s: float,
    id: str | None = None,
) -> ConditionSpec:
    """Build a validated operating condition.

    Raises ValueError for non-positive speeds, loads outside [0, 100], a
    non-positive duration, or range/rate combinations that contradict each
    other (rate 0 with lo != hi, rate > 0 with lo >= hi).
    """
    s_lo, s_hi = map(float, speed_rpm_range)
    l_lo, l_hi = map(float, load_range)
    if s_lo <= 0 or s_hi <= 0:
        raise ValueError("speed must be positive RPM")
    if not (0.0 <= l_lo <= 100.0 and 0.0 <= l_hi <= 100.0):
        raise ValueError("load must lie in [0, 100] percent")
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    speed = Profile(s_lo, s_hi, float(speed_rate))
    load = Profile(l_lo, l_hi, float(load_rate))
    if id is None:
        id = f"s{s_lo:g}-{s_hi:g}r{speed_rate:g}_l{l_lo:g}-{l_hi:g}r{load_rate:g}"
    return ConditionSpec(id=id, speed_profile=speed, load_profile=load, duration_s=float(duration_s))


def standard_conditions(duration_s: float = 20.0) -> dict[str, ConditionSpec]:
    """The built-in catalog of nine operating conditions C1..C9.

    C1-C4: constant 1200/1800/2400/2700 RPM at 100% load.
    C5-C7: 1200-2400 RPM triangle sweeps at 150/300/600 RPM/s, 100% load.
    C8-C9: constant 1800 RPM, 0-100% load triangles at 20/2 %/s.
    """
    c = {}
    for cid, rpm in zip(("C1", "C2", "C3", "C4"), (1200, 1800, 2400, 2700)):
        c[cid] = make_condition((rpm, rpm), 0.0, (100.0, 100.0), 0.0, duration_s, id=cid)
    for cid, rate in zip(("C5", "C6", "C7"), (150.0, 300.0, 600.0)):
        c[cid] = make_condition((1200.0, 2400.0), rate, (100.0, 100.0), 0.0, duration_s, id=cid)
    for cid, rate in zip(("C8", "C9"), (20.0, 2.0)):
        c[cid] = make_condition((1800.0, 1800.0), 0.0, (0.0, 100.0), rate, duration_s, id=cid)
    return c


@dataclass(frozen=True)
class SpectralComponent:
    """One additive narrowband component of a signature.

    kind:
      * ``rotor``    tone at order * f_r(t)
      * ``line``     tone at order * 50 Hz
      * ``sideband`` pair at carrier*50 Hz +/- order * f_r(t)

    ``channel_gains`` overrides the modality's default per-channel gains.
    """

    kind: str
    order: float
    amp: float
    carrier: float = 1.0
    channel_gains: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("rotor", "line", "sideband"):
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.amp < 0:
            raise ValueError("component amplitude must be >= 0")


@dataclass(frozen=True)
class FaultClass:
    """A machine-health class: integer label, short name, per-modality signature.

    ``severity`` scales the mechanical emission (vibration and acoustic) of the
    whole machine; stator current is supply-driven and unaffected. Noise tracks
    the clean signal, so severity moves absolute level, never SNR.
    """

    label: int
    name: str
    signature: Mapping[str, tuple[SpectralComponent, ...]] = field(default_factory=dict)
    severity: float = 1.0

    def __post_init__(self):
        if self.severity <= 0:
            raise ValueError("severity must be positive")

    def components(self, modality: str) -> tuple[SpectralComponent, ...]:
        return tuple(self.signature.get(modality, ()))


def _sig(vibration=(), current=(), acoustic=()):
    return {"vibration": tuple(vibration), "current": tuple(current), "acoustic": tuple(acoustic)}


_R = SpectralComponent  # terse alias for the table below

# Healthy baseline shared by every class: rotor fundamental dominates vibration,
# mains fundamental dominates current, mid-order content dominates the mics.
BASE_SIGNATURE = _sig(
    vibration=(_R("rotor", 1.0, 1.0), _R("rotor", 2.0, 0.30), _R("line", 2.0, 0.25)),
    current=(_R("line", 1.0, 1.0), _R("line", 3.0, 0.03)),
    acoustic=(_R("line", 4.0, 0.40), _R("rotor", 12.0, 0.30), _R("rotor", 24.0, 0.20)),
)

# Fault signatures are additive on top of the baseline. Healthy (N) adds nothing.
# Besides speed-locked orders, every fault rings one structural mode: a fixed
# tone (vibration 0.7-2.05 kHz, acoustic 1.6-6.5 kHz) that stays put when the
# shaft speed changes. The ring amplitudes sit well below the rotor fundamental.
# Severity captures how hard the defect shakes the machine overall.
DEFAULT_FAULT_CLASSES: tuple[FaultClass, ...] = (
    FaultClass(1, "N", _sig(), severity=0.70),
    FaultClass(
        2,
        "BRB",
        _sig(
            vibration=(_R("sideband", 1.0, 0.40), _R("line", 14.0, 0.30)),
            current=(_R("sideband", 1.0, 0.08),),
            acoustic=(_R("sideband", 2.0, 0.35, carrier=4.0), _R("line", 32.0, 0.45)),
        ),
        severity=1.10,
    ),
    FaultClass(
        3,
        "SWF",
        _sig(
            vibration=(_R("line", 2.0, 0.55),),
            current=(_R("line", 3.0, 0.10), _R("line", 1.0, 0.06, channel_gains=(1.0, 0.0, 0.0))),
            acoustic=(_R("line", 6.0, 0.45),),
        ),
        severity=0.85,
    ),
    FaultClass(
        4,
        "PMR",
        _sig(
            vibration=(_R("rotor", 2.0, 0.55), _R("rotor", 6.0, 0.35), _R("line", 18.0, 0.30)),
            current=(_R("sideband", 2.0, 0.03),),
            acoustic=(_R("rotor", 18.0, 0.30), _R("line", 56.0, 0.45)),
        ),
        severity=1.25,
    ),
    FaultClass(
        5,
        "BF",
        _sig(
            vibration=(_R("rotor", 6.8, 0.60), _R("rotor", 11.3, 0.50), _R("line", 23.0, 0.30)),
            current=(_R("sideband", 6.8, 0.02),),
            acoustic=(_R("rotor", 27.5, 0.35), _R("line", 70.0, 0.45)),
        ),
        severity=1.45,
    ),
    FaultClass(
        6,
        "RB",
        _sig(
            vibration=(_R("rotor", 1.0, 0.45), _R("rotor", 3.0, 0.50), _R("line", 28.0, 0.30)),
            current=(_R("sideband", 1.0, 0.02),),
            acoustic=(_R("rotor", 9.0, 0.25), _R("line", 88.0, 0.45)),
        ),
        severity=0.95,
    ),
    FaultClass(
        7,
        "AMR",
        _sig(
            vibration=(
                _R("rotor", 2.0, 0.40, channel_gains=(0.5, 0.6, 2.0)),
                _R("rotor", 4.0, 0.45),
                _R("line", 34.0, 0.30),
            ),
            current=(_R("sideband", 2.0, 0.025),),
            acoustic=(_R("rotor", 15.0, 0.25), _R("line", 108.0, 0.45)),
        ),
        severity=1.00,
    ),
    FaultClass(
        8,
        "RU",
        _sig(
            vibration=(_R("rotor", 1.0, 0.85), _R("line", 41.0, 0.30)),
            current=(_R("sideband", 1.0, 0.035),),
            acoustic=(_R("rotor", 12.0, 0.40), _R("line", 130.0, 0.45)),
        ),
        severity=1.30,
    ),
)

_BY_LABEL = {f.label: f for f in DEFAULT_FAULT_CLASSES}
_BY_NAME = {f.name: f for f in DEFAULT_FAULT_CLASSES}


def fault_class(key: int | str) -> FaultClass:
    """Look up a built-in fault class by integer label (1..8) or short name."""
    table = _BY_LABEL if isinstance(key, int) else _BY_NAME
    if key not in table:
        raise KeyError(f"unknown fault class {key!r}")
    return table[key]


@dataclass(frozen=True)
class RawMultiModalSample:
    """One 0.2 s window of synchronized raw signals plus its provenance."""

    vibration: np.ndarray  # [1024, 3] float32, 5120 Hz accelerometers
    current: np.ndarray  # [1024, 3] float32, 5120 Hz stator phases
    acoustic: np.ndarray  # [8820, 6] float32, 44100 Hz microphones
    label: int  # 1..8
    condition_id: str

    def __post_init__(self):
        if self.vibration.shape != (VIB_LEN, VIB_CHANNELS):
            raise ValueError(f"vibration shape {self.vibration.shape}")
        if self.current.shape != (CUR_LEN, CUR_CHANNELS):
            raise ValueError(f"current shape {self.current.shape}")
        if self.acoustic.shape != (ACO_LEN, ACO_CHANNELS):
            raise ValueError(f"acoustic shape {self.acoustic.shape}")


def _stream(condition_id: str, label: int, seed: int) -> np.random.Generator:
    # Independent, reproducible stream per (condition, class, seed).
    ss = np.random.SeedSequence((int(seed), zlib.crc32(condition_id.encode()), int(label)))
    return np.random.default_rng(ss)


def _component_track(
    comp: SpectralComponent,
    modality: str,
    t: np.ndarray,
    phase_rotor: np.ndarray,
    f_rotor: np.ndarray,
    rng: np.random.Generator,
    n_channels: int,
) -> np.ndarray:
    """Render one component to [n_samples, n_channels] at unit load/speed gain."""
    gains = np.asarray(
        comp.channel_gains if comp.channel_gains is not None else _DEFAULT_GAINS[modality],
        dtype=np.float64,
    )
    if gains.shape != (n_channels,):
        raise ValueError(f"channel gains {gains.shape} for {n_channels}-channel {modality}")

    # Smooth amplitude wander: same modulator for all channels of a component.
    f_mod = rng.uniform(0.2, 1.0)
    phi_mod = rng.uniform(0.0, 2.0 * np.pi)
    envelope = 1.0 + AMP_JITTER_DEPTH * np.sin(2.0 * np.pi * f_mod * t + phi_mod)

    if comp.kind == "rotor":
        carriers = [(comp.order * phase_rotor, comp.order * f_rotor)]
    elif comp.kind == "line":
        line_f = comp.order * LINE_FREQ_HZ
        carriers = [(2.0 * np.pi * line_f * t, np.full_like(t, line_f))]
    else:  # sideband pair around carrier * 50 Hz
        line_phase = 2.0 * np.pi * comp.carrier * LINE_FREQ_HZ * t
        line_f = comp.carrier * LINE_FREQ_HZ
        carriers = [
            (line_phase + comp.order * phase_rotor, line_f + comp.order * f_rotor),
            (line_phase - comp.order * phase_rotor, line_f - comp.order * f_rotor),
        ]

    out = np.zeros((t.shape[0], n_channels))
    for carrier_phase, freq in carriers:
        if modality == "current":
            # Keep the three phases electrically offset; one common random phase.
            phases = rng.uniform(0.0, 2.0 * np.pi) + _CURRENT_PHASE_OFFSETS[:n_channels]
        else:
            phases = rng.uniform(0.0, 2.0 * np.pi, size=n_channels)
        response = np.stack(
            [gains[c] * _channel_response(modality, c, freq) for c in range(n_channels)],
            axis=1,
        )
        out += np.cos(carrier_phase[:, None] + phases[None, :]) * response
    return comp.amp * envelope[:, None] * out


def _render_modality(
    modality: str,
    condition: ConditionSpec,
    fault: FaultClass,
    n_windows: int,
    rng: np.random.Generator,
    snr_db: float,
) -> np.ndarray:
    rate = MODALITY_RATES[modality]
    win_len = MODALITY_LENS[modality]
    n_channels = MODALITY_CHANNELS[modality]
    total = n_windows * win_len

    t = WARMUP_S + np.arange(total, dtype=np.float64) / rate
    rpm = condition.speed_profile(t)
    load = condition.load_profile(t)
    f_rotor = rpm / 60.0
    phase_rotor = 2.0 * np.pi * cumulative_trapezoid(f_rotor, dx=1.0 / rate, initial=0.0)

    if modality == "current":
        base_scale = 0.3 + 0.7 * load / 100.0
        speed_gain = np.ones_like(t)
    else:
        base_scale = np.ones_like(t)
        speed_gain = (rpm / REF_RPM) ** SPEED_GAIN_EXP
    fault_scale = 0.5 + 0.5 * load / 100.0

    clean = np.zeros((total, n_channels))
    for comp in BASE_SIGNATURE[modality]:
        clean += base_scale[:, None] * _component_track(comp, modality, t, phase_rotor, f_rotor, rng, n_channels)
    for comp in fault.components(modality):
        clean += fault_scale[:, None] * _component_track(comp, modality, t, phase_rotor, f_rotor, rng, n_channels)
    clean *= speed_gain[:, None]
    if modality != "current":
        clean *= fault.severity
    clean *= _session_gains(modality, condition.id, n_channels)[None, :]

    rms = np.sqrt(np.mean(clean**2, axis=0))
    noise_std = np.maximum(rms, 1e-8) * 10.0 ** (-snr_db / 20.0)
    signal = clean + rng.normal(0.0, 1.0, size=clean.shape) * noise_std[None, :]
    return signal.reshape(n_windows, win_len, n_channels).astype(np.float32)


def generate_samples(
    condition: ConditionSpec,
    fault: FaultClass,
    n: int,
    seed: int,
    snr_db: Mapping[str, float] | None = None,
) -> list[RawMultiModalSample]:
    """Simulate ``n`` consecutive non-overlapping 0.2 s windows of one run.

    All three modalities are rendered from the same speed/load trajectory
    (clock starts after a 10 s warm-up). Output is a deterministic function of
    (condition, fault, n, seed). Raises ValueError if the condition is shorter
    than n windows or n is not positive.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if n * SEGMENT_S > condition.duration_s + 1e-9:
        raise ValueError(
            f"{n} windows need {n * SEGMENT_S:g} s but condition {condition.id} lasts {condition.duration_s:g} s"
        )
    snr = dict(DEFAULT_SNR_DB)
    if snr_db:
        snr.update(snr_db)

    rng = _stream(condition.id, fault.label, seed)
    arrays = {m: _render_modality(m, condition, fault, n, rng, snr[m]) for m in MODALITIES}
    return [
        RawMultiModalSample(
            vibration=arrays["vibration"][i],
            current=arrays["current"][i],
            acoustic=arrays["acoustic"][i],
            label=fault.label,
            condition_id=condition.id,
        )
        for i in range(n)
    ]
