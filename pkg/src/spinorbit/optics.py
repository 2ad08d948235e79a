"""Jones-calculus model of the preparation and tomography benches.

Every unitary element acts on one factor of polarization (x) mode, except
the S-wave plate, which couples both.  Angles are in degrees and global
phases are dropped.  Mixed states come from incoherently adding branches,
one per laser.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .qstate import ket, projector, validate_pure
from .states import Bell, Family, bell_like
from .tomography import ALL_SETTINGS, IntensityRecord, MeasurementSetting


class Kind(enum.Enum):
    HWP = "hwp"
    QWP = "qwp"
    DOVE = "dove"
    MODE_CONVERTER = "mode_converter"
    SWP = "swp"
    MASK = "mask"
    NEUTRAL_FILTER = "neutral_filter"


ANGLED = {Kind.HWP, Kind.QWP, Kind.DOVE, Kind.SWP, Kind.MODE_CONVERTER}
ASTIGMATIC = {Kind.DOVE, Kind.MODE_CONVERTER}
POLARIZATION_ELEMENTS = {Kind.HWP, Kind.QWP}
MODE_ELEMENTS = {Kind.DOVE, Kind.MODE_CONVERTER}

# the pi/2 converter is the mode-space quarter-wave plate at 90 degrees
MODE_CONVERTER_ANGLE = 90.0


@dataclass(frozen=True)
class Element:
    kind: Kind
    angle: float = 0.0
    mode: str | None = None
    transmittance: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not np.isfinite(self.angle):
            raise ValueError("element angle must be finite")
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError(f"transmittance must lie in [0, 1], got {self.transmittance}")
        if self.kind is Kind.MASK and self.mode not in ("h", "v"):
            raise ValueError("a mask must select mode 'h' or 'v'")
        if self.kind is Kind.MODE_CONVERTER:
            object.__setattr__(self, "angle", MODE_CONVERTER_ANGLE)

    @property
    def is_unitary(self) -> bool:
        return self.kind not in (Kind.MASK, Kind.NEUTRAL_FILTER)

    def to_json(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind in ANGLED and self.kind is not Kind.MODE_CONVERTER:
            d["angle"] = self.angle
        if self.kind is Kind.MASK:
            d["mode"] = self.mode
        if self.kind is Kind.NEUTRAL_FILTER:
            d["transmittance"] = self.transmittance
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Element":
        return cls(Kind(d["kind"]), float(d.get("angle", 0.0)), d.get("mode"),
                   float(d.get("transmittance", 1.0)))


def hwp(angle):
    return Element(Kind.HWP, angle)


def qwp(angle):
    return Element(Kind.QWP, angle)


def dove(angle):
    return Element(Kind.DOVE, angle)


def mode_converter():
    return Element(Kind.MODE_CONVERTER)


def swp(angle):
    return Element(Kind.SWP, angle)


def mask(mode):
    return Element(Kind.MASK, mode=mode)


def neutral_filter(t):
    return Element(Kind.NEUTRAL_FILTER, transmittance=t)


def half_wave(angle_deg: float) -> np.ndarray:
    """Half-wave retarder with fast axis at ``angle_deg``."""
    t = np.deg2rad(2 * angle_deg)
    return np.array([[np.cos(t), np.sin(t)], [np.sin(t), -np.cos(t)]], dtype=complex)


def quarter_wave(angle_deg: float) -> np.ndarray:
    """Quarter-wave retarder with fast axis at ``angle_deg``."""
    a = np.deg2rad(angle_deg)
    c, s = np.cos(a), np.sin(a)
    return np.array([[c * c + 1j * s * s, (1 - 1j) * s * c],
                     [(1 - 1j) * s * c, s * s + 1j * c * c]], dtype=complex)


# Input of every laser branch: vertical polarization, Gaussian beam stood in by h.
LASER_INPUT = ket("Vh")


def s_plate(angle_deg: float) -> np.ndarray:
    """4x4 S-wave plate model.

    Only the image of the laser input is pinned down: the plate sends
    ``|Vh>`` to ``cos(a)|phi+> + sin(a)|psi->``, i.e. ``|phi+>`` at 0 deg and
    ``|psi->`` at 90 deg.  The unitary is the real plane rotation carrying
    ``|Vh>`` onto that target and fixing the orthogonal complement.
    """
    a = np.deg2rad(angle_deg)
    target = (np.cos(a) * bell_like(Bell.PHI_PLUS) + np.sin(a) * bell_like(Bell.PSI_MINUS)).real
    e = LASER_INPUT.real
    cos_g = float(e @ target)
    rest = target - cos_g * e
    sin_g = float(np.linalg.norm(rest))
    if sin_g < 1e-15:
        return np.eye(4, dtype=complex)
    f = rest / sin_g
    rot = (np.eye(4) + (cos_g - 1) * (np.outer(e, e) + np.outer(f, f))
           + sin_g * (np.outer(f, e) - np.outer(e, f)))
    return rot.astype(complex)


def element_unitary(e: Element, angle: float | None = None) -> np.ndarray:
    """4x4 unitary of a retarding element; ``angle`` overrides ``e.angle``."""
    if not e.is_unitary:
        raise TypeError(f"{e.kind.value} is not a unitary element")
    a = e.angle if angle is None else angle
    eye2 = np.eye(2)
    if e.kind is Kind.HWP:
        return np.kron(half_wave(a), eye2)
    if e.kind is Kind.QWP:
        return np.kron(quarter_wave(a), eye2)
    if e.kind is Kind.DOVE:
        return np.kron(eye2, half_wave(a))
    if e.kind is Kind.MODE_CONVERTER:
        return np.kron(eye2, quarter_wave(a))
    return s_plate(a)


@dataclass(frozen=True)
class NoiseConfig:
    """Bench imperfections.

    ``depolarizing_strength`` is applied to the mode qubit after every Dove
    prism and mode converter; the intensity terms act on detector readings.
    """
    angle_jitter_sigma: float = 0.0
    depolarizing_strength: float = 0.0
    intensity_noise_rel: float = 0.0
    background_offset: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("angle_jitter_sigma", "depolarizing_strength",
                     "intensity_noise_rel", "background_offset"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.depolarizing_strength > 1:
            raise ValueError("depolarizing_strength must be <= 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    @classmethod
    def from_json(cls, d: dict) -> "NoiseConfig":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


# Tuned so rho1 tomography reaches F ~ 0.96 and discord fits give mean F ~ 0.94.
# Background light dominates: an offset b per output acts like identity
# admixture with weight 4b / (1 + 4b).
CALIBRATED_NOISE = NoiseConfig(angle_jitter_sigma=0.3, depolarizing_strength=0.01,
                               intensity_noise_rel=0.005, background_offset=0.016, seed=2024)


@dataclass(frozen=True)
class Branch:
    weight: float
    elements: tuple[Element, ...]
    input: np.ndarray = field(default_factory=lambda: LASER_INPUT.copy())

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("branch weight must be nonnegative")
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "input", validate_pure(self.input))
        seen_other = False
        for el in self.elements:
            if el.kind is Kind.MASK and seen_other:
                raise ValueError("masks are only allowed at the start of a branch")
            seen_other = seen_other or el.kind is not Kind.MASK

    @property
    def effective_weight(self) -> float:
        w = self.weight
        for el in self.elements:
            if el.kind is Kind.NEUTRAL_FILTER:
                w *= el.transmittance
        return w


@dataclass(frozen=True)
class Circuit:
    branches: tuple[Branch, ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("a circuit needs at least one branch")

    def effective_weights(self) -> np.ndarray:
        return np.array([b.effective_weight for b in self.branches])

    def to_json(self) -> dict:
        return {"branches": [{"weight": b.weight,
                              "input": [[z.real, z.imag] for z in b.input],
                              "elements": [e.to_json() for e in b.elements]}
                             for b in self.branches]}

    @classmethod
    def from_json(cls, d: dict) -> "Circuit":
        branches = []
        for b in d["branches"]:
            inp = LASER_INPUT.copy()
            if "input" in b:
                arr = np.asarray(b["input"], dtype=float)
                inp = arr[:, 0] + 1j * arr[:, 1]
            branches.append(Branch(float(b["weight"]),
                                   tuple(Element.from_json(e) for e in b["elements"]), inp))
        return cls(tuple(branches))


def prepare_family_circuit(fam, c: float) -> Circuit:
    """Laser branches with filter transmittances that realize a family member."""
    fam = Family.parse(fam)
    c = float(c)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must lie in [0, 1], got {c}")
    if fam is Family.RHO1:
        branches = [Branch(1.0, (swp(0.0), neutral_filter(c))),
                    Branch(1.0, (mask("v"), neutral_filter(1 - c)))]
    elif fam is Family.RHO2:
        branches = [Branch(1.0, (swp(0.0), neutral_filter(c))),
                    Branch(1.0, (neutral_filter(1 - c), swp(90.0)))]
    elif fam is Family.RHO3:
        branches = [Branch(1.0, (mask("h"), hwp(45.0), neutral_filter(2 * (1 - c) / 3))),
                    Branch(1.0, (mask("v"), neutral_filter(2 * c / 3))),
                    Branch(1.0, (swp(90.0), neutral_filter(1 / 3)))]
    else:
        q = (1 - c) / 4
        branches = [Branch(1.0, (swp(90.0), neutral_filter(c))),
                    Branch(1.0, (mask("h"), hwp(45.0), neutral_filter(q))),
                    Branch(1.0, (mask("v"), hwp(45.0), neutral_filter(q))),
                    Branch(1.0, (mask("h"), neutral_filter(q))),
                    Branch(1.0, (mask("v"), neutral_filter(q)))]
    return Circuit(tuple(branches))


def _apply_mask(psi: np.ndarray, mode: str) -> np.ndarray:
    amp = psi.reshape(2, 2)
    u, sv, vh = np.linalg.svd(amp)
    if sv[1] > 1e-9:
        raise ValueError("a mask needs a separable input beam")
    pol = u[:, 0] * sv[0]
    return np.kron(pol, np.array([1.0, 0.0]) if mode == "h" else np.array([0.0, 1.0]))


def depolarize_mode(rho: np.ndarray, p: float) -> np.ndarray:
    """``(1 - p) rho + p rho_pol (x) I/2``."""
    if p == 0:
        return rho
    r = rho.reshape(2, 2, 2, 2)
    rho_pol = np.einsum("ajbj->ab", r)
    return (1 - p) * rho + p * np.kron(rho_pol, np.eye(2) / 2)


def propagate(rho: np.ndarray, elements: Sequence[Element], noise: NoiseConfig | None = None,
              rng: np.random.Generator | None = None) -> np.ndarray:
    """Send a density matrix through retarding elements, with optional noise.

    Jitters for all elements are drawn first, in element order, so a seeded
    stream produces the same realization regardless of the channel settings.
    """
    unitary = [e for e in elements if e.is_unitary]
    angles = [e.angle for e in unitary]
    if noise is not None and noise.angle_jitter_sigma > 0:
        rng = rng if rng is not None else noise.rng()
        angles = [a + noise.angle_jitter_sigma * rng.standard_normal() for a in angles]
    for e, a in zip(unitary, angles):
        u = element_unitary(e, a)
        rho = u @ rho @ u.conj().T
        if noise is not None and e.kind in ASTIGMATIC:
            rho = depolarize_mode(rho, noise.depolarizing_strength)
    return rho


def _branch_state(branch: Branch, noise, rng) -> np.ndarray:
    psi = branch.input
    for el in branch.elements:
        if el.kind is Kind.MASK:
            psi = _apply_mask(psi, el.mode)
    return propagate(projector(psi), branch.elements, noise, rng)


def run_circuit(circuit: Circuit, noise: NoiseConfig | None = None,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Incoherent sum of the branch outputs, normalized to unit trace."""
    weights = circuit.effective_weights()
    if weights.sum() <= 0:
        raise ValueError("every branch of the circuit has zero weight")
    if noise is not None and rng is None:
        rng = noise.rng()
    rho = np.zeros((4, 4), dtype=complex)
    for w, branch in zip(weights, circuit.branches):
        # dark branches still draw their jitters so the stream stays aligned
        state = _branch_state(branch, noise, rng)
        if w > 0:
            rho += w * state
    rho = rho / weights.sum()
    return (rho + rho.conj().T) / 2


def analyzer_chain(setting: MeasurementSetting) -> list[Element]:
    """Elements rotating the setting's eigenbases onto H/V and h/v.

    The ``+`` eigenvector of each basis ends on H (or h), so the four
    computational outputs come out in ``(++, +-, -+, --)`` order.
    """
    pol = {1: [hwp(22.5)], 2: [qwp(90.0), hwp(22.5)], 3: []}[setting.pol_basis]
    mode = {1: [dove(22.5)], 2: [mode_converter(), dove(22.5)], 3: []}[setting.mode_basis]
    return pol + mode


def simulate_ccd(rho, setting: MeasurementSetting, total_intensity: float = 1.0,
                 noise: NoiseConfig | None = None,
                 rng: np.random.Generator | None = None) -> IntensityRecord:
    """Four output intensities of the analyzer for one setting."""
    if not total_intensity > 0:
        raise ValueError("total_intensity must be positive")
    if noise is not None and rng is None:
        rng = noise.rng()
    out = propagate(np.asarray(rho, dtype=complex), analyzer_chain(setting), noise, rng)
    intensity = total_intensity * np.clip(np.diag(out).real, 0.0, None)
    if noise is not None:
        if noise.intensity_noise_rel > 0:
            intensity = intensity * (1 + noise.intensity_noise_rel * rng.standard_normal(4))
        intensity = np.clip(intensity + noise.background_offset, 0.0, None)
    return IntensityRecord(setting, tuple(intensity))


def simulate_tomography(rho, noise: NoiseConfig | None = None, total_intensity: float = 1.0,
                        rng: np.random.Generator | None = None) -> list[IntensityRecord]:
    """Records for all nine settings, drawn from one random stream."""
    if noise is not None and rng is None:
        rng = noise.rng()
    return [simulate_ccd(rho, s, total_intensity, noise, rng) for s in ALL_SETTINGS]
