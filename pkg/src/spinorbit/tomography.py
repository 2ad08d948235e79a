"""Spin-orbit Stokes tomography from 9 settings x 4 intensities.

A setting pairs a polarization basis with a mode basis, each given by its
Pauli index (1: D/A or d/a, 2: R/L or r/l, 3: H/V or h/v).  Every record
holds the four outputs in the order ``(++, +-, -+, --)``, polarization sign
first, where ``+`` is the +1 eigenvector (D, R, H and d, r, h).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .qstate import (
    density_from_json,
    density_to_json,
    fidelity,
    pauli_assemble,
    stokes_to_json,
    validate_density,
)

_S = 1.0 / np.sqrt(2.0)
# (+, -) eigenvectors of sigma_k, k = 1, 2, 3
EIGENBASES = {
    1: (np.array([_S, _S]), np.array([_S, -_S])),
    2: (np.array([_S, 1j * _S]), np.array([_S, -1j * _S])),
    3: (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
}
OUTCOME_SIGNS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]])


class RecordError(ValueError):
    """Malformed or incomplete set of intensity records."""


@dataclass(frozen=True, order=True)
class MeasurementSetting:
    pol_basis: int
    mode_basis: int

    def __post_init__(self):
        if self.pol_basis not in (1, 2, 3) or self.mode_basis not in (1, 2, 3):
            raise ValueError(f"basis indices must be 1, 2 or 3, got {self}")


ALL_SETTINGS = tuple(MeasurementSetting(i, j) for i, j in itertools.product((1, 2, 3), repeat=2))


@dataclass(frozen=True)
class IntensityRecord:
    setting: MeasurementSetting
    intensities: tuple[float, float, float, float]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.intensities)
        if len(vals) != 4:
            raise RecordError("a record needs exactly 4 intensities")
        if any(not np.isfinite(x) or x < 0 for x in vals):
            raise RecordError(f"intensities must be finite and nonnegative, got {vals}")
        if not any(x > 0 for x in vals):
            raise RecordError(f"all-zero record for {self.setting}")
        object.__setattr__(self, "intensities", vals)

    def probabilities(self) -> np.ndarray:
        i = np.asarray(self.intensities)
        return i / i.sum()


@dataclass
class TomographyReport:
    rho_raw: np.ndarray
    rho_physical: np.ndarray
    fidelity_vs_target: float | None
    negative_eigenvalue_mass: float
    stokes: np.ndarray

    def to_json(self) -> dict:
        return {
            "rho_raw": density_to_json(self.rho_raw),
            "rho_physical": density_to_json(self.rho_physical),
            "fidelity_vs_target": self.fidelity_vs_target,
            "negative_eigenvalue_mass": self.negative_eigenvalue_mass,
            "stokes": stokes_to_json(self.stokes),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TomographyReport":
        return cls(
            rho_raw=density_from_json(data["rho_raw"]),
            rho_physical=density_from_json(data["rho_physical"]),
            fidelity_vs_target=data.get("fidelity_vs_target"),
            negative_eigenvalue_mass=float(data["negative_eigenvalue_mass"]),
            stokes=np.asarray(data["stokes"], dtype=float),
        )


def setting_projectors(setting: MeasurementSetting) -> list[np.ndarray]:
    """Four joint rank-one projectors in output order."""
    pol = EIGENBASES[setting.pol_basis]
    mode = EIGENBASES[setting.mode_basis]
    out = []
    for a, b in itertools.product(pol, mode):
        v = np.kron(a, b)
        out.append(np.outer(v, v.conj()))
    return out


def forward_probabilities(rho, setting: MeasurementSetting) -> np.ndarray:
    """Outcome probabilities for the joint eigenbasis of ``setting``."""
    rho = validate_density(rho)
    p = np.array([np.trace(proj @ rho).real for proj in setting_projectors(setting)])
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def ideal_records(rho, total_intensity: float = 1.0) -> list[IntensityRecord]:
    """Noiseless records computed straight from the eigenbasis projectors."""
    return [IntensityRecord(s, tuple(total_intensity * forward_probabilities(rho, s)))
            for s in ALL_SETTINGS]


def _index_records(records: Iterable[IntensityRecord]) -> dict:
    by_setting = {}
    for rec in records:
        if rec.setting in by_setting:
            raise RecordError(f"duplicate record for {rec.setting}")
        by_setting[rec.setting] = rec
    missing = [s for s in ALL_SETTINGS if s not in by_setting]
    if missing:
        raise RecordError(f"missing records for settings {missing}")
    return by_setting


def stokes_from_records(records: Sequence[IntensityRecord], average: bool = False) -> np.ndarray:
    """Stokes tensor from one record per setting.

    Correlations ``s[i, j]`` come from setting ``(i, j)``.  The marginals
    ``s[i, 0]`` and ``s[0, j]`` are read from settings ``(i, 3)`` and
    ``(3, j)``, or averaged over every compatible setting with ``average``.
    """
    by_setting = _index_records(records)
    probs = {s: r.probabilities() for s, r in by_setting.items()}
    pol_sign = OUTCOME_SIGNS[:, 0]
    mode_sign = OUTCOME_SIGNS[:, 1]

    s = np.zeros((4, 4))
    s[0, 0] = 1.0
    for i, j in itertools.product((1, 2, 3), repeat=2):
        s[i, j] = probs[MeasurementSetting(i, j)] @ (pol_sign * mode_sign)
    for k in (1, 2, 3):
        if average:
            s[k, 0] = np.mean([probs[MeasurementSetting(k, j)] @ pol_sign for j in (1, 2, 3)])
            s[0, k] = np.mean([probs[MeasurementSetting(i, k)] @ mode_sign for i in (1, 2, 3)])
        else:
            s[k, 0] = probs[MeasurementSetting(k, 3)] @ pol_sign
            s[0, k] = probs[MeasurementSetting(3, k)] @ mode_sign
    return s


def project_physical(rho_raw) -> np.ndarray:
    """Clip negative eigenvalues to zero and renormalize the trace."""
    rho_raw = np.asarray(rho_raw, dtype=complex)
    if np.max(np.abs(rho_raw - rho_raw.conj().T)) > 1e-8:
        raise ValueError("matrix is not Hermitian")
    if abs(np.trace(rho_raw) - 1.0) > 1e-8:
        raise ValueError("matrix does not have unit trace")
    lam, vec = np.linalg.eigh(rho_raw)
    if lam[0] >= 0.0:
        return rho_raw.copy()
    lam = np.clip(lam, 0.0, None)
    out = (vec * lam) @ vec.conj().T
    out = (out + out.conj().T) / 2
    return out / np.trace(out).real


def negative_eigenvalue_mass(rho_raw) -> float:
    lam = np.linalg.eigvalsh(np.asarray(rho_raw, dtype=complex))
    return float(-lam[lam < 0].sum()) + 0.0


def reconstruct(records: Sequence[IntensityRecord], target=None,
                average: bool = False) -> TomographyReport:
    """Linear inversion followed by eigenvalue clipping."""
    s = stokes_from_records(records, average=average)
    rho_raw = pauli_assemble(s)
    rho_phys = project_physical(rho_raw)
    fid = None if target is None else fidelity(target, rho_phys)
    return TomographyReport(rho_raw=rho_raw, rho_physical=rho_phys, fidelity_vs_target=fid,
                            negative_eigenvalue_mass=negative_eigenvalue_mass(rho_raw),
                            stokes=s)


def records_to_json(records: Sequence[IntensityRecord]) -> list[dict]:
    return [{"pol_basis": r.setting.pol_basis, "mode_basis": r.setting.mode_basis,
             "intensities": list(r.intensities)} for r in records]


def records_from_json(data) -> list[IntensityRecord]:
    """Parse the 9-object list format (also accepts a JSON string)."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        return [IntensityRecord(MeasurementSetting(int(d["pol_basis"]), int(d["mode_basis"])),
                                tuple(d["intensities"])) for d in data]
    except (KeyError, TypeError) as exc:
        raise RecordError(f"malformed record list: {exc}") from exc
