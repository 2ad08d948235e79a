"""Spin-orbit X-state families, Bell-like modes and identity admixture."""

from __future__ import annotations

import enum

import numpy as np

from .qstate import fidelity, ket, projector, validate_density

SQRT_HALF = 1.0 / np.sqrt(2.0)

DEFAULT_C_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


class Bell(enum.Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


class Family(enum.Enum):
    RHO1 = "rho1"
    RHO2 = "rho2"
    RHO3 = "rho3"
    WERNER = "werner"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown family {value!r}; expected one of "
                + ", ".join(f.value for f in cls)
            ) from None


def bell_like(kind: Bell) -> np.ndarray:
    """Maximally nonseparable spin-orbit mode as a 4-amplitude vector."""
    kind = Bell(kind)
    if kind is Bell.PHI_PLUS:
        return SQRT_HALF * (ket("Hh") + ket("Vv"))
    if kind is Bell.PHI_MINUS:
        return SQRT_HALF * (ket("Hh") - ket("Vv"))
    if kind is Bell.PSI_PLUS:
        return SQRT_HALF * (ket("Hv") + ket("Vh"))
    return SQRT_HALF * (ket("Hv") - ket("Vh"))


def _check_weight(name: str, x: float) -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0) or not np.isfinite(x):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def family_mixture(fam, c: float) -> list[tuple[float, np.ndarray]]:
    """Pure-state ensemble ``[(weight, psi), ...]`` behind a family member.

    Werner states are decomposed as ``c |psi-><psi-|`` plus ``(1 - c)/4`` of
    each computational basis state.
    """
    fam = Family.parse(fam)
    c = _check_weight("c", c)
    phi_p = bell_like(Bell.PHI_PLUS)
    psi_m = bell_like(Bell.PSI_MINUS)
    if fam is Family.RHO1:
        return [(c, phi_p), (1.0 - c, ket("Vv"))]
    if fam is Family.RHO2:
        return [(c, phi_p), (1.0 - c, psi_m)]
    if fam is Family.RHO3:
        # fixed third of psi-, the remaining 2/3 split between Vv and Hh
        return [(2.0 * c / 3.0, ket("Vv")), (2.0 * (1.0 - c) / 3.0, ket("Hh")),
                (1.0 / 3.0, psi_m)]
    return [(c, psi_m)] + [((1.0 - c) / 4.0, ket(lbl)) for lbl in ("Hh", "Hv", "Vh", "Vv")]


def family(fam, c: float) -> np.ndarray:
    """Density matrix of family member ``fam`` at weight ``c``."""
    rho = np.zeros((4, 4), dtype=complex)
    for w, psi in family_mixture(fam, c):
        rho += w * projector(psi)
    return rho


def perturb(rho, alpha: float) -> np.ndarray:
    """Admix the maximally mixed state: ``(1 - alpha) rho + alpha I/4``."""
    alpha = _check_weight("alpha", alpha)
    rho = validate_density(rho)
    return (1.0 - alpha) * rho + alpha * np.eye(4) / 4.0


def is_x_state(rho, tol: float = 1e-10) -> bool:
    """True when every entry off the diagonal and anti-diagonal is below ``tol``."""
    rho = np.asarray(rho)
    n = rho.shape[0]
    mask = ~(np.eye(n, dtype=bool) | np.fliplr(np.eye(n, dtype=bool)))
    return bool(np.all(np.abs(rho[mask]) <= tol))


def mean_fidelity(fam, alpha: float, c_grid=DEFAULT_C_GRID) -> float:
    """Average fidelity between family members and their perturbed versions."""
    vals = []
    for c in c_grid:
        rho = family(fam, c)
        vals.append(fidelity(rho, perturb(rho, alpha)))
    return float(np.mean(vals))
