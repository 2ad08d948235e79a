"""Two-qubit state algebra for spin-orbit modes.

Basis order is (Hh, Hv, Vh, Vv): qubit A is polarization (H=0, V=1) and
qubit B is the first-order transverse mode (h=0, v=1).  Pauli convention:
sigma_3 has +1 on H/h, sigma_1 has +1 on D/d, sigma_2 has +1 on R/r.

States are plain numpy arrays: a pure state is a length-4 complex vector,
a density operator a 4x4 complex matrix and a Stokes tensor a 4x4 real
matrix indexed (polarization Pauli, mode Pauli).
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8
ENTROPY_NEG_TOL = 1e-6
NORM_TOL = 1e-6

SIGMA = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# sigma_i (x) sigma_j, shape (4, 4, 4, 4)
PAULI_PRODUCTS = np.einsum("iab,jcd->ijacbd", SIGMA, SIGMA).reshape(4, 4, 4, 4)

BASIS_LABELS = ("Hh", "Hv", "Vh", "Vv")


class InvalidStateError(ValueError):
    """Raised when an array is not a valid pure state or density operator."""


def ket(label: str) -> np.ndarray:
    """Computational basis vector for a label such as ``"Vv"``."""
    return np.eye(4, dtype=complex)[BASIS_LABELS.index(label)]


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def validate_pure(psi, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise InvalidStateError(f"pure state must have 4 amplitudes, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise InvalidStateError(f"pure state is not normalized (norm={norm:.12g})")
    return psi


def validate_density(rho, dim: int = 4, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise InvalidStateError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidStateError("density operator is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"density operator trace is {tr.real:.12g}, expected 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -psd_tol:
        raise InvalidStateError(f"density operator has negative eigenvalue {lam_min:.3g}")
    return rho


def is_density(rho, dim: int = 4) -> bool:
    try:
        validate_density(rho, dim)
    except InvalidStateError:
        return False
    return True


def density_from_pure(psi) -> np.ndarray:
    """Return |psi><psi| for a normalized 4-component amplitude vector."""
    return projector(validate_pure(psi))


def _entropy_from_eigenvalues(lam) -> float:
    lam = np.asarray(lam, dtype=float)
    if lam.min() < -ENTROPY_NEG_TOL:
        raise InvalidStateError(f"negative eigenvalue {lam.min():.3g} in entropy")
    lam = lam[lam > 0]
    return float(max(-np.sum(lam * np.log2(lam)), 0.0))


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits, with 0 log 0 = 0.

    Works for any square density matrix (4x4 joint states and 2x2 marginals).
    """
    rho = np.asarray(rho, dtype=complex)
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(rho))


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduce a two-qubit state to subsystem ``"A"`` (polarization) or ``"B"`` (mode)."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ajbj->ab", r)
    if keep == "B":
        return np.einsum("iaib->ab", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def sqrtm_psd(a) -> np.ndarray:
    """Square root of a Hermitian PSD matrix, clipping roundoff negatives."""
    lam, vec = np.linalg.eigh(a)
    lam = np.clip(lam, 0.0, None)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    rho = validate_density(rho, dim=np.shape(rho)[0])
    sigma = validate_density(sigma, dim=np.shape(sigma)[0])
    # nuclear norm of sqrt(rho) sqrt(sigma); symmetric in the arguments
    sv = np.linalg.svd(sqrtm_psd(rho) @ sqrtm_psd(sigma), compute_uv=False)
    return float(min(np.sum(sv) ** 2, 1.0))


def pauli_expand(rho) -> np.ndarray:
    """Stokes tensor ``s[i, j] = Tr[rho (sigma_i x sigma_j)]``."""
    rho = np.asarray(rho, dtype=complex)
    s = np.einsum("ijab,ba->ij", PAULI_PRODUCTS, rho)
    return s.real.copy()


def pauli_assemble(s) -> np.ndarray:
    """Inverse of :func:`pauli_expand`.

    The result is Hermitian with unit trace when ``s[0, 0] == 1`` but need
    not be positive; see :func:`spinorbit.tomography.project_physical`.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (4, 4):
        raise ValueError(f"Stokes tensor must be 4x4, got shape {s.shape}")
    return np.einsum("ij,ijab->ab", s, PAULI_PRODUCTS) / 4.0


def random_density(rng: np.random.Generator, rank: int = 4, dim: int = 4) -> np.ndarray:
    """Random density matrix from the Ginibre ensemble."""
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    return psi / np.linalg.norm(psi)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# JSON helpers: 4x4 array of [re, im] pairs, row-major.

def density_to_json(rho) -> list:
    rho = np.asarray(rho, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in rho]


def density_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2 or arr.ndim != 3:
        raise ValueError("density JSON must be a square array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def stokes_to_json(s) -> list:
    return np.asarray(s, dtype=float).tolist()


def stokes_from_json(data) -> np.ndarray:
    return np.asarray(data, dtype=float)
