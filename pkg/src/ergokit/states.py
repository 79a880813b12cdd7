"""Density matrices, Hamiltonians, Gibbs states, entropies, free energies.

Energies are measured in a reference quantum (epsilon = 1); entropies are
in nats (natural logarithm throughout).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import DomainError, ValidationError
from .linalg import (
    HermitianEigenSystem,
    as_square_matrix,
    hermitian_eigendecompose,
    hermitian_part,
)
from .policy import DEFAULT_POLICY, NumericPolicy

__all__ = [
    "DensityMatrix",
    "Hamiltonian",
    "PointTag",
    "EnergyEntropyPoint",
    "energy",
    "von_neumann_entropy",
    "entropy_of_populations",
    "gibbs_state",
    "equilibrium_free_energy",
    "nonequilibrium_free_energy",
    "relative_entropy",
    "is_passive",
    "majorizes",
    "invert_gibbs_energy",
]


class PointTag(str, enum.Enum):
    """Provenance of a point on the energy-entropy diagram."""

    INITIAL = "initial"
    UNITAL_SAMPLE = "unital_sample"
    FEEDBACK_SAMPLE = "feedback_sample"
    GIBBS_CURVE = "gibbs_curve"


@dataclass(frozen=True)
class EnergyEntropyPoint:
    """An (energy, entropy) pair with provenance tag.

    The entropy-range invariant 0 <= S <= ln d is enforced where the
    dimension is known (at experiment emission time), not here.
    """

    energy: float
    entropy: float
    tag: PointTag


class Hamiltonian:
    """Validated Hermitian operator with a cached sorted spectrum."""

    def __init__(self, matrix, policy: NumericPolicy = DEFAULT_POLICY):
        a = as_square_matrix(matrix, "hamiltonian")
        self._spectrum = hermitian_eigendecompose(a, policy, name="hamiltonian")
        self._matrix = hermitian_part(a)
        self._matrix.setflags(write=False)

    @classmethod
    def from_diagonal(cls, levels) -> "Hamiltonian":
        return cls(np.diag(np.asarray(levels, dtype=float)))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def spectrum(self) -> HermitianEigenSystem:
        return self._spectrum

    @property
    def levels_ascending(self) -> np.ndarray:
        """Energy eigenvalues in increasing order."""
        return self._spectrum.eigenvalues

    def __repr__(self) -> str:  # pragma: no cover
        return f"Hamiltonian(dim={self.dim}, levels={np.round(self.levels_ascending, 6)})"


class DensityMatrix:
    """Validated density operator with a cached sorted spectrum.

    Eigenvalues in [-validation_tol, 0] are treated as numerical PSD noise
    and clamped to zero in :attr:`populations`; anything more negative is
    rejected.
    """

    def __init__(self, matrix, policy: NumericPolicy = DEFAULT_POLICY):
        a = as_square_matrix(matrix, "density matrix")
        self._spectrum = hermitian_eigendecompose(a, policy, name="density matrix")
        tr = np.trace(a)
        if abs(tr - 1.0) > policy.validation_tol:
            raise ValidationError(f"density matrix trace is {tr}, expected 1 within {policy.validation_tol:.1e}")
        low = float(self._spectrum.eigenvalues[0])
        if low < -policy.validation_tol:
            raise ValidationError(
                f"density matrix has eigenvalue {low:.3e} below -{policy.validation_tol:.1e}; not positive semidefinite"
            )
        self._matrix = hermitian_part(a)
        self._matrix.setflags(write=False)
        self._populations = np.clip(self._spectrum.eigenvalues, 0.0, None)
        self._populations.setflags(write=False)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        if d < 1:
            raise ValidationError(f"dimension must be >= 1, got {d}")
        return cls(np.eye(d) / d)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def spectrum(self) -> HermitianEigenSystem:
        return self._spectrum

    @property
    def populations(self) -> np.ndarray:
        """Eigenvalues clamped to [0, 1], in increasing order."""
        return self._populations

    @property
    def populations_descending(self) -> np.ndarray:
        return self._populations[::-1]

    def __repr__(self) -> str:  # pragma: no cover
        return f"DensityMatrix(dim={self.dim}, populations={np.round(self.populations, 6)})"


def _check_dims(rho: DensityMatrix, h: Hamiltonian) -> None:
    if rho.dim != h.dim:
        raise ValidationError(f"dimension mismatch: state is {rho.dim}-dimensional, hamiltonian is {h.dim}-dimensional")


def energy(rho: DensityMatrix, h: Hamiltonian) -> float:
    """Tr(H rho); the imaginary residue (< validation tolerance) is discarded."""
    _check_dims(rho, h)
    return float(np.trace(h.matrix @ rho.matrix).real)


def entropy_of_populations(p: np.ndarray) -> float:
    """Shannon entropy -sum p ln p in nats, with 0 ln 0 = 0."""
    return float(-xlogy(p, p).sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -Tr(rho ln rho) in nats."""
    return entropy_of_populations(rho.populations)


def gibbs_state(h: Hamiltonian, beta: float) -> DensityMatrix:
    """Thermal state e^(-beta H) / Z for any real beta (beta = 0 gives I/d).

    Computed in the eigenbasis with the spectrum shifted by its extremal
    value before exponentiation, so large |beta| cannot overflow.
    """
    if not math.isfinite(beta):
        raise ValidationError(f"beta must be finite, got {beta}")
    if beta == 0.0:
        return DensityMatrix.maximally_mixed(h.dim)
    logits = -beta * h.levels_ascending
    w = np.exp(logits - logits.max())
    p = w / w.sum()
    v = h.spectrum.eigenvectors
    return DensityMatrix(hermitian_part((v * p) @ v.conj().T))


def gibbs_populations(h: Hamiltonian, beta: float) -> np.ndarray:
    """Boltzmann weights of ``h`` at inverse temperature ``beta``, aligned
    with the ascending energy levels (overflow-guarded)."""
    if not math.isfinite(beta):
        raise ValidationError(f"beta must be finite, got {beta}")
    logits = -beta * h.levels_ascending
    w = np.exp(logits - logits.max())
    return w / w.sum()


def equilibrium_free_energy(h: Hamiltonian, beta: float) -> float:
    """F_beta = -(1/beta) ln Tr e^(-beta H), natural logarithm."""
    if beta == 0.0:
        raise DomainError("equilibrium free energy is undefined at beta = 0")
    if not math.isfinite(beta):
        raise ValidationError(f"beta must be finite, got {beta}")
    return float(-logsumexp(-beta * h.levels_ascending) / beta)


def nonequilibrium_free_energy(rho: DensityMatrix, h: Hamiltonian, beta: float) -> float:
    """f_beta(rho, H) = Tr(H rho) - S(rho)/beta."""
    if beta == 0.0:
        raise DomainError("nonequilibrium free energy is undefined at beta = 0")
    if not math.isfinite(beta):
        raise ValidationError(f"beta must be finite, got {beta}")
    _check_dims(rho, h)
    return energy(rho, h) - von_neumann_entropy(rho) / beta


_SUPPORT_TOL = 1e-10


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Quantum relative entropy D(rho || sigma) = Tr[rho (ln rho - ln sigma)].

    Returns ``inf`` when rho has weight beyond the rank tolerance outside
    the support of sigma (the distinguished divergent case).
    """
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    s_vals = sigma.populations
    s_vecs = sigma.spectrum.eigenvectors
    # weight of rho on each eigenvector of sigma
    overlap = np.einsum("ij,ik,kj->j", s_vecs.conj(), rho.matrix, s_vecs).real
    overlap = np.clip(overlap, 0.0, None)
    supported = s_vals > _SUPPORT_TOL
    if overlap[~supported].sum() > _SUPPORT_TOL:
        return math.inf
    cross = float(overlap[supported] @ np.log(s_vals[supported]))
    return float(xlogy(rho.populations, rho.populations).sum()) - cross


def is_passive(rho: DensityMatrix, h: Hamiltonian, tol: float = 1e-12) -> bool:
    """True iff no cyclic unitary can extract energy (ergotropy below tol).

    Defined via vanishing ergotropy rather than occupation ordering so the
    answer stays unambiguous for degenerate Hamiltonians.
    """
    _check_dims(rho, h)
    extractable = energy(rho, h) - float(h.levels_ascending @ rho.populations_descending)
    return extractable < tol


def majorizes(r, rp, tol: float = 1e-10) -> bool:
    """True iff r majorizes rp: every descending prefix sum of r dominates.

    Both vectors must have equal length and equal totals (within 1e-9).
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    if r.shape != rp.shape or r.ndim != 1:
        raise ValidationError(f"majorization needs two equal-length vectors, got shapes {r.shape} and {rp.shape}")
    if abs(r.sum() - rp.sum()) > 1e-9:
        raise ValidationError(f"majorization needs equal totals, got {r.sum()!r} vs {rp.sum()!r}")
    lhs = np.cumsum(np.sort(r)[::-1])
    rhs = np.cumsum(np.sort(rp)[::-1])
    return bool(np.all(lhs >= rhs - tol))


def invert_gibbs_energy(h: Hamiltonian, target_energy: float) -> float:
    """Inverse temperature beta with Tr(H rho_beta) = target_energy.

    The Gibbs energy is strictly decreasing in beta, so the root is found
    by geometric bracket expansion followed by bisection; the returned
    beta reproduces the target within 1e-10.  ``target_energy`` must lie
    strictly between the extreme eigenvalues of H.
    """
    levels = h.levels_ascending
    lo, hi = float(levels[0]), float(levels[-1])
    if not (lo < target_energy < hi):
        raise DomainError(f"target energy {target_energy} is outside the open spectral range ({lo}, {hi})")

    def gibbs_energy(beta: float) -> float:
        return float(gibbs_populations(h, beta) @ levels)

    mean = float(levels.mean())
    if target_energy == mean:
        return 0.0
    sign = 1.0 if target_energy < mean else -1.0
    b = 1.0
    while (gibbs_energy(sign * b) - target_energy) * sign > 0:
        b *= 2.0
        if b > 2.0**80:  # pragma: no cover - unreachable for in-range targets
            raise DomainError(f"failed to bracket beta for target energy {target_energy}")
    low_beta, high_beta = (0.0, b) if sign > 0 else (-b, 0.0)
    # E(beta) decreases in beta: E(low_beta) >= target >= E(high_beta)
    for _ in range(200):
        mid = 0.5 * (low_beta + high_beta)
        e_mid = gibbs_energy(mid)
        if abs(e_mid - target_energy) <= 1e-12:
            return mid
        if e_mid > target_energy:
            low_beta = mid
        else:
            high_beta = mid
    return 0.5 * (low_beta + high_beta)
