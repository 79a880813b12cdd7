"""Energy-gain bounds: ergotropy, charging, unital, nonunital, free-energy.

Conventions: eps_up is the ascending eigenvalue vector of a Hamiltonian,
r_up / r_down the ascending / descending population vector of a state.
All bounds reduce to inner products of these sorted vectors; the
saturating unitaries are explicit basis permutation maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantViolation, ValidationError
from .states import (
    DensityMatrix,
    Hamiltonian,
    energy,
    entropy_of_populations,
    equilibrium_free_energy,
    gibbs_populations,
    gibbs_state,
    von_neumann_entropy,
)

__all__ = [
    "BoundsReport",
    "ergotropy_minus",
    "ergotropy_plus",
    "unital_bounds",
    "nonunital_bounds",
    "optimal_extraction_unitary",
    "optimal_charging_unitary",
    "free_energy_gain",
    "second_law_rhs",
    "tightness_chain",
    "tightness_chain_equality",
    "negative_beta_chain",
    "compute_bounds_report",
]

_CLAMP = 1e-12


def _check_dims(rho: DensityMatrix, h: Hamiltonian) -> None:
    if rho.dim != h.dim:
        raise ValidationError(f"dimension mismatch: state is {rho.dim}-dimensional, hamiltonian is {h.dim}-dimensional")


def _clamp_nonnegative(value: float, label: str) -> float:
    # guaranteed >= 0; anything below -1e-12 means a bug upstream
    if value < -_CLAMP:
        raise InvariantViolation(f"{label} came out {value!r} < -1e-12")
    return max(value, 0.0)


def ergotropy_minus(rho: DensityMatrix, h: Hamiltonian) -> float:
    """Maximum energy extractable by a cyclic unitary: Tr(H rho) - eps_up . r_down."""
    _check_dims(rho, h)
    value = energy(rho, h) - float(h.levels_ascending @ rho.populations_descending)
    return _clamp_nonnegative(value, "ergotropy")

def ergotropy_plus(rho: DensityMatrix, h: Hamiltonian) -> float:
    """Maximum energy chargeable by a cyclic unitary: eps_up . r_up - Tr(H rho)."""
    _check_dims(rho, h)
    value = float(h.levels_ascending @ rho.populations) - energy(rho, h)
    return _clamp_nonnegative(value, "charging capacity")


def unital_bounds(rho: DensityMatrix, h: Hamiltonian, h_prime: Hamiltonian) -> tuple[float, float]:
    """Energy-gain window for unital operations driving H to H'.

    lower = eps'_up . r_down - Tr(H rho), upper = eps'_up . r_up - Tr(H rho);
    identical to the window for unitary operations.
    """
    _check_dims(rho, h)
    _check_dims(rho, h_prime)
    e0 = energy(rho, h)
    lower = float(h_prime.levels_ascending @ rho.populations_descending) - e0
    upper = float(h_prime.levels_ascending @ rho.populations) - e0
    return lower, upper


def nonunital_bounds(rho: DensityMatrix, h: Hamiltonian, h_prime: Hamiltonian) -> tuple[float, float]:
    """Energy-gain window for arbitrary (feedback-capable) operations:
    (eps'_1 - Tr(H rho), eps'_d - Tr(H rho))."""
    _check_dims(rho, h)
    _check_dims(rho, h_prime)
    e0 = energy(rho, h)
    levels = h_prime.levels_ascending
    return float(levels[0]) - e0, float(levels[-1]) - e0


def optimal_extraction_unitary(rho: DensityMatrix, h_prime: Hamiltonian) -> np.ndarray:
    """Unitary sending the i-th most populated eigenvector of rho to the
    i-th lowest level of H'; its image is passive and attains eps'_up . r_down."""
    _check_dims(rho, h_prime)
    return h_prime.spectrum.eigenvectors @ rho.spectrum.vectors_descending.conj().T


def optimal_charging_unitary(rho: DensityMatrix, h_prime: Hamiltonian) -> np.ndarray:
    """Unitary sending the i-th least populated eigenvector of rho to the
    i-th lowest level of H'; its image is maximally active and attains
    eps'_up . r_up."""
    _check_dims(rho, h_prime)
    return h_prime.spectrum.eigenvectors @ rho.spectrum.eigenvectors.conj().T


def free_energy_gain(h: Hamiltonian, h_prime: Hamiltonian, beta: float) -> float:
    """Equilibrium free-energy difference F'_beta - F_beta at fixed beta."""
    return equilibrium_free_energy(h_prime, beta) - equilibrium_free_energy(h, beta)


def second_law_rhs(rho_out: DensityMatrix, h: Hamiltonian, h_prime: Hamiltonian, beta: float) -> float:
    """Right side of the generalized second law for an initial thermal state:
    Delta F_beta + [S(rho_out) - S(rho_beta)] / beta, beta > 0."""
    if beta <= 0:
        raise DomainError(f"the second-law bound needs beta > 0, got {beta}")
    entropy_gain = von_neumann_entropy(rho_out) - entropy_of_populations(gibbs_populations(h, beta))
    return free_energy_gain(h, h_prime, beta) + entropy_gain / beta


def tightness_chain(h: Hamiltonian, h_prime: Hamiltonian, beta: float) -> tuple[float, float]:
    """Both lower bounds on unital energy gain from the thermal state rho_beta.

    Returns (delta_eps_up . r_down_beta, Delta F_beta); the first is never
    below the second.
    """
    if beta <= 0:
        raise DomainError(f"the tightness chain needs beta > 0, got {beta}")
    if h.dim != h_prime.dim:
        raise ValidationError(f"dimension mismatch: {h.dim} vs {h_prime.dim}")
    r_down = np.sort(gibbs_populations(h, beta))[::-1]
    delta_eps = h_prime.levels_ascending - h.levels_ascending
    ergotropy_lower = float(delta_eps @ r_down)
    free_energy_lower = free_energy_gain(h, h_prime, beta)
    if ergotropy_lower < free_energy_lower - 1e-10:
        raise InvariantViolation(
            f"chain violated: ergotropy lower bound {ergotropy_lower!r} fell below "
            f"free-energy bound {free_energy_lower!r}"
        )
    return ergotropy_lower, free_energy_lower


def tightness_chain_equality(h: Hamiltonian, h_prime: Hamiltonian, beta: float, tol: float = 1e-8) -> bool:
    """True iff the two chain bounds coincide at this beta.

    Detected operationally: the optimal extraction unitary must map the
    initial thermal state onto the final Hamiltonian's thermal state at
    the same beta (max-norm within tol).
    """
    if beta <= 0:
        raise DomainError(f"the tightness chain needs beta > 0, got {beta}")
    rho_beta = gibbs_state(h, beta)
    u = optimal_extraction_unitary(rho_beta, h_prime)
    moved = u @ rho_beta.matrix @ u.conj().T
    target = gibbs_state(h_prime, beta).matrix
    return float(np.max(np.abs(moved - target))) <= tol


def negative_beta_chain(h: Hamiltonian, h_prime: Hamiltonian, beta: float) -> tuple[float, float]:
    """Both upper bounds on unital energy gain from the inverted thermal
    state at inverse temperature -beta (beta > 0).

    Returns (delta_eps_up . r_up_{-beta}, Delta F_{-beta}); the first is
    never above the second.
    """
    if beta <= 0:
        raise DomainError(f"the negative-beta chain needs beta > 0 (the state sits at -beta), got {beta}")
    if h.dim != h_prime.dim:
        raise ValidationError(f"dimension mismatch: {h.dim} vs {h_prime.dim}")
    r_up = np.sort(gibbs_populations(h, -beta))
    delta_eps = h_prime.levels_ascending - h.levels_ascending
    ergotropy_upper = float(delta_eps @ r_up)
    free_energy_upper = free_energy_gain(h, h_prime, -beta)
    if ergotropy_upper > free_energy_upper + 1e-10:
        raise InvariantViolation(
            f"negative-beta chain violated: {ergotropy_upper!r} exceeds {free_energy_upper!r}"
        )
    return ergotropy_upper, free_energy_upper


@dataclass(frozen=True)
class BoundsReport:
    """All energy-gain bounds for one (rho, H, H') instance.

    ``free_energy_gain`` is present only when a beta was supplied.
    """

    ergotropy_minus: float
    ergotropy_plus: float
    unital_lower: float
    unital_upper: float
    nonunital_lower: float
    nonunital_upper: float
    free_energy_gain: float | None = None

    def __post_init__(self):
        if self.ergotropy_minus < -_CLAMP or self.ergotropy_plus < -_CLAMP:
            raise InvariantViolation("ergotropy and charging capacity must be nonnegative")
        ordered = (
            self.nonunital_lower <= self.unital_lower + 1e-10
            and self.unital_lower <= self.unital_upper + 1e-10
            and self.unital_upper <= self.nonunital_upper + 1e-10
        )
        if not ordered:
            raise InvariantViolation(
                "bounds are not nested: expected nonunital_lower <= unital_lower "
                f"<= unital_upper <= nonunital_upper, got {self}"
            )


def compute_bounds_report(
    rho: DensityMatrix,
    h: Hamiltonian,
    h_prime: Hamiltonian | None = None,
    beta: float | None = None,
) -> BoundsReport:
    """Assemble every bound for one instance (H' defaults to H)."""
    hp = h if h_prime is None else h_prime
    lower, upper = unital_bounds(rho, h, hp)
    wide_lower, wide_upper = nonunital_bounds(rho, h, hp)
    return BoundsReport(
        ergotropy_minus=ergotropy_minus(rho, h),
        ergotropy_plus=ergotropy_plus(rho, h),
        unital_lower=lower,
        unital_upper=upper,
        nonunital_lower=wide_lower,
        nonunital_upper=wide_upper,
        free_energy_gain=None if beta is None else free_energy_gain(h, hp, beta),
    )
