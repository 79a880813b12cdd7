"""Quantum operations: Kraus channels, feedback presentations, decompositions.

A channel is a completely positive trace-preserving (CPTP) map held as
Kraus operators.  The module also provides the two random samplers used
by the experiments (mixtures of unitaries for unital maps, projective
measure-then-rotate channels for feedback maps) and two constructive
decompositions: the rank-1-projector/no-feedback representation of a
unital map's action on a fixed input, and the convex decomposition of a
doubly stochastic matrix into permutation matrices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantViolation, ValidationError
from .linalg import (
    RandomStream,
    as_square_matrix,
    haar_unitaries,
    hermitian_part,
    polar_decompose,
    unitarity_defect,
)
from .states import DensityMatrix, majorizes

__all__ = [
    "KrausChannel",
    "FeedbackForm",
    "UnitalMixture",
    "BirkhoffDecomposition",
    "sample_uhlmann_unital",
    "sample_projective_feedback",
    "unital_no_feedback_representation",
    "birkhoff_decompose",
]

_TRACE_PRESERVING_TOL = 1e-9
_UNITARY_TOL = 1e-10
_PSD_TOL = 1e-10


class KrausChannel:
    """CPTP map Phi(rho) = sum_i K_i rho K_i^dagger."""

    def __init__(self, kraus_ops):
        ops = [as_square_matrix(k, f"kraus_ops[{i}]") for i, k in enumerate(kraus_ops)]
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape[0] != d for k in ops):
            raise ValidationError("all Kraus operators must share one dimension")
        total = sum(k.conj().T @ k for k in ops)
        defect = float(np.max(np.abs(total - np.eye(d))))
        if defect > _TRACE_PRESERVING_TOL:
            raise ValidationError(
                f"Kraus operators are not trace-preserving: max |sum K^dag K - I| = {defect:.3e}"
            )
        for k in ops:
            k.setflags(write=False)
        self._ops = tuple(ops)
        self._dim = d

    @classmethod
    def from_unitary(cls, u) -> "KrausChannel":
        return cls([u])

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def kraus_ops(self) -> tuple:
        return self._ops

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """Propagate a state through the channel; output is revalidated."""
        if rho.dim != self._dim:
            raise ValidationError(f"dimension mismatch: channel is {self._dim}, state is {rho.dim}")
        out = sum(k @ rho.matrix @ k.conj().T for k in self._ops)
        return DensityMatrix(hermitian_part(out))

    def is_unital(self, tol: float = _TRACE_PRESERVING_TOL) -> bool:
        """True iff the channel fixes the identity: sum K K^dag = I within tol."""
        total = sum(k @ k.conj().T for k in self._ops)
        return float(np.max(np.abs(total - np.eye(self._dim)))) <= tol

    def to_feedback_form(self) -> "FeedbackForm":
        """Measure-then-rotate presentation via per-operator polar factors.

        Each K_i = U_i M_i with M_i >= 0, so the channel acts as a
        measurement {M_i} followed by the outcome-conditioned unitary U_i.
        """
        outcomes = []
        for k in self._ops:
            factors = polar_decompose(k)
            outcomes.append((factors.positive_part, factors.unitary))
        return FeedbackForm(outcomes)

    def __repr__(self) -> str:  # pragma: no cover
        return f"KrausChannel(dim={self._dim}, n_ops={len(self._ops)})"


class FeedbackForm:
    """A channel presented as outcome pairs (M_i, U_i): measure, then rotate."""

    def __init__(self, outcomes):
        pairs = []
        for i, (m, u) in enumerate(outcomes):
            m = as_square_matrix(m, f"outcomes[{i}].measurement_op")
            u = as_square_matrix(u, f"outcomes[{i}].feedback_unitary")
            pairs.append((m, u))
        if not pairs:
            raise ValidationError("a feedback form needs at least one outcome")
        d = pairs[0][0].shape[0]
        if any(m.shape[0] != d or u.shape[0] != d for m, u in pairs):
            raise ValidationError("all outcome operators must share one dimension")
        for i, (m, u) in enumerate(pairs):
            asym = float(np.max(np.abs(m - m.conj().T)))
            if asym > _PSD_TOL:
                raise ValidationError(f"outcomes[{i}].measurement_op is not Hermitian (asymmetry {asym:.3e})")
            low = float(np.linalg.eigvalsh(hermitian_part(m))[0])
            if low < -_PSD_TOL:
                raise ValidationError(f"outcomes[{i}].measurement_op has eigenvalue {low:.3e} < 0")
            defect = unitarity_defect(u)
            if defect > _UNITARY_TOL:
                raise ValidationError(f"outcomes[{i}].feedback_unitary is not unitary (defect {defect:.3e})")
        total = sum(m @ m for m, _ in pairs)
        defect = float(np.max(np.abs(total - np.eye(d))))
        if defect > _TRACE_PRESERVING_TOL:
            raise ValidationError(f"measurement operators do not resolve identity: max |sum M^2 - I| = {defect:.3e}")
        for m, u in pairs:
            m.setflags(write=False)
            u.setflags(write=False)
        self._outcomes = tuple(pairs)
        self._dim = d

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def outcomes(self) -> tuple:
        return self._outcomes

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """sum_i U_i M_i rho M_i U_i^dagger, revalidated."""
        if rho.dim != self._dim:
            raise ValidationError(f"dimension mismatch: channel is {self._dim}, state is {rho.dim}")
        out = sum(u @ m @ rho.matrix @ m @ u.conj().T for m, u in self._outcomes)
        return DensityMatrix(hermitian_part(out))

    def to_kraus(self) -> KrausChannel:
        return KrausChannel([u @ m for m, u in self._outcomes])

    def __repr__(self) -> str:  # pragma: no cover
        return f"FeedbackForm(dim={self._dim}, n_outcomes={len(self._outcomes)})"


class UnitalMixture:
    """Convex mixture of unitary conjugations sum_i p_i U_i rho U_i^dagger."""

    def __init__(self, weights, unitaries):
        w = np.asarray(weights, dtype=float)
        us = [as_square_matrix(u, f"unitaries[{i}]") for i, u in enumerate(unitaries)]
        if w.ndim != 1 or len(us) != w.shape[0]:
            raise ValidationError("weights and unitaries must have matching lengths")
        if w.size == 0:
            raise ValidationError("a mixture needs at least one unitary")
        if float(w.min()) < 0.0:
            raise ValidationError(f"weights must be nonnegative, got minimum {w.min()!r}")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"weights must sum to 1 within 1e-12, got {w.sum()!r}")
        d = us[0].shape[0]
        for i, u in enumerate(us):
            if u.shape[0] != d:
                raise ValidationError("all unitaries must share one dimension")
            defect = unitarity_defect(u)
            if defect > _UNITARY_TOL:
                raise ValidationError(f"unitaries[{i}] is not unitary (defect {defect:.3e})")
            u.setflags(write=False)
        w.setflags(write=False)
        self._weights = w
        self._unitaries = tuple(us)
        self._dim = d

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def unitaries(self) -> tuple:
        return self._unitaries

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dim != self._dim:
            raise ValidationError(f"dimension mismatch: mixture is {self._dim}, state is {rho.dim}")
        out = sum(p * (u @ rho.matrix @ u.conj().T) for p, u in zip(self._weights, self._unitaries))
        return DensityMatrix(hermitian_part(out))

    def to_kraus(self) -> KrausChannel:
        return KrausChannel([math.sqrt(p) * u for p, u in zip(self._weights, self._unitaries)])

    def __repr__(self) -> str:  # pragma: no cover
        return f"UnitalMixture(dim={self._dim}, n_unitaries={len(self._unitaries)})"


_UHLMANN_MAX_DIM = 6


def sample_uhlmann_unital(d: int, rng: RandomStream) -> UnitalMixture:
    """Random unital map as a mixture of d! Haar unitaries with flat weights.

    The mixture size matches the factorial count in the representation
    theorem for unital maps; d is capped at 6 to keep d! at desk scale.
    """
    if d < 2 or d > _UHLMANN_MAX_DIM:
        raise ValidationError(f"uhlmann sampling needs 2 <= d <= {_UHLMANN_MAX_DIM}, got {d}")
    count = math.factorial(d)
    unitaries = haar_unitaries(d, count, rng)
    weights = rng.generator.standard_exponential(count)
    weights = weights / weights.sum()
    return UnitalMixture(weights, list(unitaries))


def sample_projective_feedback(d: int, rng: RandomStream) -> FeedbackForm:
    """Random feedback channel: rank-1 projective measurement, Haar feedbacks.

    The measurement projectors are built from the columns of one Haar
    unitary (so sum M_i^2 = I by construction); each outcome gets its own
    independent Haar feedback unitary.
    """
    if d < 2:
        raise ValidationError(f"projective feedback sampling needs d >= 2, got {d}")
    basis = haar_unitaries(d, 1, rng)[0]
    feedbacks = haar_unitaries(d, d, rng)
    outcomes = []
    for i in range(d):
        psi = basis[:, i]
        projector = np.outer(psi, psi.conj())
        outcomes.append((hermitian_part(projector), feedbacks[i]))
    return FeedbackForm(outcomes)


def _schur_horn_basis(spectrum: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Real orthogonal Q with diag(Q diag(spectrum) Q^T) = targets, in order.

    Constructive chain of 2x2 rotations: targets are processed in
    decreasing order; each step picks the two active diagonal entries
    bracketing the target (ties to the lowest index), rotates the pair so
    one entry lands exactly on the target, and freezes that slot.  The
    partner entry keeps the pair's surplus, which preserves feasibility
    (majorization) of the leftover problem.  Frozen slots are finally
    permuted so slot i carries targets[i] in the caller's order.

    Requires spectrum to majorize targets; tiny drift beyond that is clamped.
    """
    n = spectrum.shape[0]
    diag = np.array(spectrum, dtype=float)
    q = np.eye(n)
    active = np.ones(n, dtype=bool)
    slot_for_target = np.empty(n, dtype=int)
    order = sorted(range(n), key=lambda i: (-targets[i], i))
    for target_index in order:
        t = float(targets[target_index])
        slots = np.flatnonzero(active)
        values = diag[slots]
        exact = slots[np.abs(values - t) <= 1e-12]
        if exact.size:
            pin = int(exact[0])
        else:
            above = slots[values >= t]
            below = slots[values <= t]
            if above.size == 0:
                # numerical drift pushed t above every active entry
                pin = int(slots[np.argmax(values)])
            elif below.size == 0:
                pin = int(slots[np.argmin(values)])
            else:
                hi = int(above[np.argmin(diag[above])])
                lo = int(below[np.argmax(diag[below])])
                x_hi, x_lo = diag[hi], diag[lo]
                c2 = float(np.clip((t - x_lo) / (x_hi - x_lo), 0.0, 1.0))
                c = math.sqrt(c2)
                s = math.sqrt(1.0 - c2)
                row_hi = c * q[hi] + s * q[lo]
                row_lo = -s * q[hi] + c * q[lo]
                q[hi] = row_hi
                q[lo] = row_lo
                diag[lo] = x_hi + x_lo - t
                pin = hi
        diag[pin] = t
        active[pin] = False
        slot_for_target[target_index] = pin
    return q[slot_for_target]


def unital_no_feedback_representation(ch_output: DensityMatrix, rho: DensityMatrix):
    """Rank-1 projections {P_i} and unitary U with sum U P_i rho P_i U^dag = ch_output.

    Exists whenever the output spectrum is majorized by the input spectrum
    (the defining property of unital-map outputs).  The construction goes
    through a Hermitian matrix with the input spectrum and the output
    spectrum on its diagonal, built by a rotation chain.

    Returns
    -------
    (projections, unitary)
        ``projections`` is a list of d rank-1 matrices; ``unitary`` is d x d.

    Raises
    ------
    DomainError
        If the majorization precondition fails beyond 1e-9.
    """
    if ch_output.dim != rho.dim:
        raise ValidationError(f"dimension mismatch: {ch_output.dim} vs {rho.dim}")
    r = rho.populations
    rp = ch_output.populations
    if not majorizes(r, rp, tol=1e-9):
        raise DomainError("output spectrum is not majorized by the input spectrum; not a unital image of the input")
    v = _schur_horn_basis(r, rp)
    w_in = rho.spectrum.eigenvectors
    w_out = ch_output.spectrum.eigenvectors
    # <psi_i | r_j> = v[i, j]
    psi = w_in @ v.conj().T
    projections = [np.outer(psi[:, i], psi[:, i].conj()) for i in range(rho.dim)]
    unitary = w_out @ psi.conj().T
    reconstructed = sum(
        unitary @ p @ rho.matrix @ p @ unitary.conj().T for p in projections
    )
    err = float(np.max(np.abs(reconstructed - ch_output.matrix)))
    if err > 1e-8:
        raise InvariantViolation(f"no-feedback reconstruction error {err:.3e} exceeds 1e-8")
    return projections, unitary


@dataclass(frozen=True)
class BirkhoffDecomposition:
    """Convex combination of permutation matrices: B = sum_k weights[k] P_k.

    ``permutations[k]`` is an integer array ``cols`` encoding the matrix
    with a 1 at (i, cols[i]) in every row i.
    """

    weights: np.ndarray
    permutations: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.shape[0] != len(self.permutations):
            raise ValidationError("weights and permutations must have matching lengths")
        if w.size == 0:
            raise ValidationError("a decomposition needs at least one term")
        if float(w.min()) < 0.0:
            raise ValidationError(f"weights must be nonnegative, got minimum {w.min()!r}")
        if abs(float(w.sum()) - 1.0) > 1e-10:
            raise ValidationError(f"weights must sum to 1 within 1e-10, got {w.sum()!r}")
        d = len(self.permutations[0])
        if w.shape[0] > d * d:
            raise ValidationError(f"decomposition has {w.shape[0]} terms, more than d^2 = {d * d}")
        for k, perm in enumerate(self.permutations):
            p = np.asarray(perm, dtype=int)
            if p.shape != (d,) or sorted(p.tolist()) != list(range(d)):
                raise ValidationError(f"permutations[{k}] is not a bijection on 0..{d - 1}")

    @property
    def dim(self) -> int:
        return len(self.permutations[0])

    def reconstruct(self) -> np.ndarray:
        d = self.dim
        out = np.zeros((d, d))
        for w, perm in zip(self.weights, self.permutations):
            out[np.arange(d), np.asarray(perm, dtype=int)] += w
        return out


_BIRKHOFF_MAX_DIM = 6
_BIRKHOFF_RESIDUAL_TOL = 1e-12


def birkhoff_decompose(b) -> BirkhoffDecomposition:
    """Decompose a doubly stochastic matrix into permutation matrices.

    Greedy extraction: among all permutations supported on the positive
    entries of the residual (exhaustive search, d <= 6), take the one with
    the largest bottleneck entry, subtract its minimum entry, and repeat.
    Each step zeroes at least one entry, so at most d^2 terms appear.
    """
    mat = np.asarray(b, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {mat.shape}")
    d = mat.shape[0]
    if d > _BIRKHOFF_MAX_DIM:
        raise ValidationError(f"decomposition supports d <= {_BIRKHOFF_MAX_DIM}, got {d}")
    if float(mat.min()) < -1e-9:
        raise ValidationError(f"matrix has negative entry {mat.min()!r}")
    row_sums = mat.sum(axis=1)
    col_sums = mat.sum(axis=0)
    worst_row = int(np.argmax(np.abs(row_sums - 1.0)))
    worst_col = int(np.argmax(np.abs(col_sums - 1.0)))
    if abs(row_sums[worst_row] - 1.0) > 1e-9 or abs(col_sums[worst_col] - 1.0) > 1e-9:
        raise ValidationError(
            f"matrix is not doubly stochastic: row {worst_row} sums to {row_sums[worst_row]!r}, "
            f"column {worst_col} sums to {col_sums[worst_col]!r}"
        )

    residual = np.clip(mat, 0.0, None)
    weights = []
    perms = []
    all_perms = list(itertools.permutations(range(d)))
    rows = np.arange(d)
    for _ in range(d * d):
        if float(residual.max()) <= _BIRKHOFF_RESIDUAL_TOL:
            break
        best_perm = None
        best_min = 0.0
        for perm in all_perms:
            low = float(residual[rows, perm].min())
            if low > best_min:
                best_min = low
                best_perm = perm
        if best_perm is None:
            break
        weights.append(best_min)
        perms.append(np.array(best_perm, dtype=int))
        residual[rows, best_perm] -= best_min
    weights = np.asarray(weights, dtype=float)
    decomposition = BirkhoffDecomposition(weights=weights, permutations=tuple(perms))
    err = float(np.max(np.abs(decomposition.reconstruct() - mat)))
    if err > 1e-9:
        raise InvariantViolation(f"birkhoff reconstruction error {err:.3e} exceeds 1e-9")
    return decomposition
