"""Dense complex linear algebra and randomness primitives.

Everything here works on plain ``numpy`` arrays: a d x d complex array is
the universal operator carrier.  Validating wrappers return small frozen
dataclasses (:class:`HermitianEigenSystem`, :class:`PolarFactors`) whose
contents are ready-sorted the way the rest of the library expects
(eigenvalues ascending).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .policy import DEFAULT_POLICY, NumericPolicy

__all__ = [
    "HermitianEigenSystem",
    "PolarFactors",
    "RandomStream",
    "as_square_matrix",
    "max_asymmetry",
    "hermitian_part",
    "matrices_close",
    "unitarity_defect",
    "hermitian_eigendecompose",
    "polar_decompose",
    "haar_unitary",
    "haar_unitaries",
    "random_probability_vector",
]


def as_square_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a square complex ndarray (d >= 1) or raise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{name} must be a square d x d matrix with d >= 1, got shape {a.shape}")
    return a


def max_asymmetry(m: np.ndarray) -> float:
    """Largest elementwise deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_part(m: np.ndarray) -> np.ndarray:
    """Return (m + m^dagger) / 2."""
    return (m + m.conj().T) / 2.0


def matrices_close(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Elementwise comparison with an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.max(np.abs(a - b)) <= tol) if a.size else True


def unitarity_defect(u: np.ndarray) -> float:
    """Max-norm of U^dagger U - I."""
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``eigenvectors[:, i]`` is the orthonormal eigenvector belonging to
    ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def ascending(self) -> np.ndarray:
        """Eigenvalues in increasing order (alias for ``eigenvalues``)."""
        return self.eigenvalues

    @property
    def descending(self) -> np.ndarray:
        """Eigenvalues in decreasing order."""
        return self.eigenvalues[::-1]

    @property
    def vectors_descending(self) -> np.ndarray:
        """Eigenvector columns reordered to match :attr:`descending`."""
        return self.eigenvectors[:, ::-1]

    def reconstruct(self) -> np.ndarray:
        """Return V diag(lambda) V^dagger."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def hermitian_eigendecompose(
    m, policy: NumericPolicy = DEFAULT_POLICY, name: str = "matrix"
) -> HermitianEigenSystem:
    """Eigendecompose a Hermitian matrix into ascending eigenvalues.

    The input is symmetrized as (m + m^dagger)/2 before decomposition;
    asymmetry beyond ``policy.validation_tol`` is rejected.

    Raises
    ------
    ValidationError
        If ``m`` is not square, or not Hermitian within tolerance (the
        message names the maximal asymmetry).
    """
    a = as_square_matrix(m, name)
    asym = max_asymmetry(a)
    if asym > policy.validation_tol:
        raise ValidationError(
            f"{name} is not Hermitian: max |m - m^dagger| = {asym:.3e} "
            f"exceeds tolerance {policy.validation_tol:.1e}"
        )
    evals, evecs = np.linalg.eigh(hermitian_part(a))
    return HermitianEigenSystem(eigenvalues=evals, eigenvectors=evecs)


@dataclass(frozen=True)
class PolarFactors:
    """Right polar decomposition k = unitary @ positive_part."""

    unitary: np.ndarray
    positive_part: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.unitary @ self.positive_part


def polar_decompose(k, name: str = "matrix") -> PolarFactors:
    """Polar-decompose a square matrix as k = U M with M = (k^dagger k)^(1/2).

    Computed from the singular value decomposition k = V Sigma W^dagger:
    U = V W^dagger and M = W Sigma W^dagger.  For singular ``k`` this
    completes U canonically (U stays exactly unitary).
    """
    a = as_square_matrix(k, name)
    v, s, wh = np.linalg.svd(a)
    unitary = v @ wh
    positive = wh.conj().T @ (s[:, None] * wh)
    return PolarFactors(unitary=unitary, positive_part=hermitian_part(positive))


class RandomStream:
    """Deterministic, seedable source of randomness with derivable substreams.

    Built on the counter-based Philox generator keyed by ``(seed, path)``:
    two streams constructed from the same seed and substream path produce
    bit-identical sample sequences on any platform.  A stream is
    single-owner; hand independent work units their own
    ``substream(task_index)`` instead of sharing one (distinct paths never
    collide).
    """

    def __init__(self, seed: int, _path: tuple = ()):
        if not (0 <= int(seed) < 2**64):
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.path = tuple(int(p) for p in _path)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def substream(self, task_index: int) -> "RandomStream":
        """Independent stream for Monte-Carlo task ``task_index`` (>= 0)."""
        if task_index < 0:
            raise ValidationError(f"task_index must be >= 0, got {task_index}")
        return RandomStream(self.seed, self.path + (task_index,))

    def __repr__(self) -> str:  # pragma: no cover
        return f"RandomStream(seed={self.seed}, path={self.path})"


def haar_unitaries(d: int, n: int, rng: RandomStream) -> np.ndarray:
    """Draw ``n`` independent Haar-distributed d x d unitaries, shape (n, d, d).

    Construction: QR orthonormalization of a complex standard-Gaussian
    matrix, with the phases of the triangular factor's diagonal absorbed
    into Q so the distribution is exactly the Haar measure.
    """
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    if n < 0:
        raise ValidationError(f"sample count must be >= 0, got {n}")
    g = rng.generator
    z = g.standard_normal((n, d, d)) + 1j * g.standard_normal((n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[:, None, :]
    return q


def haar_unitary(d: int, rng: RandomStream) -> np.ndarray:
    """Draw one Haar-distributed d x d unitary."""
    return haar_unitaries(d, 1, rng)[0]


def random_probability_vector(n: int, rng: RandomStream) -> np.ndarray:
    """Draw a probability vector uniformly from the (n-1)-simplex.

    Flat Dirichlet via normalized standard exponentials; entries are >= 0
    and sum to 1 within construction tolerance.
    """
    if n < 1:
        raise ValidationError(f"vector length must be >= 1, got {n}")
    w = rng.generator.standard_exponential(n)
    return w / w.sum()
