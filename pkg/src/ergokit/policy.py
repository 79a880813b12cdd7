"""Numeric tolerance policy threaded through validating constructors.

One knob for "how Hermitian / trace-one / unitary must an input be", one
for "how exact must a constructed object be".  Operations that accept a
policy default to :data:`DEFAULT_POLICY`.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances used when validating inputs and constructed values.

    Attributes
    ----------
    validation_tol : float
        Absolute elementwise tolerance for accepting user input
        (Hermiticity, trace normalization, PSD checks).
    construction_tol : float
        Absolute tolerance objects built by the library itself must meet
        (unitarity of sampled matrices, simplex normalization).
    """

    validation_tol: float = 1e-10
    construction_tol: float = 1e-12


DEFAULT_POLICY = NumericPolicy()
