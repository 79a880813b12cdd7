"""Seeded self-check battery behind ``ergokit check``.

Each check draws from its own substream of one seed and reports a
deterministic one-line result, so two runs with the same seed print
byte-identical logs.  The battery is a condensed version of the module
invariants; the full-size versions live in the test suite.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import kstest

from .bounds import (
    ergotropy_minus,
    negative_beta_chain,
    nonunital_bounds,
    optimal_charging_unitary,
    optimal_extraction_unitary,
    tightness_chain,
    unital_bounds,
)
from .channels import (
    KrausChannel,
    birkhoff_decompose,
    sample_projective_feedback,
    sample_uhlmann_unital,
    unital_no_feedback_representation,
)
from .linalg import (
    RandomStream,
    haar_unitaries,
    hermitian_eigendecompose,
    hermitian_part,
    polar_decompose,
    random_probability_vector,
)
from .states import (
    DensityMatrix,
    Hamiltonian,
    energy,
    entropy_of_populations,
    equilibrium_free_energy,
    gibbs_populations,
    gibbs_state,
    invert_gibbs_energy,
    majorizes,
    nonequilibrium_free_energy,
    relative_entropy,
    von_neumann_entropy,
)

__all__ = ["run_invariant_checks", "random_hermitian", "random_density_matrix"]


def random_hermitian(d: int, rng: RandomStream, scale: float = 1.0) -> np.ndarray:
    g = rng.generator
    z = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
    return hermitian_part(z) * scale


def random_density_matrix(d: int, rng: RandomStream) -> DensityMatrix:
    """Hilbert-Schmidt-distributed random state: G G^dag / Tr."""
    g = rng.generator
    z = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
    m = z @ z.conj().T
    return DensityMatrix(m / np.trace(m).real)


def _unit_scale(m: np.ndarray) -> np.ndarray:
    return m / max(float(np.max(np.abs(np.linalg.eigvalsh(m)))), 1.0)


def _check_eigh_round_trip(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(1000):
        d = 2 + i % 5
        m = random_hermitian(d, rng.substream(i))
        system = hermitian_eigendecompose(m)
        worst = max(worst, float(np.max(np.abs(system.reconstruct() - m))))
        worst = max(worst, float(np.max(np.abs(system.eigenvectors.conj().T @ system.eigenvectors - np.eye(d)))))
    return worst <= 1e-9, f"n=1000, worst residual {worst:.3e} (<= 1e-9)"


def _check_polar_round_trip(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    worst_eig = 0.0
    for i in range(1000):
        d = 2 + i % 5
        g = rng.substream(i).generator
        k = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
        if i % 5 == 0:
            k[:, 0] = 0.0  # exercise the singular completion
        factors = polar_decompose(k)
        worst = max(worst, float(np.max(np.abs(factors.reconstruct() - k))))
        worst_eig = min(worst_eig, float(np.linalg.eigvalsh(factors.positive_part)[0]))
    ok = worst <= 1e-9 and worst_eig >= -1e-12
    return ok, f"n=1000, worst residual {worst:.3e} (<= 1e-9), lowest eigenvalue {worst_eig:.3e} (>= -1e-12)"


def _check_haar_unitarity(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for d in range(1, 7):
        us = haar_unitaries(d, 200, rng.substream(d))
        eye = np.eye(d)
        for u in us:
            worst = max(worst, float(np.max(np.abs(u.conj().T @ u - eye))))
    return worst <= 1e-12, f"n=1200 over d=1..6, worst defect {worst:.3e} (<= 1e-12)"


def _check_haar_moment(rng: RandomStream) -> tuple[bool, str]:
    d, n = 3, 10_000
    us = haar_unitaries(d, n, rng.substream(0))
    values = np.abs(us[:, 0, 0]) ** 2
    mean = float(values.mean())
    se = math.sqrt((d - 1) / (d * d * (d + 1)) / n)
    ok = abs(mean - 1.0 / d) <= 3 * se
    return ok, f"n={n}, mean |U11|^2 = {mean:.6f} vs 1/3 (3se = {3 * se:.2e})"


def _check_haar_ks(rng: RandomStream) -> tuple[bool, str]:
    us = haar_unitaries(2, 10_000, rng.substream(0))
    values = np.abs(us[:, 0, 0]) ** 2
    stat = kstest(values, "uniform")
    return stat.pvalue > 0.01, f"n=10000, d=2, KS p-value {stat.pvalue:.4f} (> 0.01)"


def _check_stream_determinism(rng: RandomStream) -> tuple[bool, str]:
    a = haar_unitaries(2, 10_000, rng.substream(0))
    b = haar_unitaries(2, 10_000, rng.substream(0))
    ok = bool(np.array_equal(a, b))
    return ok, f"n=10000, identically derived streams bit-identical: {ok}"


def _check_simplex_sampler(rng: RandomStream) -> tuple[bool, str]:
    n = 10_000
    worst_sum = 0.0
    lowest = 1.0
    total = np.zeros(3)
    stream = rng.substream(0)
    for _ in range(n):
        p = random_probability_vector(3, stream)
        worst_sum = max(worst_sum, abs(float(p.sum()) - 1.0))
        lowest = min(lowest, float(p.min()))
        total += p
    mean_err = float(np.max(np.abs(total / n - 1.0 / 3.0)))
    se = math.sqrt((1.0 / 18.0) / n)
    ok = worst_sum <= 1e-12 and lowest >= 0.0 and mean_err <= 3 * se
    return ok, f"n={n}, worst |sum-1| {worst_sum:.2e}, min {lowest:.2e}, mean error {mean_err:.2e} (3se {3 * se:.2e})"


def _check_free_energy_identities(rng: RandomStream) -> tuple[bool, str]:
    worst_eq = 0.0
    worst_gap = 0.0
    for i in range(100):
        stream = rng.substream(i)
        d = 2 + i % 3
        # keep beta * spread small enough that the Gibbs spectrum stays
        # resolvable above the 1e-10 rank tolerance of relative_entropy
        h = Hamiltonian(_unit_scale(random_hermitian(d, stream)))
        beta = float(stream.generator.uniform(0.05, 2.0))
        worst_eq = max(
            worst_eq,
            abs(nonequilibrium_free_energy(gibbs_state(h, beta), h, beta) - equilibrium_free_energy(h, beta)),
        )
        rho = random_density_matrix(d, stream.substream(1))
        gap = nonequilibrium_free_energy(rho, h, beta) - equilibrium_free_energy(h, beta)
        worst_gap = max(worst_gap, abs(gap - relative_entropy(rho, gibbs_state(h, beta)) / beta))
    ok = worst_eq <= 1e-10 and worst_gap <= 1e-9
    return ok, f"n=100, thermal-state equality {worst_eq:.3e} (<= 1e-10), gap-vs-divergence {worst_gap:.3e} (<= 1e-9)"


def _check_negative_beta_gap(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(200):
        stream = rng.substream(i)
        d = 2 + i % 3
        h = Hamiltonian(random_hermitian(d, stream))
        beta = float(stream.generator.uniform(0.05, 5.0))
        rho = random_density_matrix(d, stream.substream(1))
        excess = nonequilibrium_free_energy(rho, h, -beta) - equilibrium_free_energy(h, -beta)
        worst = max(worst, excess)
    return worst <= 1e-10, f"n=200, worst f_(-beta) - F_(-beta) = {worst:.3e} (<= 1e-10)"


def _check_max_entropy_principle(rng: RandomStream) -> tuple[bool, str]:
    worst = -math.inf
    for i in range(200):
        stream = rng.substream(i)
        d = 3
        h = Hamiltonian(random_hermitian(d, stream))
        rho = random_density_matrix(d, stream.substream(1))
        beta = invert_gibbs_energy(h, energy(rho, h))
        excess = von_neumann_entropy(rho) - von_neumann_entropy(gibbs_state(h, beta))
        worst = max(worst, excess)
    return worst <= 1e-9, f"n=200, worst S(rho) - S(gibbs at same energy) = {worst:.3e} (<= 1e-9)"


def _check_gibbs_curve_concavity(rng: RandomStream) -> tuple[bool, str]:
    h = Hamiltonian.from_diagonal([0.0, 0.0, 1.0])
    energies = np.linspace(0.05, 0.95, 100)
    entropies = []
    for e in energies:
        beta = invert_gibbs_energy(h, float(e))
        entropies.append(entropy_of_populations(gibbs_populations(h, beta)))
    second = np.diff(entropies, 2)
    worst = float(second.max())
    return worst <= 1e-8, f"grid n=100, max second difference {worst:.3e} (<= 1e-8)"


def _random_kraus_channel(d: int, n_ops: int, rng: RandomStream) -> KrausChannel:
    # Stinespring-style: slice a Haar unitary on the dilated space
    big = haar_unitaries(d * n_ops, 1, rng)[0]
    ops = [big[i * d:(i + 1) * d, :d] for i in range(n_ops)]
    return KrausChannel(ops)


def _check_cptp_and_feedback_fidelity(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(200):
        stream = rng.substream(i)
        d = 2 + i % 3
        ch = _random_kraus_channel(d, 2 + i % 2, stream)
        rho = random_density_matrix(d, stream.substream(1))
        direct = ch.apply(rho)  # revalidates CPTP output
        fb = ch.to_feedback_form()
        worst = max(worst, float(np.max(np.abs(fb.apply(rho).matrix - direct.matrix))))
    return worst <= 1e-9, f"n=200, worst feedback-form mismatch {worst:.3e} (<= 1e-9)"


def _check_unital_majorization(rng: RandomStream) -> tuple[bool, str]:
    bad = 0
    worst_ds = 0.0
    for i in range(500):
        stream = rng.substream(i)
        mixture = sample_uhlmann_unital(3, stream)
        rho = random_density_matrix(3, stream.substream(1))
        out = mixture.apply(rho)
        if not majorizes(rho.populations, out.populations):
            bad += 1
        worst_ds = min(worst_ds, von_neumann_entropy(out) - von_neumann_entropy(rho))
    ok = bad == 0 and worst_ds >= -1e-9
    return ok, f"n=500, majorization failures {bad}, worst entropy change {worst_ds:.3e} (>= -1e-9)"


def _check_composite_no_feedback_unital(rng: RandomStream) -> tuple[bool, str]:
    bad = 0
    for i in range(200):
        stream = rng.substream(i)
        d = 2 + i % 3
        basis = haar_unitaries(d, 1, stream)[0]
        u = haar_unitaries(d, 1, stream)[0]
        ops = [u @ np.outer(basis[:, k], basis[:, k].conj()) for k in range(d)]
        if not KrausChannel(ops).is_unital(1e-9):
            bad += 1
    return bad == 0, f"n=200, non-unital composite maps {bad} (expected 0)"


def _check_no_feedback_representation(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(200):
        stream = rng.substream(i)
        d = 2 + i % 3
        mixture = sample_uhlmann_unital(d, stream)
        rho = random_density_matrix(d, stream.substream(1))
        out = mixture.apply(rho)
        projections, u = unital_no_feedback_representation(out, rho)
        rebuilt = sum(u @ p @ rho.matrix @ p @ u.conj().T for p in projections)
        worst = max(worst, float(np.max(np.abs(rebuilt - out.matrix))))
    return worst <= 1e-8, f"n=200, worst reconstruction error {worst:.3e} (<= 1e-8)"


def _check_birkhoff(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    max_terms = 0
    for i in range(200):
        stream = rng.substream(i)
        u = haar_unitaries(3, 1, stream)[0]
        b = np.abs(u) ** 2
        decomposition = birkhoff_decompose(b)
        worst = max(worst, float(np.max(np.abs(decomposition.reconstruct() - b))))
        max_terms = max(max_terms, len(decomposition.permutations))
    ok = worst <= 1e-9 and max_terms <= 9
    return ok, f"n=200, worst reconstruction {worst:.3e} (<= 1e-9), max terms {max_terms} (<= 9)"


def _check_rearrangement(rng: RandomStream) -> tuple[bool, str]:
    bad = 0
    for i in range(10_000):
        g = rng.substream(i).generator
        d = 2 + i % 4
        x = g.standard_normal(d)
        y = g.standard_normal(d)
        perm = g.permutation(d)
        middle = float(x @ y[perm])
        low = float(np.sort(x) @ np.sort(y)[::-1])
        high = float(np.sort(x) @ np.sort(y))
        if not (low - 1e-12 <= middle <= high + 1e-12):
            bad += 1
    return bad == 0, f"n=10000, violations {bad} (expected 0)"


def _check_unitary_sandwich(rng: RandomStream) -> tuple[bool, str]:
    bad = 0
    for i in range(2000):
        stream = rng.substream(i)
        d = 2 + i % 3
        rho = random_density_matrix(d, stream)
        hp = Hamiltonian(random_hermitian(d, stream.substream(1)))
        u = haar_unitaries(d, 1, stream.substream(2))[0]
        value = float(np.trace(hp.matrix @ u @ rho.matrix @ u.conj().T).real)
        low = float(hp.levels_ascending @ rho.populations_descending)
        high = float(hp.levels_ascending @ rho.populations)
        if not (low - 1e-9 <= value <= high + 1e-9):
            bad += 1
    return bad == 0, f"n=2000, violations {bad} (expected 0)"


def _check_saturating_unitaries(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(200):
        stream = rng.substream(i)
        d = 2 + i % 3
        rho = random_density_matrix(d, stream)
        hp = Hamiltonian(random_hermitian(d, stream.substream(1)))
        u_minus = optimal_extraction_unitary(rho, hp)
        u_plus = optimal_charging_unitary(rho, hp)
        low = float(hp.levels_ascending @ rho.populations_descending)
        high = float(hp.levels_ascending @ rho.populations)
        got_low = float(np.trace(hp.matrix @ u_minus @ rho.matrix @ u_minus.conj().T).real)
        got_high = float(np.trace(hp.matrix @ u_plus @ rho.matrix @ u_plus.conj().T).real)
        worst = max(worst, abs(got_low - low), abs(got_high - high))
    return worst <= 1e-10, f"n=200, worst endpoint miss {worst:.3e} (<= 1e-10)"


def _check_bound_containment(rng: RandomStream) -> tuple[bool, str]:
    from .experiments import _batch_energies, _feedback_sample_outputs

    rho = DensityMatrix(np.diag([0.8, 0.03, 0.17]))
    h = Hamiltonian.from_diagonal([0.0, 0.0, 1.0])
    lower, upper = unital_bounds(rho, h, h)
    wide_lower, wide_upper = nonunital_bounds(rho, h, h)
    e0 = energy(rho, h)
    bad = 0
    for i in range(500):
        stream = rng.substream(i)
        unital_gain = energy(sample_uhlmann_unital(3, stream).apply(rho), h) - e0
        feedback_gain = energy(sample_projective_feedback(3, stream.substream(1)).apply(rho), h) - e0
        if not (lower - 1e-9 <= unital_gain <= upper + 1e-9):
            bad += 1
        if not (wide_lower - 1e-9 <= feedback_gain <= wide_upper + 1e-9):
            bad += 1
    gains = _batch_energies(_feedback_sample_outputs(rho.matrix, 10_000, rng.substream(10_000)), h) - e0
    outside = int(np.sum((gains < wide_lower - 1e-9) | (gains > wide_upper + 1e-9)))
    escaped = int(np.sum((gains < lower - 1e-9) | (gains > upper + 1e-9)))
    # calibrated floor: the true escape rate for this setup is ~0.25%
    fraction = escaped / 10_000.0
    ok = bad == 0 and outside == 0 and fraction >= 0.001
    return ok, (
        f"n=500 paired + 10000 feedback, bound violations {bad + outside} (expected 0), "
        f"escape fraction {fraction:.4f} (>= 0.001)"
    )


def _check_gibbs_passivity(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(100):
        stream = rng.substream(i)
        d = 2 + i % 3
        h = Hamiltonian(random_hermitian(d, stream))
        beta = float(stream.generator.uniform(0.05, 5.0))
        worst = max(worst, ergotropy_minus(gibbs_state(h, beta), h))
    return worst <= 1e-10, f"n=100, worst thermal ergotropy {worst:.3e} (<= 1e-10)"


def _check_tightness_chain(rng: RandomStream) -> tuple[bool, str]:
    h = Hamiltonian.from_diagonal([0.0, 0.5, 1.0])
    hp = Hamiltonian.from_diagonal([0.0, 0.1, 0.2])
    worst = math.inf
    for beta in np.geomspace(0.01, 50.0, 200):
        erg, fe = tightness_chain(h, hp, float(beta))
        worst = min(worst, erg - fe)
    return worst >= -1e-10, f"grid n=200, worst chain margin {worst:.3e} (>= -1e-10)"


def _check_negative_beta_chain(rng: RandomStream) -> tuple[bool, str]:
    worst = math.inf
    for i in range(20):
        g = rng.substream(i).generator
        h = Hamiltonian.from_diagonal(np.sort(g.uniform(0.0, 2.0, 3)))
        hp = Hamiltonian.from_diagonal(np.sort(g.uniform(0.0, 2.0, 3)))
        for beta in np.geomspace(0.01, 50.0, 50):
            erg, fe = negative_beta_chain(h, hp, float(beta))
            worst = min(worst, fe - erg)
    return worst >= -1e-10, f"n=20 pairs x 50 betas, worst margin {worst:.3e} (>= -1e-10)"


def _check_birkhoff_energy_identity(rng: RandomStream) -> tuple[bool, str]:
    worst = 0.0
    for i in range(200):
        stream = rng.substream(i)
        d = 3
        rho = random_density_matrix(d, stream)
        hp = Hamiltonian(random_hermitian(d, stream.substream(1)))
        u = haar_unitaries(d, 1, stream.substream(2))[0]
        overlap = hp.spectrum.eigenvectors.conj().T @ u @ rho.spectrum.eigenvectors
        b = np.abs(overlap) ** 2
        direct = float(np.trace(hp.matrix @ u @ rho.matrix @ u.conj().T).real)
        via_b = float(hp.levels_ascending @ (b @ rho.populations))
        worst = max(worst, abs(direct - via_b))
    return worst <= 1e-10, f"n=200, worst mismatch {worst:.3e} (<= 1e-10)"


_CHECKS = [
    ("eigendecomposition_round_trip", _check_eigh_round_trip),
    ("polar_round_trip", _check_polar_round_trip),
    ("haar_unitarity", _check_haar_unitarity),
    ("haar_first_entry_moment", _check_haar_moment),
    ("haar_ks_uniform_d2", _check_haar_ks),
    ("random_stream_determinism", _check_stream_determinism),
    ("simplex_sampler", _check_simplex_sampler),
    ("free_energy_identities", _check_free_energy_identities),
    ("negative_beta_free_energy_gap", _check_negative_beta_gap),
    ("max_entropy_principle", _check_max_entropy_principle),
    ("gibbs_curve_concavity", _check_gibbs_curve_concavity),
    ("cptp_apply_and_feedback_fidelity", _check_cptp_and_feedback_fidelity),
    ("unital_majorization_and_entropy", _check_unital_majorization),
    ("composite_no_feedback_unital", _check_composite_no_feedback_unital),
    ("no_feedback_representation", _check_no_feedback_representation),
    ("birkhoff_reconstruction", _check_birkhoff),
    ("rearrangement_inequality", _check_rearrangement),
    ("unitary_sandwich", _check_unitary_sandwich),
    ("saturating_unitaries", _check_saturating_unitaries),
    ("bound_containment_and_escape", _check_bound_containment),
    ("gibbs_passivity", _check_gibbs_passivity),
    ("tightness_chain", _check_tightness_chain),
    ("negative_beta_chain", _check_negative_beta_chain),
    ("birkhoff_energy_identity", _check_birkhoff_energy_identity),
]


def run_invariant_checks(seed: int, emit=print) -> bool:
    """Run the battery; emit one deterministic line per check.

    Returns True iff every check passed.
    """
    all_ok = True
    for index, (name, fn) in enumerate(_CHECKS):
        ok, detail = fn(RandomStream(seed).substream(index))
        all_ok &= ok
        emit(f"{'ok' if ok else 'FAIL'} {name}: {detail}")
    emit(f"{'PASS' if all_ok else 'FAIL'} {len(_CHECKS)} checks, seed={seed}")
    return all_ok
