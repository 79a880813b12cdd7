import math

import numpy as np
import pytest

from ergokit.checks import random_density_matrix, random_hermitian
from ergokit.errors import DomainError, ValidationError
from ergokit.linalg import RandomStream
from ergokit.states import (
    DensityMatrix,
    Hamiltonian,
    energy,
    entropy_of_populations,
    equilibrium_free_energy,
    gibbs_populations,
    gibbs_state,
    invert_gibbs_energy,
    is_passive,
    majorizes,
    nonequilibrium_free_energy,
    relative_entropy,
    von_neumann_entropy,
)

RHO_FIG2 = np.diag([0.8, 0.03, 0.17])
H_FIG2 = [0.0, 0.0, 1.0]


class TestValidation:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValidationError, match="trace"):
            DensityMatrix(np.diag([0.5, 0.6]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError, match="eigenvalue"):
            DensityMatrix(np.diag([1.2, -0.2]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.array([[0.5, 0.3], [0.0, 0.5]]))

    def test_clamps_psd_noise(self):
        rho = DensityMatrix(np.diag([1.0 + 5e-11, -5e-11]))
        assert float(rho.populations.min()) == 0.0

    def test_hamiltonian_needs_hermitian(self):
        with pytest.raises(ValidationError):
            Hamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestEnergy:
    def test_fig2_value(self):
        assert energy(DensityMatrix(RHO_FIG2), Hamiltonian.from_diagonal(H_FIG2)) == pytest.approx(0.17, abs=1e-14)

    def test_maximally_mixed(self):
        h = Hamiltonian(random_hermitian(4, RandomStream(3)))
        assert energy(DensityMatrix.maximally_mixed(4), h) == pytest.approx(
            float(np.trace(h.matrix).real) / 4, abs=1e-12
        )

    def test_two_level_coherent_state(self):
        rho = DensityMatrix(np.array([[0.5, -0.4], [-0.4, 0.5]]))
        assert energy(rho, Hamiltonian.from_diagonal([0.0, 1.0])) == pytest.approx(0.5, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError, match="mismatch"):
            energy(DensityMatrix.maximally_mixed(2), Hamiltonian.from_diagonal([0, 0, 1]))


class TestEntropy:
    def test_pure_state(self):
        assert von_neumann_entropy(DensityMatrix(np.diag([1.0, 0.0, 0.0]))) == 0.0

    def test_maximally_mixed(self):
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(3)) == pytest.approx(math.log(3), abs=1e-12)

    def test_fig2_value(self):
        # oracle: -(0.8 ln 0.8 + 0.03 ln 0.03 + 0.17 ln 0.17)
        expected = -sum(p * math.log(p) for p in (0.8, 0.03, 0.17))
        assert expected == pytest.approx(0.584944241099386, abs=1e-14)
        assert von_neumann_entropy(DensityMatrix(RHO_FIG2)) == pytest.approx(expected, abs=1e-12)

    def test_range_for_random_states(self):
        rng = RandomStream(17)
        for i in range(300):
            d = 2 + i % 4
            s = von_neumann_entropy(random_density_matrix(d, rng.substream(i)))
            assert -1e-12 <= s <= math.log(d) + 1e-9


class TestGibbs:
    def test_beta_zero_is_maximally_mixed(self):
        rho = gibbs_state(Hamiltonian.from_diagonal([0, 0.5, 1]), 0.0)
        assert np.array_equal(rho.matrix, np.eye(3) / 3)

    def test_large_beta_is_ground_projector(self):
        rho = gibbs_state(Hamiltonian.from_diagonal([0, 0.5, 1]), 1e4)
        assert np.max(np.abs(rho.matrix - np.diag([1.0, 0.0, 0.0]))) <= 1e-10

    def test_fig5_populations(self):
        # oracle: Boltzmann weights (1, e^-1, e^-2)/Z
        rho = gibbs_state(Hamiltonian.from_diagonal([0, 0.5, 1]), 2.0)
        expected = [0.6652409557748218, 0.24472847105479764, 0.09003057317038046]
        np.testing.assert_allclose(np.diag(rho.matrix).real, expected, atol=1e-12)

    def test_rejects_non_finite_beta(self):
        with pytest.raises(ValidationError):
            gibbs_state(Hamiltonian.from_diagonal([0, 1]), math.inf)

    def test_extreme_beta_does_not_overflow(self):
        h = Hamiltonian.from_diagonal([-500.0, 0.0, 800.0])
        for beta in (700.0, -700.0):
            rho = gibbs_state(h, beta)
            assert np.isfinite(rho.matrix).all()


class TestFreeEnergies:
    def test_zero_hamiltonian(self):
        h = Hamiltonian(np.zeros((4, 4)))
        assert equilibrium_free_energy(h, 2.0) == pytest.approx(-math.log(4) / 2.0, abs=1e-12)

    def test_two_level_values(self):
        h = Hamiltonian.from_diagonal([0.0, 1.0])
        assert equilibrium_free_energy(h, 1.0) == pytest.approx(-0.31326168751822286, abs=1e-12)
        assert equilibrium_free_energy(h, -1.0) == pytest.approx(1.3132616875182228, abs=1e-12)

    def test_beta_zero_is_a_domain_error(self):
        h = Hamiltonian.from_diagonal([0.0, 1.0])
        with pytest.raises(DomainError):
            equilibrium_free_energy(h, 0.0)
        with pytest.raises(DomainError):
            nonequilibrium_free_energy(DensityMatrix.maximally_mixed(2), h, 0.0)

    def test_nonequilibrium_values(self):
        h = Hamiltonian.from_diagonal([0.0, 1.0])
        assert nonequilibrium_free_energy(DensityMatrix.maximally_mixed(2), h, 1.0) == pytest.approx(
            0.5 - math.log(2), abs=1e-12
        )
        ground = DensityMatrix(np.diag([1.0, 0.0]))
        assert nonequilibrium_free_energy(ground, h, 3.7) == pytest.approx(0.0, abs=1e-12)

    def test_thermal_state_attains_equilibrium_value(self):
        rng = RandomStream(31)
        for i in range(100):
            h = Hamiltonian(random_hermitian(3, rng.substream(i)))
            beta = float(rng.substream(i).substream(1).generator.uniform(0.1, 3.0))
            f = nonequilibrium_free_energy(gibbs_state(h, beta), h, beta)
            assert f == pytest.approx(equilibrium_free_energy(h, beta), abs=1e-10)

    def test_positive_beta_gap_and_divergence_identity(self):
        rng = RandomStream(32)
        for i in range(1000):
            stream = rng.substream(i)
            d = 2 + i % 3
            m = random_hermitian(d, stream)
            m /= max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(m)))))
            h = Hamiltonian(m)
            beta = float(stream.generator.uniform(0.05, 2.0))
            rho = random_density_matrix(d, stream.substream(1))
            gap = nonequilibrium_free_energy(rho, h, beta) - equilibrium_free_energy(h, beta)
            assert gap >= -1e-10
            assert gap == pytest.approx(relative_entropy(rho, gibbs_state(h, beta)) / beta, abs=1e-9)

    def test_negative_beta_gap_reversed(self):
        rng = RandomStream(33)
        for i in range(1000):
            stream = rng.substream(i)
            d = 2 + i % 3
            m = random_hermitian(d, stream)
            m /= max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(m)))))
            h = Hamiltonian(m)
            beta = float(stream.generator.uniform(0.05, 2.0))
            rho = random_density_matrix(d, stream.substream(1))
            assert equilibrium_free_energy(h, -beta) - nonequilibrium_free_energy(rho, h, -beta) >= -1e-10


class TestRelativeEntropy:
    def test_identical_arguments(self):
        rho = random_density_matrix(3, RandomStream(41))
        assert abs(relative_entropy(rho, rho)) <= 1e-10

    def test_pure_vs_maximally_mixed(self):
        d = relative_entropy(DensityMatrix(np.diag([1.0, 0.0])), DensityMatrix.maximally_mixed(2))
        assert d == pytest.approx(math.log(2), abs=1e-12)

    def test_positivity_on_random_pairs(self):
        rng = RandomStream(42)
        for i in range(1000):
            d = 2 + i % 3
            rho = random_density_matrix(d, rng.substream(2 * i))
            sigma = random_density_matrix(d, rng.substream(2 * i + 1))
            assert relative_entropy(rho, sigma) >= -1e-10

    def test_support_violation_is_infinite(self):
        rho = DensityMatrix.maximally_mixed(2)
        sigma = DensityMatrix(np.diag([1.0, 0.0]))
        assert relative_entropy(rho, sigma) == math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            relative_entropy(DensityMatrix.maximally_mixed(2), DensityMatrix.maximally_mixed(3))


class TestPassivity:
    def test_gibbs_is_passive(self):
        rng = RandomStream(51)
        for i in range(50):
            h = Hamiltonian(random_hermitian(3, rng.substream(i)))
            assert is_passive(gibbs_state(h, 1.3), h)

    def test_fig3_state_is_passive(self):
        assert is_passive(DensityMatrix(np.diag([0.8, 0.17, 0.03])), Hamiltonian.from_diagonal(H_FIG2))

    def test_fig2_state_is_not(self):
        assert not is_passive(DensityMatrix(RHO_FIG2), Hamiltonian.from_diagonal(H_FIG2))


class TestMajorizes:
    def test_reflexive(self):
        assert majorizes([0.5, 0.3, 0.2], [0.5, 0.3, 0.2])

    def test_extreme_points(self):
        assert majorizes([1, 0, 0], [1 / 3, 1 / 3, 1 / 3])
        assert not majorizes([1 / 3, 1 / 3, 1 / 3], [1, 0, 0])

    def test_incomparable_pair(self):
        assert not majorizes([0.5, 0.3, 0.2], [0.6, 0.2, 0.2])

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            majorizes([0.5, 0.5], [1 / 3, 1 / 3, 1 / 3])

    def test_total_mismatch(self):
        with pytest.raises(ValidationError, match="totals"):
            majorizes([0.6, 0.6], [0.5, 0.5])


class TestInvertGibbsEnergy:
    def test_mean_energy_gives_beta_zero(self):
        h = Hamiltonian.from_diagonal([0.0, 0.5, 1.0])
        assert invert_gibbs_energy(h, 0.5) == 0.0

    def test_two_level_closed_form(self):
        # solve e^-b / (1 + e^-b) = 1/4  =>  b = ln 3
        h = Hamiltonian.from_diagonal([0.0, 1.0])
        beta = invert_gibbs_energy(h, 0.25)
        assert beta == pytest.approx(math.log(3), abs=1e-9)
        assert energy(gibbs_state(h, beta), h) == pytest.approx(0.25, abs=1e-10)

    def test_round_trip(self):
        rng = RandomStream(61)
        h = Hamiltonian.from_diagonal([0.0, 0.3, 1.1])
        levels = h.levels_ascending
        for i in range(100):
            target = float(rng.substream(i).generator.uniform(levels[0] + 1e-3, levels[-1] - 1e-3))
            beta = invert_gibbs_energy(h, target)
            assert energy(gibbs_state(h, beta), h) == pytest.approx(target, abs=1e-10)

    def test_out_of_range_targets(self):
        h = Hamiltonian.from_diagonal([0.0, 1.0])
        for target in (-0.1, 0.0, 1.0, 1.1):
            with pytest.raises(DomainError):
                invert_gibbs_energy(h, target)


class TestGibbsCurve:
    def test_concavity_of_max_entropy_curve(self):
        h = Hamiltonian.from_diagonal(H_FIG2)
        energies = np.linspace(0.05, 0.95, 120)
        entropies = [
            entropy_of_populations(gibbs_populations(h, invert_gibbs_energy(h, float(e)))) for e in energies
        ]
        assert float(np.diff(entropies, 2).max()) <= 1e-8

    def test_maximum_entropy_principle(self):
        rng = RandomStream(62)
        for i in range(1000):
            stream = rng.substream(i)
            d = 2 + i % 3
            h = Hamiltonian(random_hermitian(d, stream))
            rho = random_density_matrix(d, stream.substream(1))
            beta = invert_gibbs_energy(h, energy(rho, h))
            assert von_neumann_entropy(rho) <= von_neumann_entropy(gibbs_state(h, beta)) + 1e-9
