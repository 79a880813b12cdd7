import math

import numpy as np
import pytest
from scipy.stats import kstest

from ergokit.errors import ValidationError
from ergokit.linalg import (
    RandomStream,
    haar_unitaries,
    haar_unitary,
    hermitian_eigendecompose,
    matrices_close,
    polar_decompose,
    random_probability_vector,
)


class TestHermitianEigendecompose:
    def test_diagonal_input_sorted(self):
        system = hermitian_eigendecompose(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(system.eigenvalues, [1.0, 2.0, 3.0], atol=1e-14)
        # permutation eigenvectors: each column is a basis vector
        assert np.allclose(np.abs(system.eigenvectors), np.eye(3)[:, [1, 2, 0]], atol=1e-14)

    def test_symmetric_2x2(self):
        system = hermitian_eigendecompose(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(system.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_two_level_mixed_state(self):
        # closed form: eigenvalues 0.5 -+ 0.4
        system = hermitian_eigendecompose(np.array([[0.5, -0.4], [-0.4, 0.5]]))
        np.testing.assert_allclose(system.eigenvalues, [0.1, 0.9], atol=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            hermitian_eigendecompose(np.zeros((2, 3)))

    def test_rejects_non_hermitian_naming_asymmetry(self):
        with pytest.raises(ValidationError, match="asymmetry|Hermitian"):
            hermitian_eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_round_trip_property(self):
        rng = RandomStream(11)
        worst = 0.0
        for i in range(1000):
            d = 2 + i % 5
            g = rng.substream(i).generator
            z = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
            m = (z + z.conj().T) / 2
            system = hermitian_eigendecompose(m)
            worst = max(worst, float(np.max(np.abs(system.reconstruct() - m))))
            assert np.allclose(system.eigenvectors.conj().T @ system.eigenvectors, np.eye(d), atol=1e-10)
            assert np.all(np.diff(system.eigenvalues) >= 0)
        assert worst <= 1e-9


class TestPolarDecompose:
    def test_unitary_input(self):
        u0 = haar_unitary(3, RandomStream(5))
        factors = polar_decompose(u0)
        assert matrices_close(factors.positive_part, np.eye(3), 1e-10)
        assert matrices_close(factors.unitary, u0, 1e-10)

    def test_positive_input(self):
        m0 = np.diag([0.5, 1.5])
        factors = polar_decompose(m0)
        assert matrices_close(factors.unitary, np.eye(2), 1e-10)
        assert matrices_close(factors.positive_part, m0, 1e-10)

    def test_singular_input_canonical_completion(self):
        k = np.array([[0.0, 1.0], [0.0, 0.0]])
        factors = polar_decompose(k)
        # M = (k^dag k)^(1/2) is fixed; U is the SVD completion V W^dag
        assert matrices_close(factors.positive_part, np.diag([0.0, 1.0]), 1e-12)
        assert matrices_close(factors.unitary @ factors.positive_part, k, 1e-12)
        v, _, wh = np.linalg.svd(k)
        assert matrices_close(factors.unitary, v @ wh, 1e-12)
        assert matrices_close(factors.unitary.conj().T @ factors.unitary, np.eye(2), 1e-12)

    def test_round_trip_property_including_singular(self):
        rng = RandomStream(12)
        worst = 0.0
        lowest = 0.0
        for i in range(1000):
            d = 2 + i % 5
            g = rng.substream(i).generator
            k = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
            if i % 4 == 0:
                k[:, i % d] = 0.0
            factors = polar_decompose(k)
            worst = max(worst, float(np.max(np.abs(factors.reconstruct() - k))))
            lowest = min(lowest, float(np.linalg.eigvalsh(factors.positive_part)[0]))
        assert worst <= 1e-9
        assert lowest >= -1e-12


class TestHaarUnitary:
    def test_unitary_within_tolerance(self):
        rng = RandomStream(1)
        for d in (1, 2, 3, 5):
            u = haar_unitary(d, rng.substream(d))
            assert np.max(np.abs(u.conj().T @ u - np.eye(d))) <= 1e-12

    def test_dimension_one_is_a_phase(self):
        u = haar_unitary(1, RandomStream(3))
        assert abs(abs(u[0, 0]) - 1.0) <= 1e-12

    def test_rejects_zero_dimension(self):
        with pytest.raises(ValidationError):
            haar_unitary(0, RandomStream(0))

    def test_first_entry_moment(self):
        # Haar moment: E|U11|^2 = 1/d; |U11|^2 ~ Beta(1, d-1)
        d, n = 3, 100_000
        us = haar_unitaries(d, n, RandomStream(21))
        values = np.abs(us[:, 0, 0]) ** 2
        se = math.sqrt((d - 1) / (d * d * (d + 1)) / n)
        assert abs(float(values.mean()) - 1.0 / d) <= 3 * se

    def test_first_entry_distribution_d2(self):
        # |U11|^2 ~ Beta(1, 1) = uniform on [0, 1] for d = 2
        us = haar_unitaries(2, 10_000, RandomStream(22))
        values = np.abs(us[:, 0, 0]) ** 2
        assert kstest(values, "uniform").pvalue > 0.01


class TestRandomStream:
    def test_equal_seeds_bit_identical(self):
        a = haar_unitaries(2, 10_000, RandomStream(99))
        b = haar_unitaries(2, 10_000, RandomStream(99))
        assert np.array_equal(a, b)

    def test_substreams_differ_from_parent_and_each_other(self):
        root = RandomStream(4)
        u0 = haar_unitary(3, root.substream(0))
        u1 = haar_unitary(3, root.substream(1))
        u_root = haar_unitary(3, RandomStream(4))
        assert not np.allclose(u0, u1)
        assert not np.allclose(u0, u_root)

    def test_nested_substreams_do_not_collide(self):
        root = RandomStream(4)
        a = haar_unitary(2, root.substream(0).substream(1))
        b = haar_unitary(2, root.substream(1))
        assert not np.allclose(a, b)

    def test_rejects_bad_seed_and_index(self):
        with pytest.raises(ValidationError):
            RandomStream(-1)
        with pytest.raises(ValidationError):
            RandomStream(0).substream(-2)


class TestRandomProbabilityVector:
    def test_singleton(self):
        p = random_probability_vector(1, RandomStream(0))
        np.testing.assert_allclose(p, [1.0], atol=1e-15)

    def test_simplex_membership(self):
        rng = RandomStream(8)
        for i in range(200):
            p = random_probability_vector(1 + i % 6, rng.substream(i))
            assert float(p.min()) >= 0.0
            assert abs(float(p.sum()) - 1.0) <= 1e-12

    def test_componentwise_mean_is_uniform(self):
        n = 100_000
        stream = RandomStream(9)
        total = np.zeros(3)
        for _ in range(n):
            total += random_probability_vector(3, stream)
        se = math.sqrt((1.0 / 18.0) / n)  # Dirichlet(1,1,1) component variance 1/18
        assert np.max(np.abs(total / n - 1.0 / 3.0)) <= 3 * se

    def test_rejects_zero_length(self):
        with pytest.raises(ValidationError):
            random_probability_vector(0, RandomStream(0))
